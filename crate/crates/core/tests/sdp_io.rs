//! SDPA export/import and exact rationalization through files.

use num_bigint::BigInt;
use tracesos::cert84::Q3Param;
use tracesos::matrix::RationalMatrix;
use tracesos::necklace::TraceProblem;
use tracesos::poly::Rational;
use tracesos::sdp::{self, BasisSpec, Rejection, SdpError, SdpOptions};

fn problem84(n: u16, ansatz: bool) -> sdp::SdpProblem {
    let p = TraceProblem::new(8, 4, n, true).unwrap();
    sdp::build_sdp(&p, BasisSpec::cert84(n, ansatz).unwrap(), SdpOptions::default()).unwrap()
}

/// Blocks as a solver would report them: floats near the exact values.
fn noisy(blocks: &[RationalMatrix], eps: f64) -> Vec<RationalMatrix> {
    blocks
        .iter()
        .map(|q| q.map(|v| Rational::from_float(sdp::approx_f64(v) + eps).unwrap()))
        .collect()
}

#[test]
fn files_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    for (name, prob) in [("ansatz", problem84(4, true)), ("free", problem84(3, false))] {
        let file = dir.path().join(format!("{name}.dat-s"));
        sdp::export_sdpa(&prob, &file).unwrap();
        let back = sdp::import_sdpa(&file).unwrap();
        assert_eq!(back, prob, "{name}");
        assert_eq!(sdp::to_sdpa_string(&back), std::fs::read_to_string(&file).unwrap());
    }
}

#[test]
fn near_solution_rounds_to_the_published_certificate() {
    let prob = problem84(4, true);
    let exact = sdp::cert84_blocks(4, &Q3Param::Published).unwrap();
    let approx = noisy(&exact, 1e-9);
    let cert = sdp::rationalize_and_verify(&prob, &approx, &BigInt::from(1000)).unwrap();
    assert_eq!(cert.blocks, exact);
    assert_eq!(cert.psd.len(), exact.len());
}

#[test]
fn solution_json_round_trips_through_text() {
    let exact = sdp::cert84_blocks(4, &Q3Param::Published).unwrap();
    let text = sdp::solution_json(&exact).to_string();
    assert_eq!(sdp::parse_solution_json(&text).unwrap(), exact);
    assert!(sdp::parse_solution_json("{\"blocks\": [[[\"abc\"]]]}").is_err());
}

#[test]
fn published_parameters_fail_psd_at_six() {
    let prob = problem84(6, false);
    let exact = sdp::cert84_blocks(6, &Q3Param::Published).unwrap();
    match sdp::rationalize_and_verify(&prob, &exact, &BigInt::from(1000)) {
        Err(SdpError::RationalizationFailed(Rejection::NotPsd { block, reason })) => assert_eq!(block, 3, "{reason}"),
        other => panic!("expected a PSD rejection, got {other:?}"),
    }
}

#[test]
fn tampered_basis_is_detected() {
    let text = sdp::to_sdpa_string(&problem84(3, false));
    let tampered = text.replacen("* basis-hash ", "* basis-hash 0", 1);
    assert!(matches!(sdp::from_sdpa_str(&tampered), Err(SdpError::HashMismatch { .. })));
}

#[test]
fn truncated_file_is_a_parse_error() {
    let text = sdp::to_sdpa_string(&problem84(3, false));
    let cut: String = text.lines().take(text.lines().count() / 2).collect::<Vec<_>>().join("\n");
    assert!(sdp::from_sdpa_str(&cut).is_err());
}
