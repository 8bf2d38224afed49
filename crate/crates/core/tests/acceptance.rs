//! Acceptance criteria 1–11, one PASS/FAIL line each, all at zero tolerance.
//!
//! Set `TRACESOS_BIG=1` to extend the (8,4) identity check to n = 8, 9.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use tracesos::cert42;
use tracesos::cert84::{self, ParamSystem, Q3Param};
use tracesos::golden;
use tracesos::matrix::RationalMatrix;
use tracesos::necklace::{self, Letter, OracleOptions, TraceProblem};
use tracesos::poly::{matrix_assignment, rat, rat_frac, AffineCoeff, Polynomial};
use tracesos::psd;
use tracesos::report::{self, VerifyConfig};
use tracesos::sdp::{self, BasisSpec, Rejection, SdpError, SdpOptions};

type Outcome = Result<String, String>;

fn problem(m: usize, r: usize, n: u16, diagonal_a: bool) -> Result<TraceProblem, String> {
    TraceProblem::new(m, r, n, diagonal_a).map_err(|e| e.to_string())
}

fn coeff(p: &TraceProblem) -> Result<Polynomial, String> {
    necklace::trace_coeff_necklace(p, OracleOptions::default()).map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dual_oracles() -> Outcome {
    let mut cases = 0;
    for (m, r, diag) in [(4, 2, false), (8, 4, true)] {
        for n in 1..=5 {
            let p = problem(m, r, n, diag)?;
            let a = coeff(&p)?;
            let b = necklace::trace_coeff_matrix(&p, OracleOptions::default()).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("oracles differ at {p}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} problems, necklace and matrix-power expansions identical"))
}

fn counterexample() -> Outcome {
    let ce = golden::counterexample();
    let assignment = matrix_assignment(&ce.a_matrix(), &ce.b_matrix());
    let abab = necklace::word_trace(&[Letter::A, Letter::B, Letter::A, Letter::B], 2)
        .map_err(|e| e.to_string())?
        .evaluate(&assignment)
        .map_err(|e| e.to_string())?;
    let s42 = coeff(&problem(4, 2, 2, false)?)?
        .evaluate(&assignment)
        .map_err(|e| e.to_string())?;
    let words = necklace::word_sum_trace(4, 2, 2)
        .map_err(|e| e.to_string())?
        .evaluate(&assignment)
        .map_err(|e| e.to_string())?;
    ensure(abab == rat(-31), || format!("trace(ABAB) = {abab}"))?;
    ensure(s42 == rat(138) && words == rat(138), || format!("trace(S42) = {s42} / {words}"))?;
    Ok("trace(ABAB) = -31, trace(S42) = 138".into())
}

fn identity_42() -> Outcome {
    for n in 1..=6 {
        let c = cert42::build_certificate42(n).map_err(|e| e.to_string())?;
        let target = coeff(&problem(4, 2, n, false)?)?;
        ensure(cert42::assemble_sos_42(&c) == target, || format!("identity fails at n={n}"))?;
    }
    ensure(cert42::q1_matrix(3).to_text() == golden::Q1_N3, || "Q1(n=3) bytes differ".into())?;
    ensure(cert42::q2_matrix(3).to_text() == golden::Q2_N3, || "Q2(n=3) bytes differ".into())?;
    Ok("identity n=1..6; Q1(3), Q2(3) byte-identical to the transcriptions".into())
}

fn audit_42() -> Outcome {
    for n in 1..=4 {
        let r = cert42::accounting_audit(n).map_err(|e| e.to_string())?;
        let expected = 6 * (n as u64).pow(4);
        ensure(r.is_clean() && r.necklaces == expected, || format!("audit unclean at n={n}"))?;
        ensure(n != 3 || r.necklaces == 486, || "n=3 total is not 486".into())?;
    }
    Ok("every cell equals its necklace count for n=1..4; totals 6n^4 (486 at n=3)".into())
}

fn entry_sums() -> Outcome {
    for n in 1..=8u16 {
        let c = cert42::build_certificate42(n).map_err(|e| e.to_string())?;
        let s = cert42::entry_sum_42(&c);
        ensure(s == rat(6 * (n as i64).pow(4)), || format!("(4,2) sum {s} at n={n}"))?;
    }
    for n in 2..=7u16 {
        let c = cert84::build_certificate84(n, &Q3Param::Published).map_err(|e| e.to_string())?;
        let s = cert84::entry_sum_84(&c);
        ensure(s == AffineCoeff::int(70 * (n as i64).pow(4)), || format!("(8,4) sum {s} at n={n}"))?;
    }
    let system = ParamSystem::new(golden::param_system());
    let symbolic = cert84::build_certificate84(5, &Q3Param::Symbolic).map_err(|e| e.to_string())?;
    let reduced = system
        .reduce(&cert84::entry_sum_84(&symbolic))
        .map_err(|e| e.to_string())?;
    ensure(reduced == AffineCoeff::int(70 * 625), || format!("symbolic sum reduces to {reduced}"))?;
    Ok("6n^4 for n=1..8; 70n^4 for n=2..7; symbolic sum at n=5 is 43750 modulo the system".into())
}

fn identity_84() -> Outcome {
    let top = if std::env::var_os("TRACESOS_BIG").is_some() { 9 } else { 7 };
    for n in 2..=top {
        let c = cert84::build_certificate84(n, &Q3Param::Published).map_err(|e| e.to_string())?;
        let target = coeff(&problem(8, 4, n, true)?)?;
        ensure(cert84::assemble_sos_84(&c) == target, || format!("identity fails at n={n}"))?;
    }
    Ok(format!("identity with the published x-values for n=2..{top}"))
}

fn param_system() -> Outcome {
    let derived = cert84::derive_param_system(5).map_err(|e| e.to_string())?;
    let bundled = ParamSystem::new(golden::param_system());
    ensure(bundled.len() == 11, || "transcription does not have 11 equations".into())?;
    ensure(derived.equivalent(&bundled).map_err(|e| e.to_string())?, || "solution sets differ".into())?;
    ensure(
        derived.satisfied_by(&cert84::published_values()).map_err(|e| e.to_string())?,
        || "published values violate the system".into(),
    )?;
    Ok(format!("{} derived equations, same solution set as the 11 published; x-values satisfy it", derived.len()))
}

fn psd_certificates() -> Outcome {
    for n in 1..=8u16 {
        psd::verify_gram_factor(&cert42::q1_matrix(n), &cert42::incidence_u(n), &rat(6)).map_err(|e| format!("Q1 n={n}: {e}"))?;
        let ones = RationalMatrix::all_ones(n as usize, n as usize);
        psd::verify_tensor_psd(&cert42::q2_matrix(n), &cert42::q2_left_factor(), &ones).map_err(|e| format!("Q2 n={n}: {e}"))?;
    }
    for n in 2..=6u16 {
        let q2 = cert84::q2_matrix(n);
        let split = n as usize * (n as usize - 1);
        let cert = psd::verify_schur(&q2, split).map_err(|e| format!("Q2(8,4) n={n}: {e}"))?;
        let complement = psd::schur_complement(&q2, split).map_err(|e| e.to_string())?;
        let expected = RationalMatrix::identity(complement.rows()).scale(&rat_frac(52, 5));
        ensure(complement == expected, || format!("Schur complement at n={n} is not 52/5 I"))?;
        cert.replay(&q2).map_err(|e| e.to_string())?;
    }
    let q3 = cert84::build_certificate84(5, &Q3Param::Published)
        .map_err(|e| e.to_string())?
        .q3_numeric()
        .ok_or("Q3 is not numeric")?
        .bare();
    let coeffs = psd::charpoly(&q3);
    let d = coeffs.len() - 1;
    let published = golden::q3_n5_charpoly();
    ensure(published.len() == 19, || "transcription does not have 19 coefficients".into())?;
    for (deg, c) in &published {
        ensure(coeffs[d - deg] == *c, || format!("x^{deg} coefficient differs"))?;
    }
    ensure(coeffs[d - 5..].iter().all(|c| c == &rat(0)), || "low coefficients do not vanish".into())?;
    let cert = psd::verify_charpoly_signs(&q3).map_err(|e| e.to_string())?;
    ensure(cert.nullity() == Some(6), || format!("nullity {:?}", cert.nullity()))?;
    for n in 2..=4u16 {
        let small = cert84::build_certificate84(n, &Q3Param::Published)
            .map_err(|e| e.to_string())?
            .q3_numeric()
            .ok_or("Q3 is not numeric")?;
        psd::verify_submatrix_matches(&q3, &cert84::q3_submatrix_pattern(5, n), &small)
            .map_err(|e| format!("Q3 n={n}: {e}"))?;
    }
    Ok("Q1 = 6UᵀU and Q2 Kronecker for n≤8; Schur 52/5 for n≤6; Q3(5) charpoly exact, nullity 6; Q3(2..4) principal submatrices PSD".into())
}

fn trivial_case() -> Outcome {
    for m in [2usize, 4, 6] {
        for n in 1..=3 {
            let square = necklace::expand_square_formula(m, n).map_err(|e| e.to_string())?;
            ensure(square == coeff(&problem(m, 0, n, false)?)?, || format!("({m},0,{n}) differs"))?;
        }
    }
    Ok("sum of squared entries of A^(m/2) equals the t^0 coefficient for m∈{2,4,6}, n≤3".into())
}

fn sdp_round_trip() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cases = [
        (problem(4, 2, 2, false)?, BasisSpec::cert42(2).map_err(|e| e.to_string())?, sdp::cert42_blocks(2).map_err(|e| e.to_string())?),
        (
            problem(8, 4, 3, true)?,
            BasisSpec::cert84(3, true).map_err(|e| e.to_string())?,
            sdp::cert84_blocks(3, &Q3Param::Published).map_err(|e| e.to_string())?,
        ),
    ];
    for (k, (p, basis, blocks)) in cases.into_iter().enumerate() {
        let prob = sdp::build_sdp(&p, basis, SdpOptions::default()).map_err(|e| e.to_string())?;
        let path = dir.path().join(format!("case{k}.dat-s"));
        sdp::export_sdpa(&prob, &path).map_err(|e| e.to_string())?;
        let back = sdp::import_sdpa(&path).map_err(|e| e.to_string())?;
        ensure(back == prob, || format!("{p}: round trip changed the problem"))?;
        let cert = sdp::rationalize_and_verify(&back, &blocks, &BigInt::from(1)).map_err(|e| format!("{p}: {e}"))?;
        ensure(cert.blocks == blocks, || format!("{p}: accepted blocks differ"))?;
        let mut bad = blocks.clone();
        let v = bad[0].get(0, 0) + rat(1);
        bad[0].set(0, 0, v);
        match sdp::rationalize_and_verify(&back, &bad, &BigInt::from(1)) {
            Err(SdpError::RationalizationFailed(Rejection::ConstraintViolated { .. })) => {}
            other => return Err(format!("{p}: perturbation not rejected ({other:?})")),
        }
    }
    let p5 = problem(8, 4, 5, true)?;
    let prob5 = sdp::build_sdp(&p5, BasisSpec::cert84(5, false).map_err(|e| e.to_string())?, SdpOptions::default())
        .map_err(|e| e.to_string())?;
    let blocks5 = sdp::cert84_blocks(5, &Q3Param::Published).map_err(|e| e.to_string())?;
    sdp::rationalize_and_verify(&prob5, &blocks5, &BigInt::from(1)).map_err(|e| format!("{p5}: {e}"))?;
    Ok("export→import identity for (4,2,2), (8,4,3); published certificates accepted; perturbations rejected".into())
}

fn suite<T: std::fmt::Debug>(name: &str, result: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    result.map_err(|e| format!("{name}: {e}"))
}

fn property_suites() -> Outcome {
    let config = Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config.clone(), TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let numeric = (common::numeric_poly(), common::numeric_poly(), common::numeric_poly());
    let ring = runner.run(&numeric, |(p, q, r)| {
        proptest::prop_assert_eq!(p.add(&q), q.add(&p));
        proptest::prop_assert_eq!(p.add(&q).add(&r), p.add(&q.add(&r)));
        let pq = p.mul(&q).unwrap();
        proptest::prop_assert_eq!(&pq, &q.mul(&p).unwrap());
        proptest::prop_assert_eq!(pq.mul(&r).unwrap(), p.mul(&q.mul(&r).unwrap()).unwrap());
        proptest::prop_assert_eq!(p.mul(&q.add(&r)).unwrap(), pq.add(&p.mul(&r).unwrap()));
        proptest::prop_assert!(p.sub(&p).is_zero());
        proptest::prop_assert_eq!(p.mul(&Polynomial::one()).unwrap(), p.clone());
        Ok(())
    });
    suite("ring laws", ring)?;
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let affine = (common::affine_poly(), common::affine_poly(), common::numeric_poly());
    let mixed = runner.run(&affine, |(p, q, r)| {
        proptest::prop_assert_eq!(p.add(&q), q.add(&p));
        proptest::prop_assert_eq!(p.mul(&r).unwrap(), r.mul(&p).unwrap());
        proptest::prop_assert_eq!(p.add(&q).mul(&r).unwrap(), p.mul(&r).unwrap().add(&q.mul(&r).unwrap()));
        Ok(())
    });
    suite("affine ring laws", mixed)?;

    for (m, r, diag) in [(4, 2, false), (6, 2, false), (8, 4, true)] {
        let target = coeff(&problem(m, r, 3, diag)?)?;
        for perm in common::permutations(3) {
            ensure(necklace::relabel_polynomial(&target, &perm) == target, || {
                format!("({m},{r},3) not invariant under {perm:?}")
            })?;
        }
    }
    let sos = cert42::assemble_sos_42(&cert42::build_certificate42(3).map_err(|e| e.to_string())?);
    for perm in common::permutations(3) {
        ensure(necklace::relabel_polynomial(&sos, &perm) == sos, || "certificate not invariant".into())?;
    }

    for (m, n) in [(2usize, 2u16), (4, 2), (4, 3), (6, 2)] {
        for r in (0..=m).step_by(2) {
            let p = problem(m, r, n, false)?;
            ensure(necklace::swap_kinds(&coeff(&p)?) == coeff(&p.swapped())?, || format!("swap fails at {p}"))?;
        }
    }

    let reference = |workers| -> Result<(String, String), String> {
        let opts = OracleOptions { workers: Some(workers), ..Default::default() };
        let a = necklace::trace_coeff_necklace(&problem(8, 4, 4, true)?, opts).map_err(|e| e.to_string())?;
        let b = necklace::trace_coeff_matrix(&problem(6, 2, 3, false)?, opts).map_err(|e| e.to_string())?;
        let report = report::verify_all(&VerifyConfig { max_n_42: 2, max_n_84: 3, oracle: opts }).to_text();
        Ok((format!("{}{}", a.to_json_value(), b.to_json_value()), report))
    };
    let base = reference(1)?;
    for w in [2, 3, 8] {
        ensure(reference(w)? == base, || format!("output differs with {w} workers"))?;
    }
    Ok("ring laws (2 × 1000 cases), relabeling invariance n=3, A↔B swap, worker-count determinism".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("dual-oracle equality", dual_oracles),
        ("counterexample reproduction", counterexample),
        ("(4,2) certificate identity", identity_42),
        ("(4,2) accounting audit", audit_42),
        ("entry-sum identities", entry_sums),
        ("(8,4) certificate identity", identity_84),
        ("parametric system", param_system),
        ("PSD certificates", psd_certificates),
        ("r=0 trivial case", trivial_case),
        ("SDP round-trip and soundness", sdp_round_trip),
        ("property suites", property_suites),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {} ({name}): {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
