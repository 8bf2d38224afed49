//! Regeneration of published objects against the bundled transcriptions, and
//! the full verification suite.
//!
//! Reports contain no timings or worker counts, so identical configurations
//! give byte-identical output.

use std::fmt::Write as _;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::cert42;
use crate::cert84::{self, ParamSystem, Q3Param};
use crate::golden;
use crate::matrix::RationalMatrix;
use crate::necklace::{self, Letter, OracleOptions, TraceProblem};
use crate::poly::{matrix_assignment, rat, rat_frac, Monomial, Polynomial, Rational};
use crate::psd;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReportError {
    #[error("unknown object `{0}`; run with `--list` for the known identifiers")]
    UnknownObject(String),
    #[error("`{object}` differs from the bundled transcription: {detail}")]
    GoldenMismatch { object: String, detail: String },
    #[error("`{object}` could not be regenerated: {detail}")]
    Failed { object: String, detail: String },
}

/// Known object identifiers with a one-line description.
pub const OBJECTS: &[(&str, &str)] = &[
    ("Q1-n1", "(4,2) Gram matrix Q1 for n = 1"),
    ("Q1-n3", "(4,2) Gram matrix Q1 for n = 3"),
    ("Q2-n3", "(4,2) Gram matrix Q2 for n = 3"),
    ("U-n3", "incidence factor U with Q1 = 6 UᵀU for n = 3"),
    ("z1-n3", "(4,2) monomial vector z1 for n = 3"),
    ("z2-n3", "(4,2) monomial vectors z2(i,j) for n = 3"),
    ("entry-sum-42-n2", "(4,2) entry sum, 6 n^4 = 96 for n = 2"),
    ("necklace-count-42-n3", "number of (4,2,3)-necklaces, 486"),
    ("counterexample-ABAB", "trace(ABAB) = -31 and the trace coefficient 138"),
    ("x-values", "parameter values x1..x22 satisfy the coefficient-matching system"),
    ("Q2-84-n5", "(8,4) Gram matrix Q2 for n = 5"),
    ("z2-84-n5", "(8,4) monomial vector z2 for n = 5"),
    ("z3-n5", "(8,4) monomial vectors z3(i,j) for n = 5"),
    ("Q3-n5", "(8,4) Gram matrix Q3 for n = 5 at the published values"),
    ("Q3-symbolic-n5", "(8,4) Gram matrix Q3 for n = 5 in x1..x22"),
    ("Q3-n5-charpoly", "characteristic polynomial of Q3 for n = 5, nullity 6"),
    ("Q2-84-schur", "Schur complement of Q2 for n = 5, 52/5 on the diagonal"),
    ("param-system", "the 11 coefficient-matching equations, derived at n = 5"),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reproduction {
    pub object: String,
    /// The regenerated object in canonical text form.
    pub text: String,
    /// What was compared.
    pub detail: String,
}

fn monomial_lines(z: &[Monomial]) -> String {
    z.iter().map(|m| format!("{m}\n")).collect()
}

fn family_lines(family: &std::collections::BTreeMap<(u16, u16), Vec<Monomial>>) -> String {
    family
        .iter()
        .map(|((i, j), z)| {
            let parts: Vec<String> = z.iter().map(ToString::to_string).collect();
            format!("({i},{j}) {}\n", parts.join(" "))
        })
        .collect()
}

fn compare_text(object: &str, regenerated: String, golden_text: &str) -> Result<Reproduction, ReportError> {
    let normalize = |s: &str| -> Vec<String> {
        s.lines()
            .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
            .filter(|l| !l.is_empty())
            .collect()
    };
    let (ours, theirs) = (normalize(&regenerated), normalize(golden_text));
    if ours != theirs {
        let line = ours
            .iter()
            .zip(&theirs)
            .position(|(a, b)| a != b)
            .unwrap_or(ours.len().min(theirs.len()));
        return Err(ReportError::GoldenMismatch {
            object: object.into(),
            detail: format!("first difference at line {}", line + 1),
        });
    }
    Ok(Reproduction {
        object: object.into(),
        text: regenerated,
        detail: format!("{} lines match the bundled transcription", ours.len()),
    })
}

fn failed(object: &str) -> impl Fn(String) -> ReportError + '_ {
    move |detail| ReportError::Failed {
        object: object.into(),
        detail,
    }
}

fn mismatch(object: &str, detail: String) -> ReportError {
    ReportError::GoldenMismatch {
        object: object.into(),
        detail,
    }
}

/// Characteristic polynomial of `Q3(n=5)` compared with the transcription;
/// returns the regenerated `(degree, coefficient)` lines and the nullity.
fn charpoly_check(object: &str) -> Result<(String, usize), ReportError> {
    let q3 = cert84_q3(5).map_err(failed(object))?;
    let coeffs = psd::charpoly(&q3);
    let d = coeffs.len() - 1;
    let published = golden::q3_n5_charpoly();
    for (deg, c) in &published {
        if coeffs[d - deg] != *c {
            return Err(mismatch(object, format!("coefficient of x^{deg} is {}", coeffs[d - deg])));
        }
    }
    let lowest = published.iter().map(|(deg, _)| *deg).min().unwrap_or(0);
    if let Some(deg) = (0..lowest).find(|&deg| !coeffs[d - deg].is_zero()) {
        return Err(mismatch(object, format!("unexpected nonzero coefficient of x^{deg}")));
    }
    let cert = psd::verify_charpoly_signs(&q3).map_err(|e| failed(object)(e.to_string()))?;
    let nullity = cert.nullity().expect("charpoly witness records nullity");
    let text = (0..=d)
        .rev()
        .filter(|&deg| !coeffs[d - deg].is_zero())
        .map(|deg| format!("{deg} {}\n", coeffs[d - deg]))
        .collect();
    Ok((text, nullity))
}

fn cert84_q3(n: u16) -> Result<RationalMatrix, String> {
    cert84::build_certificate84(n, &Q3Param::Published)
        .map_err(|e| e.to_string())?
        .q3_numeric()
        .map(|q| q.bare())
        .ok_or_else(|| "numeric parameters expected".to_string())
}

/// `Q2(8,4)` for `n`, split after the ordered-pair block.
fn schur_84(n: u16) -> Result<(psd::PsdCertificate, RationalMatrix), String> {
    let q2 = cert84::q2_matrix(n);
    let split = n as usize * (n as usize - 1);
    let complement = psd::schur_complement(&q2, split).map_err(|e| e.to_string())?;
    let cert = psd::verify_schur(&q2, split).map_err(|e| e.to_string())?;
    Ok((cert, complement))
}

fn counterexample_values() -> Result<(Rational, Rational), String> {
    let ce = golden::counterexample();
    let assignment = matrix_assignment(&ce.a_matrix(), &ce.b_matrix());
    let abab = necklace::word_trace(&[Letter::A, Letter::B, Letter::A, Letter::B], 2)
        .map_err(|e| e.to_string())?
        .evaluate(&assignment)
        .map_err(|e| e.to_string())?;
    let problem = TraceProblem::new(4, 2, 2, false).map_err(|e| e.to_string())?;
    let s42 = necklace::trace_coeff_necklace(&problem, OracleOptions::default())
        .map_err(|e| e.to_string())?
        .evaluate(&assignment)
        .map_err(|e| e.to_string())?;
    Ok((abab, s42))
}

/// Regenerates a published object and compares it with the bundled transcription.
pub fn reproduce(object: &str) -> Result<Reproduction, ReportError> {
    let fail = failed(object);
    let ok = |text: String, detail: String| Reproduction {
        object: object.into(),
        text,
        detail,
    };
    match object {
        "Q1-n1" => {
            let q = cert42::q1_matrix(1).bare();
            if q != RationalMatrix::from_i64_rows(&[vec![6]]) {
                return Err(mismatch(object, format!("got {}", q.to_text().trim())));
            }
            Ok(ok(q.to_text(), "Q1 = [6]".into()))
        }
        "Q1-n3" => compare_text(object, cert42::q1_matrix(3).to_text(), golden::Q1_N3),
        "Q2-n3" => compare_text(object, cert42::q2_matrix(3).to_text(), golden::Q2_N3),
        "U-n3" => {
            let u = cert42::incidence_u(3);
            let rep = compare_text(object, u.to_text(), golden::U_N3)?;
            psd::verify_gram_factor(&cert42::q1_matrix(3), &u, &rat(6)).map_err(|e| fail(e.to_string()))?;
            Ok(Reproduction {
                detail: format!("{}; Q1 = 6 UᵀU holds", rep.detail),
                ..rep
            })
        }
        "z1-n3" => {
            let c = cert42::build_certificate42(3).map_err(|e| fail(e.to_string()))?;
            compare_text(object, monomial_lines(&c.z1), golden::Z1_N3)
        }
        "z2-n3" => {
            let c = cert42::build_certificate42(3).map_err(|e| fail(e.to_string()))?;
            compare_text(object, family_lines(&c.z2_family), golden::Z2_N3)
        }
        "entry-sum-42-n2" => {
            let c = cert42::build_certificate42(2).map_err(|e| fail(e.to_string()))?;
            let s = cert42::entry_sum_42(&c);
            if s != rat(96) {
                return Err(mismatch(object, format!("entry sum {s}")));
            }
            Ok(ok(format!("{s}\n"), "entry sum equals 6 * 2^4".into()))
        }
        "necklace-count-42-n3" => {
            let p = TraceProblem::new(4, 2, 3, false).map_err(|e| fail(e.to_string()))?;
            let count = necklace::enumerate_necklaces(&p, Default::default())
                .map_err(|e| fail(e.to_string()))?
                .count();
            if count != 486 {
                return Err(mismatch(object, format!("{count} necklaces")));
            }
            Ok(ok(format!("{count}\n"), "6 * 3^4 necklaces enumerated".into()))
        }
        "counterexample-ABAB" => {
            let ce = golden::counterexample();
            let (abab, s42) = counterexample_values().map_err(fail)?;
            if abab != ce.abab() || s42 != ce.s42() {
                return Err(mismatch(object, format!("trace(ABAB) = {abab}, coefficient = {s42}")));
            }
            Ok(ok(
                format!("trace(ABAB) = {abab}\ntrace coefficient = {s42}\n"),
                "both traces match".into(),
            ))
        }
        "x-values" => {
            let values = cert84::published_values();
            let system = cert84::derive_param_system(5).map_err(|e| fail(e.to_string()))?;
            if !system.satisfied_by(&values).map_err(|e| fail(e.to_string()))? {
                return Err(mismatch(object, "values violate the derived system".into()));
            }
            let text = values.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
            compare_text(object, text, golden::X_VALUES).map(|r| Reproduction {
                detail: format!("{}; the derived system holds", r.detail),
                ..r
            })
        }
        "Q2-84-n5" => compare_text(object, cert84::q2_matrix(5).to_text(), golden::Q2_84_N5),
        "z2-84-n5" => compare_text(object, monomial_lines(&cert84::z2_vector(5)), golden::Z2_84_N5),
        "z3-n5" => {
            let c = cert84::build_certificate84(5, &Q3Param::Published).map_err(|e| fail(e.to_string()))?;
            compare_text(object, family_lines(&c.z3_family), golden::Z3_N5)
        }
        "Q3-n5" => compare_text(object, cert84_q3(5).map_err(fail)?.to_text(), golden::Q3_N5),
        "Q3-symbolic-n5" => {
            let c = cert84::build_certificate84(5, &Q3Param::Symbolic).map_err(|e| fail(e.to_string()))?;
            compare_text(object, c.q3.to_text(), golden::Q3_SYMBOLIC_N5)
        }
        "Q3-n5-charpoly" => {
            let (text, nullity) = charpoly_check(object)?;
            if nullity != 6 {
                return Err(mismatch(object, format!("nullity {nullity}")));
            }
            Ok(ok(text, "all printed coefficients match; lower ones vanish; nullity 6; PSD".into()))
        }
        "Q2-84-schur" => {
            let (_, complement) = schur_84(5).map_err(fail)?;
            let expected = RationalMatrix::identity(complement.rows()).scale(&rat_frac(52, 5));
            if complement != expected {
                return Err(mismatch(object, "complement is not 52/5 times the identity".into()));
            }
            Ok(ok(complement.to_text(), "complement = 52/5 I; Q2 is PSD".into()))
        }
        "param-system" => {
            let derived = cert84::derive_param_system(5).map_err(|e| fail(e.to_string()))?;
            let bundled = ParamSystem::new(golden::param_system());
            if !derived.equivalent(&bundled).map_err(|e| fail(e.to_string()))? {
                return Err(mismatch(object, "solution sets differ".into()));
            }
            Ok(ok(
                derived.to_string(),
                format!("{} equations, same solution set as the transcription", derived.len()),
            ))
        }
        _ => Err(ReportError::UnknownObject(object.into())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Reported outcome of a question the published work leaves open.
    Info,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.status == Status::Fail)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Info => "INFO",
            };
            let _ = writeln!(out, "{tag} {}: {}", c.name, c.detail);
        }
        let failed = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        let _ = writeln!(out, "{} checks, {failed} failed", self.checks.len());
        out
    }

    fn record(&mut self, name: impl Into<String>, outcome: Result<String, String>) {
        let (status, detail) = match outcome {
            Ok(d) => (Status::Pass, d),
            Err(d) => (Status::Fail, d),
        };
        self.checks.push(Check {
            name: name.into(),
            status,
            detail,
        });
    }

    fn info(&mut self, name: impl Into<String>, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            status: Status::Info,
            detail,
        });
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub max_n_42: u16,
    pub max_n_84: u16,
    pub oracle: OracleOptions,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_n_42: 5,
            max_n_84: 5,
            oracle: OracleOptions::default(),
        }
    }
}

fn equal_or_diff(left: &Polynomial, right: &Polynomial) -> Result<String, String> {
    let diff = left.sub(right);
    match diff.terms().iter().next() {
        None => Ok(format!("{} terms agree", left.len())),
        Some((m, c)) => Err(format!("differ at {m} by {c} ({} terms differ)", diff.len())),
    }
}

fn oracle_pair(p: &TraceProblem, opts: OracleOptions) -> Result<(Polynomial, String), String> {
    let a = necklace::trace_coeff_necklace(p, opts).map_err(|e| e.to_string())?;
    let b = necklace::trace_coeff_matrix(p, opts).map_err(|e| e.to_string())?;
    let detail = equal_or_diff(&a, &b)?;
    Ok((a, detail))
}

/// Runs every verification up to the given dimensions.
pub fn verify_all(cfg: &VerifyConfig) -> Summary {
    let mut s = Summary::default();
    let opts = cfg.oracle;

    let (abab, s42) = counterexample_values().unwrap_or_else(|_| (rat(0), rat(0)));
    s.record(
        "counterexample",
        if (abab.clone(), s42.clone()) == (rat(-31), rat(138)) {
            Ok("trace(ABAB) = -31, trace coefficient = 138".into())
        } else {
            Err(format!("trace(ABAB) = {abab}, trace coefficient = {s42}"))
        },
    );

    for m in [2usize, 4, 6] {
        for n in 1..=3u16 {
            let outcome = (|| {
                let p = TraceProblem::new(m, 0, n, false).map_err(|e| e.to_string())?;
                let target = necklace::trace_coeff_necklace(&p, opts).map_err(|e| e.to_string())?;
                let square = necklace::expand_square_formula(m, n).map_err(|e| e.to_string())?;
                equal_or_diff(&square, &target)
            })();
            s.record(format!("square formula ({m},0,{n})"), outcome);
        }
    }

    for n in 1..=cfg.max_n_42 {
        let outcome = (|| {
            let p = TraceProblem::new(4, 2, n, false).map_err(|e| e.to_string())?;
            let (target, detail) = oracle_pair(&p, opts)?;
            let c = cert42::build_certificate42(n).map_err(|e| e.to_string())?;
            equal_or_diff(&cert42::assemble_sos_42(&c), &target)?;
            let sum = cert42::entry_sum_42(&c);
            if sum != rat(6 * (n as i64).pow(4)) {
                return Err(format!("entry sum {sum}"));
            }
            Ok(format!("oracles agree ({detail}); certificate identity holds; entry sum {sum}"))
        })();
        s.record(format!("(4,2) n={n}"), outcome);

        let audit = cert42::audit_report(n)
            .map_err(|e| e.to_string())
            .and_then(|r| {
                if r.is_clean() {
                    Ok(format!("{} cells exact, {} necklaces", r.cells_checked, r.necklaces))
                } else {
                    Err(format!(
                        "{} cell mismatches, {} monomial mismatches",
                        r.mismatches.len(),
                        r.monomial_mismatches.len()
                    ))
                }
            });
        s.record(format!("(4,2) audit n={n}"), audit);

        let psd_outcome = (|| {
            let q1 = cert42::q1_matrix(n);
            psd::verify_gram_factor(&q1, &cert42::incidence_u(n), &rat(6)).map_err(|e| e.to_string())?;
            let q2 = cert42::q2_matrix(n);
            let ones = RationalMatrix::all_ones(n as usize, n as usize);
            psd::verify_tensor_psd(&q2, &cert42::q2_left_factor(), &ones).map_err(|e| e.to_string())?;
            Ok("Q1 = 6 UᵀU, Q2 = [[4,2],[2,4]] ⊗ J".to_string())
        })();
        s.record(format!("(4,2) PSD n={n}"), psd_outcome);
    }
    if cfg.max_n_42 >= 3 {
        for id in ["Q1-n3", "Q2-n3", "z1-n3", "z2-n3", "U-n3"] {
            s.record(format!("golden {id}"), reproduce(id).map(|r| r.detail).map_err(|e| e.to_string()));
        }
    }

    for n in 1..=cfg.max_n_84 {
        let outcome = (|| {
            let p = TraceProblem::new(8, 4, n, true).map_err(|e| e.to_string())?;
            let (target, detail) = oracle_pair(&p, opts)?;
            let c = cert84::build_certificate84(n, &Q3Param::Published).map_err(|e| e.to_string())?;
            equal_or_diff(&cert84::assemble_sos_84(&c), &target)?;
            let sum = cert84::entry_sum_84(&c);
            if n >= 2 && sum != crate::poly::AffineCoeff::int(70 * (n as i64).pow(4)) {
                return Err(format!("entry sum {sum}"));
            }
            Ok(format!("oracles agree ({detail}); certificate identity holds; entry sum {sum}"))
        })();
        s.record(format!("(8,4) n={n}"), outcome);

        if n >= 2 {
            let outcome = schur_84(n).and_then(|(_, comp)| {
                let expected = RationalMatrix::identity(comp.rows()).scale(&rat_frac(52, 5));
                if comp == expected {
                    Ok("Schur complement = 52/5 I".to_string())
                } else {
                    Err("Schur complement differs from 52/5 I".to_string())
                }
            });
            s.record(format!("(8,4) Q2 PSD n={n}"), outcome);
        }
        match n {
            2..=4 => {
                let outcome = (|| {
                    let q5 = cert84_q3(5)?;
                    let small = cert84_q3(n)?;
                    let keep = cert84::q3_submatrix_pattern(5, n);
                    psd::verify_submatrix_matches(&q5, &keep, &small).map_err(|e| e.to_string())?;
                    Ok(format!("principal submatrix of Q3(n=5), PSD ({} rows)", keep.len()))
                })();
                s.record(format!("(8,4) Q3 PSD n={n}"), outcome);
            }
            5 => {
                let outcome = charpoly_check("Q3-n5-charpoly")
                    .map_err(|e| e.to_string())
                    .and_then(|(_, nullity)| {
                        if nullity == 6 {
                            Ok("characteristic polynomial matches; PSD with nullity 6".to_string())
                        } else {
                            Err(format!("nullity {nullity}"))
                        }
                    });
                s.record("(8,4) Q3 PSD n=5", outcome);
            }
            6.. => {
                let detail = match cert84_q3(n).and_then(|q| psd::verify_charpoly_signs(&q).map_err(|e| e.to_string())) {
                    Ok(c) => format!("no published proof; characteristic-polynomial test: PSD, nullity {}", c.nullity().unwrap_or(0)),
                    Err(e) => format!("no published proof; characteristic-polynomial test: not PSD ({e})"),
                };
                s.info(format!("(8,4) Q3 PSD n={n}"), detail);
            }
            _ => {}
        }
    }
    if cfg.max_n_84 >= 5 {
        for id in ["x-values", "Q2-84-n5", "z2-84-n5", "z3-n5", "Q3-n5", "Q3-symbolic-n5", "param-system"] {
            s.record(format!("golden {id}"), reproduce(id).map(|r| r.detail).map_err(|e| e.to_string()));
        }
    }
    s
}
