use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;

use tracesos::cert42;
use tracesos::cert84::{self, Q3Param};
use tracesos::matrix::RationalMatrix;
use tracesos::necklace::{self, OracleOptions, TraceProblem, DEFAULT_BUDGET};
use tracesos::poly::{matrix_assignment, Rational};
use tracesos::psd::{self, AutoMethod};
use tracesos::report::{self, VerifyConfig};
use tracesos::sdp::{self, BasisSpec, SdpOptions};

/// Exact sum-of-squares certificates for trace coefficients of (A + tB)^m.
#[derive(Parser)]
#[command(name = "tracesos", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for the enumeration oracles (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Maximum number of necklace visits.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Lift the visit budget for large runs such as (8,4,8) and (8,4,9).
    #[arg(long, global = true)]
    big: bool,
}

impl Global {
    fn oracle(&self) -> Result<OracleOptions> {
        if self.budget == 0 {
            bail!("--budget must be positive");
        }
        Ok(OracleOptions {
            budget: if self.big { u64::MAX } else { self.budget },
            workers: self.workers,
        })
    }
}

#[derive(Args, Clone, Copy)]
struct ProblemArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    n: u16,
    /// Restrict A to be diagonal.
    #[arg(long)]
    diagonal_a: bool,
}

impl ProblemArgs {
    fn problem(&self) -> Result<TraceProblem> {
        Ok(TraceProblem::new(self.m, self.r, self.n, self.diagonal_a)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Necklace,
    Matrix,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Basis {
    /// All half-degree monomials, pruned by the diagonal rule.
    Auto,
    /// The (4,2) certificate basis.
    Cert42,
    /// The (8,4) diagonal-A certificate basis.
    Cert84,
    /// The (8,4) basis with entries tied into the parameter classes.
    Cert84Ansatz,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Charpoly,
    Ldlt,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficient of t^r in trace((A + tB)^m) as a polynomial.
    Coeff {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum, default_value_t = Oracle::Both)]
        oracle: Oracle,
    },
    /// Build and verify the (4,2) certificate.
    Cert42 {
        #[arg(long)]
        n: u16,
    },
    /// Build and verify the (8,4) certificate for diagonal A.
    Cert84 {
        #[arg(long)]
        n: u16,
        /// Use symbolic parameters instead of the published values.
        #[arg(long)]
        symbolic: bool,
        /// JSON file mapping `x1`..`x22` to rationals.
        #[arg(long, conflicts_with = "symbolic")]
        params: Option<PathBuf>,
        /// Evaluate both sides at this A (text matrix; must be diagonal).
        #[arg(long, requires = "b")]
        a: Option<PathBuf>,
        /// Evaluate both sides at this B (text matrix; must be symmetric).
        #[arg(long, requires = "a")]
        b: Option<PathBuf>,
    },
    /// Necklace-to-cell accounting audit for the (4,2) certificate.
    Audit42 {
        #[arg(long)]
        n: u16,
    },
    /// Derive the linear conditions on x1..x22 by coefficient matching.
    Paramsys {
        #[arg(long, default_value_t = 5)]
        n: u16,
    },
    /// Certify a symmetric rational matrix PSD (text rows or matrix JSON).
    Psd {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Export a coefficient-matching SDP in SDPA sparse format.
    SdpExport {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum, default_value_t = Basis::Auto)]
        basis: Basis,
        /// Add the entry-sum condition as an extra constraint.
        #[arg(long)]
        entry_sum: bool,
    },
    /// Rationalize an approximate solution and verify it exactly.
    SdpVerify {
        #[arg(long)]
        prob: PathBuf,
        /// JSON `{"blocks": [...]}` with one matrix per block.
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, default_value = "10000")]
        den_bound: BigInt,
    },
    /// Regenerate a published object and compare with the bundled transcription.
    Reproduce {
        #[arg(required_unless_present = "list")]
        object: Option<String>,
        #[arg(long)]
        list: bool,
    },
    /// Run the full verification suite.
    VerifyAll {
        #[arg(long, default_value_t = 5)]
        max_n_42: u16,
        #[arg(long, default_value_t = 5)]
        max_n_84: u16,
    },
}

/// A rendered result and whether it counts as success.
struct Outcome {
    text: String,
    json: serde_json::Value,
    ok: bool,
}

impl Outcome {
    fn ok(text: String, json: serde_json::Value) -> Outcome {
        Outcome { text, json, ok: true }
    }
}

fn read_matrix(path: &Path) -> Result<RationalMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        Ok(serde_json::from_str(&text)?)
    } else {
        Ok(RationalMatrix::from_text(&text)?)
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    let oracle = g.oracle()?;
    match &cli.command {
        Command::Coeff { problem, oracle: which } => {
            let p = problem.problem()?;
            let (poly, agree) = match which {
                Oracle::Necklace => (necklace::trace_coeff_necklace(&p, oracle)?, None),
                Oracle::Matrix => (necklace::trace_coeff_matrix(&p, oracle)?, None),
                Oracle::Both => {
                    let a = necklace::trace_coeff_necklace(&p, oracle)?;
                    let b = necklace::trace_coeff_matrix(&p, oracle)?;
                    let same = a == b;
                    (a, Some(same))
                }
            };
            let mut text = format!("{poly}\n");
            if let Some(same) = agree {
                text.push_str(&format!("{} oracles agree ({} terms)\n", verdict(same), poly.len()));
            }
            Ok(Outcome {
                text,
                json: json!({ "problem": p, "polynomial": poly.to_json_value(), "oracles_agree": agree }),
                ok: agree.unwrap_or(true),
            })
        }
        Command::Cert42 { n } => {
            let c = cert42::build_certificate42(*n)?;
            let target = necklace::trace_coeff_necklace(&TraceProblem::new(4, 2, *n, false)?, oracle)?;
            let identity = cert42::assemble_sos_42(&c) == target;
            let sum = cert42::entry_sum_42(&c);
            let text = format!(
                "Q1 ({0}x{0}):\n{1}Q2 ({2}x{2}), {3} copies:\n{4}{5} identity\nentry sum {sum}\n",
                c.q1.rows(),
                c.q1.to_text(),
                c.q2.rows(),
                c.z2_family.len(),
                c.q2.to_text(),
                verdict(identity)
            );
            let mut j = c.to_json();
            j["identity"] = json!(identity);
            j["entry_sum"] = json!(sum.to_string());
            Ok(Outcome { text, json: j, ok: identity })
        }
        Command::Cert84 { n, symbolic, params, a, b } => {
            let q3_params = if *symbolic {
                Q3Param::Symbolic
            } else if let Some(path) = params {
                let raw: std::collections::BTreeMap<String, String> =
                    serde_json::from_str(&fs::read_to_string(path)?)?;
                let values = raw
                    .iter()
                    .map(|(k, v)| Ok((k.parse()?, v.parse::<Rational>()?)))
                    .collect::<Result<_>>()?;
                Q3Param::Values(values)
            } else {
                Q3Param::Published
            };
            let evaluation = match (a, b) {
                (Some(a), Some(b)) => {
                    let (a, b) = (read_matrix(a)?, read_matrix(b)?);
                    if !a.is_square() || a.rows() != *n as usize || b.rows() != a.rows() || !b.is_square() {
                        bail!("A and B must be {n} x {n}");
                    }
                    if a.entries().any(|(i, j, v)| i != j && !num_traits::Zero::is_zero(v)) {
                        bail!("the (8,4) certificate requires a diagonal A");
                    }
                    if !b.is_symmetric() {
                        bail!("B must be symmetric");
                    }
                    Some((a, b))
                }
                _ => None,
            };
            let c = cert84::build_certificate84(*n, &q3_params)?;
            let sos = cert84::assemble_sos_84(&c);
            let target = necklace::trace_coeff_necklace(&TraceProblem::new(8, 4, *n, true)?, oracle)?;
            let mut j = c.to_json();
            let mut text = format!("Q1 {0}x{0}, Q2 {1}x{1}, Q3 {2}x{2} with {3} copies\n", c.q1.rows(), c.q2.rows(), c.q3.rows(), c.z3_family.len());
            let mut ok = true;
            if c.q3_numeric().is_some() {
                let identity = sos == target;
                ok &= identity;
                text.push_str(&format!("{} identity\nentry sum {}\n", verdict(identity), cert84::entry_sum_84(&c)));
                j["identity"] = json!(identity);
            } else {
                let residual = sos.sub(&target);
                text.push_str(&format!("residual has {} terms (see paramsys)\n", residual.len()));
                j["residual_terms"] = json!(residual.len());
            }
            if let Some((a, b)) = evaluation {
                let assignment = matrix_assignment(&a.to_rows(), &b.to_rows());
                let lhs = sos.evaluate(&assignment)?;
                let rhs = target.evaluate(&assignment)?;
                ok &= lhs == rhs;
                text.push_str(&format!("value at (A,B): certificate {lhs}, trace coefficient {rhs}\n"));
                j["evaluation"] = json!({ "certificate": lhs.to_string(), "trace_coefficient": rhs.to_string() });
            }
            Ok(Outcome { text, json: j, ok })
        }
        Command::Audit42 { n } => {
            let r = cert42::audit_report(*n)?;
            let mut text = format!(
                "{} necklaces (expected {}), {} cells checked\n",
                r.necklaces, r.expected_total, r.cells_checked
            );
            for (col, count) in &r.collection_counts {
                text.push_str(&format!("  {col:?}: {count}\n"));
            }
            for m in &r.mismatches {
                text.push_str(&format!("  mismatch at {}: entry {}, necklaces {}\n", m.cell, m.expected, m.actual));
            }
            text.push_str(&format!("{} audit\n", verdict(r.is_clean())));
            Ok(Outcome {
                text,
                ok: r.is_clean(),
                json: serde_json::to_value(&r)?,
            })
        }
        Command::Paramsys { n } => {
            let system = cert84::derive_param_system_any(*n, oracle)?;
            let rank = system.rank()?;
            let mut text = system.to_string();
            text.push_str(&format!("{} equations, rank {rank}\n", system.len()));
            let satisfied = system.satisfied_by(&cert84::published_values())?;
            text.push_str(&format!("published values satisfy the system: {satisfied}\n"));
            Ok(Outcome {
                text,
                json: json!({ "n": n, "equations": system.equations, "rank": rank, "published_values_satisfy": satisfied }),
                ok: satisfied,
            })
        }
        Command::Psd { matrix, method } => {
            let q = read_matrix(matrix)?;
            let method = match method {
                Method::Auto => AutoMethod::Auto,
                Method::Charpoly => AutoMethod::CharpolySigns,
                Method::Ldlt => AutoMethod::Ldlt,
            };
            match psd::certify(&q, method) {
                Ok(cert) => Ok(Outcome::ok(
                    format!(
                        "PASS PSD via {:?}{}\n",
                        cert.method,
                        cert.nullity().map(|k| format!(", nullity {k}")).unwrap_or_default()
                    ),
                    serde_json::to_value(&cert)?,
                )),
                Err(e) => Ok(Outcome {
                    text: format!("FAIL {e}\n"),
                    json: json!({ "psd": false, "reason": e.to_string() }),
                    ok: false,
                }),
            }
        }
        Command::SdpExport { problem, basis, entry_sum } => {
            let p = problem.problem()?;
            let basis_spec = match basis {
                Basis::Auto => {
                    let target = necklace::trace_coeff_necklace(&p, oracle)?;
                    BasisSpec::auto(&p, &target)?
                }
                Basis::Cert42 => BasisSpec::cert42(p.n)?,
                Basis::Cert84 => BasisSpec::cert84(p.n, false)?,
                Basis::Cert84Ansatz => BasisSpec::cert84(p.n, true)?,
            };
            let prob = sdp::build_sdp(&p, basis_spec, SdpOptions { entry_sum: *entry_sum, oracle })?;
            let text = sdp::to_sdpa_string(&prob);
            let j = json!({
                "problem": p,
                "blocks": prob.basis.blocks.iter().map(|b| json!({"label": b.label, "dim": b.dim, "copies": b.bases.len()})).collect::<Vec<_>>(),
                "constraints": prob.constraints.len(),
                "target_constraints": prob.target_constraint_count(),
                "basis_hash": prob.basis.hash(),
            });
            Ok(Outcome::ok(text, j))
        }
        Command::SdpVerify { prob, solution, den_bound } => {
            let problem = sdp::import_sdpa(prob)?;
            let approx = sdp::parse_solution_json(&fs::read_to_string(solution)?)?;
            match sdp::rationalize_and_verify(&problem, &approx, den_bound) {
                Ok(cert) => Ok(Outcome::ok(
                    format!("PASS certificate verified ({} blocks PSD)\n", cert.blocks.len()),
                    json!({ "accepted": true, "certificate": cert }),
                )),
                Err(sdp::SdpError::RationalizationFailed(r)) => Ok(Outcome {
                    text: format!("FAIL {r}\n"),
                    json: json!({ "accepted": false, "rejection": r }),
                    ok: false,
                }),
                Err(e) => Err(e.into()),
            }
        }
        Command::Reproduce { object, list } => {
            if *list {
                let text = report::OBJECTS.iter().map(|(id, d)| format!("{id}\t{d}\n")).collect();
                let j = json!(report::OBJECTS.iter().map(|(id, d)| json!({"id": id, "description": d})).collect::<Vec<_>>());
                return Ok(Outcome::ok(text, j));
            }
            let id = object.as_deref().unwrap_or_default();
            match report::reproduce(id) {
                Ok(r) => Ok(Outcome::ok(format!("{}PASS {id}: {}\n", r.text, r.detail), serde_json::to_value(&r)?)),
                Err(e @ report::ReportError::UnknownObject(_)) => Err(e.into()),
                Err(e) => Ok(Outcome {
                    text: format!("FAIL {e}\n"),
                    json: json!({ "object": id, "error": e.to_string() }),
                    ok: false,
                }),
            }
        }
        Command::VerifyAll { max_n_42, max_n_84 } => {
            let summary = report::verify_all(&VerifyConfig {
                max_n_42: *max_n_42,
                max_n_84: *max_n_84,
                oracle,
            });
            let mut text = summary.to_text();
            if let Some(f) = summary.first_failure() {
                text.push_str(&format!("first failure: {}: {}\n", f.name, f.detail));
            }
            Ok(Outcome {
                text,
                ok: summary.all_passed(),
                json: serde_json::to_value(&summary)?,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let rendered = if cli.global.json {
        format!("{:#}\n", outcome.json)
    } else {
        outcome.text
    };
    let written = match &cli.global.out {
        Some(path) => fs::write(path, rendered).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{rendered}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
