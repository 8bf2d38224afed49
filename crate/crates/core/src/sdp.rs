//! Coefficient-matching SDP feasibility problems: construction, SDPA sparse
//! interchange, and exact re-verification of approximate solutions.
//!
//! Every Gram block holds one matrix `Y_b` shared by one or more monomial
//! vectors ("copies"); the certificate is `Σ_b Σ_copies zᵀ Y_b z`. A constraint
//! `Σ_e F_e · w(e) · Y_e = rhs` runs over upper-triangular entries `e`, where
//! `F_e` is the value of the symmetric SDPA constraint matrix at `e` and
//! `w(e)` is 1 on the diagonal and 2 off it — exactly `⟨F, Y⟩`.
//!
//! In the file, integers are written exactly. Other rationals are written
//! as decimals with [`DECIMAL_DIGITS`] fractional digits and their exact
//! value is repeated in an `* exact-…` header line, which import prefers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cert42;
use crate::cert84::{self, Cert84Error, LinearEquation, ParamSystem, Q3Param};
use crate::matrix::{AffineMatrix, RationalMatrix};
use crate::necklace::{self, NecklaceError, OracleOptions, TraceProblem};
use crate::poly::{AffineCoeff, Kind, Monomial, ParamId, Polynomial, Rational, VarId};
use crate::psd::{self, PsdCertificate};

/// Fractional digits written for non-integer values.
pub const DECIMAL_DIGITS: usize = 30;

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("invalid Ansatz: {0}")]
    InvalidAnsatz(String),
    #[error(transparent)]
    Necklace(#[from] NecklaceError),
    #[error(transparent)]
    Cert84(#[from] Cert84Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing metadata: {0}")]
    MissingMetadata(String),
    #[error("basis hash mismatch: header {header}, computed {computed}")]
    HashMismatch { header: String, computed: String },
    #[error("solution shape does not match the problem: {0}")]
    Shape(String),
    #[error("rationalization failed: {0}")]
    RationalizationFailed(Rejection),
}

/// Why a rationalized candidate is not a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub enum Rejection {
    #[error("block {block} is not symmetric after rounding")]
    NotSymmetric { block: usize },
    #[error("constraint {index} ({kind}) violated: lhs {lhs}, rhs {rhs}")]
    ConstraintViolated {
        index: usize,
        kind: String,
        lhs: String,
        rhs: String,
    },
    #[error("block {block} is not PSD: {reason}")]
    NotPsd { block: usize, reason: String },
    #[error("assembled polynomial differs from the target at {0}")]
    IdentityFailed(String),
}

/// A Gram matrix together with the monomial vectors it is paired with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramBlock {
    pub label: String,
    pub dim: usize,
    pub bases: Vec<Vec<Monomial>>,
}

/// An upper-triangular entry (`row ≤ col`) of a Gram block, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntryRef {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

impl EntryRef {
    pub fn new(block: usize, i: usize, j: usize) -> EntryRef {
        EntryRef {
            block,
            row: i.min(j),
            col: i.max(j),
        }
    }

    /// Multiplicity of the entry in `⟨F, Y⟩`.
    pub fn weight(&self) -> Rational {
        Rational::from_integer(if self.row == self.col { 1 } else { 2 }.into())
    }
}

/// Entries forced to share a value: a constant (fixed class) or a single
/// parameter (free class).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryClass {
    pub value: AffineCoeff,
    pub entries: Vec<EntryRef>,
}

impl EntryClass {
    pub fn is_fixed(&self) -> bool {
        self.value.is_constant()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ansatz {
    pub classes: Vec<EntryClass>,
}

impl Ansatz {
    /// Groups the upper-triangular entries of each block by their value.
    pub fn from_matrices(blocks: &[AffineMatrix]) -> Ansatz {
        let mut order: Vec<AffineCoeff> = Vec::new();
        let mut classes: BTreeMap<String, EntryClass> = BTreeMap::new();
        for (b, q) in blocks.iter().enumerate() {
            for i in 0..q.rows() {
                for j in i..q.cols() {
                    let v = q.get(i, j);
                    let key = v.to_string();
                    classes
                        .entry(key)
                        .or_insert_with(|| {
                            order.push(v.clone());
                            EntryClass {
                                value: v.clone(),
                                entries: Vec::new(),
                            }
                        })
                        .entries
                        .push(EntryRef::new(b, i, j));
                }
            }
        }
        Ansatz {
            classes: order
                .iter()
                .map(|v| classes.remove(&v.to_string()).expect("class exists"))
                .collect(),
        }
    }

    fn validate(&self, blocks: &[GramBlock]) -> Result<(), SdpError> {
        let mut seen = BTreeSet::new();
        for (k, class) in self.classes.iter().enumerate() {
            let free = class.value.linear_part();
            let ok = class.value.is_constant()
                || (class.value.constant_part().is_zero()
                    && free.len() == 1
                    && free.values().all(One::is_one));
            if !ok {
                return Err(SdpError::InvalidAnsatz(format!(
                    "class {k} value `{}` is neither a constant nor a parameter",
                    class.value
                )));
            }
            if class.entries.is_empty() {
                return Err(SdpError::InvalidAnsatz(format!("class {k} is empty")));
            }
            for e in &class.entries {
                let in_range = blocks.get(e.block).is_some_and(|b| e.col < b.dim) && e.row <= e.col;
                if !in_range || !seen.insert(*e) {
                    return Err(SdpError::InvalidAnsatz(format!(
                        "entry {e:?} is out of range or listed twice"
                    )));
                }
            }
        }
        let total: usize = blocks.iter().map(|b| b.dim * (b.dim + 1) / 2).sum();
        if seen.len() != total {
            return Err(SdpError::InvalidAnsatz(format!(
                "classes cover {} of {total} entries",
                seen.len()
            )));
        }
        Ok(())
    }

    /// Value assigned to every entry.
    pub fn assignment(&self) -> BTreeMap<EntryRef, AffineCoeff> {
        self.classes
            .iter()
            .flat_map(|c| c.entries.iter().map(move |e| (*e, c.value.clone())))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub blocks: Vec<GramBlock>,
    pub ansatz: Option<Ansatz>,
}

impl BasisSpec {
    pub fn new(blocks: Vec<GramBlock>, ansatz: Option<Ansatz>) -> Result<BasisSpec, SdpError> {
        for b in &blocks {
            if b.bases.iter().any(|z| z.len() != b.dim) {
                return Err(SdpError::InvalidBasis(format!(
                    "block `{}` has a vector whose length differs from {}",
                    b.label, b.dim
                )));
            }
            if b.label.contains('\n') {
                return Err(SdpError::InvalidBasis("block labels must be single-line".into()));
            }
        }
        if let Some(a) = &ansatz {
            a.validate(&blocks)?;
        }
        Ok(BasisSpec { blocks, ansatz })
    }

    /// The `(4,2)` basis: `z1` with `Q1`, and the `z2(i,j)` family sharing `Q2`.
    pub fn cert42(n: u16) -> Result<BasisSpec, SdpError> {
        let c = cert42::build_certificate42(n)
            .map_err(|e| SdpError::InvalidBasis(e.to_string()))?;
        let mut blocks = vec![GramBlock {
            label: "Q1".into(),
            dim: c.z1.len(),
            bases: vec![c.z1],
        }];
        if !c.z2_family.is_empty() {
            blocks.push(GramBlock {
                label: "Q2".into(),
                dim: 2 * n as usize,
                bases: c.z2_family.into_values().collect(),
            });
        }
        BasisSpec::new(blocks, None)
    }

    /// The `(8,4)` diagonal-A basis; with `ansatz`, entries are tied into the
    /// classes of the parametrized certificate (constants and `x1..x22`).
    pub fn cert84(n: u16, ansatz: bool) -> Result<BasisSpec, SdpError> {
        let c = cert84::build_certificate84(n, &Q3Param::Symbolic)?;
        let mut blocks = vec![
            GramBlock {
                label: "Q1".into(),
                dim: c.z1.len(),
                bases: vec![c.z1.clone()],
            },
            GramBlock {
                label: "Q2".into(),
                dim: c.z2.len(),
                bases: vec![c.z2.clone()],
            },
        ];
        let mut matrices = vec![AffineMatrix::constant(&c.q1), AffineMatrix::constant(&c.q2)];
        if !c.z3_family.is_empty() {
            blocks.push(GramBlock {
                label: "Q3".into(),
                dim: c.q3.rows(),
                bases: c.z3_family.values().cloned().collect(),
            });
            matrices.push(c.q3.bare());
        }
        let ansatz = ansatz.then(|| Ansatz::from_matrices(&matrices));
        BasisSpec::new(blocks, ansatz)
    }

    /// One block over all monomials with `(m-r)/2` entries of `A` and `r/2`
    /// of `B`, minus those whose square cannot occur (iterated to a fixpoint).
    pub fn auto(p: &TraceProblem, target: &Polynomial) -> Result<BasisSpec, SdpError> {
        let n = p.n;
        let a_vars: Vec<VarId> = symmetric_vars(Kind::A, n, p.diagonal_a);
        let b_vars: Vec<VarId> = symmetric_vars(Kind::B, n, false);
        let a_parts = multisets(&a_vars, (p.m - p.r) / 2);
        let b_parts = multisets(&b_vars, p.r / 2);
        let mut z: Vec<Monomial> = a_parts
            .iter()
            .flat_map(|x| b_parts.iter().map(move |y| x.mul(y)))
            .collect();
        z.sort();
        z.dedup();
        let support: BTreeSet<&Monomial> = target.monomials().collect();
        loop {
            let mut cross: BTreeMap<Monomial, usize> = BTreeMap::new();
            for i in 0..z.len() {
                for j in i + 1..z.len() {
                    *cross.entry(z[i].mul(&z[j])).or_default() += 1;
                }
            }
            let before = z.len();
            z.retain(|x| {
                let sq = x.pow(2);
                support.contains(&sq) || cross.contains_key(&sq)
            });
            if z.len() == before {
                break;
            }
        }
        BasisSpec::new(
            vec![GramBlock {
                label: "Q".into(),
                dim: z.len(),
                bases: vec![z],
            }],
            None,
        )
    }

    /// Canonical text of blocks, vectors and Ansatz.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            let _ = writeln!(out, "block {} {}", b.dim, b.label);
            for z in &b.bases {
                let parts: Vec<String> = z.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "z {}", parts.join(" "));
            }
        }
        if let Some(a) = &self.ansatz {
            for c in &a.classes {
                let _ = writeln!(out, "class {} = {}", entry_list(&c.entries), c.value);
            }
        }
        out
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }

    pub fn entry_count(&self) -> usize {
        self.blocks.iter().map(|b| b.dim * (b.dim + 1) / 2).sum()
    }
}

fn symmetric_vars(kind: Kind, n: u16, diagonal: bool) -> Vec<VarId> {
    (1..=n)
        .flat_map(|i| (i..=n).map(move |j| (i, j)))
        .filter(|&(i, j)| !diagonal || i == j)
        .map(|(i, j)| VarId::new(kind, i, j))
        .collect()
}

/// Products of `k` variables chosen with repetition.
fn multisets(vars: &[VarId], k: usize) -> Vec<Monomial> {
    fn go(vars: &[VarId], k: usize, start: usize, acc: &mut Vec<VarId>, out: &mut Vec<Monomial>) {
        if acc.len() == k {
            out.push(Monomial::product_of(acc.iter().copied()));
            return;
        }
        for t in start..vars.len() {
            acc.push(vars[t]);
            go(vars, k, t, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(vars, k, 0, &mut Vec::new(), &mut out);
    out
}

fn entry_list(entries: &[EntryRef]) -> String {
    let parts: Vec<String> = entries
        .iter()
        .map(|e| format!("{}:{}:{}", e.block + 1, e.row + 1, e.col + 1))
        .collect();
    parts.join(" ")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintKind {
    /// Coefficient of a monomial of the target polynomial.
    Target(Monomial),
    /// A product of basis monomials absent from the target.
    Zero(Monomial),
    /// Sum of all certificate entries equals the target's coefficient mass.
    EntrySum,
    /// An Ansatz class entry equals the class's first entry.
    Tie(usize),
    /// The first entry of a fixed Ansatz class equals its constant.
    Fixed(usize),
}

impl std::fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstraintKind::Target(m) => write!(f, "target {m}"),
            ConstraintKind::Zero(m) => write!(f, "zero {m}"),
            ConstraintKind::EntrySum => write!(f, "entry-sum"),
            ConstraintKind::Tie(k) => write!(f, "tie {}", k + 1),
            ConstraintKind::Fixed(k) => write!(f, "fixed {}", k + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub coeffs: BTreeMap<EntryRef, Rational>,
    pub rhs: Rational,
}

impl Constraint {
    /// `⟨F, Y⟩` for concrete blocks.
    pub fn lhs(&self, blocks: &[RationalMatrix]) -> Rational {
        self.coeffs
            .iter()
            .map(|(e, f)| f * e.weight() * blocks[e.block].get(e.row, e.col))
            .sum()
    }

    /// `⟨F, Y⟩ - rhs` with entries replaced by their Ansatz values.
    pub fn residual(&self, values: &BTreeMap<EntryRef, AffineCoeff>) -> AffineCoeff {
        let mut out = AffineCoeff::constant(-self.rhs.clone());
        for (e, f) in &self.coeffs {
            out.add_scaled(&values[e], &(f * e.weight()));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SdpOptions {
    /// Add the entry-sum condition as an extra constraint.
    pub entry_sum: bool,
    pub oracle: OracleOptions,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub problem: TraceProblem,
    pub basis: BasisSpec,
    pub constraints: Vec<Constraint>,
}

/// Monomial → entry → number of copies in which the entry produces it.
type ProductMap = BTreeMap<Monomial, BTreeMap<EntryRef, u64>>;

fn block_products(b: usize, block: &GramBlock) -> ProductMap {
    block
        .bases
        .par_iter()
        .map(|z| {
            let mut local = ProductMap::new();
            for i in 0..z.len() {
                for j in i..z.len() {
                    *local
                        .entry(z[i].mul(&z[j]))
                        .or_default()
                        .entry(EntryRef::new(b, i, j))
                        .or_default() += 1;
                }
            }
            local
        })
        .reduce(ProductMap::new, merge_products)
}

fn merge_products(mut x: ProductMap, y: ProductMap) -> ProductMap {
    for (m, entries) in y {
        let slot = x.entry(m).or_default();
        for (e, c) in entries {
            *slot.entry(e).or_default() += c;
        }
    }
    x
}

fn to_coeffs(entries: BTreeMap<EntryRef, u64>) -> BTreeMap<EntryRef, Rational> {
    entries
        .into_iter()
        .map(|(e, c)| (e, Rational::from_integer(c.into())))
        .collect()
}

pub fn build_sdp(p: &TraceProblem, basis: BasisSpec, opts: SdpOptions) -> Result<SdpProblem, SdpError> {
    let half = (p.m / 2) as u32;
    let a_half = ((p.m - p.r) / 2) as u32;
    for b in &basis.blocks {
        for m in b.bases.iter().flatten() {
            if m.degree() != half || m.degree_in(Kind::A) != a_half {
                return Err(SdpError::InvalidBasis(format!(
                    "`{m}` in block `{}` is not of degree {a_half} in A and {} in B",
                    b.label,
                    half - a_half
                )));
            }
        }
    }
    let target = necklace::trace_coeff_necklace(p, opts.oracle)?;
    let mut products = basis
        .blocks
        .par_iter()
        .enumerate()
        .map(|(b, block)| block_products(b, block))
        .reduce(ProductMap::new, merge_products);

    let mut constraints = Vec::new();
    for (m, c) in target.terms() {
        let rhs = c.as_constant().expect("trace coefficients are numeric").clone();
        constraints.push(Constraint {
            kind: ConstraintKind::Target(m.clone()),
            coeffs: to_coeffs(products.remove(m).unwrap_or_default()),
            rhs,
        });
    }
    for (m, entries) in products {
        constraints.push(Constraint {
            kind: ConstraintKind::Zero(m),
            coeffs: to_coeffs(entries),
            rhs: Rational::zero(),
        });
    }
    if opts.entry_sum {
        let mut coeffs = BTreeMap::new();
        for (b, block) in basis.blocks.iter().enumerate() {
            let copies = Rational::from_integer(block.bases.len().into());
            if copies.is_zero() {
                continue;
            }
            for i in 0..block.dim {
                for j in i..block.dim {
                    coeffs.insert(EntryRef::new(b, i, j), copies.clone());
                }
            }
        }
        constraints.push(Constraint {
            kind: ConstraintKind::EntrySum,
            coeffs,
            rhs: target
                .coefficient_mass()
                .as_constant()
                .expect("numeric target")
                .clone(),
        });
    }
    if let Some(ansatz) = &basis.ansatz {
        for (k, class) in ansatz.classes.iter().enumerate() {
            let first = class.entries[0];
            for e in &class.entries[1..] {
                constraints.push(Constraint {
                    kind: ConstraintKind::Tie(k),
                    coeffs: BTreeMap::from([(first, e.weight()), (*e, -first.weight())]),
                    rhs: Rational::zero(),
                });
            }
            if let Some(v) = class.value.as_constant() {
                constraints.push(Constraint {
                    kind: ConstraintKind::Fixed(k),
                    coeffs: BTreeMap::from([(first, Rational::one())]),
                    rhs: first.weight() * v,
                });
            }
        }
    }
    Ok(SdpProblem {
        problem: *p,
        basis,
        constraints,
    })
}

impl SdpProblem {
    /// Number of constraints attached to monomials of the target polynomial.
    pub fn target_constraint_count(&self) -> usize {
        self.constraints
            .iter()
            .filter(|c| matches!(c.kind, ConstraintKind::Target(_)))
            .count()
    }

    /// Under the Ansatz, the coefficient-matching constraints (target, zero
    /// and entry-sum) as linear equations in the free parameters. Constraints
    /// that reduce to `0 = 0` are dropped; a nonzero constant is an error.
    pub fn reduced_system(&self) -> Result<ParamSystem, SdpError> {
        let ansatz = self
            .basis
            .ansatz
            .as_ref()
            .ok_or_else(|| SdpError::InvalidAnsatz("problem has no Ansatz".into()))?;
        let values = ansatz.assignment();
        let mut equations: Vec<LinearEquation> = Vec::new();
        for c in &self.constraints {
            if matches!(c.kind, ConstraintKind::Tie(_) | ConstraintKind::Fixed(_)) {
                continue;
            }
            match LinearEquation::from_form(&c.residual(&values)) {
                Ok(Some(eq)) => equations.push(eq),
                Ok(None) => {}
                Err(_) => {
                    return Err(Cert84Error::InconsistentSystem(format!(
                        "constraint `{}` reduces to a nonzero constant",
                        c.kind
                    ))
                    .into())
                }
            }
        }
        Ok(ParamSystem::new(equations))
    }

    fn dims(&self) -> Vec<usize> {
        self.basis.blocks.iter().map(|b| b.dim).collect()
    }
}

/// Writes `prob` in SDPA sparse format (dual form: `⟨F_k, Y⟩ = c_k`, `Y ⪰ 0`,
/// no objective).
pub fn to_sdpa_string(prob: &SdpProblem) -> String {
    let p = &prob.problem;
    let mut out = String::new();
    let _ = writeln!(out, "\"tracesos coefficient-matching SDP (feasibility, dual form)");
    let _ = writeln!(
        out,
        "* problem m={} r={} n={} diagonal_a={}",
        p.m, p.r, p.n, p.diagonal_a
    );
    let _ = writeln!(out, "* basis-hash {}", prob.basis.hash());
    let entries: usize = prob.constraints.iter().map(|c| c.coeffs.len()).sum();
    let _ = writeln!(out, "* entries {entries}");
    for (b, block) in prob.basis.blocks.iter().enumerate() {
        let _ = writeln!(out, "* block {} dim {} label {}", b + 1, block.dim, block.label);
        for z in &block.bases {
            let parts: Vec<String> = z.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "* z {} {}", b + 1, parts.join(" "));
        }
    }
    if let Some(a) = &prob.basis.ansatz {
        for (k, c) in a.classes.iter().enumerate() {
            let _ = writeln!(out, "* class {} {} = {}", k + 1, entry_list(&c.entries), c.value);
        }
    }
    for (k, c) in prob.constraints.iter().enumerate() {
        let _ = writeln!(out, "* constraint {} {}", k + 1, c.kind);
        if !c.rhs.is_integer() {
            let _ = writeln!(out, "* exact-rhs {} {}", k + 1, c.rhs);
        }
        for (e, v) in &c.coeffs {
            if !v.is_integer() {
                let _ = writeln!(
                    out,
                    "* exact-entry {} {} {} {} {}",
                    k + 1,
                    e.block + 1,
                    e.row + 1,
                    e.col + 1,
                    v
                );
            }
        }
    }
    let _ = writeln!(out, "{}", prob.constraints.len());
    let _ = writeln!(out, "{}", prob.basis.blocks.len());
    let dims: Vec<String> = prob.dims().iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "{}", dims.join(" "));
    let rhs: Vec<String> = prob.constraints.iter().map(|c| number_text(&c.rhs)).collect();
    let _ = writeln!(out, "{}", rhs.join(" "));
    for (k, c) in prob.constraints.iter().enumerate() {
        for (e, v) in &c.coeffs {
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                k + 1,
                e.block + 1,
                e.row + 1,
                e.col + 1,
                number_text(v)
            );
        }
    }
    out
}

pub fn export_sdpa(prob: &SdpProblem, path: &Path) -> Result<(), SdpError> {
    std::fs::write(path, to_sdpa_string(prob))?;
    Ok(())
}

pub fn import_sdpa(path: &Path) -> Result<SdpProblem, SdpError> {
    from_sdpa_str(&std::fs::read_to_string(path)?)
}

/// Integers exactly; other values as rounded decimals.
fn number_text(v: &Rational) -> String {
    if v.is_integer() {
        return v.to_integer().to_string();
    }
    let scale = BigInt::from(10u32).pow(DECIMAL_DIGITS as u32);
    let scaled = (v * Rational::from_integer(scale)).round().to_integer();
    let sign = if scaled.is_negative() { "-" } else { "" };
    let digits = format!("{:0>width$}", scaled.abs().to_string(), width = DECIMAL_DIGITS + 1);
    let (int, frac) = digits.split_at(digits.len() - DECIMAL_DIGITS);
    format!("{sign}{int}.{frac}")
}

/// Exact value of a decimal literal such as `-12`, `0.25` or `1.5e-3`.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Ok(q) = s.parse::<Rational>() {
        return Some(q);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10u32);
    let mut q = Rational::from_integer(digits);
    if shift >= 0 {
        q *= Rational::from_integer(ten.pow(shift as u32));
    } else {
        q /= Rational::from_integer(ten.pow((-shift) as u32));
    }
    Some(if neg { -q } else { q })
}

#[derive(Default)]
struct Header {
    problem: Option<TraceProblem>,
    hash: Option<String>,
    entries: Option<usize>,
    blocks: Vec<GramBlock>,
    classes: Vec<EntryClass>,
    kinds: BTreeMap<usize, ConstraintKind>,
    exact_rhs: BTreeMap<usize, Rational>,
    exact_entries: BTreeMap<(usize, EntryRef), Rational>,
}

fn parse_err(line: usize, message: impl Into<String>) -> SdpError {
    SdpError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_entry_ref(tok: &str, line: usize) -> Result<EntryRef, SdpError> {
    let parts: Vec<usize> = tok
        .split(':')
        .map(|t| t.parse::<usize>().map_err(|_| parse_err(line, format!("bad entry `{tok}`"))))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [b, i, j] if b > 0 && i > 0 && j > 0 => Ok(EntryRef::new(b - 1, i - 1, j - 1)),
        _ => Err(parse_err(line, format!("bad entry `{tok}`"))),
    }
}

fn parse_header_line(h: &mut Header, body: &str, line: usize) -> Result<(), SdpError> {
    let err = |m: &str| parse_err(line, m.to_string());
    let (key, rest) = body.split_once(' ').unwrap_or((body, ""));
    let index = |t: &str| -> Result<usize, SdpError> {
        t.parse::<usize>()
            .ok()
            .filter(|&k| k > 0)
            .map(|k| k - 1)
            .ok_or_else(|| err("bad index"))
    };
    match key {
        "problem" => {
            let mut fields = BTreeMap::new();
            for kv in rest.split_whitespace() {
                let (k, v) = kv.split_once('=').ok_or_else(|| err("bad problem field"))?;
                fields.insert(k, v);
            }
            let get = |k: &str| fields.get(k).copied().ok_or_else(|| err("missing problem field"));
            let num = |k: &str| -> Result<usize, SdpError> {
                get(k)?.parse().map_err(|_| err("bad problem field"))
            };
            let diag: bool = get("diagonal_a")?.parse().map_err(|_| err("bad diagonal_a"))?;
            let n = u16::try_from(num("n")?).map_err(|_| err("n too large"))?;
            h.problem = Some(TraceProblem::new(num("m")?, num("r")?, n, diag)?);
        }
        "basis-hash" => h.hash = Some(rest.trim().to_string()),
        "entries" => h.entries = Some(rest.trim().parse().map_err(|_| err("bad entry count"))?),
        "block" => {
            let t: Vec<&str> = rest.splitn(5, ' ').collect();
            if t.len() < 4 || t[1] != "dim" || t[3] != "label" {
                return Err(err("bad block line"));
            }
            if index(t[0])? != h.blocks.len() {
                return Err(err("blocks out of order"));
            }
            h.blocks.push(GramBlock {
                label: t.get(4).unwrap_or(&"").to_string(),
                dim: t[2].parse().map_err(|_| err("bad dim"))?,
                bases: Vec::new(),
            });
        }
        "z" => {
            let mut t = rest.split_whitespace();
            let b = index(t.next().ok_or_else(|| err("missing block"))?)?;
            let z = t
                .map(|m| m.parse::<Monomial>().map_err(|e| parse_err(line, e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            h.blocks.get_mut(b).ok_or_else(|| err("unknown block"))?.bases.push(z);
        }
        "class" => {
            let (lhs, value) = rest.split_once(" = ").ok_or_else(|| err("bad class line"))?;
            let mut t = lhs.split_whitespace();
            if index(t.next().ok_or_else(|| err("missing class index"))?)? != h.classes.len() {
                return Err(err("classes out of order"));
            }
            let entries = t.map(|e| parse_entry_ref(e, line)).collect::<Result<_, _>>()?;
            let value = value
                .trim()
                .parse::<AffineCoeff>()
                .map_err(|e| parse_err(line, e.to_string()))?;
            h.classes.push(EntryClass { value, entries });
        }
        "constraint" => {
            let mut t = rest.split_whitespace();
            let k = index(t.next().ok_or_else(|| err("missing index"))?)?;
            let kind = match (t.next(), t.next()) {
                (Some("target"), Some(m)) => {
                    ConstraintKind::Target(m.parse().map_err(|e: crate::poly::PolyError| parse_err(line, e.to_string()))?)
                }
                (Some("zero"), Some(m)) => {
                    ConstraintKind::Zero(m.parse().map_err(|e: crate::poly::PolyError| parse_err(line, e.to_string()))?)
                }
                (Some("entry-sum"), None) => ConstraintKind::EntrySum,
                (Some("tie"), Some(c)) => ConstraintKind::Tie(index(c)?),
                (Some("fixed"), Some(c)) => ConstraintKind::Fixed(index(c)?),
                _ => return Err(err("bad constraint kind")),
            };
            h.kinds.insert(k, kind);
        }
        "exact-rhs" => {
            let (k, v) = rest.split_once(' ').ok_or_else(|| err("bad exact-rhs"))?;
            let v = v.trim().parse::<Rational>().map_err(|_| err("bad rational"))?;
            h.exact_rhs.insert(index(k)?, v);
        }
        "exact-entry" => {
            let t: Vec<&str> = rest.split_whitespace().collect();
            if t.len() != 5 {
                return Err(err("bad exact-entry"));
            }
            let e = EntryRef::new(index(t[1])?, index(t[2])?, index(t[3])?);
            let v = t[4].parse::<Rational>().map_err(|_| err("bad rational"))?;
            h.exact_entries.insert((index(t[0])?, e), v);
        }
        _ => {}
    }
    Ok(())
}

/// Parses a file written by [`to_sdpa_string`]. The header metadata is
/// required; the basis hash must match the reconstructed basis.
pub fn from_sdpa_str(text: &str) -> Result<SdpProblem, SdpError> {
    let mut header = Header::default();
    let mut tokens: Vec<(usize, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if let Some(body) = trimmed.strip_prefix('*') {
            parse_header_line(&mut header, body.trim(), line)?;
            continue;
        }
        if trimmed.starts_with('"') || trimmed.is_empty() {
            continue;
        }
        let cleaned: String = trimmed
            .chars()
            .map(|c| if ",(){}".contains(c) { ' ' } else { c })
            .collect();
        tokens.extend(cleaned.split_whitespace().map(|t| (line, t.to_string())));
    }

    let problem = header
        .problem
        .ok_or_else(|| SdpError::MissingMetadata("problem line".into()))?;
    let mut it = tokens.into_iter();
    let mut next = |what: &str| {
        it.next()
            .ok_or_else(|| SdpError::Parse {
                line: 0,
                message: format!("unexpected end of file, expected {what}"),
            })
    };
    let int = |(line, t): (usize, String)| -> Result<usize, SdpError> {
        t.parse().map_err(|_| parse_err(line, format!("expected an integer, got `{t}`")))
    };
    let m = int(next("constraint count")?)?;
    let nblocks = int(next("block count")?)?;
    if nblocks != header.blocks.len() {
        return Err(SdpError::MissingMetadata(format!(
            "{nblocks} blocks but {} described in the header",
            header.blocks.len()
        )));
    }
    for b in 0..nblocks {
        let (line, t) = next("block size")?;
        let dim = int((line, t))?;
        if dim != header.blocks[b].dim {
            return Err(parse_err(line, format!("block {} size disagrees with header", b + 1)));
        }
    }
    let mut rhs = Vec::with_capacity(m);
    for k in 0..m {
        let (line, t) = next("right-hand side")?;
        let v = match header.exact_rhs.get(&k) {
            Some(v) => v.clone(),
            None => parse_decimal(&t).ok_or_else(|| parse_err(line, format!("bad number `{t}`")))?,
        };
        rhs.push(v);
    }
    let mut coeffs: Vec<BTreeMap<EntryRef, Rational>> = vec![BTreeMap::new(); m];
    let rest: Vec<(usize, String)> = it.collect();
    if !rest.len().is_multiple_of(5) {
        return Err(SdpError::Parse {
            line: rest.last().map_or(0, |t| t.0),
            message: "matrix entries must have five fields".into(),
        });
    }
    let expected = header
        .entries
        .ok_or_else(|| SdpError::MissingMetadata("entry count".into()))?;
    if rest.len() / 5 != expected {
        return Err(SdpError::Parse {
            line: rest.last().map_or(0, |t| t.0),
            message: format!("{} matrix entries but the header announces {expected}", rest.len() / 5),
        });
    }
    for chunk in rest.chunks(5) {
        let line = chunk[0].0;
        let f = |k: usize| int(chunk[k].clone());
        let (matno, blk, i, j) = (f(0)?, f(1)?, f(2)?, f(3)?);
        if matno == 0 {
            return Err(parse_err(line, "objective matrix F0 is not supported"));
        }
        if matno > m || blk == 0 || blk > nblocks || i == 0 || j == 0 {
            return Err(parse_err(line, "entry index out of range"));
        }
        let e = EntryRef::new(blk - 1, i - 1, j - 1);
        if e.col >= header.blocks[e.block].dim {
            return Err(parse_err(line, "entry index out of range"));
        }
        let v = match header.exact_entries.get(&(matno - 1, e)) {
            Some(v) => v.clone(),
            None => parse_decimal(&chunk[4].1)
                .ok_or_else(|| parse_err(line, format!("bad number `{}`", chunk[4].1)))?,
        };
        if !v.is_zero() && coeffs[matno - 1].insert(e, v).is_some() {
            return Err(parse_err(line, "duplicate entry"));
        }
    }
    let constraints = (0..m)
        .map(|k| {
            let kind = header
                .kinds
                .remove(&k)
                .ok_or_else(|| SdpError::MissingMetadata(format!("kind of constraint {}", k + 1)))?;
            Ok(Constraint {
                kind,
                coeffs: std::mem::take(&mut coeffs[k]),
                rhs: rhs[k].clone(),
            })
        })
        .collect::<Result<Vec<_>, SdpError>>()?;
    let ansatz = (!header.classes.is_empty()).then_some(Ansatz {
        classes: header.classes,
    });
    let basis = BasisSpec::new(header.blocks, ansatz)?;
    let computed = basis.hash();
    match header.hash {
        Some(h) if h == computed => {}
        Some(h) => return Err(SdpError::HashMismatch { header: h, computed }),
        None => return Err(SdpError::MissingMetadata("basis-hash".into())),
    }
    Ok(SdpProblem {
        problem,
        basis,
        constraints,
    })
}

/// The closest rational to `x` with denominator at most `bound`, by
/// continued fractions (convergents plus the best semiconvergent).
pub fn limit_denominator(x: &Rational, bound: &BigInt) -> Rational {
    assert!(bound.is_positive(), "denominator bound must be positive");
    if x.denom() <= bound {
        return x.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    loop {
        let a = num.div_floor(&den);
        let q2 = &q0 + &a * &q1;
        if &q2 > bound {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &num - &a * &den;
        num = std::mem::replace(&mut den, r);
    }
    let k = (bound - &q0).div_floor(&q1);
    let semi = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let conv = Rational::new(p1, q1);
    if (&conv - x).abs() <= (&semi - x).abs() {
        conv
    } else {
        semi
    }
}

/// An exactly verified solution of an [`SdpProblem`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SdpCertificate {
    pub blocks: Vec<RationalMatrix>,
    pub psd: Vec<PsdCertificate>,
}

/// `Σ_b Σ_copies zᵀ Y_b z`.
pub fn assemble_blocks(basis: &BasisSpec, blocks: &[RationalMatrix]) -> Polynomial {
    let mut acc = BTreeMap::new();
    for (block, q) in basis.blocks.iter().zip(blocks) {
        for z in &block.bases {
            crate::gram::add_quadratic_form(&mut acc, z, q);
        }
    }
    crate::gram::collect(acc)
}

/// Rounds every entry to the nearest rational with denominator at most
/// `bound`, then accepts only if all constraints hold exactly, every block is
/// certified PSD, and the assembled polynomial equals the target.
pub fn rationalize_and_verify(
    prob: &SdpProblem,
    approx: &[RationalMatrix],
    bound: &BigInt,
) -> Result<SdpCertificate, SdpError> {
    let dims = prob.dims();
    if approx.len() != dims.len() {
        return Err(SdpError::Shape(format!(
            "{} blocks supplied, {} expected",
            approx.len(),
            dims.len()
        )));
    }
    for (b, (q, &d)) in approx.iter().zip(&dims).enumerate() {
        if q.rows() != d || q.cols() != d {
            return Err(SdpError::Shape(format!("block {} must be {d} x {d}", b + 1)));
        }
    }
    if !bound.is_positive() {
        return Err(SdpError::Shape("denominator bound must be positive".into()));
    }
    let reject = |r: Rejection| SdpError::RationalizationFailed(r);
    let blocks: Vec<RationalMatrix> = approx
        .iter()
        .map(|q| q.bare().map(|v| limit_denominator(v, bound)))
        .collect();
    if let Some(b) = blocks.iter().position(|q| !q.is_symmetric()) {
        return Err(reject(Rejection::NotSymmetric { block: b + 1 }));
    }
    for (index, c) in prob.constraints.iter().enumerate() {
        let lhs = c.lhs(&blocks);
        if lhs != c.rhs {
            return Err(reject(Rejection::ConstraintViolated {
                index: index + 1,
                kind: c.kind.to_string(),
                lhs: lhs.to_string(),
                rhs: c.rhs.to_string(),
            }));
        }
    }
    let mut certs = Vec::with_capacity(blocks.len());
    for (b, q) in blocks.iter().enumerate() {
        match psd::certify_auto(q) {
            Ok(c) => certs.push(c),
            Err(e) => {
                return Err(reject(Rejection::NotPsd {
                    block: b + 1,
                    reason: e.to_string(),
                }))
            }
        }
    }
    let target = necklace::trace_coeff_necklace(&prob.problem, OracleOptions::default())?;
    let diff = assemble_blocks(&prob.basis, &blocks).sub(&target);
    if let Some(m) = diff.monomials().next() {
        return Err(reject(Rejection::IdentityFailed(m.to_string())));
    }
    Ok(SdpCertificate {
        blocks,
        psd: certs,
    })
}

/// Reads `{"blocks": [[[v, ...], ...], ...]}`; each `v` is a JSON number
/// (taken at its exact binary value) or a string holding a rational or
/// decimal literal.
pub fn parse_solution_json(text: &str) -> Result<Vec<RationalMatrix>, SdpError> {
    #[derive(Deserialize)]
    struct SolutionFile {
        blocks: Vec<Vec<Vec<serde_json::Value>>>,
    }
    let bad = |m: String| SdpError::Parse { line: 0, message: m };
    let file: SolutionFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let value = |v: &serde_json::Value| -> Result<Rational, SdpError> {
        match v {
            serde_json::Value::String(s) => parse_decimal(s).ok_or_else(|| bad(format!("bad number `{s}`"))),
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Rational::from_integer(i.into()))
                } else if let Some(u) = n.as_u64() {
                    Ok(Rational::from_integer(u.into()))
                } else {
                    n.as_f64()
                        .and_then(Rational::from_float)
                        .ok_or_else(|| bad(format!("bad number `{n}`")))
                }
            }
            other => Err(bad(format!("expected a number, got `{other}`"))),
        }
    };
    file.blocks
        .iter()
        .map(|rows| {
            let rows = rows
                .iter()
                .map(|r| r.iter().map(value).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            RationalMatrix::from_rows(rows).map_err(|e| bad(e.to_string()))
        })
        .collect()
}

/// Writes blocks as exact rational strings in the solution format.
pub fn solution_json(blocks: &[RationalMatrix]) -> serde_json::Value {
    let blocks: Vec<Vec<Vec<String>>> = blocks
        .iter()
        .map(|q| q.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect())
        .collect();
    serde_json::json!({ "blocks": blocks })
}

/// Approximate (floating-point) view of a rational, for reports.
pub fn approx_f64(v: &Rational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Gram blocks of the `(8,4)` certificate with the given parameters, in the
/// order of [`BasisSpec::cert84`].
pub fn cert84_blocks(n: u16, params: &Q3Param) -> Result<Vec<RationalMatrix>, SdpError> {
    let c = cert84::build_certificate84(n, params)?;
    let mut blocks = vec![c.q1.bare(), c.q2.bare()];
    if !c.z3_family.is_empty() {
        let q3 = c
            .q3_numeric()
            .ok_or_else(|| SdpError::InvalidBasis("symbolic parameters have no numeric blocks".into()))?;
        blocks.push(q3.bare());
    }
    Ok(blocks)
}

/// Gram blocks of the `(4,2)` certificate in the order of [`BasisSpec::cert42`].
pub fn cert42_blocks(n: u16) -> Result<Vec<RationalMatrix>, SdpError> {
    let c = cert42::build_certificate42(n).map_err(|e| SdpError::InvalidBasis(e.to_string()))?;
    let mut blocks = vec![c.q1.bare()];
    if !c.z2_family.is_empty() {
        blocks.push(c.q2.bare());
    }
    Ok(blocks)
}

/// Free parameters of an Ansatz, in class order.
pub fn ansatz_params(a: &Ansatz) -> Vec<ParamId> {
    let mut seen = BTreeSet::new();
    a.classes
        .iter()
        .flat_map(|c| c.value.params().collect::<Vec<_>>())
        .filter(|p| seen.insert(*p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;
    use crate::poly::{rat, rat_frac};

    fn p(m: usize, r: usize, n: u16, d: bool) -> TraceProblem {
        TraceProblem::new(m, r, n, d).unwrap()
    }

    #[test]
    fn trivial_square_problem() {
        let prob = p(4, 0, 1, false);
        let target = necklace::trace_coeff_necklace(&prob, Default::default()).unwrap();
        let sdp = build_sdp(&prob, BasisSpec::auto(&prob, &target).unwrap(), Default::default()).unwrap();
        assert_eq!(sdp.basis.blocks[0].bases[0], vec![Monomial::from_factors([(VarId::a(1, 1), 2)])]);
        assert_eq!(sdp.constraints.len(), 1);
        assert_eq!(sdp.constraints[0].rhs, rat(1));
        let cert = rationalize_and_verify(&sdp, &[RationalMatrix::identity(1)], &BigInt::one()).unwrap();
        assert_eq!(cert.blocks[0], RationalMatrix::identity(1));
    }

    #[test]
    fn constraint_count_matches_target_support() {
        for n in 1..=3 {
            let prob = p(4, 2, n, false);
            let target = necklace::trace_coeff_necklace(&prob, Default::default()).unwrap();
            let sdp = build_sdp(&prob, BasisSpec::cert42(n).unwrap(), Default::default()).unwrap();
            assert_eq!(sdp.target_constraint_count(), target.len());
        }
    }

    #[test]
    fn published_42_certificate_is_feasible() {
        for n in 1..=3 {
            let sdp = build_sdp(&p(4, 2, n, false), BasisSpec::cert42(n).unwrap(), Default::default()).unwrap();
            let blocks = cert42_blocks(n).unwrap();
            let cert = rationalize_and_verify(&sdp, &blocks, &BigInt::one()).unwrap();
            assert_eq!(cert.blocks, blocks);
        }
    }

    #[test]
    fn perturbation_is_rejected_with_constraint() {
        let sdp = build_sdp(&p(4, 2, 2, false), BasisSpec::cert42(2).unwrap(), Default::default()).unwrap();
        let mut blocks = cert42_blocks(2).unwrap();
        let v = blocks[0].get(0, 0) + rat(1);
        blocks[0].set(0, 0, v);
        match rationalize_and_verify(&sdp, &blocks, &BigInt::one()) {
            Err(SdpError::RationalizationFailed(Rejection::ConstraintViolated { kind, .. })) => {
                assert!(kind.starts_with("target "), "{kind}");
            }
            other => panic!("expected a violated constraint, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_perturbation_is_rejected() {
        let sdp = build_sdp(&p(4, 2, 2, false), BasisSpec::cert42(2).unwrap(), Default::default()).unwrap();
        let mut blocks = cert42_blocks(2).unwrap();
        blocks[1].set(3, 0, rat(7));
        assert!(matches!(
            rationalize_and_verify(&sdp, &blocks, &BigInt::one()),
            Err(SdpError::RationalizationFailed(Rejection::NotSymmetric { block: 2 }))
        ));
    }

    #[test]
    fn round_trip_is_identity() {
        let cases = [
            build_sdp(&p(4, 2, 1, false), BasisSpec::cert42(1).unwrap(), Default::default()).unwrap(),
            build_sdp(&p(4, 2, 2, false), BasisSpec::cert42(2).unwrap(), SdpOptions { entry_sum: true, ..Default::default() }).unwrap(),
            build_sdp(&p(8, 4, 3, true), BasisSpec::cert84(3, true).unwrap(), Default::default()).unwrap(),
        ];
        for sdp in cases {
            let text = to_sdpa_string(&sdp);
            assert!(text.contains(&format!("* basis-hash {}", sdp.basis.hash())));
            assert_eq!(from_sdpa_str(&text).unwrap(), sdp);
        }
    }

    #[test]
    fn non_integer_values_round_trip() {
        let mut sdp = build_sdp(&p(4, 2, 1, false), BasisSpec::cert42(1).unwrap(), Default::default()).unwrap();
        sdp.constraints[0].rhs = rat_frac(1, 3);
        let e = *sdp.constraints[0].coeffs.keys().next().unwrap();
        sdp.constraints[0].coeffs.insert(e, rat_frac(-2, 7));
        let text = to_sdpa_string(&sdp);
        assert!(text.contains("0.333333333333333333333333333333"));
        assert_eq!(from_sdpa_str(&text).unwrap(), sdp);
    }

    #[test]
    fn tampered_header_is_detected() {
        let sdp = build_sdp(&p(4, 2, 2, false), BasisSpec::cert42(2).unwrap(), Default::default()).unwrap();
        let text = to_sdpa_string(&sdp).replace("label Q2", "label Q9");
        assert!(matches!(from_sdpa_str(&text), Err(SdpError::HashMismatch { .. })));
    }

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(parse_decimal("0.25"), Some(rat_frac(1, 4)));
        assert_eq!(parse_decimal("-1.5e-1"), Some(rat_frac(-3, 20)));
        assert_eq!(parse_decimal("12"), Some(rat(12)));
        assert_eq!(parse_decimal("3/4"), Some(rat_frac(3, 4)));
        assert_eq!(parse_decimal("x"), None);
        assert_eq!(number_text(&rat_frac(-1, 8)), "-0.125000000000000000000000000000");
    }

    #[test]
    fn continued_fraction_rounding() {
        let pi = Rational::from_float(std::f64::consts::PI).unwrap();
        assert_eq!(limit_denominator(&pi, &BigInt::from(10)), rat_frac(22, 7));
        assert_eq!(limit_denominator(&pi, &BigInt::from(1000)), rat_frac(355, 113));
        assert_eq!(limit_denominator(&rat_frac(-7, 2), &BigInt::one()), rat(-4));
        let x = Rational::from_float(0.1f64 * 3.0).unwrap();
        assert_eq!(limit_denominator(&x, &BigInt::from(100)), rat_frac(3, 10));
    }

    #[test]
    fn ansatz_reduces_to_parameter_system() {
        let sdp = build_sdp(&p(8, 4, 3, true), BasisSpec::cert84(3, true).unwrap(), Default::default()).unwrap();
        let reduced = sdp.reduced_system().unwrap();
        let derived = cert84::derive_param_system_any(3, Default::default()).unwrap();
        assert!(reduced.equivalent(&derived).unwrap());
        let bundled = ParamSystem::new(golden::param_system());
        for eq in &reduced.equations {
            assert!(bundled.implies_zero(&eq.form()).unwrap());
        }
    }

    #[test]
    fn published_84_values_pass_at_n3() {
        let sdp = build_sdp(&p(8, 4, 3, true), BasisSpec::cert84(3, true).unwrap(), Default::default()).unwrap();
        let blocks = cert84_blocks(3, &Q3Param::Published).unwrap();
        let approx: Vec<RationalMatrix> = blocks
            .iter()
            .map(|q| q.map(|v| Rational::from_float(approx_f64(v) + 1e-9).unwrap()))
            .collect();
        let cert = rationalize_and_verify(&sdp, &approx, &BigInt::from(1000)).unwrap();
        assert_eq!(cert.blocks, blocks);
    }

    #[test]
    fn solution_json_round_trip() {
        let blocks = cert42_blocks(2).unwrap();
        let text = solution_json(&blocks).to_string();
        assert_eq!(parse_solution_json(&text).unwrap(), blocks);
        let floats = parse_solution_json(r#"{"blocks": [[[0.5, 1], [1, "2/3"]]]}"#).unwrap();
        assert_eq!(floats[0].get(0, 0), &rat_frac(1, 2));
        assert_eq!(floats[0].get(1, 1), &rat_frac(2, 3));
    }

    #[test]
    fn auto_basis_is_sound() {
        let prob = p(4, 2, 2, false);
        let target = necklace::trace_coeff_necklace(&prob, Default::default()).unwrap();
        let basis = BasisSpec::auto(&prob, &target).unwrap();
        let z = &basis.blocks[0].bases[0];
        assert!(z.iter().all(|m| m.degree_in(Kind::A) == 1 && m.degree_in(Kind::B) == 1));
        let sdp = build_sdp(&prob, basis, Default::default()).unwrap();
        assert_eq!(sdp.target_constraint_count(), target.len());
    }

    #[test]
    fn invalid_ansatz_is_rejected() {
        let mut basis = BasisSpec::cert84(2, true).unwrap();
        let mut ansatz = basis.ansatz.take().unwrap();
        ansatz.classes[0].entries.pop();
        assert!(matches!(
            BasisSpec::new(basis.blocks.clone(), Some(ansatz)),
            Err(SdpError::InvalidAnsatz(_))
        ));
    }
}
