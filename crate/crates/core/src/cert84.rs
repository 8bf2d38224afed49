//! Sum-of-squares certificate for the `t^4` coefficient of `trace((A + tB)^8)`
//! with `A` diagonal and `B` symmetric:
//! `z1ᵀ Q1 z1 + z2ᵀ Q2 z2 + Σ_{i<j} z3(i,j)ᵀ Q3 z3(i,j)`.
//!
//! `Q3` is described blockwise with 22 parameters `x1..x22`; any solution of
//! the linear system returned by [`derive_param_system`] gives an identity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::gram;
use crate::matrix::{AffineMatrix, BlockSpan, Matrix, RationalMatrix};
use crate::necklace::{self, NecklaceError, OracleOptions, TraceProblem};
use crate::poly::{AffineCoeff, Monomial, ParamId, PolyError, Polynomial, Rational, VarId};

pub const PARAM_COUNT: u16 = 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Cert84Error {
    #[error("invalid dimension n = {0}")]
    InvalidDimension(u16),
    #[error("parameter {0} has no value")]
    MissingParameter(ParamId),
    #[error("parameter {0} is negative")]
    NegativeParameter(ParamId),
    #[error("parameter system is inconsistent: {0}")]
    InconsistentSystem(String),
    #[error("cannot parse equation: {0}")]
    Parse(String),
    #[error(transparent)]
    Necklace(#[from] NecklaceError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// How the parameters of `Q3` are supplied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Q3Param {
    /// The published values of `x1..x22`.
    Published,
    /// Keep `x1..x22` as symbols; entries become affine forms.
    Symbolic,
    /// Explicit nonnegative values for all 22 parameters.
    Values(BTreeMap<ParamId, Rational>),
}

impl Q3Param {
    /// Parameter values, or `None` for symbolic parameters.
    pub fn values(&self) -> Result<Option<BTreeMap<ParamId, Rational>>, Cert84Error> {
        let values = match self {
            Q3Param::Symbolic => return Ok(None),
            Q3Param::Published => published_values(),
            Q3Param::Values(v) => v.clone(),
        };
        for k in 1..=PARAM_COUNT {
            let p = ParamId(k);
            match values.get(&p) {
                None => return Err(Cert84Error::MissingParameter(p)),
                Some(v) if v.is_negative() => return Err(Cert84Error::NegativeParameter(p)),
                Some(_) => {}
            }
        }
        Ok(Some(values))
    }
}

/// The published parameter values.
pub fn published_values() -> BTreeMap<ParamId, Rational> {
    crate::golden::x_values()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate84 {
    pub n: u16,
    pub q1: RationalMatrix,
    pub z1: Vec<Monomial>,
    pub q2: RationalMatrix,
    pub z2: Vec<Monomial>,
    pub q3: AffineMatrix,
    pub z3_family: BTreeMap<(u16, u16), Vec<Monomial>>,
}

impl Certificate84 {
    /// `Q3` as a numeric matrix when no parameter is left symbolic.
    pub fn q3_numeric(&self) -> Option<RationalMatrix> {
        self.q3.as_constant()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let family: Vec<serde_json::Value> = self
            .z3_family
            .iter()
            .map(|(&(i, j), z)| serde_json::json!({ "pair": [i, j], "z3": z }))
            .collect();
        serde_json::json!({
            "n": self.n,
            "q1": self.q1,
            "z1": self.z1,
            "q2": self.q2,
            "z2": self.z2,
            "q3": self.q3,
            "z3_family": family,
        })
    }
}

fn aa(i: u16) -> VarId {
    VarId::a(i, i)
}

fn bb(i: u16, j: u16) -> VarId {
    VarId::b(i, j)
}

fn mono(vars: impl IntoIterator<Item = VarId>) -> Monomial {
    Monomial::product_of(vars)
}

pub fn z1_vector(n: u16) -> Vec<Monomial> {
    (1..=n)
        .map(|i| Monomial::from_factors([(aa(i), 2), (bb(i, i), 2)]))
        .collect()
}

/// Ordered pairs `(i,j)`, `i ≠ j`, followed by unordered pairs `{i,j}`.
pub fn z2_index(n: u16) -> (Vec<(u16, u16)>, Vec<(u16, u16)>) {
    let ordered = (1..=n)
        .flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let unordered = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect();
    (ordered, unordered)
}

pub fn z2_vector(n: u16) -> Vec<Monomial> {
    let (ordered, unordered) = z2_index(n);
    let first = ordered
        .iter()
        .map(|&(i, j)| Monomial::from_factors([(aa(i), 2), (bb(i, j), 2)]));
    let second = unordered
        .iter()
        .map(|&(i, j)| Monomial::from_factors([(aa(i), 1), (aa(j), 1), (bb(i, j), 2)]));
    first.chain(second).collect()
}

pub fn q1_matrix(n: u16) -> RationalMatrix {
    RationalMatrix::identity(n as usize).scale(&Rational::from_integer(70.into()))
}

pub fn q2_matrix(n: u16) -> RationalMatrix {
    let (ordered, unordered) = z2_index(n);
    let d = ordered.len();
    let pair_of = |r: usize| -> (u16, u16) {
        if r < d {
            let (i, j) = ordered[r];
            (i.min(j), i.max(j))
        } else {
            unordered[r - d]
        }
    };
    let int = |v: i64| Rational::from_integer(v.into());
    RationalMatrix::from_fn(d + unordered.len(), d + unordered.len(), |r, c| {
        match (r < d, c < d) {
            (true, true) => int(if r == c { 20 } else { 0 }),
            (false, false) => int(if r == c { 36 } else { 0 }),
            _ => int(if pair_of(r) == pair_of(c) { 16 } else { 0 }),
        }
    })
    .with_blocks(vec![
        BlockSpan {
            label: "ordered".into(),
            start: 0,
            len: d,
        },
        BlockSpan {
            label: "unordered".into(),
            start: d,
            len: unordered.len(),
        },
    ])
}

/// Sizes of the seven blocks of `z3`.
pub fn z3_block_sizes(n: u16) -> [usize; 7] {
    let n = n as usize;
    if n < 2 {
        return [0; 7];
    }
    [2, 2, n - 2, 2 * (n - 2), n - 1, n - 2, n - 1]
}

/// `z3(i,j)` for `i < j`, block by block.
pub fn z3_vector(n: u16, i: u16, j: u16) -> Vec<Monomial> {
    let others: Vec<u16> = (1..=n).filter(|&k| k != i && k != j).collect();
    let mut z = vec![
        mono([aa(i), aa(i), bb(i, i), bb(i, j)]),
        mono([aa(j), aa(j), bb(i, j), bb(j, j)]),
        mono([aa(i), aa(j), bb(i, i), bb(i, j)]),
        mono([aa(i), aa(j), bb(j, j), bb(i, j)]),
    ];
    z.extend(others.iter().map(|&k| mono([aa(k), aa(k), bb(i, k), bb(j, k)])));
    for &k in &others {
        z.push(mono([aa(i), aa(k), bb(i, k), bb(j, k)]));
        z.push(mono([aa(j), aa(k), bb(i, k), bb(j, k)]));
    }
    let lead_j = std::iter::once(j).chain(others.iter().copied());
    z.extend(lead_j.map(|k| mono([aa(i), aa(i), bb(i, k), bb(j, k)])));
    z.extend(others.iter().map(|&k| mono([aa(i), aa(j), bb(i, k), bb(j, k)])));
    let lead_i = std::iter::once(i).chain(others.iter().copied());
    z.extend(lead_i.map(|k| mono([aa(j), aa(j), bb(i, k), bb(j, k)])));
    z
}

/// Entry of block `(u, v)` of `Q3`, at local row `p` and column `q`.
fn q3_entry(u: usize, v: usize, p: usize, q: usize, x: &dyn Fn(u16) -> AffineCoeff) -> AffineCoeff {
    if u > v {
        return q3_entry(v, u, q, p, x);
    }
    let c = |k: i64| AffineCoeff::int(k);
    let pick = |cond: bool, a: AffineCoeff, b: AffineCoeff| if cond { a } else { b };
    let diag = p == q;
    match (u, v) {
        (1, 1) => pick(diag, c(120), x(9)),
        (1, 2) => pick(diag, c(40), x(1)),
        (1, 3) => x(7),
        (1, 4) => pick(p == q % 2, x(17), x(19)),
        (1, 5) => pick(p == 0, c(20), x(4)),
        (1, 6) => x(18),
        (1, 7) => pick(p == 0, x(4), c(20)),
        (2, 2) => pick(diag, x(3), x(10)),
        (2, 3) => x(11),
        (2, 4) => pick(p == q % 2, x(20), x(12)),
        (2, 5) => pick(p == 0, x(2), c(12)),
        (2, 6) => x(8),
        (2, 7) => pick(p == 0, c(12), x(2)),
        (3, 3) => pick(diag, c(40), x(5)),
        (3, 4) => pick(p == q / 2, c(16), x(21)),
        (3, 5) | (3, 7) | (5, 6) | (6, 7) => c(4),
        (3, 6) => pick(diag, x(15), x(13)),
        (4, 4) => {
            let same_parity = p % 2 == q % 2;
            if p / 2 == q / 2 {
                pick(same_parity, c(16), x(14))
            } else {
                pick(same_parity, x(16), c(2))
            }
        }
        (4, 5) => pick(p.is_multiple_of(2), c(8), x(13)),
        (4, 6) => pick(p / 2 == q, x(16), x(22)),
        (4, 7) => pick(p.is_multiple_of(2), x(13), c(8)),
        (5, 5) | (7, 7) => c(8),
        (5, 7) => c(0),
        (6, 6) => pick(diag, c(8), x(6)),
        _ => unreachable!("Q3 has seven blocks"),
    }
}

/// `Q3` for dimension `n` with parameter `k` given by `x(k)`.
pub fn q3_matrix(n: u16, x: &dyn Fn(u16) -> AffineCoeff) -> AffineMatrix {
    let sizes = z3_block_sizes(n);
    let mut block_of = Vec::new();
    let mut blocks = Vec::new();
    let mut start = 0;
    for (b, &len) in sizes.iter().enumerate() {
        for local in 0..len {
            block_of.push((b + 1, local));
        }
        blocks.push(BlockSpan {
            label: format!("block {}", b + 1),
            start,
            len,
        });
        start += len;
    }
    let d = block_of.len();
    Matrix::from_fn(d, d, |r, c| {
        let ((u, p), (v, q)) = (block_of[r], block_of[c]);
        q3_entry(u, v, p, q, x)
    })
    .with_blocks(blocks)
}

pub fn build_certificate84(n: u16, params: &Q3Param) -> Result<Certificate84, Cert84Error> {
    if n == 0 {
        return Err(Cert84Error::InvalidDimension(n));
    }
    let values = params.values()?;
    let x = |k: u16| -> AffineCoeff {
        match &values {
            Some(v) => AffineCoeff::constant(v[&ParamId(k)].clone()),
            None => AffineCoeff::param(ParamId(k)),
        }
    };
    let mut z3_family = BTreeMap::new();
    for i in 1..=n {
        for j in i + 1..=n {
            z3_family.insert((i, j), z3_vector(n, i, j));
        }
    }
    Ok(Certificate84 {
        n,
        q1: q1_matrix(n),
        z1: z1_vector(n),
        q2: q2_matrix(n),
        z2: z2_vector(n),
        q3: q3_matrix(n, &x),
        z3_family,
    })
}

pub fn assemble_sos_84(c: &Certificate84) -> Polynomial {
    let mut acc = BTreeMap::new();
    gram::add_quadratic_form(&mut acc, &c.z1, &c.q1);
    gram::add_quadratic_form(&mut acc, &c.z2, &c.q2);
    match c.q3_numeric() {
        Some(q3) => {
            for z in c.z3_family.values() {
                gram::add_quadratic_form(&mut acc, z, &q3);
            }
        }
        None => {
            for z in c.z3_family.values() {
                gram::add_quadratic_form_affine(&mut acc, z, &c.q3);
            }
        }
    }
    gram::collect(acc)
}

/// Sum of the entries of `Q1`, `Q2` and `C(n,2)` copies of `Q3`.
pub fn entry_sum_84(c: &Certificate84) -> AffineCoeff {
    let mut total = AffineCoeff::constant(c.q1.entry_sum() + c.q2.entry_sum());
    let copies = Rational::from_integer((c.z3_family.len() as i64).into());
    total.add_scaled(&c.q3.entry_sum(), &copies);
    total
}

/// Row indices of `Q3(n)` that form `Q3(sub)` (the pair `(1,2)` with indices
/// above `sub` dropped).
pub fn q3_submatrix_pattern(n: u16, sub: u16) -> Vec<usize> {
    assert!(2 <= sub && sub <= n, "need 2 <= sub <= n");
    let big = z3_block_sizes(n);
    let small = z3_block_sizes(sub);
    let mut keep = Vec::new();
    let mut start = 0;
    for (b, (&len, &want)) in big.iter().zip(&small).enumerate() {
        // Blocks 3, 4 and 6 enumerate k = 3..n (block 4 in pairs); blocks 5
        // and 7 prepend one fixed entry. In every case the entries for k <= sub
        // come first.
        let _ = b;
        keep.extend(start..start + want);
        start += len;
    }
    keep
}

/// A linear constraint `Σ c_k x_k = rhs` with coprime integer coefficients
/// and a positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearEquation {
    coeffs: BTreeMap<ParamId, BigInt>,
    rhs: BigInt,
}

impl LinearEquation {
    /// The equation `form = 0`, normalized; `Ok(None)` for the zero form.
    pub fn from_form(form: &AffineCoeff) -> Result<Option<LinearEquation>, Cert84Error> {
        if form.is_zero() {
            return Ok(None);
        }
        if form.is_constant() {
            return Err(Cert84Error::InconsistentSystem(format!("{form} = 0")));
        }
        let mut lcm = BigInt::one();
        for v in form.linear_part().values().chain([form.constant_part()]) {
            lcm = lcm.lcm(v.denom());
        }
        let scale = |v: &Rational| (v * Rational::from_integer(lcm.clone())).to_integer();
        let mut coeffs: BTreeMap<ParamId, BigInt> =
            form.linear_part().iter().map(|(p, v)| (*p, scale(v))).collect();
        let mut rhs = -scale(form.constant_part());
        let mut g = rhs.abs();
        for c in coeffs.values() {
            g = g.gcd(c);
        }
        let leading_negative = coeffs.values().next().is_some_and(|c| c.is_negative());
        let g = if leading_negative { -g } else { g };
        for c in coeffs.values_mut() {
            *c /= &g;
        }
        rhs /= &g;
        Ok(Some(LinearEquation { coeffs, rhs }))
    }

    pub fn coeffs(&self) -> &BTreeMap<ParamId, BigInt> {
        &self.coeffs
    }

    pub fn rhs(&self) -> &BigInt {
        &self.rhs
    }

    /// `Σ c_k x_k - rhs` as an affine form.
    pub fn form(&self) -> AffineCoeff {
        AffineCoeff::from_parts(
            Rational::from_integer(-self.rhs.clone()),
            self.coeffs
                .iter()
                .map(|(p, c)| (*p, Rational::from_integer(c.clone())))
                .collect(),
        )
    }

    pub fn satisfied_by(&self, values: &BTreeMap<ParamId, Rational>) -> Result<bool, Cert84Error> {
        Ok(self.form().evaluate(values)?.is_zero())
    }
}

impl fmt::Display for LinearEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, (p, c)) in self.coeffs.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            match (idx, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            let mag = c.abs();
            if mag.is_one() {
                write!(f, "{p}")?;
            } else {
                write!(f, "{mag}*{p}")?;
            }
        }
        write!(f, " = {}", self.rhs)
    }
}

impl FromStr for LinearEquation {
    type Err = Cert84Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lhs, rhs) = s
            .split_once('=')
            .ok_or_else(|| Cert84Error::Parse(format!("missing `=` in `{s}`")))?;
        let parse = |t: &str| {
            t.parse::<AffineCoeff>()
                .map_err(|e| Cert84Error::Parse(format!("`{t}`: {e}")))
        };
        let mut form = parse(lhs)?;
        form.add_scaled(&parse(rhs)?, &-Rational::one());
        LinearEquation::from_form(&form)?
            .ok_or_else(|| Cert84Error::Parse(format!("trivial equation `{s}`")))
    }
}

impl Serialize for LinearEquation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LinearEquation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// One row of the reduced row echelon form: `pivot + Σ c_k x_k = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedRow {
    pub pivot: ParamId,
    pub rest: BTreeMap<ParamId, Rational>,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSystem {
    pub equations: Vec<LinearEquation>,
}

impl ParamSystem {
    pub fn new(mut equations: Vec<LinearEquation>) -> ParamSystem {
        equations.sort();
        equations.dedup();
        ParamSystem { equations }
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    /// Reduced row echelon form by exact Gauss–Jordan elimination, pivoting
    /// on parameters in increasing index order.
    pub fn rref(&self) -> Result<Vec<ReducedRow>, Cert84Error> {
        let mut rows: Vec<AffineCoeff> = self.equations.iter().map(LinearEquation::form).collect();
        let params: BTreeSet<ParamId> = rows.iter().flat_map(|r| r.params().collect::<Vec<_>>()).collect();
        let mut reduced: Vec<(ParamId, AffineCoeff)> = Vec::new();
        for p in params {
            let Some(idx) = rows.iter().position(|r| r.linear_part().contains_key(&p)) else {
                continue;
            };
            let row = rows.swap_remove(idx);
            let inv = row.linear_part()[&p].recip();
            let row = row.scale(&inv);
            let eliminate = |other: &mut AffineCoeff| {
                if let Some(c) = other.linear_part().get(&p).cloned() {
                    other.add_scaled(&row, &-c);
                }
            };
            rows.iter_mut().for_each(eliminate);
            reduced.iter_mut().for_each(|(_, r)| eliminate(r));
            reduced.push((p, row));
        }
        if let Some(bad) = rows.iter().find(|r| !r.is_zero()) {
            return Err(Cert84Error::InconsistentSystem(format!("{bad} = 0")));
        }
        Ok(reduced
            .into_iter()
            .map(|(pivot, form)| ReducedRow {
                pivot,
                rest: form
                    .linear_part()
                    .iter()
                    .filter(|(k, _)| **k != pivot)
                    .map(|(k, v)| (*k, v.clone()))
                    .collect(),
                rhs: -form.constant_part().clone(),
            })
            .collect())
    }

    pub fn rank(&self) -> Result<usize, Cert84Error> {
        Ok(self.rref()?.len())
    }

    /// Same solution set.
    pub fn equivalent(&self, other: &ParamSystem) -> Result<bool, Cert84Error> {
        Ok(self.rref()? == other.rref()?)
    }

    pub fn satisfied_by(&self, values: &BTreeMap<ParamId, Rational>) -> Result<bool, Cert84Error> {
        for eq in &self.equations {
            if !eq.satisfied_by(values)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Remainder of `form` after eliminating every pivot parameter.
    pub fn reduce(&self, form: &AffineCoeff) -> Result<AffineCoeff, Cert84Error> {
        let mut out = form.clone();
        for row in self.rref()? {
            if let Some(c) = out.linear_part().get(&row.pivot).cloned() {
                let mut pivot_form = AffineCoeff::from_parts(-row.rhs.clone(), row.rest.clone());
                pivot_form.add_assign_ref(&AffineCoeff::param(row.pivot));
                out.add_scaled(&pivot_form, &-c);
            }
        }
        Ok(out)
    }

    /// Whether `form` vanishes on every solution of the system.
    pub fn implies_zero(&self, form: &AffineCoeff) -> Result<bool, Cert84Error> {
        Ok(self.reduce(form)?.is_zero())
    }
}

impl fmt::Display for ParamSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            writeln!(f, "{eq}")?;
        }
        Ok(())
    }
}

/// Symbolic assembly minus the trace coefficient, for dimension `n`.
pub fn symbolic_residual(n: u16, opts: OracleOptions) -> Result<Polynomial, Cert84Error> {
    let cert = build_certificate84(n, &Q3Param::Symbolic)?;
    let target = necklace::trace_coeff_necklace(&TraceProblem::new(8, 4, n, true)?, opts)?;
    Ok(assemble_sos_84(&cert).sub(&target))
}

/// Coefficient-matching conditions for any `n ≥ 1`. Small `n` yields a
/// weaker system because several coefficient classes coincide.
pub fn derive_param_system_any(n: u16, opts: OracleOptions) -> Result<ParamSystem, Cert84Error> {
    let residual = symbolic_residual(n, opts)?;
    let mut equations = Vec::new();
    for (m, form) in residual.terms() {
        match LinearEquation::from_form(form) {
            Ok(Some(eq)) => equations.push(eq),
            Ok(None) => {}
            Err(_) => {
                return Err(Cert84Error::InconsistentSystem(format!(
                    "coefficient of {m} is the nonzero constant {form}"
                )))
            }
        }
    }
    let system = ParamSystem::new(equations);
    system.rref()?;
    Ok(system)
}

/// The coefficient-matching system; needs `n ≥ 4` so that every block of
/// `z3` is populated and no coefficient classes merge.
pub fn derive_param_system(n: u16) -> Result<ParamSystem, Cert84Error> {
    if n < 4 {
        return Err(Cert84Error::InvalidDimension(n));
    }
    derive_param_system_any(n, OracleOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;
    use crate::necklace::trace_coeff_matrix;
    use crate::poly::rat;

    #[test]
    fn block_sizes_sum() {
        for n in 2..=9 {
            let s: usize = z3_block_sizes(n).iter().sum();
            assert_eq!(s, 6 * n as usize - 6);
            assert_eq!(z3_vector(n, 1, 2).len(), s);
        }
        assert_eq!(z3_block_sizes(2), [2, 2, 0, 0, 1, 0, 1]);
    }

    #[test]
    fn golden_vectors_n5() {
        let c = build_certificate84(5, &Q3Param::Published).unwrap();
        assert_eq!(c.z2, golden::z2_84_n5());
        assert_eq!(c.z3_family, golden::z3_n5());
        assert!(c.q2.same_entries(&golden::q2_84_n5()));
        assert!(c.q3_numeric().unwrap().same_entries(&golden::q3_n5()));
        let sym = build_certificate84(5, &Q3Param::Symbolic).unwrap();
        assert!(sym.q3.same_entries(&golden::q3_symbolic_n5()));
        assert!(sym.q3.is_symmetric());
        assert_eq!(c.z2.len(), 30);
    }

    #[test]
    fn q1_q2_shape() {
        let c = build_certificate84(3, &Q3Param::Published).unwrap();
        assert_eq!(c.q1, RationalMatrix::identity(3).scale(&rat(70)));
        assert_eq!(c.z1[0], Monomial::from_factors([(aa(1), 2), (bb(1, 1), 2)]));
        assert_eq!(c.q2.rows(), 9);
    }

    #[test]
    fn scalar_and_small_identity() {
        let c1 = build_certificate84(1, &Q3Param::Published).unwrap();
        let expected = Polynomial::term(Monomial::from_factors([(aa(1), 4), (bb(1, 1), 4)]), 70.into());
        assert_eq!(assemble_sos_84(&c1), expected);
        for n in 2..=3 {
            let c = build_certificate84(n, &Q3Param::Published).unwrap();
            let p = TraceProblem::new(8, 4, n, true).unwrap();
            assert_eq!(assemble_sos_84(&c), trace_coeff_matrix(&p, Default::default()).unwrap(), "n={n}");
        }
        assert!(build_certificate84(0, &Q3Param::Published).is_err());
    }

    #[test]
    fn entry_sums() {
        for n in 2..=5u16 {
            let c = build_certificate84(n, &Q3Param::Published).unwrap();
            assert_eq!(entry_sum_84(&c), AffineCoeff::int(70 * (n as i64).pow(4)));
        }
    }

    #[test]
    fn parameter_validation() {
        let mut v = published_values();
        v.remove(&ParamId(3));
        assert_eq!(
            build_certificate84(3, &Q3Param::Values(v.clone())).unwrap_err(),
            Cert84Error::MissingParameter(ParamId(3))
        );
        v.insert(ParamId(3), rat(-1));
        assert_eq!(
            build_certificate84(3, &Q3Param::Values(v)).unwrap_err(),
            Cert84Error::NegativeParameter(ParamId(3))
        );
    }

    #[test]
    fn equation_text() {
        let eq: LinearEquation = "x3 + 2*x4 = 48".parse().unwrap();
        assert_eq!(eq.to_string(), "x3 + 2*x4 = 48");
        let neg = LinearEquation::from_form(&"-2*x1 - 4*x2 + 6".parse().unwrap()).unwrap().unwrap();
        assert_eq!(neg.to_string(), "x1 + 2*x2 = 3");
        assert!(LinearEquation::from_form(&AffineCoeff::int(3)).is_err());
    }

    #[test]
    fn system_reduction() {
        let sys = ParamSystem::new(golden::param_system());
        assert_eq!(sys.rank().unwrap(), 11);
        assert!(sys.satisfied_by(&published_values()).unwrap());
        let form: AffineCoeff = "x1 + x2".parse().unwrap();
        assert_eq!(sys.reduce(&form).unwrap(), AffineCoeff::int(32));
        let bad = ParamSystem::new(vec!["x1 = 1".parse().unwrap(), "2*x1 = 3".parse().unwrap()]);
        assert!(matches!(bad.rref(), Err(Cert84Error::InconsistentSystem(_))));
    }

    #[test]
    fn submatrix_pattern_matches_smaller_builds() {
        let q5 = build_certificate84(5, &Q3Param::Published).unwrap().q3_numeric().unwrap();
        for sub in 2..=4 {
            let direct = build_certificate84(sub, &Q3Param::Published).unwrap().q3_numeric().unwrap();
            let pattern = q3_submatrix_pattern(5, sub);
            assert!(q5.principal_submatrix(&pattern).same_entries(&direct), "sub={sub}");
        }
    }

    #[test]
    fn derived_system_matches_bundled() {
        let bundled = ParamSystem::new(golden::param_system());
        for n in [4, 5] {
            let derived = derive_param_system(n).unwrap();
            assert_eq!(derived, bundled, "n={n}");
            assert!(derived.equivalent(&bundled).unwrap());
        }
        assert_eq!(derive_param_system(3).unwrap_err(), Cert84Error::InvalidDimension(3));
        let weak = derive_param_system_any(3, OracleOptions::default()).unwrap();
        assert_eq!(weak.len(), 9);
        assert!(weak.rank().unwrap() < bundled.rank().unwrap());
        for eq in &weak.equations {
            assert!(bundled.implies_zero(&eq.form()).unwrap());
        }
    }

    #[test]
    fn published_identity_at_n4() {
        let c = build_certificate84(4, &Q3Param::Published).unwrap();
        let p = TraceProblem::new(8, 4, 4, true).unwrap();
        assert_eq!(assemble_sos_84(&c), trace_coeff_matrix(&p, Default::default()).unwrap());
    }
}
