//! Sparse multivariate polynomials over the rationals.
//!
//! Variables are the entries `a[i,j]`, `b[i,j]` of two symmetric matrices,
//! stored with a canonical index pair `i <= j`. Coefficients are affine forms
//! in the parameters `x1, x2, ...` so that a Gram matrix with unknown entries
//! can be expanded without leaving the polynomial type.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("product of two parametric coefficients is not affine")]
    ParameterDegreeOverflow,
    #[error("parameter {0} is unbound")]
    UnboundParameter(ParamId),
    #[error("variable {0} is unbound")]
    UnboundVariable(VarId),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Which matrix an entry variable belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kind {
    A,
    B,
}

impl Kind {
    pub fn swapped(self) -> Kind {
        match self {
            Kind::A => Kind::B,
            Kind::B => Kind::A,
        }
    }

    fn letter(self) -> char {
        match self {
            Kind::A => 'a',
            Kind::B => 'b',
        }
    }
}

/// The entry `{i,j}` of `A` or `B`. The pair is unordered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId {
    kind: Kind,
    lo: u16,
    hi: u16,
}

impl VarId {
    pub fn new(kind: Kind, i: u16, j: u16) -> VarId {
        assert!(i >= 1 && j >= 1, "matrix indices are 1-based");
        VarId {
            kind,
            lo: i.min(j),
            hi: i.max(j),
        }
    }

    pub fn a(i: u16, j: u16) -> VarId {
        VarId::new(Kind::A, i, j)
    }

    pub fn b(i: u16, j: u16) -> VarId {
        VarId::new(Kind::B, i, j)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn pair(&self) -> (u16, u16) {
        (self.lo, self.hi)
    }

    pub fn is_diagonal(&self) -> bool {
        self.lo == self.hi
    }

    pub fn with_kind(&self, kind: Kind) -> VarId {
        VarId { kind, ..*self }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{}]", self.kind.letter(), self.lo, self.hi)
    }
}

impl FromStr for VarId {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PolyError::Parse(format!("bad variable `{s}`"));
        let s = s.trim();
        let kind = match s.chars().next() {
            Some('a') => Kind::A,
            Some('b') => Kind::B,
            _ => return Err(err()),
        };
        let inner = s[1..]
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(err)?;
        let (i, j) = inner.split_once(',').ok_or_else(err)?;
        let i: u16 = i.trim().parse().map_err(|_| err())?;
        let j: u16 = j.trim().parse().map_err(|_| err())?;
        if i == 0 || j == 0 {
            return Err(err());
        }
        Ok(VarId::new(kind, i, j))
    }
}

/// A parameter `x<k>` of a parametric Gram matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamId(pub u16);

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl FromStr for ParamId {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .strip_prefix('x')
            .and_then(|k| k.parse::<u16>().ok())
            .filter(|&k| k > 0)
            .map(ParamId)
            .ok_or_else(|| PolyError::Parse(format!("bad parameter `{s}`")))
    }
}

/// A power product of entry variables; the empty product is `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    factors: Vec<(VarId, u32)>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn var(v: VarId) -> Monomial {
        Monomial {
            factors: vec![(v, 1)],
        }
    }

    /// Builds a monomial from arbitrary (possibly repeated) factors.
    pub fn from_factors<I: IntoIterator<Item = (VarId, u32)>>(factors: I) -> Monomial {
        let mut map: BTreeMap<VarId, u32> = BTreeMap::new();
        for (v, e) in factors {
            if e > 0 {
                *map.entry(v).or_insert(0) += e;
            }
        }
        Monomial {
            factors: map.into_iter().collect(),
        }
    }

    pub fn product_of<I: IntoIterator<Item = VarId>>(vars: I) -> Monomial {
        let mut vars: Vec<VarId> = vars.into_iter().collect();
        vars.sort_unstable();
        let mut factors: Vec<(VarId, u32)> = Vec::with_capacity(vars.len());
        for v in vars {
            match factors.last_mut() {
                Some((w, e)) if *w == v => *e += 1,
                _ => factors.push((v, 1)),
            }
        }
        Monomial { factors }
    }

    pub fn factors(&self) -> &[(VarId, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_in(&self, kind: Kind) -> u32 {
        self.factors
            .iter()
            .filter(|(v, _)| v.kind == kind)
            .map(|&(_, e)| e)
            .sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.factors
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|idx| self.factors[idx].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial { factors: out }
    }

    pub fn pow(&self, e: u32) -> Monomial {
        Monomial {
            factors: if e == 0 {
                Vec::new()
            } else {
                self.factors.iter().map(|&(v, k)| (v, k * e)).collect()
            },
        }
    }

    /// Applies `f` to every variable and re-canonicalizes.
    pub fn map_vars<F: Fn(VarId) -> VarId>(&self, f: F) -> Monomial {
        Monomial::from_factors(self.factors.iter().map(|&(v, e)| (f(v), e)))
    }

    pub fn evaluate(&self, assignment: &Assignment) -> Result<Rational, PolyError> {
        let mut acc = Rational::one();
        for &(v, e) in &self.factors {
            let val = assignment.get(&v).ok_or(PolyError::UnboundVariable(v))?;
            acc *= num_traits::pow(val.clone(), e as usize);
        }
        Ok(acc)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (idx, (v, e)) in self.factors.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Monomial {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "1" {
            return Ok(Monomial::one());
        }
        let mut factors = Vec::new();
        for part in s.split('*') {
            let (var, exp) = match part.split_once('^') {
                Some((v, e)) => (
                    v,
                    e.trim()
                        .parse::<u32>()
                        .map_err(|_| PolyError::Parse(format!("bad exponent in `{part}`")))?,
                ),
                None => (part, 1),
            };
            factors.push((var.parse::<VarId>()?, exp));
        }
        Ok(Monomial::from_factors(factors))
    }
}

/// Serializes a value through its canonical text form.
macro_rules! serde_via_text {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(&self.to_string())
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                String::deserialize(deserializer)?
                    .parse()
                    .map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_via_text!(VarId);
serde_via_text!(ParamId);
serde_via_text!(Monomial);
serde_via_text!(AffineCoeff);

/// Values for entry variables.
pub type Assignment = BTreeMap<VarId, Rational>;

/// Reads `a[i,j]` and `b[i,j]` (i <= j) off two symmetric matrices.
pub fn matrix_assignment(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Assignment {
    let mut out = Assignment::new();
    for (kind, m) in [(Kind::A, a), (Kind::B, b)] {
        for i in 0..m.len() {
            for j in i..m.len() {
                out.insert(
                    VarId::new(kind, (i + 1) as u16, (j + 1) as u16),
                    m[i][j].clone(),
                );
            }
        }
    }
    out
}

/// `constant + sum_k linear[k] * x_k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AffineCoeff {
    constant: Rational,
    linear: BTreeMap<ParamId, Rational>,
}

impl AffineCoeff {
    pub fn zero() -> AffineCoeff {
        AffineCoeff::default()
    }

    pub fn constant(q: Rational) -> AffineCoeff {
        AffineCoeff {
            constant: q,
            linear: BTreeMap::new(),
        }
    }

    pub fn int(n: i64) -> AffineCoeff {
        AffineCoeff::constant(rat(n))
    }

    pub fn param(p: ParamId) -> AffineCoeff {
        let mut linear = BTreeMap::new();
        linear.insert(p, Rational::one());
        AffineCoeff {
            constant: Rational::zero(),
            linear,
        }
    }

    pub fn from_parts(constant: Rational, linear: BTreeMap<ParamId, Rational>) -> AffineCoeff {
        let linear = linear.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        AffineCoeff { constant, linear }
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn linear_part(&self) -> &BTreeMap<ParamId, Rational> {
        &self.linear
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.linear.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.linear.is_empty()
    }

    pub fn as_constant(&self) -> Option<&Rational> {
        self.is_constant().then_some(&self.constant)
    }

    pub fn add_assign_ref(&mut self, other: &AffineCoeff) {
        self.constant += &other.constant;
        for (p, c) in &other.linear {
            let slot = self.linear.entry(*p).or_insert_with(Rational::zero);
            *slot += c;
            if slot.is_zero() {
                self.linear.remove(p);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &AffineCoeff, factor: &Rational) {
        if factor.is_zero() {
            return;
        }
        self.constant += &other.constant * factor;
        for (p, c) in &other.linear {
            let slot = self.linear.entry(*p).or_insert_with(Rational::zero);
            *slot += c * factor;
            if slot.is_zero() {
                self.linear.remove(p);
            }
        }
    }

    pub fn scale(&self, factor: &Rational) -> AffineCoeff {
        if factor.is_zero() {
            return AffineCoeff::zero();
        }
        AffineCoeff {
            constant: &self.constant * factor,
            linear: self
                .linear
                .iter()
                .map(|(p, c)| (*p, c * factor))
                .collect(),
        }
    }

    pub fn neg(&self) -> AffineCoeff {
        self.scale(&-Rational::one())
    }

    pub fn checked_mul(&self, other: &AffineCoeff) -> Result<AffineCoeff, PolyError> {
        match (self.as_constant(), other.as_constant()) {
            (Some(c), _) => Ok(other.scale(c)),
            (_, Some(c)) => Ok(self.scale(c)),
            _ => Err(PolyError::ParameterDegreeOverflow),
        }
    }

    /// Replaces each bound parameter by its value; unbound ones stay symbolic.
    pub fn substitute(&self, values: &BTreeMap<ParamId, AffineCoeff>) -> AffineCoeff {
        let mut out = AffineCoeff::constant(self.constant.clone());
        for (p, c) in &self.linear {
            match values.get(p) {
                Some(v) => out.add_scaled(v, c),
                None => out.add_scaled(&AffineCoeff::param(*p), c),
            }
        }
        out
    }

    pub fn evaluate(&self, values: &BTreeMap<ParamId, Rational>) -> Result<Rational, PolyError> {
        let mut acc = self.constant.clone();
        for (p, c) in &self.linear {
            let v = values.get(p).ok_or(PolyError::UnboundParameter(*p))?;
            acc += c * v;
        }
        Ok(acc)
    }

    pub fn params(&self) -> impl Iterator<Item = ParamId> + '_ {
        self.linear.keys().copied()
    }
}

impl From<Rational> for AffineCoeff {
    fn from(q: Rational) -> Self {
        AffineCoeff::constant(q)
    }
}

impl From<i64> for AffineCoeff {
    fn from(n: i64) -> Self {
        AffineCoeff::int(n)
    }
}

fn write_signed_term(
    f: &mut fmt::Formatter<'_>,
    first: bool,
    coeff: &Rational,
    body: Option<&dyn fmt::Display>,
) -> fmt::Result {
    let neg = coeff.is_negative();
    let abs = coeff.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    match body {
        None => write!(f, "{abs}"),
        Some(b) if abs.is_one() => write!(f, "{b}"),
        Some(b) => write!(f, "{abs}*{b}"),
    }
}

impl fmt::Display for AffineCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.constant.is_zero() || self.linear.is_empty() {
            write_signed_term(f, true, &self.constant, None)?;
            first = false;
        }
        for (p, c) in &self.linear {
            write_signed_term(f, first, c, Some(p))?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for AffineCoeff {
    type Err = PolyError;

    /// Parses forms like `32`, `-1/2`, `x3`, `24 - x1 + 2*x4`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |m: &str| PolyError::Parse(format!("bad affine form `{s}`: {m}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let compact = compact
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .map(str::to_string)
            .unwrap_or(compact);
        if compact.is_empty() {
            return Err(err("empty"));
        }
        let mut out = AffineCoeff::zero();
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (idx, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && idx > 0 && !cur.ends_with('/') {
                chunks.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && idx == 0 {
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        chunks.push((neg, cur));
        for (neg, chunk) in chunks {
            if chunk.is_empty() {
                return Err(err("dangling sign"));
            }
            let sign = if neg { -Rational::one() } else { Rational::one() };
            let (num, param) = match chunk.split_once('*') {
                Some((c, p)) => (
                    c.parse::<Rational>().map_err(|_| err("bad coefficient"))?,
                    Some(p.parse::<ParamId>()?),
                ),
                None if chunk.starts_with('x') => (Rational::one(), Some(chunk.parse::<ParamId>()?)),
                None => (
                    chunk.parse::<Rational>().map_err(|_| err("bad number"))?,
                    None,
                ),
            };
            let term = match param {
                Some(p) => AffineCoeff::param(p).scale(&(num * sign)),
                None => AffineCoeff::constant(num * sign),
            };
            out.add_assign_ref(&term);
        }
        Ok(out)
    }
}

/// Sparse polynomial: monomial -> nonzero affine coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, AffineCoeff>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn one() -> Polynomial {
        Polynomial::term(Monomial::one(), AffineCoeff::int(1))
    }

    pub fn term(m: Monomial, c: AffineCoeff) -> Polynomial {
        let mut p = Polynomial::zero();
        p.add_term(m, &c);
        p
    }

    pub fn monomial(m: Monomial) -> Polynomial {
        Polynomial::term(m, AffineCoeff::int(1))
    }

    pub fn var(v: VarId) -> Polynomial {
        Polynomial::monomial(Monomial::var(v))
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, AffineCoeff> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> AffineCoeff {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, m: Monomial, c: &AffineCoeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Polynomial {
        if factor.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.scale(factor)))
                .collect(),
        }
    }

    /// Whether any coefficient carries a parameter.
    pub fn is_parametric(&self) -> bool {
        self.terms.values().any(|c| !c.is_constant())
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        if self.is_parametric() && other.is_parametric() {
            return Err(PolyError::ParameterDegreeOverflow);
        }
        let mut acc: HashMap<Monomial, AffineCoeff> = HashMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c = c1.checked_mul(c2)?;
                acc.entry(m1.mul(m2))
                    .or_insert_with(AffineCoeff::zero)
                    .add_assign_ref(&c);
            }
        }
        Ok(Polynomial {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn map_vars<F: Fn(VarId) -> VarId>(&self, f: F) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.map_vars(&f), c);
        }
        out
    }

    /// Substitutes values for the parameters.
    pub fn substitute_params(&self, values: &BTreeMap<ParamId, AffineCoeff>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &c.substitute(values));
        }
        out
    }

    /// Partial substitution of entry variables; unassigned variables remain.
    pub fn substitute(&self, assignment: &Assignment) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut scalar = Rational::one();
            let mut rest = Vec::new();
            for &(v, e) in m.factors() {
                match assignment.get(&v) {
                    Some(val) => scalar *= num_traits::pow(val.clone(), e as usize),
                    None => rest.push((v, e)),
                }
            }
            out.add_term(Monomial::from_factors(rest), &c.scale(&scalar));
        }
        out
    }

    /// Full evaluation to a scalar.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<Rational, PolyError> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let c = c.as_constant().ok_or_else(|| {
                PolyError::UnboundParameter(c.params().next().expect("nonconstant"))
            })?;
            acc += c * m.evaluate(assignment)?;
        }
        Ok(acc)
    }

    /// Sum of all coefficients (the value at all-ones).
    pub fn coefficient_mass(&self) -> AffineCoeff {
        let mut acc = AffineCoeff::zero();
        for c in self.terms.values() {
            acc.add_assign_ref(c);
        }
        acc
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("polynomial serializes")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let first = idx == 0;
            match c.as_constant() {
                Some(q) if m.is_one() => write_signed_term(f, first, q, None)?,
                Some(q) => write_signed_term(f, first, q, Some(m))?,
                None => {
                    if !first {
                        write!(f, " + ")?;
                    }
                    if m.is_one() {
                        write!(f, "({c})")?;
                    } else {
                        write!(f, "({c})*{m}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    terms: Vec<(String, String)>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PolynomialJson {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.to_string(), c.to_string()))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = PolynomialJson::deserialize(deserializer)?;
        let mut out = Polynomial::zero();
        for (m, c) in raw.terms {
            let m: Monomial = m.parse().map_err(serde::de::Error::custom)?;
            let c: AffineCoeff = c.parse().map_err(serde::de::Error::custom)?;
            out.add_term(m, &c);
        }
        Ok(out)
    }
}

/// Integer multiplicity accumulator used by the enumeration oracles.
#[derive(Clone, Debug, Default)]
pub struct MonomialTally {
    counts: HashMap<Monomial, u64>,
}

impl MonomialTally {
    pub fn new() -> MonomialTally {
        MonomialTally::default()
    }

    pub fn add(&mut self, m: Monomial, count: u64) {
        if count == 0 {
            return;
        }
        let slot = self.counts.entry(m).or_insert(0);
        *slot = slot.checked_add(count).expect("multiplicity overflow");
    }

    pub fn merge(&mut self, other: MonomialTally) {
        if self.counts.len() < other.counts.len() {
            let mine = std::mem::replace(&mut self.counts, other.counts);
            for (m, c) in mine {
                self.add(m, c);
            }
        } else {
            for (m, c) in other.counts {
                self.add(m, c);
            }
        }
    }

    /// Adds every product of a term of `x` with a term of `y`.
    pub fn add_product(&mut self, x: &MonomialTally, y: &MonomialTally) {
        for (m1, c1) in &x.counts {
            for (m2, c2) in &y.counts {
                self.add(m1.mul(m2), c1.checked_mul(*c2).expect("multiplicity overflow"));
            }
        }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &u64)> {
        self.counts.iter()
    }

    pub fn into_polynomial(self) -> Polynomial {
        Polynomial {
            terms: self
                .counts
                .into_iter()
                .map(|(m, c)| (m, AffineCoeff::constant(Rational::from_integer(BigInt::from(c)))))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(i: u16, j: u16) -> Polynomial {
        Polynomial::var(VarId::a(i, j))
    }

    fn b(i: u16, j: u16) -> Polynomial {
        Polynomial::var(VarId::b(i, j))
    }

    #[test]
    fn var_pairs_are_canonical() {
        assert_eq!(VarId::a(2, 3), VarId::a(3, 2));
        assert_ne!(VarId::a(2, 3), VarId::b(2, 3));
        assert_eq!(VarId::a(3, 2).to_string(), "a[2,3]");
    }

    #[test]
    fn additive_inverse_cancels() {
        let m = a(1, 1).mul(&b(1, 1)).unwrap();
        assert!(m.add(&m.neg()).is_zero());
    }

    #[test]
    fn like_terms_merge() {
        let m = a(1, 1).mul(&b(1, 1)).unwrap();
        let sum = m.scale(&rat(2)).add(&m.scale(&rat(3)));
        assert_eq!(sum, m.scale(&rat(5)));
    }

    #[test]
    fn parametric_coefficients_add() {
        let m = Monomial::product_of([VarId::a(1, 1), VarId::b(1, 2)]);
        let x1 = AffineCoeff::param(ParamId(1));
        let rest = AffineCoeff::int(32).add_scaled_owned(&x1, &rat(-1));
        let p = Polynomial::term(m.clone(), x1).add(&Polynomial::term(m.clone(), rest));
        assert_eq!(p, Polynomial::term(m, AffineCoeff::int(32)));
    }

    impl AffineCoeff {
        fn add_scaled_owned(mut self, other: &AffineCoeff, f: &Rational) -> AffineCoeff {
            self.add_scaled(other, f);
            self
        }
    }

    #[test]
    fn products_canonicalize_indices() {
        assert_eq!(
            a(1, 2).mul(&b(1, 2)).unwrap().to_string(),
            "a[1,2]*b[1,2]"
        );
        let lhs = Polynomial::var(VarId::a(2, 1));
        let rhs = a(1, 2).mul(&b(2, 2)).unwrap();
        assert_eq!(lhs.mul(&rhs).unwrap().to_string(), "a[1,2]^2*b[2,2]");
        let z1 = a(1, 1).mul(&b(1, 1)).unwrap();
        let z12 = a(1, 2).mul(&b(1, 2)).unwrap();
        assert_eq!(
            z1.mul(&z12).unwrap().to_string(),
            "a[1,1]*a[1,2]*b[1,1]*b[1,2]"
        );
    }

    #[test]
    fn parameter_products_are_rejected() {
        let p = Polynomial::term(Monomial::one(), AffineCoeff::param(ParamId(1)));
        let q = Polynomial::term(Monomial::var(VarId::a(1, 1)), AffineCoeff::param(ParamId(2)));
        assert_eq!(p.mul(&q), Err(PolyError::ParameterDegreeOverflow));
        assert!(p.mul(&a(1, 1)).is_ok());
    }

    #[test]
    fn scalar_evaluation() {
        let p = a(1, 1)
            .mul(&a(1, 1))
            .unwrap()
            .mul(&b(1, 1).mul(&b(1, 1)).unwrap())
            .unwrap()
            .scale(&rat(6));
        let mut asg = Assignment::new();
        asg.insert(VarId::a(1, 1), rat(1));
        asg.insert(VarId::b(1, 1), rat(2));
        assert_eq!(p.evaluate(&asg).unwrap(), rat(24));
    }

    #[test]
    fn evaluation_errors() {
        let p = Polynomial::term(Monomial::var(VarId::a(1, 1)), AffineCoeff::param(ParamId(3)));
        let mut asg = Assignment::new();
        asg.insert(VarId::a(1, 1), rat(1));
        assert_eq!(p.evaluate(&asg), Err(PolyError::UnboundParameter(ParamId(3))));
        assert_eq!(
            a(1, 2).evaluate(&asg),
            Err(PolyError::UnboundVariable(VarId::a(1, 2)))
        );
    }

    #[test]
    fn partial_substitution_keeps_free_variables() {
        let p = a(1, 1).mul(&b(1, 2)).unwrap().scale(&rat(3));
        let mut asg = Assignment::new();
        asg.insert(VarId::a(1, 1), rat_frac(1, 2));
        assert_eq!(p.substitute(&asg), b(1, 2).scale(&rat_frac(3, 2)));
    }

    #[test]
    fn text_forms() {
        let c: AffineCoeff = "24 - x1 + 2*x4".parse().unwrap();
        assert_eq!(c.to_string(), "24 - x1 + 2*x4");
        let c: AffineCoeff = "-1/2".parse().unwrap();
        assert_eq!(c, AffineCoeff::constant(rat_frac(-1, 2)));
        let c: AffineCoeff = "-x3".parse().unwrap();
        assert_eq!(c.to_string(), "-x3");
        let m: Monomial = "a[2,1]^2*b[1,2]*b[2,2]".parse().unwrap();
        assert_eq!(m.to_string(), "a[1,2]^2*b[1,2]*b[2,2]");
        assert!("c[1,1]".parse::<Monomial>().is_err());
        assert!("a[0,1]".parse::<Monomial>().is_err());
    }

    #[test]
    fn json_roundtrip() {
        let m = Monomial::product_of([VarId::a(1, 1), VarId::b(1, 2)]);
        let mut p = Polynomial::term(m, "3/2 - x4".parse().unwrap());
        p.add_term(Monomial::one(), &AffineCoeff::int(-7));
        let s = serde_json::to_string(&p).unwrap();
        let back: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn tally_converts() {
        let mut t = MonomialTally::new();
        let m = Monomial::var(VarId::a(1, 1));
        t.add(m.clone(), 2);
        t.add(m.clone(), 3);
        assert_eq!(t.total(), 5);
        assert_eq!(t.into_polynomial(), Polynomial::term(m, AffineCoeff::int(5)));
    }
}
