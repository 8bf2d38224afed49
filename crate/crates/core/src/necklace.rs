//! Necklaces and the two independent expansions of the `t^r` coefficient of
//! `trace((A + tB)^m)`.
//!
//! A necklace of length `m` carries a letter (`a` or `b`) on each vertex and
//! an index in `1..=n` on each edge. `edges[t]` joins vertex `t` and vertex
//! `t + 1 (mod m)`, so vertex `t` is flanked by `edges[t - 1]` and `edges[t]`
//! and contributes the variable `letter{edges[t-1], edges[t]}`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{Kind, Monomial, MonomialTally, Polynomial, VarId};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NecklaceError {
    #[error("invalid trace problem: {0}")]
    InvalidProblem(String),
    #[error("invalid necklace: {0}")]
    InvalidNecklace(String),
    #[error("enumeration needs {required} visits, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    pub fn kind(self) -> Kind {
        match self {
            Letter::A => Kind::A,
            Letter::B => Kind::B,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Letter::A => "a",
            Letter::B => "b",
        })
    }
}

/// Parses a word such as `"abab"` or `"ABAB"`.
pub fn parse_word(s: &str) -> Result<Vec<Letter>, NecklaceError> {
    s.chars()
        .map(|c| match c {
            'a' | 'A' => Ok(Letter::A),
            'b' | 'B' => Ok(Letter::B),
            other => Err(NecklaceError::InvalidNecklace(format!(
                "unknown letter `{other}`"
            ))),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Necklace {
    letters: Vec<Letter>,
    edges: Vec<u16>,
}

impl Necklace {
    pub fn new(letters: Vec<Letter>, edges: Vec<u16>) -> Result<Necklace, NecklaceError> {
        if letters.is_empty() || letters.len() != edges.len() {
            return Err(NecklaceError::InvalidNecklace(format!(
                "{} letters but {} edges",
                letters.len(),
                edges.len()
            )));
        }
        if edges.contains(&0) {
            return Err(NecklaceError::InvalidNecklace(
                "edge labels are 1-based".into(),
            ));
        }
        Ok(Necklace { letters, edges })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn edges(&self) -> &[u16] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn b_count(&self) -> usize {
        self.letters.iter().filter(|&&l| l == Letter::B).count()
    }

    /// Edge labels on either side of vertex `t`.
    pub fn flanks(&self, t: usize) -> (u16, u16) {
        let m = self.len();
        (self.edges[(t + m - 1) % m], self.edges[t])
    }

    /// An edge is balanced when its two endpoint letters differ.
    pub fn is_balanced(&self, edge: usize) -> bool {
        let m = self.len();
        self.letters[edge] != self.letters[(edge + 1) % m]
    }

    /// Rotates vertices and edges together by `k` positions.
    pub fn rotated(&self, k: usize) -> Necklace {
        let m = self.len();
        Necklace {
            letters: (0..m).map(|t| self.letters[(t + k) % m]).collect(),
            edges: (0..m).map(|t| self.edges[(t + k) % m]).collect(),
        }
    }

    /// Relabels edge indices through `perm` (`perm[i - 1]` is the image of `i`).
    pub fn relabeled(&self, perm: &[u16]) -> Necklace {
        Necklace {
            letters: self.letters.clone(),
            edges: self.edges.iter().map(|&e| perm[(e - 1) as usize]).collect(),
        }
    }

    /// The monomial of this necklace, or `None` when `diagonal_a` forces it to zero.
    pub fn monomial(&self, diagonal_a: bool) -> Option<Monomial> {
        let mut vars = Vec::with_capacity(self.len());
        for t in 0..self.len() {
            let (l, r) = self.flanks(t);
            let letter = self.letters[t];
            if diagonal_a && letter == Letter::A && l != r {
                return None;
            }
            vars.push(VarId::new(letter.kind(), l, r));
        }
        Some(Monomial::product_of(vars))
    }
}

impl fmt::Display for Necklace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        write!(f, " |")?;
        for e in &self.edges {
            write!(f, " {e}")?;
        }
        Ok(())
    }
}

/// Coefficient of `t^r` in `trace((A + tB)^m)` with `n x n` matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceProblem {
    pub m: usize,
    pub r: usize,
    pub n: u16,
    pub diagonal_a: bool,
}

impl TraceProblem {
    pub fn new(m: usize, r: usize, n: u16, diagonal_a: bool) -> Result<TraceProblem, NecklaceError> {
        if m == 0 || !m.is_multiple_of(2) {
            return Err(NecklaceError::InvalidProblem(format!(
                "m must be even and positive, got {m}"
            )));
        }
        if !r.is_multiple_of(2) || r > m {
            return Err(NecklaceError::InvalidProblem(format!(
                "r must be even with 0 <= r <= m, got r={r}, m={m}"
            )));
        }
        if n == 0 {
            return Err(NecklaceError::InvalidProblem("n must be positive".into()));
        }
        Ok(TraceProblem { m, r, n, diagonal_a })
    }

    /// The problem with the roles of `A` and `B` exchanged.
    pub fn swapped(&self) -> TraceProblem {
        TraceProblem {
            r: self.m - self.r,
            ..*self
        }
    }
}

impl fmt::Display for TraceProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.m, self.r, self.n)?;
        if self.diagonal_a {
            write!(f, " diagonal A")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumOptions {
    pub budget: u64,
    pub skip_zero: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            budget: DEFAULT_BUDGET,
            skip_zero: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub budget: u64,
    /// `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            budget: DEFAULT_BUDGET,
            workers: None,
        }
    }
}

pub(crate) fn run_with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All letter patterns of length `m` with exactly `r` b's, lexicographic with a < b.
pub fn letter_patterns(m: usize, r: usize) -> Vec<Vec<Letter>> {
    fn rec(pos: usize, m: usize, left: usize, cur: &mut Vec<Letter>, out: &mut Vec<Vec<Letter>>) {
        if pos == m {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if m - pos > left {
            cur.push(Letter::A);
            rec(pos + 1, m, left, cur, out);
            cur.pop();
        }
        if left > 0 {
            cur.push(Letter::B);
            rec(pos + 1, m, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r <= m {
        rec(0, m, r, &mut Vec::with_capacity(m), &mut out);
    }
    out
}

/// Groups edges that must carry equal labels. With a diagonal `A`, both edges
/// around an `a` vertex must agree; otherwise every edge is free.
fn edge_classes(letters: &[Letter], tie_a: bool) -> Vec<Vec<usize>> {
    let m = letters.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    if tie_a {
        for t in 0..m {
            if letters[t] == Letter::A {
                let (x, y) = (find(&mut parent, (t + m - 1) % m), find(&mut parent, t));
                if x != y {
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_to_class = vec![usize::MAX; m];
    for e in 0..m {
        let root = find(&mut parent, e);
        if root_to_class[root] == usize::MAX {
            root_to_class[root] = classes.len();
            classes.push(Vec::new());
        }
        classes[root_to_class[root]].push(e);
    }
    classes
}

fn prune_zero(p: &TraceProblem, opts_skip_zero: bool) -> bool {
    p.diagonal_a && opts_skip_zero
}

/// Number of necklaces the enumeration visits.
pub fn necklace_count(p: &TraceProblem, skip_zero: bool) -> u128 {
    let tie = prune_zero(p, skip_zero);
    letter_patterns(p.m, p.r)
        .iter()
        .map(|pat| (p.n as u128).saturating_pow(edge_classes(pat, tie).len() as u32))
        .fold(0u128, |acc, x| acc.saturating_add(x))
}

fn check_budget(p: &TraceProblem, skip_zero: bool, budget: u64) -> Result<(), NecklaceError> {
    let required = necklace_count(p, skip_zero);
    if required > budget as u128 {
        return Err(NecklaceError::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// Streams every necklace of `p`. Letter patterns form the outer loop; edge
/// labels advance like an odometer with the last edge fastest.
pub fn enumerate_necklaces(
    p: &TraceProblem,
    opts: EnumOptions,
) -> Result<NecklaceIter, NecklaceError> {
    check_budget(p, opts.skip_zero, opts.budget)?;
    Ok(NecklaceIter::new(
        letter_patterns(p.m, p.r),
        p.n,
        prune_zero(p, opts.skip_zero),
    ))
}

/// Necklaces of `p` sharing one letter pattern, in odometer order. Used to
/// partition enumeration across workers.
pub fn pattern_necklaces(p: &TraceProblem, pattern: &[Letter], skip_zero: bool) -> NecklaceIter {
    NecklaceIter::new(vec![pattern.to_vec()], p.n, prune_zero(p, skip_zero))
}

pub struct NecklaceIter {
    patterns: Vec<Vec<Letter>>,
    n: u16,
    tie_a: bool,
    pattern: usize,
    classes: Vec<Vec<usize>>,
    values: Vec<u16>,
    fresh: bool,
}

impl NecklaceIter {
    fn new(patterns: Vec<Vec<Letter>>, n: u16, tie_a: bool) -> NecklaceIter {
        let mut it = NecklaceIter {
            patterns,
            n,
            tie_a,
            pattern: 0,
            classes: Vec::new(),
            values: Vec::new(),
            fresh: true,
        };
        it.load_pattern();
        it
    }

    fn load_pattern(&mut self) {
        if let Some(pat) = self.patterns.get(self.pattern) {
            self.classes = edge_classes(pat, self.tie_a);
            self.values = vec![1; self.classes.len()];
            self.fresh = true;
        }
    }

    fn current(&self) -> Necklace {
        let letters = self.patterns[self.pattern].clone();
        let mut edges = vec![0u16; letters.len()];
        for (class, &v) in self.classes.iter().zip(&self.values) {
            for &e in class {
                edges[e] = v;
            }
        }
        Necklace { letters, edges }
    }

    fn advance(&mut self) -> bool {
        for idx in (0..self.values.len()).rev() {
            if self.values[idx] < self.n {
                self.values[idx] += 1;
                return true;
            }
            self.values[idx] = 1;
        }
        false
    }
}

impl Iterator for NecklaceIter {
    type Item = Necklace;

    fn next(&mut self) -> Option<Necklace> {
        loop {
            if self.pattern >= self.patterns.len() {
                return None;
            }
            if self.fresh {
                self.fresh = false;
                return Some(self.current());
            }
            if self.advance() {
                return Some(self.current());
            }
            self.pattern += 1;
            self.load_pattern();
        }
    }
}

/// Expands the trace coefficient term by term, one necklace per term.
pub fn trace_coeff_necklace(
    p: &TraceProblem,
    opts: OracleOptions,
) -> Result<Polynomial, NecklaceError> {
    Ok(necklace_tally(p, opts)?.into_polynomial())
}

pub(crate) fn necklace_tally(
    p: &TraceProblem,
    opts: OracleOptions,
) -> Result<MonomialTally, NecklaceError> {
    check_budget(p, true, opts.budget)?;
    let patterns = letter_patterns(p.m, p.r);
    let (n, diagonal_a) = (p.n, p.diagonal_a);
    let tally = run_with_workers(opts.workers, || {
        patterns
            .par_iter()
            .map(|pat| {
                let mut local = MonomialTally::new();
                let it = NecklaceIter::new(vec![pat.clone()], n, diagonal_a);
                for k in it {
                    if let Some(mono) = k.monomial(diagonal_a) {
                        local.add(mono, 1);
                    }
                }
                local
            })
            .reduce(MonomialTally::new, |mut x, y| {
                x.merge(y);
                x
            })
    });
    Ok(tally)
}

type TallyMatrix = Vec<Vec<MonomialTally>>;

fn empty_matrix(n: usize) -> TallyMatrix {
    (0..n).map(|_| (0..n).map(|_| MonomialTally::new()).collect()).collect()
}

fn letter_matrix(kind: Kind, n: u16, diagonal_only: bool) -> TallyMatrix {
    let mut out = empty_matrix(n as usize);
    for i in 1..=n {
        for j in 1..=n {
            if diagonal_only && i != j {
                continue;
            }
            out[(i - 1) as usize][(j - 1) as usize].add(Monomial::var(VarId::new(kind, i, j)), 1);
        }
    }
    out
}

/// `x * L` where `L` is the symbolic matrix of one letter.
fn mul_by_letter(x: &TallyMatrix, kind: Kind, diagonal_only: bool) -> TallyMatrix {
    let n = x.len();
    x.par_iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    let mut cell = MonomialTally::new();
                    let ls: Vec<usize> = if diagonal_only { vec![j] } else { (0..n).collect() };
                    for l in ls {
                        let v = Monomial::var(VarId::new(kind, (l + 1) as u16, (j + 1) as u16));
                        for (m, c) in row[l].iter() {
                            cell.add(m.mul(&v), *c);
                        }
                    }
                    cell
                })
                .collect()
        })
        .collect()
}

fn add_matrix(x: &mut TallyMatrix, y: TallyMatrix) {
    for (rx, ry) in x.iter_mut().zip(y) {
        for (cx, cy) in rx.iter_mut().zip(ry) {
            cx.merge(cy);
        }
    }
}

/// Slices of `(A + tB)^h` by number of `B` factors, keeping only slices that
/// can still contribute to the `t^r` coefficient of the `m`-th power.
fn power_slices(p: &TraceProblem, h: usize) -> Vec<Option<TallyMatrix>> {
    let max_a = p.m - p.r;
    let mut slices: Vec<Option<TallyMatrix>> = (0..=p.r).map(|_| None).collect();
    if max_a >= 1 {
        slices[0] = Some(letter_matrix(Kind::A, p.n, p.diagonal_a));
    }
    if p.r >= 1 {
        slices[1] = Some(letter_matrix(Kind::B, p.n, false));
    }
    for k in 1..h {
        let mut next: Vec<Option<TallyMatrix>> = (0..=p.r).map(|_| None).collect();
        for s in 0..=p.r.min(k + 1) {
            let a_count = k + 1 - s;
            if a_count > max_a {
                continue;
            }
            let mut acc: Option<TallyMatrix> = None;
            if let Some(prev) = slices[s].as_ref().filter(|_| a_count >= 1) {
                acc = Some(mul_by_letter(prev, Kind::A, p.diagonal_a));
            }
            if s >= 1 {
                if let Some(prev) = &slices[s - 1] {
                    let term = mul_by_letter(prev, Kind::B, false);
                    match acc.as_mut() {
                        Some(a) => add_matrix(a, term),
                        None => acc = Some(term),
                    }
                }
            }
            next[s] = acc;
        }
        slices = next;
    }
    slices
}

/// Independent expansion through symbolic matrix powers: computes the slices of
/// `(A + tB)^(m/2)` and pairs them up under the trace.
pub fn trace_coeff_matrix(
    p: &TraceProblem,
    opts: OracleOptions,
) -> Result<Polynomial, NecklaceError> {
    check_budget(p, true, opts.budget)?;
    let half = p.m / 2;
    let n = p.n as usize;
    let p = *p;
    let tally = run_with_workers(opts.workers, move || {
        let slices = power_slices(&p, half);
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut local = MonomialTally::new();
                for s in 0..=p.r {
                    let (Some(x), Some(y)) = (
                        slices[s].as_ref(),
                        slices.get(p.r - s).and_then(|o| o.as_ref()),
                    ) else {
                        continue;
                    };
                    for j in 0..n {
                        local.add_product(&x[i][j], &y[j][i]);
                    }
                }
                local
            })
            .reduce(MonomialTally::new, |mut x, y| {
                x.merge(y);
                x
            })
    });
    Ok(tally.into_polynomial())
}

/// `sum_{i,j} ((A^(m/2))_{i,j})^2`, the `t^0` coefficient written as squares.
pub fn expand_square_formula(m: usize, n: u16) -> Result<Polynomial, NecklaceError> {
    if m == 0 || !m.is_multiple_of(2) {
        return Err(NecklaceError::InvalidProblem(format!(
            "m must be even and positive, got {m}"
        )));
    }
    if n == 0 {
        return Err(NecklaceError::InvalidProblem("n must be positive".into()));
    }
    let mut walks = letter_matrix(Kind::A, n, false);
    for _ in 1..m / 2 {
        walks = mul_by_letter(&walks, Kind::A, false);
    }
    let mut out = MonomialTally::new();
    for row in &walks {
        for cell in row {
            out.add_product(cell, cell);
        }
    }
    Ok(out.into_polynomial())
}

/// Trace of the product of symbolic symmetric matrices spelled by `word`.
pub fn word_trace(word: &[Letter], n: u16) -> Result<Polynomial, NecklaceError> {
    let (first, rest) = word
        .split_first()
        .ok_or_else(|| NecklaceError::InvalidNecklace("empty word".into()))?;
    if n == 0 {
        return Err(NecklaceError::InvalidProblem("n must be positive".into()));
    }
    let mut acc = letter_matrix(first.kind(), n, false);
    for l in rest {
        acc = mul_by_letter(&acc, l.kind(), false);
    }
    let mut out = MonomialTally::new();
    for (i, row) in acc.into_iter().enumerate() {
        if let Some(cell) = row.into_iter().nth(i) {
            out.merge(cell);
        }
    }
    Ok(out.into_polynomial())
}

/// Trace of `S_{m,r}(A,B)`, the sum of all words with `r` B's and `m - r` A's.
pub fn word_sum_trace(m: usize, r: usize, n: u16) -> Result<Polynomial, NecklaceError> {
    let mut acc = Polynomial::zero();
    for w in letter_patterns(m, r) {
        acc = acc.add(&word_trace(&w, n)?);
    }
    Ok(acc)
}

/// Relabels the matrix indices of every variable through `perm`.
pub fn relabel_polynomial(p: &Polynomial, perm: &[u16]) -> Polynomial {
    p.map_vars(|v| {
        let (i, j) = v.pair();
        VarId::new(v.kind(), perm[(i - 1) as usize], perm[(j - 1) as usize])
    })
}

/// Exchanges the roles of `a` and `b` variables.
pub fn swap_kinds(p: &Polynomial) -> Polynomial {
    p.map_vars(|v| v.with_kind(v.kind().swapped()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, Assignment};
    use Letter::{A as a, B as b};

    fn problem(m: usize, r: usize, n: u16) -> TraceProblem {
        TraceProblem::new(m, r, n, false).unwrap()
    }

    #[test]
    fn counts_match_binomial_formula() {
        let count = |p: &TraceProblem| enumerate_necklaces(p, EnumOptions::default()).unwrap().count();
        assert_eq!(count(&problem(4, 2, 3)), 486);
        assert_eq!(count(&problem(4, 0, 1)), 1);
        assert_eq!(count(&problem(8, 4, 2)), 17920);
    }

    #[test]
    fn diagonal_counts_are_conserved() {
        let p = TraceProblem::new(8, 4, 2, true).unwrap();
        let all: Vec<Necklace> = enumerate_necklaces(&p, EnumOptions::default()).unwrap().collect();
        let kept = all.iter().filter(|k| k.monomial(true).is_some()).count();
        let skipped: Vec<Necklace> = enumerate_necklaces(
            &p,
            EnumOptions {
                skip_zero: true,
                ..Default::default()
            },
        )
        .unwrap()
        .collect();
        assert_eq!(all.len(), 17920);
        assert_eq!(kept, skipped.len());
        assert_eq!(kept, 70 * 16);
        let filtered: Vec<Necklace> = all.into_iter().filter(|k| k.monomial(true).is_some()).collect();
        assert_eq!(filtered, skipped, "skip_zero keeps the streaming order");
    }

    #[test]
    fn budget_is_enforced() {
        let p = problem(8, 4, 9);
        let err = enumerate_necklaces(&p, EnumOptions { budget: 1000, skip_zero: false }).err();
        assert!(matches!(err, Some(NecklaceError::BudgetExceeded { .. })));
    }

    #[test]
    fn invalid_problems_are_rejected() {
        assert!(TraceProblem::new(3, 2, 2, false).is_err());
        assert!(TraceProblem::new(4, 1, 2, false).is_err());
        assert!(TraceProblem::new(4, 6, 2, false).is_err());
        assert!(TraceProblem::new(4, 2, 0, false).is_err());
    }

    #[test]
    fn figure_three_monomials() {
        let first = Necklace::new(vec![a, a, b, b], vec![2, 4, 5, 9]).unwrap();
        let expected = Monomial::product_of([VarId::a(9, 2), VarId::a(2, 4), VarId::b(4, 5), VarId::b(5, 9)]);
        assert_eq!(first.monomial(false), Some(expected));
        let second = Necklace::new(vec![a, b, b, a], vec![9, 5, 4, 2]).unwrap();
        assert_eq!(second.monomial(false), first.monomial(false));

        let fifth = Necklace::new(vec![a, a, b, b], vec![5, 6, 5, 5]).unwrap();
        let sixth = Necklace::new(vec![a, b, a, b], vec![5, 6, 5, 5]).unwrap();
        let expected = Monomial::product_of([VarId::a(5, 5), VarId::a(5, 6), VarId::b(6, 5), VarId::b(5, 5)]);
        assert_eq!(fifth.monomial(false), Some(expected.clone()));
        assert_eq!(sixth.monomial(false), Some(expected));
    }

    #[test]
    fn uniform_alternating_necklace_diagonal() {
        let k = Necklace::new(vec![a, b, a, b], vec![7, 7, 7, 7]).unwrap();
        let expected = Monomial::from_factors([(VarId::a(7, 7), 2), (VarId::b(7, 7), 2)]);
        assert_eq!(k.monomial(true), Some(expected));
        let off = Necklace::new(vec![a, b, a, b], vec![7, 6, 7, 7]).unwrap();
        assert_eq!(off.monomial(true), None);
    }

    #[test]
    fn rotation_preserves_monomial() {
        let k = Necklace::new(vec![a, b, b, a, b, a], vec![1, 3, 2, 2, 3, 1]).unwrap();
        for s in 0..6 {
            assert_eq!(k.rotated(s).monomial(false), k.monomial(false));
        }
    }

    #[test]
    fn balanced_edges() {
        let k = Necklace::new(vec![a, a, b, b], vec![2, 4, 5, 9]).unwrap();
        let balanced: Vec<bool> = (0..4).map(|e| k.is_balanced(e)).collect();
        assert_eq!(balanced, vec![false, true, false, true]);
    }

    #[test]
    fn scalar_case() {
        let expected = Polynomial::term(
            Monomial::from_factors([(VarId::a(1, 1), 2), (VarId::b(1, 1), 2)]),
            6.into(),
        );
        let p = problem(4, 2, 1);
        assert_eq!(trace_coeff_necklace(&p, Default::default()).unwrap(), expected);
        assert_eq!(trace_coeff_matrix(&p, Default::default()).unwrap(), expected);
    }

    #[test]
    fn oracles_agree_small() {
        for (m, r, n, d) in [(4, 2, 2, false), (4, 0, 2, false), (6, 2, 2, false), (8, 4, 3, true), (6, 4, 2, true)] {
            let p = TraceProblem::new(m, r, n, d).unwrap();
            assert_eq!(
                trace_coeff_necklace(&p, Default::default()).unwrap(),
                trace_coeff_matrix(&p, Default::default()).unwrap(),
                "{p}"
            );
        }
    }

    #[test]
    fn square_formula_cases() {
        let expected = Polynomial::term(Monomial::from_factors([(VarId::a(1, 1), 2)]), 1.into());
        assert_eq!(expand_square_formula(2, 1).unwrap(), expected);
        assert_eq!(
            expand_square_formula(4, 2).unwrap(),
            trace_coeff_necklace(&problem(4, 0, 2), Default::default()).unwrap()
        );
        assert_eq!(
            expand_square_formula(6, 2).unwrap(),
            trace_coeff_matrix(&problem(6, 0, 2), Default::default()).unwrap()
        );
        assert!(expand_square_formula(3, 2).is_err());
    }

    fn counterexample_assignment() -> Assignment {
        let a_m = vec![vec![rat(1), rat(-3)], vec![rat(-3), rat(1)]];
        let b_m = vec![vec![rat(2), rat(0)], vec![rat(0), rat(-1)]];
        crate::poly::matrix_assignment(&a_m, &b_m)
    }

    #[test]
    fn counterexample_values() {
        let asg = counterexample_assignment();
        let abab = word_trace(&[a, b, a, b], 2).unwrap();
        assert_eq!(abab.evaluate(&asg).unwrap(), rat(-31));
        let coeff = trace_coeff_necklace(&problem(4, 2, 2), Default::default()).unwrap();
        assert_eq!(coeff.evaluate(&asg).unwrap(), rat(138));
    }

    #[test]
    fn word_sum_matches_coefficient() {
        assert_eq!(
            word_sum_trace(4, 2, 2).unwrap(),
            trace_coeff_necklace(&problem(4, 2, 2), Default::default()).unwrap()
        );
        let aabb = word_trace(&[a, a, b, b], 1).unwrap();
        assert_eq!(
            aabb,
            Polynomial::monomial(Monomial::from_factors([(VarId::a(1, 1), 2), (VarId::b(1, 1), 2)]))
        );
    }

    #[test]
    fn coefficient_mass_counts_necklaces() {
        let p = problem(4, 2, 3);
        let poly = trace_coeff_necklace(&p, Default::default()).unwrap();
        assert_eq!(poly.coefficient_mass(), crate::poly::AffineCoeff::int(486));
        let d = TraceProblem::new(8, 4, 3, true).unwrap();
        let poly = trace_coeff_necklace(&d, Default::default()).unwrap();
        assert_eq!(poly.coefficient_mass(), crate::poly::AffineCoeff::int(70 * 81));
    }

    #[test]
    fn degrees_equal_m() {
        let poly = trace_coeff_necklace(&problem(6, 2, 2), Default::default()).unwrap();
        for m in poly.monomials() {
            assert_eq!(m.degree(), 6);
            assert_eq!(m.degree_in(Kind::B), 2);
        }
    }
}
