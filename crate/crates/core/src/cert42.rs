//! Sum-of-squares certificate for the `t^2` coefficient of `trace((A + tB)^4)`
//! with symmetric `n x n` matrices, and the necklace accounting behind it.
//!
//! The certificate is `z1ᵀ Q1 z1 + Σ_{i<j} z2(i,j)ᵀ Q2 z2(i,j)` where
//! * `z1` is indexed by the subsets of `[n]` of size one or two,
//!   `z1[{i,j}] = a{i,j} b{i,j}`, and `Q1[S][S'] = 6 |S ∩ S'|`;
//! * `z2(i,j)` has upper half `a{i,k} b{j,k}` and lower half `a{j,k} b{i,k}`
//!   for `k = 1..n`, and `Q2 = [[4J, 2J], [2J, 4J]]`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gram;
use crate::matrix::{BlockSpan, RationalMatrix};
use crate::necklace::{self, Letter, Necklace, NecklaceError, TraceProblem};
use crate::poly::{rat, Monomial, Polynomial, Rational, VarId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Cert42Error {
    #[error("n must be positive")]
    InvalidDimension,
    #[error("expected a (4,2,{n})-necklace")]
    WrongShape { n: u16 },
    #[error("audit failure at {cell}: entry {expected}, counted {actual}")]
    AuditFailure {
        cell: Cell,
        expected: u64,
        actual: u64,
    },
    #[error("audit failure: necklace {0} does not match the product of its cell's basis entries")]
    MonomialMismatch(String),
    #[error(transparent)]
    Necklace(#[from] NecklaceError),
}

/// A subset of `[n]` of size one or two. Singletons order before pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IndexSet12 {
    Single(u16),
    Pair(u16, u16),
}

impl IndexSet12 {
    /// `{i, j}` with duplicates collapsed.
    pub fn of(i: u16, j: u16) -> IndexSet12 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => IndexSet12::Single(i),
            std::cmp::Ordering::Less => IndexSet12::Pair(i, j),
            std::cmp::Ordering::Greater => IndexSet12::Pair(j, i),
        }
    }

    pub fn elements(&self) -> Vec<u16> {
        match *self {
            IndexSet12::Single(k) => vec![k],
            IndexSet12::Pair(i, j) => vec![i, j],
        }
    }

    pub fn contains(&self, k: u16) -> bool {
        self.elements().contains(&k)
    }

    pub fn intersection_size(&self, other: &IndexSet12) -> usize {
        self.elements().iter().filter(|&&k| other.contains(k)).count()
    }

    /// All index sets in basis order: singletons, then pairs lexicographically.
    pub fn all(n: u16) -> Vec<IndexSet12> {
        let mut out: Vec<IndexSet12> = (1..=n).map(IndexSet12::Single).collect();
        for i in 1..=n {
            for j in i + 1..=n {
                out.push(IndexSet12::Pair(i, j));
            }
        }
        out
    }

    /// Position of this set in [`IndexSet12::all`].
    pub fn position(&self, n: u16) -> usize {
        match *self {
            IndexSet12::Single(k) => (k - 1) as usize,
            IndexSet12::Pair(i, j) => {
                let (n, i, j) = (n as usize, i as usize, j as usize);
                // Pairs starting below i, then the offset within row i.
                let before: usize = (1..i).map(|r| n - r).sum();
                n + before + (j - i - 1)
            }
        }
    }
}

impl fmt::Display for IndexSet12 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexSet12::Single(k) => write!(f, "{{{k}}}"),
            IndexSet12::Pair(i, j) => write!(f, "{{{i},{j}}}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate42 {
    pub n: u16,
    pub q1: RationalMatrix,
    pub z1: Vec<Monomial>,
    pub q2: RationalMatrix,
    pub z2_family: BTreeMap<(u16, u16), Vec<Monomial>>,
}

impl Certificate42 {
    /// Matrices with labels plus basis vectors as monomial strings.
    pub fn to_json(&self) -> serde_json::Value {
        let family: Vec<serde_json::Value> = self
            .z2_family
            .iter()
            .map(|(&(i, j), z)| serde_json::json!({ "pair": [i, j], "z2": z }))
            .collect();
        serde_json::json!({
            "n": self.n,
            "q1": self.q1,
            "z1": self.z1,
            "q2": self.q2,
            "z2_family": family,
        })
    }
}

fn z1_entry(s: &IndexSet12) -> Monomial {
    let (i, j) = match *s {
        IndexSet12::Single(k) => (k, k),
        IndexSet12::Pair(i, j) => (i, j),
    };
    Monomial::product_of([VarId::a(i, j), VarId::b(i, j)])
}

/// `z2(i,j)`: upper half `a{i,k} b{j,k}`, lower half `a{j,k} b{i,k}`.
pub fn z2_vector(n: u16, i: u16, j: u16) -> Vec<Monomial> {
    let upper = (1..=n).map(|k| Monomial::product_of([VarId::a(i, k), VarId::b(j, k)]));
    let lower = (1..=n).map(|k| Monomial::product_of([VarId::a(j, k), VarId::b(i, k)]));
    upper.chain(lower).collect()
}

pub fn q1_matrix(n: u16) -> RationalMatrix {
    let sets = IndexSet12::all(n);
    RationalMatrix::from_fn(sets.len(), sets.len(), |r, c| {
        rat(6 * sets[r].intersection_size(&sets[c]) as i64)
    })
    .with_labels(sets.iter().map(ToString::to_string).collect())
}

pub fn q2_matrix(n: u16) -> RationalMatrix {
    let n = n as usize;
    let labels = (1..=n)
        .map(|k| format!("upper {k}"))
        .chain((1..=n).map(|k| format!("lower {k}")))
        .collect();
    RationalMatrix::from_fn(2 * n, 2 * n, |r, c| rat(if (r < n) == (c < n) { 4 } else { 2 }))
        .with_labels(labels)
        .with_blocks(vec![
            BlockSpan {
                label: "upper".into(),
                start: 0,
                len: n,
            },
            BlockSpan {
                label: "lower".into(),
                start: n,
                len: n,
            },
        ])
}

/// Incidence matrix with `U[k][S] = 1` iff `k ∈ S`, so that `Q1 = 6 UᵀU`.
pub fn incidence_u(n: u16) -> RationalMatrix {
    let sets = IndexSet12::all(n);
    RationalMatrix::from_fn(n as usize, sets.len(), |k, c| {
        rat(sets[c].contains(k as u16 + 1) as i64)
    })
}

/// The `2 x 2` factor `[[4,2],[2,4]]` with `Q2 = F ⊗ J_n`.
pub fn q2_left_factor() -> RationalMatrix {
    RationalMatrix::from_i64_rows(&[vec![4, 2], vec![2, 4]])
}

pub fn build_certificate42(n: u16) -> Result<Certificate42, Cert42Error> {
    if n == 0 {
        return Err(Cert42Error::InvalidDimension);
    }
    let z1 = IndexSet12::all(n).iter().map(z1_entry).collect();
    let mut z2_family = BTreeMap::new();
    for i in 1..=n {
        for j in i + 1..=n {
            z2_family.insert((i, j), z2_vector(n, i, j));
        }
    }
    Ok(Certificate42 {
        n,
        q1: q1_matrix(n),
        z1,
        q2: q2_matrix(n),
        z2_family,
    })
}

pub fn assemble_sos_42(c: &Certificate42) -> Polynomial {
    let mut acc = BTreeMap::new();
    gram::add_quadratic_form(&mut acc, &c.z1, &c.q1);
    for z in c.z2_family.values() {
        gram::add_quadratic_form(&mut acc, z, &c.q2);
    }
    gram::collect(acc)
}

/// The symmetrized form `z1ᵀQ1z1 + ½ Σ_{i≠j} z2(i,j)ᵀ Q2 z2(i,j)`.
pub fn assemble_symmetrized_42(c: &Certificate42) -> Polynomial {
    let mut acc = BTreeMap::new();
    gram::add_quadratic_form(&mut acc, &c.z1, &c.q1);
    let half_q2 = c.q2.scale(&crate::poly::rat_frac(1, 2));
    for i in 1..=c.n {
        for j in 1..=c.n {
            if i != j {
                gram::add_quadratic_form(&mut acc, &z2_vector(c.n, i, j), &half_q2);
            }
        }
    }
    gram::collect(acc)
}

/// Sum of all entries of `Q1` and of the `C(n,2)` copies of `Q2`.
pub fn entry_sum_42(c: &Certificate42) -> Rational {
    c.q1.entry_sum() + c.q2.entry_sum() * rat(c.z2_family.len() as i64)
}

/// Which Gram matrix a cell belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GramRef {
    Q1,
    /// The copy of `Q2` paired with `z2(i,j)`, `i < j`.
    Q2 { i: u16, j: u16 },
}

/// Quadrant of a `Q2` copy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    UpperLeft,
    UpperRight,
    LowerLeft,
    LowerRight,
}

impl Quadrant {
    fn offsets(self, n: u16) -> (usize, usize) {
        let n = n as usize;
        match self {
            Quadrant::UpperLeft => (0, 0),
            Quadrant::UpperRight => (0, n),
            Quadrant::LowerLeft => (n, 0),
            Quadrant::LowerRight => (n, n),
        }
    }
}

/// A matrix cell, with 0-based row and column inside its matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub matrix: GramRef,
    pub row: usize,
    pub col: usize,
}

impl Cell {
    fn q1(n: u16, r: IndexSet12, c: IndexSet12) -> Cell {
        Cell {
            matrix: GramRef::Q1,
            row: r.position(n),
            col: c.position(n),
        }
    }

    /// Cell `(k, l)` (1-based within the quadrant) of the given quadrant of copy `(i, j)`.
    fn q2(n: u16, i: u16, j: u16, quadrant: Quadrant, k: u16, l: u16) -> Cell {
        let (r0, c0) = quadrant.offsets(n);
        Cell {
            matrix: GramRef::Q2 { i, j },
            row: r0 + (k - 1) as usize,
            col: c0 + (l - 1) as usize,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.matrix {
            GramRef::Q1 => write!(f, "Q1[{}][{}]", self.row, self.col),
            GramRef::Q2 { i, j } => write!(f, "Q2({i},{j})[{}][{}]", self.row, self.col),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Collection {
    C1,
    C2a,
    C2b,
    C2c,
    C2d,
    C3,
    C4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CollectionTag {
    pub collection: Collection,
    pub cell: Cell,
}

/// Assigns a `(4,2,n)`-necklace to the single Gram cell that counts it.
///
/// Non-alternating necklaces (`aabb` up to rotation) have one `aa` edge and
/// one `bb` edge opposite each other, plus two balanced edges. Alternating
/// necklaces have only balanced edges; their marked pair is edges 0 and 2.
pub fn classify_necklace(k: &Necklace, n: u16) -> Result<CollectionTag, Cert42Error> {
    if k.len() != 4 || k.b_count() != 2 || k.edges().iter().any(|&e| e > n) {
        return Err(Cert42Error::WrongShape { n });
    }
    let l = k.letters();
    let e = k.edges();
    let alternating = l[0] == l[2];
    if alternating {
        if e[0] == e[2] {
            return Ok(classify_c2(n, e, [0, 2]));
        }
        // Edge 0 joins vertices 0 and 1; find their other edges.
        let (i, j) = (e[0], e[2]);
        let (a_other, b_other) = if l[0] == Letter::A { (e[3], e[1]) } else { (e[1], e[3]) };
        let cell = if i < j {
            Cell::q2(n, i, j, Quadrant::UpperRight, a_other, b_other)
        } else {
            Cell::q2(n, j, i, Quadrant::LowerLeft, a_other, b_other)
        };
        return Ok(CollectionTag {
            collection: Collection::C4,
            cell,
        });
    }
    // Edge t joins vertex t and t+1; it is aa, bb or balanced.
    let aa = (0..4).find(|&t| l[t] == Letter::A && l[(t + 1) % 4] == Letter::A).expect("aa edge");
    let bb = (aa + 2) % 4;
    let (aa_label, bb_label) = (e[aa], e[bb]);
    // Balanced edges: b -> a going forward, and a -> b.
    let ba = (aa + 3) % 4;
    let ab = (aa + 1) % 4;
    if aa_label == bb_label {
        return Ok(classify_c2(n, e, [aa.min(bb), aa.max(bb)]));
    }
    let (i, j) = (aa_label, bb_label);
    if e[ba] == e[ab] {
        let k = e[ba];
        let cell = if i < j {
            Cell::q2(n, i, j, Quadrant::UpperLeft, k, k)
        } else {
            Cell::q2(n, j, i, Quadrant::LowerRight, k, k)
        };
        return Ok(CollectionTag {
            collection: Collection::C1,
            cell,
        });
    }
    let (bi, bj) = (e[ba], e[ab]);
    let cell = if i < j {
        Cell::q2(n, i, j, Quadrant::UpperLeft, bi, bj)
    } else {
        Cell::q2(n, j, i, Quadrant::LowerRight, bi, bj)
    };
    Ok(CollectionTag {
        collection: Collection::C3,
        cell,
    })
}

/// Collection 2: a pair of opposite edges with one shared label `k`.
fn classify_c2(n: u16, e: &[u16], marked: [usize; 2]) -> CollectionTag {
    let k = e[marked[0]];
    let unmarked: Vec<usize> = (0..4).filter(|t| !marked.contains(t)).collect();
    let (p, q) = (e[unmarked[0]], e[unmarked[1]]);
    let mut distinct = e.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let collection = match distinct.len() {
        1 => Collection::C2a,
        2 if p == q => Collection::C2b,
        2 => Collection::C2c,
        _ => Collection::C2d,
    };
    CollectionTag {
        collection,
        cell: Cell::q1(n, IndexSet12::of(k, p), IndexSet12::of(k, q)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellAudit {
    pub cell: Cell,
    pub expected: u64,
    pub actual: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub n: u16,
    pub necklaces: u64,
    pub expected_total: u64,
    pub cells_checked: usize,
    pub mismatches: Vec<CellAudit>,
    /// Necklaces whose monomial differs from the product of their cell's basis entries.
    pub monomial_mismatches: Vec<String>,
    pub collection_counts: BTreeMap<Collection, u64>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
            && self.monomial_mismatches.is_empty()
            && self.necklaces == self.expected_total
    }
}

fn cell_basis(c: &Certificate42, cell: &Cell) -> (Monomial, Monomial) {
    match cell.matrix {
        GramRef::Q1 => (c.z1[cell.row].clone(), c.z1[cell.col].clone()),
        GramRef::Q2 { i, j } => {
            let z = &c.z2_family[&(i, j)];
            (z[cell.row].clone(), z[cell.col].clone())
        }
    }
}

fn cell_entry(c: &Certificate42, cell: &Cell) -> u64 {
    let v = match cell.matrix {
        GramRef::Q1 => c.q1.get(cell.row, cell.col),
        GramRef::Q2 { .. } => c.q2.get(cell.row, cell.col),
    };
    u64::try_from(v.to_integer()).expect("nonnegative integer entry")
}

/// Counts the necklaces assigned to every cell and compares with the entries.
pub fn audit_report(n: u16) -> Result<AuditReport, Cert42Error> {
    let cert = build_certificate42(n)?;
    let problem = TraceProblem::new(4, 2, n, false)?;
    necklace::enumerate_necklaces(&problem, Default::default())?;
    type Partial = (BTreeMap<Cell, u64>, BTreeMap<Collection, u64>, Vec<String>, u64);
    let patterns = necklace::letter_patterns(4, 2);
    let (counts, collections, monomial_mismatches, total): Partial = patterns
        .par_iter()
        .map(|pat| {
            let mut part: Partial = Default::default();
            for k in necklace::pattern_necklaces(&problem, pat, false) {
                let tag = classify_necklace(&k, n).expect("valid shape");
                *part.0.entry(tag.cell).or_default() += 1;
                *part.1.entry(tag.collection).or_default() += 1;
                let (x, y) = cell_basis(&cert, &tag.cell);
                if Some(x.mul(&y)) != k.monomial(false) {
                    part.2.push(k.to_string());
                }
                part.3 += 1;
            }
            part
        })
        .reduce(Default::default, |mut a, b| {
            for (c, v) in b.0 {
                *a.0.entry(c).or_default() += v;
            }
            for (c, v) in b.1 {
                *a.1.entry(c).or_default() += v;
            }
            a.2.extend(b.2);
            a.3 += b.3;
            a
        });
    let mut all_cells: Vec<Cell> = Vec::new();
    let d1 = cert.q1.rows();
    for row in 0..d1 {
        for col in 0..d1 {
            all_cells.push(Cell {
                matrix: GramRef::Q1,
                row,
                col,
            });
        }
    }
    for &(i, j) in cert.z2_family.keys() {
        for row in 0..cert.q2.rows() {
            for col in 0..cert.q2.cols() {
                all_cells.push(Cell {
                    matrix: GramRef::Q2 { i, j },
                    row,
                    col,
                });
            }
        }
    }
    let mut mismatches: Vec<CellAudit> = all_cells
        .iter()
        .map(|cell| CellAudit {
            cell: *cell,
            expected: cell_entry(&cert, cell),
            actual: counts.get(cell).copied().unwrap_or(0),
        })
        .filter(|a| a.expected != a.actual)
        .collect();
    // Cells outside the certificate would be a classifier bug.
    for (cell, &actual) in &counts {
        if !all_cells.contains(cell) {
            mismatches.push(CellAudit {
                cell: *cell,
                expected: 0,
                actual,
            });
        }
    }
    let mut monomial_mismatches = monomial_mismatches;
    monomial_mismatches.sort();
    Ok(AuditReport {
        n,
        necklaces: total,
        expected_total: 6 * (n as u64).pow(4),
        cells_checked: all_cells.len(),
        mismatches,
        monomial_mismatches,
        collection_counts: collections,
    })
}

/// [`audit_report`], failing with the first mismatch.
pub fn accounting_audit(n: u16) -> Result<AuditReport, Cert42Error> {
    let report = audit_report(n)?;
    if let Some(m) = report.mismatches.first() {
        return Err(Cert42Error::AuditFailure {
            cell: m.cell,
            expected: m.expected,
            actual: m.actual,
        });
    }
    if let Some(k) = report.monomial_mismatches.first() {
        return Err(Cert42Error::MonomialMismatch(k.clone()));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::necklace::{trace_coeff_matrix, trace_coeff_necklace};
    use Letter::{A as a, B as b};

    #[test]
    fn index_positions() {
        for n in 1..=6 {
            for (pos, s) in IndexSet12::all(n).iter().enumerate() {
                assert_eq!(s.position(n), pos);
            }
        }
        assert_eq!(IndexSet12::of(3, 2), IndexSet12::Pair(2, 3));
        assert_eq!(IndexSet12::Pair(1, 2).to_string(), "{1,2}");
    }

    #[test]
    fn scalar_certificate() {
        let c = build_certificate42(1).unwrap();
        assert_eq!(c.q1, RationalMatrix::from_i64_rows(&[vec![6]]).with_labels(vec!["{1}".into()]));
        assert_eq!(c.z1, vec![Monomial::product_of([VarId::a(1, 1), VarId::b(1, 1)])]);
        assert!(c.z2_family.is_empty());
        let expected = Polynomial::term(
            Monomial::from_factors([(VarId::a(1, 1), 2), (VarId::b(1, 1), 2)]),
            6.into(),
        );
        assert_eq!(assemble_sos_42(&c), expected);
        assert!(build_certificate42(0).is_err());
    }

    #[test]
    fn identity_small_n() {
        let p2 = TraceProblem::new(4, 2, 2, false).unwrap();
        assert_eq!(
            assemble_sos_42(&build_certificate42(2).unwrap()),
            trace_coeff_necklace(&p2, Default::default()).unwrap()
        );
        let p3 = TraceProblem::new(4, 2, 3, false).unwrap();
        assert_eq!(
            assemble_sos_42(&build_certificate42(3).unwrap()),
            trace_coeff_matrix(&p3, Default::default()).unwrap()
        );
    }

    #[test]
    fn symmetrized_variant_agrees() {
        for n in 1..=4 {
            let c = build_certificate42(n).unwrap();
            assert_eq!(assemble_symmetrized_42(&c), assemble_sos_42(&c));
        }
    }

    #[test]
    fn entry_sums() {
        for n in 1..=8u16 {
            let c = build_certificate42(n).unwrap();
            let n64 = n as i64;
            assert_eq!(entry_sum_42(&c), rat(6 * n64.pow(4)));
        }
    }

    #[test]
    fn figure_ten_cells() {
        let n = 3;
        let first = Necklace::new(vec![a, a, b, b], vec![2, 2, 2, 3]).unwrap();
        let tag = classify_necklace(&first, n).unwrap();
        assert_eq!(tag.cell, Cell::q1(n, IndexSet12::Single(2), IndexSet12::Pair(2, 3)));
        assert!(matches!(tag.collection, Collection::C2c));
        let second = Necklace::new(vec![a, b, a, b], vec![2, 2, 3, 2]).unwrap();
        let tag = classify_necklace(&second, n).unwrap();
        assert_eq!(tag.collection, Collection::C4);
        assert_eq!(tag.cell, Cell::q2(n, 2, 3, Quadrant::UpperRight, 2, 2));
    }

    #[test]
    fn alternating_necklaces_share_a_cell() {
        let n = 5;
        let cell = Cell::q2(n, 1, 3, Quadrant::UpperRight, 5, 2);
        for k in [
            Necklace::new(vec![a, b, a, b], vec![1, 2, 3, 5]).unwrap(),
            Necklace::new(vec![b, a, b, a], vec![1, 5, 3, 2]).unwrap(),
        ] {
            let tag = classify_necklace(&k, n).unwrap();
            assert_eq!(tag.collection, Collection::C4);
            assert_eq!(tag.cell, cell);
        }
    }

    #[test]
    fn uniform_alternating_is_c2a() {
        let k = Necklace::new(vec![b, a, b, a], vec![2, 2, 2, 2]).unwrap();
        let tag = classify_necklace(&k, 3).unwrap();
        assert_eq!(tag.collection, Collection::C2a);
        assert_eq!(tag.cell, Cell::q1(3, IndexSet12::Single(2), IndexSet12::Single(2)));
    }

    #[test]
    fn c1_has_matching_balanced_labels() {
        let problem = TraceProblem::new(4, 2, 3, false).unwrap();
        for k in necklace::enumerate_necklaces(&problem, Default::default()).unwrap() {
            let tag = classify_necklace(&k, 3).unwrap();
            if tag.collection == Collection::C1 {
                let bal: Vec<u16> = (0..4).filter(|&t| k.is_balanced(t)).map(|t| k.edges()[t]).collect();
                let unbal: Vec<u16> = (0..4).filter(|&t| !k.is_balanced(t)).map(|t| k.edges()[t]).collect();
                assert_eq!(bal.len(), 2);
                assert_eq!(bal[0], bal[1]);
                assert_ne!(unbal[0], unbal[1]);
            }
        }
    }

    #[test]
    fn audits_are_clean() {
        let r1 = accounting_audit(1).unwrap();
        assert_eq!(r1.necklaces, 6);
        assert_eq!(r1.cells_checked, 1);
        for n in 2..=3 {
            let r = accounting_audit(n).unwrap();
            assert!(r.is_clean());
            assert_eq!(r.necklaces, 6 * (n as u64).pow(4));
        }
    }

    #[test]
    fn incidence_factor() {
        for n in 1..=4 {
            let u = incidence_u(n);
            assert_eq!(u.transpose().mul(&u).unwrap().scale(&rat(6)), q1_matrix(n).bare());
            assert_eq!(q2_left_factor().kron(&RationalMatrix::all_ones(n as usize, n as usize)), q2_matrix(n).bare());
        }
    }
}
