//! Exact positive-semidefiniteness certificates over the rationals.
//!
//! Every certificate carries a witness that [`PsdCertificate::replay`] can
//! re-verify against the matrix from scratch.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::RationalMatrix;
use crate::poly::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PsdError {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("factor mismatch at entry ({row}, {col})")]
    FactorMismatch { row: usize, col: usize },
    #[error("negative scale {0} in Gram factor")]
    NegativeScale(String),
    #[error("matrix is not the Kronecker product of the given factors")]
    NotAKroneckerProduct,
    #[error("leading block is singular (zero pivot at {0})")]
    SingularLeadingBlock(usize),
    #[error("not positive semidefinite: {0}")]
    NotPsd(String),
    #[error("zero pivot at {0}; LDLT applies to positive definite matrices only")]
    ZeroPivot(usize),
    #[error("principal submatrix differs from the expected matrix at ({0}, {1})")]
    SubmatrixMismatch(usize, usize),
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("certificate does not match the matrix: {0}")]
    ReplayMismatch(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdMethod {
    GramFactor,
    TensorProduct,
    SchurComplement,
    CharpolySigns,
    Ldlt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoMethod {
    Auto,
    CharpolySigns,
    Ldlt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    GramFactor {
        factor: RationalMatrix,
        #[serde(with = "rational_str")]
        scale: Rational,
    },
    TensorProduct {
        left: RationalMatrix,
        right: RationalMatrix,
        left_cert: Box<PsdCertificate>,
        right_cert: Box<PsdCertificate>,
    },
    SchurComplement {
        split: usize,
        complement: RationalMatrix,
        leading_cert: Box<PsdCertificate>,
        complement_cert: Box<PsdCertificate>,
    },
    CharpolySigns {
        /// `e_0 .. e_d` with `det(xI - Q) = sum_k (-1)^k e_k x^(d-k)`.
        #[serde(with = "rational_vec_str")]
        elementary: Vec<Rational>,
        nullity: usize,
    },
    Ldlt {
        #[serde(with = "rational_vec_str")]
        pivots: Vec<Rational>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsdCertificate {
    pub method: PsdMethod,
    pub matrix_hash: String,
    pub witness: Witness,
}

impl PsdCertificate {
    fn new(q: &RationalMatrix, witness: Witness) -> PsdCertificate {
        let method = match &witness {
            Witness::GramFactor { .. } => PsdMethod::GramFactor,
            Witness::TensorProduct { .. } => PsdMethod::TensorProduct,
            Witness::SchurComplement { .. } => PsdMethod::SchurComplement,
            Witness::CharpolySigns { .. } => PsdMethod::CharpolySigns,
            Witness::Ldlt { .. } => PsdMethod::Ldlt,
        };
        PsdCertificate {
            method,
            matrix_hash: q.bare().hash(),
            witness,
        }
    }

    /// Nullity when the witness determines it (characteristic polynomial or LDLT).
    pub fn nullity(&self) -> Option<usize> {
        match &self.witness {
            Witness::CharpolySigns { nullity, .. } => Some(*nullity),
            Witness::Ldlt { .. } => Some(0),
            _ => None,
        }
    }

    /// Re-verifies the certificate against `q` from scratch.
    pub fn replay(&self, q: &RationalMatrix) -> Result<(), PsdError> {
        if self.matrix_hash != q.bare().hash() {
            return Err(PsdError::ReplayMismatch("matrix hash differs".into()));
        }
        let fresh = match &self.witness {
            Witness::GramFactor { factor, scale } => verify_gram_factor(q, factor, scale)?,
            Witness::TensorProduct {
                left,
                right,
                left_cert,
                right_cert,
            } => {
                check_kron(q, left, right)?;
                left_cert.replay(left)?;
                right_cert.replay(right)?;
                return Ok(());
            }
            Witness::SchurComplement {
                split,
                complement,
                leading_cert,
                complement_cert,
            } => {
                let (lead, comp) = schur_parts(q, *split)?;
                if &comp != complement {
                    return Err(PsdError::ReplayMismatch("Schur complement differs".into()));
                }
                leading_cert.replay(&lead)?;
                if leading_cert.nullity() != Some(0) {
                    return Err(PsdError::ReplayMismatch("leading block not shown definite".into()));
                }
                complement_cert.replay(complement)?;
                return Ok(());
            }
            Witness::CharpolySigns { .. } => verify_charpoly_signs(q)?,
            Witness::Ldlt { .. } => ldlt(q)?,
        };
        if fresh.witness != self.witness {
            return Err(PsdError::ReplayMismatch("witness differs".into()));
        }
        Ok(())
    }
}

fn require_symmetric(q: &RationalMatrix) -> Result<(), PsdError> {
    if q.is_symmetric() {
        Ok(())
    } else {
        Err(PsdError::NotSymmetric)
    }
}

/// Certifies `q == scale · uᵀu` with `scale ≥ 0`.
pub fn verify_gram_factor(
    q: &RationalMatrix,
    u: &RationalMatrix,
    scale: &Rational,
) -> Result<PsdCertificate, PsdError> {
    if u.cols() != q.rows() || !q.is_square() {
        return Err(PsdError::Dimension(format!(
            "Q is {}x{}, factor is {}x{}",
            q.rows(),
            q.cols(),
            u.rows(),
            u.cols()
        )));
    }
    if scale.is_negative() {
        return Err(PsdError::NegativeScale(scale.to_string()));
    }
    let gram = u
        .transpose()
        .mul(u)
        .map_err(|e| PsdError::Dimension(e.to_string()))?
        .scale(scale);
    if let Some((row, col)) = gram.first_difference(&q.bare()) {
        return Err(PsdError::FactorMismatch { row, col });
    }
    Ok(PsdCertificate::new(
        q,
        Witness::GramFactor {
            factor: u.bare(),
            scale: scale.clone(),
        },
    ))
}

fn check_kron(q: &RationalMatrix, left: &RationalMatrix, right: &RationalMatrix) -> Result<(), PsdError> {
    if left.kron(right).same_entries(&q.bare()) {
        Ok(())
    } else {
        Err(PsdError::NotAKroneckerProduct)
    }
}

/// Certifies `q == left ⊗ right` with both factors positive semidefinite.
pub fn verify_tensor_psd(
    q: &RationalMatrix,
    left: &RationalMatrix,
    right: &RationalMatrix,
) -> Result<PsdCertificate, PsdError> {
    check_kron(q, left, right)?;
    let left_cert = verify_charpoly_signs(left)?;
    let right_cert = verify_charpoly_signs(right)?;
    Ok(PsdCertificate::new(
        q,
        Witness::TensorProduct {
            left: left.bare(),
            right: right.bare(),
            left_cert: Box::new(left_cert),
            right_cert: Box::new(right_cert),
        },
    ))
}

/// Solves `p · x = rhs` exactly by Gauss–Jordan elimination with the first
/// nonzero pivot in each column.
fn solve(p: &RationalMatrix, rhs: &RationalMatrix) -> Result<RationalMatrix, PsdError> {
    let n = p.rows();
    let w = rhs.cols();
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row = p.row(i).to_vec();
            row.extend_from_slice(rhs.row(i));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(PsdError::SingularLeadingBlock(col))?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        }
    }
    Ok(RationalMatrix::from_fn(n, w, |i, j| a[i][n + j].clone()))
}

/// Leading block and Schur complement `S - Rᵀ P⁻¹ R` of `q` split at `split`.
fn schur_parts(q: &RationalMatrix, split: usize) -> Result<(RationalMatrix, RationalMatrix), PsdError> {
    require_symmetric(q)?;
    let n = q.rows();
    if split == 0 || split >= n {
        return Err(PsdError::Dimension(format!("split {split} for size {n}")));
    }
    let p = q.block(0, 0, split, split);
    let r = q.block(0, split, split, n - split);
    let s = q.block(split, split, n - split, n - split);
    let pinv_r = solve(&p, &r)?;
    let correction = r.transpose().mul(&pinv_r).expect("conformal");
    Ok((p, s.sub(&correction).expect("conformal")))
}

/// Certifies `q` via a positive definite leading block and a PSD complement.
pub fn verify_schur(q: &RationalMatrix, split: usize) -> Result<PsdCertificate, PsdError> {
    let (lead, complement) = schur_parts(q, split)?;
    let leading_cert = match ldlt(&lead) {
        Ok(c) => c,
        Err(PsdError::ZeroPivot(k)) => return Err(PsdError::SingularLeadingBlock(k)),
        Err(e) => return Err(e),
    };
    let complement_cert = certify_auto(&complement)?;
    Ok(PsdCertificate::new(
        q,
        Witness::SchurComplement {
            split,
            complement,
            leading_cert: Box::new(leading_cert),
            complement_cert: Box::new(complement_cert),
        },
    ))
}

/// The Schur complement matrix itself, for inspection.
pub fn schur_complement(q: &RationalMatrix, split: usize) -> Result<RationalMatrix, PsdError> {
    schur_parts(q, split).map(|(_, c)| c)
}

/// Coefficients of `det(xI - q)`, highest degree first, by the division-free
/// Berkowitz algorithm.
pub fn charpoly(q: &RationalMatrix) -> Vec<Rational> {
    assert!(q.is_square(), "charpoly needs a square matrix");
    let n = q.rows();
    let mut poly = vec![Rational::one()];
    for k in 0..n {
        // Leading (k+1)x(k+1) block: [[M, C], [R, a]].
        let a = q.get(k, k).clone();
        let r: Vec<Rational> = (0..k).map(|j| q.get(k, j).clone()).collect();
        let mut col: Vec<Rational> = (0..k).map(|i| q.get(i, k).clone()).collect();
        // Toeplitz column: 1, -a, -R C, -R M C, -R M^2 C, ...
        let mut t = Vec::with_capacity(k + 2);
        t.push(Rational::one());
        t.push(-a);
        for _ in 0..k {
            let dot: Rational = r.iter().zip(&col).map(|(x, y)| x * y).sum();
            t.push(-dot);
            col = (0..k)
                .map(|i| (0..k).map(|j| q.get(i, j) * &col[j]).sum())
                .collect();
        }
        let mut next = vec![Rational::zero(); k + 2];
        for (i, out) in next.iter_mut().enumerate() {
            for (j, pj) in poly.iter().enumerate() {
                if i >= j {
                    *out += &t[i - j] * pj;
                }
            }
        }
        poly = next;
    }
    poly
}

/// The elementary symmetric functions `e_0..e_d` of the eigenvalues.
pub fn elementary_from_charpoly(coeffs: &[Rational]) -> Vec<Rational> {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 0 { c.clone() } else { -c })
        .collect()
}

/// PSD test for symmetric matrices: every `e_k` must be nonnegative.
pub fn verify_charpoly_signs(q: &RationalMatrix) -> Result<PsdCertificate, PsdError> {
    require_symmetric(q)?;
    let e = elementary_from_charpoly(&charpoly(q));
    if let Some(k) = e.iter().position(|v| v.is_negative()) {
        return Err(PsdError::NotPsd(format!("e_{k} = {} < 0", e[k])));
    }
    let last_nonzero = e.iter().rposition(|v| !v.is_zero()).unwrap_or(0);
    let nullity = q.rows() - last_nonzero;
    Ok(PsdCertificate::new(
        q,
        Witness::CharpolySigns {
            elementary: e,
            nullity,
        },
    ))
}

/// Symmetric elimination without pivoting; succeeds only for positive definite input.
pub fn ldlt(q: &RationalMatrix) -> Result<PsdCertificate, PsdError> {
    require_symmetric(q)?;
    let n = q.rows();
    let mut a = q.to_rows();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let d = a[k][k].clone();
        if d.is_zero() {
            return Err(PsdError::ZeroPivot(k));
        }
        if d.is_negative() {
            return Err(PsdError::NotPsd(format!("pivot {k} is {d}")));
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &d;
            for j in k + 1..n {
                if !a[k][j].is_zero() {
                    let delta = &f * &a[k][j];
                    a[i][j] -= delta;
                }
            }
        }
        pivots.push(d);
    }
    Ok(PsdCertificate::new(q, Witness::Ldlt { pivots }))
}

/// Principal submatrix test via the characteristic polynomial.
pub fn verify_submatrix_psd(q: &RationalMatrix, keep: &[usize]) -> Result<PsdCertificate, PsdError> {
    if let Some(&bad) = keep.iter().find(|&&k| k >= q.rows()) {
        return Err(PsdError::IndexOutOfRange(bad));
    }
    verify_charpoly_signs(&q.principal_submatrix(keep))
}

/// As [`verify_submatrix_psd`], additionally requiring the submatrix to equal `expected`.
pub fn verify_submatrix_matches(
    q: &RationalMatrix,
    keep: &[usize],
    expected: &RationalMatrix,
) -> Result<PsdCertificate, PsdError> {
    if let Some(&bad) = keep.iter().find(|&&k| k >= q.rows()) {
        return Err(PsdError::IndexOutOfRange(bad));
    }
    let sub = q.principal_submatrix(keep).bare();
    if let Some((i, j)) = sub.first_difference(&expected.bare()) {
        return Err(PsdError::SubmatrixMismatch(i, j));
    }
    verify_charpoly_signs(&sub)
}

/// LDLT when the matrix is definite, otherwise the characteristic-polynomial test.
pub fn certify_auto(q: &RationalMatrix) -> Result<PsdCertificate, PsdError> {
    match ldlt(q) {
        Ok(c) => Ok(c),
        Err(PsdError::ZeroPivot(_)) | Err(PsdError::NotPsd(_)) => verify_charpoly_signs(q),
        Err(e) => Err(e),
    }
}

pub fn certify(q: &RationalMatrix, method: AutoMethod) -> Result<PsdCertificate, PsdError> {
    match method {
        AutoMethod::Auto => certify_auto(q),
        AutoMethod::CharpolySigns => verify_charpoly_signs(q),
        AutoMethod::Ldlt => ldlt(q),
    }
}

mod rational_str {
    use super::Rational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

mod rational_vec_str {
    use super::Rational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(ToString::to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|x| x.parse().map_err(D::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rat_frac};

    fn m(rows: &[Vec<i64>]) -> RationalMatrix {
        RationalMatrix::from_i64_rows(rows)
    }

    /// Determinant by cofactor expansion, for cross-checking small cases.
    fn det(a: &RationalMatrix) -> Rational {
        let n = a.rows();
        if n == 0 {
            return Rational::one();
        }
        (0..n)
            .map(|j| {
                let keep: Vec<usize> = (1..n).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                let minor = RationalMatrix::from_fn(n - 1, n - 1, |r, c| a.get(keep[r], cols[c]).clone());
                let sign = if j % 2 == 0 { rat(1) } else { rat(-1) };
                sign * a.get(0, j) * det(&minor)
            })
            .sum()
    }

    #[test]
    fn charpoly_small() {
        assert_eq!(charpoly(&RationalMatrix::identity(2)), vec![rat(1), rat(-2), rat(1)]);
        let a = m(&[vec![2, 1, 0], vec![1, 3, -1], vec![0, -1, 5]]);
        let c = charpoly(&a);
        assert_eq!(c[1], -a.trace());
        assert_eq!(c[3], -det(&a));
        // Evaluate det(xI - A) at x = 7 directly.
        let shifted = RationalMatrix::identity(3).scale(&rat(7)).sub(&a).unwrap();
        let at7: Rational = c.iter().enumerate().map(|(k, ck)| ck * num_traits::pow(rat(7), 3 - k)).sum();
        assert_eq!(at7, det(&shifted));
    }

    #[test]
    fn charpoly_signs_cases() {
        let c = verify_charpoly_signs(&RationalMatrix::diagonal(&[rat(1), rat(0)])).unwrap();
        assert_eq!(c.nullity(), Some(1));
        let err = verify_charpoly_signs(&RationalMatrix::diagonal(&[rat(1), rat(-1)])).unwrap_err();
        assert!(matches!(err, PsdError::NotPsd(ref s) if s.contains("e_2")));
        assert_eq!(
            verify_charpoly_signs(&m(&[vec![1, 2], vec![3, 1]])).unwrap_err(),
            PsdError::NotSymmetric
        );
    }

    #[test]
    fn gram_factor_cases() {
        let q = m(&[vec![6]]);
        verify_gram_factor(&q, &m(&[vec![1]]), &rat(6)).unwrap();
        let err = verify_gram_factor(&q, &m(&[vec![1]]), &rat(5)).unwrap_err();
        assert_eq!(err, PsdError::FactorMismatch { row: 0, col: 0 });
        assert!(verify_gram_factor(&q, &m(&[vec![1]]), &rat(-6)).is_err());
    }

    #[test]
    fn tensor_cases() {
        verify_tensor_psd(&m(&[vec![1]]), &m(&[vec![1]]), &m(&[vec![1]])).unwrap();
        let left = m(&[vec![4, 2], vec![2, 4]]);
        let j = RationalMatrix::all_ones(3, 3);
        let q = left.kron(&j);
        let cert = verify_tensor_psd(&q, &left, &j).unwrap();
        cert.replay(&q).unwrap();
        assert_eq!(
            verify_tensor_psd(&q, &j, &left).unwrap_err(),
            PsdError::NotAKroneckerProduct
        );
    }

    #[test]
    fn schur_cases() {
        let c = schur_complement(&RationalMatrix::identity(2), 1).unwrap();
        assert_eq!(c, m(&[vec![1]]));
        let q = m(&[vec![20, 16], vec![16, 36]]);
        assert_eq!(schur_complement(&q, 1).unwrap(), RationalMatrix::diagonal(&[rat_frac(116, 5)]));
        // One unordered pair couples to both orders of its indices.
        let slice = m(&[vec![20, 0, 16], vec![0, 20, 16], vec![16, 16, 36]]);
        assert_eq!(schur_complement(&slice, 2).unwrap(), RationalMatrix::diagonal(&[rat_frac(52, 5)]));
        verify_schur(&slice, 2).unwrap().replay(&slice).unwrap();
        let singular = m(&[vec![0, 0], vec![0, 1]]);
        assert!(matches!(verify_schur(&singular, 1), Err(PsdError::SingularLeadingBlock(0))));
    }

    #[test]
    fn ldlt_cases() {
        let q = m(&[vec![4, 2], vec![2, 3]]);
        let cert = ldlt(&q).unwrap();
        assert_eq!(cert.witness, Witness::Ldlt { pivots: vec![rat(4), rat(2)] });
        assert!(matches!(ldlt(&m(&[vec![1, 1], vec![1, 1]])), Err(PsdError::ZeroPivot(1))));
        assert!(matches!(ldlt(&m(&[vec![1, 2], vec![2, 1]])), Err(PsdError::NotPsd(_))));
        assert_eq!(certify_auto(&m(&[vec![1, 1], vec![1, 1]])).unwrap().method, PsdMethod::CharpolySigns);
    }

    #[test]
    fn json_replay() {
        let q = m(&[vec![2, 1, 1], vec![1, 2, 1], vec![1, 1, 2]]);
        for cert in [verify_charpoly_signs(&q).unwrap(), ldlt(&q).unwrap(), verify_schur(&q, 1).unwrap()] {
            let json = serde_json::to_string(&cert).unwrap();
            let back: PsdCertificate = serde_json::from_str(&json).unwrap();
            assert_eq!(back, cert);
            back.replay(&q).unwrap();
            assert!(back.replay(&RationalMatrix::identity(3)).is_err());
        }
    }

    #[test]
    fn submatrix_cases() {
        let q = m(&[vec![2, 1, 0], vec![1, 2, 1], vec![0, 1, 2]]);
        let all = verify_submatrix_psd(&q, &[0, 1, 2]).unwrap();
        assert_eq!(all, verify_charpoly_signs(&q).unwrap());
        verify_submatrix_matches(&q, &[0, 2], &RationalMatrix::identity(2).scale(&rat(2))).unwrap();
        assert_eq!(
            verify_submatrix_matches(&q, &[0, 1], &RationalMatrix::identity(2)).unwrap_err(),
            PsdError::SubmatrixMismatch(0, 0)
        );
        assert_eq!(verify_submatrix_psd(&q, &[5]).unwrap_err(), PsdError::IndexOutOfRange(5));
    }
}
