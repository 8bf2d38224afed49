//! Expansion of Gram quadratic forms `zᵀ Q z` over monomial vectors.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::matrix::{AffineMatrix, RationalMatrix};
use crate::poly::{AffineCoeff, Monomial, Polynomial};

/// `zᵀ Q z` for a numeric `Q`.
pub fn quadratic_form(z: &[Monomial], q: &RationalMatrix) -> Polynomial {
    let mut acc = BTreeMap::new();
    add_quadratic_form(&mut acc, z, q);
    collect(acc)
}

/// `zᵀ Q z` for a `Q` whose entries are affine in the parameters.
pub fn quadratic_form_affine(z: &[Monomial], q: &AffineMatrix) -> Polynomial {
    let mut acc = BTreeMap::new();
    add_quadratic_form_affine(&mut acc, z, q);
    collect(acc)
}

pub(crate) fn add_quadratic_form(
    acc: &mut BTreeMap<Monomial, AffineCoeff>,
    z: &[Monomial],
    q: &RationalMatrix,
) {
    assert_eq!(z.len(), q.rows(), "basis length must match the Gram matrix");
    for (i, j, v) in q.entries() {
        if v.is_zero() {
            continue;
        }
        let c = acc.entry(z[i].mul(&z[j])).or_insert_with(AffineCoeff::zero);
        c.add_assign_ref(&AffineCoeff::constant(v.clone()));
    }
}

pub(crate) fn add_quadratic_form_affine(
    acc: &mut BTreeMap<Monomial, AffineCoeff>,
    z: &[Monomial],
    q: &AffineMatrix,
) {
    assert_eq!(z.len(), q.rows(), "basis length must match the Gram matrix");
    for (i, j, v) in q.entries() {
        if v.is_zero() {
            continue;
        }
        acc.entry(z[i].mul(&z[j]))
            .or_insert_with(AffineCoeff::zero)
            .add_assign_ref(v);
    }
}

pub(crate) fn collect(acc: BTreeMap<Monomial, AffineCoeff>) -> Polynomial {
    let mut p = Polynomial::zero();
    for (m, c) in acc {
        p.add_term(m, &c);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::VarId;

    #[test]
    fn two_by_two_form() {
        let z = [Monomial::var(VarId::a(1, 1)), Monomial::var(VarId::b(1, 1))];
        let q = RationalMatrix::from_i64_rows(&[vec![1, 1], vec![1, 1]]);
        let p = quadratic_form(&z, &q);
        let mut expected = Polynomial::monomial(z[0].pow(2));
        expected.add_term(z[0].mul(&z[1]), &AffineCoeff::int(2));
        expected.add_term(z[1].pow(2), &AffineCoeff::int(1));
        assert_eq!(p, expected);
        let qa = AffineMatrix::constant(&q);
        assert_eq!(quadratic_form_affine(&z, &qa), expected);
    }
}
