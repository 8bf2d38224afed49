//! Shared generators for the property and acceptance suites.
#![allow(dead_code)]

use proptest::prelude::*;
use tracesos::poly::{rat_frac, AffineCoeff, Monomial, ParamId, Polynomial, VarId};

/// Variables over two indices, both kinds.
pub fn var() -> impl Strategy<Value = VarId> {
    (any::<bool>(), 1u16..=2, 1u16..=2).prop_map(|(is_a, i, j)| if is_a { VarId::a(i, j) } else { VarId::b(i, j) })
}

pub fn monomial() -> impl Strategy<Value = Monomial> {
    prop::collection::vec((var(), 0u32..=2), 0..=3).prop_map(Monomial::from_factors)
}

pub fn rational() -> impl Strategy<Value = tracesos::poly::Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat_frac(n, d))
}

/// Purely numeric polynomials with up to five terms.
pub fn numeric_poly() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((monomial(), rational()), 0..=5).prop_map(|terms| {
        let mut p = Polynomial::zero();
        for (m, c) in terms {
            p.add_term(m, &AffineCoeff::constant(c));
        }
        p
    })
}

/// Polynomials whose coefficients are affine in `x1..x3`.
pub fn affine_poly() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((monomial(), rational(), prop::option::of((1u16..=3, rational()))), 0..=5).prop_map(
        |terms| {
            let mut p = Polynomial::zero();
            for (m, c, lin) in terms {
                let mut coeff = AffineCoeff::constant(c);
                if let Some((k, a)) = lin {
                    coeff.add_scaled(&AffineCoeff::param(ParamId(k)), &a);
                }
                p.add_term(m, &coeff);
            }
            p
        },
    )
}

/// All permutations of `1..=n` as relabeling maps.
pub fn permutations(n: u16) -> Vec<Vec<u16>> {
    fn go(rest: &mut Vec<u16>, acc: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            acc.push(x);
            go(rest, acc, out);
            acc.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut (1..=n).collect(), &mut Vec::new(), &mut out);
    out
}
