//! Bundled reference transcriptions, used as the single source for published values.
//!
//! Matrices are stored one row per line; basis vectors one monomial per line
//! or one `(i,j)`-labelled vector per line.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::cert84::LinearEquation;
use crate::matrix::{AffineMatrix, Matrix, RationalMatrix};
use crate::poly::{Monomial, ParamId, Rational};

pub const Q1_N3: &str = include_str!("../golden/q1_n3.txt");
pub const Q2_N3: &str = include_str!("../golden/q2_n3.txt");
pub const U_N3: &str = include_str!("../golden/u_n3.txt");
pub const Z1_N3: &str = include_str!("../golden/z1_n3.txt");
pub const Z2_N3: &str = include_str!("../golden/z2_n3.txt");
pub const Q2_84_N5: &str = include_str!("../golden/q2_84_n5.txt");
pub const Z2_84_N5: &str = include_str!("../golden/z2_84_n5.txt");
pub const Z3_N5: &str = include_str!("../golden/z3_n5.txt");
pub const Q3_N5: &str = include_str!("../golden/q3_n5.txt");
pub const Q3_SYMBOLIC_N5: &str = include_str!("../golden/q3_symbolic_n5.txt");
pub const Q3_N5_CHARPOLY: &str = include_str!("../golden/q3_n5_charpoly.txt");
pub const X_VALUES: &str = include_str!("../golden/x_values.txt");
pub const PARAM_SYSTEM: &str = include_str!("../golden/param_system.txt");
pub const COUNTEREXAMPLE: &str = include_str!("../golden/counterexample.json");

fn matrix(text: &str) -> RationalMatrix {
    Matrix::from_text(text).expect("bundled matrix parses")
}

fn monomials(text: &str) -> Vec<Monomial> {
    text.split_whitespace()
        .map(|m| m.parse().expect("bundled monomial parses"))
        .collect()
}

fn labelled_vectors(text: &str) -> BTreeMap<(u16, u16), Vec<Monomial>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (label, rest) = l.split_once(' ').expect("labelled line");
            let (i, j) = label
                .trim_matches(|c| c == '(' || c == ')')
                .split_once(',')
                .expect("pair label");
            (
                (i.parse().expect("index"), j.parse().expect("index")),
                monomials(rest),
            )
        })
        .collect()
}

pub fn q1_n3() -> RationalMatrix {
    matrix(Q1_N3)
}

pub fn q2_n3() -> RationalMatrix {
    matrix(Q2_N3)
}

pub fn u_n3() -> RationalMatrix {
    matrix(U_N3)
}

pub fn z1_n3() -> Vec<Monomial> {
    monomials(Z1_N3)
}

pub fn z2_n3() -> BTreeMap<(u16, u16), Vec<Monomial>> {
    labelled_vectors(Z2_N3)
}

pub fn q2_84_n5() -> RationalMatrix {
    matrix(Q2_84_N5)
}

pub fn z2_84_n5() -> Vec<Monomial> {
    monomials(Z2_84_N5)
}

pub fn z3_n5() -> BTreeMap<(u16, u16), Vec<Monomial>> {
    labelled_vectors(Z3_N5)
}

pub fn q3_n5() -> RationalMatrix {
    matrix(Q3_N5)
}

pub fn q3_symbolic_n5() -> AffineMatrix {
    Matrix::from_text(Q3_SYMBOLIC_N5).expect("bundled matrix parses")
}

/// The published parameter values `x1..x22`.
pub fn x_values() -> BTreeMap<ParamId, Rational> {
    X_VALUES
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (k, v) = l.split_once('=').expect("`xk = v` line");
            (
                k.trim().parse().expect("parameter name"),
                v.trim().parse().expect("parameter value"),
            )
        })
        .collect()
}

/// Published characteristic polynomial of `Q3(n=5)` as `(degree, coefficient)`
/// pairs from the top degree down; lower degrees vanish.
pub fn q3_n5_charpoly() -> Vec<(usize, Rational)> {
    Q3_N5_CHARPOLY
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (d, c) = l.split_once(' ').expect("`degree coefficient` line");
            (d.parse().expect("degree"), c.trim().parse().expect("coefficient"))
        })
        .collect()
}

pub fn param_system() -> Vec<LinearEquation> {
    PARAM_SYSTEM
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.parse().expect("bundled equation parses"))
        .collect()
}

#[derive(Debug, Clone, Deserialize)]
pub struct Counterexample {
    pub a: Vec<Vec<String>>,
    pub b: Vec<Vec<String>>,
    pub trace_abab: String,
    pub trace_s42: String,
}

impl Counterexample {
    fn parse(rows: &[Vec<String>]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|v| v.parse().expect("rational")).collect())
            .collect()
    }

    pub fn a_matrix(&self) -> Vec<Vec<Rational>> {
        Self::parse(&self.a)
    }

    pub fn b_matrix(&self) -> Vec<Vec<Rational>> {
        Self::parse(&self.b)
    }

    pub fn abab(&self) -> Rational {
        self.trace_abab.parse().expect("rational")
    }

    pub fn s42(&self) -> Rational {
        self.trace_s42.parse().expect("rational")
    }
}

pub fn counterexample() -> Counterexample {
    serde_json::from_str(COUNTEREXAMPLE).expect("bundled counterexample parses")
}
