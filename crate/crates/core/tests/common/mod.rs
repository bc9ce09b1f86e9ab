//! Random expressions and operators shared by the property suites.
#![allow(dead_code)]

pub mod reference;

use gtcq_core::quantize::DiffOp;
use gtcq_core::symcore::{ex, Expr};
use proptest::prelude::*;

/// 100 cases, no regression files.
pub fn config() -> ProptestConfig {
    ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() }
}

/// Intrinsic phase-space symbols.
pub const INTRINSIC_VARS: [&str; 8] = ["r", "theta", "phi", "p_r", "p_theta", "p_phi", "lambda", "p_lambda"];
pub const CARTESIAN_VARS: [&str; 6] = ["x", "y", "z", "p_x", "p_y", "p_z"];

fn monomial(vars: &'static [&'static str], max_deg: u32) -> impl Strategy<Value = Expr> {
    let n = vars.len();
    (
        prop_oneof![-3i64..=-1, 1i64..=3],
        proptest::collection::vec((0..n, 1..=max_deg), 0..=2),
        0u8..4,
    )
        .prop_map(move |(c, factors, trig)| {
            let mut e = Expr::int(c);
            for (k, d) in factors {
                // angles only enter through sin and cos
                let v = vars[k];
                let base = if v == "theta" || v == "phi" { ex(&format!("sin({v})")) } else { Expr::sym(v) };
                e = e * base.powi(d as i64);
            }
            if !vars.contains(&"theta") {
                return e;
            }
            match trig {
                1 => e * ex("sin(theta)"),
                2 => e * ex("cos(theta)"),
                3 => e * ex("cos(phi)"),
                _ => e,
            }
        })
}

/// Sums of up to three monomials, optionally over a torus-like denominator.
pub fn phase_expr(vars: &'static [&'static str]) -> impl Strategy<Value = Expr> {
    (proptest::collection::vec(monomial(vars, 2), 1..=3), 0u8..3).prop_map(move |(terms, den)| {
        let sum = terms.into_iter().fold(Expr::zero(), |acc, t| acc + t);
        let d = match (den, vars.contains(&"r")) {
            (1, true) => ex("a + r*sin(theta)"),
            (2, true) => ex("r"),
            (1, false) => ex("a + x^2"),
            _ => Expr::one(),
        };
        sum / d
    })
}

pub fn intrinsic_expr() -> impl Strategy<Value = Expr> {
    phase_expr(&INTRINSIC_VARS)
}

pub fn cartesian_expr() -> impl Strategy<Value = Expr> {
    phase_expr(&CARTESIAN_VARS)
}

/// Trigonometric coefficient on the chart, optionally over `a + b sin(theta)`.
pub fn chart_coeff() -> impl Strategy<Value = Expr> {
    (prop_oneof![-3i64..=-1, 1i64..=3], 0u8..6, any::<bool>()).prop_map(|(c, f, rational)| {
        let base = match f {
            0 => ex("1"),
            1 => ex("sin(theta)"),
            2 => ex("cos(theta)"),
            3 => ex("cos(phi)"),
            4 => ex("sin(theta)*sin(phi)"),
            _ => ex("a + b*cos(theta)"),
        };
        let e = Expr::int(c) * base;
        if rational {
            e / ex("a + b*sin(theta)")
        } else {
            e
        }
    })
}

/// Operators of order at most two with up to three terms.
pub fn diffop() -> impl Strategy<Value = DiffOp> {
    proptest::collection::vec(((0u32..=2, 0u32..=2), chart_coeff()), 1..=3).prop_map(|terms| {
        terms
            .into_iter()
            .filter(|((k, l), _)| k + l <= 2)
            .fold(DiffOp::zero(), |acc, ((k, l), c)| acc + DiffOp::term(k, l, c))
    })
}

/// Entry for random antisymmetric matrices.
pub fn matrix_entry() -> impl Strategy<Value = Expr> {
    (-3i64..=3, -2i64..=2, 0u8..3).prop_map(|(c0, c1, f)| {
        let atom = match f {
            0 => ex("u"),
            1 => ex("sin(theta)"),
            _ => ex("u*v"),
        };
        Expr::int(c0) + Expr::int(c1) * atom
    })
}
