//! Exact symbolic expressions: Gaussian-rational polynomials in symbols,
//! `sin`/`cos`, half-angle phases and square roots, with rational functions
//! kept over a factored denominator.

mod coeff;
mod eval;
mod expr;
mod parse;
mod poly;

use std::collections::BTreeMap;

use thiserror::Error;

pub use coeff::Coeff;
pub use eval::{eval_numeric, probe_point, Probe, ProbeReport};
pub use expr::{parse_rational, Expr};
pub use parse::parse;
pub use poly::{Atom, Monomial, Poly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymError {
    #[error("unsupported form: {0}")]
    UnsupportedForm(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at evaluation point: {0}")]
    Pole(String),
    #[error("unbound symbol {0}")]
    Unbound(String),
    #[error("probe could not find pole-free points after {0} attempts")]
    ProbeDomain(usize),
    #[error("canonical and numeric equality disagree: {0}")]
    ProbeDisagreement(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    Coordinate,
    Momentum,
    Multiplier,
    Parameter,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    name: String,
    kind: SymbolKind,
}

impl Symbol {
    pub fn new(name: &str, kind: SymbolKind) -> Self {
        Symbol { name: name.to_string(), kind }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn expr(&self) -> Expr {
        Expr::sym(&self.name)
    }
}

/// Expressions are canonical on construction; this re-canonicalizes a
/// string form and is the identity on an existing `Expr`.
pub fn normalize(e: &Expr) -> Expr {
    e.clone()
}

pub fn diff(e: &Expr, s: &Symbol) -> Expr {
    e.diff(s.name())
}

pub fn substitute(e: &Expr, bindings: &BTreeMap<String, Expr>) -> Result<Expr, SymError> {
    e.subst(bindings)
}

/// Canonical equality, cross-checked by a numeric probe.
pub fn equal(e1: &Expr, e2: &Expr) -> Result<bool, SymError> {
    let canonical = (e1 - e2).is_zero();
    let probe = Probe::default().compare(e1, e2)?;
    if probe.agree != canonical {
        return Err(SymError::ProbeDisagreement(format!(
            "canonical={canonical}, max relative deviation {:.3e} for {e1} vs {e2}",
            probe.max_rel
        )));
    }
    Ok(canonical)
}

/// Shorthand used throughout: parse a literal expression, panicking on error.
pub fn ex(s: &str) -> Expr {
    parse(s).unwrap_or_else(|e| panic!("bad expression literal {s:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn side_relation_and_cos_degree() {
        assert!(ex("sin(theta)^2 + cos(theta)^2").is_one());
        assert_eq!(ex("cos(theta)^2"), ex("1 - sin(theta)^2"));
    }

    #[test]
    fn equality_examples() {
        assert!(equal(&ex("sin(theta)^2"), &ex("1 - cos(theta)^2")).unwrap());
        assert!(!equal(&ex("(a^2 - b^2)/a^2"), &Expr::one()).unwrap());
    }

    #[test]
    fn derivative_examples() {
        let r = Symbol::new("r", SymbolKind::Coordinate);
        assert_eq!(diff(&ex("r^2*p_theta^2"), &r), ex("2*r*p_theta^2"));
        let th = Symbol::new("theta", SymbolKind::Coordinate);
        assert_eq!(diff(&ex("(a + r*sin(theta))^2"), &th), ex("2*r*cos(theta)*(a + r*sin(theta))"));
        let x = Symbol::new("x", SymbolKind::Coordinate);
        assert_eq!(diff(&ex("sqrt(x^2 + y^2)"), &x), ex("x/sqrt(x^2 + y^2)"));
    }

    #[test]
    fn substitution_examples() {
        let mut m = BTreeMap::new();
        m.insert("r".to_string(), ex("b"));
        assert!(substitute(&ex("r - b"), &m).unwrap().is_zero());
        let mut m = BTreeMap::new();
        m.insert("p_r".to_string(), Expr::zero());
        assert!(substitute(&ex("p_r^2/(2*m)"), &m).unwrap().is_zero());
    }
}
