use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::symcore::{Expr, SymError};

pub const THETA: &str = "theta";
pub const PHI: &str = "phi";

/// `sum c_kl(theta, phi) d_theta^k d_phi^l`, coefficients acting after the
/// derivatives.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiffOp {
    terms: BTreeMap<(u32, u32), Expr>,
}

fn binom(n: u32, k: u32) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

fn deriv(e: &Expr, k: u32, l: u32) -> Expr {
    let mut out = e.clone();
    for _ in 0..k {
        out = out.diff(THETA);
    }
    for _ in 0..l {
        out = out.diff(PHI);
    }
    out
}

impl DiffOp {
    pub fn zero() -> Self {
        DiffOp::default()
    }

    pub fn identity() -> Self {
        DiffOp::mul(Expr::one())
    }

    /// Multiplication operator.
    pub fn mul(c: Expr) -> Self {
        DiffOp::term(0, 0, c)
    }

    pub fn d_theta() -> Self {
        DiffOp::term(1, 0, Expr::one())
    }

    pub fn d_phi() -> Self {
        DiffOp::term(0, 1, Expr::one())
    }

    pub fn term(k: u32, l: u32, c: Expr) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((k, l), c);
        }
        DiffOp { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Expr)> {
        self.terms.iter()
    }

    pub fn coeff(&self, k: u32, l: u32) -> Expr {
        self.terms.get(&(k, l)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|(k, l)| k + l).max().unwrap_or(0)
    }

    fn add_term(&mut self, idx: (u32, u32), c: Expr) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&idx) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(idx, s);
                }
            }
            None => {
                self.terms.insert(idx, c);
            }
        }
    }

    pub fn add_op(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(*idx, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Expr) -> DiffOp {
        let mut out = DiffOp::zero();
        for (idx, e) in &self.terms {
            out.add_term(*idx, e * c);
        }
        out
    }

    /// Operator product `self * other` with full Leibniz expansion.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero();
        let mut cache: BTreeMap<((u32, u32), u32, u32), Expr> = BTreeMap::new();
        for (&(k1, l1), c1) in &self.terms {
            for (&(k2, l2), c2) in &other.terms {
                for i in 0..=k1 {
                    for j in 0..=l1 {
                        let d = cache.entry(((k2, l2), i, j)).or_insert_with(|| deriv(c2, i, j));
                        if d.is_zero() {
                            continue;
                        }
                        let w = binom(k1, i) * binom(l1, j);
                        let c = c1 * &*d * Expr::int(w);
                        out.add_term((k1 - i + k2, l1 - j + l2), c);
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        self.compose(other) - other.compose(self)
    }

    /// Apply to a function of the chart.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut acc = Expr::zero();
        for (&(k, l), c) in &self.terms {
            acc = acc + c * deriv(f, k, l);
        }
        acc
    }

    pub fn map_coeffs<F>(&self, f: F) -> Result<DiffOp, SymError>
    where
        F: Fn(&Expr) -> Result<Expr, SymError>,
    {
        let mut out = DiffOp::zero();
        for (idx, c) in &self.terms {
            out.add_term(*idx, f(c)?);
        }
        Ok(out)
    }

    pub fn subst(&self, bindings: &BTreeMap<String, Expr>) -> Result<DiffOp, SymError> {
        self.map_coeffs(|c| c.subst(bindings))
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.terms.values().any(|c| c.mentions(name))
    }

    /// Formal adjoint-free transpose helper: `(AB + BA) / 2`.
    pub fn hermitize_pair(a: &DiffOp, b: &DiffOp) -> DiffOp {
        (a.compose(b) + b.compose(a)).scale(&Expr::rational(1, 2))
    }

    pub fn pow(&self, k: u32) -> DiffOp {
        let mut out = DiffOp::identity();
        for _ in 0..k {
            out = out.compose(self);
        }
        out
    }

    /// Left-to-right product of a sequence of operators.
    pub fn product(ops: &[&DiffOp]) -> DiffOp {
        let mut out = DiffOp::identity();
        for op in ops {
            out = out.compose(op);
        }
        out
    }
}

impl Add for DiffOp {
    type Output = DiffOp;
    fn add(self, o: DiffOp) -> DiffOp {
        self.add_op(&o)
    }
}

impl Sub for DiffOp {
    type Output = DiffOp;
    fn sub(self, o: DiffOp) -> DiffOp {
        self.add_op(&-o)
    }
}

impl Neg for DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        DiffOp { terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect() }
    }
}

impl Mul for &DiffOp {
    type Output = DiffOp;
    fn mul(self, o: &DiffOp) -> DiffOp {
        self.compose(o)
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&(k, l), c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            match (k, l) {
                (0, 0) => {}
                _ => {
                    write!(f, "*D[")?;
                    let mut parts = Vec::new();
                    if k > 0 {
                        parts.push(if k == 1 { THETA.to_string() } else { format!("{THETA}^{k}") });
                    }
                    if l > 0 {
                        parts.push(if l == 1 { PHI.to_string() } else { format!("{PHI}^{l}") });
                    }
                    write!(f, "{}]", parts.join(","))?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::ex;

    #[test]
    fn leibniz_on_multiplication() {
        let op = DiffOp::d_theta().compose(&DiffOp::mul(ex("sin(theta)")));
        let expect = DiffOp::term(1, 0, ex("sin(theta)")) + DiffOp::mul(ex("cos(theta)"));
        assert_eq!(op, expect);
    }

    #[test]
    fn apply_and_eigenfunction() {
        assert_eq!(DiffOp::d_theta().apply(&ex("sin(theta)")), ex("cos(theta)"));
        let p_phi = DiffOp::d_phi().scale(&ex("-I*hbar"));
        let f = ex("cos(phi) + I*sin(phi)");
        assert_eq!(p_phi.apply(&f), ex("hbar") * f);
    }

    #[test]
    fn square_of_azimuthal_momentum() {
        let p_phi = DiffOp::d_phi().scale(&ex("-I*hbar"));
        assert_eq!(p_phi.compose(&p_phi), DiffOp::term(0, 2, ex("-hbar^2")));
    }

    #[test]
    fn positions_commute() {
        let a = DiffOp::mul(ex("sin(theta)*cos(phi)"));
        let b = DiffOp::mul(ex("theta*phi"));
        assert!(a.commutator(&b).is_zero());
    }

    #[test]
    fn hermitize_of_equal_factors_is_square() {
        let d = DiffOp::d_theta() + DiffOp::mul(ex("cos(theta)"));
        assert_eq!(DiffOp::hermitize_pair(&d, &d), d.compose(&d));
    }

    #[test]
    fn display_is_stable() {
        let d = DiffOp::term(2, 1, ex("a")) + DiffOp::mul(ex("b"));
        assert_eq!(d.to_string(), "(b) + (a)*D[theta^2,phi]");
    }
}
