//! Differential operators on the torus chart and the consistency checker
//! that matches `[f, H]` against `i hbar` times the quantized Dirac bracket.

mod diffop;
mod solve;

use thiserror::Error;

use crate::symcore::{ex, Expr, SymError};

pub use diffop::{DiffOp, PHI, THETA};
pub use solve::{solve_parameters, ParameterDomain, ParameterSolution, SolveStatus, FIELD_SYMBOLS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("derived operator still depends on {0}")]
    ParameterLeak(String),
    #[error("half-integer phase survives in {0}")]
    PhaseImbalance(String),
    #[error("coefficient outside the expected basis: {0}")]
    BasisDecomposition(String),
    #[error("operator ordering is ambiguous for {0}")]
    OrderingAmbiguity(String),
}

pub fn i_hbar() -> Expr {
    ex("I*hbar")
}

/// `-(hbar^2/2m) [Laplace-Beltrami + alpha M^2 - beta K]` on the torus.
pub fn hamiltonian(alpha: &Expr, beta: &Expr) -> DiffOp {
    let w = ex("a + b*sin(theta)");
    let lb = DiffOp::term(2, 0, ex("1/b^2"))
        + DiffOp::term(1, 0, ex("cos(theta)") / (ex("b") * &w))
        + DiffOp::term(0, 2, Expr::one() / (&w * &w));
    let m = mean_curvature();
    let k = gauss_curvature();
    let pot = alpha * &m * &m - beta * &k;
    (lb + DiffOp::mul(pot)).scale(&ex("-hbar^2/(2*m)"))
}

pub fn mean_curvature() -> Expr {
    ex("-(a + 2*b*sin(theta))/(2*(a*b + b^2*sin(theta)))")
}

pub fn gauss_curvature() -> Expr {
    ex("sin(theta)/(a*b + b^2*sin(theta))")
}

/// `-i hbar (d_theta + b cos(theta) / (2 (a + b sin(theta))))`.
pub fn p_theta() -> DiffOp {
    (DiffOp::d_theta() + DiffOp::mul(ex("b*cos(theta)/(2*(a + b*sin(theta)))"))).scale(&-i_hbar())
}

/// `-i hbar d_phi`; also the on-shell `L_z`.
pub fn p_phi() -> DiffOp {
    DiffOp::d_phi().scale(&-i_hbar())
}

/// `[position, H] * scale / (i hbar)`; rejects results still carrying any of
/// `forbidden`.
pub fn derive_momentum(h: &DiffOp, position: &Expr, scale: &Expr, forbidden: &[&str]) -> Result<DiffOp, QuantError> {
    let c = DiffOp::mul(position.clone()).commutator(h);
    let p = c.scale(&(scale / &i_hbar()));
    if let Some(s) = forbidden.iter().find(|s| p.mentions(s)) {
        return Err(QuantError::ParameterLeak(s.to_string()));
    }
    Ok(p)
}

/// `p_i = (m / i hbar) [x_i, H]` for each position.
pub fn derive_momenta_from_xh(h: &DiffOp, positions: &[Expr]) -> Result<Vec<DiffOp>, QuantError> {
    positions.iter().map(|x| derive_momentum(h, x, &ex("m"), &["alpha", "beta"])).collect()
}

/// Operator form of a classical expression polynomial in the given momenta,
/// placing coefficients to the left. A coefficient that depends on the
/// coordinate conjugate to a momentum it multiplies is an ordering ambiguity.
pub fn quantize_classical(e: &Expr, momenta: &[(&str, &str, DiffOp)]) -> Result<DiffOp, QuantError> {
    fn rec(e: &Expr, momenta: &[(&str, &str, DiffOp)], used: &mut Vec<String>) -> Result<DiffOp, QuantError> {
        let Some(((p, q, op), rest)) = momenta.split_first() else {
            if let Some(q) = used.iter().find(|q| e.mentions(q)) {
                return Err(QuantError::OrderingAmbiguity(format!("{e} depends on {q}")));
            }
            return Ok(DiffOp::mul(e.clone()));
        };
        let mut out = DiffOp::zero();
        for (k, c) in e.poly_coefficients(p)? {
            if k > 0 {
                used.push(q.to_string());
            }
            let left = rec(&c, rest, used)?;
            if k > 0 {
                used.pop();
            }
            out = out + left.compose(&op.pow(k));
        }
        Ok(out)
    }
    rec(e, momenta, &mut Vec::new())
}

/// A commutator identity `[A, B] = expected` and its residual.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorCheck {
    pub label: String,
    pub residual: DiffOp,
}

impl CommutatorCheck {
    pub fn new(label: impl Into<String>, a: &DiffOp, b: &DiffOp, expected: &DiffOp) -> Self {
        CommutatorCheck { label: label.into(), residual: a.commutator(b) - expected.clone() }
    }

    pub fn passed(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Which first-category commutator an expectation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pair {
    PositionPosition(usize, usize),
    PositionMomentum(usize, usize),
    MomentumMomentum(usize, usize),
}

/// Check `[q,q]`, `[q,p]` and `[p,p]` against `expected`, which returns the
/// operator each commutator should equal.
pub fn check_first_category<F>(
    positions: &[(String, DiffOp)],
    momenta: &[(String, DiffOp)],
    expected: F,
) -> Result<Vec<CommutatorCheck>, QuantError>
where
    F: Fn(Pair) -> Result<DiffOp, QuantError>,
{
    let mut out = Vec::new();
    for (i, (ni, qi)) in positions.iter().enumerate() {
        for (j, (nj, qj)) in positions.iter().enumerate().skip(i + 1) {
            out.push(CommutatorCheck::new(format!("[{ni},{nj}]"), qi, qj, &expected(Pair::PositionPosition(i, j))?));
        }
    }
    for (i, (ni, qi)) in positions.iter().enumerate() {
        for (j, (nj, pj)) in momenta.iter().enumerate() {
            out.push(CommutatorCheck::new(format!("[{ni},{nj}]"), qi, pj, &expected(Pair::PositionMomentum(i, j))?));
        }
    }
    for (i, (ni, pi)) in momenta.iter().enumerate() {
        for (j, (nj, pj)) in momenta.iter().enumerate().skip(i + 1) {
            out.push(CommutatorCheck::new(format!("[{ni},{nj}]"), pi, pj, &expected(Pair::MomentumMomentum(i, j))?));
        }
    }
    Ok(out)
}

/// `1/w_+` and `1/w_-` on the surface, `w_pm = rho^(3/2) exp(pm 3 I phi/2)`.
pub fn w_inverses() -> (Expr, Expr) {
    let rho32 = ex("(a + b*sin(theta))^(3/2)");
    let inv = Expr::one() / rho32;
    (&inv * Expr::half_phase(PHI, -3), &inv * Expr::half_phase(PHI, 3))
}

fn phase_free(op: DiffOp, what: &str) -> Result<DiffOp, QuantError> {
    if op.terms().any(|(_, c)| c.has_half_phase()) {
        return Err(QuantError::PhaseImbalance(what.to_string()));
    }
    Ok(op)
}

/// Right-hand side of the five-weight ordering ansatz for `[p_i, H]`:
///
/// `-(i hbar / m b^2) { m H f + m f H - (a/4) sum_k a_k [f X_k + X_k f]
///   - (a/2) a_5 (1/(w_+ w_-)) (f L^2 + L^2 f) }`
pub fn build_ordering_family(
    h: &DiffOp,
    f: &Expr,
    lz: &DiffOp,
    w_inv: (&Expr, &Expr),
    weights: &[Expr; 5],
) -> Result<DiffOp, QuantError> {
    let fop = DiffOp::mul(f.clone());
    let (p, q) = (DiffOp::mul(w_inv.0.clone()), DiffOp::mul(w_inv.1.clone()));
    let blocks = [
        DiffOp::product(&[lz, &p, lz, &q]) + DiffOp::product(&[&q, lz, &p, lz]),
        DiffOp::product(&[lz, &p, &q, lz]) + DiffOp::product(&[&q, lz, lz, &p]),
        DiffOp::product(&[&p, lz, lz, &q]) + DiffOp::product(&[lz, &q, &p, lz]),
        DiffOp::product(&[&p, lz, &q, lz]) + DiffOp::product(&[lz, &q, lz, &p]),
    ];
    let m = ex("m");
    let mut inner = (h.compose(&fop) + fop.compose(h)).scale(&m);
    for (k, x) in blocks.iter().enumerate() {
        let x = phase_free(x.clone(), &format!("ordering block {}", k + 1))?;
        let sym = fop.compose(&x) + x.compose(&fop);
        inner = inner - sym.scale(&(ex("a/4") * &weights[k]));
    }
    let l2 = lz.compose(lz);
    let pq = phase_free(DiffOp::mul(w_inv.0 * w_inv.1), "1/(w_+ w_-)")?;
    let last = pq.compose(&(fop.compose(&l2) + l2.compose(&fop)));
    inner = inner - last.scale(&(ex("a/2") * &weights[4]));
    Ok(inner.scale(&(-i_hbar() / ex("m*b^2"))))
}

/// The parameter-free two-term ordering with weights 1/9 and 10/9.
pub fn build_simple_ordering(h: &DiffOp, f: &Expr, lz: &DiffOp, w_inv: (&Expr, &Expr)) -> Result<DiffOp, QuantError> {
    let fop = DiffOp::mul(f.clone());
    let (p, q) = (DiffOp::mul(w_inv.0.clone()), DiffOp::mul(w_inv.1.clone()));
    let l2 = lz.compose(lz);
    let x = DiffOp::product(&[&p, &fop, &l2, &q])
        + DiffOp::product(&[&q, &fop, &l2, &p])
        + DiffOp::product(&[&p, &l2, &q, &fop])
        + DiffOp::product(&[&q, &l2, &p, &fop]);
    let x = phase_free(x, "simple ordering block")?;
    let pq = phase_free(DiffOp::mul(w_inv.0 * w_inv.1), "1/(w_+ w_-)")?;
    let last = pq.compose(&(fop.compose(&l2) + l2.compose(&fop)));
    let inner = (h.compose(&fop) + fop.compose(h)).scale(&ex("m")) + x.scale(&ex("1/9*a/4"))
        - last.scale(&ex("10/9*a/2"));
    Ok(inner.scale(&(-i_hbar() / ex("m*b^2"))))
}

/// Coefficient of `hbar^0` in every coefficient of the residual.
pub fn classical_limit(residual: &DiffOp) -> Result<DiffOp, QuantError> {
    Ok(residual.map_coeffs(|c| Ok(c.poly_coefficients("hbar")?.remove(&0).unwrap_or_default()))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamiltonian_on_constants() {
        let h = hamiltonian(&ex("alpha"), &ex("beta"));
        let m = mean_curvature();
        let expect = ex("-hbar^2/(2*m)") * (ex("alpha") * &m * &m - ex("beta") * gauss_curvature());
        assert_eq!(h.apply(&Expr::one()), expect);
    }

    #[test]
    fn theta_commutator_gives_p_theta() {
        let h = hamiltonian(&ex("alpha"), &ex("beta"));
        let c = DiffOp::mul(ex("theta")).commutator(&h);
        assert_eq!(c, p_theta().scale(&(i_hbar() / ex("m*b^2"))));
        let p = derive_momentum(&h, &ex("phi"), &ex("m*(a + b*sin(theta))^2"), &["alpha", "beta"]).unwrap();
        assert_eq!(p, p_phi());
    }

    #[test]
    fn azimuthal_momentum_commutes_with_h() {
        let h = hamiltonian(&ex("alpha"), &ex("beta"));
        assert!(p_phi().commutator(&h).is_zero());
    }

    #[test]
    fn leaking_parameters_are_reported() {
        let h = hamiltonian(&ex("alpha"), &ex("beta")) + DiffOp::term(1, 0, ex("alpha"));
        assert_eq!(
            derive_momenta_from_xh(&h, &[ex("cos(theta)")]),
            Err(QuantError::ParameterLeak("alpha".into()))
        );
    }

    #[test]
    fn classical_quantization_map() {
        let ops = [("p_phi", "phi", p_phi())];
        let e = ex("b*cos(theta)*p_phi^2/(m*(a + b*sin(theta))^3)");
        let q = quantize_classical(&e, &ops).unwrap();
        assert_eq!(q, DiffOp::term(0, 2, ex("-hbar^2*b*cos(theta)/(m*(a + b*sin(theta))^3)")));
        assert!(matches!(
            quantize_classical(&ex("cos(phi)*p_phi"), &ops),
            Err(QuantError::OrderingAmbiguity(_))
        ));
    }

    #[test]
    fn unmatched_half_phase_is_rejected() {
        let h = hamiltonian(&Expr::one(), &Expr::one());
        let (p, _) = w_inverses();
        let weights = [Expr::one(), Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero()];
        let one = Expr::one();
        let r = build_ordering_family(&h, &ex("b*cos(theta)"), &p_phi(), (&p, &one), &weights);
        assert!(matches!(r, Err(QuantError::PhaseImbalance(_))));
    }
}
