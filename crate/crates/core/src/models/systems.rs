use std::collections::BTreeMap;

use crate::mechanics::{ConstraintSystem, MechError, PhaseSpace, Shell, DEFAULT_CHAIN_DEPTH};
use crate::symcore::{ex, Expr};

use super::geometry::TorusGeometry;

pub fn intrinsic_phase_space() -> PhaseSpace {
    PhaseSpace::new(&["r", "theta", "phi"], &["m", "a", "b"]).with_multiplier()
}

pub fn intrinsic_lagrangian() -> Expr {
    ex("m/2*(rdot^2 + r^2*thetadot^2 + (a + r*sin(theta))^2*phidot^2) - lambda*(r - b)")
}

/// Toric-coordinate system with the constraint `r = b`.
pub fn intrinsic_system() -> Result<ConstraintSystem, MechError> {
    let strong: BTreeMap<String, Expr> = [("r", ex("b")), ("p_r", Expr::zero())]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    let shell = Shell { surface: strong.clone(), strong };
    ConstraintSystem::build(intrinsic_phase_space(), intrinsic_lagrangian(), shell, DEFAULT_CHAIN_DEPTH)
}

pub fn cartesian_phase_space() -> PhaseSpace {
    PhaseSpace::new(&["x", "y", "z"], &["m", "a", "b"]).with_multiplier()
}

pub fn cartesian_lagrangian() -> Expr {
    ex("m/2*(xdot^2 + ydot^2 + zdot^2)") - ex("lambda") * TorusGeometry::surface_function()
}

/// Surface parametrization of the Cartesian constraint surface: the
/// embedding for positions and tangent momenta
/// `p = p_theta r_theta / b^2 + p_phi r_phi / (a + b sin(theta))^2`.
pub fn cartesian_surface() -> BTreeMap<String, Expr> {
    let g = TorusGeometry::new();
    let mut m = BTreeMap::new();
    let (pt, pp) = (ex("p_theta"), ex("p_phi"));
    for (i, name) in ["x", "y", "z"].into_iter().enumerate() {
        m.insert(name.to_string(), g.embedding[i].clone());
        let p = &pt * &g.r_theta[i] / &g.metric.0 + &pp * &g.r_phi[i] / &g.metric.1;
        m.insert(format!("p_{name}"), p);
    }
    m
}

pub fn cartesian_system() -> Result<ConstraintSystem, MechError> {
    let shell = Shell { strong: BTreeMap::new(), surface: cartesian_surface() };
    ConstraintSystem::build(cartesian_phase_space(), cartesian_lagrangian(), shell, DEFAULT_CHAIN_DEPTH)
}
