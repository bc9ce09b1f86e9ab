//! Classical constrained dynamics: Poisson brackets, the conservation chain of
//! a single holonomic constraint, the constraint matrix and Dirac brackets.

mod system;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::symcore::{Expr, SymError, Symbol, SymbolKind};

pub use system::{
    build_constraint_matrix, dirac_bracket, invert_constraint_matrix, reduce_hamiltonian, ConstraintSystem,
    DiracTable, Matrix, Shell,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MechError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("symbol {0} is not registered in the phase space")]
    UnregisteredSymbol(String),
    #[error("velocity map is singular: no kinetic term for {0}")]
    SingularVelocityMap(String),
    #[error("Lagrangian is not quadratic and diagonal in {0}")]
    NonQuadraticLagrangian(String),
    #[error("constraint chain did not terminate within {0} steps")]
    NonterminatingChain(usize),
    #[error("constraint matrix is singular on shell")]
    SingularOnShell,
    #[error("constraint chain too short: {0} entries")]
    ShortChain(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseSpace {
    coords: Vec<Symbol>,
    momenta: Vec<Symbol>,
    multiplier: Option<(Symbol, Symbol, Symbol)>,
    constants: Vec<Symbol>,
}

impl PhaseSpace {
    /// Coordinates get momenta `p_<q>`; velocities are `<q>dot`.
    pub fn new(coords: &[&str], constants: &[&str]) -> Self {
        PhaseSpace {
            coords: coords.iter().map(|q| Symbol::new(q, SymbolKind::Coordinate)).collect(),
            momenta: coords.iter().map(|q| Symbol::new(&format!("p_{q}"), SymbolKind::Momentum)).collect(),
            multiplier: None,
            constants: constants.iter().map(|c| Symbol::new(c, SymbolKind::Constant)).collect(),
        }
    }

    /// Register the multiplier `lambda`, its momentum `p_lambda` and the
    /// independent velocity `lambdadot`.
    pub fn with_multiplier(mut self) -> Self {
        self.multiplier = Some((
            Symbol::new("lambda", SymbolKind::Multiplier),
            Symbol::new("p_lambda", SymbolKind::Momentum),
            Symbol::new("lambdadot", SymbolKind::Multiplier),
        ));
        self
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn momenta(&self) -> &[Symbol] {
        &self.momenta
    }

    pub fn lambda(&self) -> Option<&Symbol> {
        self.multiplier.as_ref().map(|m| &m.0)
    }

    pub fn p_lambda(&self) -> Option<&Symbol> {
        self.multiplier.as_ref().map(|m| &m.1)
    }

    pub fn lambda_dot(&self) -> Option<&Symbol> {
        self.multiplier.as_ref().map(|m| &m.2)
    }

    pub fn velocity(q: &Symbol) -> String {
        format!("{}dot", q.name())
    }

    /// Canonical pairs, the multiplier pair last.
    pub fn pairs(&self) -> Vec<(&Symbol, &Symbol)> {
        let mut out: Vec<_> = self.coords.iter().zip(self.momenta.iter()).collect();
        if let Some((l, pl, _)) = &self.multiplier {
            out.push((l, pl));
        }
        out
    }

    pub fn symbol_names(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self
            .coords
            .iter()
            .chain(self.momenta.iter())
            .chain(self.constants.iter())
            .map(|s| s.name().to_string())
            .collect();
        if let Some((l, pl, ld)) = &self.multiplier {
            for s in [l, pl, ld] {
                out.insert(s.name().to_string());
            }
        }
        out
    }

    pub fn check_registered(&self, e: &Expr) -> Result<(), MechError> {
        let known = self.symbol_names();
        match e.symbols().into_iter().find(|s| !known.contains(s)) {
            Some(s) => Err(MechError::UnregisteredSymbol(s)),
            None => Ok(()),
        }
    }
}

pub fn poisson_bracket(f: &Expr, g: &Expr, ps: &PhaseSpace) -> Result<Expr, MechError> {
    ps.check_registered(f)?;
    ps.check_registered(g)?;
    Ok(bracket_unchecked(f, g, ps))
}

pub(crate) fn bracket_unchecked(f: &Expr, g: &Expr, ps: &PhaseSpace) -> Expr {
    let mut acc = Expr::zero();
    for (q, p) in ps.pairs() {
        let (q, p) = (q.name(), p.name());
        if f.mentions(q) && g.mentions(p) {
            acc = acc + f.diff(q) * g.diff(p);
        }
        if f.mentions(p) && g.mentions(q) {
            acc = acc - f.diff(p) * g.diff(q);
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    Primary,
    Secondary,
    MultiplierFixing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub index: usize,
    pub expr: Expr,
    pub kind: ConstraintKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Legendre {
    /// `p_k = m_k(q) * qdot_k`, stored as `(p_k, m_k)`.
    pub masses: Vec<(Symbol, Expr)>,
    pub hamiltonian: Expr,
    pub primary: Option<Constraint>,
}

/// Legendre transform of `sum m_k(q) qdot_k^2 / 2 - V(q, lambda)`.
pub fn legendre(lagrangian: &Expr, ps: &PhaseSpace) -> Result<Legendre, MechError> {
    let mut potential = lagrangian.clone();
    let mut masses = Vec::new();
    let mut h = Expr::zero();
    for (q, p) in ps.coords.iter().zip(ps.momenta.iter()) {
        let v = PhaseSpace::velocity(q);
        let cs = potential.poly_coefficients(&v)?;
        if cs.keys().any(|k| *k == 1 || *k > 2) {
            return Err(MechError::NonQuadraticLagrangian(v));
        }
        let mass = cs.get(&2).cloned().unwrap_or_default() * Expr::int(2);
        if mass.is_zero() {
            return Err(MechError::SingularVelocityMap(q.name().to_string()));
        }
        let pk = p.expr();
        h = h + &pk * &pk / (Expr::int(2) * &mass);
        potential = cs.get(&0).cloned().unwrap_or_default();
        masses.push((p.clone(), mass));
    }
    for v in potential.symbols() {
        if v.ends_with("dot") && ps.coords.iter().any(|q| PhaseSpace::velocity(q) == v) {
            return Err(MechError::NonQuadraticLagrangian(v));
        }
    }
    h = h - potential;
    let mut primary = None;
    if let (Some(pl), Some(ld)) = (ps.p_lambda(), ps.lambda_dot()) {
        h = h + ld.expr() * pl.expr();
        primary = Some(Constraint { index: 1, expr: pl.expr(), kind: ConstraintKind::Primary });
    }
    ps.check_registered(&h)?;
    Ok(Legendre { masses, hamiltonian: h, primary })
}

pub const DEFAULT_CHAIN_DEPTH: usize = 10;

/// Iterate the conservation condition from the primary constraint until an
/// entry fixes `lambdadot`.
pub fn generate_chain(
    primary: Option<&Constraint>,
    h_p: &Expr,
    ps: &PhaseSpace,
    max_depth: usize,
) -> Result<Vec<Constraint>, MechError> {
    let Some(primary) = primary else { return Ok(Vec::new()) };
    let lam = ps.lambda().map(|s| s.name().to_string());
    let lam_dot = ps.lambda_dot().map(|s| s.name().to_string());
    let mut chain = vec![primary.clone()];
    loop {
        if chain.len() > max_depth {
            return Err(MechError::NonterminatingChain(max_depth));
        }
        let next = poisson_bracket(&chain.last().unwrap().expr, h_p, ps)?;
        if next.is_zero() {
            return Ok(chain);
        }
        let fixes = |name: &Option<String>| -> Result<bool, MechError> {
            match name {
                Some(n) if next.mentions(n) => {
                    let (_, lin) = next.affine_in(n)?;
                    Ok(!lin.is_zero())
                }
                _ => Ok(false),
            }
        };
        let kind = if fixes(&lam_dot)? || fixes(&lam)? {
            ConstraintKind::MultiplierFixing
        } else {
            ConstraintKind::Secondary
        };
        let terminal = fixes(&lam_dot)?;
        let next = if terminal { reduce_on_velocity_constraints(next, &chain, ps)? } else { next };
        chain.push(Constraint { index: chain.len() + 1, expr: next, kind });
        if terminal {
            return Ok(chain);
        }
    }
}

/// The entry fixing `lambdadot` only matters on the constraint surface, so
/// it is reduced on each earlier secondary that is linear in the momenta and
/// free of the multiplier: that constraint is solved for the last momentum it
/// contains and substituted.
fn reduce_on_velocity_constraints(e: Expr, chain: &[Constraint], ps: &PhaseSpace) -> Result<Expr, MechError> {
    let mut out = e;
    let lam = ps.lambda().map(|s| s.name().to_string());
    for c in chain.iter().filter(|c| c.kind == ConstraintKind::Secondary) {
        if lam.as_deref().is_some_and(|l| c.expr.mentions(l)) {
            continue;
        }
        let linear = |p: &Symbol| -> Result<bool, MechError> {
            if !c.expr.mentions(p.name()) {
                return Ok(false);
            }
            Ok(c.expr.poly_coefficients(p.name())?.keys().all(|k| *k <= 1))
        };
        let mut target = None;
        for p in ps.momenta.iter().rev() {
            if linear(p)? {
                target = Some(p);
                break;
            }
        }
        if let Some(p) = target {
            out = out.subst_one(p.name(), &solve_affine(&c.expr, p.name())?)?;
        }
    }
    Ok(out)
}

/// Solve an affine relation `c0 + c1 * name = 0` for `name`.
pub fn solve_affine(e: &Expr, name: &str) -> Result<Expr, MechError> {
    let (c0, c1) = e.affine_in(name)?;
    Ok(-c0.div_expr(&c1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::ex;

    fn intrinsic() -> PhaseSpace {
        PhaseSpace::new(&["r", "theta", "phi"], &["m", "a", "b"]).with_multiplier()
    }

    #[test]
    fn canonical_pair() {
        let ps = intrinsic();
        assert!(poisson_bracket(&ex("theta"), &ex("p_theta"), &ps).unwrap().is_one());
        assert!(poisson_bracket(&ex("theta"), &ex("p_phi"), &ps).unwrap().is_zero());
    }

    #[test]
    fn unregistered_symbol_is_rejected() {
        let ps = intrinsic();
        assert_eq!(
            poisson_bracket(&ex("q"), &ex("p_theta"), &ps),
            Err(MechError::UnregisteredSymbol("q".into()))
        );
    }

    #[test]
    fn free_particle_has_no_constraints() {
        let ps = PhaseSpace::new(&["q"], &["m"]);
        let leg = legendre(&ex("m*qdot^2/2"), &ps).unwrap();
        assert_eq!(leg.hamiltonian, ex("p_q^2/(2*m)"));
        assert!(leg.primary.is_none());
        let chain = generate_chain(leg.primary.as_ref(), &leg.hamiltonian, &ps, DEFAULT_CHAIN_DEPTH).unwrap();
        assert!(chain.is_empty());
    }

    #[test]
    fn singular_velocity_map() {
        let ps = PhaseSpace::new(&["q", "s"], &["m"]);
        assert_eq!(
            legendre(&ex("m*qdot^2/2 - s"), &ps),
            Err(MechError::SingularVelocityMap("s".into()))
        );
    }

    #[test]
    fn runaway_chain_is_reported() {
        // a harmonic multiplier sector never produces lambdadot
        let ps = PhaseSpace::new(&["q"], &["m"]).with_multiplier();
        let primary = Constraint { index: 1, expr: ex("q"), kind: ConstraintKind::Primary };
        let h = ex("p_q^2/2 + q^2/2");
        assert_eq!(generate_chain(Some(&primary), &h, &ps, 6), Err(MechError::NonterminatingChain(6)));
    }
}
