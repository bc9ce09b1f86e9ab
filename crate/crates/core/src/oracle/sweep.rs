use serde::Serialize;

use super::{commutator_residual_with, discretize, hermiticity_defect_with, Execution, Grid, OracleError, Residual};
use crate::quantize::DiffOp;

/// Residuals at or below this are treated as converged to roundoff.
pub const ROUNDOFF_FLOOR: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    /// `[a, b] = expected`.
    Commutator { a: DiffOp, b: DiffOp, expected: DiffOp },
    /// Symmetry of the operator under the area measure.
    Hermiticity(DiffOp),
}

/// A named identity and whether it should hold.
#[derive(Debug, Clone, PartialEq)]
pub struct Identity {
    pub name: String,
    pub check: Check,
    pub expect_zero: bool,
}

impl Identity {
    pub fn commutator(name: impl Into<String>, a: DiffOp, b: DiffOp, expected: DiffOp) -> Self {
        Identity { name: name.into(), check: Check::Commutator { a, b, expected }, expect_zero: true }
    }

    pub fn hermiticity(name: impl Into<String>, d: DiffOp) -> Self {
        Identity { name: name.into(), check: Check::Hermiticity(d), expect_zero: true }
    }

    /// Mark as a witness that must not vanish.
    pub fn witness(mut self) -> Self {
        self.expect_zero = false;
        self
    }

    pub fn evaluate(&self, g: &Grid, exec: Execution) -> Result<Residual, OracleError> {
        match &self.check {
            Check::Commutator { a, b, expected } => {
                let (a, b, e) = (discretize(a, g)?, discretize(b, g)?, discretize(expected, g)?);
                Ok(commutator_residual_with(&a, &b, &e, g, exec))
            }
            Check::Hermiticity(d) => {
                let r = hermiticity_defect_with(d, g, exec)?;
                Ok(Residual { absolute: r, relative: r })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub identity: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub residual: f64,
    pub absolute: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub identity: String,
    pub expect_zero: bool,
    pub rows: Vec<SweepRow>,
    /// Monotone decrease by at least 10x across the sweep, or already at
    /// roundoff.
    pub converged: bool,
    pub non_convergence: bool,
}

impl Sweep {
    pub fn last(&self) -> &SweepRow {
        self.rows.last().expect("sweep has rows")
    }

    /// Zero identities must converge; witnesses must stay above `floor` in
    /// absolute terms at every N.
    pub fn passes(&self, zero_tol: f64, witness_floor: f64) -> bool {
        if self.expect_zero {
            self.last().residual <= zero_tol
        } else {
            self.rows.iter().all(|r| r.absolute > witness_floor)
        }
    }
}

fn converged(rows: &[SweepRow]) -> bool {
    let last = rows.last().map_or(0.0, |r| r.residual);
    if last <= ROUNDOFF_FLOOR {
        return true;
    }
    let monotone = rows.windows(2).all(|w| w[1].residual < w[0].residual);
    monotone && rows[0].residual >= 10.0 * last
}

/// Evaluate an identity over increasing grid sizes.
pub fn convergence_sweep(
    identity: &Identity,
    ns: &[usize],
    a: f64,
    b: f64,
    exec: Execution,
) -> Result<Sweep, OracleError> {
    if ns.is_empty() || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(OracleError::InvalidGrid(format!("grid sizes {ns:?} must be nonempty and increasing")));
    }
    let grids: Vec<Grid> = ns.iter().map(|&n| Grid::new(n, a, b)).collect::<Result<_, _>>()?;
    let results = exec.map(grids.len(), |i| identity.evaluate(&grids[i], exec));
    let mut rows = Vec::new();
    for (g, r) in grids.iter().zip(results) {
        let r = r?;
        rows.push(SweepRow { identity: identity.name.clone(), n: g.n(), residual: r.relative, absolute: r.absolute });
    }
    let converged = converged(&rows);
    Ok(Sweep { identity: identity.name.clone(), expect_zero: identity.expect_zero, rows, non_convergence: !converged, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::ex;

    #[test]
    fn positions_commute_at_every_n() {
        let id = Identity::commutator(
            "[x,y]",
            DiffOp::mul(ex("(a + b*sin(theta))*cos(phi)")),
            DiffOp::mul(ex("(a + b*sin(theta))*sin(phi)")),
            DiffOp::zero(),
        );
        let s = convergence_sweep(&id, &[8, 16], 2.0, 1.0, Execution::Sequential).unwrap();
        assert!(s.rows.iter().all(|r| r.absolute <= 1e-14));
        assert!(s.converged);
    }

    #[test]
    fn sizes_must_increase() {
        let id = Identity::hermiticity("p", DiffOp::zero());
        assert!(convergence_sweep(&id, &[16, 16], 2.0, 1.0, Execution::Sequential).is_err());
    }
}
