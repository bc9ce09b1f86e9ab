//! Linear parameter solving by coefficient comparison.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{DiffOp, QuantError};
use crate::symcore::{Atom, Expr, Poly};

/// Constants that may appear in parameter values.
pub const FIELD_SYMBOLS: [&str; 4] = ["a", "b", "m", "hbar"];

/// Where unknown parameters live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterDomain {
    /// Rational functions of the constants: coefficients are matched only
    /// against functions of the chart.
    Field,
    /// Pure numbers: coefficients are matched monomial by monomial in the
    /// constants as well.
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SolveStatus {
    Unique,
    Family,
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSolution {
    pub status: SolveStatus,
    /// Pivot parameters in terms of the free ones.
    pub assignments: BTreeMap<String, Expr>,
    pub free: Vec<String>,
    /// Zero when consistent; otherwise a nonzero witness.
    pub residual: Expr,
}

#[derive(Debug, Clone)]
struct Equation {
    coeffs: Vec<Expr>,
    rhs: Expr,
}

fn is_basis_atom(atom: &Atom, unknowns: &BTreeSet<String>, domain: ParameterDomain) -> bool {
    match atom {
        Atom::Sym(s) => {
            if unknowns.contains(&**s) {
                false
            } else {
                domain == ParameterDomain::Numeric || !FIELD_SYMBOLS.contains(&&**s)
            }
        }
        _ => true,
    }
}

/// Split one coefficient into linear equations in the unknowns.
fn equations_from(
    e: &Expr,
    unknowns: &[String],
    set: &BTreeSet<String>,
    domain: ParameterDomain,
    out: &mut Vec<Equation>,
) -> Result<(), QuantError> {
    if e.is_zero() {
        return Ok(());
    }
    for (f, _) in e.denominator_factors() {
        if set.iter().any(|u| f.mentions(u)) {
            return Err(QuantError::BasisDecomposition(format!("unknown in a denominator: {e}")));
        }
    }
    let groups = e.numerator().group_by(|a| is_basis_atom(a, set, domain));
    for (basis, rest) in groups {
        if basis.0.iter().any(|(a, _)| !matches!(a, Atom::Sym(_)) && set.iter().any(|u| a.mentions(u))) {
            return Err(QuantError::BasisDecomposition(format!("unknown inside a function: {e}")));
        }
        let mut coeffs = vec![Expr::zero(); unknowns.len()];
        let mut rhs = Poly::zero();
        for (m, c) in rest.terms() {
            let hits: Vec<_> = m.0.iter().filter(|(a, _)| matches!(a, Atom::Sym(s) if set.contains(&**s))).collect();
            match hits.as_slice() {
                [] => rhs = rhs.sub(&Poly::term(m.clone(), c.clone())),
                [(Atom::Sym(s), 1)] => {
                    let k = unknowns.iter().position(|u| u == &**s).unwrap();
                    let atom = Atom::Sym(s.clone());
                    let rest_m = m.with_degree(&atom, 0);
                    coeffs[k] = &coeffs[k] + &Expr::from_poly(Poly::term(rest_m, c.clone()));
                }
                _ => return Err(QuantError::BasisDecomposition(format!("not linear in the unknowns: {e}"))),
            }
        }
        out.push(Equation { coeffs, rhs: Expr::from_poly(rhs) });
    }
    Ok(())
}

/// Solve `residuals = 0` (every operator, coefficient and basis function)
/// together with affine `constraints = 0` for the unknowns.
pub fn solve_parameters(
    residuals: &[DiffOp],
    unknowns: &[&str],
    constraints: &[Expr],
    domain: ParameterDomain,
) -> Result<ParameterSolution, QuantError> {
    let names: Vec<String> = unknowns.iter().map(|s| s.to_string()).collect();
    let set: BTreeSet<String> = names.iter().cloned().collect();
    let mut eqs = Vec::new();
    for (_, c) in residuals.iter().flat_map(|r| r.terms()) {
        equations_from(c, &names, &set, domain, &mut eqs)?;
    }
    for c in constraints {
        // affine relations are matched as given, never split by basis
        equations_from(c, &names, &set, ParameterDomain::Field, &mut eqs)?;
    }
    let n = names.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..eqs.len()).find(|&r| !eqs[r].coeffs[col].is_zero()) else { continue };
        eqs.swap(row, p);
        let inv = eqs[row].coeffs[col].inv()?;
        let scaled = Equation {
            coeffs: eqs[row].coeffs.iter().map(|c| c * &inv).collect(),
            rhs: &eqs[row].rhs * &inv,
        };
        eqs[row] = scaled;
        for r in 0..eqs.len() {
            if r == row || eqs[r].coeffs[col].is_zero() {
                continue;
            }
            let f = eqs[r].coeffs[col].clone();
            for j in 0..n {
                if !eqs[row].coeffs[j].is_zero() {
                    eqs[r].coeffs[j] = &eqs[r].coeffs[j] - &f * &eqs[row].coeffs[j];
                }
            }
            eqs[r].rhs = &eqs[r].rhs - &f * &eqs[row].rhs;
        }
        pivots.push((row, col));
        row += 1;
    }
    if let Some(bad) = eqs[row..].iter().find(|e| !e.rhs.is_zero()) {
        return Ok(ParameterSolution {
            status: SolveStatus::Inconsistent,
            assignments: BTreeMap::new(),
            free: Vec::new(),
            residual: bad.rhs.clone(),
        });
    }
    let pivot_cols: BTreeSet<usize> = pivots.iter().map(|(_, c)| *c).collect();
    let free: Vec<String> = (0..n).filter(|c| !pivot_cols.contains(c)).map(|c| names[c].clone()).collect();
    let mut assignments = BTreeMap::new();
    for (r, c) in &pivots {
        let mut v = eqs[*r].rhs.clone();
        for j in 0..n {
            if j != *c && !eqs[*r].coeffs[j].is_zero() {
                v = v - &eqs[*r].coeffs[j] * Expr::sym(&names[j]);
            }
        }
        assignments.insert(names[*c].clone(), v);
    }
    let mut residual_expr = Expr::zero();
    for r in residuals {
        if let Some((_, c)) = r.subst(&assignments)?.terms().next() {
            residual_expr = c.clone();
            break;
        }
    }
    Ok(ParameterSolution {
        status: if free.is_empty() { SolveStatus::Unique } else { SolveStatus::Family },
        assignments,
        free,
        residual: residual_expr,
    })
}
