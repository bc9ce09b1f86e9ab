use std::collections::BTreeMap;

use super::{bracket_unchecked, generate_chain, legendre, solve_affine, Constraint, MechError, PhaseSpace};
use crate::symcore::Expr;

pub type Matrix = Vec<Vec<Expr>>;

/// How a system is taken on shell.
///
/// `strong` holds the substitutions that hold identically on the reduced
/// phase space (used for the reduced Hamiltonian); `surface` parametrizes the
/// whole constraint surface and is applied after every bracket is computed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Shell {
    pub strong: BTreeMap<String, Expr>,
    pub surface: BTreeMap<String, Expr>,
}

#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub phase_space: PhaseSpace,
    pub lagrangian: Expr,
    pub h_p: Expr,
    pub h_c: Expr,
    pub chain: Vec<Constraint>,
    /// `{phi_u, phi_v}` for u, v in 1..=4, off shell.
    pub c: Matrix,
    pub c_onshell: Matrix,
    pub c_inv: Matrix,
    /// Full on-shell map: surface parametrization plus the multiplier values.
    pub onshell: BTreeMap<String, Expr>,
}

impl ConstraintSystem {
    pub fn build(ps: PhaseSpace, lagrangian: Expr, shell: Shell, max_depth: usize) -> Result<Self, MechError> {
        let leg = legendre(&lagrangian, &ps)?;
        let chain = generate_chain(leg.primary.as_ref(), &leg.hamiltonian, &ps, max_depth)?;
        if chain.len() < 4 {
            return Err(MechError::ShortChain(chain.len()));
        }
        let mut onshell = shell.surface.clone();
        if let Some(lam) = ps.lambda() {
            let v = solve_affine(&chain[3].expr, lam.name())?.subst(&shell.surface)?;
            onshell.insert(lam.name().to_string(), v);
        }
        if let (Some(ld), Some(last)) = (ps.lambda_dot(), chain.get(4)) {
            let v = solve_affine(&last.expr, ld.name())?.subst(&onshell)?;
            onshell.insert(ld.name().to_string(), v);
        }
        let c = build_constraint_matrix(&chain[..4], &ps);
        let c_onshell = on_shell_matrix(&c, &onshell)?;
        let c_inv = invert_constraint_matrix(&c_onshell)?;
        let h_c = reduce_hamiltonian(&leg.hamiltonian, &ps, &shell.strong)?;
        Ok(ConstraintSystem { phase_space: ps, lagrangian, h_p: leg.hamiltonian, h_c, chain, c, c_onshell, c_inv, onshell })
    }

    pub fn on_shell(&self, e: &Expr) -> Result<Expr, MechError> {
        Ok(e.subst(&self.onshell)?)
    }

    pub fn poisson(&self, f: &Expr, g: &Expr) -> Result<Expr, MechError> {
        super::poisson_bracket(f, g, &self.phase_space)
    }

    pub fn dirac(&self, a: &Expr, b: &Expr) -> Result<Expr, MechError> {
        dirac_bracket(a, b, self)
    }

    /// `C * C^-1` on shell.
    pub fn identity_check(&self) -> Matrix {
        mat_mul(&self.c_onshell, &self.c_inv)
    }
}

pub fn build_constraint_matrix(chain: &[Constraint], ps: &PhaseSpace) -> Matrix {
    let n = chain.len();
    let mut c = vec![vec![Expr::zero(); n]; n];
    for u in 0..n {
        for v in (u + 1)..n {
            let e = bracket_unchecked(&chain[u].expr, &chain[v].expr, ps);
            c[v][u] = -&e;
            c[u][v] = e;
        }
    }
    c
}

fn on_shell_matrix(c: &Matrix, onshell: &BTreeMap<String, Expr>) -> Result<Matrix, MechError> {
    c.iter()
        .map(|row| row.iter().map(|e| Ok(e.subst(onshell)?)).collect())
        .collect()
}

pub(crate) fn mat_mul(x: &Matrix, y: &Matrix) -> Matrix {
    let n = x.len();
    let m = y[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Expr::zero();
                    for (k, yk) in y.iter().enumerate() {
                        if !x[i][k].is_zero() && !yk[j].is_zero() {
                            acc = acc + &x[i][k] * &yk[j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Exact inverse by Gauss-Jordan elimination over expressions.
pub fn invert_constraint_matrix(c: &Matrix) -> Result<Matrix, MechError> {
    let n = c.len();
    let mut a: Vec<Vec<Expr>> = c.clone();
    let mut inv: Matrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(MechError::SingularOnShell)?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].inv()?;
        for j in 0..n {
            if !a[col][j].is_zero() {
                a[col][j] = &a[col][j] * &p;
            }
            if !inv[col][j].is_zero() {
                inv[col][j] = &inv[col][j] * &p;
            }
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                if !a[col][j].is_zero() {
                    a[r][j] = &a[r][j] - &f * &a[col][j];
                }
                if !inv[col][j].is_zero() {
                    inv[r][j] = &inv[r][j] - &f * &inv[col][j];
                }
            }
        }
    }
    Ok(inv)
}

/// `{A,B}_D`, every Poisson bracket taken off shell and substituted last.
pub fn dirac_bracket(a: &Expr, b: &Expr, cs: &ConstraintSystem) -> Result<Expr, MechError> {
    let ps = &cs.phase_space;
    ps.check_registered(a)?;
    ps.check_registered(b)?;
    let n = cs.c_inv.len();
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for phi in &cs.chain[..n] {
        left.push(cs.on_shell(&bracket_unchecked(a, &phi.expr, ps))?);
        right.push(cs.on_shell(&bracket_unchecked(&phi.expr, b, ps))?);
    }
    let mut acc = cs.on_shell(&bracket_unchecked(a, b, ps))?;
    for u in 0..n {
        if left[u].is_zero() {
            continue;
        }
        for v in 0..n {
            if cs.c_inv[u][v].is_zero() || right[v].is_zero() {
                continue;
            }
            acc = acc - &left[u] * &cs.c_inv[u][v] * &right[v];
        }
    }
    Ok(acc)
}

/// Drop the multiplier terms and apply the strong substitutions.
pub fn reduce_hamiltonian(h_p: &Expr, ps: &PhaseSpace, strong: &BTreeMap<String, Expr>) -> Result<Expr, MechError> {
    let mut drop = strong.clone();
    for s in [ps.lambda(), ps.lambda_dot()].into_iter().flatten() {
        drop.insert(s.name().to_string(), Expr::zero());
    }
    Ok(h_p.subst(&drop)?)
}

/// Dirac brackets between named entries, keyed by ordered name pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiracTable {
    pub entries: BTreeMap<(String, String), Expr>,
}

impl DiracTable {
    /// Brackets among `vars`, plus each var with `H_c` under the key `"H"`.
    pub fn build(cs: &ConstraintSystem, vars: &[(&str, Expr)]) -> Result<Self, MechError> {
        let mut entries = BTreeMap::new();
        for (i, (ni, ei)) in vars.iter().enumerate() {
            for (nj, ej) in &vars[i + 1..] {
                let d = cs.dirac(ei, ej)?;
                entries.insert((nj.to_string(), ni.to_string()), -&d);
                entries.insert((ni.to_string(), nj.to_string()), d);
            }
            let d = cs.dirac(ei, &cs.h_c)?;
            entries.insert(("H".to_string(), ni.to_string()), -&d);
            entries.insert((ni.to_string(), "H".to_string()), d);
        }
        Ok(DiracTable { entries })
    }

    pub fn get(&self, a: &str, b: &str) -> Option<&Expr> {
        self.entries.get(&(a.to_string(), b.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::ex;

    #[test]
    fn two_by_two_inverse() {
        let c = vec![vec![Expr::zero(), ex("c")], vec![ex("-c"), Expr::zero()]];
        let inv = invert_constraint_matrix(&c).unwrap();
        assert_eq!(inv, vec![vec![Expr::zero(), ex("-1/c")], vec![ex("1/c"), Expr::zero()]]);
    }

    #[test]
    fn singular_matrix() {
        let c = vec![vec![Expr::zero(), Expr::zero()], vec![Expr::zero(), Expr::zero()]];
        assert_eq!(invert_constraint_matrix(&c), Err(MechError::SingularOnShell));
    }
}
