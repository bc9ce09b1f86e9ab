use num_complex::Complex64;
use serde::Serialize;

use super::{discretize, Execution, Grid, OpMatrix, OracleError};
use crate::quantize::DiffOp;
use crate::symcore::{ex, Expr};

const POWER_ITERATIONS: usize = 200;
const POWER_TOL: f64 = 1e-6;

/// Fourier modes `(p, q)` with `|p|, |q| <= N/4`.
pub fn band_modes(g: &Grid) -> Vec<(i64, i64)> {
    let c = (g.n() / 4) as i64;
    let mut out = Vec::new();
    for p in -c..=c {
        for q in -c..=c {
            out.push((p, q));
        }
    }
    out
}

fn bin(g: &Grid, p: i64) -> usize {
    p.rem_euclid(g.n() as i64) as usize
}

/// Unit-norm samples of `exp(i (p theta + q phi))`.
pub fn mode(g: &Grid, p: i64, q: i64) -> Vec<Complex64> {
    let s = 1.0 / g.n() as f64;
    g.sample(|t, f| Complex64::new(0.0, p as f64 * t + q as f64 * f).exp() * s)
}

/// Dense matrix `Q^H T Q` of a linear map restricted to the band, stored by
/// columns.
pub fn band_matrix<F>(g: &Grid, exec: Execution, t: F) -> Vec<Vec<Complex64>>
where
    F: Fn(&[Complex64]) -> Vec<Complex64> + Sync + Send,
{
    let modes = band_modes(g);
    let s = 1.0 / g.n() as f64;
    exec.map(modes.len(), |c| {
        let (p, q) = modes[c];
        let mut v = t(&mode(g, p, q));
        g.fft2(&mut v);
        modes.iter().map(|&(pp, qq)| v[g.index(bin(g, pp), bin(g, qq))] * s).collect()
    })
}

fn mat_vec(cols: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
    let mut y = vec![Complex64::new(0.0, 0.0); cols.first().map_or(0, Vec::len)];
    for (col, xc) in cols.iter().zip(x) {
        if *xc == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (yi, a) in y.iter_mut().zip(col) {
            *yi += a * xc;
        }
    }
    y
}

fn mat_h_vec(cols: &[Vec<Complex64>], y: &[Complex64]) -> Vec<Complex64> {
    cols.iter().map(|col| col.iter().zip(y).map(|(a, v)| a.conj() * v).sum()).collect()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value by power iteration on `A^H A`, stopping at a
/// relative change of 1e-6.
pub fn operator_norm(cols: &[Vec<Complex64>]) -> f64 {
    operator_norm_to(cols, POWER_TOL, POWER_ITERATIONS)
}

pub fn operator_norm_to(cols: &[Vec<Complex64>], tol: f64, max_iter: usize) -> f64 {
    let n = cols.len();
    if n == 0 {
        return 0.0;
    }
    // fixed, generic start vector
    let mut x: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + 0.5 * (i as f64).sin(), 0.25 * (1.7 * i as f64).cos())).collect();
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut sigma = 0.0;
    for _ in 0..max_iter {
        let y = mat_vec(cols, &x);
        let ny = norm(&y);
        if ny == 0.0 {
            return 0.0;
        }
        let z = mat_h_vec(cols, &y);
        let nz = norm(&z);
        let next = ny;
        x = z.into_iter().map(|v| v / nz).collect();
        if (next - sigma).abs() <= tol * next {
            return next.max(sigma);
        }
        sigma = next;
    }
    sigma
}

/// Band-limited residual of an operator identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    /// `||R||` on the band.
    pub absolute: f64,
    /// `||R|| / (||expected|| + 1)`.
    pub relative: f64,
}

/// `||(AB - BA) - expected||` on the band, with its normalized form.
pub fn commutator_residual(a: &OpMatrix, b: &OpMatrix, expected: &OpMatrix, g: &Grid) -> Residual {
    commutator_residual_with(a, b, expected, g, Execution::default())
}

pub fn commutator_residual_with(a: &OpMatrix, b: &OpMatrix, expected: &OpMatrix, g: &Grid, exec: Execution) -> Residual {
    let r = band_matrix(g, exec, |u| {
        let ab = a.apply(g, &b.apply(g, u));
        let ba = b.apply(g, &a.apply(g, u));
        let e = expected.apply(g, u);
        ab.iter().zip(&ba).zip(&e).map(|((x, y), z)| x - y - z).collect()
    });
    let absolute = operator_norm(&r);
    let e_norm = if expected.is_empty() {
        0.0
    } else {
        operator_norm(&band_matrix(g, exec, |u| expected.apply(g, u)))
    };
    Residual { absolute, relative: absolute / (e_norm + 1.0) }
}

/// `||T - T^H||` on the band for `T = W^(1/2) D W^(-1/2)`, `W` the area
/// density. The conjugation is done before discretizing, so the grid only
/// sees the symmetrized operator.
pub fn hermiticity_defect(d: &DiffOp, g: &Grid) -> Result<f64, OracleError> {
    hermiticity_defect_with(d, g, Execution::default())
}

pub fn hermiticity_defect_with(d: &DiffOp, g: &Grid, exec: Execution) -> Result<f64, OracleError> {
    let op = discretize(&measure_conjugate(d)?, g)?;
    let t = band_matrix(g, exec, |u| op.apply(g, u));
    let n = t.len();
    let diff: Vec<Vec<Complex64>> =
        (0..n).map(|c| (0..n).map(|r| t[c][r] - t[r][c].conj()).collect()).collect();
    Ok(operator_norm(&diff))
}

/// `W^(1/2) D W^(-1/2)` with `W = b (a + b sin(theta))`.
pub fn measure_conjugate(d: &DiffOp) -> Result<DiffOp, OracleError> {
    let s = ex("b*(a + b*sin(theta))").sqrt()?;
    let inv = Expr::one().div_expr(&s)?;
    Ok(DiffOp::product(&[&DiffOp::mul(s), d, &DiffOp::mul(inv)]))
}
