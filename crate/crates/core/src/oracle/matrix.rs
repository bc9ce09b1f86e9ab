use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{Grid, OracleError};
use crate::quantize::{DiffOp, PHI, THETA};
use crate::symcore::{eval_numeric, Atom, Expr, Poly, SymError};

/// A differential operator on a grid, stored as coefficient samples per
/// derivative order. Applying it is spectral differentiation followed by
/// pointwise multiplication.
#[derive(Debug, Clone)]
pub struct OpMatrix {
    n: usize,
    terms: Vec<((u32, u32), Vec<Complex64>)>,
}

fn bare_angle(p: &Poly) -> Option<&'static str> {
    for a in p.atoms() {
        match &a {
            Atom::Sym(s) if &**s == THETA => return Some(THETA),
            Atom::Sym(s) if &**s == PHI => return Some(PHI),
            Atom::Sqrt(inner) => {
                if let Some(s) = bare_angle(inner) {
                    return Some(s);
                }
            }
            _ => {}
        }
    }
    None
}

fn check_coefficient(c: &Expr) -> Result<(), OracleError> {
    if c.has_half_phase() {
        return Err(OracleError::HalfPhaseResidue(c.to_string()));
    }
    let polys = std::iter::once(c.numerator()).chain(c.denominator_factors().iter().map(|(f, _)| f));
    for p in polys {
        if let Some(s) = bare_angle(p) {
            return Err(OracleError::NonPeriodic(format!("bare {s} in {c}")));
        }
    }
    Ok(())
}

/// Samples of a coefficient on the grid.
pub fn sample_expr(c: &Expr, g: &Grid) -> Result<Vec<Complex64>, OracleError> {
    check_coefficient(c)?;
    let mut point: BTreeMap<String, Complex64> = [("a", g.a), ("b", g.b), ("m", g.m), ("hbar", g.hbar)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), Complex64::new(v, 0.0)))
        .collect();
    let mut out = Vec::with_capacity(g.len());
    for &t in g.theta() {
        point.insert(THETA.into(), Complex64::new(t, 0.0));
        for &p in g.phi() {
            point.insert(PHI.into(), Complex64::new(p, 0.0));
            match eval_numeric(c, &point) {
                Ok(v) if v.is_finite() => out.push(v),
                Ok(_) | Err(SymError::Pole(_)) | Err(SymError::DivisionByZero) => {
                    return Err(OracleError::PoleOnGrid(format!("{c} at theta = {t}, phi = {p}")))
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(out)
}

/// Discretize a differential operator on the grid.
pub fn discretize(d: &DiffOp, g: &Grid) -> Result<OpMatrix, OracleError> {
    let mut terms = Vec::new();
    for (&idx, c) in d.terms() {
        terms.push((idx, sample_expr(c, g)?));
    }
    Ok(OpMatrix { n: g.n(), terms })
}

impl OpMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Diagonal operator from samples.
    pub fn diagonal(n: usize, samples: Vec<Complex64>) -> Self {
        assert_eq!(samples.len(), n * n);
        OpMatrix { n, terms: vec![((0, 0), samples)] }
    }

    pub fn zero(n: usize) -> Self {
        OpMatrix { n, terms: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_multiplication(&self) -> bool {
        self.terms.iter().all(|(idx, _)| *idx == (0, 0))
    }

    pub fn apply(&self, g: &Grid, u: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(g.n(), self.n, "operator and grid sizes differ");
        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![zero; u.len()];
        if self.terms.is_empty() {
            return out;
        }
        let mut hat: Option<Vec<Complex64>> = None;
        for ((k, l), coeff) in &self.terms {
            if (*k, *l) == (0, 0) {
                for ((o, c), v) in out.iter_mut().zip(coeff).zip(u) {
                    *o += c * v;
                }
                continue;
            }
            let hat = hat.get_or_insert_with(|| {
                let mut h = u.to_vec();
                g.fft2(&mut h);
                h
            });
            let du = derivative(g, hat, *k, *l);
            for ((o, c), v) in out.iter_mut().zip(coeff).zip(&du) {
                *o += c * v;
            }
        }
        out
    }
}

/// `d_theta^k d_phi^l` of the function whose transform is `hat`.
fn derivative(g: &Grid, hat: &[Complex64], k: u32, l: u32) -> Vec<Complex64> {
    let n = g.n();
    let i = Complex64::i();
    let ft: Vec<Complex64> = (0..n).map(|j| (i * g.wavenumber(j)).powu(k)).collect();
    let fp: Vec<Complex64> = (0..n).map(|q| (i * g.wavenumber(q)).powu(l)).collect();
    let mut out = Vec::with_capacity(hat.len());
    for (row, t) in hat.chunks(n).zip(&ft) {
        out.extend(row.iter().zip(&fp).map(|(h, p)| h * t * p));
    }
    g.ifft2(&mut out);
    out
}
