//! Floating-point evaluation and the randomized equality probe.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{Atom, Poly};
use super::{Expr, SymError};

const POLE_FLOOR: f64 = 1e-300;

fn eval_atom(
    a: &Atom,
    point: &BTreeMap<String, Complex64>,
    cache: &mut HashMap<Atom, Complex64>,
) -> Result<Complex64, SymError> {
    if let Some(v) = cache.get(a) {
        return Ok(*v);
    }
    let get = |s: &str| point.get(s).copied().ok_or_else(|| SymError::Unbound(s.to_string()));
    let v = match a {
        Atom::Sym(s) => get(s)?,
        Atom::Sin(s) => get(s)?.sin(),
        Atom::Cos(s) => get(s)?.cos(),
        Atom::Phase(s) => (Complex64::i() * get(s)? * 0.5).exp(),
        Atom::Sqrt(p) => eval_poly(p, point, cache)?.sqrt(),
    };
    cache.insert(a.clone(), v);
    Ok(v)
}

fn eval_poly(
    p: &Poly,
    point: &BTreeMap<String, Complex64>,
    cache: &mut HashMap<Atom, Complex64>,
) -> Result<Complex64, SymError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, c) in p.terms() {
        let mut t = c.to_complex();
        for (a, e) in m.0.iter() {
            t *= eval_atom(a, point, cache)?.powu(*e);
        }
        acc += t;
    }
    Ok(acc)
}

/// Evaluate at a point binding every symbol.
pub fn eval_numeric(e: &Expr, point: &BTreeMap<String, Complex64>) -> Result<Complex64, SymError> {
    let mut cache = HashMap::new();
    let num = eval_poly(e.numerator(), point, &mut cache)?;
    let mut den = Complex64::new(1.0, 0.0);
    for (f, k) in e.denominator_factors() {
        den *= eval_poly(f, point, &mut cache)?.powu(*k);
    }
    if den.norm() < POLE_FLOOR || !den.is_finite() {
        return Err(SymError::Pole(e.to_string()));
    }
    Ok(num / den)
}

/// Sample value for a symbol on the admissible domain `a > b > 0`.
pub fn probe_point<R: Rng>(names: &BTreeSet<String>, angles: &BTreeSet<String>, rng: &mut R) -> BTreeMap<String, Complex64> {
    names
        .iter()
        .map(|n| {
            let v = if angles.contains(n) {
                rng.gen_range(0.0..TAU)
            } else {
                match n.as_str() {
                    "a" => rng.gen_range(2.5..3.5),
                    "b" => rng.gen_range(0.5..1.5),
                    _ => rng.gen_range(0.5..1.5),
                }
            };
            (n.clone(), Complex64::new(v, 0.0))
        })
        .collect()
}

fn angle_symbols(e: &Expr, out: &mut BTreeSet<String>) {
    let mut visit = |p: &Poly| {
        for a in p.atoms() {
            if let Atom::Sin(s) | Atom::Cos(s) | Atom::Phase(s) = a {
                out.insert(s.to_string());
            }
        }
    };
    visit(e.numerator());
    for (f, _) in e.denominator_factors() {
        visit(f);
    }
}

#[derive(Debug, Clone)]
pub struct Probe {
    pub points: usize,
    pub rel_tol: f64,
    pub seed: u64,
    pub max_attempts: usize,
}

impl Default for Probe {
    fn default() -> Self {
        Probe { points: 16, rel_tol: 1e-9, seed: 0x5eed, max_attempts: 256 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub agree: bool,
    pub max_rel: f64,
    pub points: usize,
}

impl Probe {
    /// Compare two expressions at random pole-free points; poles resample.
    pub fn compare(&self, e1: &Expr, e2: &Expr) -> Result<ProbeReport, SymError> {
        let mut names = e1.symbols();
        names.extend(e2.symbols());
        let mut angles = BTreeSet::from(["theta".to_string(), "phi".to_string()]);
        angle_symbols(e1, &mut angles);
        angle_symbols(e2, &mut angles);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut max_rel: f64 = 0.0;
        let mut done = 0;
        let mut attempts = 0;
        while done < self.points {
            attempts += 1;
            if attempts > self.max_attempts {
                return Err(SymError::ProbeDomain(self.max_attempts));
            }
            let pt = probe_point(&names, &angles, &mut rng);
            let (v1, v2) = match (eval_numeric(e1, &pt), eval_numeric(e2, &pt)) {
                (Ok(v1), Ok(v2)) => (v1, v2),
                (Err(SymError::Pole(_)), _) | (_, Err(SymError::Pole(_))) => continue,
                (Err(e), _) | (_, Err(e)) => return Err(e),
            };
            if !v1.is_finite() || !v2.is_finite() {
                continue;
            }
            let scale = v1.norm().max(v2.norm()).max(1.0);
            max_rel = max_rel.max((v1 - v2).norm() / scale);
            done += 1;
        }
        Ok(ProbeReport { agree: max_rel <= self.rel_tol, max_rel, points: done })
    }

    pub fn is_zero(&self, e: &Expr) -> Result<ProbeReport, SymError> {
        self.compare(e, &Expr::zero())
    }
}
