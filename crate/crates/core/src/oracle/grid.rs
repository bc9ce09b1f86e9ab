use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::OracleError;

/// Uniform tensor grid on the chart with numeric constants.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    pub a: f64,
    pub b: f64,
    pub m: f64,
    pub hbar: f64,
    theta: Vec<f64>,
    phi: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("m", &self.m)
            .field("hbar", &self.hbar)
            .finish()
    }
}

impl Grid {
    /// Grid with `m = hbar = 1`.
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self, OracleError> {
        Grid::with_constants(n, a, b, 1.0, 1.0)
    }

    pub fn with_constants(n: usize, a: f64, b: f64, m: f64, hbar: f64) -> Result<Self, OracleError> {
        if n < 8 || n % 2 != 0 {
            return Err(OracleError::InvalidGrid(format!("N = {n} must be even and at least 8")));
        }
        if !(b > 0.0 && a > b && a.is_finite()) {
            return Err(OracleError::InvalidGrid(format!("radii a = {a}, b = {b} need a > b > 0")));
        }
        if !(m > 0.0 && hbar > 0.0) {
            return Err(OracleError::InvalidGrid("m and hbar must be positive".into()));
        }
        let nodes: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
        let mut planner = FftPlanner::new();
        Ok(Grid {
            n,
            a,
            b,
            m,
            hbar,
            theta: nodes.clone(),
            phi: nodes,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// Flat index of `(theta_j, phi_k)`.
    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.n + k
    }

    /// Area density `b (a + b sin(theta))` at every node.
    pub fn area_density(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for &t in &self.theta {
            let w = self.b * (self.a + self.b * t.sin());
            out.extend(std::iter::repeat_n(w, self.n));
        }
        out
    }

    /// Quadrature weights for the area measure.
    pub fn weights(&self) -> Vec<f64> {
        let h = (TAU / self.n as f64).powi(2);
        self.area_density().into_iter().map(|w| w * h).collect()
    }

    /// Samples of `f(theta, phi)`.
    pub fn sample<F: Fn(f64, f64) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.len());
        for &t in &self.theta {
            for &p in &self.phi {
                out.push(f(t, p));
            }
        }
        out
    }

    /// Signed wavenumber of FFT bin `k`; the Nyquist bin maps to 0 so that
    /// odd derivatives of real data stay real.
    pub fn wavenumber(&self, k: usize) -> f64 {
        let n = self.n;
        if 2 * k == n {
            0.0
        } else if 2 * k < n {
            k as f64
        } else {
            k as f64 - n as f64
        }
    }

    /// Unnormalized 2-D forward transform in place.
    pub fn fft2(&self, data: &mut [Complex64]) {
        self.transform(data, &self.fwd);
    }

    /// Normalized 2-D inverse transform in place.
    pub fn ifft2(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inv);
        let s = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        plan.process(data);
        transpose(data, n);
        plan.process(data);
        transpose(data, n);
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for j in 0..n {
        for k in j + 1..n {
            data.swap(j * n + k, k * n + j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Grid::new(6, 2.0, 1.0).is_err());
        assert!(Grid::new(15, 2.0, 1.0).is_err());
        assert!(Grid::new(16, 1.0, 1.0).is_err());
        assert!(Grid::new(16, 2.0, 0.0).is_err());
        assert!(Grid::new(16, 2.0, 1.0).is_ok());
    }

    #[test]
    fn transform_round_trip() {
        let g = Grid::new(8, 2.0, 1.0).unwrap();
        let u = g.sample(|t, p| Complex64::new((t + 2.0 * p).cos(), t.sin() * p.cos()));
        let mut v = u.clone();
        g.fft2(&mut v);
        g.ifft2(&mut v);
        for (x, y) in u.iter().zip(&v) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn weights_integrate_area() {
        let g = Grid::new(16, 2.0, 1.0).unwrap();
        let area: f64 = g.weights().iter().sum();
        assert!((area - 4.0 * std::f64::consts::PI.powi(2) * 2.0).abs() < 1e-10);
    }
}
