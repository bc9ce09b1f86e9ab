use thiserror::Error;

use crate::symcore::{ex, Expr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("radii must satisfy a > b > 0, got a={a}, b={b}")]
    BadRadii { a: f64, b: f64 },
    #[error("a + b sin(theta) = {value} is not positive at theta = {theta}")]
    NonPositiveRadius { theta: f64, value: f64 },
}

/// Torus `((a + b sin t) cos p, (a + b sin t) sin p, b cos t)` in the chart
/// `(theta, phi)`, with symbolic radii.
#[derive(Debug, Clone)]
pub struct TorusGeometry {
    pub embedding: [Expr; 3],
    pub r_theta: [Expr; 3],
    pub r_phi: [Expr; 3],
    /// Metric diagonal `(g_tt, g_pp)`.
    pub metric: (Expr, Expr),
    pub area_density: Expr,
    pub normal: [Expr; 3],
    pub mean_curvature: Expr,
    pub gauss_curvature: Expr,
    /// `f_i = b n_i`, the gradient direction of the surface function.
    pub f: [Expr; 3],
}

fn dot(u: &[Expr; 3], v: &[Expr; 3]) -> Expr {
    &u[0] * &v[0] + &u[1] * &v[1] + &u[2] * &v[2]
}

fn d3(u: &[Expr; 3], s: &str) -> [Expr; 3] {
    [u[0].diff(s), u[1].diff(s), u[2].diff(s)]
}

impl TorusGeometry {
    pub fn new() -> Self {
        let w = ex("a + b*sin(theta)");
        let embedding = [&w * ex("cos(phi)"), &w * ex("sin(phi)"), ex("b*cos(theta)")];
        let r_theta = d3(&embedding, "theta");
        let r_phi = d3(&embedding, "phi");
        let g_tt = dot(&r_theta, &r_theta);
        let g_pp = dot(&r_phi, &r_phi);
        debug_assert!(dot(&r_theta, &r_phi).is_zero());
        let area_density = ex("b") * &w;
        // outward normal, r_theta x r_phi / |.|
        let cross = [
            &r_theta[1] * &r_phi[2] - &r_theta[2] * &r_phi[1],
            &r_theta[2] * &r_phi[0] - &r_theta[0] * &r_phi[2],
            &r_theta[0] * &r_phi[1] - &r_theta[1] * &r_phi[0],
        ];
        let normal = [&cross[0] / &area_density, &cross[1] / &area_density, &cross[2] / &area_density];
        let (m, k) = curvatures_from_forms(&embedding, &normal, &g_tt, &g_pp);
        let b = ex("b");
        let f = [&b * &normal[0], &b * &normal[1], &b * &normal[2]];
        TorusGeometry {
            embedding,
            r_theta,
            r_phi,
            metric: (g_tt, g_pp),
            area_density,
            normal,
            mean_curvature: m,
            gauss_curvature: k,
            f,
        }
    }

    /// `a + b sin(theta)`.
    pub fn w() -> Expr {
        ex("a + b*sin(theta)")
    }

    /// Numeric instantiation check: radii ordered and the radius positive on
    /// a theta grid.
    pub fn check_instance(a: f64, b: f64, samples: usize) -> Result<(), GeometryError> {
        if !(a > b && b > 0.0) || !a.is_finite() {
            return Err(GeometryError::BadRadii { a, b });
        }
        for j in 0..samples.max(1) {
            let theta = std::f64::consts::TAU * j as f64 / samples.max(1) as f64;
            let value = a + b * theta.sin();
            if value <= 0.0 {
                return Err(GeometryError::NonPositiveRadius { theta, value });
            }
        }
        Ok(())
    }

    /// Cartesian surface function `a^2 - b^2 + |x|^2 - 2 a rho`.
    pub fn surface_function() -> Expr {
        ex("a^2 - b^2 + x^2 + y^2 + z^2 - 2*a*sqrt(x^2 + y^2)")
    }

    /// `f_i` in Cartesian form.
    pub fn f_cartesian() -> [Expr; 3] {
        [ex("x - a*x/sqrt(x^2 + y^2)"), ex("y - a*y/sqrt(x^2 + y^2)"), ex("z")]
    }
}

impl Default for TorusGeometry {
    fn default() -> Self {
        TorusGeometry::new()
    }
}

/// Mean and Gaussian curvature from the first and second fundamental forms
/// of an orthogonal parametrization; with the outward normal the mean
/// curvature of a sphere is negative.
fn curvatures_from_forms(r: &[Expr; 3], n: &[Expr; 3], g_tt: &Expr, g_pp: &Expr) -> (Expr, Expr) {
    let r_t = d3(r, "theta");
    let r_p = d3(r, "phi");
    let l = dot(&d3(&r_t, "theta"), n);
    let mm = dot(&d3(&r_t, "phi"), n);
    let nn = dot(&d3(&r_p, "phi"), n);
    let mean = (&l / g_tt + &nn / g_pp) / Expr::int(2);
    let gauss = (&l * &nn - &mm * &mm) / (g_tt * g_pp);
    (mean, gauss)
}

pub fn curvatures(geom: &TorusGeometry) -> (Expr, Expr) {
    (geom.mean_curvature.clone(), geom.gauss_curvature.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::eval_numeric;
    use num_complex::Complex64;
    use std::collections::BTreeMap;

    #[test]
    fn curvatures_match_closed_forms() {
        let g = TorusGeometry::new();
        assert_eq!(g.mean_curvature, ex("-(a + 2*b*sin(theta))/(2*(a*b + b^2*sin(theta)))"));
        assert_eq!(g.gauss_curvature, ex("sin(theta)/(a*b + b^2*sin(theta))"));
    }

    #[test]
    fn curvature_values_at_sample_points() {
        let g = TorusGeometry::new();
        let at = |e: &Expr, t: f64| {
            let pt: BTreeMap<String, Complex64> = [("a", 2.0), ("b", 1.0), ("theta", t)]
                .iter()
                .map(|(k, v)| (k.to_string(), Complex64::new(*v, 0.0)))
                .collect();
            eval_numeric(e, &pt).unwrap().re
        };
        let half_pi = std::f64::consts::FRAC_PI_2;
        assert!((at(&g.mean_curvature, half_pi) + 2.0 / 3.0).abs() < 1e-14);
        assert_eq!(at(&g.gauss_curvature, 0.0), 0.0);
        let m = &g.mean_curvature;
        let diff = m * m - &g.gauss_curvature;
        assert!((at(&diff, half_pi) - 1.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn normal_is_unit_and_f_has_length_b() {
        let g = TorusGeometry::new();
        assert!(dot(&g.normal, &g.normal).is_one());
        assert_eq!(dot(&g.f, &g.f), ex("b^2"));
        assert_eq!(g.metric, (ex("b^2"), ex("(a + b*sin(theta))^2")));
    }

    #[test]
    fn embedding_lies_on_surface() {
        let g = TorusGeometry::new();
        let mut m = BTreeMap::new();
        for (k, v) in ["x", "y", "z"].iter().zip(g.embedding.iter()) {
            m.insert(k.to_string(), v.clone());
        }
        assert!(TorusGeometry::surface_function().subst(&m).unwrap().is_zero());
        let fc = TorusGeometry::f_cartesian();
        for i in 0..3 {
            assert_eq!(fc[i].subst(&m).unwrap(), g.f[i]);
        }
    }

    #[test]
    fn instance_validation() {
        assert!(TorusGeometry::check_instance(2.0, 1.0, 64).is_ok());
        assert!(TorusGeometry::check_instance(1.0, 1.0, 64).is_err());
        assert!(TorusGeometry::check_instance(1.0, 2.0, 64).is_err());
        assert!(TorusGeometry::check_instance(2.0, 0.0, 64).is_err());
    }
}
