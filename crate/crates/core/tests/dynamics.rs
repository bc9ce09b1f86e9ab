//! Classical consistency: the Dirac equations of motion against Hamilton's
//! equations of the reduced system, integrated with RK4.

use std::collections::BTreeMap;

use gtcq_core::mechanics::DiracTable;
use gtcq_core::models::{cartesian_surface, cartesian_system, intrinsic_system};
use gtcq_core::symcore::{eval_numeric, ex, Expr};
use num_complex::Complex64;

const STEP: f64 = 1e-4;
const HORIZON: f64 = 0.1;
const FD: f64 = 1e-6;
/// State order `theta, phi, p_theta, p_phi`.
const STATE: [&str; 4] = ["theta", "phi", "p_theta", "p_phi"];
const START: [f64; 4] = [0.3, 0.1, 0.7, 1.2];

fn point(s: &[f64; 4]) -> BTreeMap<String, Complex64> {
    let mut p: BTreeMap<String, Complex64> =
        [("a", 2.0), ("b", 1.0), ("m", 1.0)].iter().map(|(k, v)| (k.to_string(), Complex64::new(*v, 0.0))).collect();
    for (k, v) in STATE.iter().zip(s) {
        p.insert(k.to_string(), Complex64::new(*v, 0.0));
    }
    p
}

fn eval(e: &Expr, s: &[f64; 4]) -> f64 {
    let v = eval_numeric(e, &point(s)).unwrap();
    assert!(v.im.abs() < 1e-12, "{e} is not real: {v}");
    v.re
}

fn reduced_h() -> Expr {
    ex("(p_theta^2/b^2 + p_phi^2/(a + b*sin(theta))^2)/(2*m)")
}

/// `dF/ds_k` by central differences.
fn grad(f: &Expr, s: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|k| {
        let (mut up, mut dn) = (*s, *s);
        up[k] += FD;
        dn[k] -= FD;
        (eval(f, &up) - eval(f, &dn)) / (2.0 * FD)
    })
}

fn hamilton_field(s: &[f64; 4]) -> [f64; 4] {
    let g = grad(&reduced_h(), s);
    [g[2], g[3], -g[0], -g[1]]
}

fn rk4<F: Fn(&[f64; 4]) -> [f64; 4]>(f: F, start: [f64; 4]) -> Vec<[f64; 4]> {
    let add = |s: &[f64; 4], k: &[f64; 4], h: f64| -> [f64; 4] { std::array::from_fn(|i| s[i] + h * k[i]) };
    let steps = (HORIZON / STEP).round() as usize;
    let mut out = vec![start];
    let mut s = start;
    for _ in 0..steps {
        let k1 = f(&s);
        let k2 = f(&add(&s, &k1, STEP / 2.0));
        let k3 = f(&add(&s, &k2, STEP / 2.0));
        let k4 = f(&add(&s, &k3, STEP));
        s = std::array::from_fn(|i| s[i] + STEP / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        out.push(s);
    }
    out
}

fn intrinsic_field() -> impl Fn(&[f64; 4]) -> [f64; 4] {
    let cs = intrinsic_system().unwrap();
    let vars: Vec<(&str, Expr)> = STATE.iter().map(|s| (*s, ex(s))).collect();
    let t = DiracTable::build(&cs, &vars).unwrap();
    let rhs: Vec<Expr> = STATE.iter().map(|v| t.get(v, "H").unwrap().clone()).collect();
    move |s| std::array::from_fn(|i| eval(&rhs[i], s))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn dirac_flow_matches_hamiltons_equations() {
    let dirac = rk4(intrinsic_field(), START);
    let hamilton = rk4(hamilton_field, START);
    let (d, h) = (dirac.last().unwrap(), hamilton.last().unwrap());
    for k in 0..4 {
        assert!(rel(d[k], h[k]) < 1e-5, "{}: {} vs {}", STATE[k], d[k], h[k]);
    }
    assert!((d[0] - START[0]).abs() > 1e-3, "trajectory did not move");
    let e0 = eval(&reduced_h(), &START);
    let drift = dirac.iter().map(|s| rel(eval(&reduced_h(), s), e0)).fold(0.0, f64::max);
    assert!(drift < 1e-10, "energy drift {drift:e}");
    let p_phi_drift = dirac.iter().map(|s| (s[3] - START[3]).abs()).fold(0.0, f64::max);
    assert!(p_phi_drift < 1e-12, "p_phi drift {p_phi_drift:e}");
}

#[test]
fn cartesian_flow_is_the_embedded_intrinsic_flow() {
    let cs = cartesian_system().unwrap();
    let names = ["x", "y", "z", "p_x", "p_y", "p_z"];
    let vars: Vec<(&str, Expr)> = names.iter().map(|s| (*s, ex(s))).collect();
    let t = DiracTable::build(&cs, &vars).unwrap();
    let chart = cartesian_surface();
    let field = intrinsic_field();
    let traj = rk4(&field, START);
    for s in traj.iter().step_by(250) {
        let v = field(s);
        for n in names {
            // d/dt of the chart expression along the intrinsic flow
            let g = grad(&chart[n], s);
            let along: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
            let got = eval(t.get(n, "H").unwrap(), s);
            assert!(rel(got, along) < 1e-6, "{{{n},H}}_D = {got}, chart derivative {along}");
        }
    }
}
