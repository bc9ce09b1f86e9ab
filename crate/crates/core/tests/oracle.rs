//! The pseudospectral oracle against exact symbolic action, across
//! execution modes and at a second torus instance.

mod common;

use common::reference;
use gtcq_core::models::{run_scenario, ScenarioId, ScenarioSettings, Verdict};
use gtcq_core::oracle::{
    commutator_residual_with, convergence_sweep, discretize, hermiticity_defect_with, sample_expr, Execution, Grid,
    Identity,
};
use gtcq_core::quantize::DiffOp;
use gtcq_core::symcore::{ex, Expr};
use num_complex::Complex64;

fn max_diff(u: &[Complex64], v: &[Complex64]) -> f64 {
    u.iter().zip(v).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Symbolic `D f` sampled on the grid against the discretized `D` applied to
/// samples of `f`.
fn action_error(d: &DiffOp, f: &Expr, n: usize) -> f64 {
    let g = Grid::new(n, 2.0, 1.0).unwrap();
    let exact = sample_expr(&d.apply(f), &g).unwrap();
    let discrete = discretize(d, &g).unwrap().apply(&g, &sample_expr(f, &g).unwrap());
    max_diff(&exact, &discrete)
}

#[test]
fn discretized_operators_act_like_their_symbols() {
    let f = ex("cos(2*theta)*sin(phi) + sin(theta)");
    let h = reference::hamiltonian(&Expr::one(), &Expr::one());
    for (name, d) in [("H", h), ("p_theta", reference::p_theta()), ("p_x", reference::geometric_momenta()[0].clone())] {
        for n in [16, 48] {
            let e = action_error(&d, &f, n);
            assert!(e < 1e-9, "{name} at N = {n}: {e:e}");
        }
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let g = Grid::new(24, 2.0, 1.0).unwrap();
    let h = discretize(&reference::hamiltonian(&Expr::one(), &Expr::one()), &g).unwrap();
    let p = discretize(&reference::p_theta(), &g).unwrap();
    let zero = discretize(&DiffOp::zero(), &g).unwrap();
    let seq = commutator_residual_with(&p, &h, &zero, &g, Execution::Sequential);
    let par = commutator_residual_with(&p, &h, &zero, &g, Execution::Parallel);
    assert!((seq.absolute - par.absolute).abs() <= 1e-12 * seq.absolute.max(1.0), "{seq:?} vs {par:?}");
    let d = reference::geometric_momenta()[2].clone();
    let hs = hermiticity_defect_with(&d, &g, Execution::Sequential).unwrap();
    let hp = hermiticity_defect_with(&d, &g, Execution::Parallel).unwrap();
    assert!((hs - hp).abs() <= 1e-14, "{hs:e} vs {hp:e}");
}

/// The band norm of a multiplication operator is bounded by `sup |f|` and
/// approaches it as the band widens.
#[test]
fn anomaly_witness_approaches_its_supremum() {
    let f = reference::intrinsic_anomaly(&Expr::one(), &Expr::one());
    let fine = Grid::new(256, 2.0, 1.0).unwrap();
    let sup = sample_expr(&f, &fine).unwrap().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let h = reference::hamiltonian(&Expr::one(), &Expr::one());
    let witness = Identity::commutator("anomaly", DiffOp::zero(), h, DiffOp::mul(f)).witness();
    let s = convergence_sweep(&witness, &[16, 24, 32, 48], 2.0, 1.0, Execution::default()).unwrap();
    for r in &s.rows {
        assert!(r.absolute > 1e-3, "{r:?}");
        assert!(r.absolute <= sup * (1.0 + 1e-6), "{r:?} above sup {sup}");
    }
    let gaps: Vec<f64> = s.rows.iter().map(|r| sup - r.absolute).collect();
    assert!(gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{gaps:?}");
    assert!(gaps[gaps.len() - 1] < 0.1 * sup, "{gaps:?} vs {sup}");
}

#[test]
fn second_instance_reproduces_both_verdicts() {
    let settings = ScenarioSettings { grids: vec![16, 32], ..ScenarioSettings::new(3.0, 1.0) };
    for id in ScenarioId::ALL {
        let r = run_scenario(id, &settings).unwrap();
        assert!(r.succeeded(), "{id}: {:?}", r.diagnostics.mismatches);
        assert!(r.oracle.all_passed, "{id}");
        assert_ne!(r.verdict.tag, Verdict::Unresolved);
        for s in r.oracle.sweeps.iter().filter(|s| s.expect_zero) {
            let last = r.oracle.table.iter().filter(|t| t.identity == s.identity).last().unwrap();
            assert!(last.residual <= 1e-9, "{}: {:e}", s.identity, last.residual);
        }
    }
}

#[test]
fn invalid_instances_are_rejected() {
    for (a, b) in [(1.0, 1.0), (1.0, 2.0), (2.0, 0.0)] {
        let settings = ScenarioSettings::new(a, b);
        assert!(run_scenario(ScenarioId::TorusIntrinsic, &settings).is_err(), "a={a}, b={b}");
    }
    let settings = ScenarioSettings { grids: vec![15], ..ScenarioSettings::default() };
    assert!(run_scenario(ScenarioId::TorusIntrinsic, &settings).is_err());
}
