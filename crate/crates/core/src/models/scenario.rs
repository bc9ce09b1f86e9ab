use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::geometry::{GeometryError, TorusGeometry};
use super::systems::{cartesian_system, intrinsic_system};
use crate::mechanics::{ConstraintSystem, DiracTable, MechError};
use crate::oracle::{convergence_sweep, Execution, Identity, OracleError, Sweep, SweepRow};
use crate::quantize::{
    build_ordering_family, build_simple_ordering, classical_limit, derive_momentum, gauss_curvature, hamiltonian,
    i_hbar, mean_curvature, p_phi, p_theta, quantize_classical, solve_parameters, w_inverses, DiffOp,
    ParameterDomain, ParameterSolution, QuantError, SolveStatus,
};
use crate::symcore::{ex, Expr, SymError};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_GRIDS: [usize; 4] = [16, 24, 32, 48];
/// Relative residual below which an identity expected to vanish passes.
pub const ZERO_TOL: f64 = 1e-9;
/// Absolute residual a witness must exceed at every grid size.
pub const WITNESS_FLOOR: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mech(#[from] MechError),
    #[error(transparent)]
    Quant(#[from] QuantError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("missing Dirac bracket {{{0},{1}}}")]
    MissingBracket(String, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ScenarioId {
    #[serde(rename = "torus-intrinsic")]
    TorusIntrinsic,
    #[serde(rename = "torus-extrinsic")]
    TorusExtrinsic,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 2] = [ScenarioId::TorusIntrinsic, ScenarioId::TorusExtrinsic];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::TorusIntrinsic => "torus-intrinsic",
            ScenarioId::TorusExtrinsic => "torus-extrinsic",
        }
    }

    pub fn expected_verdict(self) -> Verdict {
        match self {
            ScenarioId::TorusIntrinsic => Verdict::SelfInconsistentIntrinsic,
            ScenarioId::TorusExtrinsic => Verdict::ConsistentExtrinsic,
        }
    }
}

impl std::str::FromStr for ScenarioId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| format!("unknown scenario {s:?}; expected torus-intrinsic or torus-extrinsic"))
    }
}

impl std::fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "SELF-INCONSISTENT-INTRINSIC")]
    SelfInconsistentIntrinsic,
    #[serde(rename = "CONSISTENT-EXTRINSIC")]
    ConsistentExtrinsic,
    #[serde(rename = "UNRESOLVED")]
    Unresolved,
}

/// Numeric instance used by the oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSettings {
    pub a: f64,
    pub b: f64,
    /// Reported under `oracle.grids`.
    #[serde(skip)]
    pub grids: Vec<usize>,
    #[serde(skip)]
    pub execution: Execution,
}

impl ScenarioSettings {
    pub fn new(a: f64, b: f64) -> Self {
        ScenarioSettings { a, b, grids: DEFAULT_GRIDS.to_vec(), execution: Execution::default() }
    }
}

impl Default for ScenarioSettings {
    fn default() -> Self {
        ScenarioSettings::new(2.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainEntry {
    pub index: usize,
    pub kind: String,
    pub expr: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalReport {
    pub chain: Vec<ChainEntry>,
    pub constraint_matrix_inverse: Vec<Vec<String>>,
    pub hamiltonian: String,
    /// `"{a,b}" -> bracket` on shell.
    pub dirac: BTreeMap<String, String>,
    pub identity_check: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub label: String,
    pub residual: String,
    pub zero: bool,
}

impl CheckEntry {
    fn new(label: impl Into<String>, residual: &DiffOp) -> Self {
        CheckEntry { label: label.into(), residual: residual.to_string(), zero: residual.is_zero() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumReport {
    pub hamiltonian: String,
    pub momenta: BTreeMap<String, String>,
    /// Derived momenta agree with the reference forms.
    pub momenta_match: bool,
    pub first_category: Vec<CheckEntry>,
    /// GTCQ residuals with the parameters left free.
    pub residuals: Vec<CheckEntry>,
    /// The same residuals at the solved parameters.
    pub residuals_at_solution: Vec<CheckEntry>,
    pub extra_checks: Vec<CheckEntry>,
    pub classical_limit_zero: bool,
    pub potential: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionReport {
    pub status: SolveStatus,
    pub assignments: BTreeMap<String, String>,
    pub free_params: Vec<String>,
    pub residual_witness: String,
}

impl From<&ParameterSolution> for SolutionReport {
    fn from(s: &ParameterSolution) -> Self {
        SolutionReport {
            status: s.status,
            assignments: s.assignments.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
            free_params: s.free.clone(),
            residual_witness: s.residual.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictReport {
    pub tag: Verdict,
    pub expected: Verdict,
    pub reproduced: bool,
    pub narrative: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub identity: String,
    pub expect_zero: bool,
    pub converged: bool,
    pub non_convergence: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub grids: Vec<usize>,
    pub zero_tolerance: f64,
    pub witness_floor: f64,
    pub table: Vec<SweepRow>,
    pub sweeps: Vec<SweepSummary>,
    pub all_passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub mismatches: Vec<String>,
    pub timings_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub schema_version: u32,
    pub scenario: ScenarioId,
    pub config: ScenarioSettings,
    pub classical: ClassicalReport,
    pub quantum: QuantumReport,
    pub solution: SolutionReport,
    pub verdict: VerdictReport,
    pub oracle: OracleReport,
    pub diagnostics: Diagnostics,
}

impl ScenarioReport {
    pub fn succeeded(&self) -> bool {
        self.verdict.reproduced && self.diagnostics.mismatches.is_empty()
    }
}

struct Clock {
    start: Instant,
    timings: BTreeMap<String, f64>,
}

impl Clock {
    fn new() -> Self {
        Clock { start: Instant::now(), timings: BTreeMap::new() }
    }

    fn lap(&mut self, name: &str) {
        let now = Instant::now();
        self.timings.insert(name.to_string(), (now - self.start).as_secs_f64() * 1e3);
        self.start = now;
    }
}

fn bindings(pairs: &[(&str, Expr)]) -> BTreeMap<String, Expr> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn classical_report(cs: &ConstraintSystem, table: &DiracTable) -> ClassicalReport {
    ClassicalReport {
        chain: cs
            .chain
            .iter()
            .map(|c| ChainEntry { index: c.index, kind: format!("{:?}", c.kind), expr: c.expr.to_string() })
            .collect(),
        constraint_matrix_inverse: cs.c_inv.iter().map(|r| r.iter().map(Expr::to_string).collect()).collect(),
        hamiltonian: cs.h_c.to_string(),
        dirac: table.entries.iter().map(|((a, b), v)| (format!("{{{a},{b}}}"), v.to_string())).collect(),
        identity_check: cs
            .identity_check()
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().enumerate().all(|(j, e)| if i == j { e.is_one() } else { e.is_zero() })),
    }
}

fn bracket<'a>(table: &'a DiracTable, a: &str, b: &str) -> Result<&'a Expr, ScenarioError> {
    table.get(a, b).ok_or_else(|| ScenarioError::MissingBracket(a.into(), b.into()))
}

fn run_oracle(identities: &[Identity], settings: &ScenarioSettings) -> Result<(OracleReport, Vec<Sweep>), ScenarioError> {
    let sweeps = settings
        .execution
        .map(identities.len(), |i| {
            convergence_sweep(&identities[i], &settings.grids, settings.a, settings.b, settings.execution)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let summaries: Vec<SweepSummary> = sweeps
        .iter()
        .map(|s| SweepSummary {
            identity: s.identity.clone(),
            expect_zero: s.expect_zero,
            converged: s.converged,
            non_convergence: s.non_convergence,
            passed: s.passes(ZERO_TOL, WITNESS_FLOOR),
        })
        .collect();
    let report = OracleReport {
        grids: settings.grids.clone(),
        zero_tolerance: ZERO_TOL,
        witness_floor: WITNESS_FLOOR,
        table: sweeps.iter().flat_map(|s| s.rows.iter().cloned()).collect(),
        all_passed: summaries.iter().all(|s| s.passed),
        sweeps: summaries,
    };
    Ok((report, sweeps))
}

fn oracle_mismatches(report: &OracleReport, out: &mut Vec<String>) {
    for s in report.sweeps.iter().filter(|s| !s.passed) {
        out.push(format!("oracle check failed: {}", s.identity));
    }
}

/// `-(hbar^2/2m)(alpha M^2 - beta K)`.
pub fn curvature_potential(alpha: &Expr, beta: &Expr) -> Expr {
    let m = mean_curvature();
    ex("-hbar^2/(2*m)") * (alpha * &m * &m - beta * gauss_curvature())
}

/// `[p_theta, H] - i hbar {p_theta, H}_D` on the intrinsic chart for the
/// general family.
pub fn intrinsic_anomaly(alpha: &Expr, beta: &Expr) -> Expr {
    let s = ex("sin(theta)");
    let poly = ex("a^2") * (alpha - ex("2") * beta + Expr::one()) + ex("2*a*b") * (alpha - beta) * &s - ex("b^2");
    ex("I*hbar^3*cos(theta)") * poly / ex("4*b*m*(a + b*sin(theta))^3")
}

fn check_settings(settings: &ScenarioSettings) -> Result<(), ScenarioError> {
    TorusGeometry::check_instance(settings.a, settings.b, 256)?;
    for &n in &settings.grids {
        if n < 8 || n % 2 != 0 {
            return Err(OracleError::InvalidGrid(format!("N = {n} must be even and at least 8")).into());
        }
    }
    Ok(())
}

/// Toric-chart pipeline: classical chain and brackets, momenta from
/// `[q, H]`, the unique curvature parameters and the oracle sweep.
pub fn intrinsic_scenario(settings: &ScenarioSettings) -> Result<ScenarioReport, ScenarioError> {
    check_settings(settings)?;
    let mut clock = Clock::new();
    let cs = intrinsic_system()?;
    let vars = [("theta", ex("theta")), ("phi", ex("phi")), ("p_theta", ex("p_theta")), ("p_phi", ex("p_phi"))];
    let table = DiracTable::build(&cs, &vars)?;
    let classical = classical_report(&cs, &table);
    clock.lap("classical");

    let (alpha, beta) = (ex("alpha"), ex("beta"));
    let h = hamiltonian(&alpha, &beta);
    let mut momenta = Vec::new();
    for (q, p) in [("theta", "p_theta"), ("phi", "p_phi")] {
        let qh = bracket(&table, q, "H")?;
        let c1 = qh.poly_coefficients(p)?.remove(&1).unwrap_or_default();
        let op = derive_momentum(&h, &ex(q), &c1.inv()?, &["alpha", "beta"])?;
        momenta.push((p, q, op));
    }
    let momenta_match = (momenta[0].2.clone() - p_theta()).is_zero() && (momenta[1].2.clone() - p_phi()).is_zero();
    let quantize = |e: &Expr| quantize_classical(e, &momenta);

    let mut first_category = Vec::new();
    let positions: Vec<(&str, DiffOp)> = vec![("theta", DiffOp::mul(ex("theta"))), ("phi", DiffOp::mul(ex("phi")))];
    let mut all_ops = positions.clone();
    all_ops.extend(momenta.iter().map(|(p, _, op)| (*p, op.clone())));
    for (i, (na, a)) in all_ops.iter().enumerate() {
        for (nb, b) in &all_ops[i + 1..] {
            let expected = quantize(bracket(&table, na, nb)?)?.scale(&i_hbar());
            first_category.push(CheckEntry::new(format!("[{na},{nb}]"), &(a.commutator(b) - expected)));
        }
    }

    let mut residual_ops = Vec::new();
    for (name, op) in &all_ops {
        let expected = quantize(bracket(&table, name, "H")?)?.scale(&i_hbar());
        residual_ops.push((format!("[{name},H]"), op.commutator(&h) - expected));
    }
    let residuals: Vec<CheckEntry> = residual_ops.iter().map(|(l, r)| CheckEntry::new(l.clone(), r)).collect();
    let classical_limit_zero =
        residual_ops.iter().map(|(_, r)| classical_limit(r)).collect::<Result<Vec<_>, _>>()?.iter().all(DiffOp::is_zero);
    let ops: Vec<DiffOp> = residual_ops.iter().map(|(_, r)| r.clone()).collect();
    let solution = solve_parameters(&ops, &["alpha", "beta"], &[], ParameterDomain::Field)?;
    clock.lap("quantum");

    let mut mismatches = Vec::new();
    let mut residuals_at_solution = Vec::new();
    let mut extra_checks = Vec::new();
    let mut potential = Expr::zero();
    let mut tag = Verdict::Unresolved;
    let mut narrative = String::new();
    if solution.status == SolveStatus::Unique {
        let a_star = &solution.assignments["alpha"];
        let b_star = &solution.assignments["beta"];
        let at = bindings(&[("alpha", a_star.clone()), ("beta", b_star.clone())]);
        for (l, r) in &residual_ops {
            residuals_at_solution.push(CheckEntry::new(l.clone(), &r.subst(&at)?));
        }
        potential = curvature_potential(a_star, b_star);
        let one = bindings(&[("alpha", Expr::one()), ("beta", Expr::one())]);
        let p_theta_res = residual_ops.iter().find(|(l, _)| l == "[p_theta,H]").map(|(_, r)| r.clone()).unwrap_or_default();
        let anomaly = DiffOp::mul(intrinsic_anomaly(&Expr::one(), &Expr::one()));
        extra_checks.push(CheckEntry::new("[p_theta,H] at alpha=beta=1 minus anomaly", &(p_theta_res.subst(&one)? - anomaly)));
        let mean_sq_coeff = ex("-hbar^2/(2*m)") * a_star;
        if !mean_sq_coeff.is_zero() && residuals_at_solution.iter().all(|c| c.zero) {
            tag = Verdict::SelfInconsistentIntrinsic;
            narrative = format!(
                "unique alpha = beta = {a_star}, not 1; the implied potential {potential} keeps the mean curvature, \
                 which the intrinsic geometry cannot supply"
            );
        }
    } else {
        mismatches.push(format!("expected a unique solution, got {:?}", solution.status));
    }
    if !momenta_match {
        mismatches.push("derived momenta differ from the reference forms".into());
    }
    for c in first_category.iter().chain(&residuals_at_solution).chain(&extra_checks) {
        if !c.zero {
            mismatches.push(format!("nonzero residual: {}", c.label));
        }
    }
    if !classical_limit_zero {
        mismatches.push("a residual survives the classical limit".into());
    }

    let h11 = hamiltonian(&Expr::one(), &Expr::one());
    let alpha_star = ex("(a^2 - b^2)/a^2");
    let h_star = hamiltonian(&alpha_star, &alpha_star);
    let dirac_pt = quantize(bracket(&table, "p_theta", "H")?)?.scale(&i_hbar());
    let anomaly = DiffOp::mul(intrinsic_anomaly(&Expr::one(), &Expr::one()));
    let e_theta = DiffOp::mul(ex("cos(theta) + I*sin(theta)"));
    let e_phi = DiffOp::mul(ex("cos(phi) + I*sin(phi)"));
    let identities = vec![
        Identity::commutator("[p_phi,H(1,1)] = 0", p_phi(), h11.clone(), DiffOp::zero()),
        Identity::commutator("[p_phi,H*] = 0", p_phi(), h_star.clone(), DiffOp::zero()),
        Identity::commutator("[p_theta,H*] = i hbar {p_theta,H}_D", p_theta(), h_star, dirac_pt.clone()),
        Identity::commutator("[p_theta,H(1,1)] = i hbar {p_theta,H}_D + anomaly", p_theta(), h11.clone(), dirac_pt.clone() + anomaly),
        Identity::commutator("[exp(I theta),H(1,1)]", e_theta.clone(), h11.clone(), e_theta.commutator(&h11)),
        Identity::commutator("[exp(I phi),H(1,1)]", e_phi.clone(), h11.clone(), e_phi.commutator(&h11)),
        Identity::commutator("[cos(theta),sin(phi)] = 0", DiffOp::mul(ex("cos(theta)")), DiffOp::mul(ex("sin(phi)")), DiffOp::zero()),
        Identity::hermiticity("p_theta hermitian", p_theta()),
        Identity::hermiticity("p_phi hermitian", p_phi()),
        Identity::commutator("witness: [p_theta,H(1,1)] - i hbar {p_theta,H}_D", p_theta(), h11.clone(), dirac_pt).witness(),
    ];
    let (oracle, _) = run_oracle(&identities, settings)?;
    oracle_mismatches(&oracle, &mut mismatches);
    clock.lap("oracle");

    let expected = ScenarioId::TorusIntrinsic.expected_verdict();
    Ok(ScenarioReport {
        schema_version: SCHEMA_VERSION,
        scenario: ScenarioId::TorusIntrinsic,
        config: settings.clone(),
        classical,
        quantum: QuantumReport {
            hamiltonian: h.to_string(),
            momenta: momenta.iter().map(|(p, _, op)| (p.to_string(), op.to_string())).collect(),
            momenta_match,
            first_category,
            residuals,
            residuals_at_solution,
            extra_checks,
            classical_limit_zero,
            potential: potential.to_string(),
        },
        solution: SolutionReport::from(&solution),
        verdict: VerdictReport { tag, expected, reproduced: tag == expected, narrative },
        oracle,
        diagnostics: Diagnostics { mismatches, timings_ms: clock.timings },
    })
}

/// `-i hbar (r^mu d_mu + M n_i)` for each Cartesian component.
pub fn geometric_momenta(g: &TorusGeometry) -> [DiffOp; 3] {
    let mh = -i_hbar();
    std::array::from_fn(|i| {
        let op = DiffOp::term(1, 0, &g.r_theta[i] / &g.metric.0)
            + DiffOp::term(0, 1, &g.r_phi[i] / &g.metric.1)
            + DiffOp::mul(&g.mean_curvature * &g.normal[i]);
        op.scale(&mh)
    })
}

/// `-(i hbar/b^2) [f_i (p_j + a sym(d_j, L_z)/rho^3) - (i <-> j)]` with
/// `d = (y, -x, 0)`.
pub fn momentum_commutator(g: &TorusGeometry, p: &[DiffOp; 3], i: usize, j: usize) -> DiffOp {
    let lz = p_phi();
    let d = [g.embedding[1].clone(), -&g.embedding[0], Expr::zero()];
    let rho3 = ex("(a + b*sin(theta))^3");
    let part = |k: usize| {
        let sym = DiffOp::hermitize_pair(&DiffOp::mul(d[k].clone()), &lz);
        p[k].clone() + sym.scale(&(ex("a") / &rho3))
    };
    let fi = DiffOp::mul(g.f[i].clone());
    let fj = DiffOp::mul(g.f[j].clone());
    (fi.compose(&part(j)) - fj.compose(&part(i))).scale(&(-i_hbar() / ex("b^2")))
}

const AXES: [&str; 3] = ["x", "y", "z"];

/// Cartesian pipeline on the surface chart: geometric momenta from
/// `[x_i, H]`, the five-weight ordering family and the simple ordering.
pub fn extrinsic_scenario(settings: &ScenarioSettings) -> Result<ScenarioReport, ScenarioError> {
    check_settings(settings)?;
    let mut clock = Clock::new();
    let cs = cartesian_system()?;
    let vars: Vec<(&str, Expr)> = ["x", "y", "z", "p_x", "p_y", "p_z"].iter().map(|s| (*s, ex(s))).collect();
    let table = DiracTable::build(&cs, &vars)?;
    let classical = classical_report(&cs, &table);
    clock.lap("classical");

    let g = TorusGeometry::new();
    let (alpha, beta) = (ex("alpha"), ex("beta"));
    let h = hamiltonian(&alpha, &beta);
    let mut mismatches = Vec::new();
    let mut ps = Vec::new();
    for (i, x) in g.embedding.iter().enumerate() {
        // the scale m comes from {x_i, H}_D = p_i / m
        let expect = cs.on_shell(&(ex(&format!("p_{}", AXES[i])) / ex("m")))?;
        if bracket(&table, AXES[i], "H")? != &expect {
            mismatches.push(format!("{{{},H}}_D is not p_{}/m", AXES[i], AXES[i]));
        }
        ps.push(derive_momentum(&h, x, &ex("m"), &["alpha", "beta"])?);
    }
    let ps: [DiffOp; 3] = ps.try_into().expect("three components");
    let geometric = geometric_momenta(&g);
    let momenta_match = ps.iter().zip(&geometric).all(|(p, q)| (p.clone() - q.clone()).is_zero());

    let mut first_category = Vec::new();
    let xs: Vec<DiffOp> = g.embedding.iter().map(|x| DiffOp::mul(x.clone())).collect();
    let b2 = ex("b^2");
    for i in 0..3 {
        for j in 0..3 {
            if j > i {
                first_category.push(CheckEntry::new(format!("[{},{}]", AXES[i], AXES[j]), &xs[i].commutator(&xs[j])));
            }
            let delta = if i == j { Expr::one() } else { Expr::zero() };
            let expected = DiffOp::mul((delta - &g.f[i] * &g.f[j] / &b2) * i_hbar());
            first_category.push(CheckEntry::new(format!("[{},p_{}]", AXES[i], AXES[j]), &(xs[i].commutator(&ps[j]) - expected)));
        }
    }
    for i in 0..3 {
        for j in i + 1..3 {
            let r = ps[i].commutator(&ps[j]) - momentum_commutator(&g, &ps, i, j);
            first_category.push(CheckEntry::new(format!("[p_{},p_{}]", AXES[i], AXES[j]), &r));
        }
    }
    let lz = xs[0].compose(&ps[1]) - xs[1].compose(&ps[0]);
    let mut extra_checks = vec![CheckEntry::new("x p_y - y p_x = -i hbar d_phi", &(lz - p_phi()))];

    let (wp, wm) = w_inverses();
    let weights: [Expr; 5] = std::array::from_fn(|k| ex(&format!("alpha{}", k + 1)));
    let unknowns = ["alpha", "beta", "alpha1", "alpha2", "alpha3", "alpha4", "alpha5"];
    let mut residual_ops = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        let expected = ps[i].scale(&(i_hbar() / ex("m")));
        residual_ops.push((format!("[{},H]", AXES[i]), x.commutator(&h) - expected));
    }
    for i in 0..3 {
        let rhs = build_ordering_family(&h, &g.f[i], &p_phi(), (&wp, &wm), &weights)?;
        residual_ops.push((format!("[p_{},H]", AXES[i]), ps[i].commutator(&h) - rhs));
    }
    let residuals: Vec<CheckEntry> = residual_ops.iter().map(|(l, r)| CheckEntry::new(l.clone(), r)).collect();
    let classical_limit_zero =
        residual_ops.iter().map(|(_, r)| classical_limit(r)).collect::<Result<Vec<_>, _>>()?.iter().all(DiffOp::is_zero);
    let ops: Vec<DiffOp> = residual_ops.iter().map(|(_, r)| r.clone()).collect();
    let sum = ex("alpha1 + alpha2 + alpha3 + alpha4 + alpha5 - 1");
    let solution = solve_parameters(&ops, &unknowns, &[sum], ParameterDomain::Field)?;
    let residuals_at_solution: Vec<CheckEntry> = residual_ops
        .iter()
        .map(|(l, r)| Ok(CheckEntry::new(l.clone(), &r.subst(&solution.assignments)?)))
        .collect::<Result<_, SymError>>()?;

    let one = bindings(&[("alpha", Expr::one()), ("beta", Expr::one())]);
    let h11 = hamiltonian(&Expr::one(), &Expr::one());
    let mut simple = Vec::new();
    for i in 0..3 {
        let rhs = build_simple_ordering(&h11, &g.f[i], &p_phi(), (&wp, &wm))?;
        let r = ps[i].subst(&one)?.commutator(&h11) - rhs.clone();
        extra_checks.push(CheckEntry::new(format!("[p_{},H] simple ordering", AXES[i]), &r));
        simple.push(rhs);
    }
    let v_g = ex("-hbar^2/(2*m)") * (&g.mean_curvature * &g.mean_curvature - &g.gauss_curvature);
    let v_d = curvature_potential(&Expr::one(), &Expr::one());
    extra_checks.push(CheckEntry::new("V_g - V_D at alpha=beta=1", &DiffOp::mul(&v_g - &v_d)));
    clock.lap("quantum");

    let solved_one = |name: &str, v: &str| solution.assignments.get(name) == Some(&ex(v));
    let physical = solution.status != SolveStatus::Inconsistent && solved_one("alpha", "1") && solved_one("beta", "1");
    let all_zero = first_category.iter().chain(&residuals_at_solution).chain(&extra_checks).all(|c| c.zero);
    let (tag, narrative) = if physical && all_zero && momenta_match {
        (
            Verdict::ConsistentExtrinsic,
            format!(
                "alpha = beta = 1 for every admissible choice of the free weights {:?}; the momenta are the geometric \
                 momentum and the potential is the geometric potential {v_d}",
                solution.free
            ),
        )
    } else {
        (Verdict::Unresolved, String::new())
    };
    if !momenta_match {
        mismatches.push("derived momenta differ from -i hbar (r^mu d_mu + M n)".into());
    }
    for c in first_category.iter().chain(&residuals_at_solution).chain(&extra_checks) {
        if !c.zero {
            mismatches.push(format!("nonzero residual: {}", c.label));
        }
    }
    if !classical_limit_zero {
        mismatches.push("a residual survives the classical limit".into());
    }

    let ps11: Vec<DiffOp> = ps.iter().map(|p| p.subst(&one)).collect::<Result<_, _>>()?;
    let mut identities = Vec::new();
    for i in 0..3 {
        identities.push(Identity::commutator(
            format!("[{},H(1,1)] = i hbar p_{}/m", AXES[i], AXES[i]),
            xs[i].clone(),
            h11.clone(),
            ps11[i].scale(&(i_hbar() / ex("m"))),
        ));
    }
    for i in 0..3 {
        identities.push(Identity::commutator(
            format!("[p_{},H(1,1)] = simple ordering", AXES[i]),
            ps11[i].clone(),
            h11.clone(),
            simple[i].clone(),
        ));
    }
    for (i, j) in [(0, 0), (0, 1), (2, 2)] {
        let delta = if i == j { Expr::one() } else { Expr::zero() };
        identities.push(Identity::commutator(
            format!("[{},p_{}] = i hbar (delta - f f/b^2)", AXES[i], AXES[j]),
            xs[i].clone(),
            ps11[j].clone(),
            DiffOp::mul((delta - &g.f[i] * &g.f[j] / &b2) * i_hbar()),
        ));
    }
    let ps11_arr: [DiffOp; 3] = ps11.clone().try_into().expect("three components");
    identities.push(Identity::commutator("[p_x,p_y]", ps11[0].clone(), ps11[1].clone(), momentum_commutator(&g, &ps11_arr, 0, 1)));
    identities.push(Identity::commutator("[x,y] = 0", xs[0].clone(), xs[1].clone(), DiffOp::zero()));
    for i in 0..3 {
        identities.push(Identity::hermiticity(format!("p_{} hermitian", AXES[i]), ps11[i].clone()));
    }
    let e_phi = DiffOp::mul(ex("cos(phi) + I*sin(phi)"));
    identities.push(Identity::commutator("[exp(I phi),H(1,1)]", e_phi.clone(), h11.clone(), e_phi.commutator(&h11)));
    let (oracle, _) = run_oracle(&identities, settings)?;
    oracle_mismatches(&oracle, &mut mismatches);
    clock.lap("oracle");

    let expected = ScenarioId::TorusExtrinsic.expected_verdict();
    Ok(ScenarioReport {
        schema_version: SCHEMA_VERSION,
        scenario: ScenarioId::TorusExtrinsic,
        config: settings.clone(),
        classical,
        quantum: QuantumReport {
            hamiltonian: h.to_string(),
            momenta: AXES.iter().zip(&ps).map(|(a, p)| (format!("p_{a}"), p.to_string())).collect(),
            momenta_match,
            first_category,
            residuals,
            residuals_at_solution,
            extra_checks,
            classical_limit_zero,
            potential: v_d.to_string(),
        },
        solution: SolutionReport::from(&solution),
        verdict: VerdictReport { tag, expected, reproduced: tag == expected, narrative },
        oracle,
        diagnostics: Diagnostics { mismatches, timings_ms: clock.timings },
    })
}

pub fn run_scenario(id: ScenarioId, settings: &ScenarioSettings) -> Result<ScenarioReport, ScenarioError> {
    match id {
        ScenarioId::TorusIntrinsic => intrinsic_scenario(settings),
        ScenarioId::TorusExtrinsic => extrinsic_scenario(settings),
    }
}
