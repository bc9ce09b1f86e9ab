//! The two torus systems, the surface geometry they share, and the
//! end-to-end scenarios built on them.

mod geometry;
mod scenario;
mod systems;

pub use geometry::{curvatures, GeometryError, TorusGeometry};
pub use scenario::{
    curvature_potential, extrinsic_scenario, geometric_momenta, intrinsic_anomaly, intrinsic_scenario,
    momentum_commutator, run_scenario, ChainEntry, CheckEntry, ClassicalReport, Diagnostics, OracleReport,
    QuantumReport, ScenarioError, ScenarioId, ScenarioReport, ScenarioSettings, SolutionReport, SweepSummary, Verdict,
    VerdictReport, DEFAULT_GRIDS, SCHEMA_VERSION, WITNESS_FLOOR, ZERO_TOL,
};
pub use systems::{
    cartesian_lagrangian, cartesian_phase_space, cartesian_surface, cartesian_system, intrinsic_lagrangian,
    intrinsic_phase_space, intrinsic_system,
};
