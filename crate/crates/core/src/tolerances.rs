//! Numerical thresholds shared across the crate.

/// Smallest admissible `λ`.
pub const LAMBDA_MIN: f64 = 1e-8;
/// Smallest admissible `μ²`.
pub const MU2_MIN: f64 = 1e-12;
/// Component magnitude that stops an integration.
pub const BLOWUP: f64 = 1e8;
/// Relative constraint drift that aborts an integration.
pub const DRIFT_ABORT: f64 = 1e-6;
/// Default integrator tolerance (relative and absolute).
pub const INTEGRATOR_TOL: f64 = 1e-12;
/// Event time refinement.
pub const EVENT_TOL: f64 = 1e-13;
/// Default series truncation order.
pub const SERIES_ORDER: usize = 40;
/// Tail bound accepted at the series handoff.
pub const HANDOFF_TAIL: f64 = 1e-12;
/// Upper bound on the condition number of `h·Id − dM₋₁`.
pub const MAX_CONDITION: f64 = 1e8;
/// Distance from the boundary of the wedge below which a record counts as on it.
pub const ON_BOUNDARY: f64 = 1e-7;
/// Accepted component-wise gap at a gluing junction.
pub const JUNCTION: f64 = 1e-7;
/// Parameter tolerance of scalar root solves.
pub const ROOT_TOL: f64 = 1e-10;
/// Target distance in the matching refinement.
pub const MATCH_RESIDUAL: f64 = 1e-9;
/// Adaptive quadrature tolerance for closed-form volumes.
pub const QUAD_TOL: f64 = 1e-11;
/// Total volume of the round six-sphere with `V₀ = 1`; volumes are reported relative to it.
pub const VOLUME_S6: f64 = 9.0 / 5.0;
