use thiserror::Error;

use crate::state::State;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate state: {reason}")]
    Degenerate { reason: String },

    #[error("unknown symmetry label `{0}`")]
    UnknownSymmetry(String),

    #[error("singular IVP is inconsistent: |M_-1(y0)| = {residual:e}")]
    Inconsistent { residual: f64 },

    #[error("eigenvalue resonance at order {order}: condition number {condition:e}")]
    Resonance { order: usize, condition: f64 },

    #[error("series evaluated outside its radius: x = {x}, tail = {tail:e}")]
    OutOfRadius { x: f64, tail: f64 },

    #[error("step size collapsed at t = {}", last.t)]
    StepCollapse { last: State },

    #[error("constraint drift {drift:e} exceeds the abort threshold at t = {t}")]
    ConstraintDrift { t: f64, drift: f64 },

    #[error("time {t} outside [{lo}, {hi}]")]
    OutOfSpan { t: f64, lo: f64, hi: f64 },

    #[error("argument {value} outside the domain {domain}")]
    OutOfDomain { value: f64, domain: String },

    #[error("no maximal-volume event before {reason} (family {family}, parameter {param})")]
    NoEvent {
        family: String,
        param: f64,
        reason: String,
    },

    #[error("second maximal-volume event at t = {t} (family {family}, parameter {param})")]
    SecondEvent { family: String, param: f64, t: f64 },

    #[error("no sign change of {what} on [{lo}, {hi}]")]
    NoSignChange { what: String, lo: f64, hi: f64 },

    #[error("boundary-ambiguous: {0}")]
    BoundaryAmbiguous(String),

    #[error("junction mismatch {gap:e}")]
    JunctionMismatch { gap: f64 },

    #[error("no crossing between the alpha curve and the reflected beta curve")]
    NoCrossing,

    #[error("matching refinement stalled at residual {residual:e}")]
    RefinementStall { residual: f64 },

    #[error("comparison bound violated at t = {t}: {what}")]
    BoundViolation { t: f64, what: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
