use thiserror::Error;

/// Every failure the library reports. Variants carry enough context to tell
/// a caller which regime or node broke.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("integral diverges near the origin (local exponent {exponent})")]
    NonIntegrableTail { exponent: f64 },
    #[error("step size underflow at r = {r}")]
    StepUnderflow { r: f64 },
    #[error("backward integration left the decaying branch at s = {s}")]
    BlowUpBackward { s: f64 },
    #[error("Picard iteration failed to contract after {halvings} window halvings")]
    NoContraction { halvings: usize },
    #[error("energy integrals do not settle under refinement (relative change {change})")]
    DivergentEnergy { change: f64 },
    #[error("no blow-up before r = {r_limit}")]
    NoBlowUp { r_limit: f64 },
    #[error("domination violated on the ball of radius {radius} at r = {at}")]
    DominationViolated { radius: f64, at: f64 },
    #[error("fit window holds {nodes} nodes, need at least {needed}")]
    DegenerateWindow { nodes: usize, needed: usize },
    #[error("q coincides with the critical exponent; enable the log correction")]
    AmbiguousRegime,
    #[error("descent stalled (step {step}, gradient norm {gradient})")]
    NoDescent { step: f64, gradient: f64 },
    #[error("minimizer is not resolved by the grid: {0}")]
    ResolutionLimit(String),
    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { got: usize, needed: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
