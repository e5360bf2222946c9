use thiserror::Error;

/// Errors surfaced by the orbit, root-finding and integration code.
///
/// Scalar payloads are widened to `f64` so the error type stays
/// independent of the working precision.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A precondition on the physical inputs is violated (negative radius,
    /// D·δ ≥ 1, evaluation at or inside the force singularity, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The root-finding bracket does not straddle a sign change; the
    /// derived quantities are inconsistent.
    #[error("bracket [{lo}, {hi}] does not straddle a sign change")]
    Bracket { lo: f64, hi: f64 },

    /// Iterative refinement stalled before reaching the requested tolerance.
    #[error("no convergence after {iterations} iterations")]
    Tolerance { iterations: usize },

    /// Exact-mode integration approached the force-law pole: δ·u reached
    /// the configured safety bound.
    #[error("force-law singularity approached at theta = {theta} (delta*u = {delta_u})")]
    Singularity { theta: f64, delta_u: f64 },

    /// The outgoing ray never reached u = 0 before `theta_max`.
    #[error("no deflection event before theta_max = {theta_max}")]
    EventNotFound { theta_max: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
