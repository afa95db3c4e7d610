//! Error type shared by all modules.

use thiserror::Error;

/// Unified error enum for geometry, meshing, assembly and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// A shape string or parameter set could not be interpreted.
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    /// A numeric argument is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The origin must lie strictly inside the domain for scaling arguments
    /// about the origin to make sense.
    #[error("origin is not strictly interior to the domain")]
    OriginNotInterior,

    /// Grid spacing too coarse: the obstacle must span at least eight cells
    /// across its smallest diameter.
    #[error("obstacle under-resolved: h = {h} exceeds the limit {limit} (smallest obstacle half-extent / 4)")]
    ObstacleUnderResolved { h: f64, limit: f64 },

    /// The obstacle is not contained in the domain; inputs like this are
    /// rejected rather than silently clamped.
    #[error("obstacle is not contained in the domain")]
    ObstacleNotContained,

    /// No active cells remain after classification.
    #[error("mesh has an empty active set")]
    EmptyActiveSet,

    /// Vector length does not match the operator dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The linear system has no Dirichlet rows and is therefore singular
    /// (constants are in the null space).
    #[error("singular system: operator has no Dirichlet rows")]
    SingularSystem,

    /// An iterative solver hit its iteration cap before reaching tolerance.
    #[error("{what} failed to converge: {iterations} iterations (cap {cap}), residual {residual:.3e}")]
    ConvergenceFailure {
        what: &'static str,
        iterations: usize,
        cap: usize,
        residual: f64,
    },

    /// A computed smallest eigenvalue came out negative beyond roundoff,
    /// which signals an assembly bug, not a property of the problem.
    #[error("computed smallest eigenvalue is negative: {0:.6e}")]
    NegativeEigenvalue(f64),

    /// A dense-path operation was requested above its size gate.
    #[error("problem size {n} exceeds the limit {limit} for this operation")]
    SizeLimitExceeded { n: usize, limit: usize },

    /// An equilibration-rate fit was requested on a domain whose spectrum has
    /// a multiple zero eigenvalue; the kernel deviation does not decay there.
    #[error("disconnected domain: zero-eigenvalue cluster has size {zero_cluster}, kernel deviation does not decay")]
    DisconnectedDomain { zero_cluster: usize },

    /// Operation defined only for kernels with a Dirichlet obstacle.
    #[error("{0} requires a mixed (Dirichlet-obstacle) kernel")]
    MixedKernelRequired(&'static str),

    /// Operation defined only for pure-Neumann kernels.
    #[error("{0} requires a pure Neumann kernel")]
    NeumannKernelRequired(&'static str),

    /// Trace bracket evaluated below the fitted onset time.
    #[error("time {t} is below the fitted onset t1 = {t1}; the bracket is not claimed there")]
    TimeBelowOnset { t: f64, t1: f64 },

    /// The slender-body capacity formula was called outside its regime.
    #[error("non-slender input: height/radius = {ratio} < 10")]
    NotSlender { ratio: f64 },

    /// The variational upper bound degenerates when the enclosing ball fills
    /// the domain.
    #[error("vacuous bound: enclosing ball volume {ball} is not smaller than the domain volume {domain}")]
    VacuousBound { ball: f64, domain: f64 },

    /// Too few usable data rows for a fit.
    #[error("too few rows for the fit: need at least {needed}, have {got}")]
    TooFewRows { needed: usize, got: usize },

    /// Cylinder height is not an integer multiple of the mesh spacing.
    #[error("resolution mismatch: height {height} is not an integer multiple of mesh spacing {h}")]
    ResolutionMismatch { height: f64, h: f64 },

    /// I/O or parse failure in the experiment harness.
    #[error("experiment I/O: {0}")]
    ExperimentIo(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
