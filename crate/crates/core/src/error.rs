use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The adaptive phase average hit its order cap before two successive
    /// estimates agreed.
    #[error(
        "phase average did not converge by order {order}: last two estimates {previous:e} and {last:e}"
    )]
    Convergence {
        order: usize,
        previous: f64,
        last: f64,
    },

    #[error("threshold K = {threshold} must be below the PNR ceiling {ceiling}")]
    Constraint { threshold: u32, ceiling: u32 },

    #[error("Fock dimension {requested} is too small; at least {required} is required")]
    DimensionTooSmall { requested: usize, required: usize },

    #[error(
        "Jacobi eigen-solver did not converge on a {dim}x{dim} matrix after {sweeps} sweeps (off-diagonal norm {off_diagonal:e})"
    )]
    EigenSolver {
        dim: usize,
        sweeps: usize,
        off_diagonal: f64,
    },

    #[error("evaluation failed at theta = {theta}, beta = {beta}: {source}")]
    GridPoint {
        theta: f64,
        beta: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
