use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The Gaussian sum vanished exactly; the node lies inside `[lo, hi]`.
    #[error("wave function vanishes at a node in [{lo}, {hi}]")]
    AtNode { lo: f64, hi: f64 },

    #[error("energy gauge cannot be resolved: {0}")]
    Gauge(String),

    #[error("r = {r} lies within {distance:e} of a pole at {node}")]
    PoleProximity { r: f64, node: f64, distance: f64 },

    #[error("potential is singular or non-finite at r = {r}")]
    SingularPotential { r: f64 },

    #[error("inverse iteration failed to converge at shift {shift} (residual {residual:e})")]
    SolverFailure { shift: f64, residual: f64 },

    #[error("invalid well: {0}")]
    InvalidWell(String),

    #[error("multiplet cut is degenerate (E_M-1 = E_M = {energy}); refine the grid")]
    DegenerateCut { energy: f64 },

    #[error("level resolution failure: {0}")]
    Resolution(String),

    #[error("energy {energy} is not an eigenvalue; no normalizable solution")]
    NoNormalizableSolution { energy: f64 },
}

impl Error {
    /// Numerical solver failures, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::SolverFailure { .. } | Error::DegenerateCut { .. } | Error::Resolution(_)
        )
    }
}
