use thiserror::Error;

/// Errors raised by model construction, the eigen-solvers and the pricers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("FX rate {value} outside the band [{lower}, {upper}]")]
    OutOfBand { value: f64, lower: f64, upper: f64 },

    #[error("state {x} outside the band [{lower}, {upper}]")]
    OutOfDomain { x: f64, lower: f64, upper: f64 },

    #[error("{what} did not converge (residual {residual:e})")]
    NoConvergence { what: &'static str, residual: f64 },

    #[error("quadrature did not converge; worst subinterval [{a}, {b}] with error estimate {error:e}")]
    Quadrature { a: f64, b: f64, error: f64 },

    #[error("ground-state energy {e0:e} exceeds the grid error bound {bound:e}; (U, h) admit no positive ground state")]
    InconsistentPotential { e0: f64, bound: f64 },

    #[error("discretized operator is not symmetric at row {row}")]
    AsymmetricOperator { row: usize },

    #[error("FX mapping degenerate at x = {x}: first and second derivatives both vanish")]
    DegenerateMapping { x: f64 },

    #[error("simulation step {step} exceeds the band width; use a smaller dt")]
    StepTooLarge { step: f64 },
}

impl Error {
    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::Quadrature { .. }
                | Error::InconsistentPotential { .. }
                | Error::AsymmetricOperator { .. }
                | Error::DegenerateMapping { .. }
                | Error::StepTooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
