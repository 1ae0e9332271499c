use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("wall spacing too small: half spacing {half_spacing} must exceed core half-width {core_half_width}")]
    SpacingTooSmall { half_spacing: f64, core_half_width: f64 },

    #[error("quadrature tolerance not met: achieved {achieved:e}, requested {requested:e}")]
    ToleranceNotMet { achieved: f64, requested: f64 },

    #[error("no exact zero mode for an even number of walls ({walls})")]
    NoExactZeroMode { walls: usize },

    #[error("not implemented: {0}")]
    NotImplemented(String),

    #[error("domain truncation: boundary amplitude {amplitude:e} exceeds {limit:e}")]
    DomainTruncation { amplitude: f64, limit: f64 },

    #[error("inverse iteration stagnated for eigenvalue {eigenvalue:e}")]
    EigenvectorFailure { eigenvalue: f64 },

    #[error("reconstruction residual {residual:e} exceeds tolerance {tolerance:e}")]
    ReconstructionFailure { residual: f64, tolerance: f64 },

    #[error("projected resolvent did not converge at E = {energy:e}: relative residual {residual:e} after {iterations} iterations")]
    ResolventFailure { energy: f64, residual: f64, iterations: usize },

    #[error("invalid energy window [{lo}, {hi}] for asymptotic mass {kappa_inf}")]
    InvalidWindow { lo: f64, hi: f64, kappa_inf: f64 },

    #[error("integration failure: {0}")]
    IntegrationFailure(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad input rather than a numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::SpacingTooSmall { .. }
                | Error::NoExactZeroMode { .. }
                | Error::NotImplemented(_)
                | Error::InvalidWindow { .. }
                | Error::InvalidSample(_)
                | Error::Config(_)
        )
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_validation() {
            2
        } else {
            3
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
