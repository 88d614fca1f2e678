//! Library surface of the command-line front end: file schemas, the
//! verification suites, and the error-to-exit-code mapping. The binary in
//! `main.rs` is a thin clap dispatcher over this.

pub mod formats;
pub mod verify;

use wcrisk_core::portfolio::PortfolioError;

/// Failure carrying its process exit code: 2 malformed input, 3 infeasible
/// problem, 4 internal certificate or verification failure.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn malformed(message: String) -> Self {
        CliError { code: 2, message }
    }

    pub fn infeasible(message: String) -> Self {
        CliError { code: 3, message }
    }

    pub fn certificate(message: String) -> Self {
        CliError { code: 4, message }
    }

    pub fn internal<E: std::fmt::Display>(err: E) -> Self {
        CliError {
            code: 4,
            message: err.to_string(),
        }
    }

    pub fn from_portfolio(err: PortfolioError) -> Self {
        match err {
            PortfolioError::InfeasiblePolytope
            | PortfolioError::UnboundedPolytope { .. }
            | PortfolioError::ContainsOrigin => CliError::infeasible(err.to_string()),
            PortfolioError::DimensionMismatch { .. }
            | PortfolioError::NotSymmetric { .. }
            | PortfolioError::NotPsd { .. }
            | PortfolioError::EmptyVertexSet
            | PortfolioError::ZeroAllocation => CliError::malformed(err.to_string()),
            other => CliError::internal(other),
        }
    }
}
