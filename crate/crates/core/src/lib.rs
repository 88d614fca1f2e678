//! Worst-case risk under two-moment ambiguity.
//!
//! Given only a mean and a standard deviation for a random loss, the worst
//! case of any spectral (and more generally any law-invariant coherent)
//! risk measure over all consistent distributions has a closed form:
//! `mu + sigma * sqrt(∫ phi^2 - 1)`, with the supremum over a spectrum set
//! reducing to the member with the largest squared norm. This crate
//! implements those closed forms, certifies them from both sides with a
//! constructive extremal distribution and a quadratic majorization witness,
//! brute-forces them with an independent moment-problem oracle, and applies
//! them to robust portfolio selection over bounded polytopes.
//!
//! Modules:
//! - [`spectra`]: admissible risk spectra and their squared norms.
//! - [`measures`]: nominal risk on finite discrete distributions.
//! - [`worstcase`]: the closed forms, extremal distributions, certificates.
//! - [`oracle`]: discretized moment-problem LPs and quadrature cross-checks.
//! - [`portfolio`]: reduction to the univariate form and robust solvers.
//! - [`lp`]: the dense simplex shared by the oracle and the solvers.
//!
//! All values are immutable after construction and every operation is a
//! pure function, so everything here is safe to share across threads.

pub mod lp;
pub mod measures;
pub mod oracle;
pub mod portfolio;
mod quad;
pub mod spectra;
pub mod worstcase;

pub use measures::{EmpiricalDistribution, MeasuresError, QuantileCandidate};
pub use oracle::{OracleError, SupportGrid};
pub use portfolio::{
    FrontierPoint, MomentMatrixPair, Polytope, PortfolioError, RobustSolution, SchurCertificate,
};
pub use spectra::{AdmissibilityViolation, SpectraError, Spectrum, SpectrumSet};
pub use worstcase::{DualCertificate, MomentPair, WorstCaseError, WorstCaseResult};
