//! Error taxonomy shared by every module.
//!
//! The variants map onto the process exit codes used by the CLI:
//! domain errors (2), precision-budget errors (3) and certification or
//! convergence failures (4). Nothing in this crate returns a silently
//! degraded answer; if a requested tolerance or certificate cannot be
//! produced, the operation fails with one of these.

use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The arguments are outside the domain of the operation
    /// (|q| >= 1, x = 0 where forbidden, invalid bracket, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A tolerance was requested that double precision cannot certify
    /// (truncation order cap hit, value outside f64 range, ...).
    #[error("precision budget exceeded: {0}")]
    PrecisionBudget(String),

    /// A certificate could not be produced: zero counts disagree,
    /// winding did not settle to an integer, enclosing circles overlap.
    #[error("certification failed: {0}")]
    Certification(String),

    /// Newton (or fixed-point) iteration did not converge. Carries the
    /// last iterate so the caller can inspect or re-seed.
    #[error("no convergence after {iterations} iterations (last iterate {last}, residual {residual:.3e})")]
    Convergence {
        last: Complex64,
        iterations: usize,
        residual: f64,
    },

    /// A zero pair sits inside the collision band around the real axis;
    /// the parameter is too close to a spectral value to classify.
    #[error("near-spectral ambiguity at q = {q}: zero pair at {pair_re} +/- {pair_im}i is within the collision tolerance of the real axis")]
    NearSpectral { q: f64, pair_re: f64, pair_im: f64 },

    /// The disk around -q^{-k} did not contain exactly one zero; the
    /// index k is below the tail regime for this q.
    #[error("tail regime not reached at k = {k}: {detail}")]
    TailRegimeNotReached { k: usize, detail: String },

    /// A contour sample is too close to a zero for the winding number
    /// to be trustworthy at the evaluation accuracy.
    #[error("contour too close to a zero: {0}")]
    ContourTooClose(String),

    /// Spectral cache file could not be written.
    #[error("cache i/o failure: {0}")]
    Cache(String),
}

impl Error {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Cache(_) => 2,
            Error::PrecisionBudget(_) => 3,
            Error::Certification(_)
            | Error::Convergence { .. }
            | Error::NearSpectral { .. }
            | Error::TailRegimeNotReached { .. }
            | Error::ContourTooClose(_) => 4,
        }
    }
}
