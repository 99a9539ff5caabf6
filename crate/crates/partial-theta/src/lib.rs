//! Numerical toolkit for the partial theta function
//! theta(q, x) = sum_{j>=0} q^{j(j+1)/2} x^j, |q| < 1.
//!
//! The crate provides, with every numerical claim carried by an explicit
//! error bound or an integer certificate:
//!
//! * evaluation of theta, its x- and q-derivatives, the bilateral series
//!   Theta* (sum and Jacobi triple product) and the negative-index part
//!   Xi ([`eval`]);
//! * complete, argument-principle-certified zero sets in disks, plus
//!   certification of the tail zeros near -q^{-k} ([`zeros`]);
//! * location of the spectral values q~_j where a double real zero
//!   appears, with a cached table ([`spectrum`]);
//! * product reconstruction, polynomial x Laguerre-Polya decomposition
//!   with coefficient bounds, and the negative-q structure report
//!   ([`factor`]).
//!
//! Everything runs in standard double precision; operations fail with a
//! precision-budget error instead of silently degrading when a tolerance
//! cannot be met.

// Validation uses negated comparisons (`!(x > 0.0)`) so that NaN inputs
// fall into the rejection branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod eval;
pub mod factor;
mod kahan;
pub mod qparam;
pub mod spectrum;
pub mod zeros;

pub use error::{Error, Result};
pub use eval::{
    eval_jacobi_theta_star, eval_theta, eval_theta_dq, eval_theta_dx, eval_xi, truncation_order,
    EvalResult, SeriesTail, ThetaStarMethod,
};
pub use factor::{
    decompose, lp_bound_check, negative_q_report, reconstruct_product, LpClass, LpClassReport,
    NegativeQReport, ProductDecomposition, ProductReport,
};
pub use qparam::{QKind, QParam};
pub use spectrum::{
    complex_pair_count, locate_spectral_value, refine_double_zero, spectrum_table, CountPolicy,
    SpectralValue, SpectrumTable,
};
pub use zeros::{
    assemble_zero_ladder, certify_tail_zero, classify_multiplicity,
    count_zeros_argument_principle, find_zeros_in_disk, refine_newton, seed_zeros_asymptotic,
    TailPolicy, Zero, ZeroSet,
};

#[cfg(doctest)]
mod booktests;
