//! Evaluation of theta(q, x) = sum_{j>=0} q^{j(j+1)/2} x^j and its
//! companions (x- and q-derivatives, the bilateral series Theta*, the
//! negative-index part Xi), every result carrying an explicit truncation
//! plus floating-point error bound.
//!
//! Terms are summed in increasing j with compensated summation; the
//! truncation order is the smallest N for which the geometric tail bound
//!
//!   |q|^{(N+1)(N+2)/2} r^{N+1} / (1 - |q|^{N+1} r)   (valid once |q|^{N+1} r < 1/2)
//!
//! falls below the requested tolerance. Operations fail loudly with a
//! precision-budget error when no such N exists below the configured cap.

mod bilateral;
mod tailzone;
mod xi;

pub use bilateral::{euler_phi, eval_jacobi_theta_star, theta_star_deflated, ThetaStarMethod};
pub use tailzone::{tail_scaled_theta, tail_zero_displacement, TailDisplacement};
pub use xi::eval_xi;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::qparam::QParam;

/// Hard cap on the truncation order; tolerances that would need more
/// terms produce a precision-budget error instead of a slow wrong answer.
pub const MAX_TRUNCATION_ORDER: usize = 4000;

/// Machine epsilon shorthand.
pub(crate) const EPS: f64 = f64::EPSILON;

/// A computed value together with a rigorous error bound.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EvalResult {
    /// Truncated-series value.
    pub value: Complex64,
    /// Bound on |value - exact|: truncation tail plus a floating-point
    /// summation term.
    pub error_bound: f64,
    /// Truncation order N actually used.
    pub terms_used: usize,
}

/// Bound on a tail sum_{j >= start_index} |q|^{j(j+1)/2} r^j.
#[derive(Debug, Clone, Copy)]
pub struct SeriesTail {
    pub start_index: usize,
    pub bound: f64,
}

#[inline]
pub(crate) fn tri(n: usize) -> f64 {
    let n = n as f64;
    n * (n + 1.0) / 2.0
}

/// |q|^{j(j+1)/2} r^j computed in log space so that transient overflow
/// or underflow of either factor cannot poison the comparison.
fn head_term_log(q_abs: f64, radius: f64, j: usize) -> f64 {
    if q_abs == 0.0 && j > 0 {
        return 0.0;
    }
    if radius == 0.0 && j > 0 {
        return 0.0;
    }
    if j == 0 {
        return 1.0;
    }
    (tri(j) * q_abs.ln() + (j as f64) * radius.ln()).exp()
}

/// Geometric tail bound for sum_{j >= s} |q|^{j(j+1)/2} r^j.
///
/// Returns `None` when the domination condition |q|^s r < 1/2 fails.
pub fn series_tail(q_abs: f64, radius: f64, start_index: usize) -> Option<SeriesTail> {
    debug_assert!(start_index >= 1);
    let ratio = q_abs.powi(start_index as i32) * radius;
    if !(ratio < 0.5) {
        return None;
    }
    let first = head_term_log(q_abs, radius, start_index);
    Some(SeriesTail {
        start_index,
        bound: first / (1.0 - ratio),
    })
}

/// Smallest truncation order N such that |q|^{N+1} radius < 1/2 and the
/// geometric tail bound starting at N+1 is at most `target_eps`.
pub fn truncation_order(q: &QParam, radius: f64, target_eps: f64) -> Result<usize> {
    truncation_order_abs(q.modulus(), radius, target_eps)
}

pub(crate) fn truncation_order_abs(q_abs: f64, radius: f64, target_eps: f64) -> Result<usize> {
    if !(target_eps > 0.0) {
        return Err(Error::Domain("target_eps must be positive".into()));
    }
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::Domain("radius must be finite and nonnegative".into()));
    }
    for n in 0..=MAX_TRUNCATION_ORDER {
        if let Some(tail) = series_tail(q_abs, radius, n + 1) {
            if tail.bound <= target_eps {
                return Ok(n);
            }
        }
    }
    Err(Error::PrecisionBudget(format!(
        "no truncation order below {MAX_TRUNCATION_ORDER} meets eps = {target_eps:.3e} \
         at |q| = {q_abs}, radius = {radius:.6e}"
    )))
}

/// Floating-point summation bound: covers the multiplicative error of the
/// term recurrence (each term inherits O(j) complex multiplications) and
/// the compensated summation itself.
#[inline]
fn fp_bound(terms_used: usize, sum_abs: f64) -> f64 {
    EPS * sum_abs * (3.0 * terms_used as f64 + 6.0)
}

pub(crate) struct SeriesEval {
    pub value: Complex64,
    pub error_bound: f64,
    pub terms_used: usize,
    /// sum of |term_j|, the natural scale for residuals.
    pub sum_abs: f64,
}

fn finite_or_budget(v: Complex64, what: &str) -> Result<()> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(())
    } else {
        Err(Error::PrecisionBudget(format!(
            "{what} exceeds the double-precision range"
        )))
    }
}

/// theta(q, x) truncated at order N with tail + fp bound.
pub(crate) fn eval_theta_core(q: Complex64, x: Complex64, target_eps: f64) -> Result<SeriesEval> {
    let q_abs = q.norm();
    let r = x.norm();
    let n = truncation_order_abs(q_abs, r, target_eps)?;
    let mut acc = KahanSum::new();
    let mut term = Complex64::new(1.0, 0.0);
    let mut qpow = Complex64::new(1.0, 0.0); // q^j
    let mut sum_abs = 0.0;
    acc.add(term);
    sum_abs += 1.0;
    for _j in 1..=n {
        qpow *= q;
        term *= qpow * x;
        acc.add(term);
        sum_abs += term.norm();
    }
    let value = acc.value();
    finite_or_budget(value, "theta value")?;
    let tail = series_tail(q_abs, r, n + 1).map(|t| t.bound).unwrap_or(0.0);
    Ok(SeriesEval {
        value,
        error_bound: tail + fp_bound(n, sum_abs),
        terms_used: n,
        sum_abs,
    })
}

/// Evaluate the partial theta function theta(q, x).
pub fn eval_theta(q: &QParam, x: Complex64, target_eps: f64) -> Result<EvalResult> {
    let core = eval_theta_core(q.value(), x, target_eps)?;
    Ok(EvalResult {
        value: core.value,
        error_bound: core.error_bound,
        terms_used: core.terms_used,
    })
}

/// d theta / dx: sum_{j>=1} j q^{j(j+1)/2} x^{j-1}.
pub fn eval_theta_dx(q: &QParam, x: Complex64, target_eps: f64) -> Result<EvalResult> {
    let core = eval_theta_dx_core(q.value(), x, target_eps)?;
    Ok(EvalResult {
        value: core.value,
        error_bound: core.error_bound,
        terms_used: core.terms_used,
    })
}

pub(crate) fn eval_theta_dx_core(
    q: Complex64,
    x: Complex64,
    target_eps: f64,
) -> Result<SeriesEval> {
    let q_abs = q.norm();
    let r = x.norm();
    let mut n = truncation_order_abs(q_abs, r, target_eps)?.max(1);
    while dx_tail(q_abs, r, n) > target_eps {
        n += 1;
        if n > MAX_TRUNCATION_ORDER {
            return Err(Error::PrecisionBudget(
                "derivative tail cannot meet target_eps".into(),
            ));
        }
    }
    // base_j = q^{T_j} x^{j-1}, term_j = j * base_j
    let mut acc = KahanSum::new();
    let mut sum_abs = 0.0;
    let mut base = q; // j = 1
    let mut qpow = q; // q^j
    acc.add(base);
    sum_abs += base.norm();
    for j in 2..=n {
        qpow *= q;
        base *= qpow * x;
        let term = base * (j as f64);
        acc.add(term);
        sum_abs += term.norm();
    }
    let value = acc.value();
    finite_or_budget(value, "theta' value")?;
    Ok(SeriesEval {
        value,
        error_bound: dx_tail(q_abs, r, n) + fp_bound(n, sum_abs),
        terms_used: n,
        sum_abs,
    })
}

/// Tail of the x-derivative series beyond order N:
/// sum_{j>N} j |q|^{T_j} r^{j-1} <= (N+2) |q|^{T_{N+1}} r^N / (1-rho)^2.
fn dx_tail(q_abs: f64, r: f64, n: usize) -> f64 {
    let rho = q_abs.powi(n as i32 + 1) * r;
    if !(rho < 0.5) {
        return f64::INFINITY;
    }
    let lead = if q_abs == 0.0 {
        0.0
    } else if r == 0.0 {
        // the j = N+1 term contains r^N; only N = 0 survives (j=1 term has x^0)
        if n == 0 {
            q_abs
        } else {
            0.0
        }
    } else {
        (tri(n + 1) * q_abs.ln() + n as f64 * r.ln()).exp()
    };
    (n as f64 + 2.0) * lead / ((1.0 - rho) * (1.0 - rho))
}

/// d theta / dq: sum_{j>=1} T_j q^{T_j - 1} x^j.
pub fn eval_theta_dq(q: &QParam, x: Complex64, target_eps: f64) -> Result<EvalResult> {
    let core = eval_theta_dq_core(q.value(), x, target_eps)?;
    Ok(EvalResult {
        value: core.value,
        error_bound: core.error_bound,
        terms_used: core.terms_used,
    })
}

pub(crate) fn eval_theta_dq_core(
    q: Complex64,
    x: Complex64,
    target_eps: f64,
) -> Result<SeriesEval> {
    let q_abs = q.norm();
    let r = x.norm();
    let mut n = truncation_order_abs(q_abs, r, target_eps)?.max(1);
    while dq_tail(q_abs, r, n) > target_eps {
        n += 1;
        if n > MAX_TRUNCATION_ORDER {
            return Err(Error::PrecisionBudget(
                "q-derivative tail cannot meet target_eps".into(),
            ));
        }
    }
    // base_j = q^{T_j - 1} x^j, term_j = T_j * base_j
    let mut acc = KahanSum::new();
    let mut sum_abs = 0.0;
    let mut base = x; // j = 1: q^0 x
    let mut qpow = q;
    acc.add(base);
    sum_abs += base.norm();
    for j in 2..=n {
        qpow *= q;
        base *= qpow * x;
        let term = base * tri(j);
        acc.add(term);
        sum_abs += term.norm();
    }
    let value = acc.value();
    finite_or_budget(value, "dtheta/dq value")?;
    Ok(SeriesEval {
        value,
        error_bound: dq_tail(q_abs, r, n) + fp_bound(n, sum_abs),
        terms_used: n,
        sum_abs,
    })
}

/// Tail for sum_{j>N} T_j |q|^{T_j - 1} r^j, using T_{N+1+m} <= T_{N+1}(m+1)^2
/// and sum (m+1)^2 rho^m = (1+rho)/(1-rho)^3.
fn dq_tail(q_abs: f64, r: f64, n: usize) -> f64 {
    let rho = q_abs.powi(n as i32 + 1) * r;
    if !(rho < 0.5) {
        return f64::INFINITY;
    }
    if q_abs == 0.0 || r == 0.0 {
        return 0.0;
    }
    let lead = ((tri(n + 1) - 1.0) * q_abs.ln() + (n as f64 + 1.0) * r.ln()).exp();
    tri(n + 1) * lead * (1.0 + rho) / (1.0 - rho).powi(3)
}

/// d^2 theta / dx^2: sum_{j>=2} j(j-1) q^{T_j} x^{j-2}.
pub(crate) fn eval_theta_dxx_core(
    q: Complex64,
    x: Complex64,
    target_eps: f64,
) -> Result<SeriesEval> {
    let q_abs = q.norm();
    let r = x.norm();
    let mut n = truncation_order_abs(q_abs, r, target_eps)?.max(2);
    while dxx_tail(q_abs, r, n) > target_eps {
        n += 1;
        if n > MAX_TRUNCATION_ORDER {
            return Err(Error::PrecisionBudget(
                "second-derivative tail cannot meet target_eps".into(),
            ));
        }
    }
    let mut acc = KahanSum::new();
    let mut sum_abs = 0.0;
    // base_j = q^{T_j} x^{j-2}; j = 2: q^3 x^0
    let mut base = q * q * q;
    let mut qpow = q * q;
    acc.add(base * 2.0);
    sum_abs += 2.0 * base.norm();
    for j in 3..=n {
        qpow *= q;
        base *= qpow * x;
        let term = base * ((j * (j - 1)) as f64);
        acc.add(term);
        sum_abs += term.norm();
    }
    let value = acc.value();
    finite_or_budget(value, "theta'' value")?;
    Ok(SeriesEval {
        value,
        error_bound: dxx_tail(q_abs, r, n) + fp_bound(n, sum_abs),
        terms_used: n,
        sum_abs,
    })
}

fn dxx_tail(q_abs: f64, r: f64, n: usize) -> f64 {
    let rho = q_abs.powi(n as i32 + 1) * r;
    if !(rho < 0.5) {
        return f64::INFINITY;
    }
    if q_abs == 0.0 {
        return 0.0;
    }
    let lead = if r == 0.0 {
        if n == 1 {
            // j = 2 term is constant in x
            q_abs.powi(3)
        } else {
            0.0
        }
    } else {
        (tri(n + 1) * q_abs.ln() + (n as f64 - 1.0) * r.ln()).exp()
    };
    ((n + 2) * (n + 1)) as f64 * lead * (1.0 + rho) / (1.0 - rho).powi(3)
}

/// d^2 theta / dq dx: sum_{j>=1} j T_j q^{T_j - 1} x^{j-1}.
pub(crate) fn eval_theta_dqx_core(
    q: Complex64,
    x: Complex64,
    target_eps: f64,
) -> Result<SeriesEval> {
    let q_abs = q.norm();
    let r = x.norm();
    let mut n = truncation_order_abs(q_abs, r, target_eps)?.max(1);
    while dqx_tail(q_abs, r, n) > target_eps {
        n += 1;
        if n > MAX_TRUNCATION_ORDER {
            return Err(Error::PrecisionBudget(
                "mixed-derivative tail cannot meet target_eps".into(),
            ));
        }
    }
    // base_j = q^{T_j - 1} x^{j-1}, term_j = j T_j base_j
    let mut acc = KahanSum::new();
    let mut sum_abs = 0.0;
    let mut base = Complex64::new(1.0, 0.0); // j = 1: q^0 x^0
    let mut qpow = q;
    acc.add(base);
    sum_abs += 1.0;
    for j in 2..=n {
        qpow *= q;
        base *= qpow * x;
        let term = base * (j as f64 * tri(j));
        acc.add(term);
        sum_abs += term.norm();
    }
    let value = acc.value();
    finite_or_budget(value, "dtheta'/dq value")?;
    Ok(SeriesEval {
        value,
        error_bound: dqx_tail(q_abs, r, n) + fp_bound(n, sum_abs),
        terms_used: n,
        sum_abs,
    })
}

fn dqx_tail(q_abs: f64, r: f64, n: usize) -> f64 {
    let rho = q_abs.powi(n as i32 + 1) * r;
    if !(rho < 0.5) {
        return f64::INFINITY;
    }
    if q_abs == 0.0 || r == 0.0 {
        return 0.0;
    }
    // j T_j <= (N+1) T_{N+1} (m+1)^3; sum (m+1)^3 rho^m <= 3.25/(1-rho)^4 for rho < 1/2
    let lead = ((tri(n + 1) - 1.0) * q_abs.ln() + (n as f64) * r.ln()).exp();
    (n as f64 + 1.0) * tri(n + 1) * lead * 3.25 / (1.0 - rho).powi(4)
}
