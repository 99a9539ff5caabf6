//! The bilateral series Theta*(q, x) = sum_{j in Z} q^{j(j+1)/2} x^j and
//! its Jacobi triple product form
//!
//!   Theta*(q, y) = prod_{m>=1} (1 - q^m)(1 + y q^m)(1 + y^{-1} q^{m-1}),
//!
//! the square-substituted identity: y plays the role of x^2 throughout,
//! so no square roots ever appear. The zeros of Theta* are exactly the
//! points mu_k = -q^{-k}, k in Z; the m = 1 factor of the product carries
//! the zero at y = -1, which is why the deflated variant below divides it
//! out analytically rather than numerically.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{EvalResult, EPS};
use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::qparam::QParam;

/// Which summation route to use for Theta*.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThetaStarMethod {
    BilateralSum,
    TripleProduct,
}

/// Evaluate Theta*(q, x) by the requested method. x must be nonzero.
pub fn eval_jacobi_theta_star(
    q: &QParam,
    x: Complex64,
    target_eps: f64,
    method: ThetaStarMethod,
) -> Result<EvalResult> {
    if x == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("Theta* is undefined at x = 0".into()));
    }
    match method {
        ThetaStarMethod::BilateralSum => bilateral(q.value(), x, target_eps),
        ThetaStarMethod::TripleProduct => triple_product(q.value(), x, target_eps),
    }
}

/// Bilateral sum over j in [-(L+1), L]. The truncation is symmetric in the
/// exponent j(j+1)/2 (which is symmetric about j = -1/2), so both tails
/// start at the same exponent T_{L+1}.
fn bilateral(q: Complex64, x: Complex64, target_eps: f64) -> Result<EvalResult> {
    let q_abs = q.norm();
    let r = x.norm();
    let half_eps = target_eps / 2.0;

    let mut l = 0usize;
    loop {
        let pos = pos_tail(q_abs, r, l);
        let neg = neg_tail(q_abs, r, l);
        if pos <= half_eps && neg <= half_eps {
            break;
        }
        l += 1;
        if l > super::MAX_TRUNCATION_ORDER {
            return Err(Error::PrecisionBudget(
                "bilateral truncation cannot meet target_eps".into(),
            ));
        }
    }

    let mut acc = KahanSum::new();
    let mut sum_abs = 0.0;
    // nonnegative side, j = 0..=L
    let mut term = Complex64::new(1.0, 0.0);
    let mut qpow = Complex64::new(1.0, 0.0);
    acc.add(term);
    sum_abs += 1.0;
    for _j in 1..=l {
        qpow *= q;
        term *= qpow * x;
        acc.add(term);
        sum_abs += term.norm();
    }
    // negative side, j = -m for m = 1..=L+1; exponent m(m-1)/2
    let inv = Complex64::new(1.0, 0.0) / x;
    let mut term = inv; // m = 1: q^0 x^{-1}
    let mut qpow = Complex64::new(1.0, 0.0); // q^{m-1}
    acc.add(term);
    sum_abs += term.norm();
    for _m in 2..=(l + 1) {
        qpow *= q;
        term *= qpow * inv;
        acc.add(term);
        sum_abs += term.norm();
    }

    let value = acc.value();
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::PrecisionBudget(
            "Theta* value exceeds the double-precision range".into(),
        ));
    }
    let n_terms = 2 * l + 2;
    let fp = EPS * sum_abs * (3.0 * n_terms as f64 + 6.0);
    Ok(EvalResult {
        value,
        error_bound: pos_tail(q_abs, r, l) + neg_tail(q_abs, r, l) + fp,
        terms_used: n_terms,
    })
}

/// Tail of the nonnegative side beyond j = L.
fn pos_tail(q_abs: f64, r: f64, l: usize) -> f64 {
    super::series_tail(q_abs, r, l + 1).map(|t| t.bound).unwrap_or(f64::INFINITY)
}

/// Tail of the negative side beyond m = L+1 (terms q^{m(m-1)/2} r^{-m}).
fn neg_tail(q_abs: f64, r: f64, l: usize) -> f64 {
    let m = l + 2;
    let ratio = q_abs.powi(m as i32 - 1) / r;
    if !(ratio < 0.5) {
        return f64::INFINITY;
    }
    if q_abs == 0.0 {
        // only the m = 1 term exists on this side; tail from m >= 2 is 0
        return 0.0;
    }
    let first = ((m * (m - 1) / 2) as f64 * q_abs.ln() - (m as f64) * r.ln()).exp();
    first / (1.0 - ratio)
}

/// Triple product: value and a relative truncation bound turned absolute.
fn triple_product(q: Complex64, x: Complex64, target_eps: f64) -> Result<EvalResult> {
    let q_abs = q.norm();
    let r = x.norm();
    let depth = product_depth(q_abs, r, target_eps)?;
    let inv = Complex64::new(1.0, 0.0) / x;
    let one = Complex64::new(1.0, 0.0);
    let mut value = one;
    let mut qm = q; // q^m
    let mut qm1 = one; // q^{m-1}
    for _m in 1..=depth {
        value *= (one - qm) * (one + x * qm) * (one + inv * qm1);
        qm1 *= q;
        qm *= q;
    }
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::PrecisionBudget(
            "triple product exceeds the double-precision range".into(),
        ));
    }
    let rel_tail = product_tail_rel(q_abs, r, depth);
    let fp = 6.0 * (depth as f64 + 1.0) * EPS;
    Ok(EvalResult {
        value,
        error_bound: value.norm() * (rel_tail + fp),
        terms_used: depth,
    })
}

/// Depth M so that the omitted factors m > M multiply the value by
/// 1 + delta with |delta| <= target (relative).
fn product_depth(q_abs: f64, r: f64, target_eps: f64) -> Result<usize> {
    if q_abs == 0.0 {
        return Ok(1);
    }
    let target = target_eps.min(0.1);
    for m in 1..=super::MAX_TRUNCATION_ORDER {
        if product_tail_rel(q_abs, r, m) <= target {
            return Ok(m);
        }
    }
    Err(Error::PrecisionBudget(
        "triple product depth cannot meet target_eps".into(),
    ))
}

/// Relative bound on prod_{m>M} |(1-q^m)(1+x q^m)(1 + x^{-1} q^{m-1})| - 1.
/// Uses |log(1+z)| <= 2|z| for |z| <= 1/2.
fn product_tail_rel(q_abs: f64, r: f64, m: usize) -> f64 {
    let qn = q_abs.powi(m as i32 + 1);
    let z1 = qn / (1.0 - q_abs); // sum of |q|^m
    let z2 = r * qn / (1.0 - q_abs); // sum of |x q^m|
    let z3 = (q_abs.powi(m as i32) / r) / (1.0 - q_abs); // sum of |x^{-1} q^{m-1}|
    let biggest = (qn).max(r * qn).max(q_abs.powi(m as i32) / r);
    if !(biggest <= 0.5) {
        return f64::INFINITY;
    }
    (2.0 * (z1 + z2 + z3)).exp_m1()
}

/// Theta* with the m = 1 factor (1 + y^{-1}) divided out:
///
///   Theta*(q, y) = ((y + 1)/y) * W(q, y),
///   W(q, y) = prod_{m>=1} (1-q^m)(1+y q^m) * prod_{m>=2} (1 + y^{-1} q^{m-1}).
///
/// W is nonzero at y = -1 (it equals -Theta*'(q,-1), a product of Euler
/// factors), which makes it the right object for evaluating Theta* at
/// points exponentially close to its zero: the caller supplies y + 1
/// directly and multiplies back, so no cancellation ever happens.
pub fn theta_star_deflated(q: Complex64, y: Complex64, target_eps: f64) -> Result<EvalResult> {
    if y == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("W(q, y) is undefined at y = 0".into()));
    }
    let q_abs = q.norm();
    let r = y.norm();
    let depth = product_depth(q_abs, r, target_eps)?;
    let inv = Complex64::new(1.0, 0.0) / y;
    let mut value = Complex64::new(1.0, 0.0);
    let mut qm = q;
    for m in 1..=depth {
        let mut f = (Complex64::new(1.0, 0.0) - qm) * (Complex64::new(1.0, 0.0) + y * qm);
        if m >= 2 {
            f *= Complex64::new(1.0, 0.0) + inv * (qm / q);
        }
        value *= f;
        qm *= q;
    }
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::PrecisionBudget(
            "deflated product exceeds the double-precision range".into(),
        ));
    }
    let rel_tail = product_tail_rel(q_abs, r, depth);
    let fp = 6.0 * (depth as f64 + 1.0) * EPS;
    Ok(EvalResult {
        value,
        error_bound: value.norm() * (rel_tail + fp),
        terms_used: depth,
    })
}

/// Euler function phi(q) = prod_{m>=1} (1 - q^m) with a relative bound.
pub fn euler_phi(q: Complex64, target_eps: f64) -> Result<EvalResult> {
    let q_abs = q.norm();
    if q_abs >= 1.0 {
        return Err(Error::Domain("phi(q) requires |q| < 1".into()));
    }
    let target = target_eps.clamp(1e-16, 0.1);
    let mut depth = 1usize;
    while 2.0 * q_abs.powi(depth as i32 + 1) / (1.0 - q_abs) > target {
        depth += 1;
        if depth > super::MAX_TRUNCATION_ORDER {
            return Err(Error::PrecisionBudget("phi(q) depth exceeded".into()));
        }
    }
    let mut value = Complex64::new(1.0, 0.0);
    let mut qm = q;
    for _ in 1..=depth {
        value *= Complex64::new(1.0, 0.0) - qm;
        qm *= q;
    }
    let rel = (2.0 * q_abs.powi(depth as i32 + 1) / (1.0 - q_abs)).exp_m1()
        + 2.0 * depth as f64 * EPS;
    Ok(EvalResult {
        value,
        error_bound: value.norm() * rel,
        terms_used: depth,
    })
}
