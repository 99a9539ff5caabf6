//! The negative-index part of the bilateral series:
//!
//!   Xi(q, x) = -sum_{j <= -1} q^{j(j+1)/2} x^j
//!            = -sum_{m >= 1} q^{m(m-1)/2} x^{-m},
//!
//! so that theta = Theta* + Xi. As a series in 1/x it has no constant
//! term and coefficient moduli below 1, hence |Xi| <= 1/(|x| - 1) for
//! |x| > 1.

use num_complex::Complex64;

use super::{EvalResult, EPS};
use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::qparam::QParam;

/// Evaluate Xi(q, x) for |x| > 1 with a geometric tail bound.
pub fn eval_xi(q: &QParam, x: Complex64, target_eps: f64) -> Result<EvalResult> {
    eval_xi_core(q.value(), x, target_eps)
}

pub(crate) fn eval_xi_core(q: Complex64, x: Complex64, target_eps: f64) -> Result<EvalResult> {
    let r = x.norm();
    if !(r > 1.0) {
        return Err(Error::Domain(format!(
            "Xi(q, x) requires |x| > 1, got |x| = {r}"
        )));
    }
    let q_abs = q.norm();
    let mut m_top = 1usize;
    while xi_tail(q_abs, r, m_top) > target_eps {
        m_top += 1;
        if m_top > super::MAX_TRUNCATION_ORDER {
            return Err(Error::PrecisionBudget(
                "Xi truncation cannot meet target_eps".into(),
            ));
        }
    }
    let inv = Complex64::new(1.0, 0.0) / x;
    let mut acc = KahanSum::new();
    let mut sum_abs = 0.0;
    let mut term = inv; // m = 1: q^0 x^{-1}
    let mut qpow = Complex64::new(1.0, 0.0); // q^{m-1}
    acc.add(term);
    sum_abs += term.norm();
    for _m in 2..=m_top {
        qpow *= q;
        term *= qpow * inv;
        acc.add(term);
        sum_abs += term.norm();
    }
    let value = -acc.value();
    Ok(EvalResult {
        value,
        error_bound: xi_tail(q_abs, r, m_top) + EPS * sum_abs * (3.0 * m_top as f64 + 6.0),
        terms_used: m_top,
    })
}

/// Tail beyond m = M: sum_{m > M} |q|^{m(m-1)/2} r^{-m}.
fn xi_tail(q_abs: f64, r: f64, m: usize) -> f64 {
    let m1 = m + 1;
    let ratio = q_abs.powi(m1 as i32 - 1) / r;
    if !(ratio < 0.5) {
        return f64::INFINITY;
    }
    let first = if q_abs == 0.0 && m1 >= 2 {
        0.0
    } else {
        ((m1 * (m1 - 1) / 2) as f64 * q_abs.ln().min(0.0) - (m1 as f64) * r.ln()).exp()
    };
    first / (1.0 - ratio)
}
