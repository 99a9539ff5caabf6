//! Scaled evaluation of theta near the tail zeros.
//!
//! Near mu_k = -q^{-k} the direct series is useless twice over: the
//! partial sums peak at |q|^{-k(k-1)/2} (overflow for large k) and the
//! zero's displacement from mu_k shrinks like q^{k(k+1)/2}, far below one
//! ulp of mu_k. Both problems disappear after reducing the argument with
//! the functional equation Theta*(q,x) = q x Theta*(q, qx), applied k
//! times:
//!
//!   theta(mu_k + d) = P0 * G(d),        P0 = (-1)^k q^{-k(k-1)/2},
//!   G(d) = B(d) * (delta / y) * W(q, y) + Xi(mu_k + d) / P0,
//!
//! with delta = q^k d, y = -1 + delta, B(d) = (1 + d/mu_k)^k, and W the
//! deflated triple product (Theta*(q,y) = ((y+1)/y) W(q,y)). Every factor
//! of G is O(1)-conditioned: delta is obtained from d by one exact-ish
//! multiplication, never by subtracting nearby numbers, so G resolves the
//! zero to full relative precision however tiny the displacement is.
//! Since P0 is a constant, windings of G and theta over the same circle
//! agree, and solving G = 0 for d gives the zero displacement directly.

use num_complex::Complex64;

use super::bilateral::theta_star_deflated;
use super::xi::eval_xi_core;
use super::EPS;
use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Displacement of the tail zero zeta_k from mu_k = -q^{-k}, solved in
/// the reduced variable so that it stays meaningful when |d| is far below
/// one ulp of |mu_k|.
#[derive(Debug, Clone, Copy)]
pub struct TailDisplacement {
    /// zeta_k - mu_k.
    pub d: Complex64,
    /// The normalized displacement e_k = |zeta_k + q^{-k}| |q|^k. Saturates
    /// at 0 once the true value falls below the double-precision range.
    pub e: f64,
    pub iterations: usize,
}

fn reduction_parts(q: Complex64, k: usize) -> (Complex64, Complex64) {
    // mu_k and P0^{-1} = (-1)^k q^{k(k-1)/2}
    let mu = -q.powi(-(k as i32));
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let p0_inv = q.powi((k * (k - 1) / 2) as i32) * sign;
    (mu, p0_inv)
}

/// theta(mu_k + d) / P0 together with an error bound, for |q^k d| <= ~0.3.
///
/// This is the right evaluator for contours around mu_k: it never
/// overflows and its relative accuracy is machine-level regardless of k.
pub fn tail_scaled_theta(q: Complex64, k: usize, d: Complex64) -> Result<(Complex64, f64)> {
    if k == 0 {
        return Err(Error::Domain("tail evaluation requires k >= 1".into()));
    }
    let (mu, p0_inv) = reduction_parts(q, k);
    let qk = q.powi(k as i32);
    let delta = qk * d;
    if delta.norm() > 0.45 {
        return Err(Error::Domain(format!(
            "reduced displacement |q^k d| = {} is outside the tail disk",
            delta.norm()
        )));
    }
    let y = Complex64::new(-1.0, 0.0) + delta;
    let w = theta_star_deflated(q, y, 1e-14)?;
    let b = (ONE + d / mu).powi(k as i32);
    let term1 = b * (delta / y) * w.value;
    let err1 = (b * (delta / y)).norm() * w.error_bound
        + term1.norm() * (3.0 * k as f64 + 8.0) * EPS;

    let x = mu + d;
    let xi = eval_xi_core(q, x, 1e-15)?;
    let term2 = xi.value * p0_inv;
    let err2 = xi.error_bound * p0_inv.norm() + term2.norm() * 64.0 * EPS;

    let value = term1 + term2;
    Ok((value, err1 + err2 + EPS * (term1.norm() + term2.norm())))
}

/// Solve G(d) = 0 for the displacement of the tail zero near mu_k by the
/// fixed-point form
///
///   d = -Xi(mu_k + d) * (-1)^k q^{k(k-3)/2} * y / (B(d) W(q, y)).
///
/// Converges superexponentially once the Xi perturbation is small against
/// the Theta* scale on the tail disk; if the computed displacement is not
/// small against the rung spacing, the index is below the tail regime and
/// the call fails rather than returning a meaningless correction.
pub fn tail_zero_displacement(q: Complex64, k: usize) -> Result<TailDisplacement> {
    if k == 0 {
        return Err(Error::Domain("tail displacement requires k >= 1".into()));
    }
    let (mu, _) = reduction_parts(q, k);
    let q_abs = q.norm();
    let qk = q.powi(k as i32);
    // (-1)^k q^{k(k-3)/2}; the exponent is negative for k < 3.
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let exp = (k as i64 * (k as i64 - 3)) / 2;
    let scale = q.powi(exp as i32) * sign;

    let mut d = Complex64::new(0.0, 0.0);
    for it in 0..12 {
        let x = mu + d;
        let delta = qk * d;
        let y = Complex64::new(-1.0, 0.0) + delta;
        let w = theta_star_deflated(q, y, 1e-14)?;
        if w.value.norm() == 0.0 {
            return Err(Error::Certification(
                "deflated Theta* vanished on the tail disk".into(),
            ));
        }
        let b = (ONE + d / mu).powi(k as i32);
        let xi = eval_xi_core(q, x, 1e-15)?;
        let next = -xi.value * scale * y / (b * w.value);
        if !next.re.is_finite() || !next.im.is_finite() {
            return Err(Error::PrecisionBudget(
                "tail displacement left the double-precision range".into(),
            ));
        }
        let step = (next - d).norm();
        d = next;
        if step <= 1e-9 * d.norm() + 1e-300 {
            let e = d.norm() * q_abs.powi(k as i32);
            if e > 0.1 {
                return Err(Error::TailRegimeNotReached {
                    k,
                    detail: format!(
                        "displacement e_k = {e:.3e} is not small against the rung spacing"
                    ),
                });
            }
            return Ok(TailDisplacement {
                d,
                e,
                iterations: it + 1,
            });
        }
    }
    Err(Error::Convergence {
        last: mu + d,
        iterations: 12,
        residual: f64::NAN,
    })
}
