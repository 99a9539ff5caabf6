//! Newton refinement of zero candidates on the full series.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{eval_theta_core, eval_theta_dx_core};
use crate::qparam::QParam;
use crate::zeros::Zero;

/// Outcome of a Newton refinement.
#[derive(Debug, Clone, Copy)]
pub struct RefinedZero {
    pub zero: Zero,
    /// The derivative fell below the suspicion threshold at some iterate;
    /// the caller should classify multiplicity by a winding count.
    pub suspected_multiple: bool,
    pub iterations: usize,
}

/// Scaled residual: |theta(z)| relative to the natural evaluation scale
/// sum |term_j| (backward-error style, so it is meaningful both at
/// moderate zeros and on the huge-value tail rungs).
fn scaled_residual(value_norm: f64, sum_abs: f64) -> f64 {
    value_norm / sum_abs.max(1.0)
}

const DERIV_SUSPICION: f64 = 1e-7;

/// Newton iteration z -> z - theta/theta' from `seed`.
///
/// Converges when the scaled residual drops below `tol` and the step is
/// machine-small; a derivative below the suspicion threshold raises the
/// `suspected_multiple` flag (a signal, not an error). Non-convergence
/// reports the last iterate.
pub fn refine_newton(
    q: &QParam,
    seed: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<RefinedZero> {
    if !(tol > 0.0) {
        return Err(Error::Domain("tol must be positive".into()));
    }
    if !seed.re.is_finite() || !seed.im.is_finite() {
        return Err(Error::Domain("seed must be finite".into()));
    }
    let qv = q.value();
    let eval_eps = (tol * 1e-2).clamp(1e-16, 1e-10);
    let mut z = seed;
    let mut suspected = false;
    let mut last_res = f64::INFINITY;
    for it in 1..=max_iter.max(1) {
        let f = eval_theta_core(qv, z, eval_eps)?;
        let res = scaled_residual(f.value.norm(), f.sum_abs);
        last_res = res;
        let fp = eval_theta_dx_core(qv, z, eval_eps)?;
        let deriv_scale = fp.sum_abs.max(1.0);
        if fp.value.norm() <= DERIV_SUSPICION * deriv_scale {
            suspected = true;
        }
        if fp.value == Complex64::new(0.0, 0.0) {
            return Err(Error::Convergence {
                last: z,
                iterations: it,
                residual: res,
            });
        }
        let step = f.value / fp.value;
        z -= step;
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Convergence {
                last: seed,
                iterations: it,
                residual: res,
            });
        }
        let step_small = step.norm() <= 4.0 * f64::EPSILON * z.norm();
        if res <= tol || step_small {
            // recompute the residual at the final point
            let f = eval_theta_core(qv, z, eval_eps)?;
            let res = scaled_residual(f.value.norm(), f.sum_abs);
            if res <= tol {
                return Ok(RefinedZero {
                    zero: Zero {
                        location: z,
                        multiplicity: 1,
                        residual: res,
                        certified: false,
                        cert_radius: 0.0,
                    },
                    suspected_multiple: suspected,
                    iterations: it,
                });
            }
            if step_small {
                // cannot move further in f64 yet residual stays high
                return Err(Error::Convergence {
                    last: z,
                    iterations: it,
                    residual: res,
                });
            }
        }
    }
    Err(Error::Convergence {
        last: z,
        iterations: max_iter,
        residual: last_res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn converges_to_rightmost_zero_from_asymptotic_seed() {
        // q = 0.2 < q~_1: all zeros real negative simple; the seed -q^{-1}
        // = -5 converges to the rightmost zero (about -6.74).
        let q = QParam::real(0.2).unwrap();
        let r = refine_newton(&q, c(-5.0, 0.0), 1e-12, 50).unwrap();
        assert!(r.zero.residual <= 1e-12);
        assert!(r.zero.location.re < -6.0 && r.zero.location.re > -7.5);
        assert_eq!(r.zero.location.im, 0.0);
        assert!(!r.suspected_multiple);
    }

    #[test]
    fn tail_seed_converges_quickly() {
        // Seeding at the exact Theta* zero with Xi ignored: a handful of
        // iterations suffice at large k.
        let q = QParam::real(0.4).unwrap();
        let seed = -(0.4f64.powi(-9));
        let r = refine_newton(&q, c(seed, 0.0), 1e-11, 50).unwrap();
        assert!(r.iterations <= 5, "took {} iterations", r.iterations);
        assert!((r.zero.location.re - seed).abs() < 0.05 * seed.abs());
    }

    #[test]
    fn nonconvergence_carries_last_iterate() {
        // theta(0.2, .) has no zero near +10^6 along the iteration path
        // within 3 steps.
        let q = QParam::real(0.2).unwrap();
        match refine_newton(&q, c(1e6, 0.0), 1e-14, 3) {
            Err(Error::Convergence { iterations, .. }) => assert_eq!(iterations, 3),
            other => panic!("expected convergence failure, got {other:?}"),
        }
    }
}
