//! Argument-principle winding numbers over circles.
//!
//! The circle is subdivided adaptively until every segment's argument
//! change is below pi/2; each initial segment is split at least once
//! before it may be accepted. Every sampled value must clear its own
//! evaluation error bound by a guard factor, otherwise the contour is too
//! close to a zero for the count to be meaningful and the call fails.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::eval::eval_theta_core;
use crate::qparam::QParam;

/// Value-with-bound sample on the contour.
type Sample = (Complex64, f64);

pub(crate) struct WindingOptions {
    pub initial_segments: usize,
    pub max_evals: usize,
    pub guard: f64,
}

impl Default for WindingOptions {
    fn default() -> Self {
        WindingOptions {
            initial_segments: 64,
            max_evals: 60_000,
            guard: 4.0,
        }
    }
}

/// Winding number of `eval` along t in [0, 2pi).
pub(crate) fn winding_over_circle<F>(eval: &F, opts: &WindingOptions) -> Result<i64>
where
    F: Fn(f64) -> Result<Sample>,
{
    let n0 = opts.initial_segments.max(8);
    let mut budget = opts.max_evals as isize;
    let mut points: Vec<(f64, Sample)> = Vec::with_capacity(n0 + 1);
    for i in 0..n0 {
        let t = 2.0 * PI * i as f64 / n0 as f64;
        points.push((t, checked_eval(eval, t, opts.guard, &mut budget)?));
    }
    points.push((2.0 * PI, points[0].1));

    let mut total = 0.0;
    for w in points.windows(2) {
        let (t0, v0) = w[0];
        let (t1, v1) = w[1];
        total += segment_arg(eval, t0, v0, t1, v1, 0, opts, &mut budget)?;
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-3 {
        return Err(Error::Certification(format!(
            "winding did not settle to an integer: total argument change {total:.6} rad"
        )));
    }
    Ok(rounded as i64)
}

fn checked_eval<F>(eval: &F, t: f64, guard: f64, budget: &mut isize) -> Result<Sample>
where
    F: Fn(f64) -> Result<Sample>,
{
    *budget -= 1;
    if *budget < 0 {
        return Err(Error::Certification(
            "winding evaluation budget exhausted before segments settled".into(),
        ));
    }
    let (v, err) = eval(t)?;
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::PrecisionBudget(
            "contour value exceeds the double-precision range".into(),
        ));
    }
    if v.norm() <= guard * err || v.norm() == 0.0 {
        return Err(Error::ContourTooClose(format!(
            "|f| = {:.3e} at t = {t:.6} is within {guard} x its error bound {err:.3e}",
            v.norm()
        )));
    }
    Ok((v, err))
}

#[allow(clippy::too_many_arguments)]
fn segment_arg<F>(
    eval: &F,
    t0: f64,
    v0: Sample,
    t1: f64,
    v1: Sample,
    depth: usize,
    opts: &WindingOptions,
    budget: &mut isize,
) -> Result<f64>
where
    F: Fn(f64) -> Result<Sample>,
{
    let dphi = (v1.0 / v0.0).arg();
    // depth >= 1 forces one unconditional split of each initial segment,
    // which removes most aliasing of fast-winding contours.
    if depth >= 1 && dphi.abs() < PI / 2.0 {
        return Ok(dphi);
    }
    if depth > 40 {
        return Err(Error::Certification(
            "contour refinement depth exhausted without settling".into(),
        ));
    }
    let tm = 0.5 * (t0 + t1);
    let vm = checked_eval(eval, tm, opts.guard, budget)?;
    Ok(segment_arg(eval, t0, v0, tm, vm, depth + 1, opts, budget)?
        + segment_arg(eval, tm, vm, t1, v1, depth + 1, opts, budget)?)
}

/// Number of zeros of theta(q, .) inside the circle |x - center| = radius,
/// counted with multiplicity, exact integer via adaptive argument tracking.
pub fn count_zeros_argument_principle(
    q: &QParam,
    center: Complex64,
    radius: f64,
) -> Result<i64> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain("contour radius must be positive".into()));
    }
    let qv = q.value();
    let eval = |t: f64| -> Result<Sample> {
        let x = center + Complex64::from_polar(radius, t);
        let r = eval_theta_core(qv, x, 1e-13)?;
        Ok((r.value, r.error_bound))
    };
    winding_over_circle(&eval, &WindingOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_disk_is_zero_free_for_small_q() {
        let q = QParam::real(0.2).unwrap();
        assert_eq!(count_zeros_argument_principle(&q, c(0.0, 0.0), 1.0).unwrap(), 0);
    }

    #[test]
    fn counts_the_first_rungs() {
        // q = 0.2: zeros near -5ish, -27ish, ...; the disk |x| <= q^{-1.5}
        // (about 11.2) holds exactly one and |x| <= q^{-2.5} (about 56) two.
        let q = QParam::real(0.2).unwrap();
        let r1 = 0.2f64.powf(-1.5);
        let r2 = 0.2f64.powf(-2.5);
        assert_eq!(count_zeros_argument_principle(&q, c(0.0, 0.0), r1).unwrap(), 1);
        assert_eq!(count_zeros_argument_principle(&q, c(0.0, 0.0), r2).unwrap(), 2);
    }

    #[test]
    fn synthetic_winding_of_power() {
        // f(t) = e^{3it}: winding 3.
        let eval = |t: f64| Ok((Complex64::from_polar(1.0, 3.0 * t), 1e-16));
        assert_eq!(
            winding_over_circle(&eval, &WindingOptions::default()).unwrap(),
            3
        );
    }

    #[test]
    fn contour_through_zero_is_refused() {
        // q = 0.2 has a real zero near -6.8; a circle passing through it
        // must be rejected, not miscounted.
        let q = QParam::real(0.2).unwrap();
        let zero = {
            // bisection on the real segment [-8, -5]
            let f = |x: f64| {
                eval_theta_core(q.value(), c(x, 0.0), 1e-14)
                    .unwrap()
                    .value
                    .re
            };
            let (mut lo, mut hi) = (-8.0, -5.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        };
        match count_zeros_argument_principle(&q, c(0.0, 0.0), -zero) {
            Err(Error::ContourTooClose(_)) => {}
            other => panic!("expected contour-too-close, got {other:?}"),
        }
    }
}
