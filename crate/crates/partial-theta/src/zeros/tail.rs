//! Certification of the tail zeros zeta_k near mu_k = -q^{-k}.
//!
//! Each tail zero is localized in the disk Omega_k of radius
//! delta_rel * |mu_k| around mu_k. Certification runs the argument
//! principle on that disk using the functional-equation-reduced evaluator
//! (which stays O(1)-conditioned for any k) and then solves for the
//! displacement in the reduced variable.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{euler_phi, tail_scaled_theta, tail_zero_displacement};
use crate::qparam::QParam;
use crate::zeros::winding::{winding_over_circle, WindingOptions};
use crate::zeros::Zero;

/// The index threshold and disk size for tail certification.
///
/// `k0` is the smallest index at which the Xi perturbation is provably
/// dominated by the Theta* scale on the whole disk boundary:
/// |q|^{k(k+1)/2} <= margin * delta_rel * |phi(q)|^3, plus the requirement
/// that the disk stays outside |x| = 10 so Xi is small and fast to sum.
/// `delta_rel` shrinks as |q| -> 1 to keep the Omega_k disks of
/// consecutive rungs disjoint.
#[derive(Debug, Clone, Copy)]
pub struct TailPolicy {
    pub k0: usize,
    pub delta_rel: f64,
}

const DOMINANCE_MARGIN: f64 = 1e-4;

impl TailPolicy {
    pub fn for_param(q: &QParam) -> Result<Self> {
        q.require_nonzero()?;
        let a = q.modulus();
        let delta_rel = (0.5 * (1.0 - a) / (1.0 + a)).min(0.1);
        let c1_abs = euler_phi(q.value(), 1e-13)?.value.norm().powi(3);
        if c1_abs == 0.0 {
            return Err(Error::PrecisionBudget(
                "phi(q)^3 underflows; |q| is too close to 1 for tail certification".into(),
            ));
        }
        let threshold_ln = (DOMINANCE_MARGIN * delta_rel * c1_abs * 0.5).ln();
        let ln_a = a.ln();
        let mut k0 = 3usize;
        loop {
            let tail_exp = (k0 as f64) * (k0 as f64 + 1.0) / 2.0;
            let dominated = tail_exp * ln_a <= threshold_ln;
            let outside = a.powi(-(k0 as i32)) * (1.0 - delta_rel) >= 10.0;
            if dominated && outside {
                break;
            }
            k0 += 1;
            if k0 > 100_000 {
                return Err(Error::PrecisionBudget(
                    "tail regime threshold not reachable".into(),
                ));
            }
        }
        Ok(TailPolicy { k0, delta_rel })
    }
}

/// Certify that exactly one (hence simple) zero of theta(q, .) lies in
/// Omega_k(delta_rel), refine it, and return it as a certified `Zero`.
pub fn certify_tail_zero(q: &QParam, k: usize, delta_rel: f64) -> Result<Zero> {
    let policy = TailPolicy::for_param(q)?;
    if k < policy.k0 {
        return Err(Error::Domain(format!(
            "k = {k} is below the configured tail threshold k0 = {} for |q| = {}",
            policy.k0,
            q.modulus()
        )));
    }
    if !(delta_rel > 0.0) || delta_rel > policy.delta_rel * 1.000_001 {
        return Err(Error::Domain(format!(
            "delta_rel must lie in (0, {:.4}] so that consecutive Omega_k disks stay disjoint",
            policy.delta_rel
        )));
    }
    let qv = q.value();
    let mu = -qv.powi(-(k as i32));
    let contour_radius = delta_rel * mu.norm();

    let eval = |t: f64| {
        let d = Complex64::from_polar(contour_radius, t);
        tail_scaled_theta(qv, k, d)
    };
    let count = winding_over_circle(&eval, &WindingOptions::default())?;
    if count != 1 {
        return Err(Error::TailRegimeNotReached {
            k,
            detail: format!("Omega_k winding is {count}, expected 1; raise k0"),
        });
    }

    let disp = tail_zero_displacement(qv, k)?;
    if disp.d.norm() > 0.5 * contour_radius {
        return Err(Error::TailRegimeNotReached {
            k,
            detail: "displacement is not well inside the certification disk".into(),
        });
    }
    let (g, _) = tail_scaled_theta(qv, k, disp.d)?;
    // backward-style residual: G against the magnitude of its cancelling parts
    let scale = {
        let probe = tail_scaled_theta(qv, k, disp.d * 0.0)?;
        // |term2| = |G(0)|; both parts have this magnitude at the zero
        probe.0.norm()
    };
    let residual = if scale > 0.0 { g.norm() / scale } else { 0.0 };

    Ok(Zero {
        location: mu + disp.d,
        multiplicity: 1,
        residual,
        certified: true,
        cert_radius: contour_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_values_for_reference_parameters() {
        let p = TailPolicy::for_param(&QParam::real(0.5).unwrap()).unwrap();
        assert_eq!(p.delta_rel, 0.1);
        assert!(p.k0 >= 5 && p.k0 <= 9, "k0 = {}", p.k0);
        let p = TailPolicy::for_param(&QParam::real(0.9).unwrap()).unwrap();
        assert!(p.delta_rel < 0.03);
        assert!(p.k0 >= 20 && p.k0 <= 45, "k0 = {}", p.k0);
    }

    #[test]
    fn certifies_simple_tail_zero() {
        let q = QParam::real(0.5).unwrap();
        let z = certify_tail_zero(&q, 12, 0.1).unwrap();
        assert!(z.certified);
        assert_eq!(z.multiplicity, 1);
        assert!(z.residual < 1e-9);
        let mu = -(0.5f64.powi(-12));
        assert!((z.location.re - mu).abs() <= 0.05 * mu.abs());
        assert_eq!(z.location.im, 0.0);
    }

    #[test]
    fn negative_q_tail_zero_is_real_with_parity_sign() {
        let q = QParam::real(-0.5).unwrap();
        // k = 12 even: mu_12 = -(-0.5)^{-12} = -4096
        let z = certify_tail_zero(&q, 12, 0.1).unwrap();
        assert_eq!(z.location.im, 0.0);
        assert!((z.location.re + 4096.0).abs() < 41.0);
        // k = 13 odd: mu_13 = +8192
        let z = certify_tail_zero(&q, 13, 0.1).unwrap();
        assert!((z.location.re - 8192.0).abs() < 82.0);
    }

    #[test]
    fn below_k0_is_domain_error() {
        let q = QParam::real(0.5).unwrap();
        match certify_tail_zero(&q, 2, 0.1) {
            Err(Error::Domain(_)) => {}
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn oversized_disk_is_domain_error() {
        let q = QParam::real(0.9).unwrap();
        let p = TailPolicy::for_param(&q).unwrap();
        match certify_tail_zero(&q, p.k0, 0.1) {
            Err(Error::Domain(_)) => {}
            other => panic!("expected domain error for delta too large, got {other:?}"),
        }
    }
}
