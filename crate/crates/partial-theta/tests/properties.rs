//! Property tests for the evaluation-layer invariants.

mod support;

use num_complex::Complex64;
use partial_theta::eval::{series_tail, ThetaStarMethod};
use partial_theta::QParam;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Oracle dominance: the claimed error bound covers the distance to
    /// an extended-precision summation with four times the terms.
    #[test]
    fn error_bound_dominates_dd_oracle(
        q_abs in 0.05f64..0.9,
        q_arg in 0f64..std::f64::consts::TAU,
        x_exp in -1.0f64..8.0,
        x_arg in 0f64..std::f64::consts::TAU,
        real_q in proptest::bool::ANY,
    ) {
        let qv = if real_q {
            c(q_abs * q_arg.cos().signum(), 0.0)
        } else {
            Complex64::from_polar(q_abs, q_arg)
        };
        let q = QParam::new(qv).unwrap();
        let x = Complex64::from_polar(q_abs.powf(-x_exp.min(8.0)).min(1e8), x_arg);
        let r = partial_theta::eval_theta(&q, x, 1e-12).unwrap();
        let oracle = support::theta_dd(qv, x, 4 * (r.terms_used + 2));
        let diff = support::Cdd::from_c64(r.value).sub(oracle).norm();
        prop_assert!(
            diff <= r.error_bound,
            "diff {:.3e} > bound {:.3e} at q={qv} x={x}", diff, r.error_bound
        );
    }

    /// Conjugate symmetry is exact (bit-for-bit) for real parameters.
    #[test]
    fn conjugate_symmetry_bit_exact(
        q in -0.9f64..0.9,
        re in -20f64..20.0,
        im in 0.01f64..20.0,
    ) {
        let qp = QParam::real(q).unwrap();
        let x = c(re, im);
        let a = partial_theta::eval_theta(&qp, x.conj(), 1e-12).unwrap().value;
        let b = partial_theta::eval_theta(&qp, x, 1e-12).unwrap().value.conj();
        prop_assert_eq!(a, b);
    }

    /// theta(q, 0) = 1 exactly for every admissible q.
    #[test]
    fn theta_at_origin_is_one(
        q_abs in 0f64..0.999,
        q_arg in 0f64..std::f64::consts::TAU,
    ) {
        let q = QParam::new(Complex64::from_polar(q_abs, q_arg)).unwrap();
        let r = partial_theta::eval_theta(&q, c(0.0, 0.0), 1e-14).unwrap();
        prop_assert_eq!(r.value, c(1.0, 0.0));
    }

    /// truncation_order returns the smallest order satisfying the stated
    /// inequalities, and tightening eps never shrinks it.
    #[test]
    fn truncation_order_minimal_and_monotone(
        q_abs in 0.05f64..0.9,
        radius in 1f64..1e4,
        eps_exp in -14f64..-4.0,
    ) {
        let q = QParam::real(q_abs).unwrap();
        let eps = 10f64.powf(eps_exp);
        let n = partial_theta::truncation_order(&q, radius, eps).unwrap();
        let tail_n = series_tail(q_abs, radius, n + 1).map(|t| t.bound);
        prop_assert!(matches!(tail_n, Some(b) if b <= eps));
        if n > 0 {
            let tail_prev = series_tail(q_abs, radius, n).map(|t| t.bound);
            prop_assert!(!matches!(tail_prev, Some(b) if b <= eps));
        }
        let n_tight = partial_theta::truncation_order(&q, radius, eps / 100.0).unwrap();
        prop_assert!(n_tight >= n);
    }

    /// The geometric tail bound dominates the actual tail sum.
    #[test]
    fn series_tail_dominates(
        q_abs in 0.05f64..0.9,
        radius in 0.1f64..100.0,
        start in 1usize..30,
    ) {
        prop_assume!(q_abs.powi(start as i32) * radius < 0.5);
        let tail = series_tail(q_abs, radius, start).unwrap();
        let mut actual = 0.0;
        for j in start..start + 400 {
            let t = (j * (j + 1) / 2) as f64;
            actual += (t * q_abs.ln() + (j as f64) * radius.ln()).exp();
        }
        prop_assert!(tail.bound >= actual);
    }

    /// Asymptotic seeds lie exactly on the ladder moduli.
    #[test]
    fn seed_moduli_on_ladder(
        q_abs in 0.1f64..0.9,
        negative in proptest::bool::ANY,
        k in 1usize..20,
    ) {
        let q = QParam::real(if negative { -q_abs } else { q_abs }).unwrap();
        let seeds = partial_theta::seed_zeros_asymptotic(&q, k, k).unwrap();
        let expect = q_abs.powi(-(k as i32));
        prop_assert!((seeds[0].norm() - expect).abs() <= 1e-12 * expect);
    }

    /// Bilateral and triple-product evaluations agree within their
    /// summed bounds.
    #[test]
    fn theta_star_routes_agree(
        q_abs in 0.05f64..0.85,
        q_arg in 0f64..std::f64::consts::TAU,
        x_abs in 0.2f64..20.0,
        x_arg in 0f64..std::f64::consts::TAU,
    ) {
        let q = QParam::new(Complex64::from_polar(q_abs, q_arg)).unwrap();
        let x = Complex64::from_polar(x_abs, x_arg);
        let a = partial_theta::eval_jacobi_theta_star(&q, x, 1e-12, ThetaStarMethod::BilateralSum)
            .unwrap();
        let b = partial_theta::eval_jacobi_theta_star(&q, x, 1e-12, ThetaStarMethod::TripleProduct)
            .unwrap();
        prop_assert!((a.value - b.value).norm() <= a.error_bound + b.error_bound);
    }

    /// The split theta = Theta* + Xi holds within bounds for |x| > 1.
    #[test]
    fn split_identity_within_bounds(
        q in -0.85f64..0.85,
        x_abs in 1.5f64..50.0,
        x_arg in 0f64..std::f64::consts::TAU,
    ) {
        prop_assume!(q.abs() > 0.01);
        let qp = QParam::real(q).unwrap();
        let x = Complex64::from_polar(x_abs, x_arg);
        let th = partial_theta::eval_theta(&qp, x, 1e-12).unwrap();
        let ts = partial_theta::eval_jacobi_theta_star(&qp, x, 1e-12, ThetaStarMethod::BilateralSum)
            .unwrap();
        let xi = partial_theta::eval_xi(&qp, x, 1e-12).unwrap();
        let resid = (th.value - (ts.value + xi.value)).norm();
        prop_assert!(resid <= th.error_bound + ts.error_bound + xi.error_bound);
    }
}
