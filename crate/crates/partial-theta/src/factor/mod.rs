//! Product reconstruction and Laguerre-Polya structure checks.
//!
//! For fixed q the function factors over its zeros, theta = prod (1 + x/x_k);
//! splitting the zeros by realness gives the degree-2j polynomial P (the
//! conjugate pairs) times the real-rooted factor, whose Taylor
//! coefficients g_k are elementary symmetric functions of the
//! reciprocals 1/xi_k and obey the bound chain
//!
//!   g_k <= q^{k(k+1)/2} / (D (1-q))^k,   xi_k >= D q^{-k}.
//!
//! D is existential in the theory; here it is exhibited as a concrete
//! witness computed from the certified zeros.

mod symmetric;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{eval_theta_core, tail_zero_displacement};
use crate::qparam::QParam;
use crate::spectrum::COLLISION_TOL_REL;
use crate::zeros::ZeroSet;

/// Split of a certified zero set into real zeros and conjugate pairs,
/// with the complex pairs expanded into the real polynomial P.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductDecomposition {
    pub q: QParam,
    /// Real zeros -xi_k in decreasing order (ascending modulus), repeated
    /// with multiplicity.
    pub real_zeros: Vec<f64>,
    /// Upper-half-plane representatives of the conjugate pairs.
    pub complex_pairs: Vec<Complex64>,
    /// Coefficients of P (ascending degree); constant term exactly 1,
    /// degree 2 * complex_pairs.len(), no real roots.
    pub poly_coeffs: Vec<f64>,
    /// Zeros consumed, counted with multiplicity.
    pub k_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpClass {
    /// All real-factor zeros of one sign (type I).
    LpI,
    /// Real zeros of both signs.
    Lp,
}

/// Coefficient-bound report for the real-rooted factor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpClassReport {
    /// g_1 .. g_{k_max}: Taylor coefficients of prod (1 + x/xi_k).
    pub g_coeffs: Vec<f64>,
    /// Witness for xi_k >= D q^{-k}: min over the certified zeros of xi_k q^k.
    pub d_estimate: f64,
    /// bound_k / g_k for each k; every entry must be >= 1 up to rounding.
    pub bound_margin: Vec<f64>,
    pub class_tag: LpClass,
}

/// Structure report for q in (-1, 0).
///
/// `sign_alternation_ok` records whether every pair of consecutive real
/// zeros (ascending modulus) has opposite signs. In the tail this always
/// holds (each rung -q^{-k} carries one real zero and the rungs
/// alternate); closer to the origin conjugate pairs may swallow an odd
/// run of rungs, leaving same-sign real neighbours - a genuine structure,
/// observed e.g. at q = -0.85, and reported here rather than erased. A
/// violation between two tail-regime zeros, by contrast, contradicts the
/// ladder structure and fails loudly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NegativeQReport {
    pub q: f64,
    /// Real zeros by ascending modulus, signed.
    pub real_zeros_signed: Vec<f64>,
    pub sign_alternation_ok: bool,
    /// Smallest index (1-based) from which |xi~_k| increases strictly.
    pub monotone_from: usize,
    pub complex_pair_count: usize,
}

/// One grid point of a product-reconstruction check.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProductPoint {
    pub x: Complex64,
    pub theta: Complex64,
    pub product: Complex64,
    pub rel_error: f64,
    /// prod_{k>K} (1 + |x|/|x_k|) - 1 with the surrogate |x_k| >= |q|^{-k}/2.
    pub tail_factor_bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductReport {
    pub k_used: usize,
    pub points: Vec<ProductPoint>,
}

/// Zeros ordered by modulus, expanded with multiplicity.
fn ordered_zero_locations(set: &ZeroSet) -> Vec<Complex64> {
    let mut out = Vec::new();
    for z in &set.zeros {
        for _ in 0..z.multiplicity {
            out.push(z.location);
        }
    }
    out
}

fn tail_factor_bound(q_abs: f64, x_abs: f64, k_from: usize) -> f64 {
    // sum_{k >= k_from} log(1 + 2 |x| |q|^k), summed until negligible,
    // then the geometric remainder
    let mut s = 0.0;
    let mut k = k_from;
    loop {
        let term = (2.0 * x_abs * q_abs.powi(k as i32)).ln_1p();
        s += term;
        k += 1;
        if term < 1e-18 * (1.0 + s) || k > k_from + 10_000 {
            break;
        }
    }
    s += 2.0 * x_abs * q_abs.powi(k as i32) / (1.0 - q_abs);
    s.exp_m1()
}

/// Evaluate prod_{k<=K} (1 + x/x_k) over the K smallest-modulus certified
/// zeros on a grid and compare against the series evaluation.
pub fn reconstruct_product(
    set: &ZeroSet,
    k_take: usize,
    test_grid: &[Complex64],
) -> Result<ProductReport> {
    let locations = ordered_zero_locations(set);
    if locations.len() < k_take {
        return Err(Error::Domain(format!(
            "need {k_take} certified zeros, the set holds {}",
            locations.len()
        )));
    }
    if !set.zeros.iter().all(|z| z.certified) {
        return Err(Error::Domain("zero set is not fully certified".into()));
    }
    let q_abs = set.q.modulus();
    let qv = set.q.value();
    let one = Complex64::new(1.0, 0.0);
    let mut points = Vec::with_capacity(test_grid.len());
    for &x in test_grid {
        // theta = prod (1 + x/x_k) with zeros at -x_k: factor (1 - x/z_k)
        let mut product = one;
        for z in locations.iter().take(k_take) {
            product *= one - x / z;
        }
        let th = eval_theta_core(qv, x, 1e-13)?;
        if th.value.norm() <= 10.0 * th.error_bound && x != Complex64::new(0.0, 0.0) {
            return Err(Error::ContourTooClose(format!(
                "grid point {x} is too close to a zero for a relative comparison"
            )));
        }
        let rel_error = if x == Complex64::new(0.0, 0.0) {
            (product - one).norm()
        } else {
            (th.value - product).norm() / th.value.norm()
        };
        points.push(ProductPoint {
            x,
            theta: th.value,
            product,
            rel_error,
            tail_factor_bound: tail_factor_bound(q_abs, x.norm(), k_take + 1),
        });
    }
    Ok(ProductReport {
        k_used: k_take,
        points,
    })
}

/// Split a certified zero set (positive real q) into the real factor and
/// the complex-pair polynomial P with P(0) = 1.
pub fn decompose(set: &ZeroSet) -> Result<ProductDecomposition> {
    set.q.require_positive_real()?;
    if !set.zeros.iter().all(|z| z.certified) {
        return Err(Error::Domain("zero set is not fully certified".into()));
    }
    let mut real_zeros = Vec::new();
    let mut pairs = Vec::new();
    for z in &set.zeros {
        let im = z.location.im;
        if im == 0.0 {
            for _ in 0..z.multiplicity {
                real_zeros.push(z.location.re);
            }
            continue;
        }
        if im.abs() <= COLLISION_TOL_REL * z.location.norm() {
            return Err(Error::NearSpectral {
                q: set.q.value().re,
                pair_re: z.location.re,
                pair_im: im,
            });
        }
        if im > 0.0 {
            for _ in 0..z.multiplicity {
                pairs.push(z.location);
            }
        }
    }
    // real zeros of theta are all negative for q in (0,1)
    if let Some(&bad) = real_zeros.iter().find(|&&r| r >= 0.0) {
        return Err(Error::Certification(format!(
            "real zero at {bad} >= 0 contradicts negativity for q in (0,1)"
        )));
    }
    real_zeros.sort_by(|a, b| b.partial_cmp(a).unwrap()); // decreasing: -1.3 > -5.2 > ...

    // P = prod over pairs of (1 - x/z)(1 - x/conj z)
    //   = prod (1 - 2 Re(1/z) x + x^2/|z|^2), constant term exactly 1
    let mut poly = vec![1.0f64];
    for z in &pairs {
        let n2 = z.norm_sqr();
        let c1 = -2.0 * z.re / n2;
        let c2 = 1.0 / n2;
        if c1 * c1 - 4.0 * c2 >= 0.0 {
            return Err(Error::Certification(format!(
                "pair quadratic for zero {z} has a real root"
            )));
        }
        let mut next = vec![0.0f64; poly.len() + 2];
        for (i, &a) in poly.iter().enumerate() {
            next[i] += a;
            next[i + 1] += a * c1;
            next[i + 2] += a * c2;
        }
        poly = next;
    }
    let k_used = real_zeros.len() + 2 * pairs.len();
    Ok(ProductDecomposition {
        q: set.q,
        real_zeros,
        complex_pairs: pairs,
        poly_coeffs: poly,
        k_used,
    })
}

/// Reciprocals 1/xi of the real zeros, ascending modulus, extended beyond
/// the set by tail-displacement slots so the symmetric functions converge.
fn real_reciprocals(set: &ZeroSet, slots_wanted: usize) -> Result<Vec<f64>> {
    let q = set.q.real_value().expect("callers check a real parameter");
    let mut recips: Vec<f64> = Vec::new();
    for z in &set.zeros {
        if z.location.im == 0.0 {
            for _ in 0..z.multiplicity {
                recips.push(1.0 / (-z.location.re));
            }
        }
    }
    // the set covers ladder slots 1..=total_multiplicity
    let covered = set.total_multiplicity() as usize;
    let qc = Complex64::new(q, 0.0);
    for k in (covered + 1)..=slots_wanted.max(covered) {
        let disp = tail_zero_displacement(qc, k)?;
        // xi_k q^k = 1 - d q^k, accurate at any k (d from the reduced solve)
        let denom = 1.0 - disp.d.re * q.powi(k as i32);
        recips.push(q.powi(k as i32) / denom);
    }
    Ok(recips)
}

/// Verify the coefficient-bound chain for the real-rooted factor of
/// theta(q, .), q in (0, 1).
pub fn lp_bound_check(set: &ZeroSet, k_max: usize) -> Result<LpClassReport> {
    let q = set.q.require_positive_real()?;
    if k_max == 0 {
        return Err(Error::Domain("k_max must be >= 1".into()));
    }
    // extend until the omitted slots cannot move g_k at double precision
    let extra = ((1e-14f64.ln() + (1.0 - q).ln()) / q.ln()).ceil().max(4.0) as usize;
    let covered = set.total_multiplicity() as usize;
    let recips = real_reciprocals(set, covered + extra)?;
    if recips.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Certification(
            "nonpositive real-zero reciprocal; zeros must be negative for q in (0,1)".into(),
        ));
    }
    let es = symmetric::elementary_symmetric(&recips, k_max);
    let g: Vec<f64> = es[1..].to_vec();

    // witness D = min over ascending index of xi_i q^i = q^i / r_i
    let mut d_estimate = f64::INFINITY;
    for (i, &r) in recips.iter().enumerate() {
        d_estimate = d_estimate.min(q.powi(i as i32 + 1) / r);
    }
    if !(d_estimate > 0.0) {
        return Err(Error::Certification(
            "D witness is nonpositive, contradicting xi_k >= D q^{-k}".into(),
        ));
    }

    let mut margins = Vec::with_capacity(k_max);
    for (k, &gk) in g.iter().enumerate() {
        let k1 = (k + 1) as i32;
        let bound = q.powi(k1 * (k1 + 1) / 2) / (d_estimate * (1.0 - q)).powi(k1);
        if !(gk > 0.0) {
            return Err(Error::Certification(format!(
                "g_{} = {gk} is not positive",
                k + 1
            )));
        }
        margins.push(bound / gk);
    }
    Ok(LpClassReport {
        g_coeffs: g,
        d_estimate,
        bound_margin: margins,
        class_tag: LpClass::LpI,
    })
}

/// Structure report for negative q: sign alternation of the real zeros,
/// eventual monotone growth of their moduli, and the pair count of the
/// no-real-root factor R.
pub fn negative_q_report(set: &ZeroSet, k_max: usize) -> Result<NegativeQReport> {
    let q = set.q.require_negative_real()?;
    if !set.zeros.iter().all(|z| z.certified) {
        return Err(Error::Domain("zero set is not fully certified".into()));
    }
    let mut signed: Vec<f64> = Vec::new();
    let mut pair_count = 0usize;
    for z in &set.zeros {
        let im = z.location.im;
        if im == 0.0 {
            for _ in 0..z.multiplicity {
                signed.push(z.location.re);
            }
        } else if im > 0.0 {
            pair_count += z.multiplicity as usize;
            // R = prod (1 - x/z)(1 - x/conj z) must have no real roots
            let n2 = z.location.norm_sqr();
            let c1 = -2.0 * z.location.re / n2;
            if c1 * c1 - 4.0 / n2 >= 0.0 {
                return Err(Error::Certification(format!(
                    "pair quadratic for zero {} has a real root",
                    z.location
                )));
            }
        }
    }
    // extend along the ladder to k_max slots
    let covered = set.total_multiplicity() as usize;
    let qc = Complex64::new(q, 0.0);
    for k in (covered + 1)..=k_max.max(covered) {
        let disp = tail_zero_displacement(qc, k)?;
        let mu = -(qc.powi(-(k as i32)));
        signed.push(mu.re + disp.d.re);
    }
    signed.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());

    // alternation: violations are tolerated (and reported) only among
    // pre-asymptotic zeros, where pairs can swallow an odd run of rungs
    let tail_modulus = set.q.modulus().powf(-(set.tail_start_k as f64 - 0.5));
    let mut alternation_ok = true;
    for w in signed.windows(2) {
        if w[0] * w[1] >= 0.0 {
            if w[0].abs() >= tail_modulus {
                return Err(Error::Certification(format!(
                    "tail-regime real zeros {} and {} do not alternate in sign; \
                     this contradicts the ladder structure",
                    w[0], w[1]
                )));
            }
            alternation_ok = false;
        }
    }

    let mut monotone_from = signed.len().saturating_sub(1).max(1);
    for start in (1..signed.len()).rev() {
        if signed[start].abs() > signed[start - 1].abs() {
            monotone_from = start;
        } else {
            break;
        }
    }
    if signed.len() >= 2 && signed[signed.len() - 1].abs() <= signed[signed.len() - 2].abs() {
        return Err(Error::Certification(
            "no index from which |xi~_k| increases strictly; contradicts the tail structure"
                .into(),
        ));
    }

    Ok(NegativeQReport {
        q,
        real_zeros_signed: signed,
        sign_alternation_ok: alternation_ok,
        monotone_from,
        complex_pair_count: pair_count,
    })
}
