//! Complete, certified zero sets of theta(q, .) in disks.
//!
//! Pipeline for a disk of radius R: truncate the series to a polynomial
//! whose tail is negligible on the disk, run Aberth-Ehrlich from the
//! asymptotic ladder seeds -q^{-k} (tilted off the real axis so conjugate
//! pairs are reachable), Newton-polish every candidate on the full
//! series, deduplicate by a relative cluster radius, certify each zero
//! and the total count by the argument principle. The returned set is
//! complete: a mismatch between the certified zeros and the boundary
//! winding is an error, never a silent omission.

mod aberth;
mod newton;
mod tail;
pub(crate) mod winding;

pub use newton::{refine_newton, RefinedZero};
pub use tail::{certify_tail_zero, TailPolicy};
pub use winding::count_zeros_argument_principle;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{eval_theta_core, truncation_order_abs};
use crate::qparam::QParam;
use crate::zeros::winding::{winding_over_circle, WindingOptions};

/// One zero of theta(q, .).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Zero {
    pub location: Complex64,
    pub multiplicity: u32,
    /// |theta| at the location, scaled by the evaluation magnitude
    /// sum |term_j| (backward-error style).
    pub residual: f64,
    pub certified: bool,
    /// Radius of the argument-principle circle certifying this zero;
    /// circles of distinct certified zeros are disjoint.
    pub cert_radius: f64,
}

/// The complete zero set of theta(q, .) within a disk, possibly extended
/// by certified tail zeros beyond it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroSet {
    pub q: QParam,
    pub disk_radius: f64,
    /// Ordered by modulus, ties broken by argument.
    pub zeros: Vec<Zero>,
    /// First ladder index k whose zero is certified by the tail machinery
    /// (all smaller indices are covered by the disk).
    pub tail_start_k: usize,
}

impl ZeroSet {
    pub fn total_multiplicity(&self) -> u64 {
        self.zeros.iter().map(|z| z.multiplicity as u64).sum()
    }

    /// Real zeros (exactly zero imaginary part), ascending modulus,
    /// repeated according to multiplicity.
    pub fn real_zeros(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for z in &self.zeros {
            if z.location.im == 0.0 {
                for _ in 0..z.multiplicity {
                    out.push(z.location.re);
                }
            }
        }
        out
    }

    /// Upper-half-plane representatives of the complex-conjugate pairs.
    pub fn complex_pairs(&self) -> Vec<Complex64> {
        self.zeros
            .iter()
            .filter(|z| z.location.im > 0.0)
            .map(|z| z.location)
            .collect()
    }
}

/// Newton starting points {-q^{-k} : k_min <= k <= k_max} from the tail
/// asymptotics.
pub fn seed_zeros_asymptotic(q: &QParam, k_min: usize, k_max: usize) -> Result<Vec<Complex64>> {
    q.require_nonzero()?;
    if k_min < 1 || k_min > k_max {
        return Err(Error::Domain(format!(
            "need 1 <= k_min <= k_max, got {k_min}..{k_max}"
        )));
    }
    let qv = q.value();
    Ok((k_min..=k_max).map(|k| -qv.powi(-(k as i32))).collect())
}

fn sort_zeros(zeros: &mut [Zero]) {
    zeros.sort_by(|a, b| {
        a.location
            .norm()
            .partial_cmp(&b.location.norm())
            .unwrap()
            .then(a.location.arg().partial_cmp(&b.location.arg()).unwrap())
    });
}

/// Relative cluster radius separating double-zero detection from
/// floating-point noise at double precision.
pub const CLUSTER_RADIUS_REL: f64 = 1e-8;

/// Imaginary parts below this relative level are Newton noise on a real
/// zero; between this and the collision tolerance they are ambiguous.
const REAL_SNAP_REL: f64 = 1e-9;

/// Find, refine and certify all zeros of theta(q, .) in |x| <= radius.
pub fn find_zeros_in_disk(q: &QParam, radius: f64, tol: f64) -> Result<ZeroSet> {
    q.require_nonzero()?;
    if !(radius >= 1.0) || !radius.is_finite() {
        return Err(Error::Domain("disk radius must be >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("tol must be positive".into()));
    }
    let qv = q.value();
    let q_abs = q.modulus();

    // Fix the boundary first. A requested radius may sit on a zero (the
    // asymptotic rungs live at |q|^{-k} exactly); displace the contour
    // outward by the smallest relative nudge that clears the proximity
    // guard, and use that effective radius consistently for membership.
    let mut boundary: Option<(f64, i64)> = None;
    for nudge in [0.0, 1e-9, 3e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4] {
        let r_try = radius * (1.0 + nudge);
        match count_zeros_argument_principle(q, Complex64::new(0.0, 0.0), r_try) {
            Ok(w) => {
                boundary = Some((r_try, w));
                break;
            }
            Err(Error::ContourTooClose(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let Some((radius, expected)) = boundary else {
        return Err(Error::ContourTooClose(format!(
            "no boundary near radius {radius:.6e} clears the zero-proximity guard"
        )));
    };

    // (a) truncate so the polynomial matches theta within eps_t on the disk
    let eps_t = (tol * 1e-2).clamp(1e-15, 1e-8);
    let n = truncation_order_abs(q_abs, radius * 1.05, eps_t)?;
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut a = Complex64::new(1.0, 0.0);
    let mut qpow = Complex64::new(1.0, 0.0);
    coeffs.push(a);
    for _j in 1..=n {
        qpow *= qv;
        a *= qpow;
        coeffs.push(a);
    }

    // (b) all roots of the truncated polynomial, seeded on the tilted ladder
    let seeds: Vec<Complex64> = (1..=n)
        .map(|k| {
            let mu = -qv.powi(-(k as i32));
            let tilt = if k % 2 == 0 { 0.08 } else { -0.08 };
            mu * Complex64::new(1.0, tilt)
        })
        .collect();
    let roots = aberth::aberth_all_roots(&coeffs, &seeds, 400, 1e-12)?;

    // (c) polish candidates near or inside the disk on the full series
    let newton_tol = tol.min(1e-9);
    let mut polished: Vec<Complex64> = Vec::new();
    for root in roots {
        if root.norm() > radius * 1.15 {
            continue;
        }
        match refine_newton(q, root, newton_tol, 80) {
            Ok(r) => polished.push(r.zero.location),
            // a spurious candidate may fail to converge; the final count
            // check is the net that catches genuinely lost zeros
            Err(Error::Convergence { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    polished.retain(|z| z.norm() < radius);

    // snap Newton noise onto the real axis for real parameters
    if q.is_real() {
        for z in polished.iter_mut() {
            if z.im.abs() <= REAL_SNAP_REL * z.norm() {
                *z = Complex64::new(z.re, 0.0);
            }
        }
    }

    // (d) deduplicate by relative cluster radius
    let clusters = cluster_points(&polished, CLUSTER_RADIUS_REL);

    let mut zeros: Vec<Zero> = clusters
        .iter()
        .map(|members| {
            let centroid = members.iter().sum::<Complex64>() / members.len() as f64;
            let centroid = if q.is_real() && centroid.im.abs() <= REAL_SNAP_REL * centroid.norm() {
                Complex64::new(centroid.re, 0.0)
            } else {
                centroid
            };
            Zero {
                location: centroid,
                multiplicity: 1, // settled by the winding count below
                residual: 0.0,
                certified: false,
                cert_radius: 0.0,
            }
        })
        .collect();
    if q.is_real() {
        pair_conjugates(&mut zeros)?;
    }

    // (e) certify each zero and the total count
    certify_set(q, &mut zeros)?;
    let total: u64 = zeros.iter().map(|z| z.multiplicity as u64).sum();
    if expected < 0 || total != expected as u64 {
        return Err(Error::Certification(format!(
            "incomplete zero set: certified multiplicities sum to {total} \
             but the boundary winding is {expected}"
        )));
    }

    sort_zeros(&mut zeros);
    let tail_start_k = (radius.ln() / (1.0 / q_abs).ln()).floor() as usize + 1;
    Ok(ZeroSet {
        q: *q,
        disk_radius: radius,
        zeros,
        tail_start_k,
    })
}

/// Greedy clustering with a relative radius.
fn cluster_points(points: &[Complex64], rel: f64) -> Vec<Vec<Complex64>> {
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for &p in points {
        let mut placed = false;
        for cl in clusters.iter_mut() {
            if cl
                .iter()
                .any(|&c| (c - p).norm() <= rel * c.norm().max(p.norm()))
            {
                cl.push(p);
                placed = true;
                break;
            }
        }
        if !placed {
            clusters.push(vec![p]);
        }
    }
    clusters
}

/// For real q the zero multiset is conjugation-invariant; rebuild the
/// nonreal zeros as exact conjugate pairs (bit-for-bit).
fn pair_conjugates(zeros: &mut Vec<Zero>) -> Result<()> {
    let mut keep: Vec<Zero> = Vec::new();
    let mut lower: Vec<Zero> = Vec::new();
    for z in zeros.drain(..) {
        if z.location.im < 0.0 {
            lower.push(z);
        } else {
            keep.push(z);
        }
    }
    let mut rebuilt: Vec<Zero> = Vec::new();
    for z in keep {
        if z.location.im > 0.0 {
            let pos = lower.iter().position(|w| {
                (w.location - z.location.conj()).norm() <= 1e-6 * z.location.norm()
            });
            match pos {
                Some(i) => {
                    lower.swap_remove(i);
                }
                None => {
                    return Err(Error::Certification(format!(
                        "zero {} has no conjugate partner; conjugation symmetry violated",
                        z.location
                    )))
                }
            }
            let mut conj = z;
            conj.location = z.location.conj();
            rebuilt.push(z);
            rebuilt.push(conj);
        } else {
            rebuilt.push(z);
        }
    }
    if !lower.is_empty() {
        return Err(Error::Certification(
            "unpaired lower-half-plane zeros; conjugation symmetry violated".into(),
        ));
    }
    *zeros = rebuilt;
    Ok(())
}

/// Certify every zero in place: winding on a circle small enough that all
/// certified circles stay pairwise disjoint, multiplicity from the count,
/// residual at the polished point.
///
/// Candidates too close together to certify separately in double
/// precision (sub-resolution pairs near a spectral parameter) are merged
/// into one cluster and certified jointly; the winding then reports the
/// cluster's total multiplicity.
fn certify_set(q: &QParam, zeros: &mut Vec<Zero>) -> Result<()> {
    let qv = q.value();
    let q_abs = q.modulus();
    let rung_gap = (1.0 / q_abs - 1.0).min(1.0);
    'pass: loop {
        let n = zeros.len();
        for i in 0..n {
            let zi = zeros[i].location;
            let mut min_dist = f64::INFINITY;
            let mut nearest = usize::MAX;
            for (j, zj) in zeros.iter().enumerate() {
                if j != i {
                    let d = (zi - zj.location).norm();
                    if d < min_dist {
                        min_dist = d;
                        nearest = j;
                    }
                }
            }
            let mut r = (0.25 * min_dist)
                .min(0.2 * zi.norm() * rung_gap)
                .min(0.2 * zi.norm());
            if !r.is_finite() || r == 0.0 {
                r = 0.2 * zi.norm() * rung_gap;
            }
            let eval = |t: f64| {
                let x = zi + Complex64::from_polar(r, t);
                let e = eval_theta_core(qv, x, 1e-13)?;
                Ok((e.value, e.error_bound))
            };
            let outcome = winding_over_circle(&eval, &WindingOptions::default());
            let mergeable =
                nearest != usize::MAX && min_dist <= 1e-4 * zi.norm().max(1.0);
            match outcome {
                Ok(count) if count >= 1 => {
                    let f = eval_theta_core(qv, zi, 1e-13)?;
                    zeros[i].multiplicity = count as u32;
                    zeros[i].residual = f.value.norm() / f.sum_abs.max(1.0);
                    zeros[i].certified = true;
                    zeros[i].cert_radius = r;
                }
                Ok(_) | Err(Error::ContourTooClose(_)) if mergeable => {
                    let zj = zeros[nearest].location;
                    let merged = (zi + zj) / 2.0;
                    let merged = if q.is_real() && merged.im.abs() <= 1e-4 * merged.norm() {
                        Complex64::new(merged.re, 0.0)
                    } else {
                        merged
                    };
                    let (a, b) = (i.min(nearest), i.max(nearest));
                    zeros.remove(b);
                    zeros[a] = Zero {
                        location: merged,
                        multiplicity: 1,
                        residual: 0.0,
                        certified: false,
                        cert_radius: 0.0,
                    };
                    // distances changed for everyone; restart the pass
                    for z in zeros.iter_mut() {
                        z.certified = false;
                    }
                    continue 'pass;
                }
                Ok(_) => {
                    return Err(Error::Certification(format!(
                        "no zero of theta inside the certification circle at {zi}"
                    )))
                }
                Err(e) => return Err(e),
            }
        }
        return Ok(());
    }
}

/// Multiplicity classification of a cluster of near-coincident zero
/// candidates: the argument-principle count on the cluster-enclosing
/// circle. Distinct certified zeros passed off as a cluster are rejected
/// (their certification circles must stay disjoint).
pub fn classify_multiplicity(
    q: &QParam,
    zero_cluster: &[Complex64],
    cluster_radius: f64,
) -> Result<Zero> {
    q.require_nonzero()?;
    if zero_cluster.is_empty() {
        return Err(Error::Domain("cluster must be nonempty".into()));
    }
    if !(cluster_radius > 0.0) {
        return Err(Error::Domain("cluster radius must be positive".into()));
    }
    let centroid = zero_cluster.iter().sum::<Complex64>() / zero_cluster.len() as f64;
    for p in zero_cluster {
        if (p - centroid).norm() > cluster_radius {
            return Err(Error::Certification(format!(
                "cluster member {p} lies outside the claimed cluster radius {cluster_radius:.3e}; \
                 distinct certified zeros require disjoint circles"
            )));
        }
    }
    let qv = q.value();
    let r = 3.0 * cluster_radius;
    let eval = |t: f64| {
        let x = centroid + Complex64::from_polar(r, t);
        let e = eval_theta_core(qv, x, 1e-13)?;
        Ok((e.value, e.error_bound))
    };
    let count = winding_over_circle(&eval, &WindingOptions::default())?;
    if count < 1 {
        return Err(Error::Certification(
            "cluster circle encloses no zero".into(),
        ));
    }
    if count == 1 {
        let refined = refine_newton(q, centroid, 1e-10, 60)?;
        let mut z = refined.zero;
        z.certified = true;
        z.cert_radius = r;
        return Ok(z);
    }
    let f = eval_theta_core(qv, centroid, 1e-13)?;
    Ok(Zero {
        location: centroid,
        multiplicity: count as u32,
        residual: f.value.norm() / f.sum_abs.max(1.0),
        certified: true,
        cert_radius: r,
    })
}

/// Inner disk plus certified tail rungs through ladder slot `min_slots`.
///
/// The inner disk reaches the tail threshold k0(q); every rung beyond it
/// is certified individually in its Omega_k disk, so the assembly never
/// evaluates the raw series at magnitudes outside the double range.
pub fn assemble_zero_ladder(q: &QParam, min_slots: usize, tol: f64) -> Result<ZeroSet> {
    let policy = TailPolicy::for_param(q)?;
    let q_abs = q.modulus();
    let radius = q_abs.powf(-(policy.k0 as f64 - 0.5));
    let mut set = find_zeros_in_disk(q, radius, tol)?;
    for k in policy.k0..=min_slots {
        let z = certify_tail_zero(q, k, policy.delta_rel)?;
        set.zeros.push(z);
    }
    sort_zeros(&mut set.zeros);
    Ok(set)
}
