//! The spectrum of theta: parameters q~_j in (0,1) at which theta(q, .)
//! acquires a double real zero (the rightmost of its real zeros).
//!
//! Location is two-phase. Away from the spectrum the number of complex
//! conjugate zero pairs is a robust integer, so a spectral value is first
//! bracketed by bisection on the pair count; the count is discrete and
//! ill-defined exactly at the spectrum, where a 2-D Newton iteration on
//! (theta, theta') = 0 takes over and converges superlinearly. Each
//! method is used only where it is well-posed.

mod cache;

pub use cache::SPECTRAL_CACHE_SCHEMA_VERSION;

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::{
    eval_theta_core, eval_theta_dq_core, eval_theta_dqx_core, eval_theta_dx_core,
    eval_theta_dxx_core,
};
use crate::qparam::QParam;
use crate::zeros::{find_zeros_in_disk, TailPolicy, ZeroSet};
use num_complex::Complex64;

/// A located spectral value.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectralValue {
    /// Index j: the pair count jumps from j-1 to j across q~_j.
    pub index: u32,
    pub q_value: f64,
    /// Location of the double zero, the rightmost real zero at q~_j.
    pub double_zero_x: f64,
    /// (|theta|, |theta'|) at (q_value, double_zero_x).
    pub residuals: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Computed,
    Cached,
}

/// Table of the first spectral values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub entries: Vec<SpectralValue>,
    pub tolerance: f64,
    pub provenance: Provenance,
}

/// Policy for the disk used when counting conjugate pairs.
#[derive(Debug, Clone, Copy)]
pub struct CountPolicy {
    /// Extra ladder rungs beyond the tail threshold k0(q).
    pub extra_rungs: usize,
    /// Tolerance handed to the zero finder.
    pub tol: f64,
    /// Verify by a second winding that the three rungs beyond the disk
    /// are singly occupied (catches zeros hiding between tail disks).
    pub ring_check: bool,
}

impl Default for CountPolicy {
    fn default() -> Self {
        CountPolicy {
            extra_rungs: 0,
            tol: 1e-10,
            ring_check: true,
        }
    }
}

/// Pairs whose members are closer to the real axis than this (relative)
/// cannot be told apart from a bifurcating double zero.
pub const COLLISION_TOL_REL: f64 = 1e-6;

fn classify_pairs(set: &ZeroSet) -> Result<usize> {
    let mut pairs = 0usize;
    for z in &set.zeros {
        let im = z.location.im;
        if im == 0.0 {
            if z.multiplicity > 1 {
                return Err(Error::NearSpectral {
                    q: set.q.value().re,
                    pair_re: z.location.re,
                    pair_im: 0.0,
                });
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
            pairs += 1;
        }
    }
    Ok(pairs)
}

fn count_with_set(q: &QParam, policy: &CountPolicy) -> Result<(usize, ZeroSet)> {
    let qr = q.require_positive_real()?;
    q.require_nonzero()?;
    let tail = TailPolicy::for_param(q)?;
    let k0 = tail.k0 + policy.extra_rungs;
    let radius = qr.powf(-(k0 as f64 - 0.5));
    let set = find_zeros_in_disk(q, radius, policy.tol)?;
    if policy.ring_check {
        let outer = qr.powf(-(k0 as f64 + 2.5));
        let w_outer =
            crate::zeros::count_zeros_argument_principle(q, Complex64::new(0.0, 0.0), outer)?;
        let expected = set.total_multiplicity() as i64 + 3;
        if w_outer != expected {
            return Err(Error::Certification(format!(
                "ring check failed at q = {qr}: winding {w_outer} over the extended disk, \
                 expected {expected}; a zero is hiding between tail disks"
            )));
        }
    }
    let pairs = classify_pairs(&set)?;
    Ok((pairs, set))
}

/// Number of complex-conjugate zero pairs of theta(q, .) for q in (0,1).
///
/// Errors with a near-spectral ambiguity when a pair hugs the real axis
/// closer than the collision tolerance.
pub fn complex_pair_count(q: &QParam, policy: &CountPolicy) -> Result<usize> {
    count_with_set(q, policy).map(|(n, _)| n)
}

/// Residuals and Jacobian of F(q, x) = (theta, theta') at a real point.
fn newton_2d(qq: f64, xx: f64) -> Result<([f64; 2], [f64; 4])> {
    let qc = Complex64::new(qq, 0.0);
    let xc = Complex64::new(xx, 0.0);
    let eps = 1e-15;
    let f = eval_theta_core(qc, xc, eps)?.value.re;
    let fx = eval_theta_dx_core(qc, xc, eps)?.value.re;
    let fq = eval_theta_dq_core(qc, xc, eps)?.value.re;
    let fxx = eval_theta_dxx_core(qc, xc, eps)?.value.re;
    let fqx = eval_theta_dqx_core(qc, xc, eps)?.value.re;
    Ok(([f, fx], [fq, fx, fqx, fxx]))
}

/// Refine a double-real-zero candidate by 2-D Newton on
/// F(q, x) = (theta(q,x), theta'(q,x)), with the Jacobian assembled from
/// the term-wise derivative series. Verifies that the converged zero is
/// the rightmost real zero and determines the index from the pair counts
/// on both sides of the converged parameter.
pub fn refine_double_zero(q_init: f64, x_init: f64, tol: f64) -> Result<SpectralValue> {
    if !(q_init > 0.0 && q_init < 1.0) {
        return Err(Error::Domain("q_init must lie in (0, 1)".into()));
    }
    if !(x_init < 0.0) {
        return Err(Error::Domain(
            "x_init must be negative (double zeros are negative real)".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("tol must be positive".into()));
    }
    let (mut qq, mut xx) = (q_init, x_init);
    let mut converged = false;
    for _ in 0..80 {
        let ([f, g], [a, b, c, d]) = newton_2d(qq, xx)?;
        let det = a * d - b * c;
        let scale = a.abs() * d.abs() + b.abs() * c.abs();
        if det.abs() <= 1e-14 * scale.max(1e-300) {
            return Err(Error::Certification(format!(
                "singular Jacobian in the double-zero Newton at q = {qq}, x = {xx}"
            )));
        }
        let dq = (f * d - b * g) / det;
        let dx = (a * g - c * f) / det;
        qq -= dq;
        xx -= dx;
        if !(qq > 1e-4 && qq < 0.9999) || !(xx < 0.0) || !qq.is_finite() || !xx.is_finite() {
            return Err(Error::Convergence {
                last: Complex64::new(qq, xx),
                iterations: 80,
                residual: f.abs().max(g.abs()),
            });
        }
        if dq.abs() <= 1e-14 * qq && dx.abs() <= 1e-14 * xx.abs() {
            converged = true;
            break;
        }
    }
    let ([f, g], _) = newton_2d(qq, xx)?;
    let residuals = (f.abs(), g.abs());
    if !converged || residuals.0 > tol || residuals.1 > tol {
        return Err(Error::Convergence {
            last: Complex64::new(qq, xx),
            iterations: 80,
            residual: residuals.0.max(residuals.1),
        });
    }

    // Rightmost check by a local scan: theta(q, 0) = 1 and theta must
    // stay positive on (x*(1 - exclusion), 0), else a real zero sits to
    // the right of the double zero. (A full zero-set certification is not
    // possible here: at the spectral parameter the bifurcating pair is
    // below the resolvable separation.)
    let qc = Complex64::new(qq, 0.0);
    let scan_from = xx * (1.0 - 0.01);
    for i in 0..512 {
        let frac = (i as f64 + 0.5) / 512.0;
        let x = scan_from * (1.0 - frac);
        let v = eval_theta_core(qc, Complex64::new(x, 0.0), 1e-13)?.value.re;
        if v <= 0.0 {
            return Err(Error::Certification(format!(
                "double zero at x = {xx} is not the rightmost real zero: \
                 theta({x}) = {v:.3e} changes sign to its right"
            )));
        }
    }

    // index from the jump in the pair count across q~
    let h = 1e-9_f64.max(10.0 * tol.min(1e-9));
    let policy = CountPolicy::default();
    let above = complex_pair_count(&QParam::real(qq + h)?, &policy)?;
    let below = complex_pair_count(&QParam::real(qq - h)?, &policy)?;
    if above != below + 1 {
        return Err(Error::Certification(format!(
            "pair count does not jump by one across q = {qq}: {below} below, {above} above"
        )));
    }

    Ok(SpectralValue {
        index: above as u32,
        q_value: qq,
        double_zero_x: xx,
        residuals,
    })
}

/// Locate q~_j inside a bracket by bisection on the pair count, then hand
/// off to the 2-D Newton refinement.
pub fn locate_spectral_value(j: u32, bracket: (f64, f64), tol_q: f64) -> Result<SpectralValue> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi < 1.0 && lo < hi) {
        return Err(Error::Domain(format!("invalid bracket ({lo}, {hi})")));
    }
    if j == 0 {
        return Err(Error::Domain("index j must be >= 1".into()));
    }
    if !(tol_q > 0.0) {
        return Err(Error::Domain("tol_q must be positive".into()));
    }
    let policy = CountPolicy::default();
    let c_lo = complex_pair_count(&QParam::real(lo)?, &policy)?;
    let c_hi = complex_pair_count(&QParam::real(hi)?, &policy)?;
    if c_lo > (j - 1) as usize || c_hi < j as usize {
        return Err(Error::Domain(format!(
            "invalid bracket: pair counts are {c_lo} at {lo} and {c_hi} at {hi}, \
             need <= {} and >= {j}",
            j - 1
        )));
    }

    let coarse = (50.0 * tol_q).max(2e-5);
    let mut seed: Option<(f64, f64)> = None; // (q, x) from an ambiguity hit
    while hi - lo > coarse {
        let mid = 0.5 * (lo + hi);
        match complex_pair_count(&QParam::real(mid)?, &policy) {
            Ok(c) => {
                if c < c_lo {
                    return Err(Error::Certification(format!(
                        "pair count non-monotonic in bracket: {c} at {mid} below {c_lo} at {lo}"
                    )));
                }
                if c >= j as usize {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Err(Error::NearSpectral { q, pair_re, .. }) => {
                seed = Some((q, pair_re));
                break;
            }
            Err(e) => return Err(e),
        }
    }

    let (q_init, x_init) = match seed {
        Some(s) => s,
        None => {
            // seed from the youngest pair (smallest relative |Im|) above
            let (_, set) = count_with_set(&QParam::real(hi)?, &policy)?;
            let youngest = set
                .complex_pairs()
                .into_iter()
                .min_by(|a, b| (a.im / a.norm()).partial_cmp(&(b.im / b.norm())).unwrap())
                .ok_or_else(|| {
                    Error::Certification("no complex pair on the high side of the bracket".into())
                })?;
            (0.5 * (lo + hi), youngest.re)
        }
    };

    let sv = refine_double_zero(q_init, x_init, 1e-10)?;
    if sv.index != j {
        return Err(Error::Certification(format!(
            "bracket for j = {j} converged to the spectral value of index {}",
            sv.index
        )));
    }
    Ok(sv)
}

/// Options for building a spectrum table.
#[derive(Debug, Clone, Copy)]
pub struct TableOptions {
    pub tol: f64,
    /// Parameters above this are outside the double-precision budget
    /// (truncation orders explode as q -> 1).
    pub q_max: f64,
    pub scan_step: f64,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            tol: 1e-10,
            q_max: 0.87,
            scan_step: 0.02,
        }
    }
}

/// A spectrum-table failure that still carries the part of the table
/// computed before the budget ran out.
#[derive(Debug, thiserror::Error)]
#[error("spectrum table truncated after {} entries: {cause}", partial.entries.len())]
pub struct SpectrumTableError {
    pub partial: SpectrumTable,
    #[source]
    pub cause: Box<Error>,
}

/// Compute or load the table q~_1 .. q~_{j_max}.
///
/// Cached entries are re-validated by re-evaluating both residuals before
/// they are trusted; a corrupt or stale cache is recomputed, never half
/// used. When j_max is beyond the double-precision budget the entries
/// found so far are returned inside the error value.
pub fn spectrum_table(
    j_max: u32,
    cache_path: Option<&Path>,
) -> Result<SpectrumTable, SpectrumTableError> {
    spectrum_table_with(j_max, cache_path, &TableOptions::default())
}

pub fn spectrum_table_with(
    j_max: u32,
    cache_path: Option<&Path>,
    opts: &TableOptions,
) -> Result<SpectrumTable, SpectrumTableError> {
    let mut entries: Vec<SpectralValue> = Vec::new();
    let mut from_cache = 0usize;
    if let Some(path) = cache_path {
        if let Some(cached) = cache::load_validated(path, opts.tol) {
            entries = cached;
            entries.truncate(j_max as usize);
            from_cache = entries.len();
        }
    }

    let fail = |entries: Vec<SpectralValue>, cause: Error| SpectrumTableError {
        partial: SpectrumTable {
            entries,
            tolerance: opts.tol,
            provenance: Provenance::Computed,
        },
        cause: Box::new(cause),
    };

    while (entries.len() as u32) < j_max {
        let j = entries.len() as u32 + 1;
        let mut lo = entries.last().map(|e| e.q_value + 1e-4).unwrap_or(0.05);
        let mut scan = lo;
        let bracket;
        loop {
            scan += opts.scan_step;
            if scan > opts.q_max {
                return Err(fail(
                    entries,
                    Error::PrecisionBudget(format!(
                        "q~_{j} lies above the configured budget limit q = {}; \
                         truncation orders explode as q -> 1",
                        opts.q_max
                    )),
                ));
            }
            let qp = match QParam::real(scan) {
                Ok(qp) => qp,
                Err(e) => return Err(fail(entries, e)),
            };
            match complex_pair_count(&qp, &CountPolicy::default()) {
                Ok(c) if c >= j as usize => {
                    bracket = (lo, scan);
                    break;
                }
                Ok(_) => lo = scan,
                Err(Error::NearSpectral { .. }) => {
                    bracket = (lo, (scan + opts.scan_step).min(0.999));
                    break;
                }
                Err(e) => return Err(fail(entries, e)),
            }
        }
        match locate_spectral_value(j, bracket, opts.tol.min(1e-9)) {
            Ok(sv) => entries.push(sv),
            Err(e) => return Err(fail(entries, e)),
        }
    }

    let provenance = if from_cache == entries.len() && !entries.is_empty() {
        Provenance::Cached
    } else {
        Provenance::Computed
    };
    let table = SpectrumTable {
        entries,
        tolerance: opts.tol,
        provenance,
    };
    if let Some(path) = cache_path {
        if table.provenance == Provenance::Computed {
            if let Err(e) = cache::store_atomic(path, &table) {
                return Err(SpectrumTableError {
                    partial: table,
                    cause: Box::new(e),
                });
            }
        }
    }
    Ok(table)
}
