//! Aberth-Ehrlich simultaneous iteration for all roots of a polynomial.
//!
//! Simultaneous iteration is used instead of deflation because the zeros
//! of the truncated theta series form a geometric ladder; deflating such
//! ladders one root at a time is numerically unstable, while the mutual
//! repulsion term handles them well.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Evaluate p and p' at z by Horner's scheme. Coefficients ascending.
pub(crate) fn horner_both(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Find all roots of the polynomial with the given ascending coefficients,
/// starting the simultaneous iteration from `seeds` (must supply exactly
/// degree-many distinct points).
pub(crate) fn aberth_all_roots(
    coeffs: &[Complex64],
    seeds: &[Complex64],
    max_iter: usize,
    rel_tol: f64,
) -> Result<Vec<Complex64>> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    if seeds.len() != degree {
        return Err(Error::Domain(format!(
            "aberth needs {degree} seeds, got {}",
            seeds.len()
        )));
    }
    if coeffs[degree] == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("leading coefficient is zero".into()));
    }

    let mut z: Vec<Complex64> = seeds.to_vec();
    let mut frozen = vec![false; degree];
    for sweep in 0..max_iter {
        let mut moved = false;
        for i in 0..degree {
            if frozen[i] {
                continue;
            }
            let (p, dp) = horner_both(coeffs, z[i]);
            if !p.re.is_finite() || !p.im.is_finite() {
                // walk the point inward deterministically and retry next sweep
                z[i] *= 0.5;
                moved = true;
                continue;
            }
            if p == Complex64::new(0.0, 0.0) {
                frozen[i] = true;
                continue;
            }
            let w = if dp == Complex64::new(0.0, 0.0) {
                // flat spot: nudge by a seed-scaled offset
                z[i] * 1e-6 + Complex64::new(1e-9, 1e-9)
            } else {
                p / dp
            };
            let mut repulsion = Complex64::new(0.0, 0.0);
            for j in 0..degree {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff != Complex64::new(0.0, 0.0) {
                        repulsion += Complex64::new(1.0, 0.0) / diff;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * repulsion;
            let step = if denom.norm() < 1e-300 { w } else { w / denom };
            z[i] -= step;
            if !z[i].re.is_finite() || !z[i].im.is_finite() {
                // deterministic restart on a modest circle
                let ang = 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / degree as f64;
                z[i] = Complex64::from_polar(1.0 + i as f64, ang);
                moved = true;
                continue;
            }
            if step.norm() <= rel_tol * (z[i].norm() + 1e-30) {
                frozen[i] = true;
            } else {
                moved = true;
            }
        }
        if !moved {
            return Ok(z);
        }
        let _ = sweep;
    }
    // Roots that did not individually freeze are still returned; the
    // caller polishes every candidate on the full series and certifies
    // counts by the argument principle, so a slow outer root cannot
    // corrupt the result silently.
    Ok(z)
}
