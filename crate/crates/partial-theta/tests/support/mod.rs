//! Test-only support: double-double arithmetic, an extended-precision
//! theta oracle, and an independent Durand-Kerner root finder. Everything
//! here stays deliberately independent of the library's own evaluation
//! and root-finding paths so the two can check each other.

#![allow(dead_code)]

use num_complex::Complex64;

// ---------------------------------------------------------------- dd ---

/// Unevaluated double-double: value = hi + lo, |lo| <= ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2b) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2b + t2);
        Dd { hi, lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from_f64(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from_f64(q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd::new(hi, lo + q3)
    }

    pub fn abs(self) -> f64 {
        self.to_f64().abs()
    }
}

// ------------------------------------------------------------- cdd -----

/// Complex double-double.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: Cdd = Cdd {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    pub fn from_c64(z: Complex64) -> Cdd {
        Cdd {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    pub fn sub(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.sub(o.re),
            im: self.im.sub(o.im),
        }
    }

    pub fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn div(self, o: Cdd) -> Cdd {
        let denom = o.re.mul(o.re).add(o.im.mul(o.im));
        let num = self.mul(Cdd {
            re: o.re,
            im: o.im.neg(),
        });
        Cdd {
            re: num.re.div(denom),
            im: num.im.div(denom),
        }
    }

    pub fn norm(self) -> f64 {
        self.to_c64().norm()
    }
}

// ------------------------------------------------- theta dd oracle -----

/// Ascending coefficients q^{j(j+1)/2} of the degree-`degree` truncation,
/// in complex double-double. Degrees whose coefficient magnitude falls
/// below the double range are cut off (the difference is < 1e-300 on any
/// disk of interest).
pub fn theta_coeffs_dd(q: Complex64, degree: usize) -> Vec<Cdd> {
    let qd = Cdd::from_c64(q);
    let mut coeffs = vec![Cdd::ONE];
    let mut qpow = Cdd::ONE;
    let mut a = Cdd::ONE;
    for _j in 1..=degree {
        qpow = qpow.mul(qd);
        a = a.mul(qpow);
        if a.norm() < 1e-290 {
            break;
        }
        coeffs.push(a);
    }
    coeffs
}

/// theta(q, x) by direct summation of `terms` terms in double-double.
pub fn theta_dd(q: Complex64, x: Complex64, terms: usize) -> Cdd {
    let qd = Cdd::from_c64(q);
    let xd = Cdd::from_c64(x);
    let mut sum = Cdd::ONE;
    let mut term = Cdd::ONE;
    let mut qpow = Cdd::ONE;
    for _j in 1..terms {
        qpow = qpow.mul(qd);
        term = term.mul(qpow).mul(xd);
        sum = sum.add(term);
        if term.norm() < 1e-320 {
            break;
        }
    }
    sum
}

pub fn horner_dd(coeffs: &[Cdd], z: Cdd) -> (Cdd, Cdd) {
    let mut p = Cdd::ZERO;
    let mut dp = Cdd::ZERO;
    for c in coeffs.iter().rev() {
        dp = dp.mul(z).add(p);
        p = p.mul(z).add(*c);
    }
    (p, dp)
}

// ------------------------------------------- durand-kerner oracle ------

/// Roots of the degree-`oracle_degree` truncated theta polynomial inside
/// (and a little beyond) the disk |z| <= radius, by Weierstrass /
/// Durand-Kerner simultaneous iteration followed by double-double Newton
/// polishing on the full oracle coefficients. Entirely independent of the
/// library's Aberth + compensated-series pipeline.
///
/// DK runs on the lowest-degree truncation whose tail is below 1e-20 on
/// 1.3 x the disk: its roots there coincide with the oracle polynomial's
/// far beyond seeding accuracy, while its ladder stays inside the f64
/// range (the full oracle ladder reaches |q|^{-80}, whose simultaneous
/// products overflow). The polish then runs on the oracle polynomial
/// itself, which is perfectly conditioned at in-disk magnitudes.
pub fn dk_roots_dd(q: Complex64, radius: f64, oracle_degree: usize) -> Vec<Complex64> {
    let q_abs = q.norm();
    // seed polynomial: tail below 1e-20 on 1.3 * radius
    let r_seed = 1.3 * radius;
    let mut seed_deg = 4usize;
    loop {
        let t = ((seed_deg + 1) * (seed_deg + 2) / 2) as f64;
        let tail = t * q_abs.ln() + (seed_deg as f64 + 1.0) * r_seed.ln();
        if tail.exp() <= 1e-20 || seed_deg > 400 {
            break;
        }
        seed_deg += 1;
    }
    let seed_coeffs: Vec<Complex64> = theta_coeffs_dd(q, seed_deg)
        .iter()
        .map(|c| c.to_c64())
        .collect();
    let deg = seed_coeffs.len() - 1;
    let lead = seed_coeffs[deg];
    let monic: Vec<Complex64> = seed_coeffs.iter().map(|c| c / lead).collect();

    let mut z: Vec<Complex64> = (1..=deg)
        .map(|k| {
            let mu = -q.powi(-(k as i32));
            let tilt = if k % 2 == 0 { 0.05 } else { -0.05 };
            mu * Complex64::new(1.0, tilt)
        })
        .collect();
    for _sweep in 0..600 {
        let mut biggest = 0.0f64;
        for i in 0..deg {
            let mut p = Complex64::new(0.0, 0.0);
            for c in monic.iter().rev() {
                p = p * z[i] + c;
            }
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            if denom == Complex64::new(0.0, 0.0) || !p.is_finite() || !denom.is_finite() {
                continue;
            }
            let step = p / denom;
            z[i] -= step;
            let rel = step.norm() / (z[i].norm() + 1e-30);
            if rel > biggest {
                biggest = rel;
            }
        }
        if biggest < 1e-10 {
            break;
        }
    }

    // polish the in-range candidates on the full oracle polynomial
    let oracle_coeffs = theta_coeffs_dd(q, oracle_degree);
    let mut out = Vec::new();
    for zi in z {
        if !zi.is_finite() || zi.norm() > 1.15 * radius {
            continue;
        }
        let mut w = Cdd::from_c64(zi);
        for _ in 0..12 {
            let (p, dp) = horner_dd(&oracle_coeffs, w);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p.div(dp);
            w = w.sub(step);
            if step.norm() <= 1e-25 * w.norm() {
                break;
            }
        }
        out.push(w.to_c64());
    }
    out
}

// ------------------------------------------------------------ tests ----

#[cfg(test)]
mod selftest {
    use super::*;

    #[test]
    fn dd_resolves_below_f64() {
        // 2^-80 survives a dd round trip through addition
        let tiny = 2f64.powi(-80);
        let v = Dd::ONE.add(Dd::from_f64(tiny));
        assert_eq!(v.hi, 1.0);
        assert_eq!(v.lo, tiny);
        let back = v.sub(Dd::ONE);
        assert_eq!(back.to_f64(), tiny);
    }

    #[test]
    fn dd_theta_matches_mpmath_anchors() {
        // frozen at 50 digits against the binary-exact f64 parameters
        let v = theta_dd(Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0), 60);
        let anchor = Dd::new(1.6416325606551538, 2.7769131451911354e-17);
        assert!(v.sub(Cdd { re: anchor, im: Dd::ZERO }).norm() < 1e-29);

        let v = theta_dd(Complex64::new(0.3, 0.0), Complex64::new(-5.0, 0.0), 120);
        let anchor = Dd::new(0.08752088542997748, 3.343332917883702e-18);
        assert!(v.sub(Cdd { re: anchor, im: Dd::ZERO }).norm() < 1e-29);
    }

    #[test]
    fn dk_finds_ladder_roots() {
        // q = 0.2: the oracle roots inside q^{-3.5} must sit on the ladder
        let radius = 0.2f64.powf(-3.5);
        let mut roots = dk_roots_dd(Complex64::new(0.2, 0.0), radius, 80);
        roots.retain(|z| z.norm() < radius);
        roots.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
        assert_eq!(roots.len(), 3);
        assert!((roots[0].re + 6.74).abs() < 0.1, "first root {}", roots[0]);
        assert!(roots.iter().all(|z| z.im.abs() < 1e-10));
        // second anchor: the first root agrees with the library's Newton
        let q = partial_theta::QParam::real(0.2).unwrap();
        let lib = partial_theta::refine_newton(&q, roots[0], 1e-12, 50).unwrap();
        assert!((lib.zero.location - roots[0]).norm() < 1e-9 * roots[0].norm());
    }
}
