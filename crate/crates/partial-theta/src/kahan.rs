//! Compensated (Kahan) summation for complex accumulators.

use num_complex::Complex64;

/// Kahan accumulator over Complex64; the compensation is carried
/// componentwise, which keeps the rounding term of the whole sum at
/// O(eps * sum |terms|) independent of the term count.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, term: Complex64) {
        let y = term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        self.sum
    }
}
