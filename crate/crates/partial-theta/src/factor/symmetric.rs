//! Elementary symmetric functions by the ascending recurrence.
//!
//! e_k over positive inputs r_1..r_n via
//! e_k <- e_k + r * e_{k-1} (k descending per input): every operand is
//! positive, so there is no cancellation; large-degree polynomial
//! expansion is never formed.

pub(crate) fn elementary_symmetric(values: &[f64], k_max: usize) -> Vec<f64> {
    let mut es = vec![0.0f64; k_max + 1];
    es[0] = 1.0;
    for &r in values {
        for k in (1..=k_max.min(values.len())).rev() {
            es[k] += r * es[k - 1];
        }
    }
    es
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_hand_expansion() {
        // r = 1/2, 1/3, 1/4: e1 = 13/12, e2 = 3/8, e3 = 1/24
        let es = elementary_symmetric(&[0.5, 1.0 / 3.0, 0.25], 3);
        assert!((es[1] - 13.0 / 12.0).abs() < 1e-15);
        assert!((es[2] - 3.0 / 8.0).abs() < 1e-15);
        assert!((es[3] - 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn k_beyond_input_count_is_zero() {
        let es = elementary_symmetric(&[0.5, 0.25], 4);
        assert_eq!(es[3], 0.0);
        assert_eq!(es[4], 0.0);
    }
}
