//! Weighted pool-adjacent-violators.

/// Weighted least-squares projection of `y` onto nondecreasing sequences.
///
/// Weights must be positive. Blocks are merged left to right with a stack,
/// so the cost is linear in `y.len()`.
pub fn isotonic_increasing(y: &[f64], w: &[f64]) -> Vec<f64> {
    assert_eq!(y.len(), w.len(), "values and weights differ in length");
    // (weighted mean, total weight, count)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(y.len());
    for (&yi, &wi) in y.iter().zip(w) {
        let mut cur = (yi, wi, 1usize);
        while let Some(&(m, wt, n)) = blocks.last() {
            if m <= cur.0 {
                break;
            }
            blocks.pop();
            let total = wt + cur.1;
            cur = ((m * wt + cur.0 * cur.1) / total, total, n + cur.2);
        }
        blocks.push(cur);
    }
    let mut out = Vec::with_capacity(y.len());
    for (m, _, n) in blocks {
        out.extend(std::iter::repeat(m).take(n));
    }
    out
}

/// Weighted projection onto nonincreasing sequences.
pub fn isotonic_decreasing(y: &[f64], w: &[f64]) -> Vec<f64> {
    let neg: Vec<f64> = y.iter().map(|v| -v).collect();
    isotonic_increasing(&neg, w).into_iter().map(|v| -v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pools_a_single_violation() {
        let out = isotonic_increasing(&[1.0, 3.0, 2.0], &[1.0, 1.0, 1.0]);
        assert_eq!(out, vec![1.0, 2.5, 2.5]);
    }

    #[test]
    fn weights_shift_the_pooled_mean() {
        let out = isotonic_increasing(&[3.0, 1.0], &[3.0, 1.0]);
        assert_eq!(out, vec![2.5, 2.5]);
    }

    #[test]
    fn decreasing_is_mirror() {
        let out = isotonic_decreasing(&[1.0, 3.0, 2.0], &[1.0, 1.0, 1.0]);
        assert_eq!(out, vec![2.0, 2.0, 2.0]);
    }

    fn weighted_sse(y: &[f64], w: &[f64], z: &[f64]) -> f64 {
        y.iter().zip(w).zip(z).map(|((a, b), c)| b * (a - c).powi(2)).sum()
    }

    proptest! {
        #[test]
        fn output_is_monotone_and_mean_preserving(
            data in prop::collection::vec((-10.0f64..10.0, 0.1f64..5.0), 1..40)
        ) {
            let (y, w): (Vec<f64>, Vec<f64>) = data.into_iter().unzip();
            let z = isotonic_increasing(&y, &w);
            for pair in z.windows(2) {
                prop_assert!(pair[0] <= pair[1] + 1e-12);
            }
            let s1: f64 = y.iter().zip(&w).map(|(a, b)| a * b).sum();
            let s2: f64 = z.iter().zip(&w).map(|(a, b)| a * b).sum();
            prop_assert!((s1 - s2).abs() < 1e-9 * (1.0 + s1.abs()));
        }

        #[test]
        fn no_monotone_perturbation_does_better(
            data in prop::collection::vec((-10.0f64..10.0, 0.1f64..5.0), 2..20),
            k in 0usize..20,
            eps in -0.5f64..0.5,
        ) {
            let (y, w): (Vec<f64>, Vec<f64>) = data.into_iter().unzip();
            let z = isotonic_increasing(&y, &w);
            let base = weighted_sse(&y, &w, &z);
            // shifting a suffix keeps monotonicity
            let k = k % z.len();
            let mut alt = z.clone();
            for v in alt.iter_mut().skip(k) {
                *v += eps;
            }
            if alt.windows(2).all(|p| p[0] <= p[1]) {
                prop_assert!(weighted_sse(&y, &w, &alt) >= base - 1e-9);
            }
        }
    }
}
