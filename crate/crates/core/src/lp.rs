//! Dense primal simplex for `max cᵀx` subject to `Ax ≤ b`, `x ≥ 0`, `b ≥ 0`.
//!
//! With `b ≥ 0` the slack basis is feasible, so no phase one is needed.
//! Bland's rule rules out cycling; problems here have at most a few hundred
//! rows.

use crate::error::{invalid, CesError, Result};

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

const PIVOT_EPS: f64 = 1e-12;

pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let n = c.len();
    let m = b.len();
    if a.len() != m || a.iter().any(|row| row.len() != n) {
        return invalid("constraint matrix has the wrong shape");
    }
    if b.iter().any(|&v| !(v >= 0.0)) {
        return invalid("right-hand sides must be nonnegative");
    }
    let width = n + m + 1;
    // rows 0..m constraints, row m objective (reduced costs, negated)
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        t[i][..n].copy_from_slice(&a[i]);
        t[i][n + i] = 1.0;
        t[i][width - 1] = b[i];
    }
    for j in 0..n {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let scale = c.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    let max_iter = 50 * (n + m) + 1000;
    for iter in 0..max_iter {
        // entering: lowest index with negative reduced cost
        let entering = (0..n + m).find(|&j| t[m][j] < -PIVOT_EPS * scale);
        let Some(e) = entering else {
            let mut x = vec![0.0; n];
            for (i, &bi) in basis.iter().enumerate() {
                if bi < n {
                    x[bi] = t[i][width - 1];
                }
            }
            let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
            return Ok(LpSolution {
                value,
                x,
                iterations: iter,
            });
        };
        // ratio test, ties broken by lowest basis index
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let aie = t[i][e];
            if aie > PIVOT_EPS {
                let ratio = t[i][width - 1] / aie;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-15 || (ratio <= lr + 1e-15 && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((r, _)) = leave else {
            return Err(CesError::NotConverged {
                message: "linear program is unbounded".into(),
                lower: f64::INFINITY,
                upper: f64::INFINITY,
            });
        };
        let piv = t[r][e];
        for v in t[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r {
                let factor = row[e];
                if factor != 0.0 {
                    for (v, p) in row.iter_mut().zip(&pivot_row) {
                        *v -= factor * p;
                    }
                }
            }
        }
        basis[r] = e;
    }
    Err(CesError::NotConverged {
        message: "simplex iteration cap reached".into(),
        lower: 0.0,
        upper: f64::INFINITY,
    })
}

/// `max Σ gains_i·m_i` over `m ≥ 0` with `Σ_{j≤i} m_j ≤ caps_i` for every `i`.
pub fn cumulative_cap_lp(gains: &[f64], caps: &[f64]) -> Result<LpSolution> {
    let n = gains.len();
    if caps.len() != n {
        return invalid("one cap per variable is required");
    }
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if j <= i { 1.0 } else { 0.0 }).collect())
        .collect();
    maximize(gains, &a, caps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let sol = maximize(
            &[3.0, 5.0],
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[4.0, 12.0, 18.0],
        )
        .unwrap();
        assert!((sol.value - 36.0).abs() < 1e-12);
        assert!((sol.x[0] - 2.0).abs() < 1e-12 && (sol.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_is_reported() {
        let err = maximize(&[1.0], &[vec![-1.0]], &[1.0]).unwrap_err();
        assert!(matches!(err, CesError::NotConverged { .. }));
    }

    #[test]
    fn cumulative_caps_push_mass_right() {
        // gains increase to the right, so all mass goes last
        let sol = cumulative_cap_lp(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((sol.value - 9.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_problem_terminates() {
        let gains = vec![1.0; 30];
        let caps = vec![0.0; 30];
        let sol = cumulative_cap_lp(&gains, &caps).unwrap();
        assert_eq!(sol.value, 0.0);
    }
}
