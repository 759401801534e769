//! Finitely supported sequences and power-law tails.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `(x_1, …, x_n, 0, 0, …)`. Trailing zeros are dropped on construction, so
/// equality is structural.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Sequence {
    entries: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Sequence {
    type Error = crate::error::CesError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Sequence::new(v)
    }
}

impl From<Sequence> for Vec<f64> {
    fn from(s: Sequence) -> Vec<f64> {
        s.entries
    }
}

impl Sequence {
    pub fn new(mut entries: Vec<f64>) -> Result<Sequence> {
        if entries.iter().any(|v| !v.is_finite()) {
            return invalid("sequence entries must be finite");
        }
        while entries.last() == Some(&0.0) {
            entries.pop();
        }
        Ok(Sequence { entries })
    }

    pub fn zero() -> Sequence {
        Sequence { entries: vec![] }
    }

    /// The unit vector `e_k` (1-based).
    pub fn unit(k: usize) -> Sequence {
        assert!(k >= 1, "sequence indices start at 1");
        let mut entries = vec![0.0; k];
        entries[k - 1] = 1.0;
        Sequence { entries }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 1-based access; zero past the support.
    pub fn get(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.entries.get(n - 1).copied().unwrap_or(0.0)
    }

    pub fn abs(&self) -> Sequence {
        Sequence {
            entries: self.entries.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Sequence {
        Sequence::new(self.entries.iter().map(|v| c * v).collect()).expect("finite scale")
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|&v| v >= 0.0)
    }

    pub fn padded(&self, len: usize) -> Vec<f64> {
        let mut v = self.entries.clone();
        if v.len() < len {
            v.resize(len, 0.0);
        }
        v
    }
}

/// `(head_1, …, head_N, coef·(N+1)^exponent, coef·(N+2)^exponent, …)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailedSeq {
    pub head: Vec<f64>,
    pub coef: f64,
    pub exponent: f64,
}

impl TailedSeq {
    pub fn finite(head: Vec<f64>) -> TailedSeq {
        TailedSeq {
            head,
            coef: 0.0,
            exponent: 0.0,
        }
    }

    pub fn get(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else if n <= self.head.len() {
            self.head[n - 1]
        } else {
            self.coef * (n as f64).powf(self.exponent)
        }
    }
}

/// Σ_{n ≥ start} n^(−s) for s > 1 together with a bound on the truncation error.
///
/// Sums explicitly up to a cutoff and finishes with Euler–Maclaurin
/// (three correction terms).
pub fn power_tail_sum(start: usize, s: f64) -> (f64, f64) {
    assert!(s > 1.0 && start >= 1);
    let cutoff = start.max(100);
    let mut head = 0.0;
    for n in start..cutoff {
        head += (n as f64).powf(-s);
    }
    let m = cutoff as f64;
    let f = m.powf(-s);
    let f1 = -s * m.powf(-s - 1.0);
    let f3 = -s * (s + 1.0) * (s + 2.0) * m.powf(-s - 3.0);
    let f5 = -s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * m.powf(-s - 5.0);
    let f7 = -(0..7).map(|i| s + i as f64).product::<f64>() * m.powf(-s - 7.0);
    let tail = m.powf(1.0 - s) / (s - 1.0) + f / 2.0 - f1 / 12.0 + f3 / 720.0 - f5 / 30240.0;
    let err = (f7 / 1209600.0).abs();
    (head + tail, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trailing_zeros_are_dropped() {
        let a = Sequence::new(vec![1.0, 2.0, 0.0, 0.0]).unwrap();
        let b = Sequence::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert_eq!(a.get(5), 0.0);
    }

    #[test]
    fn basel_tail() {
        let (v, err) = power_tail_sum(1, 2.0);
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        assert!((v - exact).abs() < 1e-13, "{v} {exact}");
        assert!(err < 1e-12);
    }

    #[test]
    fn tail_from_large_start_matches_integral_bounds() {
        let (v, _) = power_tail_sum(100, 3.0);
        // ∫_100^∞ x^-3 < Σ < 100^-3 + ∫_100^∞ x^-3
        let lo = 0.5 * 100f64.powi(-2);
        assert!(v > lo && v < lo + 1e-6);
    }

    #[test]
    fn json_is_a_plain_array() {
        let s = Sequence::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[3.0,4.0]");
        let back: Sequence = serde_json::from_str("[1,0,0]").unwrap();
        assert_eq!(back.len(), 1);
    }
}
