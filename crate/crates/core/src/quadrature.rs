//! Globally adaptive Gauss–Legendre quadrature with endpoint substitutions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

const ORDER: usize = 20;
const MAX_DEPTH: u32 = 60;
const MAX_INTERVALS: usize = 4000;

fn nodes() -> &'static [(f64, f64); ORDER] {
    static NODES: OnceLock<[(f64, f64); ORDER]> = OnceLock::new();
    NODES.get_or_init(|| {
        let mut out = [(0.0, 0.0); ORDER];
        let n = ORDER as f64;
        for i in 0..ORDER {
            // Newton on P_n starting from the Chebyshev-like guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=ORDER {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            out[i] = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

fn gauss(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes()
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn segment(f: &dyn Fn(f64) -> f64, a: f64, b: f64, depth: u32) -> Segment {
    let m = 0.5 * (a + b);
    let coarse = gauss(f, a, b);
    let fine = gauss(f, a, m) + gauss(f, m, b);
    Segment {
        a,
        b,
        value: fine,
        error: (fine - coarse).abs(),
        depth,
    }
}

/// Result of a numerical integration: value and estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
}

impl Quad {
    pub const ZERO: Quad = Quad {
        value: 0.0,
        error: 0.0,
    };

    pub fn exact(value: f64) -> Quad {
        Quad { value, error: 0.0 }
    }
}

impl std::ops::Add for Quad {
    type Output = Quad;
    fn add(self, o: Quad) -> Quad {
        Quad {
            value: self.value + o.value,
            error: self.error + o.error,
        }
    }
}

/// Integrate a smooth (or mildly log-singular) integrand over a finite interval.
///
/// Stops at `rel_tol`, or once the estimated error is down to rounding in the
/// segment values, whichever comes first.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Quad {
    if !(b > a) {
        return Quad::ZERO;
    }
    let first = segment(f, a, b, 0);
    let mut total = first.value;
    let mut err = first.error;
    let mut frozen_err = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut count = 1;
    while let Some(worst) = heap.pop() {
        let noise = 1024.0 * f64::EPSILON * worst.value.abs();
        if err <= rel_tol * total.abs() || err < 1e-300 || count >= MAX_INTERVALS {
            heap.push(worst);
            break;
        }
        if worst.depth >= MAX_DEPTH || worst.error <= noise {
            // cannot refine further; keep its error aside
            err -= worst.error;
            frozen_err += worst.error;
            heap.push(Segment { error: 0.0, ..worst });
            if heap.peek().map_or(true, |s| s.error == 0.0) {
                break;
            }
            continue;
        }
        let m = 0.5 * (worst.a + worst.b);
        let mut left = segment(f, worst.a, m, worst.depth + 1);
        let mut right = segment(f, m, worst.b, worst.depth + 1);
        let split_err = left.error + right.error;
        if split_err >= 0.5 * worst.error && worst.error <= 1e-5 * worst.value.abs() {
            // splitting no longer helps: the estimate is rounding in x or f
            frozen_err += split_err;
            left.error = 0.0;
            right.error = 0.0;
        }
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        count += 1;
        if count % 256 == 0 {
            // resum to shed drift from the running totals
            total = heap.iter().map(|s| s.value).sum();
            err = heap.iter().map(|s| s.error).sum();
        }
    }
    let total: f64 = heap.iter().map(|s| s.value).sum();
    let err: f64 = heap.iter().map(|s| s.error).sum::<f64>() + frozen_err;
    Quad { value: total, error: err }
}

/// ∫_a^b f where f(x) ~ (x − a)^β near `a` (β > −1).
///
/// Uses x = a + (b − a)·u^k with k = 1/(β + 1), which makes the integrand
/// bounded at u = 0.
pub fn integrate_left_singular(f: &dyn Fn(f64) -> f64, a: f64, b: f64, beta: f64, rel_tol: f64) -> Quad {
    if beta == 0.0 {
        return integrate(f, a, b, rel_tol);
    }
    let k = 1.0 / (beta + 1.0);
    let h = b - a;
    let g = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let x = a + h * u.powf(k);
        f(x) * k * h * u.powf(k - 1.0)
    };
    integrate(&g, 0.0, 1.0, rel_tol)
}

/// ∫_a^b f where f(x) ~ (b − x)^β near `b` (β > −1).
///
/// `f_dist` receives the distance `b − x` rather than `x`, so the integrand
/// can be evaluated without cancellation close to `b`.
pub fn integrate_right_singular(f_dist: &dyn Fn(f64) -> f64, a: f64, b: f64, beta: f64, rel_tol: f64) -> Quad {
    integrate_left_singular(f_dist, 0.0, b - a, beta, rel_tol)
}

/// ∫_a^∞ f where f(x) ~ x^δ at infinity (δ < −1, a > 0).
pub fn integrate_tail(f: &dyn Fn(f64) -> f64, a: f64, delta: f64, rel_tol: f64) -> Quad {
    let k = -1.0 / (delta + 1.0);
    let g = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let x = a * u.powf(-k);
        if !x.is_finite() {
            return 0.0;
        }
        f(x) * k * a * u.powf(-k - 1.0)
    };
    integrate(&g, 0.0, 1.0, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_weights_sum_to_two() {
        let s: f64 = nodes().iter().map(|n| n.1).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(&|x| x.powi(7) - 3.0 * x * x, 0.0, 2.0, 1e-12);
        assert!((q.value - (32.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn inverse_sqrt_at_the_left_end() {
        let q = integrate_left_singular(&|x: f64| x.powf(-0.5), 0.0, 1.0, -0.5, 1e-12);
        assert!((q.value - 2.0).abs() < 1e-12, "{q:?}");
    }

    #[test]
    fn strong_singularity_at_the_right_end() {
        // ∫_0^1 (1-x)^(-0.9) = 10
        let q = integrate_right_singular(&|d: f64| d.powf(-0.9), 0.0, 1.0, -0.9, 1e-12);
        assert!((q.value - 10.0).abs() < 1e-9, "{q:?}");
    }

    #[test]
    fn power_tail() {
        let q = integrate_tail(&|x: f64| x.powi(-2), 1.0, -2.0, 1e-12);
        assert!((q.value - 1.0).abs() < 1e-12);
        let q = integrate_tail(&|x: f64| (1.0 + x.ln()) / (x * x), 1.0, -2.0, 1e-12);
        assert!((q.value - 2.0).abs() < 1e-9, "{q:?}");
    }

    #[test]
    fn log_singularity_converges() {
        let q = integrate(&|x: f64| -x.ln(), 0.0, 1.0, 1e-10);
        assert!((q.value - 1.0).abs() < 1e-9, "{q:?}");
    }
}
