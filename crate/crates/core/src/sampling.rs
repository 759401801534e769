//! Seeded random inputs. Every sample draws from its own ChaCha stream,
//! so results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::function::{Domain, StepFunction};
use crate::sequence::Sequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Log-uniform values on random breakpoints.
    LogUniform,
    /// Nonincreasing values.
    Decreasing,
    /// One block anchored at the right end of the support.
    RightBlock,
    /// Values growing geometrically to the right.
    HeavyTail,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::LogUniform,
        Family::Decreasing,
        Family::RightBlock,
        Family::HeavyTail,
    ];

    /// Round-robin assignment: most samples are log-uniform.
    pub fn for_index(i: usize) -> Family {
        match i % 8 {
            1 => Family::Decreasing,
            3 => Family::RightBlock,
            5 => Family::HeavyTail,
            _ => Family::LogUniform,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::LogUniform => "log-uniform",
            Family::Decreasing => "decreasing",
            Family::RightBlock => "right-block",
            Family::HeavyTail => "heavy-tail",
        }
    }
}

/// Independent stream for sample `index` under `seed` (splitmix64 mixing).
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(z)
}

/// Run `f` on samples `0..n` in parallel and collect in order.
pub fn par_samples<T: Send>(n: usize, seed: u64, f: impl Fn(usize, &mut ChaCha8Rng) -> T + Sync) -> Vec<T> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            f(i, &mut rng)
        })
        .collect()
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Options for random step functions.
#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    pub max_cells: usize,
    /// Half-line horizons are drawn log-uniformly from this range.
    pub horizon: (f64, f64),
    /// Force the function to vanish on `[support_end, horizon]`.
    pub support_end: Option<f64>,
    /// Probability that a cell is zero (log-uniform family only).
    pub zero_prob: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions {
            max_cells: 40,
            horizon: (0.5, 20.0),
            support_end: None,
            zero_prob: 0.1,
        }
    }
}

fn sorted_points(rng: &mut ChaCha8Rng, n: usize, end: f64) -> Vec<f64> {
    loop {
        let mut pts: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..end)).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        // keep cells comfortably above the merge tolerance
        let ok = pts.first().is_none_or(|&p| p > 1e-9 * end)
            && pts.windows(2).all(|w| w[1] - w[0] > 1e-9 * end)
            && pts.last().is_none_or(|&p| end - p > 1e-9 * end);
        if ok && pts.len() == n {
            return pts;
        }
    }
}

/// A random nonnegative step function.
pub fn random_step(rng: &mut ChaCha8Rng, domain_kind: crate::function::DomainKind, family: Family, opts: &StepOptions) -> StepFunction {
    let domain = match domain_kind {
        crate::function::DomainKind::UnitInterval => Domain::UnitInterval,
        crate::function::DomainKind::HalfLine => {
            Domain::half_line(log_uniform(rng, opts.horizon.0, opts.horizon.1)).unwrap()
        }
    };
    let h = domain.horizon();
    let end = opts.support_end.map(|b| b.min(h)).unwrap_or(h);
    let cells = rng.gen_range(1..=opts.max_cells.max(1));
    let (mut bp, mut vals) = match family {
        Family::RightBlock => {
            let a = rng.gen_range(0.0..end * 0.95);
            let v = log_uniform(rng, 0.1, 10.0);
            if a > 1e-6 * end {
                (vec![0.0, a, end], vec![0.0, v])
            } else {
                (vec![0.0, end], vec![v])
            }
        }
        _ => {
            let mut bp = vec![0.0];
            bp.extend(sorted_points(rng, cells - 1, end));
            bp.push(end);
            let mut vals: Vec<f64> = (0..cells).map(|_| log_uniform(rng, 1e-2, 1e2)).collect();
            match family {
                Family::Decreasing => vals.sort_by(|a, b| b.total_cmp(a)),
                Family::HeavyTail => {
                    let growth = rng.gen_range(1.2..3.0);
                    let mut v = log_uniform(rng, 1e-3, 1e-1);
                    for x in vals.iter_mut() {
                        *x = v;
                        v *= growth;
                    }
                }
                _ => {
                    for x in vals.iter_mut() {
                        if rng.gen::<f64>() < opts.zero_prob {
                            *x = 0.0;
                        }
                    }
                }
            }
            (bp, vals)
        }
    };
    if end < h {
        bp.push(h);
        vals.push(0.0);
    }
    StepFunction::new(domain, bp, vals).unwrap().simplified()
}

/// A random nonnegative sequence of length `1..=max_len`.
pub fn random_sequence(rng: &mut ChaCha8Rng, family: Family, max_len: usize) -> Sequence {
    let n = rng.gen_range(1..=max_len.max(1));
    let mut vals: Vec<f64> = (0..n).map(|_| log_uniform(rng, 1e-2, 1e2)).collect();
    match family {
        Family::Decreasing => vals.sort_by(|a, b| b.total_cmp(a)),
        Family::RightBlock => {
            let start = rng.gen_range(0..n);
            let v = log_uniform(rng, 0.1, 10.0);
            for (i, x) in vals.iter_mut().enumerate() {
                *x = if i >= start { v } else { 0.0 };
            }
        }
        Family::HeavyTail => {
            let growth = rng.gen_range(1.05..1.5);
            let mut v = log_uniform(rng, 1e-3, 1e-1);
            for x in vals.iter_mut() {
                *x = v;
                v *= growth;
            }
        }
        Family::LogUniform => {}
    }
    Sequence::new(vals).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::DomainKind;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = sample_rng(7, 3).gen();
        let b: f64 = sample_rng(7, 3).gen();
        let c: f64 = sample_rng(7, 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn families_produce_valid_functions() {
        let opts = StepOptions {
            support_end: Some(0.7),
            ..StepOptions::default()
        };
        for (i, fam) in Family::ALL.iter().enumerate() {
            let mut rng = sample_rng(1, i as u64);
            let f = random_step(&mut rng, DomainKind::UnitInterval, *fam, &opts);
            assert!(f.is_nonnegative());
            assert_eq!(f.eval(0.8), 0.0);
            let s = random_sequence(&mut rng, *fam, 10);
            assert!(s.is_nonnegative() && s.len() <= 10);
        }
    }

    #[test]
    fn parallel_map_keeps_order() {
        let v = par_samples(50, 9, |i, rng| (i, rng.gen::<u32>()));
        let w = par_samples(50, 9, |i, rng| (i, rng.gen::<u32>()));
        assert_eq!(v, w);
        assert!(v.iter().enumerate().all(|(i, x)| x.0 == i));
    }
}
