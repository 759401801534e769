//! K-functionals of the `(L¹, L∞)` couple, weighted and unweighted.

use std::f64::consts::E;

use serde::Serialize;

use crate::duality::Provenance;
use crate::error::{invalid, unsupported, Result};
use crate::function::{merge_grids, Domain, DomainKind, StepFunction};
use crate::inequalities::InequalityCheck;
use crate::norms::lp_norm;
use crate::operators::{decreasing_rearrangement, substitution_t};
use crate::sampling::{par_samples, random_step, Family, StepOptions};
use crate::space::{flatten_lp, SpaceSpec};
use crate::weight::Weight;

/// Relative tolerance for the two sides of the weighted identity.
pub const K_IDENTITY_TOL: f64 = 1e-8;

/// `K(t, f; L¹, L∞) = ∫₀ᵗ f*`.
pub fn k_functional(f: &StepFunction, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return invalid(format!("t must be positive, got {t}"));
    }
    Ok(decreasing_rearrangement(f).integral_to(t))
}

/// `t ↦ K(t, f)`: piecewise linear through `knots`, constant after the last.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KProfile {
    pub knots: Vec<(f64, f64)>,
}

impl KProfile {
    pub fn new(f: &StepFunction) -> KProfile {
        let r = decreasing_rearrangement(f);
        let mut knots = vec![(0.0, 0.0)];
        let mut acc = 0.0;
        for (l, rr, v) in r.decreasing.cells() {
            if v == 0.0 {
                break;
            }
            acc += v * (rr - l);
            knots.push((rr, acc));
        }
        KProfile { knots }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.knots.partition_point(|k| k.0 <= t);
        if i >= self.knots.len() {
            return self.knots.last().unwrap().1;
        }
        let (t0, k0) = self.knots[i - 1];
        let (t1, k1) = self.knots[i];
        k0 + (k1 - k0) * (t - t0) / (t1 - t0)
    }

    /// Slopes on successive pieces (the last, zero, slope is implicit).
    pub fn slopes(&self) -> Vec<f64> {
        self.knots.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect()
    }
}

/// Optimal `f = g + h` for `‖g‖_{L¹(w)} + t‖h‖_{L∞(w)}`.
#[derive(Debug, Clone, Serialize)]
pub struct KDecomposition {
    pub value: f64,
    /// Clipping level of `|f|w`.
    pub lambda: f64,
    pub g: StepFunction,
    pub h: StepFunction,
    pub g_l1: f64,
    pub h_linf: f64,
}

/// `f` refined to the weight's kinks, and the per-cell average of `w`.
fn cell_weights(f: &StepFunction, w: &Weight) -> Result<(StepFunction, Vec<f64>)> {
    let h = f.horizon();
    let kinks: Vec<f64> = w.kinks().into_iter().filter(|&k| k > 0.0 && k < h).collect();
    let f = f.refine_to(&merge_grids(f.breakpoints(), &kinks))?;
    let domain = f.domain();
    let mut avg = Vec::with_capacity(f.len());
    for (l, r, v) in f.cells() {
        let mass = lp_norm(&StepFunction::indicator(domain, l, r, 1.0)?, w, 1.0).value;
        let a = mass / (r - l);
        if !(a.is_finite() && a > 0.0) && v != 0.0 {
            return invalid(format!("weight has no finite positive average on [{l}, {r}] where f is nonzero"));
        }
        avg.push(if a.is_finite() { a } else { 0.0 });
    }
    Ok((f, avg))
}

/// `fw` with `w` replaced by its cell averages.
pub fn weighted_product(f: &StepFunction, w: &Weight) -> Result<StepFunction> {
    let (f, avg) = cell_weights(f, w)?;
    let vals = f.values().iter().zip(&avg).map(|(v, a)| if *v == 0.0 { 0.0 } else { v * a }).collect();
    StepFunction::new(f.domain(), f.breakpoints().to_vec(), vals)
}

/// `K(t, f; L¹(w), L∞(w))` by scanning the clipping level over the values
/// of `|f|w` and zero.
pub fn k_functional_weighted(f: &StepFunction, t: f64, w: &Weight) -> Result<KDecomposition> {
    if !(t > 0.0) {
        return invalid(format!("t must be positive, got {t}"));
    }
    let (f, avg) = cell_weights(f, w)?;
    let cells: Vec<(f64, f64, f64)> = f.cells().collect();
    let fw: Vec<f64> = cells.iter().zip(&avg).map(|((_, _, v), a)| if *v == 0.0 { 0.0 } else { v.abs() * a }).collect();
    let cost = |lambda: f64| -> f64 {
        let excess: f64 = cells.iter().zip(&fw).map(|((l, r, _), x)| (x - lambda).max(0.0) * (r - l)).sum();
        excess + t * lambda
    };
    let mut best = (cost(0.0), 0.0);
    for &lambda in &fw {
        let c = cost(lambda);
        if c < best.0 {
            best = (c, lambda);
        }
    }
    let lambda = best.1;
    let h_vals: Vec<f64> = cells
        .iter()
        .zip(&fw)
        .zip(&avg)
        .map(|(((_, _, v), x), a)| if *x <= lambda { *v } else { v.signum() * lambda / a })
        .collect();
    let g_vals: Vec<f64> = cells.iter().zip(&h_vals).map(|((_, _, v), h)| v - h).collect();
    let domain = f.domain();
    let bp = f.breakpoints().to_vec();
    let g = StepFunction::new(domain, bp.clone(), g_vals)?;
    let h = StepFunction::new(domain, bp, h_vals)?;
    let g_l1: f64 = g.cells().zip(&avg).map(|((l, r, v), a)| v.abs() * a * (r - l)).sum();
    let h_linf = h
        .cells()
        .zip(&avg)
        .map(|((_, _, v), a)| v.abs() * a)
        .fold(0.0, f64::max);
    Ok(KDecomposition {
        value: g_l1 + t * h_linf,
        lambda,
        g,
        h,
        g_l1,
        h_linf,
    })
}

/// `K(t, f; L¹(w), L∞(w)) = K(t, fw; L¹, L∞)`: the left side by the level
/// scan, the right side from the rearrangement of `fw`.
pub fn check_k_identity(f: &StepFunction, t: f64, w: &Weight) -> Result<InequalityCheck> {
    check_k_identity_tol(f, t, w, K_IDENTITY_TOL)
}

pub fn check_k_identity_tol(f: &StepFunction, t: f64, w: &Weight, tol: f64) -> Result<InequalityCheck> {
    let lhs = k_functional_weighted(f, t, w)?.value;
    let rhs = k_functional(&weighted_product(f, w)?, t)?;
    Ok(equality("k-identity", lhs, rhs, tol))
}

/// Two-sided variant: passes when `|lhs − rhs| ≤ tol·max(|lhs|, |rhs|)`.
pub fn equality(name: &str, lhs: f64, rhs: f64, tol: f64) -> InequalityCheck {
    let mut c = InequalityCheck::new(name, lhs, rhs, 1.0, Provenance::Stated);
    c.pass = (lhs - rhs).abs() <= tol * lhs.abs().max(rhs.abs());
    c
}

/// Largest observed `‖Th‖/‖h‖` on `X(w)` against the interpolated bound
/// `max(‖T‖_{L¹(w)}, ‖T‖_{L∞(w)}) ≤ e`.
///
/// Only `X = Lp` on `[0, 1]` with `w = 1/(1 − x)` is covered: there the
/// interpolation constant is 1 and both endpoint bounds are known.
pub fn check_weighted_interp_bound(x: &SpaceSpec, w: &Weight, samples: usize, seed: u64) -> Result<InequalityCheck> {
    let Some((p, inner, DomainKind::UnitInterval)) = flatten_lp(&x.normalized()) else {
        return unsupported(format!("{x} is not an Lp space on [0, 1]"));
    };
    if !inner.is_unit() || w.normalized() != Weight::OneMinusXInv {
        return unsupported("the endpoint bounds are known only for unweighted Lp and w = 1/(1-x)");
    }
    let opts = StepOptions {
        support_end: Some(0.999),
        ..StepOptions::default()
    };
    let ratios = par_samples(samples, seed, |i, rng| -> Result<f64> {
        use rand::Rng;
        let h = match i % 4 {
            // short blocks near either end probe where T stretches most
            0 => StepFunction::indicator(Domain::UnitInterval, 0.0, 10f64.powf(rng.gen_range(-6.0..-1.0)), 1.0)?,
            2 => {
                let b = 1.0 - 10f64.powf(rng.gen_range(-6.0..-1.0));
                StepFunction::indicator(Domain::UnitInterval, b * 0.9 + 0.1 * b * b, b, 1.0)?
            }
            _ => random_step(rng, DomainKind::UnitInterval, Family::for_index(i), &opts),
        };
        let th = substitution_t(&h)?;
        let den = lp_norm(&h, w, p).value;
        Ok(if den == 0.0 { 0.0 } else { lp_norm(&th, w, p).value / den })
    });
    let ratios = ratios.into_iter().collect::<Result<Vec<f64>>>()?;
    let (arg, sup) = ratios
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (i, &r)| if r > best.1 { (i, r) } else { best });
    Ok(InequalityCheck::new("interpolated-t-bound", sup, E, E, Provenance::Stated)
        .with_note(format!("largest ratio over {samples} samples at sample {arg}")))
}
