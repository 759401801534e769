//! Köthe associate norms, down norms, Sinnamon's supremum and the duality
//! reports that compare `‖g‖_{(CX)′}` with `‖g̃‖_{X′}`.
//!
//! The exact solvers rest on one reduction. For `f ≥ 0` with fixed cell
//! masses, `Cf` is pointwise smallest when each cell's mass sits at its right
//! end, so the supremum over `f` becomes
//!
//! ```text
//! max Σ c_k S_k   over  0 ≤ S_0 ≤ S_1 ≤ …,   Σ μ_k S_k^p ≤ 1
//! ```
//!
//! with `S` the cumulative masses, `c_k = g_k − g_{k+1}` and `μ_k` the
//! `(w/x)^p` mass of the stretch where `F = S_k`. For `1 < p < ∞` the
//! optimum is a power of a weighted isotonic regression of `c/μ`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, unsupported, CesError, Result};
use crate::function::{Domain, DomainKind, StepFunction};
use crate::lp;
use crate::norms::{
    flatten_seq_lp, lp_norm, lp_norm_piecewise, marcinkiewicz_norm, norm, seq_norm, Method, NormValue,
};
use crate::operators::{majorant, majorant_seq};
use crate::pava::{isotonic_decreasing, isotonic_increasing};
use crate::piecewise::{Piece, PiecewiseFn};
use crate::sequence::{power_tail_sum, Sequence};
use crate::space::{flatten_lp, SpaceSpec};
use crate::weight::{SeqWeight, Weight};

mod report;
pub use report::{
    duality_report, duality_report_with_tol, log_grid_min, REPORT_TOL, substitution_norm, unit_hardy_constant, Constant, DualityReport, DualityTheorem, Provenance,
    RatioRow,
};

/// Hölder conjugate exponent.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualMethod {
    Exact,
    Ascent,
    BruteForce,
}

/// A step function or a finite sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Element {
    Function(StepFunction),
    Sequence(Sequence),
}

impl From<StepFunction> for Element {
    fn from(f: StepFunction) -> Self {
        Element::Function(f)
    }
}

impl From<Sequence> for Element {
    fn from(x: Sequence) -> Self {
        Element::Sequence(x)
    }
}

// ---------------------------------------------------------------------------
// the monotone-cone problem

/// Optimum of `max ⟨c,S⟩ / (Σ μ S^p)^{1/p}` over nondecreasing `S ≥ 0`.
#[derive(Debug, Clone)]
pub struct ConeOptimum {
    pub value: f64,
    /// Maximizer normalized to unit norm (empty when the value is 0 or ∞).
    pub s: Vec<f64>,
}

/// Trim the variables forced to zero by an infinite `μ` and detect the free
/// trailing variables (`μ = 0`). Returns `(start, end)` or `None` for +∞.
fn trim(c: &[f64], mu: &[f64]) -> Result<Option<(usize, usize)>> {
    let n = c.len();
    let start = mu.iter().rposition(|m| m.is_infinite()).map_or(0, |k| k + 1);
    let end = mu.iter().rposition(|&m| m > 0.0).map_or(0, |k| k + 1).max(start);
    let mut suffix = 0.0;
    for k in (end.max(start)..n).rev() {
        suffix += c[k];
        if suffix > 0.0 {
            return Ok(None);
        }
    }
    if mu[start..end].iter().any(|&m| m == 0.0) {
        return unsupported("zero norm mass strictly inside the support");
    }
    Ok(Some((start, end)))
}

/// Exact solution for `1 ≤ p < ∞`.
pub fn monotone_cone_sup(c: &[f64], mu: &[f64], p: f64) -> Result<ConeOptimum> {
    if c.len() != mu.len() {
        return invalid("coefficient and mass vectors differ in length");
    }
    let Some((start, end)) = trim(c, mu)? else {
        return Ok(ConeOptimum {
            value: f64::INFINITY,
            s: vec![],
        });
    };
    let n = c.len();
    let cs = &c[start..end];
    let ms = &mu[start..end];
    if cs.is_empty() {
        return Ok(ConeOptimum { value: 0.0, s: vec![0.0; n] });
    }
    let mut s = vec![0.0; n];
    if p == 1.0 {
        // extreme rays χ_{k..}
        let (mut best, mut arg) = (0.0, None);
        let (mut sc, mut sm) = (0.0, 0.0);
        for k in (0..cs.len()).rev() {
            sc += cs[k];
            sm += ms[k];
            if sc / sm > best {
                best = sc / sm;
                arg = Some((k, sm));
            }
        }
        if let Some((k, sm)) = arg {
            for v in s.iter_mut().skip(start + k) {
                *v = 1.0 / sm;
            }
        }
        return Ok(ConeOptimum { value: best, s });
    }
    let y: Vec<f64> = cs.iter().zip(ms).map(|(c, m)| c / m).collect();
    let iso = isotonic_increasing(&y, ms);
    let e = 1.0 / (p - 1.0);
    let raw: Vec<f64> = iso.iter().map(|&v| v.max(0.0).powf(e)).collect();
    let np: f64 = raw.iter().zip(ms).map(|(s, m)| m * s.powf(p)).sum();
    if np == 0.0 {
        return Ok(ConeOptimum { value: 0.0, s });
    }
    let scale = np.powf(-1.0 / p);
    let value = raw.iter().zip(cs).map(|(s, c)| s * c).sum::<f64>() * scale;
    for (k, v) in raw.iter().enumerate() {
        s[start + k] = v * scale;
    }
    let last = s[end - 1];
    for v in s.iter_mut().skip(end) {
        *v = last;
    }
    Ok(ConeOptimum { value: value.max(0.0), s })
}

/// Exact solution for `p = ∞`: `max Σ gains_k m_k` with cumulative sums
/// `S_k ≤ 1/ν_k`.
pub fn monotone_cone_sup_inf(gains: &[f64], nu: &[f64]) -> Result<ConeOptimum> {
    let n = gains.len();
    let mut caps: Vec<f64> = nu.iter().map(|&v| if v == 0.0 { f64::INFINITY } else { 1.0 / v }).collect();
    for k in (0..n.saturating_sub(1)).rev() {
        caps[k] = caps[k].min(caps[k + 1]);
    }
    let finite = caps.iter().position(|c| c.is_infinite()).unwrap_or(n);
    if gains[finite..].iter().any(|&g| g > 0.0) {
        return Ok(ConeOptimum {
            value: f64::INFINITY,
            s: vec![],
        });
    }
    if finite == 0 {
        return Ok(ConeOptimum { value: 0.0, s: vec![0.0; n] });
    }
    let sol = lp::cumulative_cap_lp(&gains[..finite], &caps[..finite])?;
    let mut s = Vec::with_capacity(n);
    let mut acc = 0.0;
    for k in 0..n {
        if k < finite {
            acc += sol.x[k];
        }
        s.push(acc);
    }
    Ok(ConeOptimum { value: sol.value, s })
}

/// Projected gradient ascent for the same problem (`1 < p < ∞`), with the
/// μ-weighted isotonic projection and backtracking. Three starts: flat,
/// proportional to `start_hint`, and the best extreme ray.
pub fn monotone_cone_ascent(c: &[f64], mu: &[f64], p: f64, start_hint: &[f64], max_iter: usize) -> Result<(ConeOptimum, bool)> {
    if !(p > 1.0 && p.is_finite()) {
        return invalid("ascent needs 1 < p < ∞");
    }
    let Some((start, end)) = trim(c, mu)? else {
        return Ok((
            ConeOptimum {
                value: f64::INFINITY,
                s: vec![],
            },
            true,
        ));
    };
    let n = c.len();
    let cs = &c[start..end];
    let ms = &mu[start..end];
    let m = cs.len();
    if m == 0 {
        return Ok((ConeOptimum { value: 0.0, s: vec![0.0; n] }, true));
    }
    let norm = |s: &[f64]| s.iter().zip(ms).map(|(s, m)| m * s.powf(p)).sum::<f64>().powf(1.0 / p);
    let ratio = |s: &[f64]| {
        let nn = norm(s);
        if nn == 0.0 {
            0.0
        } else {
            s.iter().zip(cs).map(|(s, c)| s * c).sum::<f64>() / nn
        }
    };
    let project = |y: &[f64]| -> Vec<f64> {
        let iso = isotonic_increasing(y, ms);
        iso.into_iter().map(|v| v.max(0.0)).collect()
    };
    let normalize = |s: Vec<f64>| -> Vec<f64> {
        let nn = norm(&s);
        if nn > 0.0 {
            s.into_iter().map(|v| v / nn).collect()
        } else {
            s
        }
    };
    let mut starts: Vec<Vec<f64>> = vec![vec![1.0; m]];
    let mut cum = 0.0;
    let hint: Vec<f64> = start_hint[start..end]
        .iter()
        .map(|v| {
            cum += v.abs();
            cum
        })
        .collect();
    if hint.iter().any(|&v| v > 0.0) {
        starts.push(hint);
    }
    let ray = monotone_cone_sup(cs, ms, 1.0)?;
    if ray.value > 0.0 {
        starts.push(ray.s.clone());
    }
    let mut best = (f64::NEG_INFINITY, vec![0.0; m]);
    let mut all_converged = true;
    for s0 in starts {
        let mut s = normalize(project(&s0));
        let mut r = ratio(&s);
        let mut eta = 1.0;
        let mut stalls = 0;
        let mut converged = false;
        for _ in 0..max_iter {
            // gradient of the ratio at unit norm, preconditioned by 1/μ
            let grad: Vec<f64> = (0..m).map(|k| (cs[k] - r * ms[k] * s[k].powf(p - 1.0)) / ms[k]).collect();
            eta *= 2.0;
            let mut improved = false;
            while eta > 1e-30 {
                let trial: Vec<f64> = s.iter().zip(&grad).map(|(s, g)| s + eta * g).collect();
                let t = normalize(project(&trial));
                let rt = ratio(&t);
                if rt > r {
                    let gain = rt - r;
                    s = t;
                    r = rt;
                    improved = true;
                    stalls = if gain <= 1e-15 * r { stalls + 1 } else { 0 };
                    break;
                }
                eta *= 0.5;
            }
            if !improved || stalls >= 5 {
                converged = true;
                break;
            }
        }
        all_converged &= converged;
        if r > best.0 {
            best = (r, s);
        }
    }
    let mut s = vec![0.0; n];
    s[start..end].copy_from_slice(&best.1);
    let last = s[end - 1];
    for v in s.iter_mut().skip(end) {
        *v = last;
    }
    Ok((
        ConeOptimum {
            value: best.0.max(0.0),
            s,
        },
        all_converged,
    ))
}

// ---------------------------------------------------------------------------
// (CX)′ for X = Lp(w) and ℓp(w)

/// Per-variable masses for the function case: `(μ or ν, method, error)`.
fn function_masses(g: &StepFunction, p: f64, w: &Weight) -> (Vec<f64>, Method, f64) {
    let domain = g.domain();
    let bp = g.breakpoints();
    let k = g.len();
    let mut out = Vec::with_capacity(k);
    let mut method = Method::ClosedForm;
    let mut err = 0.0;
    let inv_x = Piece::rational(0.0, 1.0);
    for j in 0..k {
        let pw = if j + 2 < bp.len() {
            PiecewiseFn {
                domain,
                cells: vec![(bp[j + 1], bp[j + 2], inv_x)],
                tail: None,
            }
        } else if domain.is_half_line() {
            PiecewiseFn {
                domain,
                cells: vec![],
                tail: Some(inv_x),
            }
        } else {
            // the stretch after the last mass is the single point x = 1: it
            // costs nothing in Lp, but the sup norm still sees the limit there
            out.push(if p.is_infinite() { w.eval(1.0) } else { 0.0 });
            continue;
        };
        let v = lp_norm_piecewise(&pw, w, p);
        method = method.max(v.method);
        if p.is_infinite() {
            err += v.error_bound;
            out.push(v.value);
        } else {
            err += p * v.value.powf(p - 1.0) * v.error_bound;
            out.push(v.value.powf(p));
        }
    }
    (out, method, err)
}

/// `(c, μ)` for a sequence `g` against `ℓp(w)`; the last mass carries the
/// whole tail `Σ_{n≥N} (w_n/n)^p`.
fn sequence_masses(g: &[f64], p: f64, w: &SeqWeight) -> (Vec<f64>, f64) {
    let n = g.len();
    let mut mu: Vec<f64> = (1..n).map(|k| (w.eval(k) / k as f64).powf(if p.is_infinite() { 1.0 } else { p })).collect();
    let (tail, err) = if p.is_infinite() {
        let e = w.exponent_at_inf() - 1.0;
        if e > 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            let upto = n.max(w.tail_start()) + 1;
            let head = (n..=upto).map(|k| w.eval(k) / k as f64).fold(0.0, f64::max);
            // past `upto` the weight is a pure power with exponent ≤ 1
            let lim = if e == 0.0 { w.tail_coef() } else { 0.0 };
            (head.max(lim), 0.0)
        }
    } else {
        let s = (1.0 - w.exponent_at_inf()) * p;
        if s <= 1.0 {
            (f64::INFINITY, 0.0)
        } else {
            let upto = n.max(w.tail_start());
            let head: f64 = (n..upto).map(|k| (w.eval(k) / k as f64).powf(p)).sum();
            let (t, e) = power_tail_sum(upto, s);
            let c = w.tail_coef().powf(p);
            (head + c * t, c * e)
        }
    };
    if n > 0 {
        mu.push(tail);
    }
    (mu, err)
}

fn diffs(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n).map(|k| values[k] - if k + 1 < n { values[k + 1] } else { 0.0 }).collect()
}

/// `‖g‖_{(C Lp(w))′}` exactly.
fn cesaro_lp_dual_function(g: &StepFunction, p: f64, w: &Weight) -> Result<(NormValue, ConeOptimum)> {
    let g = g.abs().simplified();
    let vals = g.values().to_vec();
    let (mu, method, err) = function_masses(&g, p, w);
    let opt = if p.is_infinite() {
        monotone_cone_sup_inf(&vals, &mu)?
    } else {
        monotone_cone_sup(&diffs(&vals), &mu, p)?
    };
    let rel = if opt.value > 0.0 && opt.value.is_finite() {
        let total: f64 = mu.iter().filter(|m| m.is_finite()).sum();
        if total > 0.0 {
            opt.value * err / total + 4.0 * f64::EPSILON * opt.value
        } else {
            0.0
        }
    } else {
        0.0
    };
    Ok((
        NormValue {
            value: opt.value,
            method,
            error_bound: rel,
        },
        opt,
    ))
}

fn cesaro_lp_dual_sequence(g: &Sequence, p: f64, w: &SeqWeight) -> Result<(NormValue, ConeOptimum)> {
    let vals: Vec<f64> = g.entries().iter().map(|v| v.abs()).collect();
    if vals.is_empty() {
        return Ok((NormValue::exact(0.0), ConeOptimum { value: 0.0, s: vec![] }));
    }
    let (mu, err) = sequence_masses(&vals, p, w);
    let opt = if p.is_infinite() {
        monotone_cone_sup_inf(&vals, &mu)?
    } else {
        monotone_cone_sup(&diffs(&vals), &mu, p)?
    };
    let mu_last = *mu.last().unwrap();
    let error_bound = if opt.value.is_finite() && mu_last.is_finite() && mu_last > 0.0 {
        opt.value * err / (p * mu_last) + 4.0 * f64::EPSILON * opt.value
    } else {
        0.0
    };
    Ok((
        NormValue {
            value: opt.value,
            method: Method::ClosedForm,
            error_bound,
        },
        opt,
    ))
}

/// `‖g‖_{(CX)′}` for a sequence and `X = ℓp(w)`.
pub fn cesaro_dual_norm(g: &Sequence, x: &SpaceSpec) -> Result<NormValue> {
    x.validate()?;
    match flatten_seq_lp(x) {
        Some((p, w)) => Ok(cesaro_lp_dual_sequence(g, p, &w)?.0),
        None => unsupported(format!("Cesàro dual over {x}: only weighted ℓp is supported")),
    }
}

// ---------------------------------------------------------------------------
// associate norms

/// `‖g‖_{X′} = sup { ∫|fg| : ‖f‖_X ≤ 1 }`.
pub fn associate_norm(g: &Element, x: &SpaceSpec, method: DualMethod) -> Result<NormValue> {
    x.validate()?;
    let x = x.normalized();
    match g {
        Element::Function(f) => {
            x.check_domain(&f.domain())?;
            match method {
                DualMethod::Exact => exact_function(f, &x),
                DualMethod::Ascent => ascent_function(f, &x),
                DualMethod::BruteForce => unsupported("brute force is only available for sequences"),
            }
        }
        Element::Sequence(s) => {
            if !x.is_sequence() {
                return Err(CesError::DomainMismatch("function space given a sequence".into()));
            }
            match method {
                DualMethod::Exact => exact_sequence(s, &x),
                DualMethod::Ascent => ascent_sequence(s, &x),
                DualMethod::BruteForce => brute_force_sequence(s, &x),
            }
        }
    }
}

fn exact_function(g: &StepFunction, x: &SpaceSpec) -> Result<NormValue> {
    if let Some((p, w, _)) = flatten_lp(x) {
        return Ok(lp_norm(g, &Weight::Reciprocal(Box::new(w)).normalized(), conjugate(p)));
    }
    match x {
        SpaceSpec::Cesaro(inner) => match flatten_lp(inner) {
            Some((p, w, _)) => Ok(cesaro_lp_dual_function(g, p, &w)?.0),
            None => unsupported(format!("no exact dual for {x}; use ascent")),
        },
        SpaceSpec::Lorentz(phi) => Ok(marcinkiewicz_norm(g, phi, false)),
        SpaceSpec::Weighted(inner, Weight::Explicit(w)) => {
            let gw = g.zip_with(w, |a, b| a / b)?;
            exact_function(&gw, inner)
        }
        _ => unsupported(format!("no exact dual for {x}; use ascent")),
    }
}

fn exact_sequence(g: &Sequence, x: &SpaceSpec) -> Result<NormValue> {
    if let Some((p, w)) = flatten_seq_lp(x) {
        let q = conjugate(p);
        let vals: Vec<f64> = g.entries().iter().enumerate().map(|(i, v)| v / w.eval(i + 1)).collect();
        return seq_norm(&Sequence::new(vals)?, &SpaceSpec::seq_lp(q, SeqWeight::Power(0.0)));
    }
    match x {
        SpaceSpec::SeqCesaro(inner) => cesaro_dual_norm(g, inner),
        SpaceSpec::SeqWeighted(inner, w) => {
            let vals: Vec<f64> = g.entries().iter().enumerate().map(|(i, v)| v / w.eval(i + 1)).collect();
            exact_sequence(&Sequence::new(vals)?, inner)
        }
        _ => unsupported(format!("no exact dual for {x}; use ascent")),
    }
}

pub const ASCENT_MAX_ITER: usize = 10_000;

fn ascent_report(lower: f64, exact: Option<f64>, converged: bool) -> Result<NormValue> {
    let error_bound = exact.map(|e| (e - lower).max(0.0)).unwrap_or(0.0);
    if !converged {
        return Err(CesError::NotConverged {
            message: "projected ascent hit the iteration cap".into(),
            lower,
            upper: exact.unwrap_or(f64::INFINITY),
        });
    }
    Ok(NormValue {
        value: lower,
        method: Method::Optimization,
        error_bound,
    })
}

fn ascent_function(g: &StepFunction, x: &SpaceSpec) -> Result<NormValue> {
    if let SpaceSpec::Cesaro(inner) = x {
        if let Some((p, w, _)) = flatten_lp(inner) {
            if p > 1.0 && p.is_finite() {
                let g = g.abs().simplified();
                let vals = g.values().to_vec();
                let (mu, _, _) = function_masses(&g, p, &w);
                let (opt, conv) = monotone_cone_ascent(&diffs(&vals), &mu, p, &vals, ASCENT_MAX_ITER)?;
                let exact = cesaro_lp_dual_function(&g, p, &w)?.0.value;
                return ascent_report(opt.value, Some(exact), conv);
            }
        }
    }
    // generic: nonnegative step f on a refinement of g's grid
    let g = g.abs().simplified();
    let mut grid = vec![0.0];
    for (l, r, _) in g.cells() {
        for i in 1..=4 {
            grid.push(l + (r - l) * i as f64 / 4.0);
        }
    }
    let gr = g.refine_to(&grid)?;
    let c: Vec<f64> = gr.cells().map(|(l, r, v)| v * (r - l)).collect();
    let domain = gr.domain();
    let norm_of = |vals: &[f64]| -> Result<f64> {
        let f = StepFunction::new(domain, grid.clone(), vals.to_vec())?;
        Ok(norm(&f, x)?.value)
    };
    let (lower, conv) = generic_ascent(&c, &norm_of, ASCENT_MAX_ITER)?;
    let exact = exact_function(&g, x).ok().map(|v| v.value);
    ascent_report(lower, exact, conv)
}

fn ascent_sequence(g: &Sequence, x: &SpaceSpec) -> Result<NormValue> {
    if let SpaceSpec::SeqCesaro(inner) = x {
        if let Some((p, w)) = flatten_seq_lp(inner) {
            if p > 1.0 && p.is_finite() {
                let vals: Vec<f64> = g.entries().iter().map(|v| v.abs()).collect();
                if vals.is_empty() {
                    return Ok(NormValue::exact(0.0));
                }
                let (mu, _) = sequence_masses(&vals, p, &w);
                let (opt, conv) = monotone_cone_ascent(&diffs(&vals), &mu, p, &vals, ASCENT_MAX_ITER)?;
                let exact = cesaro_lp_dual_sequence(g, p, &w)?.0.value;
                return ascent_report(opt.value, Some(exact), conv);
            }
        }
    }
    let c: Vec<f64> = g.entries().iter().map(|v| v.abs()).collect();
    let norm_of = |vals: &[f64]| -> Result<f64> { Ok(seq_norm(&Sequence::new(vals.to_vec())?, x)?.value) };
    let (lower, conv) = generic_ascent(&c, &norm_of, ASCENT_MAX_ITER)?;
    let exact = exact_sequence(g, x).ok().map(|v| v.value);
    ascent_report(lower, exact, conv)
}

/// Maximize `⟨c,x⟩/N(x)` over `x ≥ 0` with finite-difference gradients.
fn generic_ascent(c: &[f64], norm_of: &dyn Fn(&[f64]) -> Result<f64>, max_iter: usize) -> Result<(f64, bool)> {
    let n = c.len();
    if c.iter().all(|&v| v == 0.0) {
        return Ok((0.0, true));
    }
    let ratio = |x: &[f64]| -> Result<f64> {
        let nn = norm_of(x)?;
        let num: f64 = x.iter().zip(c).map(|(a, b)| a * b).sum();
        Ok(if nn > 0.0 { num / nn } else { 0.0 })
    };
    let mut starts: Vec<Vec<f64>> = vec![vec![1.0; n], c.to_vec()];
    let mut best_unit = (0.0, 0);
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        let r = ratio(&e)?;
        if r > best_unit.0 {
            best_unit = (r, k);
        }
    }
    let mut e = vec![0.0; n];
    e[best_unit.1] = 1.0;
    starts.push(e);
    let mut best = 0.0f64;
    let mut all_converged = true;
    for mut x in starts {
        let mut r = ratio(&x)?;
        let mut eta = 1.0;
        let mut converged = false;
        let mut stalls = 0;
        for _ in 0..max_iter {
            let scale = x.iter().cloned().fold(0.0, f64::max).max(1e-300);
            let base = norm_of(&x)?;
            let num: f64 = x.iter().zip(c).map(|(a, b)| a * b).sum();
            let mut grad = vec![0.0; n];
            for k in 0..n {
                let h = 1e-7 * scale;
                let mut xp = x.clone();
                xp[k] += h;
                let dn = (norm_of(&xp)? - base) / h;
                grad[k] = (c[k] * base - num * dn) / (base * base);
            }
            eta *= 2.0;
            let mut improved = false;
            while eta > 1e-30 * scale {
                let t: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| (a + eta * g * scale).max(0.0)).collect();
                let rt = ratio(&t)?;
                if rt > r {
                    stalls = if rt - r <= 1e-13 * rt { stalls + 1 } else { 0 };
                    x = t;
                    r = rt;
                    improved = true;
                    break;
                }
                eta *= 0.5;
            }
            if !improved || stalls >= 5 {
                converged = true;
                break;
            }
        }
        all_converged &= converged;
        best = best.max(r);
    }
    Ok((best, all_converged))
}

/// Zooming pattern search over the nonnegative simplex (sequences of length
/// at most 8). The ratio is quasi-concave, so local moves suffice.
fn brute_force_sequence(g: &Sequence, x: &SpaceSpec) -> Result<NormValue> {
    let n = g.len();
    if n > 8 {
        return invalid(format!("brute force is limited to length 8, got {n}"));
    }
    if n == 0 {
        return Ok(NormValue::exact(0.0));
    }
    let c: Vec<f64> = g.entries().iter().map(|v| v.abs()).collect();
    let ratio = |v: &[f64]| -> Result<f64> {
        let nn = seq_norm(&Sequence::new(v.to_vec())?, x)?.value;
        let num: f64 = v.iter().zip(&c).map(|(a, b)| a * b).sum();
        Ok(if nn > 0.0 { num / nn } else { 0.0 })
    };
    // coarse grid first: all compositions of 1 into n parts of size 1/m
    let m = match n {
        1..=3 => 12,
        4..=5 => 6,
        _ => 3,
    };
    let mut best = (f64::NEG_INFINITY, vec![1.0 / n as f64; n]);
    let mut cur = vec![0usize; n];
    fn compositions(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut dyn FnMut(&[usize])) {
        if k + 1 == cur.len() {
            cur[k] = left;
            out(cur);
            return;
        }
        for v in 0..=left {
            cur[k] = v;
            compositions(k + 1, left - v, cur, out);
        }
    }
    let mut err = None;
    compositions(0, m, &mut cur, &mut |comp| {
        let v: Vec<f64> = comp.iter().map(|&k| k as f64 / m as f64).collect();
        match ratio(&v) {
            Ok(r) if r > best.0 => best = (r, v),
            Ok(_) => {}
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let (mut r, mut v) = best;
    let mut step = 0.5 / m as f64;
    while step > 1e-13 {
        let mut moved = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = step.min(v[j]);
                if d <= 0.0 {
                    continue;
                }
                let mut t = v.clone();
                t[i] += d;
                t[j] -= d;
                let rt = ratio(&t)?;
                if rt > r {
                    r = rt;
                    v = t;
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok(NormValue {
        value: r,
        method: Method::Optimization,
        error_bound: 1e-9 * r,
    })
}

// ---------------------------------------------------------------------------
// down norm

#[derive(Debug, Clone, Serialize)]
pub struct DownNorm {
    pub value: NormValue,
    /// Maximizing nonincreasing `h` with `‖h‖_{X′} = 1`.
    pub witness: StepFunction,
}

fn down_setup(f: &StepFunction, xprime: &SpaceSpec) -> Result<(f64, StepFunction, Vec<f64>, Vec<f64>)> {
    xprime.validate()?;
    xprime.check_domain(&f.domain())?;
    let Some((q, w, _)) = flatten_lp(xprime) else {
        return unsupported(format!("down norm needs an Lq space, got {xprime}"));
    };
    if !w.is_unit() {
        return unsupported("down norm is implemented for unweighted Lq");
    }
    let f = f.abs().simplified();
    let mass: Vec<f64> = f.cells().map(|(l, r, v)| v * (r - l)).collect();
    let len: Vec<f64> = f.cells().map(|(l, r, _)| r - l).collect();
    Ok((q, f, mass, len))
}

/// `sup { ∫|f|h : 0 ≤ h nonincreasing, ‖h‖_{X′} ≤ 1 }` for `X′ = Lq`.
pub fn down_norm(f: &StepFunction, xprime: &SpaceSpec) -> Result<DownNorm> {
    let (q, f, mass, len) = down_setup(f, xprime)?;
    let domain = f.domain();
    let bp = f.breakpoints().to_vec();
    if q.is_infinite() {
        let total: f64 = mass.iter().sum();
        return Ok(DownNorm {
            value: NormValue::exact(total),
            witness: StepFunction::constant(domain, 1.0)?,
        });
    }
    if q == 1.0 {
        // extreme points (1/t)χ[0,t]; F(t)/t is monotone on each cell
        let mut acc = 0.0;
        let (mut best, mut arg) = (0.0, bp[1]);
        for (k, m) in mass.iter().enumerate() {
            acc += m;
            let t = bp[k + 1];
            if acc / t > best {
                best = acc / t;
                arg = t;
            }
        }
        return Ok(DownNorm {
            value: NormValue::exact(best),
            witness: StepFunction::indicator(domain, 0.0, arg, 1.0 / arg)?,
        });
    }
    let y: Vec<f64> = mass.iter().zip(&len).map(|(m, l)| m / l).collect();
    let iso = isotonic_decreasing(&y, &len);
    let h: Vec<f64> = iso.iter().map(|v| v.max(0.0).powf(1.0 / (q - 1.0))).collect();
    let nq: f64 = h.iter().zip(&len).map(|(h, l)| l * h.powf(q)).sum::<f64>().powf(1.0 / q);
    if nq == 0.0 {
        return Ok(DownNorm {
            value: NormValue::exact(0.0),
            witness: StepFunction::zero(domain),
        });
    }
    let h: Vec<f64> = h.into_iter().map(|v| v / nq).collect();
    let value: f64 = h.iter().zip(&mass).map(|(h, m)| h * m).sum();
    Ok(DownNorm {
        value: NormValue::exact(value),
        witness: StepFunction::new(domain, bp, h)?,
    })
}

/// Same supremum by projected ascent over the nonincreasing cone.
pub fn down_norm_ascent(f: &StepFunction, xprime: &SpaceSpec) -> Result<NormValue> {
    let (q, _, mass, len) = down_setup(f, xprime)?;
    if !(q > 1.0 && q.is_finite()) {
        return unsupported("ascent needs 1 < q < ∞");
    }
    // reversing turns nonincreasing h into a nondecreasing variable
    let c: Vec<f64> = mass.iter().rev().cloned().collect();
    let mu: Vec<f64> = len.iter().rev().cloned().collect();
    let (opt, conv) = monotone_cone_ascent(&c, &mu, q, &c, ASCENT_MAX_ITER)?;
    let exact = down_norm(f, xprime)?.value.value;
    ascent_report(opt.value, Some(exact), conv)
}

// ---------------------------------------------------------------------------
// Sinnamon's supremum

#[derive(Debug, Clone, Serialize)]
pub struct MajorizationWitness {
    pub h: Element,
    pub objective: f64,
    /// `min_u (∫₀ᵘ f − ∫₀ᵘ h)`.
    pub constraint_slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SinnamonResult {
    pub lp_value: f64,
    pub closed_form: f64,
    pub witness: MajorizationWitness,
}

/// `sup_{h ≺ f} ∫ h g` by linear programming next to `∫ f g̃`.
pub fn sinnamon_sup(f: &Element, g: &Element) -> Result<SinnamonResult> {
    match (f, g) {
        (Element::Function(f), Element::Function(g)) => sinnamon_functions(f, g),
        (Element::Sequence(f), Element::Sequence(g)) => sinnamon_sequences(f, g),
        _ => Err(CesError::DomainMismatch("mixing a function and a sequence".into())),
    }
}

fn solve_majorization(f_mass: &[f64], gains: &[f64]) -> Result<(lp::LpSolution, Vec<f64>)> {
    let mut caps = Vec::with_capacity(f_mass.len());
    let mut acc = 0.0;
    for m in f_mass {
        acc += m;
        caps.push(acc);
    }
    let sol = lp::cumulative_cap_lp(gains, &caps)?;
    Ok((sol, caps))
}

fn slack(caps: &[f64], masses: &[f64]) -> f64 {
    let mut acc = 0.0;
    let mut worst = 0.0f64;
    for (c, m) in caps.iter().zip(masses) {
        acc += m;
        worst = worst.min(c - acc);
    }
    worst
}

fn sinnamon_functions(f: &StepFunction, g: &StepFunction) -> Result<SinnamonResult> {
    if !f.is_nonnegative() || !g.is_nonnegative() {
        return invalid("both functions must be nonnegative");
    }
    let (mut fa, mut ga) = f.align(g)?;
    if fa.domain().kind() == DomainKind::HalfLine && fa.horizon() != ga.horizon() {
        let h = fa.horizon().max(ga.horizon());
        fa = fa.extend_to(h)?;
        ga = ga.extend_to(h)?;
        let (a, b) = fa.align(&ga)?;
        fa = a;
        ga = b;
    }
    let len: Vec<f64> = fa.cells().map(|(l, r, _)| r - l).collect();
    let f_mass: Vec<f64> = fa.cells().map(|(l, r, v)| v * (r - l)).collect();
    let (sol, caps) = solve_majorization(&f_mass, ga.values())?;
    let h_vals: Vec<f64> = sol.x.iter().zip(&len).map(|(m, l)| m / l).collect();
    let h = StepFunction::new(fa.domain(), fa.breakpoints().to_vec(), h_vals)?;
    let gt = majorant(&ga).refine_to(fa.breakpoints())?;
    let closed_form: f64 = f_mass.iter().zip(gt.values()).map(|(m, v)| m * v).sum();
    Ok(SinnamonResult {
        lp_value: sol.value,
        closed_form,
        witness: MajorizationWitness {
            objective: sol.value,
            constraint_slack: slack(&caps, &sol.x),
            h: Element::Function(h),
        },
    })
}

fn sinnamon_sequences(f: &Sequence, g: &Sequence) -> Result<SinnamonResult> {
    if !f.is_nonnegative() || !g.is_nonnegative() {
        return invalid("both sequences must be nonnegative");
    }
    let n = f.len().max(g.len());
    let fv = f.padded(n);
    let gv = g.padded(n);
    let (sol, caps) = solve_majorization(&fv, &gv)?;
    let gt = majorant_seq(g).padded(n);
    let closed_form: f64 = fv.iter().zip(&gt).map(|(a, b)| a * b).sum();
    Ok(SinnamonResult {
        lp_value: sol.value,
        closed_form,
        witness: MajorizationWitness {
            objective: sol.value,
            constraint_slack: slack(&caps, &sol.x),
            h: Element::Sequence(Sequence::new(sol.x.clone())?),
        },
    })
}

// ---------------------------------------------------------------------------
// helpers shared with the reports

/// `‖g̃‖_{Lq(w)}` on the same domain.
pub fn majorant_norm(g: &StepFunction, q: f64, w: &Weight) -> NormValue {
    lp_norm(&majorant(&g.abs()), w, q)
}

/// Exact `‖g‖_{(C Lp(w))′}` for a step function.
pub fn cesaro_lp_dual(g: &StepFunction, p: f64, w: &Weight) -> Result<NormValue> {
    Ok(cesaro_lp_dual_function(g, p, w)?.0)
}

/// Convenience for a domain-aware `Lp(w)` spec.
pub fn lp_spec(p: f64, w: Weight, domain: &Domain) -> SpaceSpec {
    SpaceSpec::lp(p, w, domain.kind())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half(h: f64) -> Domain {
        Domain::half_line(h).unwrap()
    }

    #[test]
    fn holder_conjugates() {
        let g = Element::Sequence(Sequence::new(vec![3.0, 4.0]).unwrap());
        let v = associate_norm(&g, &SpaceSpec::seq_lp(2.0, SeqWeight::Power(0.0)), DualMethod::Exact).unwrap();
        assert_eq!(v.value, 5.0);
        let g = Element::Sequence(Sequence::new(vec![1.0, 2.0]).unwrap());
        let v = associate_norm(&g, &SpaceSpec::seq_lp(1.0, SeqWeight::Power(0.0)), DualMethod::Exact).unwrap();
        assert_eq!(v.value, 2.0);
    }

    #[test]
    fn cone_p1_matches_rays() {
        let opt = monotone_cone_sup(&[1.0, -0.5, 2.0], &[1.0, 1.0, 4.0], 1.0).unwrap();
        // rays: (2.5/6), (1.5/5), (2/4)
        assert!((opt.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn trailing_free_variable_gives_infinity() {
        let opt = monotone_cone_sup(&[1.0, 1.0], &[1.0, 0.0], 2.0).unwrap();
        assert!(opt.value.is_infinite());
        let opt = monotone_cone_sup(&[1.0, 0.0], &[1.0, 0.0], 2.0).unwrap();
        assert!((opt.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn first_unit_vector_against_ces_infinity() {
        let e1 = Sequence::unit(1);
        let v = cesaro_dual_norm(&e1, &SpaceSpec::seq_lp(f64::INFINITY, SeqWeight::Power(0.0))).unwrap();
        assert!((v.value - 1.0).abs() < 1e-15);
        assert_eq!(cesaro_dual_norm(&Sequence::zero(), &SpaceSpec::seq_lp(2.0, SeqWeight::Power(0.0))).unwrap().value, 0.0);
    }

    #[test]
    fn down_norm_of_unit_block_in_l1() {
        let f = StepFunction::indicator(half(1.0), 0.0, 1.0, 1.0).unwrap();
        let d = down_norm(&f, &SpaceSpec::lp(1.0, Weight::one(), DomainKind::HalfLine)).unwrap();
        assert_eq!(d.value.value, 1.0);
    }

    #[test]
    fn sinnamon_small_examples() {
        let f = StepFunction::indicator(half(2.0), 0.0, 1.0, 1.0).unwrap();
        let g = StepFunction::indicator(half(2.0), 1.0, 2.0, 1.0).unwrap();
        let r = sinnamon_sup(&f.clone().into(), &g.clone().into()).unwrap();
        assert!((r.lp_value - 1.0).abs() < 1e-12 && (r.closed_form - 1.0).abs() < 1e-12);
        let f2 = StepFunction::indicator(half(2.0), 0.0, 2.0, 1.0).unwrap();
        let r = sinnamon_sup(&f2.into(), &g.into()).unwrap();
        assert!((r.lp_value - 2.0).abs() < 1e-12 && (r.closed_form - 2.0).abs() < 1e-12);
        assert!(r.witness.constraint_slack >= -1e-12);
    }
}
