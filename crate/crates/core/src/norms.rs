//! Norm evaluation for every space in the algebra.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{unsupported, CesError, Result};
use crate::function::{Domain, StepFunction};
use crate::operators::{cesaro, cesaro_piecewise, cesaro_seq_tailed, decreasing_rearrangement, majorant, majorant_seq};
use crate::piecewise::{Piece, PiecewiseFn};
use crate::quadrature::{integrate, integrate_left_singular, integrate_right_singular, integrate_tail, Quad};
use crate::sequence::{power_tail_sum, Sequence, TailedSeq};
use crate::space::{flatten_lp, SpaceSpec};
use crate::weight::{ConcaveGauge, SeqWeight, Weight};

/// Relative tolerance handed to the adaptive quadrature.
pub const QUAD_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    Optimization,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    #[serde(serialize_with = "ser_extended", deserialize_with = "de_extended")]
    pub value: f64,
    pub method: Method,
    pub error_bound: f64,
}

pub(crate) fn ser_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*v)
    }
}

pub(crate) fn de_extended<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Ext {
        Num(f64),
        Str(String),
    }
    match Ext::deserialize(d)? {
        Ext::Num(v) => Ok(v),
        Ext::Str(s) if s == "inf" => Ok(f64::INFINITY),
        Ext::Str(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
        Ext::Str(s) => Err(serde::de::Error::custom(format!("not a number: {s}"))),
    }
}

/// Serialize a list of extended reals (±∞ as strings).
pub(crate) fn ser_extended_slice<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct One(f64);
    impl Serialize for One {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            ser_extended(&self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for &x in v {
        seq.serialize_element(&One(x))?;
    }
    seq.end()
}

impl NormValue {
    pub fn exact(value: f64) -> NormValue {
        NormValue {
            value,
            method: Method::ClosedForm,
            error_bound: 0.0,
        }
    }

    pub fn infinite(method: Method) -> NormValue {
        NormValue {
            value: f64::INFINITY,
            method,
            error_bound: 0.0,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }

    pub fn scaled(self, c: f64) -> NormValue {
        NormValue {
            value: self.value * c,
            error_bound: self.error_bound * c,
            ..self
        }
    }
}

/// ∫ |P·w|^p over a region, with its error and the method used.
#[derive(Debug, Clone, Copy)]
struct Accum {
    value: f64,
    error: f64,
    method: Method,
}

impl Accum {
    fn new() -> Accum {
        Accum {
            value: 0.0,
            error: 0.0,
            method: Method::ClosedForm,
        }
    }

    fn add_exact(&mut self, v: f64) {
        self.value += v;
    }

    fn add_quad(&mut self, q: Quad) {
        self.value += q.value;
        self.error += q.error;
        self.method = self.method.max(Method::Quadrature);
    }
}

/// `∫_l^r x^e dx` for `0 ≤ l < r ≤ ∞` (caller guarantees convergence).
fn int_power(l: f64, r: f64, e: f64) -> f64 {
    if e == -1.0 {
        return (r / l).ln();
    }
    let k = e + 1.0;
    let rk = if r.is_infinite() { 0.0 } else { r.powf(k) };
    let lk = if l == 0.0 { 0.0 } else { l.powf(k) };
    (rk - lk) / k
}

/// `∫_l^r (1 − x)^e dx` for `0 ≤ l < r ≤ 1`.
fn int_one_minus_power(l: f64, r: f64, e: f64) -> f64 {
    if e == -1.0 {
        return ((1.0 - l) / (1.0 - r)).ln();
    }
    let k = e + 1.0;
    let a = (1.0 - l).powf(k);
    let b = if r == 1.0 { 0.0 } else { (1.0 - r).powf(k) };
    (a - b) / k
}

/// Cells of `g` (and its tail) refined at the weight's kinks. The right end
/// of the tail segment is `+∞`.
fn segments(g: &PiecewiseFn, w: &Weight) -> Vec<(f64, f64, Piece)> {
    let mut cuts = w.kinks();
    if w.exponent_at_one() != 0.0 {
        cuts.push(1.0);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    let mut push_split = |l: f64, r: f64, p: Piece| {
        let mut a = l;
        for &c in cuts.iter().filter(|&&c| c > l && c < r) {
            out.push((a, c, p));
            a = c;
        }
        out.push((a, r, p));
    };
    for &(l, r, p) in &g.cells {
        push_split(l, r, p);
    }
    if let (Domain::HalfLine { horizon }, Some(t)) = (g.domain, g.tail) {
        push_split(horizon, f64::INFINITY, t);
    }
    out
}

fn piece_scale(p: &Piece) -> f64 {
    p.b.abs() + p.a.abs() + p.c.abs() + p.d.abs()
}

/// `∫ |g·w|^p` over the whole domain (p finite). Returns +∞ on divergence.
fn lp_power_integral(g: &PiecewiseFn, w: &Weight, p: f64) -> Accum {
    let mut acc = Accum::new();
    for (l, r, piece) in segments(g, w) {
        if piece.is_zero() {
            continue;
        }
        let e0w = w.exponent_at_zero();
        let gamma = w.exponent_at_one();
        // singular behaviour at each end of the segment
        let beta0 = if l == 0.0 {
            let e = piece.exponent_at_zero().unwrap_or(0.0);
            p * (e + e0w)
        } else {
            0.0
        };
        let singular_right = r == 1.0 && gamma != 0.0;
        let beta1 = if singular_right {
            let at_one = piece.eval(1.0);
            if at_one.abs() <= 1e-13 * piece_scale(&piece) {
                p * (gamma + 1.0)
            } else {
                p * gamma
            }
        } else {
            0.0
        };
        let delta = if r.is_infinite() {
            p * (piece.exponent_at_inf().unwrap_or(-1.0) + w.exponent_at_inf())
        } else {
            0.0
        };
        if beta0 <= -1.0 || beta1 <= -1.0 || (r.is_infinite() && delta >= -1.0) {
            acc.value = f64::INFINITY;
            return acc;
        }
        let mid = if r.is_infinite() { 2.0 * l + 1.0 } else { 0.5 * (l + r) };
        if let Some(m) = w.monomial_at(mid) {
            if piece.is_constant() && m.gamma == 0.0 {
                acc.add_exact((piece.b.abs() * m.coef).powf(p) * int_power(l, r, m.alpha * p));
                continue;
            }
            if piece.is_constant() && m.alpha == 0.0 && r <= 1.0 {
                acc.add_exact((piece.b.abs() * m.coef).powf(p) * int_one_minus_power(l, r, m.gamma * p));
                continue;
            }
            if piece.b == 0.0 && piece.c == 0.0 && piece.d == 0.0 && m.gamma == 0.0 {
                acc.add_exact((piece.a.abs() * m.coef).powf(p) * int_power(l, r, (m.alpha - 1.0) * p));
                continue;
            }
        }
        let f = |x: f64| {
            let v = (piece.eval(x) * w.eval(x)).abs();
            if p == 1.0 {
                v
            } else {
                v.powf(p)
            }
        };
        // distance-to-1 form for the singular right end
        let fd = |y: f64| {
            let v = (piece.eval(1.0 - y) * w.eval_below_one(y)).abs();
            if p == 1.0 {
                v
            } else {
                v.powf(p)
            }
        };
        if r.is_infinite() {
            acc.add_quad(integrate_tail(&f, l, delta, QUAD_REL_TOL));
        } else if beta0 != 0.0 && singular_right {
            let m = 0.5 * (l + r);
            acc.add_quad(integrate_left_singular(&f, l, m, beta0, QUAD_REL_TOL));
            acc.add_quad(integrate_right_singular(&fd, m, r, beta1, QUAD_REL_TOL));
        } else if beta0 != 0.0 {
            acc.add_quad(integrate_left_singular(&f, l, r, beta0, QUAD_REL_TOL));
        } else if singular_right {
            acc.add_quad(integrate_right_singular(&fd, l, r, beta1, QUAD_REL_TOL));
        } else {
            acc.add_quad(integrate(&f, l, r, QUAD_REL_TOL));
        }
    }
    acc
}

/// `sup |g·w|` (p = ∞).
fn sup_norm(g: &PiecewiseFn, w: &Weight) -> NormValue {
    let mut best = 0.0f64;
    let mut method = Method::ClosedForm;
    for (l, r, piece) in segments(g, w) {
        if piece.is_zero() {
            continue;
        }
        let h = |x: f64| (piece.eval(x) * w.eval(x)).abs();
        // endpoint limits
        if l == 0.0 {
            let e = piece.exponent_at_zero().unwrap_or(0.0) + w.exponent_at_zero();
            if e < 0.0 {
                return NormValue::infinite(method);
            }
        }
        let gamma = w.exponent_at_one();
        if r == 1.0 && gamma < 0.0 {
            let at_one = piece.eval(1.0);
            let order = if at_one.abs() <= 1e-13 * piece_scale(&piece) { 1.0 } else { 0.0 };
            if gamma + order < 0.0 {
                return NormValue::infinite(method);
            }
        }
        if r.is_infinite() {
            let e = piece.exponent_at_inf().unwrap_or(-1.0) + w.exponent_at_inf();
            if e > 0.0 {
                return NormValue::infinite(method);
            }
        }
        let mid = if r.is_infinite() { 2.0 * l + 1.0 } else { 0.5 * (l + r) };
        let left = if l == 0.0 { h(r.min(1.0) * 1e-12) } else { h(l) };
        let mut cands = vec![left];
        let mono = w.monomial_at(mid);
        match mono {
            Some(m) if piece.is_rational() && (m.gamma == 0.0 || piece.is_constant()) => {
                if r.is_finite() {
                    cands.push(if r == 1.0 && gamma < 0.0 {
                        // finite limit at 1 only when the piece vanishes there
                        (piece.eval(1.0 - 1e-9) * w.eval_below_one(1e-9)).abs()
                    } else {
                        h(r)
                    });
                } else {
                    let e = piece.exponent_at_inf().unwrap_or(-1.0) + m.alpha;
                    if e == 0.0 {
                        cands.push(piece.a.abs() * m.coef);
                    }
                }
                if piece.is_constant() {
                    if m.alpha != 0.0 && m.gamma != 0.0 {
                        let s = m.alpha / (m.alpha + m.gamma);
                        if s > l && s < r {
                            cands.push(h(s));
                        }
                    }
                } else if m.alpha != 0.0 && piece.b != 0.0 {
                    // d/dx[(b + a/x)x^α] = 0  ⇒  x = (1 − α)a/(αb)
                    let s = (1.0 - m.alpha) * piece.a / (m.alpha * piece.b);
                    if s > l && s < r {
                        cands.push(h(s));
                    }
                }
            }
            _ => {
                method = Method::Optimization;
                let hi = if r.is_infinite() { l.max(1.0) * 1e6 } else { r };
                let lo = if l == 0.0 { hi * 1e-12 } else { l };
                let n = 512;
                let geometric = hi / lo > 100.0;
                let pts: Vec<f64> = (0..=n)
                    .map(|i| {
                        let t = i as f64 / n as f64;
                        if geometric {
                            lo * (hi / lo).powf(t)
                        } else {
                            lo + (hi - lo) * t
                        }
                    })
                    .collect();
                let (imax, _) = pts
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| (i, h(x)))
                    .fold((0, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
                let a = pts[imax.saturating_sub(1)];
                let b = pts[(imax + 1).min(n)];
                cands.push(golden_max(&h, a, b));
                cands.extend(pts.iter().map(|&x| h(x)));
            }
        }
        for c in cands {
            if c.is_finite() {
                best = best.max(c);
            }
        }
    }
    NormValue {
        value: best,
        method,
        error_bound: if method == Method::Optimization { 1e-9 * best } else { 0.0 },
    }
}

fn golden_max(h: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    for _ in 0..200 {
        if h(c) > h(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
        if (b - a).abs() < 1e-15 * b.abs().max(1e-300) {
            break;
        }
    }
    h(0.5 * (a + b))
}

/// `‖g‖_{Lp(w)} = ‖g·w‖_p` for a piecewise-analytic `g`.
pub fn lp_norm_piecewise(g: &PiecewiseFn, w: &Weight, p: f64) -> NormValue {
    if p.is_infinite() {
        return sup_norm(g, w);
    }
    let acc = lp_power_integral(g, w, p);
    if acc.value.is_infinite() {
        return NormValue::infinite(acc.method);
    }
    let value = acc.value.powf(1.0 / p);
    let error_bound = if acc.value > 0.0 {
        value * acc.error / (p * acc.value)
    } else {
        acc.error.powf(1.0 / p)
    };
    NormValue {
        value,
        method: acc.method,
        error_bound,
    }
}

/// `∫ |g·w|^p` directly (p finite); +∞ on divergence.
pub fn lp_power_integral_piecewise(g: &PiecewiseFn, w: &Weight, p: f64) -> (f64, f64) {
    let acc = lp_power_integral(g, w, p);
    (acc.value, acc.error)
}

pub fn lp_norm(f: &StepFunction, w: &Weight, p: f64) -> NormValue {
    lp_norm_piecewise(&PiecewiseFn::from_step(f), w, p)
}

/// `‖f‖_X`.
pub fn norm(f: &StepFunction, x: &SpaceSpec) -> Result<NormValue> {
    x.validate()?;
    x.check_domain(&f.domain())?;
    norm_unchecked(f, &x.normalized())
}

fn norm_unchecked(f: &StepFunction, x: &SpaceSpec) -> Result<NormValue> {
    if let Some((p, w, _)) = flatten_lp(x) {
        return Ok(lp_norm(f, &w, p));
    }
    match x {
        SpaceSpec::Cesaro(inner) => {
            let cf = cesaro(&f.abs());
            norm_piecewise(cf.as_piecewise(), inner)
        }
        SpaceSpec::Tilde(inner) => norm_unchecked(&majorant(f), inner),
        SpaceSpec::Weighted(inner, w) => match w {
            Weight::Explicit(s) => {
                let fw = f.mul(s)?;
                norm_unchecked(&fw, inner)
            }
            _ => unsupported(format!("weight {w} on {inner} (only step weights can be pushed inside)")),
        },
        SpaceSpec::Lorentz(g) => Ok(lorentz_norm(f, g)),
        SpaceSpec::Marcinkiewicz { gauge, starred } => Ok(marcinkiewicz_norm(f, gauge, *starred)),
        other => unsupported(format!("{other}")),
    }
}

/// Norm of a nonnegative piecewise function (an operator image) in `X`.
pub fn norm_piecewise(g: &PiecewiseFn, x: &SpaceSpec) -> Result<NormValue> {
    if let Some((p, w, _)) = flatten_lp(x) {
        return Ok(lp_norm_piecewise(g, &w, p));
    }
    match x {
        SpaceSpec::Cesaro(inner) => norm_piecewise(&cesaro_piecewise(g)?, inner),
        SpaceSpec::Lorentz(phi) => lorentz_norm_piecewise(g, phi),
        other => unsupported(format!("norm of an operator image in {other}")),
    }
}

/// `∫ f* dφ`, exact.
pub fn lorentz_norm(f: &StepFunction, phi: &ConcaveGauge) -> NormValue {
    let r = decreasing_rearrangement(f);
    let mut acc = 0.0;
    for (l, rr, v) in r.decreasing.cells() {
        if v == 0.0 {
            break;
        }
        acc += v * (phi.eval(rr) - phi.eval(l));
    }
    NormValue::exact(acc)
}

/// `‖g‖_{Λφ}` for a nonnegative function with `b + a/x` pieces, by the layer
/// cake formula `∫₀^∞ φ(|{g > λ}|) dλ`.
pub fn lorentz_norm_piecewise(g: &PiecewiseFn, phi: &ConcaveGauge) -> Result<NormValue> {
    if g.cells.iter().any(|c| !c.2.is_rational()) || g.tail.is_some_and(|t| !t.is_rational() || t.b != 0.0) {
        return unsupported("Lorentz norm of a function with logarithmic pieces");
    }
    let h = g.horizon();
    let tail_a = g.tail.map(|t| t.a).unwrap_or(0.0);
    let ends = || g.cells.iter().flat_map(|&(l, r, p)| [p.eval(if l == 0.0 { r } else { l }), p.eval(r)]);
    // cancellation in b + a/x can leave endpoint values a few ulps below zero
    let slack = -1e-12 * ends().fold(0.0, |m: f64, v| m.max(v.abs()));
    if ends().any(|v| v < slack) || tail_a < 0.0 {
        return unsupported("layer-cake evaluation needs a nonnegative function");
    }
    let dist = |lambda: f64| -> f64 {
        let mut m = 0.0;
        for &(l, r, p) in &g.cells {
            let gl = if l == 0.0 { p.b } else { p.eval(l) };
            let gr = p.eval(r);
            let above_l = gl > lambda;
            let above_r = gr > lambda;
            if above_l && above_r {
                m += r - l;
            } else if above_l || above_r {
                // crossing point of the monotone piece
                let x = (p.a / (lambda - p.b)).clamp(l, r);
                m += if above_l { x - l } else { r - x };
            }
        }
        if tail_a > 0.0 {
            m += (tail_a / lambda - h).max(0.0);
        }
        m
    };
    let mut levels: Vec<f64> = vec![0.0];
    for &(l, r, p) in &g.cells {
        levels.push(if l == 0.0 { p.b } else { p.eval(l) });
        levels.push(p.eval(r));
    }
    if tail_a > 0.0 {
        levels.push(tail_a / h);
    }
    levels.retain(|v| v.is_finite() && *v >= 0.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let top = *levels.last().unwrap();
    if top == 0.0 {
        return Ok(NormValue::exact(0.0));
    }
    let integrand = |lambda: f64| phi.eval(dist(lambda));
    let mut total = Quad::ZERO;
    for w in levels.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        if a == 0.0 && tail_a > 0.0 {
            // φ(A/λ) ≍ λ^(−e) near 0
            let e = phi.exponent_at_inf();
            if e >= 1.0 {
                return Ok(NormValue::infinite(Method::Quadrature));
            }
            total = total + integrate_left_singular(&integrand, a, b, -e, QUAD_REL_TOL);
        } else {
            total = total + integrate(&integrand, a, b, QUAD_REL_TOL);
        }
    }
    Ok(NormValue {
        value: total.value,
        method: Method::Quadrature,
        error_bound: total.error,
    })
}

/// `sup_t ∫₀ᵗ f*/φ(t)` (or `sup_t t·f*(t)/φ(t)` when `starred`), exact.
pub fn marcinkiewicz_norm(f: &StepFunction, phi: &ConcaveGauge, starred: bool) -> NormValue {
    let r = decreasing_rearrangement(f);
    let cells: Vec<(f64, f64, f64)> = r.decreasing.cells().filter(|c| c.2 > 0.0).collect();
    if cells.is_empty() {
        return NormValue::exact(0.0);
    }
    if starred {
        // t/φ(t) is nondecreasing, so each cell peaks at its right end
        let best = cells
            .iter()
            .map(|&(_, rr, v)| v * rr / phi.eval(rr))
            .fold(0.0, f64::max);
        return NormValue::exact(best);
    }
    let big_f = |t: f64| r.integral_to(t);
    let mut cands: Vec<f64> = cells.iter().map(|c| c.1).collect();
    cands.extend(phi.kinks());
    let mut best: f64 = 0.0;
    // t → 0
    match phi {
        ConcaveGauge::PiecewiseLinear { knots, .. } => {
            let s1 = knots[1].1 / knots[1].0;
            best = best.max(cells[0].2 / s1);
        }
        ConcaveGauge::Power { theta } => {
            // (α + βt)/t^θ on each cell: stationary at t = θα/((1 − θ)β)
            for &(l, _, v) in &cells {
                let alpha = big_f(l) - v * l;
                if alpha > 0.0 {
                    cands.push(theta * alpha / ((1.0 - theta) * v));
                }
            }
        }
    }
    for t in cands {
        if t > 0.0 && t.is_finite() {
            best = best.max(big_f(t) / phi.eval(t));
        }
    }
    NormValue::exact(best)
}

// ---------------------------------------------------------------------------
// sequences

pub(crate) fn flatten_seq_lp(x: &SpaceSpec) -> Option<(f64, SeqWeight)> {
    match x.normalized() {
        SpaceSpec::SeqLp { p, weight } => Some((p, weight)),
        SpaceSpec::SeqWeighted(inner, w) => {
            let (p, w0) = flatten_seq_lp(&inner)?;
            match SpaceSpec::SeqWeighted(Box::new(SpaceSpec::SeqWeighted(
                Box::new(SpaceSpec::SeqLp { p, weight: SeqWeight::Power(0.0) }),
                w0,
            )), w)
            .normalized()
            {
                SpaceSpec::SeqWeighted(_, combined) => Some((p, combined)),
                _ => None,
            }
        }
        _ => None,
    }
}

fn seq_lp_finite(x: &[f64], p: f64, w: &SeqWeight) -> NormValue {
    if p.is_infinite() {
        return NormValue::exact(
            x.iter()
                .enumerate()
                .map(|(i, v)| (v * w.eval(i + 1)).abs())
                .fold(0.0, f64::max),
        );
    }
    let s: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v * w.eval(i + 1)).abs().powf(p))
        .sum();
    NormValue::exact(s.powf(1.0 / p))
}

/// `‖t‖_{ℓp(w)}` for a sequence with a power tail, explicit up to four times
/// the head length and Euler–Maclaurin beyond.
pub fn tailed_seq_lp_norm(t: &TailedSeq, p: f64, w: &SeqWeight) -> NormValue {
    let n = t.head.len();
    if t.coef == 0.0 {
        return seq_lp_finite(&t.head, p, w);
    }
    let len = (4 * n).max(n + 1).max(w.tail_start());
    let head: Vec<f64> = (1..=len).map(|k| t.get(k)).collect();
    let e = t.exponent + w.exponent_at_inf();
    let c = (t.coef * w.tail_coef()).abs();
    if p.is_infinite() {
        if e > 0.0 {
            return NormValue::infinite(Method::ClosedForm);
        }
        let mut v = seq_lp_finite(&head, p, w).value;
        if e == 0.0 {
            v = v.max(c);
        }
        return NormValue::exact(v);
    }
    let s = -e * p;
    if s <= 1.0 {
        return NormValue::infinite(Method::ClosedForm);
    }
    let head_sum: f64 = head
        .iter()
        .enumerate()
        .map(|(i, v)| (v * w.eval(i + 1)).abs().powf(p))
        .sum();
    let (tail, tail_err) = power_tail_sum(len + 1, s);
    let total = head_sum + c.powf(p) * tail;
    let value = total.powf(1.0 / p);
    NormValue {
        value,
        method: Method::ClosedForm,
        error_bound: value * c.powf(p) * tail_err / (p * total) + value * 1e-15,
    }
}

/// `‖x‖_X` for a sequence space.
pub fn seq_norm(x: &Sequence, space: &SpaceSpec) -> Result<NormValue> {
    space.validate()?;
    if !space.is_sequence() {
        return Err(CesError::DomainMismatch("function space given a sequence".into()));
    }
    seq_norm_unchecked(x, &space.normalized())
}

fn seq_norm_unchecked(x: &Sequence, space: &SpaceSpec) -> Result<NormValue> {
    if let Some((p, w)) = flatten_seq_lp(space) {
        return Ok(seq_lp_finite(x.entries(), p, &w));
    }
    match space {
        SpaceSpec::SeqWeighted(inner, w) => {
            let xw = Sequence::new(
                x.entries()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * w.eval(i + 1))
                    .collect(),
            )?;
            seq_norm_unchecked(&xw, inner)
        }
        SpaceSpec::SeqTilde(inner) => seq_norm_unchecked(&majorant_seq(x), inner),
        SpaceSpec::SeqCesaro(inner) => {
            let t = cesaro_seq_tailed(&x.abs());
            match flatten_seq_lp(inner) {
                Some((p, w)) => Ok(tailed_seq_lp_norm(&t, p, &w)),
                None => unsupported(format!("Cesàro sequence norm over {inner}")),
            }
        }
        other => unsupported(format!("{other}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::DomainKind;

    fn half(h: f64) -> Domain {
        Domain::half_line(h).unwrap()
    }

    fn spec(s: &str) -> SpaceSpec {
        SpaceSpec::parse(s).unwrap()
    }

    #[test]
    fn unit_indicator_in_l2() {
        let f = StepFunction::constant(Domain::UnitInterval, 1.0).unwrap();
        let n = norm(&f, &spec("Lp 2 (pow 0) unit")).unwrap();
        assert_eq!(n.value, 1.0);
        assert_eq!(n.method, Method::ClosedForm);
    }

    #[test]
    fn cesaro_norm_of_unit_block() {
        // ‖χ[0,1]‖^p = 1 + 1/(p − 1)
        let f = StepFunction::indicator(half(1.0), 0.0, 1.0, 1.0).unwrap();
        for p in [1.5, 2.0, 3.0, 7.0] {
            let n = norm(&f, &SpaceSpec::cesaro(SpaceSpec::lp(p, Weight::one(), DomainKind::HalfLine))).unwrap();
            let expect = (1.0 + 1.0 / (p - 1.0)).powf(1.0 / p);
            assert!((n.value - expect).abs() < 1e-14, "p={p}: {} vs {expect}", n.value);
            assert_eq!(n.method, Method::ClosedForm);
        }
    }

    #[test]
    fn support_collapse_gives_infinity() {
        let x = spec("Ces(Wt((Lp 2 (pow 0) halfline) (maxinv1mx)))");
        let f = StepFunction::indicator(half(0.5), 0.0, 0.5, 1.0).unwrap();
        assert!(norm(&f, &x).unwrap().is_infinite());
        let g = StepFunction::indicator(half(3.0), 2.0, 3.0, 1.0).unwrap();
        let n = norm(&g, &x).unwrap();
        assert!(n.value.is_finite() && n.value > 0.0);
    }

    #[test]
    fn domain_mismatch_is_an_error() {
        let f = StepFunction::constant(Domain::UnitInterval, 1.0).unwrap();
        assert!(matches!(
            norm(&f, &spec("Lp 2 (pow 0) halfline")),
            Err(CesError::DomainMismatch(_))
        ));
        assert!(matches!(norm(&f, &spec("lp 2 (pow 0)")), Err(CesError::DomainMismatch(_))));
    }

    #[test]
    fn power_weight_matches_quadrature_path() {
        // x^α with α = −0.25 on [0, 2]; closed form vs an explicit integral
        let f = StepFunction::new(half(2.0), vec![0.0, 0.5, 2.0], vec![2.0, -1.0]).unwrap();
        let n = lp_norm(&f, &Weight::Power(-0.25), 2.0).value;
        let direct = 4.0 * 0.5f64.sqrt() / 0.5 + (2f64.sqrt() - 0.5f64.sqrt()) / 0.5;
        assert!((n * n - direct).abs() < 1e-13);
    }

    #[test]
    fn lorentz_examples() {
        let f = StepFunction::indicator(half(2.0), 0.0, 2.0, 1.0).unwrap();
        assert_eq!(lorentz_norm(&f, &ConcaveGauge::min_one()).value, 1.0);
        assert_eq!(lorentz_norm(&StepFunction::zero(half(1.0)), &ConcaveGauge::min_one()).value, 0.0);
        let g = StepFunction::indicator(half(4.0), 0.0, 0.5, 3.0).unwrap();
        assert_eq!(lorentz_norm(&g, &ConcaveGauge::min_one()).value, 1.5);
    }

    #[test]
    fn lorentz_of_cesaro_block() {
        // ‖Cχ[0,a]‖_Λ = a^θ/(1 − θ) for φ = t^θ
        for (a, theta) in [(1.0, 0.5), (2.5, 0.3), (0.4, 0.8)] {
            let phi = ConcaveGauge::power(theta).unwrap();
            let f = StepFunction::indicator(half(a), 0.0, a, 1.0).unwrap();
            let n = lorentz_norm_piecewise(cesaro(&f).as_piecewise(), &phi).unwrap();
            let expect = a.powf(theta) / (1.0 - theta);
            assert!((n.value - expect).abs() < 1e-9 * expect, "{} vs {expect}", n.value);
        }
    }

    #[test]
    fn marcinkiewicz_examples() {
        let f = StepFunction::indicator(half(1.0), 0.0, 1.0, 1.0).unwrap();
        let phi = ConcaveGauge::min_one();
        assert_eq!(marcinkiewicz_norm(&f, &phi, false).value, 1.0);
        assert_eq!(marcinkiewicz_norm(&f, &phi, true).value, 1.0);
        assert_eq!(marcinkiewicz_norm(&StepFunction::zero(half(1.0)), &phi, false).value, 0.0);
    }

    #[test]
    fn marcinkiewicz_power_gauge_matches_dense_scan() {
        let f = StepFunction::new(half(3.0), vec![0.0, 0.5, 1.0, 3.0], vec![1.0, 4.0, 0.5]).unwrap();
        let phi = ConcaveGauge::power(0.4).unwrap();
        let exact = marcinkiewicz_norm(&f, &phi, false).value;
        let r = decreasing_rearrangement(&f);
        let scan = (1..200000)
            .map(|i| i as f64 * 1e-4)
            .map(|t| r.integral_to(t) / phi.eval(t))
            .fold(0.0, f64::max);
        assert!(exact >= scan - 1e-12 && exact - scan < 1e-6);
    }

    #[test]
    fn sequence_examples() {
        let x = Sequence::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(seq_norm(&x, &spec("lp 2 (pow 0)")).unwrap().value, 5.0);
        let e1 = Sequence::unit(1);
        assert_eq!(seq_norm(&e1, &spec("ces(lp inf (pow 0))")).unwrap().value, 1.0);
        assert_eq!(seq_norm(&e1, &spec("tilde(lp 1 (pow 0))")).unwrap().value, 1.0);
        // ‖Ce_1‖_2² = π²/6
        let n = seq_norm(&e1, &spec("ces(lp 2 (pow 0))")).unwrap();
        let exact = std::f64::consts::PI / 6f64.sqrt();
        assert!((n.value - exact).abs() < 1e-13, "{}", n.value);
        assert!(n.error_bound < 1e-12);
        assert!(seq_norm(&e1, &spec("ces(lp 1 (pow 0))")).unwrap().is_infinite());
    }

    #[test]
    fn infinity_serializes_as_string() {
        let s = serde_json::to_string(&NormValue::infinite(Method::Quadrature)).unwrap();
        assert_eq!(s, r#"{"value":"inf","method":"quadrature","error_bound":0.0}"#);
        let back: NormValue = serde_json::from_str(&s).unwrap();
        assert!(back.is_infinite());
    }
}
