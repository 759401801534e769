//! Numerical checks of the Hardy-type inequalities behind Cesàro duality.
//!
//! Every check reports both sides, the constant it used and where the
//! constant came from. A check passes when `lhs ≤ rhs·(1 + tol)`.

use std::f64::consts::E;

use serde::Serialize;

use crate::duality::{conjugate, log_grid_min, unit_hardy_constant, Provenance};
use crate::error::{invalid, CesError, Result};
use crate::function::{Domain, DomainKind, StepFunction};
use crate::norms::{lp_norm, norm, ser_extended};
use crate::operators::{cesaro, cesaro_seq, cesaro_twice, d_of, substitution_t};
use crate::sampling::{par_samples, random_step, Family, StepOptions};
use crate::sequence::Sequence;
use crate::space::SpaceSpec;
use crate::weight::Weight;

/// Default relative slack on the right-hand side.
pub const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    #[serde(serialize_with = "ser_extended")]
    pub lhs: f64,
    #[serde(serialize_with = "ser_extended")]
    pub rhs: f64,
    #[serde(serialize_with = "ser_extended")]
    pub constant_used: f64,
    pub provenance: Provenance,
    /// `rhs − lhs`; `+∞` when the right side diverges.
    #[serde(serialize_with = "ser_extended")]
    pub margin: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl InequalityCheck {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, constant_used: f64, provenance: Provenance) -> InequalityCheck {
        InequalityCheck::with_tol(name, lhs, rhs, constant_used, provenance, CHECK_TOL)
    }

    pub fn with_tol(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        constant_used: f64,
        provenance: Provenance,
        tol: f64,
    ) -> InequalityCheck {
        let (margin, pass) = if rhs == f64::INFINITY {
            (f64::INFINITY, true)
        } else {
            (rhs - lhs, lhs <= rhs * (1.0 + tol))
        };
        InequalityCheck {
            name: name.into(),
            lhs,
            rhs,
            constant_used,
            provenance,
            margin,
            pass,
            note: String::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> InequalityCheck {
        self.note = note.into();
        self
    }

    /// `lhs/rhs`, with `0/0 = 0`.
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

/// Worst check of a batch by `lhs/rhs`; any failure wins.
fn worst(checks: Vec<InequalityCheck>) -> Option<InequalityCheck> {
    checks.into_iter().reduce(|a, b| {
        let key = |c: &InequalityCheck| (!c.pass, c.ratio());
        if key(&b) > key(&a) {
            b
        } else {
            a
        }
    })
}

fn require_nonnegative(f: &StepFunction) -> Result<()> {
    if f.is_nonnegative() {
        Ok(())
    } else {
        invalid("the inequality is stated for f ≥ 0")
    }
}

/// `‖Cf‖_p ≤ p′‖f‖_p` on the domain of `f`.
pub fn check_hardy_classical(f: &StepFunction, p: f64) -> Result<InequalityCheck> {
    if !(p > 1.0) {
        if p == 1.0 && f.domain().is_half_line() {
            return Err(CesError::InvalidInput("C is unbounded on L1 of the half-line".into()));
        }
        return invalid(format!("p must lie in (1, ∞], got {p}"));
    }
    require_nonnegative(f)?;
    let k = conjugate(p);
    let k = if p.is_infinite() { 1.0 } else { k };
    let x = SpaceSpec::lp(p, Weight::one(), f.domain().kind());
    let lhs = norm(f, &SpaceSpec::cesaro(x.clone()))?.value;
    let rhs = k * norm(f, &x)?.value;
    Ok(InequalityCheck::new("hardy", lhs, rhs, k, Provenance::Stated))
}

/// `‖Cf‖_{Lp(x^α)} ≤ (1 − α − 1/p)^{−1}‖f‖_{Lp(x^α)}`.
///
/// The note carries the operator norm with the exponent `−p` as printed
/// alongside the classical constant, so the two can be compared.
pub fn check_hardy_power(f: &StepFunction, p: f64, alpha: f64) -> Result<InequalityCheck> {
    if !(p >= 1.0) {
        return invalid(format!("p must be at least 1, got {p}"));
    }
    let ip = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let margin = 1.0 - alpha - ip;
    if !(margin > 0.0) {
        return invalid(format!("need alpha < 1 - 1/p, got alpha = {alpha}, p = {p}"));
    }
    require_nonnegative(f)?;
    let k = 1.0 / margin;
    let x = SpaceSpec::lp(p, Weight::Power(alpha), f.domain().kind());
    let lhs = norm(f, &SpaceSpec::cesaro(x.clone()))?.value;
    let rhs = k * norm(f, &x)?.value;
    let printed = margin.powf(-p);
    Ok(InequalityCheck::new("hardy-power", lhs, rhs, k, Provenance::Derived)
        .with_note(format!("printed constant (1-alpha-1/p)^(-p) = {printed}")))
}

/// `‖x^γ χ[0,1]‖` ratio in closed form, `γ = −α − 1/p + ε`: approaches the
/// Hardy constant `(1 − α − 1/p)^{−1}` as `ε → 0`.
pub fn hardy_power_extremal_ratio(p: f64, alpha: f64, eps: f64) -> f64 {
    let gamma = -alpha - 1.0 / p + eps;
    let tail = 1.0 / ((1.0 - alpha) * p - 1.0);
    (1.0 + eps * p * tail).powf(1.0 / p) / (gamma + 1.0)
}

/// Step approximation of `x^γ χ[0,1]`, `γ = −α − 1/p + ε`, with exact cell
/// averages on a geometric grid down to `1e-12`.
pub fn hardy_extremal_step(p: f64, alpha: f64, eps: f64, cells: usize, domain: Domain) -> Result<StepFunction> {
    let gamma = -alpha - 1.0 / p + eps;
    let n = cells.max(2);
    let lo: f64 = 1e-12;
    let mut bp = vec![0.0];
    bp.extend((0..n).map(|i| lo.powf(1.0 - i as f64 / (n - 1) as f64)));
    let antider = |x: f64| x.powf(gamma + 1.0) / (gamma + 1.0);
    let mut vals: Vec<f64> = bp.windows(2).map(|w| (antider(w[1]) - antider(w[0])) / (w[1] - w[0])).collect();
    if domain.horizon() > 1.0 {
        bp.push(domain.horizon());
        vals.push(0.0);
    }
    StepFunction::new(domain, bp, vals)
}

/// `∫₀¹[Cf·x^α]^p ≤ C_{p,α}^p ∫₀¹[(1 − x)f·x^α]^p` with the printed constant.
/// For `p = 1` the constant is `max(1, −α)/(−α)`.
pub fn check_hardy_unit_weighted(f: &StepFunction, p: f64, alpha: f64) -> Result<InequalityCheck> {
    if f.domain() != Domain::UnitInterval {
        return Err(CesError::DomainMismatch("the weighted Hardy inequality lives on [0, 1]".into()));
    }
    if !(p >= 1.0 && p.is_finite()) || !(alpha < 1.0 - 1.0 / p) {
        return invalid(format!("need 1 <= p < inf and alpha < 1 - 1/p, got p = {p}, alpha = {alpha}"));
    }
    require_nonnegative(f)?;
    let c = unit_hardy_constant(p, alpha);
    let x = SpaceSpec::lp(p, Weight::Power(alpha), DomainKind::UnitInterval);
    let lhs = norm(f, &SpaceSpec::cesaro(x))?.value.powf(p);
    let w = Weight::Product(vec![Weight::Power(alpha), Weight::OneMinusX]);
    let rhs = c.powf(p) * lp_norm(f, &w, p).value.powf(p);
    Ok(InequalityCheck::new("hardy-unit-weighted", lhs, rhs, c, Provenance::Stated))
}

/// The constant the proof of the weighted inequality actually yields,
/// `p/q·max(1, q)` with `q = p − αp − 1`. It differs from the printed
/// `p/q·max(1, q)^{1/p}` when `q > 1`, where it equals the sharp value `p`.
pub fn unit_hardy_constant_from_proof(p: f64, alpha: f64) -> f64 {
    if p == 1.0 {
        return unit_hardy_constant(p, alpha);
    }
    let q = p - alpha * p - 1.0;
    p / q * q.max(1.0)
}

/// As [`check_hardy_unit_weighted`] with a caller-supplied constant.
pub fn check_hardy_unit_weighted_with(
    f: &StepFunction,
    p: f64,
    alpha: f64,
    c: f64,
    provenance: Provenance,
) -> Result<InequalityCheck> {
    let mut check = check_hardy_unit_weighted(f, p, alpha)?;
    let scale = (c / check.constant_used).powf(p);
    Ok(InequalityCheck::new(check.name.split_off(0), check.lhs, check.rhs * scale, c, provenance))
}

/// Step approximation of `(1 − x)^{−γ}` on `[start, 1 − δ]` with exact cell
/// averages on a geometric grid in `1 − x`; zero elsewhere. For `γ` near
/// `1 + 1/p` it drives the weighted inequality towards its sharp constant `p`.
pub fn hardy_unit_edge_step(gamma: f64, start: f64, delta: f64, cells: usize) -> Result<StepFunction> {
    if !(0.0 <= start && start < 1.0 - delta && delta > 0.0) {
        return invalid(format!("need 0 <= start < 1 - delta, got start = {start}, delta = {delta}"));
    }
    let n = cells.max(1);
    let (y0, y1) = (1.0 - start, delta);
    let ys: Vec<f64> = (0..=n).map(|i| y0 * (y1 / y0).powf(i as f64 / n as f64)).collect();
    // antiderivative in y = 1 − x of y^(−γ)
    let prim = |y: f64| if gamma == 1.0 { y.ln() } else { y.powf(1.0 - gamma) / (1.0 - gamma) };
    let mut bp = vec![0.0];
    let mut vals = vec![];
    if start > 0.0 {
        bp.push(start);
        vals.push(0.0);
    }
    for w in ys.windows(2) {
        bp.push(1.0 - w[1]);
        vals.push((prim(w[0]) - prim(w[1])) / (w[0] - w[1]));
    }
    bp.push(1.0);
    vals.push(0.0);
    StepFunction::new(Domain::UnitInterval, bp, vals)
}

/// `‖Cf‖_{Lp[0,1]} ≤ A‖(1 − x)f‖_p` with `A = min(2(p′ + 2p), 2(p′ + p))`.
pub fn check_am_weighted(f: &StepFunction, p: f64) -> Result<InequalityCheck> {
    if f.domain() != Domain::UnitInterval {
        return Err(CesError::DomainMismatch("this inequality lives on [0, 1]".into()));
    }
    if !(p > 1.0 && p.is_finite()) {
        return invalid(format!("p must lie in (1, ∞), got {p}"));
    }
    require_nonnegative(f)?;
    let q = conjugate(p);
    let a = (2.0 * (q + 2.0 * p)).min(2.0 * (q + p));
    let x = SpaceSpec::lp(p, Weight::one(), DomainKind::UnitInterval);
    let lhs = norm(f, &SpaceSpec::cesaro(x))?.value;
    let rhs = a * lp_norm(f, &Weight::OneMinusX, p).value;
    Ok(InequalityCheck::new("am-weighted", lhs, rhs, a, Provenance::Derived))
}

/// `Cf(x/a) ≤ (a/ln a)·C²f(x)` at every grid point; returns the worst point.
pub fn check_curbera_ricker_cont(f: &StepFunction, a: f64, grid: &[f64]) -> Result<InequalityCheck> {
    Ok(worst(curbera_ricker_points(f, a, grid)?).unwrap_or_else(|| {
        InequalityCheck::new("curbera-ricker", 0.0, 0.0, a / a.ln(), Provenance::Stated)
    }))
}

/// One check per grid point.
pub fn curbera_ricker_points(f: &StepFunction, a: f64, grid: &[f64]) -> Result<Vec<InequalityCheck>> {
    if !(a > 1.0) {
        return invalid(format!("a must exceed 1, got {a}"));
    }
    require_nonnegative(f)?;
    if let Some(x) = grid.iter().find(|x| !(**x > 0.0)) {
        return invalid(format!("grid points must be positive, got {x}"));
    }
    let cf = cesaro(f);
    let ccf = cesaro_twice(f);
    let k = a / a.ln();
    Ok(grid
        .iter()
        .map(|&x| {
            InequalityCheck::new(format!("curbera-ricker x={x}"), cf.eval(x / a), k * ccf.eval(x), k, Provenance::Stated)
        })
        .collect())
}

/// `Σ_{j≤n} x_{[(j+2)/3]} ≤ 3Σ_{j≤[(n+1)/2]} x_j ≤ 12Σ_{j≤n}(Cx)_j`.
pub fn check_curbera_ricker_seq(x: &Sequence, n: usize) -> Result<[InequalityCheck; 2]> {
    if !x.is_nonnegative() {
        return invalid("the inequality is stated for x ≥ 0");
    }
    if n == 0 {
        return invalid("n must be positive");
    }
    let left: f64 = (1..=n).map(|j| x.get((j + 2) / 3)).sum();
    let middle: f64 = 3.0 * (1..=n.div_ceil(2)).map(|j| x.get(j)).sum::<f64>();
    let right: f64 = 12.0 * cesaro_seq(x, n.max(x.len()))?[..n].iter().sum::<f64>();
    Ok([
        InequalityCheck::new(format!("majorseq-left n={n}"), left, middle, 3.0, Provenance::Stated),
        InequalityCheck::new(format!("majorseq-right n={n}"), middle, right, 12.0, Provenance::Stated),
    ])
}

/// `∫₀^{t/d(t)}|f| ≤ ∫₀ᵗ C|f|(x)/(1 − x) dx` with `d(t) = t + e − et`.
pub fn check_d_lemma(f: &StepFunction, t: f64) -> Result<InequalityCheck> {
    if !(t > 0.0 && t < 1.0) {
        return invalid(format!("t must lie in (0, 1), got {t}"));
    }
    let g = f.abs();
    let lhs = g.partial_integral().eval(t / d_of(t));
    let rhs = cesaro_over_one_minus_x(&g, t);
    Ok(InequalityCheck::new(format!("d-lemma t={t}"), lhs, rhs, 1.0, Provenance::Stated))
}

/// `∫₀ᵗ Cg(x)/(1 − x) dx` for `t < 1`, cell by cell in closed form.
fn cesaro_over_one_minus_x(g: &StepFunction, t: f64) -> f64 {
    let cg = cesaro(g);
    let mut acc = 0.0;
    for &(l, r, piece) in &cg.as_piecewise().cells {
        if l >= t {
            break;
        }
        let r = r.min(t);
        // ∫ dx/(1−x) = ln((1−l)/(1−r)),  ∫ dx/(x(1−x)) = ln(r/l) + ln((1−l)/(1−r))
        let log_ratio = (-l).ln_1p() - (-r).ln_1p();
        acc += piece.b * log_ratio;
        if piece.a != 0.0 {
            acc += piece.a * ((r / l).ln() + log_ratio);
        }
    }
    acc
}

/// `‖Th‖ ≤ e‖h‖` in `L∞(1/(1−x))` and in `L¹(1/(1−x))`.
pub fn check_t_endpoint_bounds(h: &StepFunction) -> Result<[InequalityCheck; 2]> {
    let th = substitution_t(h)?;
    let w = Weight::OneMinusXInv;
    let inf = InequalityCheck::new(
        "t-endpoint-linf",
        lp_norm(&th, &w, f64::INFINITY).value,
        E * lp_norm(h, &w, f64::INFINITY).value,
        E,
        Provenance::Stated,
    );
    let one = InequalityCheck::new("t-endpoint-l1", lp_norm(&th, &w, 1.0).value, E * lp_norm(h, &w, 1.0).value, E, Provenance::Stated);
    Ok([inf, one])
}

/// `1 − t^q ≤ max(1, q)(1 − t)` on `n + 1` equispaced points of `[0, 1]`;
/// returns the worst point.
pub fn check_bernoulli(q: f64, n: usize) -> Result<InequalityCheck> {
    if !(q > 0.0) {
        return invalid(format!("q must be positive, got {q}"));
    }
    let k = q.max(1.0);
    let checks = (0..=n.max(1))
        .map(|i| {
            let t = i as f64 / n.max(1) as f64;
            InequalityCheck::new(format!("bernoulli t={t}"), 1.0 - t.powf(q), k * (1.0 - t), k, Provenance::Stated)
        })
        .collect();
    Ok(worst(checks).expect("grid is nonempty"))
}

#[derive(Debug, Clone, Serialize)]
pub struct IdempotencyReport {
    pub p: f64,
    pub samples: usize,
    pub seed: u64,
    /// `‖C²f‖_p ≤ p′‖Cf‖_p`, one per sample.
    pub upper: Vec<InequalityCheck>,
    /// `‖Cf‖_p ≤ (e/p′)‖C²f‖_p`, one per sample.
    pub lower: Vec<InequalityCheck>,
    pub max_upper_ratio: f64,
    pub max_lower_ratio: f64,
    /// `min_a a^{1/p′}/ln a` on the log grid and its minimizer.
    pub grid_min: f64,
    pub grid_argmin: f64,
    /// `e/p′`.
    pub closed_form: f64,
    pub grid_rel_error: f64,
    pub pass: bool,
}

/// Both embeddings between `CLp` and `C²Lp` on the half-line, on random `f`.
pub fn check_idempotency(p: f64, samples: usize, seed: u64) -> Result<IdempotencyReport> {
    if !(p > 1.0 && p.is_finite()) {
        return invalid(format!("p must lie in (1, ∞), got {p}"));
    }
    let q = conjugate(p);
    let closed_form = E / q;
    let x = SpaceSpec::lp(p, Weight::one(), DomainKind::HalfLine);
    let c1 = SpaceSpec::cesaro(x.clone());
    let c2 = SpaceSpec::cesaro(c1.clone());
    let opts = StepOptions::default();
    let pairs = par_samples(samples, seed, |i, rng| -> Result<(InequalityCheck, InequalityCheck)> {
        let f = random_step(rng, DomainKind::HalfLine, Family::for_index(i), &opts);
        let n1 = norm(&f, &c1)?.value;
        let n2 = norm(&f, &c2)?.value;
        Ok((
            InequalityCheck::new(format!("cc-into-c sample={i}"), n2, q * n1, q, Provenance::Stated),
            InequalityCheck::new(format!("c-into-cc sample={i}"), n1, closed_form * n2, closed_form, Provenance::Stated),
        ))
    });
    let (upper, lower): (Vec<_>, Vec<_>) = pairs.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    let (grid_min, grid_argmin) = log_grid_min(|a| a.powf(1.0 / q) / a.ln());
    let grid_rel_error = (grid_min - closed_form).abs() / closed_form;
    let max_ratio = |v: &[InequalityCheck]| v.iter().map(|c| c.ratio()).fold(0.0, f64::max);
    let pass = upper.iter().chain(&lower).all(|c| c.pass) && grid_rel_error <= 0.01;
    Ok(IdempotencyReport {
        p,
        samples,
        seed,
        max_upper_ratio: max_ratio(&upper),
        max_lower_ratio: max_ratio(&lower),
        upper,
        lower,
        grid_min,
        grid_argmin,
        closed_form,
        grid_rel_error,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_one() -> StepFunction {
        StepFunction::constant(Domain::UnitInterval, 1.0).unwrap()
    }

    #[test]
    fn hardy_on_a_block() {
        let f = StepFunction::constant(Domain::half_line(1.0).unwrap(), 1.0).unwrap();
        let c = check_hardy_classical(&f, 2.0).unwrap();
        assert!((c.lhs - 2f64.sqrt()).abs() < 1e-12 && (c.rhs - 2.0).abs() < 1e-12 && c.pass);
        assert!(check_hardy_classical(&f, 1.0).is_err());
    }

    #[test]
    fn extremal_ratio_near_two() {
        let r = hardy_power_extremal_ratio(2.0, 0.0, 0.01);
        assert!((r - (2.0 / 0.51f64).sqrt()).abs() < 1e-12);
        let f = hardy_extremal_step(2.0, 0.0, 0.01, 400, Domain::half_line(1.0).unwrap()).unwrap();
        let c = check_hardy_classical(&f, 2.0).unwrap();
        assert!(c.pass && c.ratio() * c.constant_used > 1.9, "{}", c.ratio());
    }

    #[test]
    fn unit_weighted_fixture() {
        let c = check_hardy_unit_weighted(&unit_one(), 2.0, 0.0).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-12);
        assert!((c.rhs - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(unit_hardy_constant(1.0, -0.5), 2.0);
        assert!(check_hardy_unit_weighted(&unit_one(), 2.0, 0.5).is_err());
    }

    #[test]
    fn am_fixture() {
        let c = check_am_weighted(&unit_one(), 2.0).unwrap();
        assert_eq!(c.constant_used, 8.0);
        assert!((c.ratio() * 8.0 - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn curbera_ricker_at_e() {
        let f = StepFunction::constant(Domain::half_line(1.0).unwrap(), 1.0).unwrap();
        let c = check_curbera_ricker_cont(&f, E, &[E]).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-12 && (c.rhs - 2.0).abs() < 1e-12);
    }

    #[test]
    fn majorseq_unit_vector() {
        let [l, r] = check_curbera_ricker_seq(&Sequence::unit(1), 3).unwrap();
        assert_eq!((l.lhs, l.rhs), (3.0, 3.0));
        assert!((r.rhs - 22.0).abs() < 1e-12);
        assert!(l.pass && r.pass);
    }

    #[test]
    fn d_lemma_fixture() {
        let c = check_d_lemma(&unit_one(), 0.5).unwrap();
        assert!((c.lhs - 1.0 / (1.0 + E)).abs() < 1e-14);
        assert!((c.rhs - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn t_bounds_and_bernoulli() {
        let h = StepFunction::indicator(Domain::UnitInterval, 0.0, 0.5, 1.0).unwrap();
        let [a, b] = check_t_endpoint_bounds(&h).unwrap();
        assert!(a.pass && b.pass);
        let c = check_bernoulli(0.5, 100).unwrap();
        assert!(c.pass && c.constant_used == 1.0);
    }

    #[test]
    fn idempotency_small() {
        let r = check_idempotency(2.0, 8, 3).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.grid_rel_error < 0.01);
    }
}
