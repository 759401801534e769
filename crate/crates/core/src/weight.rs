//! Weights and concave gauges.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::function::{DomainKind, StepFunction};

/// Concave increasing `φ` on `[0, ∞)` with `φ(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ConcaveGauge {
    /// Linear interpolation of `knots` (the first knot is `(0, 0)`), then
    /// slope `final_slope` past the last knot.
    PiecewiseLinear {
        knots: Vec<(f64, f64)>,
        final_slope: f64,
    },
    /// `φ(t) = t^θ` with `0 < θ < 1`.
    Power { theta: f64 },
}

impl ConcaveGauge {
    pub fn piecewise_linear(knots: Vec<(f64, f64)>, final_slope: f64) -> Result<ConcaveGauge> {
        let g = ConcaveGauge::PiecewiseLinear { knots, final_slope };
        g.validate()?;
        Ok(g)
    }

    pub fn power(theta: f64) -> Result<ConcaveGauge> {
        let g = ConcaveGauge::Power { theta };
        g.validate()?;
        Ok(g)
    }

    /// `min(t, 1)`.
    pub fn min_one() -> ConcaveGauge {
        ConcaveGauge::PiecewiseLinear {
            knots: vec![(0.0, 0.0), (1.0, 1.0)],
            final_slope: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConcaveGauge::Power { theta } => {
                if !(*theta > 0.0 && *theta < 1.0) {
                    return invalid(format!("power gauge needs 0 < θ < 1, got {theta}"));
                }
            }
            ConcaveGauge::PiecewiseLinear { knots, final_slope } => {
                if knots.len() < 2 || knots[0] != (0.0, 0.0) {
                    return invalid("gauge knots must start at (0, 0) and have a second knot");
                }
                if knots.iter().any(|(t, p)| !t.is_finite() || !p.is_finite()) {
                    return invalid("gauge knots must be finite");
                }
                let mut prev_slope = f64::INFINITY;
                for w in knots.windows(2) {
                    let (t0, p0) = w[0];
                    let (t1, p1) = w[1];
                    if !(t1 > t0) || !(p1 > p0) {
                        return invalid("gauge knots must be strictly increasing");
                    }
                    let s = (p1 - p0) / (t1 - t0);
                    if s > prev_slope * (1.0 + 1e-12) {
                        return invalid("gauge slopes must be nonincreasing");
                    }
                    prev_slope = s;
                }
                if !(*final_slope >= 0.0) || *final_slope > prev_slope * (1.0 + 1e-12) {
                    return invalid("final slope must lie in [0, last slope]");
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t.is_infinite() {
            return match self {
                ConcaveGauge::Power { .. } => f64::INFINITY,
                ConcaveGauge::PiecewiseLinear { knots, final_slope } => {
                    if *final_slope > 0.0 {
                        f64::INFINITY
                    } else {
                        knots.last().unwrap().1
                    }
                }
            };
        }
        match self {
            ConcaveGauge::Power { theta } => t.powf(*theta),
            ConcaveGauge::PiecewiseLinear { knots, final_slope } => {
                let (tl, pl) = *knots.last().unwrap();
                if t >= tl {
                    return pl + final_slope * (t - tl);
                }
                let i = knots.partition_point(|&(k, _)| k <= t);
                let (t0, p0) = knots[i - 1];
                let (t1, p1) = knots[i];
                p0 + (p1 - p0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Interior knots (where the slope changes).
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            ConcaveGauge::Power { .. } => vec![],
            ConcaveGauge::PiecewiseLinear { knots, .. } => {
                knots.iter().skip(1).map(|k| k.0).collect()
            }
        }
    }

    /// Growth exponent of φ at infinity (φ(t) ≍ t^e).
    pub fn exponent_at_inf(&self) -> f64 {
        match self {
            ConcaveGauge::Power { theta } => *theta,
            ConcaveGauge::PiecewiseLinear { final_slope, .. } => {
                if *final_slope > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Exponent of φ near 0 (φ(t) ≍ t^e).
    pub fn exponent_at_zero(&self) -> f64 {
        match self {
            ConcaveGauge::Power { theta } => *theta,
            ConcaveGauge::PiecewiseLinear { .. } => 1.0,
        }
    }

    fn log_grid(&self) -> Vec<f64> {
        let (lo, hi) = match self {
            ConcaveGauge::Power { .. } => (1e-3, 1e3),
            ConcaveGauge::PiecewiseLinear { knots, .. } => {
                (knots[1].0 * 1e-6, knots.last().unwrap().0 * 1e6)
            }
        };
        let n = 4000;
        let mut g: Vec<f64> = (0..=n)
            .map(|i| lo * (hi / lo).powf(i as f64 / n as f64))
            .collect();
        g.extend(self.kinks());
        g.sort_by(f64::total_cmp);
        g
    }

    /// `∫₀ᵗ φ(s)/s ds`, exact.
    pub fn integral_phi_over_s(&self, t: f64) -> f64 {
        match self {
            ConcaveGauge::Power { theta } => t.powf(*theta) / theta,
            ConcaveGauge::PiecewiseLinear { knots, final_slope } => {
                let mut acc = 0.0;
                let mut pieces: Vec<(f64, f64, f64)> = knots
                    .windows(2)
                    .map(|w| (w[0].0, w[1].0, (w[1].1 - w[0].1) / (w[1].0 - w[0].0)))
                    .collect();
                let (tl, _) = *knots.last().unwrap();
                pieces.push((tl, f64::INFINITY, *final_slope));
                for (a, b, s) in pieces {
                    if a >= t {
                        break;
                    }
                    let b = b.min(t);
                    // φ(x) = φ(a) + s(x − a) = c0 + s x on [a, b]
                    let c0 = self.eval(a) - s * a;
                    acc += s * (b - a);
                    if c0 != 0.0 {
                        acc += c0 * (b / a).ln();
                    }
                }
                acc
            }
        }
    }

    /// `∫_t^∞ φ(s)/s² ds`, exact (possibly +∞).
    pub fn integral_phi_over_s2_tail(&self, t: f64) -> f64 {
        match self {
            ConcaveGauge::Power { theta } => t.powf(theta - 1.0) / (1.0 - theta),
            ConcaveGauge::PiecewiseLinear { knots, final_slope } => {
                if *final_slope > 0.0 {
                    return f64::INFINITY;
                }
                let mut acc = 0.0;
                for w in knots.windows(2) {
                    let (a, b) = (w[0].0.max(t), w[1].0);
                    if b <= a {
                        continue;
                    }
                    let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                    let c0 = w[0].1 - s * w[0].0;
                    // ∫ (c0 + s x)/x² = c0(1/a − 1/b) + s ln(b/a)
                    acc += c0 * (1.0 / a - 1.0 / b) + s * (b / a).ln();
                }
                let (tl, pl) = *knots.last().unwrap();
                acc + pl / tl.max(t)
            }
        }
    }

    /// Smallest `c₁` with `∫₀ᵗ φ(s)/s ds ≤ c₁ φ(t)`; exact for the power
    /// gauge, measured on a dense log grid otherwise (+∞ when it diverges).
    pub fn c1(&self) -> f64 {
        match self {
            ConcaveGauge::Power { theta } => 1.0 / theta,
            ConcaveGauge::PiecewiseLinear { final_slope, .. } => {
                if *final_slope == 0.0 {
                    return f64::INFINITY;
                }
                self.log_grid()
                    .into_iter()
                    .map(|t| self.integral_phi_over_s(t) / self.eval(t))
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Smallest `c₂` with `∫_t^∞ φ(s)/s² ds ≤ c₂ φ(t)/t`; +∞ when it diverges.
    pub fn c2(&self) -> f64 {
        match self {
            ConcaveGauge::Power { theta } => 1.0 / (1.0 - theta),
            // near 0 a linear φ makes the tail integral grow like ln(1/t)
            ConcaveGauge::PiecewiseLinear { .. } => f64::INFINITY,
        }
    }

    /// `sup_s φ(τs)/φ(s)`: the norm of the dilation `σ_{1/τ}` on `Λφ`.
    pub fn dilation_ratio(&self, tau: f64) -> f64 {
        match self {
            ConcaveGauge::Power { theta } => tau.powf(*theta),
            ConcaveGauge::PiecewiseLinear { .. } => self
                .log_grid()
                .into_iter()
                .map(|s| self.eval(tau * s) / self.eval(s))
                .fold(0.0, f64::max),
        }
    }
}

/// A positive weight on a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Weight {
    /// `x^α`
    Power(f64),
    /// `1/(1 − x)` on `[0, 1]`
    OneMinusXInv,
    /// `1 − x` on `[0, 1]`
    OneMinusX,
    /// `max(1/(1 − x), 1)` on the half-line; `1` past `x = 1`
    MaxOneMinusXInv,
    /// `φ(t)/t`
    PhiOverT(ConcaveGauge),
    /// Positive step function; constant at its last value past the horizon.
    Explicit(StepFunction),
    Product(Vec<Weight>),
    Reciprocal(Box<Weight>),
}

/// `w(x) = c·x^α·(1 − x)^γ` on one smooth cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub alpha: f64,
    pub gamma: f64,
}

impl Weight {
    pub fn one() -> Weight {
        Weight::Power(0.0)
    }

    pub fn validate(&self, kind: DomainKind) -> Result<()> {
        match self {
            Weight::Power(a) => {
                if !a.is_finite() {
                    return invalid("power exponent must be finite");
                }
            }
            Weight::OneMinusXInv | Weight::OneMinusX => {
                if kind != DomainKind::UnitInterval {
                    return invalid("1 − x weights live on the unit interval only");
                }
            }
            Weight::MaxOneMinusXInv => {}
            Weight::PhiOverT(g) => g.validate()?,
            Weight::Explicit(f) => {
                if f.domain().kind() != kind {
                    return invalid("explicit weight has the wrong domain");
                }
                if f.values().iter().any(|&v| !(v > 0.0)) {
                    return invalid("explicit weight values must be positive");
                }
            }
            Weight::Product(ws) => {
                for w in ws {
                    w.validate(kind)?;
                }
            }
            Weight::Reciprocal(w) => w.validate(kind)?,
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Weight::Power(a) => {
                if *a == 0.0 {
                    1.0
                } else {
                    x.powf(*a)
                }
            }
            Weight::OneMinusXInv => 1.0 / (1.0 - x),
            Weight::OneMinusX => 1.0 - x,
            Weight::MaxOneMinusXInv => {
                if x < 1.0 {
                    (1.0 / (1.0 - x)).max(1.0)
                } else {
                    1.0
                }
            }
            Weight::PhiOverT(g) => g.eval(x) / x,
            Weight::Explicit(f) => {
                if x >= f.horizon() {
                    *f.values().last().unwrap()
                } else {
                    f.eval(x)
                }
            }
            Weight::Product(ws) => ws.iter().map(|w| w.eval(x)).product(),
            Weight::Reciprocal(w) => 1.0 / w.eval(x),
        }
    }

    /// `e` with `w(x) ≍ x^e` as `x → 0`.
    /// `w(1 − y)` with the `(1 − x)` factors evaluated as `y`, for small `y > 0`.
    pub fn eval_below_one(&self, y: f64) -> f64 {
        match self {
            Weight::OneMinusXInv | Weight::MaxOneMinusXInv => 1.0 / y,
            Weight::OneMinusX => y,
            Weight::Product(ws) => ws.iter().map(|w| w.eval_below_one(y)).product(),
            Weight::Reciprocal(w) => 1.0 / w.eval_below_one(y),
            other => other.eval(1.0 - y),
        }
    }

    pub fn exponent_at_zero(&self) -> f64 {
        match self {
            Weight::Power(a) => *a,
            Weight::PhiOverT(g) => g.exponent_at_zero() - 1.0,
            Weight::Product(ws) => ws.iter().map(|w| w.exponent_at_zero()).sum(),
            Weight::Reciprocal(w) => -w.exponent_at_zero(),
            _ => 0.0,
        }
    }

    /// `γ` with `w(x) ≍ (1 − x)^γ` as `x → 1⁻`.
    pub fn exponent_at_one(&self) -> f64 {
        match self {
            Weight::OneMinusXInv | Weight::MaxOneMinusXInv => -1.0,
            Weight::OneMinusX => 1.0,
            Weight::Product(ws) => ws.iter().map(|w| w.exponent_at_one()).sum(),
            Weight::Reciprocal(w) => -w.exponent_at_one(),
            _ => 0.0,
        }
    }

    /// `e` with `w(x) ≍ x^e` as `x → ∞`.
    pub fn exponent_at_inf(&self) -> f64 {
        match self {
            Weight::Power(a) => *a,
            Weight::PhiOverT(g) => g.exponent_at_inf() - 1.0,
            Weight::Product(ws) => ws.iter().map(|w| w.exponent_at_inf()).sum(),
            Weight::Reciprocal(w) => -w.exponent_at_inf(),
            _ => 0.0,
        }
    }

    /// Points where the weight is not smooth (or singular).
    pub fn kinks(&self) -> Vec<f64> {
        let mut out = match self {
            Weight::MaxOneMinusXInv => vec![1.0],
            Weight::PhiOverT(g) => g.kinks(),
            Weight::Explicit(f) => f.breakpoints().to_vec(),
            Weight::Product(ws) => ws.iter().flat_map(|w| w.kinks()).collect(),
            Weight::Reciprocal(w) => w.kinks(),
            _ => vec![],
        };
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Closed form of the weight on a smooth cell containing `x`, when it is
    /// a monomial in `x` and `1 − x`.
    pub fn monomial_at(&self, x: f64) -> Option<Monomial> {
        match self {
            Weight::Power(a) => Some(Monomial {
                coef: 1.0,
                alpha: *a,
                gamma: 0.0,
            }),
            Weight::OneMinusXInv => Some(Monomial {
                coef: 1.0,
                alpha: 0.0,
                gamma: -1.0,
            }),
            Weight::OneMinusX => Some(Monomial {
                coef: 1.0,
                alpha: 0.0,
                gamma: 1.0,
            }),
            Weight::MaxOneMinusXInv => Some(Monomial {
                coef: 1.0,
                alpha: 0.0,
                gamma: if x < 1.0 { -1.0 } else { 0.0 },
            }),
            Weight::PhiOverT(ConcaveGauge::Power { theta }) => Some(Monomial {
                coef: 1.0,
                alpha: theta - 1.0,
                gamma: 0.0,
            }),
            Weight::PhiOverT(_) => None,
            Weight::Explicit(_) => Some(Monomial {
                coef: self.eval(x),
                alpha: 0.0,
                gamma: 0.0,
            }),
            Weight::Product(ws) => {
                let mut m = Monomial {
                    coef: 1.0,
                    alpha: 0.0,
                    gamma: 0.0,
                };
                for w in ws {
                    let f = w.monomial_at(x)?;
                    m.coef *= f.coef;
                    m.alpha += f.alpha;
                    m.gamma += f.gamma;
                }
                Some(m)
            }
            Weight::Reciprocal(w) => w.monomial_at(x).map(|m| Monomial {
                coef: 1.0 / m.coef,
                alpha: -m.alpha,
                gamma: -m.gamma,
            }),
        }
    }

    /// Flatten nested products and drop unit factors.
    pub fn normalized(&self) -> Weight {
        match self {
            Weight::Product(ws) => {
                let mut flat = Vec::new();
                for w in ws {
                    match w.normalized() {
                        Weight::Product(inner) => flat.extend(inner),
                        Weight::Power(a) if a == 0.0 => {}
                        other => flat.push(other),
                    }
                }
                match flat.len() {
                    0 => Weight::one(),
                    1 => flat.pop().unwrap(),
                    _ => Weight::Product(flat),
                }
            }
            Weight::Reciprocal(w) => match w.normalized() {
                Weight::Reciprocal(inner) => *inner,
                Weight::Power(a) => Weight::Power(-a),
                other => Weight::Reciprocal(Box::new(other)),
            },
            other => other.clone(),
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.normalized(), Weight::Power(a) if a == 0.0)
    }
}

/// Weight on `ℕ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SeqWeight {
    /// `n^α`
    Power(f64),
    /// Given values; the last value repeats forever.
    Explicit(Vec<f64>),
}

impl SeqWeight {
    pub fn validate(&self) -> Result<()> {
        match self {
            SeqWeight::Power(a) if !a.is_finite() => invalid("power exponent must be finite"),
            SeqWeight::Explicit(v) if v.is_empty() || v.iter().any(|&x| !(x > 0.0) || !x.is_finite()) => {
                invalid("explicit sequence weights must be positive and finite")
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, n: usize) -> f64 {
        match self {
            SeqWeight::Power(a) => (n as f64).powf(*a),
            SeqWeight::Explicit(v) => v[(n - 1).min(v.len() - 1)],
        }
    }

    pub fn exponent_at_inf(&self) -> f64 {
        match self {
            SeqWeight::Power(a) => *a,
            SeqWeight::Explicit(_) => 0.0,
        }
    }

    /// Constant factor of the tail `w_n = coef·n^α` beyond `n`.
    pub fn tail_coef(&self) -> f64 {
        match self {
            SeqWeight::Power(_) => 1.0,
            SeqWeight::Explicit(v) => *v.last().unwrap(),
        }
    }

    /// Index past which the tail form `tail_coef·n^α` is exact.
    pub fn tail_start(&self) -> usize {
        match self {
            SeqWeight::Power(_) => 1,
            SeqWeight::Explicit(v) => v.len(),
        }
    }

    pub fn reciprocal(&self) -> SeqWeight {
        match self {
            SeqWeight::Power(a) => SeqWeight::Power(-a),
            SeqWeight::Explicit(v) => SeqWeight::Explicit(v.iter().map(|x| 1.0 / x).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Domain;

    #[test]
    fn product_with_reciprocal_is_one() {
        let g = ConcaveGauge::piecewise_linear(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 3.0)], 0.25).unwrap();
        let step = StepFunction::new(Domain::half_line(2.0).unwrap(), vec![0.0, 0.5, 2.0], vec![3.0, 0.5]).unwrap();
        let bases = [
            Weight::Power(-0.7),
            Weight::MaxOneMinusXInv,
            Weight::PhiOverT(g),
            Weight::Explicit(step),
            Weight::Product(vec![Weight::Power(1.5), Weight::MaxOneMinusXInv]),
        ];
        for w in bases {
            let prod = Weight::Product(vec![w.clone(), Weight::Reciprocal(Box::new(w))]);
            for x in [0.01, 0.3, 0.999, 1.5, 2.5, 40.0] {
                assert!((prod.eval(x) - 1.0).abs() < 1e-14, "{prod:?} at {x}");
            }
        }
    }

    #[test]
    fn gauge_validation() {
        assert!(ConcaveGauge::piecewise_linear(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)], 0.0).is_err());
        assert!(ConcaveGauge::piecewise_linear(vec![(0.0, 0.1), (1.0, 1.0)], 0.0).is_err());
        assert!(ConcaveGauge::piecewise_linear(vec![(0.0, 0.0), (1.0, 1.0)], 2.0).is_err());
        assert!(ConcaveGauge::power(1.0).is_err());
        assert_eq!(ConcaveGauge::min_one().eval(2.0), 1.0);
        assert_eq!(ConcaveGauge::min_one().eval(0.25), 0.25);
    }

    #[test]
    fn gauge_integrals_match_quadrature() {
        let g = ConcaveGauge::piecewise_linear(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 3.0)], 0.0).unwrap();
        let f = |s: f64| g.eval(s) / s;
        let q = crate::quadrature::integrate(&f, 1e-300, 1.0, 1e-13).value
            + crate::quadrature::integrate(&f, 1.0, 3.0, 1e-13).value
            + crate::quadrature::integrate(&f, 3.0, 5.0, 1e-13).value;
        assert!((g.integral_phi_over_s(5.0) - q).abs() < 1e-10);
        let tail = crate::quadrature::integrate(&|s: f64| g.eval(s) / (s * s), 0.5, 1.0, 1e-13).value
            + crate::quadrature::integrate(&|s: f64| g.eval(s) / (s * s), 1.0, 3.0, 1e-13).value
            + 3.0 / 3.0;
        assert!((g.integral_phi_over_s2_tail(0.5) - tail).abs() < 1e-10);
    }

    #[test]
    fn power_gauge_constants() {
        let g = ConcaveGauge::power(0.5).unwrap();
        assert_eq!(g.c1(), 2.0);
        assert_eq!(g.c2(), 2.0);
        for t in [0.1, 1.0, 7.0] {
            assert!((g.integral_phi_over_s(t) - g.c1() * g.eval(t)).abs() < 1e-12);
            assert!((g.integral_phi_over_s2_tail(t) - g.c2() * g.eval(t) / t).abs() < 1e-12);
        }
    }

    #[test]
    fn piecewise_gauges_miss_one_condition() {
        assert!(ConcaveGauge::min_one().c1().is_infinite());
        let g = ConcaveGauge::piecewise_linear(vec![(0.0, 0.0), (1.0, 1.0)], 0.5).unwrap();
        assert!(g.c1().is_finite());
        assert!(g.c2().is_infinite());
    }

    #[test]
    fn exponents_compose() {
        let w = Weight::Product(vec![
            Weight::Power(-0.5),
            Weight::Reciprocal(Box::new(Weight::OneMinusX)),
        ]);
        assert_eq!(w.exponent_at_zero(), -0.5);
        assert_eq!(w.exponent_at_one(), -1.0);
        let m = w.monomial_at(0.5).unwrap();
        assert_eq!((m.alpha, m.gamma), (-0.5, -1.0));
    }

    #[test]
    fn normalization_flattens() {
        let w = Weight::Product(vec![
            Weight::Product(vec![Weight::Power(1.0), Weight::Power(0.0)]),
            Weight::Reciprocal(Box::new(Weight::Reciprocal(Box::new(Weight::OneMinusX)))),
        ]);
        assert_eq!(w.normalized(), Weight::Product(vec![Weight::Power(1.0), Weight::OneMinusX]));
    }
}
