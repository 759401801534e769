//! Exact step functions on `[0, 1]` or on a truncated half-line.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, CesError, Result};

/// Relative gap below which two breakpoints are merged when grids are refined.
pub const MERGE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Domain {
    #[serde(rename = "unit")]
    UnitInterval,
    /// `[0, ∞)`; functions vanish beyond `horizon`.
    #[serde(rename = "halfline")]
    HalfLine { horizon: f64 },
}

/// Domain without the horizon; this is what a space description refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainKind {
    UnitInterval,
    HalfLine,
}

impl Domain {
    pub fn half_line(horizon: f64) -> Result<Domain> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return invalid(format!("horizon must be positive and finite, got {horizon}"));
        }
        Ok(Domain::HalfLine { horizon })
    }

    pub fn horizon(&self) -> f64 {
        match *self {
            Domain::UnitInterval => 1.0,
            Domain::HalfLine { horizon } => horizon,
        }
    }

    pub fn kind(&self) -> DomainKind {
        match self {
            Domain::UnitInterval => DomainKind::UnitInterval,
            Domain::HalfLine { .. } => DomainKind::HalfLine,
        }
    }

    pub fn is_half_line(&self) -> bool {
        matches!(self, Domain::HalfLine { .. })
    }

    fn validate(&self) -> Result<()> {
        if let Domain::HalfLine { horizon } = *self {
            if !(horizon.is_finite() && horizon > 0.0) {
                return invalid(format!("horizon must be positive and finite, got {horizon}"));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for DomainKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainKind::UnitInterval => write!(f, "unit"),
            DomainKind::HalfLine => write!(f, "halfline"),
        }
    }
}

#[derive(Deserialize)]
struct StepFunctionRepr {
    domain: Domain,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

/// Piecewise-constant function with value `values[i]` on `[breakpoints[i], breakpoints[i+1])`.
///
/// On the half-line the function is zero beyond the horizon. The last cell is
/// closed on the right, so evaluating at the horizon returns the last value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepFunctionRepr")]
pub struct StepFunction {
    domain: Domain,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<StepFunctionRepr> for StepFunction {
    type Error = CesError;

    fn try_from(raw: StepFunctionRepr) -> Result<Self> {
        StepFunction::new(raw.domain, raw.breakpoints, raw.values)
    }
}

impl StepFunction {
    pub fn new(domain: Domain, breakpoints: Vec<f64>, values: Vec<f64>) -> Result<StepFunction> {
        domain.validate()?;
        if breakpoints.len() < 2 {
            return invalid("a step function needs at least two breakpoints");
        }
        if values.len() + 1 != breakpoints.len() {
            return invalid(format!(
                "{} values for {} breakpoints",
                values.len(),
                breakpoints.len()
            ));
        }
        if breakpoints[0] != 0.0 {
            return invalid("first breakpoint must be 0");
        }
        if *breakpoints.last().unwrap() != domain.horizon() {
            return invalid(format!(
                "last breakpoint must equal the horizon {}",
                domain.horizon()
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return invalid("breakpoints must be strictly increasing");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("all values must be finite");
        }
        Ok(StepFunction {
            domain,
            breakpoints,
            values,
        })
    }

    pub fn zero(domain: Domain) -> StepFunction {
        StepFunction {
            domain,
            breakpoints: vec![0.0, domain.horizon()],
            values: vec![0.0],
        }
    }

    pub fn constant(domain: Domain, c: f64) -> Result<StepFunction> {
        StepFunction::new(domain, vec![0.0, domain.horizon()], vec![c])
    }

    /// `c·χ[a, b)` with `0 ≤ a < b ≤ horizon`.
    pub fn indicator(domain: Domain, a: f64, b: f64, c: f64) -> Result<StepFunction> {
        let h = domain.horizon();
        if !(0.0 <= a && a < b && b <= h) {
            return invalid(format!("indicator interval [{a}, {b}) not inside [0, {h}]"));
        }
        let mut bp = vec![0.0];
        let mut vals = Vec::new();
        if a > 0.0 {
            bp.push(a);
            vals.push(0.0);
        }
        bp.push(b);
        vals.push(c);
        if b < h {
            bp.push(h);
            vals.push(0.0);
        }
        StepFunction::new(domain, bp, vals)
    }

    /// Equal-length cells over the whole domain.
    pub fn from_values(domain: Domain, values: Vec<f64>) -> Result<StepFunction> {
        if values.is_empty() {
            return invalid("need at least one value");
        }
        let h = domain.horizon();
        let n = values.len();
        let mut bp: Vec<f64> = (0..n).map(|i| h * i as f64 / n as f64).collect();
        bp.push(h);
        StepFunction::new(domain, bp, values)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn horizon(&self) -> f64 {
        self.domain.horizon()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Cells as `(left, right, value)`.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(self.values.iter())
            .map(|(w, &v)| (w[0], w[1], v))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let h = self.horizon();
        if !(x >= 0.0) || x > h {
            return 0.0;
        }
        // index of the last breakpoint <= x
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        let cell = idx.saturating_sub(1).min(self.values.len() - 1);
        self.values[cell]
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> StepFunction {
        StepFunction {
            domain: self.domain,
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn abs(&self) -> StepFunction {
        self.map_values(f64::abs)
    }

    pub fn scale(&self, c: f64) -> StepFunction {
        self.map_values(|v| c * v)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Nonincreasing in absolute value.
    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    /// Σ value·length.
    pub fn integral(&self) -> f64 {
        self.cells().map(|(l, r, v)| v * (r - l)).sum()
    }

    /// Same function on a larger half-line horizon (zero-padded).
    pub fn extend_to(&self, horizon: f64) -> Result<StepFunction> {
        match self.domain {
            Domain::UnitInterval => {
                if horizon == 1.0 {
                    Ok(self.clone())
                } else {
                    invalid("cannot change the horizon of a unit-interval function")
                }
            }
            Domain::HalfLine { horizon: h } => {
                if horizon < h {
                    return invalid(format!("cannot shrink horizon {h} to {horizon}"));
                }
                if horizon == h {
                    return Ok(self.clone());
                }
                let mut bp = self.breakpoints.clone();
                let mut vals = self.values.clone();
                bp.push(horizon);
                vals.push(0.0);
                StepFunction::new(Domain::half_line(horizon)?, bp, vals)
            }
        }
    }

    /// Restrict to a refinement grid (which must contain this function's grid
    /// up to the merge tolerance and start at 0).
    pub fn refine_to(&self, grid: &[f64]) -> Result<StepFunction> {
        let h = *grid.last().unwrap();
        let this = match self.domain {
            Domain::HalfLine { horizon } if horizon < h => self.extend_to(h)?,
            _ => self.clone(),
        };
        let values = grid
            .windows(2)
            .map(|w| this.eval(0.5 * (w[0] + w[1])))
            .collect();
        let domain = match self.domain {
            Domain::UnitInterval => Domain::UnitInterval,
            Domain::HalfLine { .. } => Domain::half_line(h)?,
        };
        StepFunction::new(domain, grid.to_vec(), values)
    }

    /// Bring two functions onto a common grid.
    pub fn align(&self, other: &StepFunction) -> Result<(StepFunction, StepFunction)> {
        if self.domain.kind() != other.domain.kind() {
            return Err(CesError::DomainMismatch(format!(
                "{} vs {}",
                self.domain.kind(),
                other.domain.kind()
            )));
        }
        let grid = merge_grids(&self.breakpoints, &other.breakpoints);
        Ok((self.refine_to(&grid)?, other.refine_to(&grid)?))
    }

    pub fn zip_with(&self, other: &StepFunction, f: impl Fn(f64, f64) -> f64) -> Result<StepFunction> {
        let (a, b) = self.align(other)?;
        let values = a.values.iter().zip(&b.values).map(|(&x, &y)| f(x, y)).collect();
        StepFunction::new(a.domain, a.breakpoints, values)
    }

    pub fn add(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn mul(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |x, y| x * y)
    }

    /// Merge neighbouring cells that carry the same value.
    pub fn simplified(&self) -> StepFunction {
        let mut bp = vec![0.0];
        let mut vals: Vec<f64> = Vec::new();
        for (_, r, v) in self.cells() {
            if vals.last() == Some(&v) {
                *bp.last_mut().unwrap() = r;
            } else {
                vals.push(v);
                bp.push(r);
            }
        }
        StepFunction {
            domain: self.domain,
            breakpoints: bp,
            values: vals,
        }
    }

    /// `F(x) = ∫₀ˣ f`.
    pub fn partial_integral(&self) -> PartialIntegral {
        let mut knots = Vec::with_capacity(self.breakpoints.len());
        let mut acc = 0.0;
        knots.push((0.0, 0.0));
        for (l, r, v) in self.cells() {
            acc += v * (r - l);
            knots.push((r, acc));
        }
        PartialIntegral { knots }
    }
}

/// Continuous piecewise-linear `F(x) = ∫₀ˣ f`, constant beyond the last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialIntegral {
    knots: Vec<(f64, f64)>,
}

impl PartialIntegral {
    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let last = *self.knots.last().unwrap();
        if x >= last.0 {
            return last.1;
        }
        let idx = self.knots.partition_point(|&(t, _)| t <= x);
        let (x0, y0) = self.knots[idx - 1];
        let (x1, y1) = self.knots[idx];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn total(&self) -> f64 {
        self.knots.last().unwrap().1
    }
}

/// Sorted union of two grids; points closer than `MERGE_TOL·horizon` collapse.
pub fn merge_grids(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let h = all.last().copied().unwrap_or(1.0).max(1e-300);
    let tol = MERGE_TOL * h;
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for x in all {
        match out.last_mut() {
            Some(last) if x - *last <= tol => {
                // keep the larger so the horizon survives exactly
                if x > *last && out.len() > 1 {
                    *out.last_mut().unwrap() = x;
                }
            }
            _ => out.push(x),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thirds(vals: [f64; 3]) -> StepFunction {
        StepFunction::new(
            Domain::UnitInterval,
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
            vals.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn partial_integral_of_unit_indicator() {
        let f = StepFunction::indicator(Domain::half_line(3.0).unwrap(), 0.0, 1.0, 1.0).unwrap();
        let big_f = f.partial_integral();
        for x in [0.0, 0.25, 0.5, 1.0, 2.0, 3.0, 10.0] {
            assert!((big_f.eval(x) - x.min(1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn partial_integral_of_shifted_block() {
        let f = StepFunction::indicator(Domain::half_line(2.0).unwrap(), 1.0, 2.0, 2.0).unwrap();
        assert_eq!(f.partial_integral().eval(2.0), 2.0);
    }

    #[test]
    fn partial_integral_sums_cell_areas() {
        let f = thirds([1.0, 3.0, 2.0]);
        assert!((f.partial_integral().eval(1.0) - 2.0).abs() < 1e-15);
        assert!((f.partial_integral().total() - f.integral()).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed_input() {
        let d = Domain::UnitInterval;
        assert!(StepFunction::new(d, vec![0.0, 0.5], vec![1.0]).is_err());
        assert!(StepFunction::new(d, vec![0.0, 0.6, 0.5, 1.0], vec![1.0, 1.0, 1.0]).is_err());
        assert!(StepFunction::new(d, vec![0.0, 1.0], vec![f64::NAN]).is_err());
        assert!(StepFunction::new(d, vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(StepFunction::new(d, vec![0.1, 1.0], vec![1.0]).is_err());
        assert!(Domain::half_line(0.0).is_err());
    }

    #[test]
    fn eval_uses_left_closed_cells() {
        let f = thirds([1.0, 3.0, 2.0]);
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(1.0 / 3.0), 3.0);
        assert_eq!(f.eval(1.0), 2.0);
        assert_eq!(f.eval(1.5), 0.0);
    }

    #[test]
    fn merge_collapses_near_duplicates() {
        let g = merge_grids(&[0.0, 0.5, 1.0], &[0.0, 0.5 + 1e-16, 0.75, 1.0]);
        assert_eq!(g, vec![0.0, 0.5 + 1e-16, 0.75, 1.0]);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let f = StepFunction::new(
            Domain::half_line(std::f64::consts::PI).unwrap(),
            vec![0.0, 0.1 + 0.2, std::f64::consts::PI],
            vec![1.0 / 3.0, -2.0e-300],
        )
        .unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: StepFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(f, back);
        for (a, b) in f.breakpoints().iter().zip(back.breakpoints()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!(s.contains("\"kind\":\"halfline\""));
    }

    #[test]
    fn json_rejects_invalid_function() {
        let s = r#"{"domain":{"kind":"unit"},"breakpoints":[0,0.5],"values":[1]}"#;
        assert!(serde_json::from_str::<StepFunction>(s).is_err());
    }
}
