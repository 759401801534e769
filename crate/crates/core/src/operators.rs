//! The operators: Cesàro, Copson, majorant, dilations, the substitution `T`
//! and the decreasing rearrangement.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, unsupported, CesError, Result};
use crate::function::{Domain, StepFunction};
use crate::piecewise::{Piece, PiecewiseFn};
use crate::sequence::{Sequence, TailedSeq};

/// `Cf(x) = F(x)/x`, stored per cell as `b + a/x` with an `A/x` tail on the
/// half-line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CesaroImage {
    func: PiecewiseFn,
}

impl CesaroImage {
    pub fn eval(&self, x: f64) -> f64 {
        self.func.eval(x)
    }

    pub fn as_piecewise(&self) -> &PiecewiseFn {
        &self.func
    }

    pub fn into_piecewise(self) -> PiecewiseFn {
        self.func
    }

    /// Coefficient `A` of the tail `A/x` past the horizon.
    pub fn tail_coefficient(&self) -> f64 {
        self.func.tail.map(|t| t.a).unwrap_or(0.0)
    }
}

pub fn cesaro(f: &StepFunction) -> CesaroImage {
    let mut cells = Vec::with_capacity(f.len());
    let mut big_f = 0.0;
    for (l, r, v) in f.cells() {
        // F(x) = F(l) + v(x − l)  ⇒  Cf = v + (F(l) − v·l)/x
        let a = if l == 0.0 { 0.0 } else { big_f - v * l };
        cells.push((l, r, Piece::rational(v, a)));
        big_f += v * (r - l);
    }
    let tail = match f.domain() {
        Domain::HalfLine { .. } => Some(Piece::rational(0.0, big_f)),
        Domain::UnitInterval => None,
    };
    CesaroImage {
        func: PiecewiseFn {
            domain: f.domain(),
            cells,
            tail,
        },
    }
}

/// `C` applied to a function whose pieces are all `b + a/x` (so `C²f` for a
/// step `f`). The result has pieces `b + (a + c·ln(x/s))/x`.
pub fn cesaro_piecewise(g: &PiecewiseFn) -> Result<PiecewiseFn> {
    if g.cells.iter().any(|c| !c.2.is_rational()) || g.tail.is_some_and(|t| !t.is_rational() || t.b != 0.0) {
        return unsupported("Cesàro image of a function with logarithmic pieces");
    }
    let mut cells = Vec::with_capacity(g.cells.len());
    let mut big_g = 0.0;
    for &(l, r, p) in &g.cells {
        if l == 0.0 {
            if p.a != 0.0 {
                return unsupported("first piece is not integrable at 0");
            }
            cells.push((l, r, Piece::rational(p.b, 0.0)));
            big_g += p.b * r;
            continue;
        }
        // G(x) = G(l) + b(x − l) + a·ln(x/l)
        cells.push((
            l,
            r,
            Piece {
                b: p.b,
                a: big_g - p.b * l,
                c: p.a,
                d: 0.0,
                anchor: l,
            },
        ));
        big_g += p.b * (r - l) + p.a * (r / l).ln();
    }
    let tail = match (g.domain, g.tail) {
        (Domain::HalfLine { horizon }, Some(t)) => Some(Piece {
            b: 0.0,
            a: big_g,
            c: t.a,
            d: 0.0,
            anchor: horizon,
        }),
        (Domain::HalfLine { .. }, None) => Some(Piece::rational(0.0, big_g)),
        _ => None,
    };
    Ok(PiecewiseFn {
        domain: g.domain,
        cells,
        tail,
    })
}

/// `C²f`.
pub fn cesaro_twice(f: &StepFunction) -> PiecewiseFn {
    cesaro_piecewise(cesaro(f).as_piecewise()).expect("Cf has only rational pieces")
}

/// Copson operator `C*f(x) = ∫ₓ¹ f(t)/t dt` on the unit interval.
pub fn copson(f: &StepFunction) -> Result<PiecewiseFn> {
    if f.domain() != Domain::UnitInterval {
        return Err(CesError::DomainMismatch("Copson operator acts on [0, 1]".into()));
    }
    let cells: Vec<(f64, f64, f64)> = f.cells().collect();
    let mut out = vec![(0.0, 0.0, Piece::ZERO); cells.len()];
    let mut later = 0.0;
    for (i, &(l, r, v)) in cells.iter().enumerate().rev() {
        // on [l, r): v·ln(r/x) + later = later − v·ln(x/r)
        out[i] = (
            l,
            r,
            Piece {
                b: later,
                a: 0.0,
                c: 0.0,
                d: -v,
                anchor: r,
            },
        );
        if l > 0.0 {
            later += v * (r / l).ln();
        }
    }
    Ok(PiecewiseFn {
        domain: Domain::UnitInterval,
        cells: out,
        tail: None,
    })
}

/// Nonincreasing majorant `f̃(x) = sup_{t ≥ x} |f(t)|`.
pub fn majorant(f: &StepFunction) -> StepFunction {
    let mut vals: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    for i in (0..vals.len().saturating_sub(1)).rev() {
        vals[i] = vals[i].max(vals[i + 1]);
    }
    StepFunction::new(f.domain(), f.breakpoints().to_vec(), vals).expect("same grid")
}

pub fn majorant_seq(x: &Sequence) -> Sequence {
    let mut vals: Vec<f64> = x.entries().iter().map(|v| v.abs()).collect();
    for i in (0..vals.len().saturating_sub(1)).rev() {
        vals[i] = vals[i].max(vals[i + 1]);
    }
    Sequence::new(vals).expect("finite")
}

/// `σ_τ f(x) = f(x/τ)·χ_I(x/τ)`.
pub fn dilation(f: &StepFunction, tau: f64) -> Result<StepFunction> {
    if !(tau > 0.0 && tau.is_finite()) {
        return invalid(format!("dilation needs τ > 0, got {tau}"));
    }
    match f.domain() {
        Domain::HalfLine { horizon } => {
            let bp = f.breakpoints().iter().map(|b| b * tau).collect();
            StepFunction::new(Domain::half_line(horizon * tau)?, bp, f.values().to_vec())
        }
        Domain::UnitInterval => {
            let mut bp = vec![0.0];
            let mut vals = vec![];
            for (l, r, v) in f.cells() {
                let (l, r) = (l * tau, (r * tau).min(1.0));
                if l >= 1.0 {
                    break;
                }
                if r > l {
                    bp.push(r);
                    vals.push(v);
                }
            }
            if *bp.last().unwrap() < 1.0 {
                bp.push(1.0);
                vals.push(0.0);
            }
            *bp.last_mut().unwrap() = 1.0;
            StepFunction::new(Domain::UnitInterval, bp, vals)
        }
    }
}

/// `σ_m x = (x_1, …, x_1, x_2, …, x_2, …)`, each entry repeated `m` times.
pub fn dilation_seq(x: &Sequence, m: usize) -> Result<Sequence> {
    if m == 0 {
        return invalid("dilation factor must be at least 1");
    }
    let out = x
        .entries()
        .iter()
        .flat_map(|&v| std::iter::repeat(v).take(m))
        .collect();
    Sequence::new(out)
}

/// `(Cx)_n = S_n/n` for `n = 1..=len`.
pub fn cesaro_seq(x: &Sequence, len: usize) -> Result<Vec<f64>> {
    if len < x.len() {
        return invalid(format!(
            "requested length {len} is shorter than the support {}",
            x.len()
        ));
    }
    let mut s = 0.0;
    Ok((1..=len)
        .map(|n| {
            s += x.get(n);
            s / n as f64
        })
        .collect())
}

/// `Cx` in full: the head up to the support and `S_N/n` afterwards.
pub fn cesaro_seq_tailed(x: &Sequence) -> TailedSeq {
    let head = cesaro_seq(x, x.len()).expect("length matches");
    let total: f64 = x.entries().iter().sum();
    TailedSeq {
        head,
        coef: total,
        exponent: -1.0,
    }
}

/// `σ(t) = t/(t + e − et)`.
pub fn sigma(t: f64) -> f64 {
    t / (t + E - E * t)
}

/// `σ⁻¹(b) = eb/(1 − b + eb)`.
pub fn sigma_inv(b: f64) -> f64 {
    E * b / (1.0 - b + E * b)
}

/// `d(t) = t + e − et`.
pub fn d_of(t: f64) -> f64 {
    t + E - E * t
}

fn remap_unit(h: &StepFunction, map: fn(f64) -> f64) -> Result<StepFunction> {
    if h.domain() != Domain::UnitInterval {
        return Err(CesError::DomainMismatch("T acts on [0, 1]".into()));
    }
    let n = h.breakpoints().len();
    let bp: Vec<f64> = h
        .breakpoints()
        .iter()
        .enumerate()
        .map(|(i, &b)| if i == 0 { 0.0 } else if i == n - 1 { 1.0 } else { map(b) })
        .collect();
    StepFunction::new(Domain::UnitInterval, bp, h.values().to_vec())
}

/// `Th(t) = h(σ(t))`: a breakpoint `b` of `h` moves to `σ⁻¹(b)`.
pub fn substitution_t(h: &StepFunction) -> Result<StepFunction> {
    remap_unit(h, sigma_inv)
}

/// Inverse of `T`: breakpoints move by `σ`.
pub fn substitution_t_inv(h: &StepFunction) -> Result<StepFunction> {
    remap_unit(h, sigma)
}

/// `f*` and the distribution function of `|f|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangementProfile {
    /// Nonincreasing, on the same domain as `f`.
    pub decreasing: StepFunction,
    /// `(λ_k, |{|f| ≥ λ_k}|)` for the distinct positive values λ_k, descending.
    pub distribution: Vec<(f64, f64)>,
}

impl RearrangementProfile {
    /// `d_f(λ) = |{|f| > λ}|`.
    pub fn d(&self, lambda: f64) -> f64 {
        self.distribution
            .iter()
            .take_while(|(level, _)| *level > lambda)
            .last()
            .map(|(_, m)| *m)
            .unwrap_or(0.0)
    }

    /// `∫₀ᵗ f*(s) ds`.
    pub fn integral_to(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (l, r, v) in self.decreasing.cells() {
            if l >= t {
                break;
            }
            acc += v * (r.min(t) - l);
        }
        acc
    }
}

pub fn decreasing_rearrangement(f: &StepFunction) -> RearrangementProfile {
    let mut cells: Vec<(f64, f64)> = f.cells().map(|(l, r, v)| (v.abs(), r - l)).collect();
    // stable sort keeps ties in their original order
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut bp = vec![0.0];
    let mut vals = vec![];
    let mut acc = 0.0;
    let mut distribution: Vec<(f64, f64)> = vec![];
    for (v, len) in &cells {
        acc += len;
        bp.push(acc);
        vals.push(*v);
        if *v > 0.0 {
            match distribution.last_mut() {
                Some(last) if last.0 == *v => last.1 = acc,
                _ => distribution.push((*v, acc)),
            }
        }
    }
    // the cell lengths may not add back to the horizon bit-for-bit
    *bp.last_mut().unwrap() = f.horizon();
    let mut dec = StepFunction::new(f.domain(), bp.clone(), vals.clone());
    if dec.is_err() {
        // drop zero-length cells produced by rounding
        let mut nb = vec![0.0];
        let mut nv = vec![];
        for (i, v) in vals.iter().enumerate() {
            let r = bp[i + 1];
            if r > *nb.last().unwrap() {
                nb.push(r);
                nv.push(*v);
            }
        }
        dec = StepFunction::new(f.domain(), nb, nv);
    }
    RearrangementProfile {
        decreasing: dec.expect("rearranged grid is valid").simplified(),
        distribution,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half(h: f64) -> Domain {
        Domain::half_line(h).unwrap()
    }

    #[test]
    fn cesaro_of_unit_block() {
        let f = StepFunction::indicator(half(1.0), 0.0, 1.0, 1.0).unwrap();
        let cf = cesaro(&f);
        for x in [0.1, 0.5, 1.0] {
            assert_eq!(cf.eval(x), 1.0);
        }
        for x in [2.0, 5.0, 100.0] {
            assert!((cf.eval(x) - 1.0 / x).abs() < 1e-16);
        }
        assert_eq!(cf.tail_coefficient(), 1.0);
    }

    #[test]
    fn cesaro_of_shifted_block() {
        let f = StepFunction::indicator(half(2.0), 1.0, 2.0, 2.0).unwrap();
        assert!((cesaro(&f).eval(2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cesaro_of_constant() {
        let f = StepFunction::constant(Domain::UnitInterval, 3.5).unwrap();
        for x in [0.01, 0.3, 1.0] {
            assert_eq!(cesaro(&f).eval(x), 3.5);
        }
    }

    #[test]
    fn second_cesaro_of_unit_block() {
        // CCχ[0,1](x) = 1 on [0,1], (1 + ln x)/x past 1
        let f = StepFunction::indicator(half(1.0), 0.0, 1.0, 1.0).unwrap();
        let cc = cesaro_twice(&f);
        assert_eq!(cc.eval(0.5), 1.0);
        let e = std::f64::consts::E;
        assert!((cc.eval(e) - 2.0 / e).abs() < 1e-15);
        assert!((cc.eval(10.0) - (1.0 + 10f64.ln()) / 10.0).abs() < 1e-15);
    }

    #[test]
    fn copson_examples() {
        let f = StepFunction::constant(Domain::UnitInterval, 1.0).unwrap();
        let c = copson(&f).unwrap();
        for x in [0.1, 0.5, 0.9] {
            assert!((c.eval(x) + x.ln()).abs() < 1e-15);
        }
        let g = StepFunction::indicator(Domain::UnitInterval, 0.5, 1.0, 1.0).unwrap();
        assert!((copson(&g).unwrap().eval(0.25) - 2f64.ln()).abs() < 1e-15);
        let z = StepFunction::zero(Domain::UnitInterval);
        assert_eq!(copson(&z).unwrap().eval(0.3), 0.0);
        assert!(copson(&StepFunction::zero(half(1.0))).is_err());
    }

    #[test]
    fn majorant_examples() {
        let f = StepFunction::from_values(Domain::UnitInterval, vec![1.0, 3.0, 2.0]).unwrap();
        assert_eq!(majorant(&f).values(), &[3.0, 3.0, 2.0]);
        let x = Sequence::new(vec![1.0, 3.0, 2.0]).unwrap();
        assert_eq!(majorant_seq(&x).entries(), &[3.0, 3.0, 2.0]);
        let g = StepFunction::from_values(Domain::UnitInterval, vec![3.0, -2.0, 1.0]).unwrap();
        assert_eq!(majorant(&g).values(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn dilation_examples() {
        let f = StepFunction::constant(Domain::UnitInterval, 1.0).unwrap();
        let g = dilation(&f, 0.5).unwrap();
        assert_eq!(g.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(g.values(), &[1.0, 0.0]);
        let h = StepFunction::indicator(half(1.0), 0.0, 1.0, 1.0).unwrap();
        let d = dilation(&h, 2.0).unwrap();
        assert_eq!(d.horizon(), 2.0);
        assert_eq!(d.eval(1.5), 1.0);
        // stretching a unit-interval function truncates it
        let s = dilation(&StepFunction::from_values(Domain::UnitInterval, vec![1.0, 2.0]).unwrap(), 3.0).unwrap();
        assert_eq!(s.values(), &[1.0]);
    }

    #[test]
    fn sequence_dilation_and_cesaro() {
        let x = Sequence::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(dilation_seq(&x, 2).unwrap().entries(), &[1.0, 1.0, 2.0, 2.0]);
        assert_eq!(dilation_seq(&x, 1).unwrap(), x);
        assert_eq!(dilation_seq(&Sequence::unit(1), 3).unwrap().entries(), &[1.0, 1.0, 1.0]);
        let e1 = cesaro_seq(&Sequence::unit(1), 4).unwrap();
        assert_eq!(e1, vec![1.0, 0.5, 1.0 / 3.0, 0.25]);
        assert_eq!(cesaro_seq(&Sequence::new(vec![0.0, 2.0]).unwrap(), 2).unwrap(), vec![0.0, 1.0]);
        assert!(cesaro_seq(&x, 1).is_err());
    }

    #[test]
    fn substitution_examples() {
        let e = std::f64::consts::E;
        let h = StepFunction::indicator(Domain::UnitInterval, 0.0, 0.5, 1.0).unwrap();
        let th = substitution_t(&h).unwrap();
        assert!((th.breakpoints()[1] - e / (1.0 + e)).abs() < 1e-15);
        let x = 0.3;
        let g = StepFunction::indicator(Domain::UnitInterval, 0.0, x / d_of(x), 1.0).unwrap();
        assert!((substitution_t(&g).unwrap().breakpoints()[1] - x).abs() < 1e-15);
        assert_eq!(sigma(0.0), 0.0);
        assert_eq!(sigma(1.0), 1.0);
    }

    #[test]
    fn rearrangement_examples() {
        let f = StepFunction::from_values(Domain::UnitInterval, vec![1.0, 3.0, 2.0]).unwrap();
        let r = decreasing_rearrangement(&f);
        assert_eq!(r.decreasing.values(), &[3.0, 2.0, 1.0]);
        assert!((r.d(1.5) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.d(3.0), 0.0);
        assert!((r.d(0.0) - 1.0).abs() < 1e-15);
    }
}
