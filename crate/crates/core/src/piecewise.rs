//! Exact piecewise-analytic functions: images of step functions under `C`,
//! `C²` and the Copson operator.

use serde::{Deserialize, Serialize};

use crate::function::{Domain, StepFunction};

/// `b + (a + c·ln(x/s))/x + d·ln(x/s)` with anchor `s > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub b: f64,
    pub a: f64,
    pub c: f64,
    pub d: f64,
    pub anchor: f64,
}

impl Piece {
    pub const ZERO: Piece = Piece {
        b: 0.0,
        a: 0.0,
        c: 0.0,
        d: 0.0,
        anchor: 1.0,
    };

    pub fn constant(b: f64) -> Piece {
        Piece { b, ..Piece::ZERO }
    }

    /// `b + a/x`
    pub fn rational(b: f64, a: f64) -> Piece {
        Piece { b, a, ..Piece::ZERO }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.b;
        if self.c != 0.0 || self.d != 0.0 {
            let l = (x / self.anchor).ln();
            v += (self.a + self.c * l) / x + self.d * l;
        } else if self.a != 0.0 {
            v += self.a / x;
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.b == 0.0 && self.a == 0.0 && self.c == 0.0 && self.d == 0.0
    }

    pub fn is_constant(&self) -> bool {
        self.a == 0.0 && self.c == 0.0 && self.d == 0.0
    }

    /// Only `b + a/x` terms.
    pub fn is_rational(&self) -> bool {
        self.c == 0.0 && self.d == 0.0
    }

    /// `e` with `|P(x)| ≍ x^e` as `x → 0⁺` (logarithms ignored); `None` if `P ≡ 0`.
    pub fn exponent_at_zero(&self) -> Option<f64> {
        if self.a != 0.0 || self.c != 0.0 {
            Some(-1.0)
        } else if self.b != 0.0 || self.d != 0.0 {
            Some(0.0)
        } else {
            None
        }
    }

    /// `e` with `|P(x)| ≍ x^e` as `x → ∞` (logarithms ignored).
    pub fn exponent_at_inf(&self) -> Option<f64> {
        if self.b != 0.0 || self.d != 0.0 {
            Some(0.0)
        } else if self.a != 0.0 || self.c != 0.0 {
            Some(-1.0)
        } else {
            None
        }
    }
}

/// Pieces on the cells of `[0, horizon]`, plus an optional tail on
/// `[horizon, ∞)` for half-line functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseFn {
    pub domain: Domain,
    pub cells: Vec<(f64, f64, Piece)>,
    pub tail: Option<Piece>,
}

impl PiecewiseFn {
    pub fn from_step(f: &StepFunction) -> PiecewiseFn {
        PiecewiseFn {
            domain: f.domain(),
            cells: f.cells().map(|(l, r, v)| (l, r, Piece::constant(v))).collect(),
            tail: None,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.domain.horizon()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return match self.cells.first() {
                Some((_, _, p)) if p.is_constant() => p.b,
                _ => f64::NAN,
            };
        }
        let h = self.horizon();
        if x > h {
            return match (&self.domain, &self.tail) {
                (Domain::HalfLine { .. }, Some(t)) => t.eval(x),
                _ => 0.0,
            };
        }
        let i = self.cells.partition_point(|c| c.0 <= x);
        let (_, _, p) = self.cells[i.saturating_sub(1).min(self.cells.len() - 1)];
        p.eval(x)
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|c| c.2.is_zero()) && self.tail.is_none_or(|t| t.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piece_forms() {
        let p = Piece {
            b: 1.0,
            a: 2.0,
            c: 3.0,
            d: 4.0,
            anchor: 2.0,
        };
        let x: f64 = 5.0;
        let l = (x / 2.0).ln();
        assert!((p.eval(x) - (1.0 + (2.0 + 3.0 * l) / x + 4.0 * l)).abs() < 1e-15);
        assert_eq!(Piece::rational(0.0, 1.0).exponent_at_inf(), Some(-1.0));
        assert_eq!(Piece::ZERO.exponent_at_zero(), None);
    }
}
