//! Sampled comparisons of a dual norm with its claimed equivalent.

use serde::Serialize;

use super::{cesaro_dual_norm, cesaro_lp_dual, conjugate, down_norm, majorant_norm};
use crate::error::{invalid, Result};
use crate::function::DomainKind;
use crate::norms::{flatten_seq_lp, lp_norm, norm, seq_norm, ser_extended, ser_extended_slice};
use crate::operators::majorant_seq;
use crate::sampling::{par_samples, random_sequence, random_step, Family, StepOptions};
use crate::space::{flatten_lp, SpaceSpec};
use crate::weight::{ConcaveGauge, SeqWeight, Weight};

/// Relative slack allowed on both ends of the proven interval.
pub const REPORT_TOL: f64 = 1e-6;

/// Which equivalence a report checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualityTheorem {
    /// `‖f‖_{X↓} ≈ ‖f‖_{CX}` for `X = Lp` on the half-line.
    DownChain,
    /// `(CX)′ = X̃′` on the half-line.
    HalfLine,
    /// `(CX)′ ↪ X̃′(1/(1−x))` on `[0,1]`.
    UnitLower,
    /// `X̃′(1/(1−x)) ↪ (CX)′` on `[0,1]`.
    UnitUpper,
    /// `(CX)′ = X̃′` for sequences.
    Sequence,
    /// `(CL∞(v))′ ≡ L̃¹(w)`, isometric.
    Isometric,
    /// `CΛφ = L¹(φ(t)/t)`.
    Lorentz,
}

impl DualityTheorem {
    /// Numeric identifiers accepted on the command line.
    pub fn from_code(n: u8) -> Option<DualityTheorem> {
        Some(match n {
            2 => DualityTheorem::DownChain,
            3 => DualityTheorem::HalfLine,
            4 => DualityTheorem::UnitLower,
            5 => DualityTheorem::UnitUpper,
            6 => DualityTheorem::Sequence,
            7 => DualityTheorem::Isometric,
            8 => DualityTheorem::Lorentz,
            _ => return None,
        })
    }

    pub fn code(self) -> u8 {
        match self {
            DualityTheorem::DownChain => 2,
            DualityTheorem::HalfLine => 3,
            DualityTheorem::UnitLower => 4,
            DualityTheorem::UnitUpper => 5,
            DualityTheorem::Sequence => 6,
            DualityTheorem::Isometric => 7,
            DualityTheorem::Lorentz => 8,
        }
    }

    /// What the two sides of each ratio are.
    pub fn ratio_description(self) -> &'static str {
        match self {
            DualityTheorem::DownChain => "down norm in X' / norm in CX",
            DualityTheorem::HalfLine | DualityTheorem::Sequence => "norm in (CX)' / norm of majorant in X'",
            DualityTheorem::UnitLower | DualityTheorem::UnitUpper => "norm in (CX)' / norm of majorant in X'(1/(1-x))",
            DualityTheorem::Isometric => "norm in (C Linf(v))' / norm of majorant in L1(w)",
            DualityTheorem::Lorentz => "norm in C Lambda / norm in L1(phi(t)/t)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Taken verbatim from the statement being checked.
    Stated,
    /// Worked out from the proof or a classical formula.
    Derived,
    /// Computed numerically (grid minimization, measured gauge constants).
    Measured,
}

#[derive(Debug, Clone, Serialize)]
pub struct Constant {
    pub name: String,
    #[serde(serialize_with = "ser_extended")]
    pub value: f64,
    pub provenance: Provenance,
    pub note: String,
}

impl Constant {
    fn new(name: &str, value: f64, provenance: Provenance, note: impl Into<String>) -> Constant {
        Constant {
            name: name.into(),
            value,
            provenance,
            note: note.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub sample: usize,
    pub family: &'static str,
    #[serde(serialize_with = "ser_extended")]
    pub lhs: f64,
    #[serde(serialize_with = "ser_extended")]
    pub rhs: f64,
    #[serde(serialize_with = "ser_extended")]
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub theorem: DualityTheorem,
    pub space: String,
    pub ratio: &'static str,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    #[serde(serialize_with = "ser_extended_slice")]
    pub ratios: Vec<f64>,
    #[serde(serialize_with = "ser_extended_slice")]
    pub proven_interval: Vec<f64>,
    pub constants: Vec<Constant>,
    pub flags: Vec<String>,
    #[serde(serialize_with = "ser_extended")]
    pub min_ratio: f64,
    #[serde(serialize_with = "ser_extended")]
    pub max_ratio: f64,
    pub pass: bool,
    pub rows: Vec<RatioRow>,
}

impl DualityReport {
    /// `sample,family,lhs,rhs,ratio` table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample,family,lhs,rhs,ratio\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{:e},{:e},{:e}\n", r.sample, r.family, r.lhs, r.rhs, r.ratio));
        }
        out
    }
}

pub const HYPOTHESES_UNVERIFIED: &str = "hypotheses unverified";
pub const WEIGHTED_EXTENSION: &str = "weighted extension: T bounded on weighted Lp";
pub const DERIVED_FROM_PROOF: &str = "constant derived from proof";

/// `min_{a ∈ [1.1, 100]} h(a)` on a 2000-point log grid, with the minimizer.
pub fn log_grid_min(h: impl Fn(f64) -> f64) -> (f64, f64) {
    let n = 2000;
    let (lo, hi) = (1.1f64.ln(), 100f64.ln());
    (0..=n)
        .map(|i| (lo + (hi - lo) * i as f64 / n as f64).exp())
        .map(|a| (h(a), a))
        .fold((f64::INFINITY, 1.1), |best, v| if v.0 < best.0 { v } else { best })
}

/// `C_{p,α}` exactly as printed: `p/(p − αp − 1)·max(1, p − αp − 1)^{1/p}`;
/// for `p = 1` the single-exponent branch `max(1, −α)/(−α)`.
pub fn unit_hardy_constant(p: f64, alpha: f64) -> f64 {
    if p == 1.0 {
        return 1.0f64.max(-alpha) / -alpha;
    }
    let q = p - alpha * p - 1.0;
    p / q * 1.0f64.max(q).powf(1.0 / p)
}

/// Operator norm of the substitution `T` on `L^q(x^{−α}/(1−x))`.
pub fn substitution_norm(q: f64, alpha: f64) -> f64 {
    let iq = if q.is_infinite() { 0.0 } else { 1.0 / q };
    (1.0 - iq).exp().max((iq - alpha).exp())
}

struct Setup {
    constants: Vec<Constant>,
    flags: Vec<String>,
    interval: (f64, f64),
}

fn power_exponent(w: &Weight) -> Option<f64> {
    match w.normalized() {
        Weight::Power(a) => Some(a),
        _ => None,
    }
}

fn seq_power_exponent(w: &SeqWeight) -> Option<f64> {
    match w {
        SeqWeight::Power(a) => Some(*a),
        SeqWeight::Explicit(_) => None,
    }
}

/// Sample `n_samples` inputs and check each ratio against the proven interval.
pub fn duality_report(theorem: DualityTheorem, x: &SpaceSpec, n_samples: usize, seed: u64) -> Result<DualityReport> {
    duality_report_with_tol(theorem, x, n_samples, seed, REPORT_TOL)
}

/// As [`duality_report`], inflating the interval by `tol` instead.
pub fn duality_report_with_tol(theorem: DualityTheorem, x: &SpaceSpec, n_samples: usize, seed: u64, tol: f64) -> Result<DualityReport> {
    x.validate()?;
    let x = x.normalized();
    let step_opts = StepOptions::default();
    let (setup, rows): (Setup, Vec<Result<RatioRow>>) = match theorem {
        DualityTheorem::DownChain => {
            let (p, w, kind) = flatten_lp(&x).ok_or_else(|| bad(theorem, &x))?;
            if kind != DomainKind::HalfLine || !w.is_unit() || p < 1.0 {
                return Err(bad(theorem, &x));
            }
            let q = conjugate(p);
            let mut flags = vec![];
            let b = if p > 1.0 {
                q.min(f64::MAX)
            } else {
                flags.push(HYPOTHESES_UNVERIFIED.to_string());
                f64::INFINITY
            };
            let b = if p.is_infinite() { 1.0 } else { b };
            let (a, arg) = log_grid_min(|a| a.powf(1.0 - 1.0 / p) / a.ln());
            let xprime = SpaceSpec::lp(q, Weight::one(), DomainKind::HalfLine);
            let cx = SpaceSpec::cesaro(x.clone());
            let rows = par_samples(n_samples, seed, |i, rng| {
                let fam = Family::for_index(i);
                let f = random_step(rng, DomainKind::HalfLine, fam, &step_opts);
                let lhs = down_norm(&f, &xprime)?.value.value;
                let rhs = norm(&f, &cx)?.value;
                Ok(row(i, fam, lhs, rhs))
            });
            (
                Setup {
                    constants: vec![
                        Constant::new("B", b, Provenance::Derived, "norm of C on Lp (Hardy constant p')"),
                        Constant::new("A", a, Provenance::Measured, format!("min of a^(1-1/p)/ln a on a log grid in [1.1,100], at a = {arg:.4}")),
                    ],
                    flags,
                    interval: (1.0 / b, a),
                },
                rows,
            )
        }
        DualityTheorem::HalfLine => {
            let (p, w, kind) = flatten_lp(&x).ok_or_else(|| bad(theorem, &x))?;
            let alpha = power_exponent(&w).ok_or_else(|| bad(theorem, &x))?;
            if kind != DomainKind::HalfLine {
                return Err(bad(theorem, &x));
            }
            let ip = if p.is_infinite() { 0.0 } else { 1.0 / p };
            let margin = 1.0 - alpha - ip;
            let mut flags = vec![];
            let bounded = margin > 0.0;
            if !bounded {
                flags.push(HYPOTHESES_UNVERIFIED.to_string());
            }
            let b = if bounded { 1.0 / margin } else { f64::INFINITY };
            let printed = if bounded && p.is_finite() { margin.powf(-p) } else { f64::NAN };
            let (a, arg) = log_grid_min(|a| a.powf(margin) / a.ln());
            let q = conjugate(p);
            let wdual = Weight::Power(-alpha);
            let rows = par_samples(n_samples, seed, |i, rng| {
                let fam = Family::for_index(i);
                let g = random_step(rng, DomainKind::HalfLine, fam, &step_opts);
                let lhs = cesaro_lp_dual(&g, p, &w)?.value;
                let rhs = majorant_norm(&g, q, &wdual).value;
                Ok(row(i, fam, lhs, rhs))
            });
            let mut constants = vec![
                Constant::new("B", b, Provenance::Derived, "norm of C on Lp(x^alpha): (1-alpha-1/p)^(-1)"),
                Constant::new("A", a, Provenance::Measured, format!("(a/ln a)*norm of dilation by 1/a, minimized on a log grid at a = {arg:.4}")),
            ];
            if printed.is_finite() {
                constants.push(Constant::new(
                    "B_printed",
                    printed,
                    Provenance::Stated,
                    "operator norm as printed with exponent -p; not used for the interval",
                ));
            }
            (
                Setup {
                    constants,
                    flags,
                    interval: (1.0 / b, a),
                },
                rows,
            )
        }
        DualityTheorem::UnitLower | DualityTheorem::UnitUpper => {
            let (p, w, kind) = flatten_lp(&x).ok_or_else(|| bad(theorem, &x))?;
            let alpha = power_exponent(&w).ok_or_else(|| bad(theorem, &x))?;
            if kind != DomainKind::UnitInterval {
                return Err(bad(theorem, &x));
            }
            let q = conjugate(p);
            let mut flags = vec![];
            let ip = if p.is_infinite() { 0.0 } else { 1.0 / p };
            if !(alpha < 1.0 - ip) || (p == 1.0 && alpha >= 0.0) {
                flags.push(HYPOTHESES_UNVERIFIED.to_string());
            }
            if alpha != 0.0 {
                flags.push(WEIGHTED_EXTENSION.to_string());
            }
            let (constants, interval) = if theorem == DualityTheorem::UnitLower {
                if p.is_infinite() {
                    return invalid("the unit-interval lower bound needs p < ∞");
                }
                // the printed constant fails for p − αp − 1 > 1; use the one the proof gives
                let printed = unit_hardy_constant(p, alpha);
                let d = crate::inequalities::unit_hardy_constant_from_proof(p, alpha);
                let mut constants =
                    vec![Constant::new("D", d, Provenance::Derived, "bound for C: X(1-x) -> X from the weighted Hardy proof")];
                if d != printed {
                    flags.push(DERIVED_FROM_PROOF.to_string());
                    constants.push(Constant::new("D_printed", printed, Provenance::Stated, "printed weighted Hardy constant, too small here"));
                }
                (constants, (1.0 / d, f64::INFINITY))
            } else {
                let m = if alpha == 0.0 { std::f64::consts::E } else { substitution_norm(q, alpha) };
                if alpha == 0.0 {
                    flags.push(DERIVED_FROM_PROOF.to_string());
                }
                (
                    vec![Constant::new(
                        "M",
                        m,
                        Provenance::Derived,
                        if alpha == 0.0 {
                            "endpoint bounds of T combined by interpolation"
                        } else {
                            "exact norm of T on L^q(x^-alpha/(1-x))"
                        },
                    )],
                    (0.0, m),
                )
            };
            let wdual = Weight::Product(vec![Weight::Power(-alpha), Weight::OneMinusXInv]).normalized();
            let rows = par_samples(n_samples, seed, |i, rng| {
                use rand::Rng;
                let fam = Family::for_index(i);
                let b = rng.gen_range(0.2..0.95);
                let opts = StepOptions {
                    support_end: Some(b),
                    ..step_opts
                };
                let g = random_step(rng, DomainKind::UnitInterval, fam, &opts);
                let lhs = cesaro_lp_dual(&g, p, &w)?.value;
                let rhs = majorant_norm(&g, q, &wdual).value;
                Ok(row(i, fam, lhs, rhs))
            });
            (
                Setup {
                    constants,
                    flags,
                    interval,
                },
                rows,
            )
        }
        DualityTheorem::Sequence => {
            let (p, w) = flatten_seq_lp(&x).ok_or_else(|| bad(theorem, &x))?;
            let alpha = seq_power_exponent(&w).ok_or_else(|| bad(theorem, &x))?;
            let q = conjugate(p);
            let ip = if p.is_infinite() { 0.0 } else { 1.0 / p };
            let mut flags = vec![];
            let bounded = alpha < 1.0 - ip;
            if !bounded {
                flags.push(HYPOTHESES_UNVERIFIED.to_string());
            }
            let (b, b_note, b_prov) = if !bounded {
                (f64::INFINITY, "C unbounded", Provenance::Derived)
            } else if alpha == 0.0 {
                (if p.is_infinite() { 1.0 } else { q }, "norm of C on lp (Hardy constant p')", Provenance::Derived)
            } else {
                let r = (1.0 - alpha) * p;
                (p * r / (r - 1.0), "stated bound p(1-alpha)p/((1-alpha)p-1)", Provenance::Stated)
            };
            let iq = if q.is_infinite() { 0.0 } else { 1.0 / q };
            let sigma3 = 3f64.powf(iq) * 1.0f64.max(3f64.powf(-alpha));
            let d = 4.0 * sigma3;
            let xprime = SpaceSpec::seq_lp(q, SeqWeight::Power(-alpha));
            let rows = par_samples(n_samples, seed, |i, rng| {
                let fam = Family::for_index(i);
                let g = random_sequence(rng, fam, 64);
                let lhs = cesaro_dual_norm(&g, &x)?.value;
                let rhs = seq_norm(&majorant_seq(&g), &xprime)?.value;
                Ok(row(i, fam, lhs, rhs))
            });
            (
                Setup {
                    constants: vec![
                        Constant::new("B", b, b_prov, b_note),
                        Constant::new("D", d, Provenance::Stated, "4 * bound 3^(1/p')max(1,3^(-alpha)) for the 3-fold dilation on X'"),
                    ],
                    flags,
                    interval: (1.0 / b, d),
                },
                rows,
            )
        }
        DualityTheorem::Isometric => {
            let (p, w, kind) = flatten_lp(&x).ok_or_else(|| bad(theorem, &x))?;
            let beta = power_exponent(&w).ok_or_else(|| bad(theorem, &x))?;
            if p.is_finite() || !(beta < 1.0) {
                return Err(bad(theorem, &x));
            }
            // v = x^β = x/W with W = x^(1−β), so w = (1 − β)x^(−β)
            let wl1 = Weight::Power(-beta);
            let rows = par_samples(n_samples, seed, |i, rng| {
                let fam = Family::for_index(i);
                let g = random_step(rng, kind, fam, &step_opts);
                let lhs = cesaro_lp_dual(&g, f64::INFINITY, &w)?.value;
                let rhs = (1.0 - beta) * majorant_norm(&g, 1.0, &wl1).value;
                Ok(row(i, fam, lhs, rhs))
            });
            (
                Setup {
                    constants: vec![Constant::new("isometry", 1.0, Provenance::Stated, "norms coincide")],
                    flags: vec![],
                    interval: (1.0, 1.0),
                },
                rows,
            )
        }
        DualityTheorem::Lorentz => {
            let SpaceSpec::Lorentz(phi) = &x else {
                return Err(bad(theorem, &x));
            };
            let c1 = phi.c1();
            let c2 = phi.c2();
            let mut flags = vec![];
            if !(c1.is_finite() && c2.is_finite()) {
                flags.push(HYPOTHESES_UNVERIFIED.to_string());
            }
            let (a, arg) = log_grid_min(|a| a / a.ln() * phi.dilation_ratio(1.0 / a));
            let cx = SpaceSpec::cesaro(x.clone());
            let l1 = Weight::PhiOverT(phi.clone());
            let rows = par_samples(n_samples, seed, |i, rng| {
                let fam = Family::for_index(i);
                let f = random_step(rng, DomainKind::HalfLine, fam, &step_opts);
                let lhs = norm(&f, &cx)?.value;
                let rhs = lp_norm(&f, &l1, 1.0).value;
                Ok(row(i, fam, lhs, rhs))
            });
            (
                Setup {
                    constants: vec![
                        Constant::new("c1", c1, gauge_provenance(phi), "sup of (1/phi(t)) int_0^t phi(s)/s ds"),
                        Constant::new("c2", c2, gauge_provenance(phi), "sup of (t/phi(t)) int_t^inf phi(s)/s^2 ds; also the norm of C on the Lorentz space"),
                        Constant::new("A", a, Provenance::Measured, format!("(a/ln a)*sup phi(s/a)/phi(s), minimized on a log grid at a = {arg:.4}")),
                    ],
                    flags,
                    interval: (1.0 / (a * c1), c2),
                },
                rows,
            )
        }
    };
    let rows: Vec<RatioRow> = rows.into_iter().collect::<Result<_>>()?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let (lo, hi) = setup.interval;
    let pass = ratios
        .iter()
        .all(|&r| r >= lo * (1.0 - tol) && r <= hi * (1.0 + tol));
    Ok(DualityReport {
        theorem,
        space: x.to_string(),
        ratio: theorem.ratio_description(),
        samples: n_samples,
        seed,
        tolerance: tol,
        min_ratio: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        max_ratio: ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        ratios,
        proven_interval: vec![lo, hi],
        constants: setup.constants,
        flags: setup.flags,
        pass,
        rows,
    })
}

fn gauge_provenance(phi: &ConcaveGauge) -> Provenance {
    match phi {
        ConcaveGauge::Power { .. } => Provenance::Derived,
        ConcaveGauge::PiecewiseLinear { .. } => Provenance::Measured,
    }
}

fn row(sample: usize, fam: Family, lhs: f64, rhs: f64) -> RatioRow {
    let ratio = if lhs == rhs { 1.0 } else { lhs / rhs };
    RatioRow {
        sample,
        family: fam.name(),
        lhs,
        rhs,
        ratio,
    }
}

fn bad(theorem: DualityTheorem, x: &SpaceSpec) -> crate::error::CesError {
    crate::error::CesError::InvalidInput(format!(
        "space {x} is not covered by the {:?} report",
        theorem
    ))
}
