//! The space algebra and its s-expression syntax.
//!
//! ```text
//! Lp 2 (pow -0.25) halfline
//! Ces(Lp 2 (pow 0) unit)
//! Tilde(Lp inf (pow 0) unit)
//! Wt((Lp 2 (pow 0) halfline) (maxinv1mx))
//! Lorentz (tpow 0.5)          Marc (pl (0 0) (1 1) (slope 0))    MarcStar (tpow 0.5)
//! lp 2 (pow -0.25)            ces(lp 2 (pow 0))    tilde(lp 1 (pow 0))
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CesError, Result};
use crate::function::{Domain, DomainKind, StepFunction};
use crate::norms::{de_extended, ser_extended};
use crate::weight::{ConcaveGauge, SeqWeight, Weight};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpaceSpec {
    Lp {
        #[serde(serialize_with = "ser_extended", deserialize_with = "de_extended")]
        p: f64,
        weight: Weight,
        domain: DomainKind,
    },
    Lorentz(ConcaveGauge),
    Marcinkiewicz {
        gauge: ConcaveGauge,
        starred: bool,
    },
    Cesaro(Box<SpaceSpec>),
    Tilde(Box<SpaceSpec>),
    Weighted(Box<SpaceSpec>, Weight),
    SeqLp {
        #[serde(serialize_with = "ser_extended", deserialize_with = "de_extended")]
        p: f64,
        weight: SeqWeight,
    },
    SeqCesaro(Box<SpaceSpec>),
    SeqTilde(Box<SpaceSpec>),
    SeqWeighted(Box<SpaceSpec>, SeqWeight),
}

/// Where `CX` lives and why.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Nontriviality {
    pub nontrivial: bool,
    /// The `a` for which the test function was shown to lie in `X`.
    pub witness: Option<f64>,
    /// Left end of the support of `CX` (support shrinks when `X` has a
    /// non-integrable weight singularity).
    pub support_start: f64,
    pub reason: String,
}

impl SpaceSpec {
    pub fn lp(p: f64, weight: Weight, domain: DomainKind) -> SpaceSpec {
        SpaceSpec::Lp { p, weight, domain }
    }

    pub fn cesaro(inner: SpaceSpec) -> SpaceSpec {
        SpaceSpec::Cesaro(Box::new(inner))
    }

    pub fn tilde(inner: SpaceSpec) -> SpaceSpec {
        SpaceSpec::Tilde(Box::new(inner))
    }

    pub fn weighted(inner: SpaceSpec, w: Weight) -> SpaceSpec {
        SpaceSpec::Weighted(Box::new(inner), w)
    }

    pub fn seq_lp(p: f64, weight: SeqWeight) -> SpaceSpec {
        SpaceSpec::SeqLp { p, weight }
    }

    pub fn seq_cesaro(inner: SpaceSpec) -> SpaceSpec {
        SpaceSpec::SeqCesaro(Box::new(inner))
    }

    pub fn seq_tilde(inner: SpaceSpec) -> SpaceSpec {
        SpaceSpec::SeqTilde(Box::new(inner))
    }

    pub fn is_sequence(&self) -> bool {
        matches!(
            self,
            SpaceSpec::SeqLp { .. }
                | SpaceSpec::SeqCesaro(_)
                | SpaceSpec::SeqTilde(_)
                | SpaceSpec::SeqWeighted(..)
        )
    }

    /// Domain of a function space; `None` for sequence spaces.
    pub fn domain_kind(&self) -> Option<DomainKind> {
        match self {
            SpaceSpec::Lp { domain, .. } => Some(*domain),
            SpaceSpec::Lorentz(_) | SpaceSpec::Marcinkiewicz { .. } => Some(DomainKind::HalfLine),
            SpaceSpec::Cesaro(x) | SpaceSpec::Tilde(x) | SpaceSpec::Weighted(x, _) => x.domain_kind(),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_p = |p: f64| {
            if p >= 1.0 {
                Ok(())
            } else {
                Err(CesError::InvalidInput(format!("p must lie in [1, ∞], got {p}")))
            }
        };
        match self {
            SpaceSpec::Lp { p, weight, domain } => {
                check_p(*p)?;
                weight.validate(*domain)
            }
            SpaceSpec::Lorentz(g) => g.validate(),
            SpaceSpec::Marcinkiewicz { gauge, .. } => gauge.validate(),
            SpaceSpec::Cesaro(x) | SpaceSpec::Tilde(x) => {
                if x.is_sequence() {
                    return Err(CesError::DomainMismatch("function operator around a sequence space".into()));
                }
                x.validate()
            }
            SpaceSpec::Weighted(x, w) => {
                if x.is_sequence() {
                    return Err(CesError::DomainMismatch("function weight on a sequence space".into()));
                }
                x.validate()?;
                w.validate(x.domain_kind().unwrap())
            }
            SpaceSpec::SeqLp { p, weight } => {
                check_p(*p)?;
                weight.validate()
            }
            SpaceSpec::SeqCesaro(x) | SpaceSpec::SeqTilde(x) => {
                if !x.is_sequence() {
                    return Err(CesError::DomainMismatch("sequence operator around a function space".into()));
                }
                x.validate()
            }
            SpaceSpec::SeqWeighted(x, w) => {
                if !x.is_sequence() {
                    return Err(CesError::DomainMismatch("sequence weight on a function space".into()));
                }
                x.validate()?;
                w.validate()
            }
        }
    }

    /// Collapse nested weightings into one product weight.
    pub fn normalized(&self) -> SpaceSpec {
        match self {
            SpaceSpec::Lp { p, weight, domain } => SpaceSpec::Lp {
                p: *p,
                weight: weight.normalized(),
                domain: *domain,
            },
            SpaceSpec::Cesaro(x) => SpaceSpec::cesaro(x.normalized()),
            SpaceSpec::Tilde(x) => SpaceSpec::tilde(x.normalized()),
            SpaceSpec::Weighted(x, w2) => match x.normalized() {
                SpaceSpec::Weighted(inner, w1) => SpaceSpec::Weighted(
                    inner,
                    Weight::Product(vec![w1, w2.clone()]).normalized(),
                ),
                other => SpaceSpec::Weighted(Box::new(other), w2.normalized()),
            },
            SpaceSpec::SeqCesaro(x) => SpaceSpec::seq_cesaro(x.normalized()),
            SpaceSpec::SeqTilde(x) => SpaceSpec::seq_tilde(x.normalized()),
            SpaceSpec::SeqWeighted(x, w2) => match x.normalized() {
                SpaceSpec::SeqWeighted(inner, w1) => match (&w1, w2) {
                    (SeqWeight::Power(a), SeqWeight::Power(b)) => {
                        SpaceSpec::SeqWeighted(inner, SeqWeight::Power(a + b))
                    }
                    _ => {
                        let n = match (&w1, w2) {
                            (SeqWeight::Explicit(v), SeqWeight::Explicit(u)) => v.len().max(u.len()),
                            (SeqWeight::Explicit(v), _) | (_, SeqWeight::Explicit(v)) => v.len(),
                            _ => unreachable!(),
                        };
                        let mut vals: Vec<f64> = (1..=n).map(|k| w1.eval(k) * w2.eval(k)).collect();
                        // a power factor keeps varying past the explicit part
                        if matches!(w1, SeqWeight::Power(_)) || matches!(w2, SeqWeight::Power(_)) {
                            vals.push(w1.eval(n + 1) * w2.eval(n + 1));
                        }
                        SpaceSpec::SeqWeighted(inner, SeqWeight::Explicit(vals))
                    }
                },
                other => SpaceSpec::SeqWeighted(Box::new(other), w2.clone()),
            },
            other => other.clone(),
        }
    }

    pub fn parse(s: &str) -> Result<SpaceSpec> {
        let tree = parse_sexpr(s)?;
        let spec = spec_from(&tree)?;
        spec.validate()?;
        Ok(spec)
    }

    /// A weight in the same syntax as inside a space, e.g. `pow 0.5` or
    /// `(mul (pow -0.5) (1mx))`.
    pub fn parse_weight(s: &str, domain: DomainKind) -> Result<Weight> {
        let tree = parse_sexpr(s)?;
        let w = weight_from(unwrap_single(&tree), domain)?;
        w.validate(domain)?;
        Ok(w)
    }

    /// Decide whether `CX ≠ {0}` for `self = Cesaro(X)`.
    ///
    /// On the half-line the test function is `(1/x)χ[a, ∞)`, on the unit
    /// interval `χ[a, 1]`; membership is settled by exponent analysis.
    pub fn nontriviality(&self) -> Result<Nontriviality> {
        let inner = match self {
            SpaceSpec::Cesaro(x) => x.normalized(),
            SpaceSpec::SeqCesaro(x) => return seq_nontriviality(&x.normalized()),
            _ => {
                return Err(CesError::InvalidInput(
                    "nontriviality applies to Cesàro spaces".into(),
                ))
            }
        };
        let (p, weight, domain) = match flatten_lp(&inner) {
            Some(t) => t,
            None => match &inner {
                SpaceSpec::Lorentz(g) => {
                    // (1/(t+a)) against dφ converges iff φ grows sublinearly
                    let ok = g.exponent_at_inf() < 1.0;
                    return Ok(Nontriviality {
                        nontrivial: ok,
                        witness: ok.then_some(1.0),
                        support_start: 0.0,
                        reason: if ok {
                            "∫ dφ(t)/(t+a) converges".into()
                        } else {
                            "φ grows linearly, ∫ dφ(t)/(t+a) diverges".into()
                        },
                    });
                }
                SpaceSpec::Marcinkiewicz { gauge, .. } => {
                    // ln(1 + t/a)/φ(t) must stay bounded
                    let ok = gauge.exponent_at_inf() > 0.0;
                    return Ok(Nontriviality {
                        nontrivial: ok,
                        witness: ok.then_some(1.0),
                        support_start: 0.0,
                        reason: if ok {
                            "ln(1 + t/a)/φ(t) is bounded".into()
                        } else {
                            "bounded φ cannot absorb ln(1 + t/a)".into()
                        },
                    });
                }
                other => {
                    return Err(CesError::Undecidable(format!(
                        "no integrability analysis for {other}"
                    )))
                }
            },
        };
        let e1 = weight.exponent_at_one();
        match domain {
            DomainKind::HalfLine => {
                let einf = weight.exponent_at_inf();
                let tail_ok = if p.is_infinite() {
                    einf <= 1.0
                } else {
                    (einf - 1.0) * p < -1.0
                };
                if !tail_ok {
                    return Ok(Nontriviality {
                        nontrivial: false,
                        witness: None,
                        support_start: f64::INFINITY,
                        reason: format!("w(x)/x ≍ x^{} is not p-integrable at ∞", einf - 1.0),
                    });
                }
                // a non-integrable singularity at x = 1 forces a ≥ 1
                let singular = if p.is_infinite() { e1 < 0.0 } else { e1 * p <= -1.0 };
                let start = if singular { 1.0 } else { 0.0 };
                Ok(Nontriviality {
                    nontrivial: true,
                    witness: Some(start + 1.0),
                    support_start: start,
                    reason: if singular {
                        "weight is not integrable at 1; supp CX starts at 1".into()
                    } else {
                        "(1/x)χ[a,∞) ∈ X".into()
                    },
                })
            }
            DomainKind::UnitInterval => {
                let singular = if p.is_infinite() { e1 < 0.0 } else { e1 * p <= -1.0 };
                if singular {
                    Ok(Nontriviality {
                        nontrivial: false,
                        witness: None,
                        support_start: 1.0,
                        reason: "χ[a,1] ∉ X: weight not integrable at 1".into(),
                    })
                } else {
                    Ok(Nontriviality {
                        nontrivial: true,
                        witness: Some(0.5),
                        support_start: 0.0,
                        reason: "χ[a,1] ∈ X".into(),
                    })
                }
            }
        }
    }

    /// Check that a function can be measured in this space.
    pub fn check_domain(&self, d: &Domain) -> Result<()> {
        match self.domain_kind() {
            None => Err(CesError::DomainMismatch(
                "sequence space given a step function".into(),
            )),
            Some(k) if k != d.kind() => Err(CesError::DomainMismatch(format!(
                "space lives on {k}, function on {}",
                d.kind()
            ))),
            _ => Ok(()),
        }
    }
}

fn seq_nontriviality(x: &SpaceSpec) -> Result<Nontriviality> {
    // CX ≠ {0} iff (1/n) ∈ X
    let (p, w) = match x {
        SpaceSpec::SeqLp { p, weight } => (*p, weight.clone()),
        other => return Err(CesError::Undecidable(format!("no integrability analysis for {other}"))),
    };
    let e = w.exponent_at_inf();
    let ok = if p.is_infinite() { e <= 1.0 } else { (e - 1.0) * p < -1.0 };
    Ok(Nontriviality {
        nontrivial: ok,
        witness: ok.then_some(1.0),
        support_start: if ok { 1.0 } else { f64::INFINITY },
        reason: if ok { "(1/n) ∈ X".into() } else { "(1/n) ∉ X".into() },
    })
}

/// `Lp(w)` possibly wrapped in weightings, as `(p, combined weight, domain)`.
pub(crate) fn flatten_lp(x: &SpaceSpec) -> Option<(f64, Weight, DomainKind)> {
    match x {
        SpaceSpec::Lp { p, weight, domain } => Some((*p, weight.clone(), *domain)),
        SpaceSpec::Weighted(inner, w) => {
            let (p, w0, d) = flatten_lp(inner)?;
            Some((p, Weight::Product(vec![w0, w.clone()]).normalized(), d))
        }
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// s-expressions

#[derive(Debug, Clone, PartialEq)]
enum Sx {
    Atom(String),
    List(Vec<Sx>),
}

fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(CesError::Parse(msg.into()))
}

fn tokenize(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                // `Head(` is sugar for `(Head`
                if !cur.is_empty() {
                    out.push("(".to_string());
                    out.push(std::mem::take(&mut cur));
                } else {
                    out.push("(".to_string());
                }
            }
            ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(")".to_string());
            }
            c if c.is_whitespace() || c == ',' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_sexpr(s: &str) -> Result<Sx> {
    let tokens = tokenize(s);
    let mut stack: Vec<Vec<Sx>> = vec![vec![]];
    for t in tokens {
        match t.as_str() {
            "(" => stack.push(vec![]),
            ")" => {
                if stack.len() < 2 {
                    return parse_err("unbalanced ')'");
                }
                let done = stack.pop().unwrap();
                stack.last_mut().unwrap().push(Sx::List(done));
            }
            _ => stack.last_mut().unwrap().push(Sx::Atom(t)),
        }
    }
    if stack.len() != 1 {
        return parse_err("unbalanced '('");
    }
    let top = stack.pop().unwrap();
    if top.is_empty() {
        return parse_err("empty space description");
    }
    Ok(Sx::List(top))
}

/// Peel `((…))` down to the innermost list with more than one element.
fn unwrap_single(sx: &Sx) -> &Sx {
    match sx {
        Sx::List(items) if items.len() == 1 && matches!(items[0], Sx::List(_)) => unwrap_single(&items[0]),
        other => other,
    }
}

fn num(sx: &Sx) -> Result<f64> {
    match sx {
        Sx::Atom(a) => match a.as_str() {
            "inf" | "∞" | "+inf" => Ok(f64::INFINITY),
            _ => a
                .parse::<f64>()
                .map_err(|_| CesError::Parse(format!("expected a number, got '{a}'"))),
        },
        Sx::List(_) => parse_err("expected a number, got a list"),
    }
}

fn atom(sx: &Sx) -> Option<&str> {
    match sx {
        Sx::Atom(a) => Some(a.as_str()),
        _ => None,
    }
}

fn nums(sx: &Sx) -> Result<Vec<f64>> {
    match sx {
        Sx::List(items) => items.iter().map(num).collect(),
        _ => parse_err("expected a list of numbers"),
    }
}

fn spec_from(sx: &Sx) -> Result<SpaceSpec> {
    let sx = unwrap_single(sx);
    let items = match sx {
        Sx::List(items) => items,
        Sx::Atom(a) => return parse_err(format!("unexpected atom '{a}'")),
    };
    let head = items
        .first()
        .and_then(atom)
        .ok_or_else(|| CesError::Parse("space description must start with a name".into()))?;
    let rest = &items[1..];
    // operator arguments: either one list, or the remaining tokens as a list
    let inner = |rest: &[Sx]| -> Result<SpaceSpec> {
        if rest.len() == 1 {
            spec_from(&rest[0])
        } else {
            spec_from(&Sx::List(rest.to_vec()))
        }
    };
    match head {
        "Lp" => {
            if rest.len() != 3 {
                return parse_err("Lp takes p, a weight and a domain");
            }
            let p = num(&rest[0])?;
            let domain = match atom(&rest[2]) {
                Some("unit") => DomainKind::UnitInterval,
                Some("halfline") => DomainKind::HalfLine,
                _ => return parse_err("domain must be 'unit' or 'halfline'"),
            };
            let weight = weight_from(&rest[1], domain)?;
            Ok(SpaceSpec::Lp { p, weight, domain })
        }
        "Lorentz" => Ok(SpaceSpec::Lorentz(gauge_from(single(rest)?)?)),
        "Marc" | "MarcStar" => Ok(SpaceSpec::Marcinkiewicz {
            gauge: gauge_from(single(rest)?)?,
            starred: head == "MarcStar",
        }),
        "Ces" => Ok(SpaceSpec::cesaro(inner(rest)?)),
        "Tilde" => Ok(SpaceSpec::tilde(inner(rest)?)),
        "Wt" => {
            if rest.len() != 2 {
                return parse_err("Wt takes a parenthesized space and a weight");
            }
            let x = spec_from(&rest[0])?;
            let d = x
                .domain_kind()
                .ok_or_else(|| CesError::Parse("Wt needs a function space".into()))?;
            Ok(SpaceSpec::weighted(x, weight_from(&rest[1], d)?))
        }
        "lp" => {
            if rest.len() != 2 {
                return parse_err("lp takes p and a weight");
            }
            Ok(SpaceSpec::SeqLp {
                p: num(&rest[0])?,
                weight: seq_weight_from(&rest[1])?,
            })
        }
        "ces" => Ok(SpaceSpec::seq_cesaro(inner(rest)?)),
        "tilde" => Ok(SpaceSpec::seq_tilde(inner(rest)?)),
        "wt" => {
            if rest.len() != 2 {
                return parse_err("wt takes a parenthesized space and a weight");
            }
            Ok(SpaceSpec::SeqWeighted(
                Box::new(spec_from(&rest[0])?),
                seq_weight_from(&rest[1])?,
            ))
        }
        other => parse_err(format!("unknown space '{other}'")),
    }
}

fn single(rest: &[Sx]) -> Result<&Sx> {
    if rest.len() == 1 {
        Ok(&rest[0])
    } else {
        parse_err("expected exactly one argument")
    }
}

fn list_parts(sx: &Sx) -> Result<(&str, &[Sx])> {
    match sx {
        Sx::List(items) if !items.is_empty() => {
            let head = atom(&items[0]).ok_or_else(|| CesError::Parse("expected a name".into()))?;
            Ok((head, &items[1..]))
        }
        _ => parse_err("expected a parenthesized form"),
    }
}

fn weight_from(sx: &Sx, domain: DomainKind) -> Result<Weight> {
    let (head, args) = list_parts(sx)?;
    match head {
        "pow" => Ok(Weight::Power(num(single(args)?)?)),
        "inv1mx" => Ok(Weight::OneMinusXInv),
        "1mx" => Ok(Weight::OneMinusX),
        "maxinv1mx" => Ok(Weight::MaxOneMinusXInv),
        "phi/t" => Ok(Weight::PhiOverT(gauge_from(single(args)?)?)),
        "step" => {
            if args.len() != 2 {
                return parse_err("step takes (breakpoints) (values)");
            }
            let bp = nums(&args[0])?;
            let vals = nums(&args[1])?;
            let d = match domain {
                DomainKind::UnitInterval => Domain::UnitInterval,
                DomainKind::HalfLine => Domain::half_line(*bp.last().unwrap_or(&0.0))?,
            };
            Ok(Weight::Explicit(StepFunction::new(d, bp, vals)?))
        }
        "mul" => Ok(Weight::Product(
            args.iter().map(|a| weight_from(a, domain)).collect::<Result<_>>()?,
        )),
        "recip" => Ok(Weight::Reciprocal(Box::new(weight_from(single(args)?, domain)?))),
        other => parse_err(format!("unknown weight '{other}'")),
    }
}

fn seq_weight_from(sx: &Sx) -> Result<SeqWeight> {
    let (head, args) = list_parts(sx)?;
    match head {
        "pow" => Ok(SeqWeight::Power(num(single(args)?)?)),
        "vals" => Ok(SeqWeight::Explicit(args.iter().map(num).collect::<Result<_>>()?)),
        other => parse_err(format!("unknown sequence weight '{other}'")),
    }
}

fn gauge_from(sx: &Sx) -> Result<ConcaveGauge> {
    let (head, args) = list_parts(sx)?;
    match head {
        "tpow" => ConcaveGauge::power(num(single(args)?)?),
        "pl" => {
            let mut knots = Vec::new();
            let mut slope = None;
            for a in args {
                match list_parts(a) {
                    Ok(("slope", s)) => slope = Some(num(single(s)?)?),
                    _ => {
                        let v = nums(a)?;
                        if v.len() != 2 {
                            return parse_err("gauge knots are (t φ) pairs");
                        }
                        knots.push((v[0], v[1]));
                    }
                }
            }
            let slope = slope.ok_or_else(|| CesError::Parse("pl gauge needs (slope s)".into()))?;
            ConcaveGauge::piecewise_linear(knots, slope)
        }
        other => parse_err(format!("unknown gauge '{other}'")),
    }
}

// ---------------------------------------------------------------------------
// printing

fn fmt_num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else {
        format!("{x}")
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for ConcaveGauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConcaveGauge::Power { theta } => write!(f, "(tpow {})", fmt_num(*theta)),
            ConcaveGauge::PiecewiseLinear { knots, final_slope } => {
                write!(f, "(pl")?;
                for (t, p) in knots {
                    write!(f, " ({} {})", fmt_num(*t), fmt_num(*p))?;
                }
                write!(f, " (slope {}))", fmt_num(*final_slope))
            }
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Power(a) => write!(f, "(pow {})", fmt_num(*a)),
            Weight::OneMinusXInv => write!(f, "(inv1mx)"),
            Weight::OneMinusX => write!(f, "(1mx)"),
            Weight::MaxOneMinusXInv => write!(f, "(maxinv1mx)"),
            Weight::PhiOverT(g) => write!(f, "(phi/t {g})"),
            Weight::Explicit(s) => write!(
                f,
                "(step ({}) ({}))",
                fmt_list(s.breakpoints()),
                fmt_list(s.values())
            ),
            Weight::Product(ws) => {
                write!(f, "(mul")?;
                for w in ws {
                    write!(f, " {w}")?;
                }
                write!(f, ")")
            }
            Weight::Reciprocal(w) => write!(f, "(recip {w})"),
        }
    }
}

impl fmt::Display for SeqWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqWeight::Power(a) => write!(f, "(pow {})", fmt_num(*a)),
            SeqWeight::Explicit(v) => write!(f, "(vals {})", fmt_list(v)),
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Lp { p, weight, domain } => {
                write!(f, "Lp {} {} {}", fmt_num(*p), weight, domain)
            }
            SpaceSpec::Lorentz(g) => write!(f, "Lorentz {g}"),
            SpaceSpec::Marcinkiewicz { gauge, starred } => {
                write!(f, "{} {gauge}", if *starred { "MarcStar" } else { "Marc" })
            }
            SpaceSpec::Cesaro(x) => write!(f, "Ces({x})"),
            SpaceSpec::Tilde(x) => write!(f, "Tilde({x})"),
            SpaceSpec::Weighted(x, w) => write!(f, "Wt(({x}) {w})"),
            SpaceSpec::SeqLp { p, weight } => write!(f, "lp {} {}", fmt_num(*p), weight),
            SpaceSpec::SeqCesaro(x) => write!(f, "ces({x})"),
            SpaceSpec::SeqTilde(x) => write!(f, "tilde({x})"),
            SpaceSpec::SeqWeighted(x, w) => write!(f, "wt(({x}) {w})"),
        }
    }
}

impl std::str::FromStr for SpaceSpec {
    type Err = CesError;
    fn from_str(s: &str) -> Result<Self> {
        SpaceSpec::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_forms() {
        let s = SpaceSpec::parse("Ces(Lp 2 (pow -0.25) halfline)").unwrap();
        assert_eq!(
            s,
            SpaceSpec::cesaro(SpaceSpec::lp(2.0, Weight::Power(-0.25), DomainKind::HalfLine))
        );
        assert_eq!(s.to_string(), "Ces(Lp 2 (pow -0.25) halfline)");
        let s = SpaceSpec::parse("Lp 2 (pow 0) unit").unwrap();
        assert_eq!(s.domain_kind(), Some(DomainKind::UnitInterval));
    }

    #[test]
    fn round_trips() {
        for text in [
            "Lp inf (pow 0) unit",
            "Tilde(Lp 1 (mul (pow 0.5) (inv1mx)) unit)",
            "Wt((Lp 2 (pow 0) halfline) (maxinv1mx))",
            "Ces(Wt((Lp 2 (pow 0) halfline) (maxinv1mx)))",
            "Lorentz (tpow 0.5)",
            "Marc (pl (0 0) (1 1) (slope 0))",
            "MarcStar (pl (0 0) (1 2) (3 3) (slope 0.25))",
            "Lp 1 (phi/t (tpow 0.3333333333333333)) halfline",
            "Lp 2 (step (0 0.5 1) (1 2.5)) unit",
            "Lp 2 (recip (1mx)) unit",
            "ces(lp 2 (pow -0.25))",
            "tilde(lp 1 (pow 0))",
            "wt((lp 2 (pow 0)) (vals 1 2 3))",
        ] {
            let s = SpaceSpec::parse(text).unwrap();
            assert_eq!(s.to_string(), text);
            assert_eq!(SpaceSpec::parse(&s.to_string()).unwrap(), s);
        }
    }

    #[test]
    fn rejects_bad_strings() {
        for bad in [
            "",
            "Lp 2 (pow 0)",
            "Lp 0.5 (pow 0) unit",
            "Ces(Lp 2 (pow 0) unit",
            "Foo 1",
            "Lp 2 (inv1mx) halfline",
            "ces(Lp 2 (pow 0) unit)",
            "Lp x (pow 0) unit",
        ] {
            assert!(SpaceSpec::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn nested_weights_collapse() {
        let x = SpaceSpec::weighted(
            SpaceSpec::weighted(SpaceSpec::lp(2.0, Weight::one(), DomainKind::HalfLine), Weight::Power(1.0)),
            Weight::MaxOneMinusXInv,
        );
        assert_eq!(
            x.normalized(),
            SpaceSpec::weighted(
                SpaceSpec::lp(2.0, Weight::one(), DomainKind::HalfLine),
                Weight::Product(vec![Weight::Power(1.0), Weight::MaxOneMinusXInv])
            )
        );
    }

    #[test]
    fn nontriviality_examples() {
        let ces = |p: f64, d| SpaceSpec::cesaro(SpaceSpec::lp(p, Weight::one(), d));
        assert!(ces(2.0, DomainKind::HalfLine).nontriviality().unwrap().nontrivial);
        assert!(!ces(1.0, DomainKind::HalfLine).nontriviality().unwrap().nontrivial);
        assert!(ces(1.0, DomainKind::UnitInterval).nontriviality().unwrap().nontrivial);
        // x^α with α < 1 − 1/p
        let w = |a: f64| SpaceSpec::cesaro(SpaceSpec::lp(2.0, Weight::Power(a), DomainKind::HalfLine));
        assert!(w(0.49).nontriviality().unwrap().nontrivial);
        assert!(!w(0.5).nontriviality().unwrap().nontrivial);
    }

    #[test]
    fn support_shrinks_for_a_singular_weight() {
        let x = SpaceSpec::parse("Ces(Lp 2 (maxinv1mx) halfline)").unwrap();
        let n = x.nontriviality().unwrap();
        assert!(n.nontrivial);
        assert_eq!(n.support_start, 1.0);
        assert!(n.witness.unwrap() > 1.0);
    }

    #[test]
    fn undecidable_is_reported() {
        let x = SpaceSpec::parse("Ces(Tilde(Lp 2 (pow 0) halfline))").unwrap();
        assert!(matches!(x.nontriviality(), Err(CesError::Undecidable(_))));
    }

    #[test]
    fn bare_and_wrapped_weights() {
        let a = SpaceSpec::parse_weight("pow 0.5", DomainKind::HalfLine).unwrap();
        let b = SpaceSpec::parse_weight("(pow 0.5)", DomainKind::HalfLine).unwrap();
        assert_eq!(a, Weight::Power(0.5));
        assert_eq!(a, b);
        let m = SpaceSpec::parse_weight("mul (pow -0.5) (1mx)", DomainKind::UnitInterval).unwrap();
        assert_eq!(m, Weight::Product(vec![Weight::Power(-0.5), Weight::OneMinusX]));
        assert!(SpaceSpec::parse_weight("inv1mx", DomainKind::HalfLine).is_err());
        assert!(SpaceSpec::parse_weight("(wobble 1)", DomainKind::UnitInterval).is_err());
    }
}
