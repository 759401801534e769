use ceslab::duality::{associate_norm, DualMethod, Element};
use ceslab::interpolation::{k_functional, k_functional_weighted, KProfile};
use ceslab::norms::lp_norm;
use ceslab::operators::{
    cesaro, cesaro_seq, decreasing_rearrangement, dilation_seq, majorant, substitution_t, substitution_t_inv,
};
use ceslab::{norm, seq_norm, Domain, DomainKind, Sequence, SeqWeight, SpaceSpec, StepFunction, Weight};
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// Breakpoints from cumulative positive gaps, rescaled onto the domain.
fn build(domain: Domain, gaps: &[f64], values: &[f64]) -> StepFunction {
    let total: f64 = gaps.iter().sum();
    let h = domain.horizon();
    let mut bp = vec![0.0];
    let mut acc = 0.0;
    for g in &gaps[..gaps.len() - 1] {
        acc += g;
        bp.push(acc / total * h);
    }
    bp.push(h);
    bp.dedup();
    let values = values[..bp.len() - 1].to_vec();
    StepFunction::new(domain, bp, values).unwrap()
}

fn domain() -> impl Strategy<Value = Domain> {
    prop_oneof![Just(Domain::UnitInterval), (0.5f64..5.0).prop_map(|h| Domain::half_line(h).unwrap())]
}

fn step_on(d: Domain, lo: f64) -> impl Strategy<Value = StepFunction> {
    (1usize..8).prop_flat_map(move |n| {
        (prop::collection::vec(0.05f64..1.0, n), prop::collection::vec(lo..5.0, n))
            .prop_map(move |(g, v)| build(d, &g, &v))
    })
}

fn nonneg_step() -> impl Strategy<Value = StepFunction> {
    domain().prop_flat_map(|d| step_on(d, 0.0))
}

fn signed_step() -> impl Strategy<Value = StepFunction> {
    domain().prop_flat_map(|d| step_on(d, -5.0))
}

fn pair_on_same_domain() -> impl Strategy<Value = (StepFunction, StepFunction)> {
    domain().prop_flat_map(|d| (step_on(d, -5.0), step_on(d, -5.0)))
}

fn nonneg_seq() -> impl Strategy<Value = Sequence> {
    prop::collection::vec(0.0f64..5.0, 1..8).prop_map(|v| Sequence::new(v).unwrap())
}

fn lp_space(kind: DomainKind) -> impl Strategy<Value = SpaceSpec> {
    let alpha = match kind {
        DomainKind::UnitInterval => -0.3f64..0.3,
        DomainKind::HalfLine => -0.2f64..0.2,
    };
    (prop_oneof![Just(1.0), 1.2f64..4.0, Just(f64::INFINITY)], alpha)
        .prop_map(move |(p, a)| SpaceSpec::lp(p, Weight::Power(if p.is_infinite() { 0.0 } else { a }), kind))
}

fn space_for(kind: DomainKind) -> impl Strategy<Value = SpaceSpec> {
    lp_space(kind).prop_flat_map(move |x| {
        let ces_ok = kind == DomainKind::UnitInterval || x.nontriviality().map(|n| n.nontrivial).unwrap_or(false);
        let mut opts = vec![Just(x.clone()).boxed()];
        if ces_ok {
            opts.push(Just(SpaceSpec::cesaro(x.clone())).boxed());
        }
        prop::strategy::Union::new(opts)
    })
}

fn nonneg_with_space() -> impl Strategy<Value = (StepFunction, SpaceSpec)> {
    domain().prop_flat_map(|d| (step_on(d, 0.0), space_for(d.kind())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_integral_is_linear_and_ends_at_the_integral((f, g) in pair_on_same_domain(), a in -3.0f64..3.0, x in 0.0f64..1.0) {
        let x = x * f.horizon();
        let fg = f.scale(a).add(&g).unwrap();
        let lhs = fg.partial_integral().eval(x);
        let rhs = a * f.partial_integral().eval(x) + g.partial_integral().eval(x);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs() + rhs.abs()));
        prop_assert!(close(f.partial_integral().total(), f.integral(), 1e-13) || f.integral().abs() < 1e-12);
    }

    #[test]
    fn cesaro_is_linear((f, g) in pair_on_same_domain(), a in -3.0f64..3.0, x in 0.01f64..10.0) {
        let fg = f.scale(a).add(&g).unwrap();
        let lhs = cesaro(&fg).eval(x);
        let rhs = a * cesaro(&f).eval(x) + cesaro(&g).eval(x);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs() + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn majorant_is_idempotent_and_dominates(f in signed_step()) {
        let m = majorant(&f);
        prop_assert!(m.is_nonincreasing());
        prop_assert_eq!(majorant(&m).simplified(), m.simplified());
        for (l, r, v) in f.cells() {
            prop_assert!(m.eval(0.5 * (l + r)) >= v.abs());
        }
    }

    #[test]
    fn majorant_is_monotone(f in nonneg_step(), bump in 0.0f64..2.0) {
        let g = f.map_values(|v| v + bump);
        let (mf, mg) = (majorant(&f), majorant(&g));
        for (l, r, _) in f.cells() {
            let x = 0.5 * (l + r);
            prop_assert!(mf.eval(x) <= mg.eval(x));
        }
    }

    #[test]
    fn rearrangement_preserves_distribution(f in signed_step(), lambda in 0.0f64..5.0) {
        let r = decreasing_rearrangement(&f);
        let direct: f64 = f.cells().filter(|c| c.2.abs() > lambda).map(|(l, r, _)| r - l).sum();
        prop_assert!((r.d(lambda) - direct).abs() <= 1e-12 * f.horizon());
        prop_assert!(r.decreasing.is_nonincreasing());
        let again = decreasing_rearrangement(&r.decreasing);
        prop_assert_eq!(again.decreasing.simplified(), r.decreasing.simplified());
        prop_assert!(close(r.decreasing.integral(), f.abs().integral(), 1e-12) || f.is_zero());
    }

    #[test]
    fn substitution_round_trips(f in step_on(Domain::UnitInterval, -5.0)) {
        let back = substitution_t_inv(&substitution_t(&f).unwrap()).unwrap();
        prop_assert_eq!(back.values(), f.values());
        for (a, b) in back.breakpoints().iter().zip(f.breakpoints()) {
            prop_assert!((a - b).abs() <= 1e-13);
        }
    }

    #[test]
    fn dilating_then_averaging_a_constant(c in 0.1f64..5.0, len in 1usize..6, m in 1usize..5) {
        let x = Sequence::new(vec![c; len]).unwrap();
        let d = dilation_seq(&x, m).unwrap();
        prop_assert_eq!(d.len(), len * m);
        for v in cesaro_seq(&d, len * m).unwrap() {
            prop_assert!(close(v, c, 1e-14));
        }
    }

    #[test]
    fn norms_are_homogeneous((f, x) in nonneg_with_space(), c in prop_oneof![Just(1e-3), Just(1e3), 0.1f64..10.0]) {
        let a = norm(&f, &x).unwrap();
        let b = norm(&f.scale(c), &x).unwrap();
        if a.is_infinite() {
            prop_assert!(b.is_infinite());
        } else {
            prop_assert!(close(b.value, c * a.value, 1e-9), "{} vs {}", b.value, c * a.value);
        }
    }

    #[test]
    fn norms_have_the_ideal_property((f, x) in nonneg_with_space(), shrink in prop::collection::vec(0.0f64..1.0, 8)) {
        let vals: Vec<f64> = f.values().iter().zip(shrink.iter().cycle()).map(|(v, s)| v * s).collect();
        let g = StepFunction::new(f.domain(), f.breakpoints().to_vec(), vals).unwrap();
        let (nf, ng) = (norm(&f, &x).unwrap(), norm(&g, &x).unwrap());
        prop_assert!(ng.value <= nf.value * (1.0 + 1e-9) + 1e-300, "{} > {}", ng.value, nf.value);
        let neg = norm(&f.scale(-1.0), &x).unwrap();
        prop_assert!(neg.value == nf.value || close(neg.value, nf.value, 1e-12));
    }

    #[test]
    fn hardy_margin_keeps_its_sign_under_scaling(f in step_on(Domain::half_line(2.0).unwrap(), 0.0), c in prop_oneof![Just(1e-3), Just(1e3)]) {
        let a = ceslab::inequalities::check_hardy_classical(&f, 2.0).unwrap();
        let b = ceslab::inequalities::check_hardy_classical(&f.scale(c), 2.0).unwrap();
        prop_assert_eq!(a.pass, b.pass);
        prop_assert!(close(b.lhs, c * a.lhs, 1e-12) || a.lhs == 0.0);
    }

    #[test]
    fn k_profile_is_concave(f in signed_step()) {
        let k = KProfile::new(&f);
        let s = k.slopes();
        for w in s.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
        for t in [0.1, 0.5, 1.0, 3.0] {
            prop_assert!(close(k.eval(t), k_functional(&f, t).unwrap(), 1e-12) || k.eval(t) < 1e-12);
        }
    }

    #[test]
    fn k_witness_splits_f(f in nonneg_step(), t in 0.05f64..5.0, alpha in -0.3f64..0.5) {
        let w = Weight::Power(alpha);
        let k = k_functional_weighted(&f, t, &w).unwrap();
        let sum = k.g.add(&k.h).unwrap();
        let (a, b) = sum.align(&f).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
        let direct = lp_norm(&k.g, &w, 1.0).value;
        prop_assert!(close(k.g_l1, direct, 1e-9) || direct < 1e-12);
        prop_assert!(close(k.value, k.g_l1 + t * k.h_linf, 1e-12) || k.value < 1e-12);
    }

    #[test]
    fn step_functions_survive_json(f in signed_step()) {
        let s = serde_json::to_string(&f).unwrap();
        let back: StepFunction = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn space_specs_survive_display(x in domain().prop_flat_map(|d| space_for(d.kind())), outer in 0usize..3) {
        let x = match outer {
            0 => x,
            1 => SpaceSpec::tilde(x),
            _ => SpaceSpec::weighted(x, Weight::Product(vec![Weight::Power(0.25), Weight::Reciprocal(Box::new(Weight::Power(0.5)))])),
        };
        let s = x.to_string();
        prop_assert_eq!(SpaceSpec::parse(&s).unwrap(), x.clone(), "{}", s);
        let j = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<SpaceSpec>(&j).unwrap(), x);
    }

    #[test]
    fn weight_times_its_reciprocal_is_one(alpha in -2.0f64..2.0, x in 0.01f64..0.99) {
        for w in [Weight::Power(alpha), Weight::OneMinusXInv, Weight::OneMinusX] {
            let p = Weight::Product(vec![w.clone(), Weight::Reciprocal(Box::new(w))]);
            prop_assert!(close(p.eval(x), 1.0, 1e-14));
        }
    }

    #[test]
    fn associate_norm_scales_and_is_monotone(g in nonneg_seq(), c in 0.01f64..100.0, p in 1.2f64..4.0, bump in 0.0f64..1.0) {
        let x = SpaceSpec::seq_cesaro(SpaceSpec::seq_lp(p, SeqWeight::Power(0.0)));
        let a = associate_norm(&Element::from(g.clone()), &x, DualMethod::Exact).unwrap().value;
        let b = associate_norm(&Element::from(g.scale(c)), &x, DualMethod::Exact).unwrap().value;
        prop_assert!(close(b, c * a, 1e-10) || a == 0.0);
        let bigger = Sequence::new(g.entries().iter().map(|v| v + bump).collect()).unwrap();
        let d = associate_norm(&Element::from(bigger), &x, DualMethod::Exact).unwrap().value;
        prop_assert!(d >= a * (1.0 - 1e-10));
    }

    #[test]
    fn truncations_approach_the_norm(x in nonneg_seq(), p in 1.2f64..4.0) {
        // Fatou: norms of the head sections increase to the full norm
        let space = SpaceSpec::seq_cesaro(SpaceSpec::seq_lp(p, SeqWeight::Power(0.0)));
        let full = seq_norm(&x, &space).unwrap().value;
        let mut last = 0.0;
        for k in 1..=x.len() {
            let head = Sequence::new(x.entries()[..k].to_vec()).unwrap();
            let v = seq_norm(&head, &space).unwrap().value;
            prop_assert!(v >= last * (1.0 - 1e-12));
            last = v;
        }
        prop_assert!(close(last, full, 1e-12) || full == 0.0);
    }
}
