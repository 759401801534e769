//! Library results against independent computations done here from scratch:
//! face enumeration, midpoint quadrature, hand-rolled rearrangements.

use ceslab::duality::{cesaro_dual_norm, sinnamon_sup};
use ceslab::interpolation::k_functional_weighted;
use ceslab::norms::{lorentz_norm, marcinkiewicz_norm};
use ceslab::{norm, seq_norm, ConcaveGauge, Domain, Sequence, SpaceSpec, StepFunction, Weight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to `max_cells` cells with values in [0, 5), a fifth of them zero.
fn random_fn(r: &mut ChaCha8Rng, domain: Domain, max_cells: usize) -> StepFunction {
    let h = domain.horizon();
    let cells = r.gen_range(1..=max_cells);
    let mut cuts: Vec<f64> = (0..cells - 1).map(|_| r.gen_range(0.0..h)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut bp = vec![0.0];
    bp.extend(cuts);
    bp.push(h);
    bp.dedup();
    let vals = (0..bp.len() - 1).map(|_| if r.gen_bool(0.2) { 0.0 } else { r.gen_range(0.0..5.0) }).collect();
    StepFunction::new(domain, bp, vals).unwrap()
}

/// `Σ_{k>n} k^s` for `s < −1`: direct sum to 10⁵, then the midpoint integral.
fn tail_sum(n: usize, s: f64) -> f64 {
    let cap = 100_000usize.max(n + 1);
    let direct: f64 = (n + 1..=cap).map(|k| (k as f64).powf(s)).sum();
    direct - (cap as f64 + 0.5).powf(s + 1.0) / (s + 1.0)
}

/// `‖g‖_{(Cℓ²(n^α))′}` by enumerating faces of the cone of nondecreasing
/// partial sums: on each face the optimum is a closed-form quotient.
fn dual_by_faces(g: &[f64], alpha: f64) -> f64 {
    let n = g.len();
    // <g,x> = Σ c_k S_k,  ‖Cx‖² = Σ q_k S_k²  with the tail folded into q_n
    let c: Vec<f64> = (0..n).map(|k| g[k] - g.get(k + 1).copied().unwrap_or(0.0)).collect();
    let mut q: Vec<f64> = (1..=n).map(|k| (k as f64).powf(2.0 * alpha - 2.0)).collect();
    q[n - 1] += tail_sum(n, 2.0 * alpha - 2.0);
    let mut best = 0.0f64;
    for zeros in 0..n {
        let m = n - zeros;
        for mask in 0..(1u32 << (m - 1)) {
            // bit i set: a block boundary after position zeros + i
            let mut blocks = vec![];
            let mut start = zeros;
            for i in 0..m {
                if i == m - 1 || mask & (1 << i) != 0 {
                    let cb: f64 = c[start..=zeros + i].iter().sum();
                    let qb: f64 = q[start..=zeros + i].iter().sum();
                    blocks.push((cb, qb));
                    start = zeros + i + 1;
                }
            }
            let z: Vec<f64> = blocks.iter().map(|(cb, qb)| cb / qb).collect();
            let feasible = z[0] >= 0.0 && z.windows(2).all(|w| w[0] <= w[1]);
            if feasible {
                best = best.max(blocks.iter().map(|(cb, qb)| cb * cb / qb).sum::<f64>().sqrt());
            }
        }
    }
    best
}

#[test]
fn sequence_dual_matches_face_enumeration() {
    let mut r = rng(1);
    for alpha in [0.0, -0.25] {
        let spec = SpaceSpec::parse(&format!("lp 2 (pow {alpha})")).unwrap();
        for _ in 0..60 {
            let n = r.gen_range(1..=6);
            let mut g: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..3.0)).collect();
            g[n - 1] += 0.1;
            let lib = cesaro_dual_norm(&Sequence::new(g.clone()).unwrap(), &spec).unwrap().value;
            let oracle = dual_by_faces(&g, alpha);
            assert!((lib - oracle).abs() <= 1e-9 * oracle, "g = {g:?}, α = {alpha}: {lib} vs {oracle}");
        }
    }
}

#[test]
fn sequence_dual_of_constant_pair() {
    let g = [1.0, 1.0];
    let v = dual_by_faces(&g, 0.0);
    let lib = cesaro_dual_norm(&Sequence::new(g.to_vec()).unwrap(), &SpaceSpec::parse("lp 2 (pow 0)").unwrap()).unwrap();
    assert!((lib.value - v).abs() < 1e-12);
    assert!(v >= 2f64.sqrt() / 2.0 && v <= 4.0 * 6f64.sqrt());
}

/// `∫₀^∞ (Cf)^p x^{αp}` by the midpoint rule: dyadic layers towards 0 in the
/// first cell, uniform elsewhere, closed-form tail `(F/x)^p x^{αp}` past the horizon.
/// Two resolutions combined by Richardson extrapolation.
fn ces_lp_midpoint(f: &StepFunction, p: f64, alpha: f64) -> f64 {
    (4.0 * ces_lp_midpoint_m(f, p, alpha, 4000) - ces_lp_midpoint_m(f, p, alpha, 2000)) / 3.0
}

fn ces_lp_midpoint_m(f: &StepFunction, p: f64, alpha: f64, m: usize) -> f64 {
    let cells: Vec<(f64, f64, f64)> = f.cells().collect();
    let mut total = 0.0;
    let mut mass = 0.0;
    for (i, &(l, r, v)) in cells.iter().enumerate() {
        let mut pieces = vec![];
        if i == 0 {
            let mut hi = r;
            for _ in 0..80 {
                pieces.push((hi / 2.0, hi));
                hi /= 2.0;
            }
        } else {
            pieces.push((l, r));
        }
        for (a, b) in pieces {
            let h = (b - a) / m as f64;
            for j in 0..m {
                let x = a + h * (j as f64 + 0.5);
                let cf = (mass + v * (x - l)) / x;
                total += cf.powf(p) * x.powf(alpha * p) * h;
            }
        }
        mass += v * (r - l);
    }
    let hz = f.horizon();
    if let Domain::HalfLine { .. } = f.domain() {
        let e = (alpha - 1.0) * p;
        total += mass.powf(p) * -hz.powf(e + 1.0) / (e + 1.0);
    }
    total
}

#[test]
fn cesaro_norms_match_midpoint_quadrature() {
    let mut r = rng(2);
    for (p, alpha) in [(2.0, 0.0), (2.0, -0.25), (3.0, 0.2), (1.5, -0.1)] {
        for domain in [Domain::UnitInterval, Domain::half_line(3.0).unwrap()] {
            let spec = SpaceSpec::cesaro(SpaceSpec::lp(p, Weight::Power(alpha), domain.kind()));
            for _ in 0..4 {
                let f = random_fn(&mut r, domain, 5);
                let lib = norm(&f, &spec).unwrap().value;
                let oracle = ces_lp_midpoint(&f, p, alpha).powf(1.0 / p);
                assert!((lib - oracle).abs() <= 1e-8 * oracle.max(1e-300), "{spec}: {lib} vs {oracle}");
            }
        }
    }
}

/// `(fw)*` integrated to `t`, with `w = x^β` averaged per cell in closed form.
fn k_by_sorting(f: &StepFunction, beta: f64, t: f64) -> f64 {
    let mut cells: Vec<(f64, f64)> = f
        .cells()
        .map(|(l, r, v)| {
            let avg = (r.powf(beta + 1.0) - l.powf(beta + 1.0)) / ((beta + 1.0) * (r - l));
            (v.abs() * avg, r - l)
        })
        .collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (mut acc, mut used) = (0.0, 0.0);
    for (v, len) in cells {
        let take = len.min(t - used);
        if take <= 0.0 {
            break;
        }
        acc += v * take;
        used += take;
    }
    acc
}

#[test]
fn weighted_k_functional_matches_sorting() {
    let mut r = rng(3);
    for _ in 0..100 {
        let domain = if r.gen_bool(0.5) { Domain::UnitInterval } else { Domain::half_line(4.0).unwrap() };
        let f = random_fn(&mut r, domain, 9);
        let beta = r.gen_range(-0.5..1.5);
        let t = r.gen_range(0.01..5.0);
        let lib = k_functional_weighted(&f, t, &Weight::Power(beta)).unwrap().value;
        let oracle = k_by_sorting(&f, beta, t);
        assert!((lib - oracle).abs() <= 1e-12 * oracle.max(1.0), "{lib} vs {oracle}");
    }
}

/// `∫ f·g̃` with the least nonincreasing majorant of `g` built by a suffix maximum.
fn sinnamon_closed_form(f: &StepFunction, g: &StepFunction) -> f64 {
    let mut grid: Vec<f64> = f.breakpoints().iter().chain(g.breakpoints()).copied().collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mids: Vec<(f64, f64)> = grid.windows(2).map(|w| (0.5 * (w[0] + w[1]), w[1] - w[0])).collect();
    let mut running = 0.0f64;
    let mut tilde = vec![0.0; mids.len()];
    for (i, &(x, _)) in mids.iter().enumerate().rev() {
        let gv = if x < g.horizon() { g.eval(x) } else { 0.0 };
        running = running.max(gv);
        tilde[i] = running;
    }
    mids.iter()
        .zip(&tilde)
        .map(|(&(x, len), gt)| if x < f.horizon() { f.eval(x) * gt * len } else { 0.0 })
        .sum()
}

#[test]
fn sinnamon_lp_matches_closed_form() {
    let mut r = rng(4);
    for _ in 0..80 {
        let (df, dg) = if r.gen_bool(0.5) {
            (Domain::UnitInterval, Domain::UnitInterval)
        } else {
            (Domain::half_line(r.gen_range(1.0..4.0)).unwrap(), Domain::half_line(r.gen_range(1.0..4.0)).unwrap())
        };
        let f = random_fn(&mut r, df, 11);
        let g = random_fn(&mut r, dg, 11);
        let res = sinnamon_sup(&f.clone().into(), &g.clone().into()).unwrap();
        let oracle = sinnamon_closed_form(&f, &g);
        let scale = oracle.max(1e-12);
        assert!((res.lp_value - oracle).abs() <= 1e-9 * scale, "{} vs {oracle}", res.lp_value);
        assert!(res.witness.constraint_slack >= -1e-9 * scale);
    }
}

#[test]
fn lorentz_and_marcinkiewicz_by_hand() {
    let mut r = rng(5);
    let theta = 0.5;
    let phi = ConcaveGauge::power(theta).unwrap();
    for _ in 0..50 {
        let f = random_fn(&mut r, Domain::half_line(3.0).unwrap(), 7);
        let mut cells: Vec<(f64, f64)> = f.cells().map(|(l, r, v)| (v, r - l)).collect();
        cells.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (mut t, mut lor) = (0.0f64, 0.0);
        for &(v, len) in &cells {
            lor += v * ((t + len).powf(theta) - t.powf(theta));
            t += len;
        }
        let lib = lorentz_norm(&f, &phi).value;
        assert!((lib - lor).abs() <= 1e-12 * lor.max(1.0));

        // sup_t ∫₀ᵗ f*/φ(t) on a fine grid is a lower bound that the exact value barely exceeds
        let fstar_int = |s: f64| {
            let (mut acc, mut u) = (0.0, 0.0);
            for &(v, len) in &cells {
                let take = len.min(s - u).max(0.0);
                acc += v * take;
                u += len;
            }
            acc
        };
        let grid_sup = (1..=20_000)
            .map(|i| 6.0 * i as f64 / 20_000.0)
            .map(|s| fstar_int(s) / s.powf(theta))
            .fold(0.0, f64::max);
        let exact = marcinkiewicz_norm(&f, &phi, false).value;
        assert!(exact >= grid_sup * (1.0 - 1e-12) && exact <= grid_sup * (1.0 + 1e-3), "{exact} vs {grid_sup}");
    }
}

#[test]
fn sequence_cesaro_norm_with_tail() {
    // x = e_1: (Cx)_n = 1/n, so ‖Cx‖₂² = π²/6
    let v = seq_norm(&Sequence::unit(1), &SpaceSpec::parse("ces(lp 2 (pow 0))").unwrap()).unwrap().value;
    assert!((v - std::f64::consts::PI / 6f64.sqrt()).abs() < 1e-9, "{v}");
    // x = (1, 2): (Cx) = (1, 3/2, 3/3, 3/4, …)
    let direct = 1.0 + 2.25 + 9.0 * tail_sum(2, -2.0);
    let v = seq_norm(&Sequence::new(vec![1.0, 2.0]).unwrap(), &SpaceSpec::parse("ces(lp 2 (pow 0))").unwrap()).unwrap().value;
    assert!((v - direct.sqrt()).abs() < 1e-9, "{v} vs {}", direct.sqrt());
}
