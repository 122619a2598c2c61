//! Property suites run by `margulis verify`. Random inputs come from fixed
//! seeds, so every run checks the same cases.

use std::collections::HashSet;
use std::f64::consts::PI;

use clap::ValueEnum;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use margulis::bounds::{self, BoundParams, Precision};
use margulis::freegroup::{self, Letter, ReducedWord};
use margulis::hypgeom::{self, GeneratorPair, Isometry, Point, Triangle};
use margulis::packing;
use margulis::precise::{self, Ext};

use crate::Options;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Freegroup,
    Geometry,
    Bounds,
    Packing,
}

pub struct PropertyResult {
    pub name: String,
    pub outcome: Result<(), String>,
}

type Outcome = Result<(), String>;
type Check = fn(&Options) -> Outcome;
type Property = (Suite, String, Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x6d61_7267_756c_6973 ^ tag)
}

/// Log-uniform grid over [0.1005, 0.5493], endpoints included.
pub fn lambda_grid(points: usize) -> Vec<f64> {
    let (lo, hi) = (0.1005f64.ln(), 0.5493f64.ln());
    (0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> ReducedWord {
    let len = rng.gen_range(0..=max_len);
    freegroup::reduce((0..len).map(|_| Letter::from_code(rng.gen_range(0..4))))
}

fn random_complex(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn random_isometry(rng: &mut ChaCha8Rng) -> Isometry {
    loop {
        let [a, b, c, d] = std::array::from_fn(|_| random_complex(rng, 2.0));
        if (a * d - b * c).norm() < 0.1 {
            continue;
        }
        if let Ok(g) = Isometry::normalized(a, b, c, d) {
            return g;
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> Point {
    Point::new(random_complex(rng, 2.0), rng.gen_range(0.1..3.0)).expect("positive height")
}

fn properties() -> Vec<Property> {
    use Suite::*;
    let list: Vec<(Suite, &str, Check)> = vec![
        (Freegroup, "ball counts 2(3^n−1)+1", ball_counts),
        (Freegroup, "ball order: by length, then lexicographic", ball_order),
        (Freegroup, "reduce is idempotent", reduce_idempotent),
        (Freegroup, "concat: length bound and associativity", concat_laws),
        (Freegroup, "cyclic_reduce roundtrip on V_6", cyclic_roundtrip),
        (Freegroup, "power lengths 2|c| + |n||core| on V_5", power_lengths),
        (Freegroup, "cyclic subgroup has at most 2k+1 elements of length ≤ k (V_4, k ≤ 8)", cyclic_lemma),
        (Geometry, "distance symmetric and isometry invariant", distance_invariance),
        (Geometry, "displacement equivariance", displacement_equivariance),
        (Geometry, "ball volume matches shell integration", shell_integration),
        (Geometry, "triangle area < min(pi, shortest side) on 10^4 triangles", triangle_area_bound),
        (Geometry, "triangle angles: half-angle form agrees with law of cosines", triangle_angle_forms),
        (Geometry, "triangle area symmetric under side permutations", triangle_symmetry),
        (Geometry, "Jorgensen value conjugation invariant", jorgensen_conjugation),
        (Geometry, "figure-eight Jorgensen value = 1", jorgensen_figure_eight),
        (Bounds, "N(0.104) = 13 with default constants", n_anchor),
        (Bounds, "N(lambda) is the least solution on a 500-point grid", n_least_solution),
        (Bounds, "double and 256-bit N agree on a 100-point grid", n_precision_agreement),
        (Bounds, "N(lambda) nondecreasing on the grid", n_monotone),
        (Bounds, "N < nestimate on the grid", n_below_estimate),
        (Bounds, "exact volume bound ≤ closed form on the grid", volume_dominance),
        (Bounds, "closed form: double agrees with 256-bit", closed_form_precision),
        (Bounds, "index and rank bounds follow from the volume bound", index_rank_consistency),
        (Bounds, "inequality stays satisfied on [N, 4N] (50-point grid)", sign_pattern),
        (Packing, "ball volume pi(sinh 0.104 − 0.104) = 0.000589", ball_volume_anchor),
        (Packing, "packing constant certificate", constant_certificate),
        (Packing, "packing chain blocked at N(lambda) on the grid", packing_chain),
        (Packing, "coset bound: exact and log forms agree", coset_forms),
        (Packing, "commuting parabolics: relation xyXY", commuting_relation),
        (Packing, "equal generators: relation xY", equal_generators_relation),
        (Packing, "Sanov pair: no relation ≤ 10", sanov_free),
    ];
    list.into_iter().map(|(s, n, f)| (s, n.to_string(), f)).collect()
}

pub fn run(suite: Suite, opts: &Options) -> Vec<PropertyResult> {
    let selected: Vec<Property> = properties()
        .into_iter()
        .filter(|(s, _, _)| suite == Suite::All || *s == suite)
        .collect();
    selected
        .into_par_iter()
        .map(|(_, name, f)| {
            let name = if name == "packing constant certificate" {
                format!("{name} pi/vol b(mu/2) < {}", 2.0 * opts.packing_constant)
            } else {
                name
            };
            PropertyResult { name, outcome: f(opts) }
        })
        .collect()
}

fn ball_counts(_: &Options) -> Outcome {
    for n in 0..=10u32 {
        let ball = freegroup::enumerate_ball(n).map_err(err)?;
        let expected = 2 * (3u64.pow(n) - 1) + 1;
        ensure(ball.len() as u64 == expected, || format!("n = {n}: {} words", ball.len()))?;
        ensure(freegroup::ball_cardinality(n) == expected, || format!("cardinality at n = {n}"))?;
    }
    Ok(())
}

fn ball_order(_: &Options) -> Outcome {
    let ball = freegroup::enumerate_ball(6).map_err(err)?;
    let words: Vec<ReducedWord> = ball.iter().collect();
    for pair in words.windows(2) {
        let key = |w: &ReducedWord| (w.len(), w.letters().to_vec());
        ensure(key(&pair[0]) < key(&pair[1]), || format!("{} before {}", pair[0], pair[1]))?;
    }
    for w in &words {
        let again = freegroup::reduce(w.letters().iter().copied());
        ensure(&again == w, || format!("{w} is not reduced"))?;
    }
    Ok(())
}

fn reduce_idempotent(_: &Options) -> Outcome {
    let mut rng = rng(1);
    for _ in 0..2000 {
        let len = rng.gen_range(0..24);
        let raw: Vec<Letter> = (0..len).map(|_| Letter::from_code(rng.gen_range(0..4))).collect();
        let once = freegroup::reduce(raw.iter().copied());
        let twice = freegroup::reduce(once.letters().iter().copied());
        ensure(once == twice, || format!("{once} reduces further to {twice}"))?;
        ensure(once.len() <= len && once.len() % 2 == len % 2, || format!("parity for {once}"))?;
    }
    Ok(())
}

fn concat_laws(_: &Options) -> Outcome {
    let mut rng = rng(2);
    for _ in 0..2000 {
        let (u, v, w) = (random_word(&mut rng, 8), random_word(&mut rng, 8), random_word(&mut rng, 8));
        let uv = freegroup::concat(&u, &v);
        ensure(uv.len() <= u.len() + v.len(), || format!("|{u}{v}| too long"))?;
        let left = freegroup::concat(&uv, &w);
        let right = freegroup::concat(&u, &freegroup::concat(&v, &w));
        ensure(left == right, || format!("({u}{v}){w} != {u}({v}{w})"))?;
        ensure(freegroup::concat(&u, &freegroup::invert(&u)).is_empty(), || format!("{u} u^-1 != 1"))?;
    }
    Ok(())
}

fn cyclic_roundtrip(_: &Options) -> Outcome {
    for t in freegroup::enumerate_ball(6).map_err(err)?.iter() {
        let (c, core) = freegroup::cyclic_reduce(&t);
        let back = freegroup::concat(&c, &freegroup::concat(&core, &freegroup::invert(&c)));
        ensure(back == t, || format!("{t}: {c} · {core} · {c}^-1 = {back}"))?;
        ensure(core.is_cyclically_reduced(), || format!("{t}: core {core}"))?;
        ensure(2 * c.len() + core.len() == t.len(), || format!("{t}: lengths"))?;
    }
    Ok(())
}

fn power_lengths(_: &Options) -> Outcome {
    for t in freegroup::enumerate_ball(5).map_err(err)?.iter().filter(|t| !t.is_empty()) {
        for n in -8i64..=8 {
            let direct = t.pow(n).len() as u64;
            let closed = freegroup::power_length(&t, n);
            ensure(direct == closed, || format!("{t}^{n}: {direct} vs {closed}"))?;
        }
    }
    Ok(())
}

fn cyclic_lemma(_: &Options) -> Outcome {
    for t in freegroup::enumerate_ball(4).map_err(err)?.iter() {
        for k in 1..=8u32 {
            let window = 2 * k as i64 + 2;
            let brute = (-window..=window)
                .map(|n| t.pow(n))
                .filter(|p| p.len() <= k as usize)
                .collect::<HashSet<_>>()
                .len() as u64;
            let count = freegroup::count_cyclic_powers(&t, k);
            ensure(count == brute, || format!("{t}, k = {k}: {count} vs {brute}"))?;
            ensure(count <= 2 * k as u64 + 1, || format!("{t}, k = {k}: {count}"))?;
        }
    }
    Ok(())
}

fn distance_invariance(_: &Options) -> Outcome {
    let mut rng = rng(3);
    for _ in 0..1000 {
        let (p, q, g) = (random_point(&mut rng), random_point(&mut rng), random_isometry(&mut rng));
        let d = hypgeom::distance(&p, &q);
        ensure(d == hypgeom::distance(&q, &p), || "asymmetric".into())?;
        let moved = hypgeom::distance(&hypgeom::apply(&g, &p), &hypgeom::apply(&g, &q));
        ensure((moved - d).abs() <= 1e-8 * d.max(1.0), || format!("{d} moved to {moved}"))?;
    }
    Ok(())
}

fn displacement_equivariance(_: &Options) -> Outcome {
    let mut rng = rng(4);
    for _ in 0..1000 {
        let (p, x, h) = (random_point(&mut rng), random_isometry(&mut rng), random_isometry(&mut rng));
        let d = hypgeom::displacement(&x, &p);
        let conj = h * x * h.inverse();
        let e = hypgeom::displacement(&conj, &hypgeom::apply(&h, &p));
        ensure((d - e).abs() <= 1e-7 * d.max(1.0), || format!("{d} vs {e}"))?;
    }
    Ok(())
}

fn shell_integration(_: &Options) -> Outcome {
    // Simpson's rule for ∫₀ʳ 4π sinh²s ds
    for &r in &[0.052, 0.5, 1.0, 2.0, 3.0] {
        let m = 2000;
        let h = r / m as f64;
        let f = |s: f64| 4.0 * PI * s.sinh().powi(2);
        let inner: f64 = (1..m).map(|i| f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
        let integral = h / 3.0 * (f(0.0) + inner + f(r));
        let v = hypgeom::ball_volume(r);
        ensure((integral / v - 1.0).abs() < 1e-9, || format!("r = {r}: {v} vs {integral}"))?;
    }
    Ok(())
}

fn random_triangle(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Triangle {
    loop {
        let s: [f64; 3] = std::array::from_fn(|_| rng.gen_range(lo..hi));
        if let Ok(t) = Triangle::new(s[0], s[1], s[2]) {
            return t;
        }
    }
}

fn triangle_area_bound(_: &Options) -> Outcome {
    let mut rng = rng(5);
    for _ in 0..10_000 {
        let t = random_triangle(&mut rng, 1e-3, 10.0);
        let area = hypgeom::triangle_area(&t);
        let bound = PI.min(t.shortest_side());
        ensure(area < bound + 1e-9, || format!("{:?}: {area} vs {bound}", t.sides()))?;
    }
    Ok(())
}

fn triangle_angle_forms(_: &Options) -> Outcome {
    let mut rng = rng(6);
    for _ in 0..2000 {
        let t = random_triangle(&mut rng, 0.5, 3.0);
        let (a, b) = (t.angles(), t.angles_law_of_cosines());
        for i in 0..3 {
            ensure((a[i] - b[i]).abs() < 1e-7, || format!("{:?}: {a:?} vs {b:?}", t.sides()))?;
        }
    }
    Ok(())
}

fn triangle_symmetry(_: &Options) -> Outcome {
    let mut rng = rng(7);
    for _ in 0..2000 {
        let [a, b, c] = random_triangle(&mut rng, 1e-2, 5.0).sides();
        let base = hypgeom::triangle_area(&Triangle::new(a, b, c).map_err(err)?);
        for (x, y, z) in [(b, c, a), (c, a, b), (b, a, c), (a, c, b), (c, b, a)] {
            let other = hypgeom::triangle_area(&Triangle::new(x, y, z).map_err(err)?);
            ensure((other - base).abs() < 1e-12, || format!("({a}, {b}, {c}): {base} vs {other}"))?;
        }
    }
    Ok(())
}

fn jorgensen_conjugation(_: &Options) -> Outcome {
    let mut rng = rng(8);
    for _ in 0..1000 {
        let (x, y, h) = (random_isometry(&mut rng), random_isometry(&mut rng), random_isometry(&mut rng));
        let v = hypgeom::jorgensen_value(&x, &y);
        let w = hypgeom::jorgensen_value(&x.conjugate_by(&h), &y.conjugate_by(&h));
        ensure((v - w).abs() <= 1e-6 * v.max(1.0), || format!("{v} vs {w}"))?;
    }
    Ok(())
}

fn jorgensen_figure_eight(_: &Options) -> Outcome {
    let one = Complex64::new(1.0, 0.0);
    let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    let x = Isometry::parabolic(one);
    let y = Isometry::new(one, Complex64::new(0.0, 0.0), omega, one).map_err(err)?;
    let v = hypgeom::jorgensen_value(&x, &y);
    ensure((v - 1.0).abs() < 1e-12, || format!("value {v}"))
}

fn grid_params(opts: &Options, points: usize) -> Vec<BoundParams> {
    lambda_grid(points).into_iter().map(|l| opts.params(l)).collect()
}

fn n_anchor(_: &Options) -> Outcome {
    let n = bounds::compute_n(&BoundParams::new(0.104)).map_err(err)?;
    ensure(n == 13, || format!("N = {n}"))
}

fn n_least_solution(opts: &Options) -> Outcome {
    for p in grid_params(opts, 500) {
        let n = bounds::compute_n_with(&p, opts.precision).map_err(err)?;
        ensure(bounds::margulis_gap(n, &p) >= 0.0, || format!("lambda = {}: gap(N) < 0", p.lambda))?;
        ensure(n == 1 || bounds::margulis_gap(n - 1, &p) < 0.0, || {
            format!("lambda = {}: gap(N - 1) >= 0", p.lambda)
        })?;
    }
    Ok(())
}

fn n_precision_agreement(opts: &Options) -> Outcome {
    for p in grid_params(opts, 100) {
        let a = bounds::compute_n_with(&p, Precision::Double).map_err(err)?;
        let b = bounds::compute_n_with(&p, Precision::Extended).map_err(err)?;
        ensure(a == b, || format!("lambda = {}: {a} vs {b}", p.lambda))?;
    }
    Ok(())
}

fn n_monotone(opts: &Options) -> Outcome {
    let ns = grid_params(opts, 500)
        .iter()
        .map(bounds::compute_n)
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    ensure(ns.windows(2).all(|w| w[0] <= w[1]), || "N decreases somewhere".into())
}

fn n_below_estimate(opts: &Options) -> Outcome {
    for p in grid_params(opts, 500) {
        let n = bounds::compute_n(&p).map_err(err)?;
        let est = bounds::nestimate(&p).map_err(err)?;
        ensure((n as f64) < est, || format!("lambda = {}: N = {n}, estimate {est}", p.lambda))?;
    }
    Ok(())
}

fn volume_dominance(opts: &Options) -> Outcome {
    for p in grid_params(opts, 500) {
        let exact = bounds::volume_bound_exact(&p).map_err(err)?;
        let closed = bounds::volume_bound_closed(&p).map_err(err)?;
        ensure(exact <= closed, || format!("lambda = {}: {exact} > {closed}", p.lambda))?;
    }
    Ok(())
}

fn closed_form_precision(opts: &Options) -> Outcome {
    for p in grid_params(opts, 20) {
        let double = bounds::volume_bound_closed(&p).map_err(err)?;
        let ext = precise::volume_bound_closed(&p);
        // ln 3 − 2λ cancels near the boundary; scale by its condition number
        let kappa = bounds::LAMBDA_SUP * 2.0 * p.beta();
        ensure((double / ext - 1.0).abs() < 1e-14 * kappa, || format!("lambda = {}: {double} vs {ext}", p.lambda))?;
    }
    Ok(())
}

fn index_rank_consistency(opts: &Options) -> Outcome {
    for p in grid_params(opts, 100) {
        let r = bounds::full_report(&p).map_err(err)?;
        ensure(r.index_bound == r.volume_exact / p.weeks_volume, || format!("index at {}", p.lambda))?;
        if let Some(rank) = r.rank_bound {
            ensure((rank - 2.0 - r.index_bound.log2()).abs() < 1e-12, || format!("rank at {}", p.lambda))?;
        }
        ensure(r.invariant_violations().is_empty(), || r.invariant_violations().join("; "))?;
    }
    Ok(())
}

fn sign_pattern(opts: &Options) -> Outcome {
    for p in grid_params(opts, 50) {
        let n = bounds::compute_n(&p).map_err(err)?;
        let bad = bounds::sign_pattern_violations(&p, n, (4 * n).min(n + 100_000));
        ensure(bad.is_empty(), || format!("lambda = {}: fails at {:?}", p.lambda, &bad[..bad.len().min(5)]))?;
    }
    Ok(())
}

fn ball_volume_anchor(_: &Options) -> Outcome {
    let v = hypgeom::ball_volume(0.052);
    ensure((v / 0.000589 - 1.0).abs() < 1e-3, || format!("double {v}"))?;
    let e = precise::to_f64(&precise::ball_volume(&mut Ext::default(), 0.052));
    ensure((v - e).abs() < 1e-18, || format!("double {v} vs 256-bit {e}"))
}

fn constant_certificate(opts: &Options) -> Outcome {
    let bound = 2.0 * opts.packing_constant;
    let double = PI / hypgeom::ball_volume(opts.mu / 2.0);
    let ext = precise::to_f64(&precise::packing_ratio(&mut Ext::default(), opts.mu));
    ensure(double < bound && ext < bound, || format!("ratio {ext} not below {bound}"))
}

fn packing_chain(opts: &Options) -> Outcome {
    for p in grid_params(opts, 100) {
        let r = packing::packing_chain_check(&p).map_err(err)?;
        // the same comparison without the log-domain gap
        let n = r.n as f64;
        let lhs = packing::coset_lower_bound(r.n);
        let rhs = (hypgeom::ball_volume_ln(n * p.lambda + p.mu / 2.0)) - hypgeom::ball_volume(p.mu / 2.0).ln();
        ensure(lhs >= rhs, || format!("lambda = {}: {lhs} < {rhs}", p.lambda))?;
    }
    Ok(())
}

fn coset_forms(_: &Options) -> Outcome {
    for n in 1..=packing::EXACT_COSET_MAX_N {
        let e = packing::coset_lower_bound_exact(n).ok_or("missing exact value")?;
        let l = packing::coset_lower_bound_log(n);
        ensure((e - l).abs() < 1e-12, || format!("N = {n}: {e} vs {l}"))?;
    }
    Ok(())
}

fn expect_relation(gens: &GeneratorPair, expected: &str) -> Outcome {
    let found = packing::search_relation(gens, 6, packing::DEFAULT_RELATION_TOL).map_err(err)?;
    let w = found.ok_or("no relation found")?;
    ensure(w.to_string() == expected, || format!("found {w}"))?;
    let residual = precise::word_distance_to_identity(&w, &gens.x, &gens.y);
    ensure(residual <= packing::DEFAULT_RELATION_TOL, || format!("256-bit residual {residual}"))
}

fn commuting_relation(_: &Options) -> Outcome {
    let gens = GeneratorPair::new(
        Isometry::parabolic(Complex64::new(1.0, 0.0)),
        Isometry::parabolic(Complex64::new(0.0, 1.0)),
    );
    expect_relation(&gens, "xyXY")
}

fn equal_generators_relation(_: &Options) -> Outcome {
    let x = Isometry::parabolic(Complex64::new(1.0, 0.0));
    expect_relation(&GeneratorPair::new(x, x), "xY")
}

fn sanov_free(_: &Options) -> Outcome {
    let gens = GeneratorPair::new(
        Isometry::from_real(1.0, 2.0, 0.0, 1.0).map_err(err)?,
        Isometry::from_real(1.0, 0.0, 2.0, 1.0).map_err(err)?,
    );
    let found = packing::search_relation(&gens, 10, 1e-6).map_err(err)?;
    ensure(found.is_none(), || format!("found {}", found.unwrap()))
}
