//! Acceptance criteria. Each criterion prints one PASS/FAIL line with its
//! wall-clock time against its budget; the process exits non-zero if any
//! criterion fails or runs over budget.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use margulis::bounds::{self, BoundParams, Precision};
use margulis::freegroup::{self, ReducedWord};
use margulis::hypgeom::{self, GeneratorPair, Isometry, Triangle};
use margulis::packing;
use margulis::precise::{self, Ext};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, u64, Box<dyn Fn() -> Check + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// 500 log-uniformly spaced values spanning [0.1005, 0.5493].
fn lambda_grid() -> Vec<f64> {
    let (lo, hi) = (0.1005f64.ln(), 0.5493f64.ln());
    (0..500)
        .map(|i| (lo + (hi - lo) * i as f64 / 499.0).exp())
        .collect()
}

fn word_counts() -> Check {
    for n in 1..=12u32 {
        let ball = freegroup::enumerate_ball(n).map_err(|e| e.to_string())?;
        let expected = 2 * (3u64.pow(n) - 1) + 1;
        ensure(ball.len() as u64 == expected, || {
            format!("n = {n}: enumerated {} words, expected {expected}", ball.len())
        })?;
    }
    Ok("#V_n = 2(3^n - 1) + 1 for n = 1..12".into())
}

fn cyclic_lemma() -> Check {
    let ball = freegroup::enumerate_ball(4).map_err(|e| e.to_string())?;
    ensure(ball.len() == 161, || format!("V_4 has {} words", ball.len()))?;
    let mut tight = 0;
    for t in ball.iter() {
        for k in 1..=8u32 {
            // distinct elements t^n of length <= k
            let window = 2 * k as i64 + 2;
            let brute = (-window..=window)
                .map(|n| t.pow(n))
                .filter(|p| p.len() <= k as usize)
                .collect::<HashSet<_>>()
                .len() as u64;
            let count = freegroup::count_cyclic_powers(&t, k);
            ensure(count == brute, || format!("{t}, k = {k}: {count} vs brute force {brute}"))?;
            ensure(count <= 2 * k as u64 + 1, || format!("{t}, k = {k}: {count} > 2k + 1"))?;
            let equality = count == 2 * k as u64 + 1;
            ensure(equality == (t.len() == 1), || {
                format!("{t}, k = {k}: equality {equality} for length {}", t.len())
            })?;
            tight += equality as usize;
        }
    }
    Ok(format!("161 words x k = 1..8, equality in {tight} cases (single letters only)"))
}

/// `π(sinh µ − µ)` from the Taylor series in exact rationals, with `µ` the
/// double nearest 0.104 and a 60-digit rational π.
fn ball_volume_series(mu: f64) -> f64 {
    let pi: BigRational = {
        let digits = "314159265358979323846264338327950288419716939937510582097494";
        let num: BigInt = digits.parse().unwrap();
        BigRational::new(num, BigInt::from(10).pow(digits.len() as u32 - 1))
    };
    let x = BigRational::from_float(mu).unwrap();
    let x2 = &x * &x;
    let mut term = &x * &x2 / BigInt::from(6);
    let mut sum = BigRational::zero();
    let mut k = 1u32;
    let eps = BigRational::new(BigInt::one(), BigInt::from(10).pow(60));
    while term > eps {
        sum += &term;
        term = term * &x2 / BigInt::from((2 * k + 2) * (2 * k + 3));
        k += 1;
    }
    (pi * sum).to_f64().unwrap()
}

fn ball_volume_constant() -> Check {
    let v = hypgeom::ball_volume(0.052);
    ensure((v / 0.000589 - 1.0).abs() < 1e-3, || format!("double: {v}"))?;
    let mut ext = Ext::default();
    let ev = precise::to_f64(&precise::ball_volume(&mut ext, 0.052));
    let series = ball_volume_series(0.104);
    ensure((ev - 0.00058930).abs() <= 1e-8, || format!("extended: {ev}"))?;
    ensure((series - 0.00058930).abs() <= 1e-8, || format!("series: {series}"))?;
    ensure((ev - series).abs() < 1e-19, || format!("extended {ev} vs series {series}"))?;
    Ok(format!("double {v:.9e}, 256-bit {ev:.12e}, series {series:.12e}"))
}

fn packing_constant() -> Check {
    let ratio = PI / hypgeom::ball_volume(0.052);
    ensure(ratio < 5334.0, || format!("double ratio {ratio}"))?;
    let mut ext = Ext::default();
    let ext_ratio = precise::to_f64(&precise::packing_ratio(&mut ext, 0.104));
    ensure(ext_ratio > 5330.0 && ext_ratio < 5334.0, || format!("256-bit ratio {ext_ratio}"))?;
    Ok(format!("pi / vol b = {ext_ratio:.6} in (5330, 5334)"))
}

fn n_definition(grid: &[f64]) -> Check {
    let mut max_n = 0;
    for &lambda in grid {
        let p = BoundParams::new(lambda);
        let n = bounds::compute_n(&p).map_err(|e| e.to_string())?;
        let n_ext = bounds::compute_n_with(&p, Precision::Extended).map_err(|e| e.to_string())?;
        ensure(n == n_ext, || format!("lambda = {lambda}: double {n}, 256-bit {n_ext}"))?;
        let here = bounds::margulis_gap(n, &p);
        ensure(here >= 0.0, || format!("lambda = {lambda}: gap({n}) = {here}"))?;
        if n > 1 {
            let before = bounds::margulis_gap(n - 1, &p);
            ensure(before < 0.0, || format!("lambda = {lambda}: gap({}) = {before}", n - 1))?;
        }
        max_n = max_n.max(n);
    }
    Ok(format!("500 values, double == 256-bit, largest N = {max_n}"))
}

fn nestimate(grid: &[f64]) -> Check {
    let anchor = 1.0 + 110.0 * 1.11f64 * 1.11f64.ln();
    ensure((anchor - 13.7).abs() <= 0.05, || format!("anchor {anchor}"))?;
    for &lambda in grid {
        let p = BoundParams::new(lambda);
        let n = bounds::compute_n(&p).map_err(|e| e.to_string())?;
        let est = bounds::nestimate(&p).map_err(|e| e.to_string())?;
        ensure((n as f64) < est, || format!("lambda = {lambda}: N = {n} >= {est}"))?;
    }
    Ok(format!("N < 1 + 110 beta log beta on the grid; anchor = {anchor:.4}"))
}

fn dominance(grid: &[f64]) -> Check {
    let mut tightest = f64::INFINITY;
    for &lambda in grid {
        let p = BoundParams::new(lambda);
        let exact = bounds::volume_bound_exact(&p).map_err(|e| e.to_string())?;
        let closed = bounds::volume_bound_closed(&p).map_err(|e| e.to_string())?;
        ensure(exact <= closed, || format!("lambda = {lambda}: {exact} > {closed}"))?;
        tightest = tightest.min(closed / exact);
    }
    Ok(format!("exact <= closed form on the grid; smallest ratio {tightest:.4}"))
}

fn triangle_areas() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7261_6e67_6c65);
    let mut checked = 0;
    let mut worst = f64::NEG_INFINITY;
    while checked < 10_000 {
        let sides: [f64; 3] = std::array::from_fn(|_| rng.gen_range(1e-3..10.0));
        let Ok(t) = Triangle::new(sides[0], sides[1], sides[2]) else {
            continue;
        };
        let area = hypgeom::triangle_area(&t);
        let bound = PI.min(t.shortest_side());
        ensure(area < bound + 1e-9, || format!("sides {sides:?}: area {area} vs {bound}"))?;
        worst = worst.max(area - bound);
        checked += 1;
    }
    Ok(format!("10^4 triangles, max(area - min(pi, L)) = {worst:.3e}"))
}

fn jorgensen() -> Check {
    // tr[X, Y] = 2 + w² for X = [[1,1],[0,1]], Y = [[1,0],[w,1]], and
    // tr X = 2, so the value is |w|² = (1/2)² + (√3/2)² = 1/4 + 3/4.
    let exact = BigRational::new(1.into(), 4.into()) + BigRational::new(3.into(), 4.into());
    ensure(exact >= BigRational::one(), || "exact value below 1".into())?;

    let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let x = Isometry::parabolic(one);
    let y = Isometry::new(one, zero, omega, one).map_err(|e| e.to_string())?;
    let value = hypgeom::jorgensen_value(&x, &y);
    let exact_f = exact.to_f64().unwrap();
    ensure((value - exact_f).abs() < 1e-12, || format!("figure-eight value {value}"))?;

    let id = Isometry::identity();
    let trivial = hypgeom::jorgensen_value(&id, &id);
    ensure(trivial == 0.0, || format!("identity pair gives {trivial}"))?;
    Ok(format!("figure-eight = {value} (exact 1), identity pair = 0"))
}

fn relation_search(grid: &[f64]) -> Check {
    let one = Complex64::new(1.0, 0.0);
    let commuting = GeneratorPair::new(
        Isometry::parabolic(one),
        Isometry::parabolic(Complex64::new(0.0, 1.0)),
    );
    let min_budget = grid
        .iter()
        .map(|&l| packing::relation_length_bound(&BoundParams::new(l)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?
        .into_iter()
        .min()
        .unwrap();
    let practical = (min_budget as u32).min(freegroup::DEFAULT_BALL_CAP);
    let found = packing::search_relation(&commuting, practical, 1e-9).map_err(|e| e.to_string())?;
    let expected: ReducedWord = "xyXY".parse().unwrap();
    ensure(found.as_ref() == Some(&expected), || format!("commuting pair gave {found:?}"))?;
    ensure(4 <= min_budget, || format!("budget {min_budget}"))?;
    let recheck = precise::word_distance_to_identity(&expected, &commuting.x, &commuting.y);
    ensure(recheck <= 1e-9, || format!("256-bit recheck {recheck}"))?;

    let sanov = GeneratorPair::new(
        Isometry::from_real(1.0, 2.0, 0.0, 1.0).map_err(|e| e.to_string())?,
        Isometry::from_real(1.0, 0.0, 2.0, 1.0).map_err(|e| e.to_string())?,
    );
    let none = packing::search_relation(&sanov, 12, 1e-6).map_err(|e| e.to_string())?;
    ensure(none.is_none(), || format!("Sanov pair gave {none:?}"))?;
    Ok(format!("commutator xyXY within budget 8N >= {min_budget}; Sanov pair free up to length 12"))
}

fn main() -> ExitCode {
    let grid = lambda_grid();
    let criteria: Vec<Criterion> = vec![
        ("word-count identity", 10, Box::new(word_counts)),
        ("cyclic-subgroup lemma", 5, Box::new(cyclic_lemma)),
        ("ball-volume constant", 1, Box::new(ball_volume_constant)),
        ("packing constant certificate", 1, Box::new(packing_constant)),
        ("N(lambda) definition", 30, Box::new(|| n_definition(&grid))),
        ("nestimate bound", 5, Box::new(|| nestimate(&grid))),
        ("volume dominance", 5, Box::new(|| dominance(&grid))),
        ("triangle area bound", 5, Box::new(triangle_areas)),
        ("Jorgensen values", 1, Box::new(jorgensen)),
        ("relation search", 60, Box::new(|| relation_search(&grid))),
    ];

    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over time budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "[{status}] {:>2}. {name} ({:.2} s / {budget} s): {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
