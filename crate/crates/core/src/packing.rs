//! The counting-versus-volume argument behind the relation-length bound, and
//! a brute-force search for short relations between concrete generators.
//!
//! If no reduced word of length in `1..=8N` is a relation, at least
//! `2(3ᴺ − 1)/(4N + 1)` disjoint translates of the ball of radius `µ/2` fit
//! in the ball of radius `Nλ + µ/2`. At `N = N(λ)` that count exceeds the
//! volume ratio, so a relation of length at most `8N(λ)` must exist.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{compute_n, BoundParams, BoundsError};
use crate::freegroup::{self, FreeGroupError, Letter, ReducedWord, DEFAULT_BALL_CAP};
use crate::numeric::LN_3;
use crate::hypgeom::{ball_volume, ball_volume_ln, GeneratorPair, Isometry};

/// Default entrywise tolerance for recognising `±I`.
pub const DEFAULT_RELATION_TOL: f64 = 1e-9;

/// Largest `N` for which [`coset_lower_bound`] uses exact integers.
pub const EXACT_COSET_MAX_N: u64 = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PackingError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    FreeGroup(#[from] FreeGroupError),
    #[error("packing constant certificate fails: pi / vol b(mu/2) = {ratio} is not below 2 * {packing_constant}")]
    ConstantCertificate { ratio: f64, packing_constant: f64 },
    #[error("packing chain inconsistent at N = {n}: margin {margin} < 0")]
    Inconsistent { n: u64, margin: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
}

/// Logarithms of both sides of the packing comparison at `N = N(λ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub n: u64,
    /// `ln(2(3ᴺ − 1)/(4N + 1))`.
    pub coset_lower: f64,
    /// `ln(vol B / vol b)` with radii `Nλ + µ/2` and `µ/2`.
    pub volume_ratio: f64,
    /// `coset_lower − volume_ratio`.
    pub margin: f64,
    /// `π / vol b`, certified below twice the packing constant.
    pub constant_ratio: f64,
}

/// `ln(2(3ᴺ − 1)/(4N + 1))`, from exact integers when `N ≤ 40`.
pub fn coset_lower_bound(n: u64) -> f64 {
    coset_lower_bound_exact(n).unwrap_or_else(|| coset_lower_bound_log(n))
}

pub fn coset_lower_bound_exact(n: u64) -> Option<f64> {
    if n == 0 || n > EXACT_COSET_MAX_N {
        return None;
    }
    let numerator: u128 = 2 * (3u128.pow(n as u32) - 1);
    Some((numerator as f64).ln() - ((4 * n + 1) as f64).ln())
}

/// `N ln 3 + ln 2 − ln(4N + 1) + ln(1 − 3⁻ᴺ)`.
pub fn coset_lower_bound_log(n: u64) -> f64 {
    let nf = n as f64;
    nf * LN_3 + LN_2 - (4.0 * nf + 1.0).ln() + (-(-nf * LN_3).exp()).ln_1p()
}

/// Checks that the packing chain is blocked at `N(λ)`:
/// `2(3ᴺ − 1)/(4N + 1) ≥ vol B / vol b`, and that `π / vol b < 2C`.
pub fn packing_chain_check(params: &BoundParams) -> Result<PackingReport, PackingError> {
    params.validate()?;
    let small = params.mu / 2.0;
    let constant_ratio = std::f64::consts::PI / ball_volume(small);
    if !(constant_ratio < 2.0 * params.packing_constant) {
        return Err(PackingError::ConstantCertificate {
            ratio: constant_ratio,
            packing_constant: params.packing_constant,
        });
    }
    let n = compute_n(params)?;
    let coset_lower = coset_lower_bound(n);
    let big = n as f64 * params.lambda + small;
    let volume_ratio = ball_volume_ln(big) - ball_volume_ln(small);
    let margin = coset_lower - volume_ratio;
    if margin < 0.0 {
        return Err(PackingError::Inconsistent { n, margin });
    }
    Ok(PackingReport {
        n,
        coset_lower,
        volume_ratio,
        margin,
        constant_ratio,
    })
}

/// `8N(λ)`: some reduced word of positive length at most this is a relation.
pub fn relation_length_bound(params: &BoundParams) -> Result<u64, PackingError> {
    Ok(8 * compute_n(params)?)
}

/// Shortest reduced word `W` with `1 ≤ |W| ≤ max_length` and `W(x, y)` within
/// `tol` of `±I` entrywise. Ties go to the first word in enumeration order.
pub fn search_relation(
    gens: &GeneratorPair,
    max_length: u32,
    tol: f64,
) -> Result<Option<ReducedWord>, PackingError> {
    search_relation_capped(gens, max_length, tol, DEFAULT_BALL_CAP)
}

pub fn search_relation_capped(
    gens: &GeneratorPair,
    max_length: u32,
    tol: f64,
    cap: u32,
) -> Result<Option<ReducedWord>, PackingError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(PackingError::InvalidTolerance(tol));
    }
    if max_length > cap {
        return Err(FreeGroupError::CapExceeded {
            requested: max_length,
            cap,
            words: freegroup::ball_cardinality(max_length),
        }
        .into());
    }
    let table = [gens.x, gens.x.inverse(), gens.y, gens.y.inverse()];
    for len in 1..=max_length as usize {
        // one task per first letter; keep the first hit in letter order
        let hits: Vec<Option<Vec<Letter>>> = Letter::ALL
            .par_iter()
            .map(|&first| {
                let mut path = Vec::with_capacity(len);
                path.push(first);
                first_relation(&table, table[first.code() as usize], &mut path, len, tol)
                    .then_some(path)
            })
            .collect();
        if let Some(letters) = hits.into_iter().flatten().next() {
            return Ok(Some(freegroup::reduce(letters)));
        }
    }
    Ok(None)
}

/// Depth-first over reduced continuations of `path`, in letter order. On
/// success `path` holds the relation.
fn first_relation(
    table: &[Isometry; 4],
    prefix: Isometry,
    path: &mut Vec<Letter>,
    len: usize,
    tol: f64,
) -> bool {
    if path.len() == len {
        return is_projective_identity(&prefix, tol);
    }
    let last = *path.last().expect("path starts non-empty");
    for l in Letter::ALL {
        if l == last.inverse() {
            continue;
        }
        path.push(l);
        if first_relation(table, prefix * table[l.code() as usize], path, len, tol) {
            return true;
        }
        path.pop();
    }
    false
}

fn is_projective_identity(m: &Isometry, tol: f64) -> bool {
    let det = m.det();
    if !det.is_finite() || det.norm() == 0.0 {
        return false;
    }
    let s: Complex64 = det.sqrt().inv();
    let [a, b, c, d] = m.entries().map(|e| e * s);
    let one = Complex64::new(1.0, 0.0);
    let near = |sign: Complex64| {
        (a - sign).norm() <= tol && b.norm() <= tol && c.norm() <= tol && (d - sign).norm() <= tol
    };
    near(one) || near(-one)
}

/// `W(x, y)` in double precision.
pub fn evaluate_word(word: &ReducedWord, x: &Isometry, y: &Isometry) -> Isometry {
    let table = [*x, x.inverse(), *y, y.inverse()];
    word.letters()
        .iter()
        .fold(Isometry::identity(), |acc, l| acc * table[l.code() as usize])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sanov() -> GeneratorPair {
        GeneratorPair::new(
            Isometry::from_real(1.0, 2.0, 0.0, 1.0).unwrap(),
            Isometry::from_real(1.0, 0.0, 2.0, 1.0).unwrap(),
        )
    }

    #[test]
    fn coset_bound_examples() {
        assert!((coset_lower_bound(1) - (4.0f64 / 5.0).ln()).abs() < 1e-15);
        let exact = (2.0 * 1594322.0f64 / 53.0).ln();
        assert!((coset_lower_bound(13) - exact).abs() < 1e-14);
        let far = 1000.0 * LN_3 + LN_2 - 4001f64.ln();
        assert!((coset_lower_bound(1000) - far).abs() < 1e-12 * far);
        for n in 1..=EXACT_COSET_MAX_N {
            let (e, l) = (coset_lower_bound_exact(n).unwrap(), coset_lower_bound_log(n));
            assert!((e - l).abs() < 1e-12, "N = {n}");
        }
        assert!(coset_lower_bound_exact(41).is_none());
    }

    #[test]
    fn chain_holds_at_0_104() {
        let r = packing_chain_check(&BoundParams::new(0.104)).unwrap();
        assert_eq!(r.n, 13);
        assert!(r.margin >= 0.0);
        assert!(r.constant_ratio > 5330.0 && r.constant_ratio < 5334.0);
    }

    #[test]
    fn tiny_mu_breaks_the_certificate() {
        let err = packing_chain_check(&BoundParams::new(0.2).with_mu(1e-3)).unwrap_err();
        assert!(matches!(err, PackingError::ConstantCertificate { .. }));
    }

    #[test]
    fn relation_length_examples() {
        assert_eq!(relation_length_bound(&BoundParams::new(0.104)).unwrap(), 104);
        assert_eq!(relation_length_bound(&BoundParams::new(0.3)).unwrap(), 8 * 24);
        let tiny = BoundParams::new(1e-3).with_mu(1e-3);
        assert_eq!(relation_length_bound(&tiny).unwrap(), 8);
    }

    #[test]
    fn commuting_parabolics_give_the_commutator() {
        let gens = GeneratorPair::new(Isometry::parabolic(c(1.0, 0.0)), Isometry::parabolic(c(0.0, 1.0)));
        let w = search_relation(&gens, 6, DEFAULT_RELATION_TOL).unwrap().unwrap();
        assert_eq!(w.to_string(), "xyXY");
    }

    #[test]
    fn equal_generators_give_length_two() {
        let x = Isometry::parabolic(c(1.0, 0.0));
        let w = search_relation(&GeneratorPair::new(x, x), 4, DEFAULT_RELATION_TOL)
            .unwrap()
            .unwrap();
        assert_eq!(w.to_string(), "xY");
    }

    #[test]
    fn minus_identity_counts_as_relation() {
        // order-4 elliptic in SL(2): its square is -I
        let x = Isometry::from_real(0.0, -1.0, 1.0, 0.0).unwrap();
        let y = Isometry::from_real(1.0, 2.0, 0.0, 1.0).unwrap();
        let w = search_relation(&GeneratorPair::new(x, y), 4, 1e-12).unwrap().unwrap();
        assert_eq!(w.to_string(), "xx");
    }

    #[test]
    fn sanov_pair_has_no_short_relation() {
        assert_eq!(search_relation(&sanov(), 8, 1e-6).unwrap(), None);
    }

    #[test]
    fn search_guards() {
        assert!(matches!(
            search_relation(&sanov(), 15, 1e-9),
            Err(PackingError::FreeGroup(FreeGroupError::CapExceeded { .. }))
        ));
        assert!(matches!(
            search_relation(&sanov(), 4, 0.0),
            Err(PackingError::InvalidTolerance(_))
        ));
    }

    #[test]
    fn evaluate_word_matches_products() {
        let g = sanov();
        let w: ReducedWord = "xyX".parse().unwrap();
        let m = evaluate_word(&w, &g.x, &g.y);
        let expected = g.x * g.y * g.x.inverse();
        assert_eq!(m, expected);
    }
}
