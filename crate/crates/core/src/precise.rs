//! 256-bit evaluation of the quantities the double-precision code computes,
//! used to certify constants and to cross-check the `N(λ)` scan.

use astro_float::{BigFloat, Consts, RoundingMode};

use crate::bounds::{BoundParams, BoundsError, MAX_SCAN_N};
use crate::freegroup::{Letter, ReducedWord};
use crate::hypgeom::Isometry;

/// Working precision of the extended mode, in significand bits.
pub const EXTENDED_BITS: usize = 256;

const RM: RoundingMode = RoundingMode::ToEven;

/// A precision/rounding context with its own constant cache. Not `Sync`;
/// create one per thread.
pub struct Ext {
    p: usize,
    cc: Consts,
}

impl Default for Ext {
    fn default() -> Self {
        Self::new(EXTENDED_BITS)
    }
}

impl Ext {
    pub fn new(bits: usize) -> Self {
        Self {
            p: bits,
            cc: Consts::new().expect("constant cache allocation"),
        }
    }

    pub fn bits(&self) -> usize {
        self.p
    }

    /// Exact conversion; every double is representable at `p ≥ 53`.
    pub fn num(&self, f: f64) -> BigFloat {
        BigFloat::from_f64(f, self.p)
    }

    pub fn int(&self, n: u64) -> BigFloat {
        BigFloat::from_u64(n, self.p)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.p, RM, &mut self.cc)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.p, RM, &mut self.cc)
    }

    pub fn sinh(&mut self, a: &BigFloat) -> BigFloat {
        a.sinh(self.p, RM, &mut self.cc)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.p, RM)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.p, RM)
    }

    pub fn ln3(&mut self) -> BigFloat {
        let three = self.int(3);
        self.ln(&three)
    }

    /// `sinh(x) − x`, evaluated directly at working precision.
    pub fn sinh_minus_x(&mut self, x: &BigFloat) -> BigFloat {
        let s = self.sinh(x);
        self.sub(&s, x)
    }
}

/// Nearest double to a big float.
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    x.to_string().parse().unwrap_or(f64::NAN)
}

/// `π(sinh 2r − 2r)` at extended precision.
pub fn ball_volume(ext: &mut Ext, r: f64) -> BigFloat {
    let two_r = ext.mul(&ext.num(r), &ext.int(2));
    let s = ext.sinh_minus_x(&two_r);
    let pi = ext.pi();
    ext.mul(&pi, &s)
}

/// `π / vol b(µ/2) = 1 / (sinh µ − µ)`, the factor the packing constant has
/// to dominate (twice the packing constant must exceed it).
pub fn packing_ratio(ext: &mut Ext, mu: f64) -> BigFloat {
    let pi = ext.pi();
    let vol = ball_volume(ext, mu / 2.0);
    ext.div(&pi, &vol)
}

/// `ln((3ᴺ − 1)/(4N + 1)) − ln(C (sinh x − x))` with `x = 2Nλ + µ`.
pub fn margulis_gap(ext: &mut Ext, n: u64, params: &BoundParams) -> BigFloat {
    let ln3 = ext.ln3();
    let nb = ext.int(n);
    let n_ln3 = ext.mul(&nb, &ln3);
    let neg = n_ln3.neg();
    let third_pow = ext.exp(&neg);
    let one = ext.int(1);
    let tail = ext.sub(&one, &third_pow);
    let ln_tail = ext.ln(&tail);
    let denom = ext.int(4 * n + 1);
    let ln_denom = ext.ln(&denom);
    let ln_lhs = ext.sub(&ext.add(&n_ln3, &ln_tail), &ln_denom);

    let two_n_lambda = ext.mul(&ext.int(2 * n), &ext.num(params.lambda));
    let x = ext.add(&two_n_lambda, &ext.num(params.mu));
    let s = ext.sinh_minus_x(&x);
    let rhs = ext.mul(&ext.num(params.packing_constant), &s);
    let ln_rhs = ext.ln(&rhs);
    ext.sub(&ln_lhs, &ln_rhs)
}

/// Smallest `N ≥ 1` with nonnegative gap, with every sign decided at
/// extended precision.
///
/// Runs of `N` are skipped only when certified negative: for real `s ≥ N`
/// the gap has derivative at most `ln 3 · 3ᴺ/(3ᴺ − 1) − 2λ`, because
/// `(cosh x − 1)/(sinh x − x) ≥ 1` and the `−4/(4s+1)` term is negative.
pub fn compute_n(params: &BoundParams) -> Result<u64, BoundsError> {
    params.validate()?;
    let mut ext = Ext::default();
    let ln3 = ext.ln3();
    let two_lambda = ext.mul(&ext.int(2), &ext.num(params.lambda));
    // the double-precision range check can pass a λ a rounding error above (log 3)/2
    if !ext.sub(&ln3, &two_lambda).is_positive() {
        return Err(BoundsError::LambdaOutOfRange(params.lambda));
    }

    let one = ext.int(1);
    let mut n: u64 = 1;
    loop {
        if n > MAX_SCAN_N {
            return Err(BoundsError::ScanLimit(MAX_SCAN_N));
        }
        let gap = margulis_gap(&mut ext, n, params);
        if !gap.is_negative() {
            return Ok(n);
        }
        let third_pow = {
            let e = ext.mul(&ext.int(n), &ln3).neg();
            ext.exp(&e)
        };
        let slope = ext.sub(&ext.div(&ln3, &ext.sub(&one, &third_pow)), &two_lambda);
        let reach = to_f64(&ext.div(&gap.neg(), &slope));
        // every j < reach is certified negative; shave a relative 1e-12 off
        // so a rounded-up quotient never skips a candidate
        let jump = (reach * (1.0 - 1e-12)).ceil().max(1.0);
        n = n.saturating_add(jump as u64);
    }
}

/// Closed-form volume bound `λ(6 + 880β ln β)` at extended precision.
pub fn volume_bound_closed(params: &BoundParams) -> f64 {
    let mut ext = Ext::default();
    let ln3 = ext.ln3();
    let lambda = ext.num(params.lambda);
    let two_lambda = ext.mul(&ext.int(2), &lambda);
    let beta = ext.div(&ext.int(1), &ext.sub(&ln3, &two_lambda));
    let ln_beta = ext.ln(&beta);
    let inner = ext.add(&ext.int(6), &ext.mul(&ext.mul(&ext.int(880), &beta), &ln_beta));
    to_f64(&ext.mul(&lambda, &inner))
}

#[derive(Clone)]
struct ExtComplex {
    re: BigFloat,
    im: BigFloat,
}

impl ExtComplex {
    fn from_f64(ext: &Ext, re: f64, im: f64) -> Self {
        Self {
            re: ext.num(re),
            im: ext.num(im),
        }
    }

    fn add(&self, ext: &Ext, o: &Self) -> Self {
        Self {
            re: ext.add(&self.re, &o.re),
            im: ext.add(&self.im, &o.im),
        }
    }

    fn sub(&self, ext: &Ext, o: &Self) -> Self {
        Self {
            re: ext.sub(&self.re, &o.re),
            im: ext.sub(&self.im, &o.im),
        }
    }

    fn mul(&self, ext: &Ext, o: &Self) -> Self {
        Self {
            re: ext.sub(&ext.mul(&self.re, &o.re), &ext.mul(&self.im, &o.im)),
            im: ext.add(&ext.mul(&self.re, &o.im), &ext.mul(&self.im, &o.re)),
        }
    }

    fn norm(&self, ext: &Ext) -> BigFloat {
        ext.sqrt(&ext.add(&ext.mul(&self.re, &self.re), &ext.mul(&self.im, &self.im)))
    }
}

type ExtMatrix = [ExtComplex; 4];

fn ext_matrix(ext: &Ext, m: &Isometry) -> ExtMatrix {
    m.entries().map(|e| ExtComplex::from_f64(ext, e.re, e.im))
}

fn ext_mul(ext: &Ext, l: &ExtMatrix, r: &ExtMatrix) -> ExtMatrix {
    [
        l[0].mul(ext, &r[0]).add(ext, &l[1].mul(ext, &r[2])),
        l[0].mul(ext, &r[1]).add(ext, &l[1].mul(ext, &r[3])),
        l[2].mul(ext, &r[0]).add(ext, &l[3].mul(ext, &r[2])),
        l[2].mul(ext, &r[1]).add(ext, &l[3].mul(ext, &r[3])),
    ]
}

/// Entrywise distance from `W(x, y)` to the nearer of `±I`, with the product
/// formed at extended precision from the double-precision generator entries.
pub fn word_distance_to_identity(word: &ReducedWord, x: &Isometry, y: &Isometry) -> f64 {
    let ext = Ext::default();
    let neg = |m: &ExtMatrix| -> ExtMatrix {
        [m[3].clone(), negate(&m[1]), negate(&m[2]), m[0].clone()]
    };
    let gx = ext_matrix(&ext, x);
    let gy = ext_matrix(&ext, y);
    let gens = [gx.clone(), neg(&gx), gy.clone(), neg(&gy)];
    let one = ExtComplex::from_f64(&ext, 1.0, 0.0);
    let zero = ExtComplex::from_f64(&ext, 0.0, 0.0);
    let mut acc: ExtMatrix = [one.clone(), zero.clone(), zero, one.clone()];
    for l in word.letters() {
        acc = ext_mul(&ext, &acc, &gens[Letter::code(*l) as usize]);
    }
    let minus_one = negate(&one);
    let dist = |s: &ExtComplex| {
        [
            acc[0].sub(&ext, s).norm(&ext),
            acc[1].norm(&ext),
            acc[2].norm(&ext),
            acc[3].sub(&ext, s).norm(&ext),
        ]
        .iter()
        .map(to_f64)
        .fold(0.0, f64::max)
    };
    dist(&one).min(dist(&minus_one))
}

fn negate(z: &ExtComplex) -> ExtComplex {
    ExtComplex {
        re: z.re.neg(),
        im: z.im.neg(),
    }
}
