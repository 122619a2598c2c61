//! Double-precision helpers that stay accurate where the naive formulas
//! cancel or overflow.

/// `ln 3`, correctly rounded.
pub const LN_3: f64 = 1.098_612_288_668_109_7;

/// `sinh(x) − x`, via its Taylor series below 1.
pub fn sinh_minus_x(x: f64) -> f64 {
    if x.abs() < 1.0 {
        let x2 = x * x;
        x * x2 / 6.0 * series_tail(x2)
    } else {
        x.sinh() - x
    }
}

/// `ln(sinh(x) − x)` for `x > 0`, finite for arguments where `sinh` itself
/// overflows.
pub fn ln_sinh_minus_x(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 1.0 {
        let x2 = x * x;
        3.0 * x.ln() - 6f64.ln() + series_tail(x2).ln()
    } else if x < 2.0 {
        (x.sinh() - x).ln()
    } else {
        x - std::f64::consts::LN_2 + excess_ln(x)
    }
}

/// `ln(1 − e^{−2x} − 2x·e^{−x})`, i.e. `ln(sinh x − x) − (x − ln 2)`. Only
/// meaningful for `x ≥ 2`, where the argument of `ln_1p` is well away from −1.
pub fn excess_ln(x: f64) -> f64 {
    let e = (-x).exp();
    (-(e * e) - 2.0 * x * e).ln_1p()
}

/// `6 (sinh x − x) / x³ = Σ_{k≥0} 6 x^{2k} / (2k+3)!`, given `x²`.
fn series_tail(x2: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        term *= x2 / ((2.0 * k + 4.0) * (2.0 * k + 5.0));
        sum += term;
        if term < sum * 1e-18 {
            return sum;
        }
        k += 1.0;
    }
}

/// `acosh(1 + u)` for `u ≥ 0` without forming `1 + u`.
pub fn acosh_1p(u: f64) -> f64 {
    (u + (u * (u + 2.0)).sqrt()).ln_1p()
}
