//! The integer `N(λ)` and the volume, index and rank bounds derived from it.
//!
//! `N(λ)` is the smallest positive integer `N` with
//!
//! ```text
//! (3ᴺ − 1)/(4N + 1) ≥ C · (sinh(2Nλ + µ) − (2Nλ + µ))
//! ```
//!
//! where `µ = 0.104` and `C = 2667` by default. A hyperbolic 3-manifold whose
//! fundamental group has two non-commuting elements moving a common point
//! less than `λ` has volume below `λ(8N(λ) − 2)`.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{excess_ln, ln_sinh_minus_x, LN_3};
use crate::precise;

/// Default `µ`, a Margulis number for every orientable hyperbolic 3-manifold.
pub const DEFAULT_MU: f64 = 0.104;
pub const DEFAULT_PACKING_CONSTANT: f64 = 2667.0;
/// Volume of the Weeks manifold. Only `0.94…` is needed by the bounds; the
/// extra digits are the known value of the constant.
pub const DEFAULT_WEEKS_VOLUME: f64 = 0.9427073628;
/// The closed-form estimates need `λ` strictly above this.
pub const CLOSED_FORM_LAMBDA_MIN: f64 = 0.1;
/// Upper end of the admissible `λ` range, `(log 3)/2` (excluded).
pub const LAMBDA_SUP: f64 = LN_3 / 2.0;
/// The scan for `N(λ)` gives up past this many candidates.
pub const MAX_SCAN_N: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("lambda = {0} is outside (0, (log 3)/2): the defining inequality is never eventually satisfiable at or beyond the boundary")]
    LambdaOutOfRange(f64),
    #[error("lambda = {0} must exceed 0.1: the estimate N(lambda) < 1 + 110 beta log beta is only proved for lambda in (0.1, (log 3)/2)")]
    ClosedFormOutOfRange(f64),
    #[error("parameter {name} = {value} must be positive and finite")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("no N <= {0} satisfies the inequality; lambda is too close to (log 3)/2 for a scan")]
    ScanLimit(u64),
    #[error("index bound {0} is below 1, so the rank bound is vacuous (rank <= 2 already)")]
    VacuousRank(f64),
    #[error("relation length {0} is below 4: a shortest relation between non-commuting elements has length at least 4")]
    RelationTooShort(u64),
}

/// Arithmetic used to decide the sign of the gap while scanning for `N(λ)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    /// 256-bit significands.
    Extended,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub lambda: f64,
    pub mu: f64,
    pub packing_constant: f64,
    pub weeks_volume: f64,
}

impl BoundParams {
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            mu: DEFAULT_MU,
            packing_constant: DEFAULT_PACKING_CONSTANT,
            weeks_volume: DEFAULT_WEEKS_VOLUME,
        }
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_packing_constant(mut self, c: f64) -> Self {
        self.packing_constant = c;
        self
    }

    pub fn with_weeks_volume(mut self, v0: f64) -> Self {
        self.weeks_volume = v0;
        self
    }

    /// `1/(log 3 − 2λ)`.
    pub fn beta(&self) -> f64 {
        1.0 / (LN_3 - 2.0 * self.lambda)
    }

    /// Checks `0 < λ < (log 3)/2` and positivity of the constants.
    pub fn validate(&self) -> Result<(), BoundsError> {
        let positive = |name, value: f64| {
            if value > 0.0 && value.is_finite() {
                Ok(())
            } else {
                Err(BoundsError::InvalidParameter { name, value })
            }
        };
        positive("mu", self.mu)?;
        positive("packing_constant", self.packing_constant)?;
        positive("weeks_volume", self.weeks_volume)?;
        if !(self.lambda > 0.0 && self.lambda < LAMBDA_SUP) {
            return Err(BoundsError::LambdaOutOfRange(self.lambda));
        }
        Ok(())
    }

    /// Additionally requires `λ > 0.1`.
    pub fn validate_closed_form(&self) -> Result<(), BoundsError> {
        self.validate()?;
        if self.lambda <= CLOSED_FORM_LAMBDA_MIN {
            return Err(BoundsError::ClosedFormOutOfRange(self.lambda));
        }
        Ok(())
    }
}

/// `ln((3ᴺ − 1)/(4N + 1)) − ln(C(sinh x − x))` with `x = 2Nλ + µ`; the
/// defining inequality holds at `N` iff this is `≥ 0`.
///
/// Evaluated in the log domain, so it stays finite far beyond the point where
/// `3ᴺ` overflows.
pub fn margulis_gap(n: u64, params: &BoundParams) -> f64 {
    let nf = n as f64;
    let x = 2.0 * nf * params.lambda + params.mu;
    // ln(1 − 3⁻ᴺ) − ln(4N + 1)
    let lhs_rest = (-(-nf * LN_3).exp()).ln_1p() - (4.0 * nf + 1.0).ln();
    if x < 2.0 {
        nf * LN_3 + lhs_rest - params.packing_constant.ln() - ln_sinh_minus_x(x)
    } else {
        // ln(sinh x − x) = x − ln 2 + excess; pair N ln 3 with 2Nλ before adding
        nf * (LN_3 - 2.0 * params.lambda) - params.mu + LN_2 + lhs_rest
            - params.packing_constant.ln()
            - excess_ln(x)
    }
}

/// `N(λ)` by a linear scan `N = 1, 2, …` in double precision.
pub fn compute_n(params: &BoundParams) -> Result<u64, BoundsError> {
    params.validate()?;
    let n = (1..=MAX_SCAN_N)
        .find(|&n| margulis_gap(n, params) >= 0.0)
        .ok_or(BoundsError::ScanLimit(MAX_SCAN_N))?;
    debug_assert!(n == 1 || margulis_gap(n - 1, params) < 0.0);
    Ok(n)
}

pub fn compute_n_with(params: &BoundParams, precision: Precision) -> Result<u64, BoundsError> {
    match precision {
        Precision::Double => compute_n(params),
        Precision::Extended => precise::compute_n(params),
    }
}

/// Values `N ≥ n_of_lambda` up to `horizon` where the inequality fails
/// again. Empty whenever the satisfying set looks upward closed on that
/// window.
pub fn sign_pattern_violations(params: &BoundParams, n_of_lambda: u64, horizon: u64) -> Vec<u64> {
    (n_of_lambda..=horizon)
        .filter(|&n| margulis_gap(n, params) < 0.0)
        .collect()
}

/// `1 + 110 β ln β`, an upper bound for `N(λ)` when `0.1 < λ < (log 3)/2`.
pub fn nestimate(params: &BoundParams) -> Result<f64, BoundsError> {
    params.validate_closed_form()?;
    let beta = params.beta();
    Ok(1.0 + 110.0 * beta * beta.ln())
}

/// `λ(8N − 2)`.
pub fn volume_from_n(lambda: f64, n: u64) -> f64 {
    lambda * (8.0 * n as f64 - 2.0)
}

/// `vol M < λ(8N(λ) − 2)`.
pub fn volume_bound_exact(params: &BoundParams) -> Result<f64, BoundsError> {
    Ok(volume_from_n(params.lambda, compute_n(params)?))
}

/// `λ(6 + 880 β ln β)`, which dominates [`volume_bound_exact`].
pub fn volume_bound_closed(params: &BoundParams) -> Result<f64, BoundsError> {
    params.validate_closed_form()?;
    let beta = params.beta();
    Ok(params.lambda * (6.0 + 880.0 * beta * beta.ln()))
}

/// Bound on the index of a rank-2 subgroup: `λ(8N(λ) − 2)/V₀`.
pub fn index_bound(params: &BoundParams) -> Result<f64, BoundsError> {
    Ok(volume_bound_exact(params)? / params.weeks_volume)
}

/// `2 + log₂(index bound)`.
pub fn rank_bound(params: &BoundParams) -> Result<f64, BoundsError> {
    rank_from_index_bound(index_bound(params)?)
}

fn rank_from_index_bound(index: f64) -> Result<f64, BoundsError> {
    if index < 1.0 {
        return Err(BoundsError::VacuousRank(index));
    }
    Ok(2.0 + index.log2())
}

/// `rank Γ ≤ rank Γ̃ + log₂[Γ : Γ̃]` for a subgroup of finite index.
pub fn rank_from_index(subgroup_rank: u64, index: u64) -> f64 {
    assert!(index >= 1, "index must be at least 1");
    subgroup_rank as f64 + (index as f64).log2()
}

/// `(length − 2) · min(π, λ)`, the volume bound obtained from a relation of
/// the given length among generators displacing a point less than `λ`.
pub fn volume_from_relation(relation_length: u64, lambda: f64) -> Result<f64, BoundsError> {
    if relation_length < 4 {
        return Err(BoundsError::RelationTooShort(relation_length));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(BoundsError::InvalidParameter {
            name: "lambda",
            value: lambda,
        });
    }
    Ok((relation_length - 2) as f64 * lambda.min(std::f64::consts::PI))
}

/// Every bound for one value of `λ`. Fields that need `λ > 0.1` are `None`
/// below that threshold; `rank_bound` is `None` when the index bound is
/// below 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub lambda: f64,
    pub n_of_lambda: u64,
    pub beta: f64,
    pub nestimate: Option<f64>,
    pub relation_length_bound: u64,
    pub volume_exact: f64,
    pub volume_closed: Option<f64>,
    pub index_bound: f64,
    pub rank_bound: Option<f64>,
}

impl BoundsReport {
    /// Returns a description of each violated report invariant.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(est) = self.nestimate {
            if (self.n_of_lambda as f64) >= est {
                out.push(format!("N = {} is not below nestimate {est}", self.n_of_lambda));
            }
        }
        if let Some(closed) = self.volume_closed {
            if self.volume_exact > closed {
                out.push(format!(
                    "exact volume bound {} exceeds closed form {closed}",
                    self.volume_exact
                ));
            }
        }
        if self.relation_length_bound != 8 * self.n_of_lambda {
            out.push("relation length bound is not 8N".into());
        }
        out
    }
}

pub fn full_report(params: &BoundParams) -> Result<BoundsReport, BoundsError> {
    full_report_with(params, Precision::Double)
}

pub fn full_report_with(params: &BoundParams, precision: Precision) -> Result<BoundsReport, BoundsError> {
    let n = compute_n_with(params, precision)?;
    let closed = params.lambda > CLOSED_FORM_LAMBDA_MIN;
    let volume_exact = volume_from_n(params.lambda, n);
    let index = volume_exact / params.weeks_volume;
    Ok(BoundsReport {
        lambda: params.lambda,
        n_of_lambda: n,
        beta: params.beta(),
        nestimate: if closed { Some(nestimate(params)?) } else { None },
        relation_length_bound: 8 * n,
        volume_exact,
        volume_closed: if closed { Some(volume_bound_closed(params)?) } else { None },
        index_bound: index,
        rank_bound: rank_from_index_bound(index).ok(),
    })
}
