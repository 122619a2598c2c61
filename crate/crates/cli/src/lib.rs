//! Commands behind the `margulis` binary. Each command returns its full
//! output as a string so the binary and the tests share one code path.

use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use margulis::bounds::{self, BoundParams, BoundsReport, Precision, LAMBDA_SUP};
use margulis::freegroup::{FreeGroupError, DEFAULT_BALL_CAP};
use margulis::hypgeom::GeneratorPair;
use margulis::packing::{self, PackingError};
use margulis::precise;

pub mod verify;

pub const CSV_HEADER: &str = "lambda,N,nestimate,vol_exact,vol_closed,index_bound,rank_bound,rel_len";

/// Largest sign-pattern window scanned past `N(λ)` per sweep row.
const SIGN_WINDOW_MAX: u64 = 100_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

/// How a command failed; maps onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, out-of-range parameters, unreadable input.
    Usage(String),
    /// A computation ran but a checked property does not hold. Carries the
    /// output produced so far.
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Verification(_) => 1,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn show(x: f64) -> String {
    sig12(x).to_string()
}

fn show_opt(x: Option<f64>) -> String {
    x.map(show).unwrap_or_default()
}

/// One line of a sweep, and the JSON shape of `bounds`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub n_of_lambda: u64,
    pub nestimate: Option<f64>,
    pub volume_exact: f64,
    pub volume_closed: Option<f64>,
    pub index_bound: f64,
    pub rank_bound: Option<f64>,
    pub relation_length_bound: u64,
}

impl From<&BoundsReport> for SweepRow {
    fn from(r: &BoundsReport) -> Self {
        SweepRow {
            lambda: sig12(r.lambda),
            n_of_lambda: r.n_of_lambda,
            nestimate: r.nestimate.map(sig12),
            volume_exact: sig12(r.volume_exact),
            volume_closed: r.volume_closed.map(sig12),
            index_bound: sig12(r.index_bound),
            rank_bound: r.rank_bound.map(sig12),
            relation_length_bound: r.relation_length_bound,
        }
    }
}

impl SweepRow {
    pub fn csv_line(&self) -> String {
        [
            show(self.lambda),
            self.n_of_lambda.to_string(),
            show_opt(self.nestimate),
            show(self.volume_exact),
            show_opt(self.volume_closed),
            show(self.index_bound),
            show_opt(self.rank_bound),
            self.relation_length_bound.to_string(),
        ]
        .join(",")
    }
}

/// Constants and precision shared by every command.
#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub mu: f64,
    pub weeks_volume: f64,
    pub packing_constant: f64,
    pub precision: Precision,
    pub format: Format,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            mu: bounds::DEFAULT_MU,
            weeks_volume: bounds::DEFAULT_WEEKS_VOLUME,
            packing_constant: bounds::DEFAULT_PACKING_CONSTANT,
            precision: Precision::Double,
            format: Format::Text,
        }
    }
}

impl Options {
    pub fn params(&self, lambda: f64) -> BoundParams {
        BoundParams::new(lambda)
            .with_mu(self.mu)
            .with_weeks_volume(self.weeks_volume)
            .with_packing_constant(self.packing_constant)
    }
}

#[derive(Serialize)]
struct NReport {
    lambda: f64,
    n_of_lambda: u64,
    beta: f64,
    nestimate: Option<f64>,
}

pub fn cmd_n(lambda: f64, opts: &Options) -> Result<String, Failure> {
    let params = opts.params(lambda);
    let n = bounds::compute_n_with(&params, opts.precision).map_err(usage)?;
    let est = bounds::nestimate(&params).ok();
    let report = NReport {
        lambda: sig12(lambda),
        n_of_lambda: n,
        beta: sig12(params.beta()),
        nestimate: est.map(sig12),
    };
    Ok(match opts.format {
        Format::Text => {
            let est = match report.nestimate {
                Some(e) => show(e),
                None => "n/a (needs lambda > 0.1)".into(),
            };
            format!(
                "N = {n} at lambda = {}\nbeta = {}\nnestimate = {est}\n",
                show(lambda),
                show(report.beta)
            )
        }
        Format::Json => json_line(&report),
        Format::Csv => format!(
            "lambda,N,beta,nestimate\n{},{n},{},{}\n",
            show(lambda),
            show(report.beta),
            show_opt(report.nestimate)
        ),
    })
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report serializes");
    s.push('\n');
    s
}

fn report_row(lambda: f64, opts: &Options) -> Result<(SweepRow, BoundsReport), Failure> {
    let report = bounds::full_report_with(&opts.params(lambda), opts.precision).map_err(usage)?;
    let violations = report.invariant_violations();
    if !violations.is_empty() {
        return Err(Failure::Verification(format!(
            "lambda = {lambda}: {}\n",
            violations.join("; ")
        )));
    }
    Ok((SweepRow::from(&report), report))
}

pub fn cmd_bounds(lambda: f64, opts: &Options) -> Result<String, Failure> {
    let (row, report) = report_row(lambda, opts)?;
    Ok(match opts.format {
        Format::Json => json_line(&row),
        Format::Csv => format!("{CSV_HEADER}\n{}\n", row.csv_line()),
        Format::Text => {
            let gated = |x: Option<f64>, why: &str| match x {
                Some(v) => show(v),
                None => format!("n/a ({why})"),
            };
            let mut s = String::new();
            writeln!(s, "lambda = {}", show(row.lambda)).unwrap();
            writeln!(s, "N = {}", row.n_of_lambda).unwrap();
            writeln!(s, "beta = {}", show(report.beta)).unwrap();
            writeln!(s, "nestimate = {}", gated(row.nestimate, "needs lambda > 0.1")).unwrap();
            writeln!(s, "relation length bound = {}", row.relation_length_bound).unwrap();
            writeln!(s, "volume bound (exact) = {}", show(row.volume_exact)).unwrap();
            writeln!(s, "volume bound (closed form) = {}", gated(row.volume_closed, "needs lambda > 0.1")).unwrap();
            writeln!(s, "index bound = {}", show(row.index_bound)).unwrap();
            writeln!(s, "rank bound = {}", gated(row.rank_bound, "index bound below 1")).unwrap();
            s
        }
    })
}

/// `λᵢ = min + i·step` up to `max`, with a relative slack so that decimal
/// steps hit the endpoint.
pub fn sweep_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(usage(format!("step must be positive, got {step}")));
    }
    if !(min > bounds::CLOSED_FORM_LAMBDA_MIN && min < max && max < LAMBDA_SUP) {
        return Err(usage(format!(
            "sweep needs 0.1 < min < max < (log 3)/2 = {LAMBDA_SUP:.6}, got min = {min}, max = {max}"
        )));
    }
    let count = ((max - min) / step * (1.0 + 1e-12)).floor() as u64 + 1;
    Ok((0..count).map(|i| min + i as f64 * step).collect())
}

pub struct SweepOutput {
    pub text: String,
    pub warnings: Vec<String>,
}

pub fn cmd_sweep(min: f64, max: f64, step: f64, opts: &Options) -> Result<SweepOutput, Failure> {
    let grid = sweep_grid(min, max, step)?;
    let rows: Vec<(SweepRow, Vec<u64>)> = grid
        .par_iter()
        .map(|&lambda| {
            let (row, report) = report_row(lambda, opts)?;
            let n = report.n_of_lambda;
            let horizon = (4 * n).min(n + SIGN_WINDOW_MAX);
            let bad = bounds::sign_pattern_violations(&opts.params(lambda), n, horizon);
            Ok((row, bad))
        })
        .collect::<Result<_, Failure>>()?;

    let warnings = rows
        .iter()
        .filter(|(_, bad)| !bad.is_empty())
        .map(|(row, bad)| {
            format!(
                "warning: lambda = {}: inequality fails again at N = {:?} beyond N(lambda) = {}",
                show(row.lambda),
                &bad[..bad.len().min(5)],
                row.n_of_lambda
            )
        })
        .collect();

    let text = match opts.format {
        Format::Json => {
            let rows: Vec<&SweepRow> = rows.iter().map(|(r, _)| r).collect();
            json_line(&rows)
        }
        Format::Csv | Format::Text => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for (row, _) in &rows {
                s.push_str(&row.csv_line());
                s.push('\n');
            }
            s
        }
    };
    Ok(SweepOutput { text, warnings })
}

#[derive(Serialize)]
struct RelationReport {
    relation: Option<String>,
    length: Option<usize>,
    max_len: u32,
    tolerance: f64,
    residual_extended: Option<f64>,
    max_displacement: f64,
    volume_from_relation: Option<f64>,
}

pub fn cmd_relations(input: &Path, max_len: u32, tol: f64, opts: &Options) -> Result<String, Failure> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| usage(format!("cannot read {}: {e}", input.display())))?;
    let gens = GeneratorPair::from_json(&text)
        .map_err(|e| usage(format!("{}: {e}", input.display())))?;
    let found = packing::search_relation(&gens, max_len, tol).map_err(|e| match e {
        PackingError::FreeGroup(FreeGroupError::CapExceeded { .. }) => usage(format!(
            "{e}; the search enumerates 4*3^(L-1) words per length, so max-len is capped at {DEFAULT_BALL_CAP}"
        )),
        other => usage(other),
    })?;
    let displacement = gens.max_displacement();
    let residual = found
        .as_ref()
        .map(|w| precise::word_distance_to_identity(w, &gens.x, &gens.y));
    let volume = found
        .as_ref()
        .and_then(|w| bounds::volume_from_relation(w.len() as u64, displacement).ok());
    let report = RelationReport {
        relation: found.as_ref().map(|w| w.to_string()),
        length: found.as_ref().map(|w| w.len()),
        max_len,
        tolerance: tol,
        residual_extended: residual.map(sig12),
        max_displacement: sig12(displacement),
        volume_from_relation: volume.map(sig12),
    };

    let out = match opts.format {
        Format::Json => json_line(&report),
        Format::Csv => format!(
            "relation,length,max_len,residual_extended,max_displacement\n{},{},{max_len},{},{}\n",
            report.relation.clone().unwrap_or_default(),
            report.length.map(|l| l.to_string()).unwrap_or_default(),
            show_opt(report.residual_extended),
            show(displacement)
        ),
        Format::Text => match &found {
            None => format!("no relation ≤ {max_len}\n"),
            Some(w) => {
                let mut s = format!("relation {w} (length {})\n", w.len());
                writeln!(s, "256-bit residual = {}", show(residual.unwrap())).unwrap();
                writeln!(s, "max displacement = {}", show(displacement)).unwrap();
                if let Some(v) = volume {
                    writeln!(s, "volume from relation = {}", show(v)).unwrap();
                }
                s
            }
        },
    };
    match residual {
        Some(r) if !(r <= tol) => Err(Failure::Verification(format!(
            "{out}relation does not survive the 256-bit recheck: residual {r} > {tol}\n"
        ))),
        _ => Ok(out),
    }
}

pub fn cmd_verify(suite: verify::Suite, opts: &Options) -> Result<String, Failure> {
    let results = verify::run(suite, opts);
    let mut out = String::new();
    for r in &results {
        match &r.outcome {
            Ok(()) => writeln!(out, "{}: PASS", r.name).unwrap(),
            Err(why) => writeln!(out, "{}: FAIL ({why})", r.name).unwrap(),
        }
    }
    let failed = results.iter().filter(|r| r.outcome.is_err()).count();
    writeln!(out, "{} passed, {failed} failed", results.len() - failed).unwrap();
    if failed == 0 {
        Ok(out)
    } else {
        Err(Failure::Verification(out))
    }
}
