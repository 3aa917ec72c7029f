//! The `check` command: every identity and inequality evaluated on the given
//! inputs, written as one JSON report.

use std::collections::BTreeMap;
use std::fs;
use std::time::Instant;

use beamsplit_core::continuous::check_log_sum;
use beamsplit_core::dynamics::{
    check_log_sobolev, debruijn_lhs_numeric, debruijn_rhs, entropy_concavity_gap, heat_rhs,
};
use beamsplit_core::pmf::{geometric_pmf, total_variation};
use beamsplit_core::transforms::{
    binomial_moments, binomial_moments_ext, continuous_moments, eval_h_tilde_laguerre,
    quadrature_order_for, ArgumentDomain,
};
use beamsplit_core::{
    beamsplit_add, BeamsplitConfig, Error as CoreError, Eta, GeometricSpec, Pmf, Tail,
};
use serde::Serialize;

use crate::args::CheckArgs;
use crate::commands::path_text;
use crate::error::{is_numerical, CliError, Result};
use crate::format::{read_pmf, Num};

/// Truncation of the thermal input `Geom(λ_Y)`.
pub const THERMAL_EPSILON: f64 = 1e-15;
/// Half-width of the central differences in `η`.
pub const DIFFERENCE_STEP: f64 = 1e-4;

pub const TRANSFORM_TOLERANCE: f64 = 1e-10;
pub const MOMENT_TOLERANCE: f64 = 1e-10;
pub const MEAN_TOLERANCE: f64 = 1e-10;
pub const CLOSURE_TOLERANCE: f64 = 1e-10;
pub const HEAT_TOLERANCE: f64 = 1e-6;
pub const DEBRUIJN_RELATIVE_TOLERANCE: f64 = 1e-5;
pub const DEBRUIJN_ABSOLUTE_TOLERANCE: f64 = 1e-9;
pub const CONCAVITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// A proved statement; failure fails the run.
    Identity,
    /// Reported for information; never fails the run.
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub kind: Kind,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<Num>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<&'static str, Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    fn new(name: &'static str, kind: Kind) -> Self {
        Self {
            name,
            kind,
            status: Status::Skipped,
            residual: None,
            tolerance: None,
            values: BTreeMap::new(),
            note: None,
        }
    }

    fn compared(mut self, residual: f64, tolerance: f64, passed: bool) -> Self {
        self.residual = Some(Num(residual));
        self.tolerance = Some(Num(tolerance));
        self.status = if passed { Status::Pass } else { Status::Fail };
        self
    }

    fn below(self, residual: f64, tolerance: f64) -> Self {
        self.compared(residual, tolerance, residual <= tolerance)
    }

    fn value(mut self, key: &'static str, v: f64) -> Self {
        self.values.insert(key, Num(v));
        self
    }

    fn note(mut self, text: impl Into<String>) -> Self {
        self.note = Some(text.into());
        self
    }

    fn skipped(name: &'static str, kind: Kind, why: impl Into<String>) -> Self {
        Self::new(name, kind).note(why)
    }
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub role: &'static str,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunConfig {
    pub eta: Num,
    pub lambda_y: Num,
    pub precision_bits: u32,
    pub quadrature_order: usize,
    pub thermal_epsilon: Num,
    pub difference_step: Num,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub config: RunConfig,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<Num>,
}

/// Runs a check body, turning library errors into an `error` or `skipped` row.
fn guarded(
    name: &'static str,
    kind: Kind,
    body: impl FnOnce() -> std::result::Result<CheckResult, CoreError>,
) -> CheckResult {
    match body() {
        Ok(r) => r,
        Err(CoreError::ZeroMean) => CheckResult::skipped(name, kind, "needs a positive mean"),
        Err(e) if is_numerical(&e) => {
            let mut r = CheckResult::new(name, kind).note(e.to_string());
            r.status = Status::Error;
            r
        }
        Err(e) => {
            let mut r = CheckResult::new(name, kind).note(e.to_string());
            r.status = Status::Fail;
            r
        }
    }
}

struct Inputs<'a> {
    x: &'a Pmf,
    y: &'a Pmf,
    thermal: &'a Pmf,
    eta: Eta,
    lambda_y: f64,
    bits: u32,
}

fn transform_relation(inp: &Inputs) -> CheckResult {
    guarded("transform_relation", Kind::Identity, || {
        let p = inp.x;
        // Enough series terms for the largest |t| to fall far below the tolerance.
        let order = (5.0 * std::f64::consts::E * p.len() as f64).ceil() as usize + 80;
        let d = continuous_moments(&binomial_moments_ext(p, order, inp.bits))?;
        let mut worst: f64 = 0.0;
        for t in [-0.1, -1.0, -5.0] {
            let h = eval_h_tilde_laguerre(p, t, ArgumentDomain::NonPositive)?;
            let phi = d.eval_phi_tilde(t, ArgumentDomain::NonPositive)?;
            worst = worst.max((h - (-t).exp() * phi).abs());
        }
        Ok(CheckResult::new("transform_relation", Kind::Identity)
            .below(worst, TRANSFORM_TOLERANCE)
            .value("series_terms", order as f64))
    })
}

fn second_moment(inp: &Inputs) -> CheckResult {
    guarded("second_moment", Kind::Identity, || {
        let d = continuous_moments(&binomial_moments(inp.x, 1)?)?;
        let d1 = d.values()[1];
        Ok(CheckResult::new("second_moment", Kind::Identity)
            .below((d1 - 1.0 - inp.x.mean()).abs(), MOMENT_TOLERANCE)
            .value("d1", d1))
    })
}

fn mean_linearity(inp: &Inputs, z: &Pmf) -> CheckResult {
    let e = inp.eta.value();
    let want = e * inp.x.mean() + (1.0 - e) * inp.y.mean();
    CheckResult::new("mean_linearity", Kind::Identity)
        .below((z.mean() - want).abs(), MEAN_TOLERANCE)
        .value("mean_z", z.mean())
        .value("expected", want)
}

fn geometric_closure(inp: &Inputs, z: &Pmf) -> CheckResult {
    const NAME: &str = "geometric_closure";
    let (Tail::Geometric { mean: a }, Tail::Geometric { mean: b }) = (inp.x.tail(), inp.y.tail())
    else {
        return CheckResult::skipped(NAME, Kind::Identity, "needs two geometric inputs");
    };
    guarded(NAME, Kind::Identity, || {
        let mean = inp.eta.value() * a + inp.eta.complement() * b;
        let eps = (inp.x.tail_tolerance() + inp.y.tail_tolerance()).clamp(1e-300, 0.5);
        let g = geometric_pmf(&GeometricSpec::new(mean, eps))?;
        Ok(CheckResult::new(NAME, Kind::Identity)
            .below(total_variation(z, &g), CLOSURE_TOLERANCE)
            .value("expected_mean", mean))
    })
}

fn heat_equation(inp: &Inputs) -> CheckResult {
    const NAME: &str = "heat_equation";
    let e = inp.eta.value();
    let h = DIFFERENCE_STEP;
    if !(e - h > 0.0 && e + h <= 1.0) {
        return CheckResult::skipped(NAME, Kind::Identity, "difference stencil leaves (0, 1]");
    }
    guarded(NAME, Kind::Identity, || {
        let cfg = BeamsplitConfig::default();
        let at = |v: f64| beamsplit_add(inp.x, inp.thermal, Eta::new(v)?, &cfg);
        let rhs = heat_rhs(&at(e)?, inp.eta, inp.lambda_y)?;
        let err_at = |h: f64| -> std::result::Result<f64, CoreError> {
            let (up, down) = (at(e + h)?, at(e - h)?);
            let len = up.len().max(down.len()).max(rhs.values.len());
            Ok((0..len)
                .map(|n| ((up.prob(n) - down.prob(n)) / (2.0 * h) - rhs.get(n)).abs())
                .fold(0.0, f64::max))
        };
        let (full, half) = (err_at(h)?, err_at(h / 2.0)?);
        let second_order = half <= full / 3.0 || full < 1e-10;
        Ok(CheckResult::new(NAME, Kind::Identity)
            .compared(full, HEAT_TOLERANCE, full <= HEAT_TOLERANCE && second_order)
            .value("residual_half_step", half))
    })
}

fn de_bruijn(inp: &Inputs) -> CheckResult {
    const NAME: &str = "de_bruijn";
    let e = inp.eta.value();
    if !(e - DIFFERENCE_STEP > 0.0 && e + DIFFERENCE_STEP <= 1.0) {
        return CheckResult::skipped(NAME, Kind::Identity, "difference stencil leaves (0, 1]");
    }
    guarded(NAME, Kind::Identity, || {
        let lhs = debruijn_lhs_numeric(inp.x, inp.lambda_y, inp.eta, DIFFERENCE_STEP)?;
        let z = beamsplit_add(inp.x, inp.thermal, inp.eta, &BeamsplitConfig::default())?;
        let rhs = debruijn_rhs(&z, inp.eta, inp.lambda_y)?;
        let r = CheckResult::new(NAME, Kind::Identity)
            .value("lhs_numeric", lhs)
            .value("rhs", rhs);
        if rhs == f64::INFINITY {
            return Ok(r
                .compared(f64::INFINITY, f64::INFINITY, true)
                .note("right-hand side is +inf, so the identity is uninformative here"));
        }
        let tolerance = DEBRUIJN_RELATIVE_TOLERANCE * rhs.abs() + DEBRUIJN_ABSOLUTE_TOLERANCE;
        Ok(r.below((lhs - rhs).abs(), tolerance))
    })
}

/// The right-hand side at the input itself (`η = 1`), where a finite support
/// forces `+inf`.
fn de_bruijn_at_input(inp: &Inputs) -> CheckResult {
    const NAME: &str = "de_bruijn_rhs_at_input";
    guarded(NAME, Kind::Identity, || {
        let rhs = debruijn_rhs(inp.x, Eta::new(1.0)?, inp.lambda_y)?;
        let top_charged = inp.x.probs().last().is_some_and(|&p| p > 0.0);
        let expect_infinite = inp.x.tail().is_finite() && top_charged && inp.lambda_y > 0.0;
        let consistent = (rhs == f64::INFINITY) == expect_infinite;
        let mut r = CheckResult::new(NAME, Kind::Identity).value("rhs", rhs);
        r.status = if consistent {
            Status::Pass
        } else {
            Status::Fail
        };
        Ok(r.note(if expect_infinite {
            "finite support: the lower tilt charges a state the upper tilt cannot, so +inf is expected"
        } else {
            "unbounded support: a finite value is expected"
        }))
    })
}

fn log_sobolev(inp: &Inputs) -> [CheckResult; 2] {
    match check_log_sobolev(inp.x) {
        Ok(rep) => {
            let row = |name, rhs: f64, holds: bool| {
                let slack = beamsplit_core::dynamics::debruijn::BOUND_ABS_TOLERANCE
                    + beamsplit_core::dynamics::debruijn::BOUND_REL_TOLERANCE * rhs.abs();
                CheckResult::new(name, Kind::Identity)
                    .compared(rep.lhs - rhs, slack, holds)
                    .value("lhs", rep.lhs)
                    .value("rhs", rhs)
            };
            [
                row("log_sobolev_entropic", rep.rhs_entropic, rep.entropic_holds),
                row(
                    "log_sobolev_quadratic",
                    rep.rhs_quadratic,
                    rep.quadratic_holds,
                ),
            ]
        }
        Err(e) => {
            let err = || Err(e.clone());
            [
                guarded("log_sobolev_entropic", Kind::Identity, err),
                guarded("log_sobolev_quadratic", Kind::Identity, err),
            ]
        }
    }
}

fn log_sum(inp: &Inputs) -> CheckResult {
    const NAME: &str = "log_sum";
    guarded(NAME, Kind::Identity, || {
        let rep = check_log_sum(inp.x, inp.y)?;
        Ok(CheckResult::new(NAME, Kind::Identity)
            .compared(
                rep.continuous - rep.discrete,
                beamsplit_core::continuous::LOG_SUM_TOLERANCE,
                rep.holds,
            )
            .value("continuous", rep.continuous)
            .value("discrete", rep.discrete))
    })
}

fn entropy_concavity(inp: &Inputs) -> CheckResult {
    const NAME: &str = "entropy_concavity";
    guarded(NAME, Kind::Empirical, || {
        let gap = entropy_concavity_gap(inp.x, inp.y, inp.eta, &BeamsplitConfig::default())?;
        Ok(CheckResult::new(NAME, Kind::Empirical)
            .compared(-gap, CONCAVITY_TOLERANCE, gap >= -CONCAVITY_TOLERANCE)
            .value("gap", gap))
    })
}

/// Builds the report; errors only for invalid input.
pub fn build_report(args: &CheckArgs, argv: &[String]) -> Result<RunReport> {
    let start = Instant::now();
    let eta = Eta::new(args.eta)?;
    if !(args.lambda_y >= 0.0 && args.lambda_y.is_finite()) {
        return Err(CliError::Invalid("lambda-y must be finite and >= 0".into()));
    }
    if args.precision_bits < 53 {
        return Err(CliError::Invalid(
            "precision bits must be at least 53".into(),
        ));
    }
    let x_file = read_pmf(&args.x)?;
    let mut inputs = vec![InputDigest {
        role: "x",
        path: path_text(&args.x),
        sha256: x_file.sha256.clone(),
    }];
    let thermal = geometric_pmf(&GeometricSpec::new(args.lambda_y, THERMAL_EPSILON))?;
    let y = match &args.y {
        Some(path) => {
            let f = read_pmf(path)?;
            inputs.push(InputDigest {
                role: "y",
                path: path_text(path),
                sha256: f.sha256,
            });
            f.pmf
        }
        None => thermal.clone(),
    };
    let inp = Inputs {
        x: &x_file.pmf,
        y: &y,
        thermal: &thermal,
        eta,
        lambda_y: args.lambda_y,
        bits: args.precision_bits,
    };

    let mut checks = vec![transform_relation(&inp), second_moment(&inp)];
    match beamsplit_add(inp.x, inp.y, eta, &BeamsplitConfig::default()) {
        Ok(z) => {
            checks.push(mean_linearity(&inp, &z));
            checks.push(geometric_closure(&inp, &z));
        }
        Err(e) => {
            for name in ["mean_linearity", "geometric_closure"] {
                checks.push(guarded(name, Kind::Identity, || Err(e.clone())));
            }
        }
    }
    checks.push(heat_equation(&inp));
    checks.push(de_bruijn(&inp));
    checks.push(de_bruijn_at_input(&inp));
    checks.extend(log_sobolev(&inp));
    checks.push(log_sum(&inp));
    checks.push(entropy_concavity(&inp));

    let passed = checks
        .iter()
        .all(|c| c.kind == Kind::Empirical || matches!(c.status, Status::Pass | Status::Skipped));
    Ok(RunReport {
        command: argv.to_vec(),
        inputs,
        config: RunConfig {
            eta: Num(eta.value()),
            lambda_y: Num(args.lambda_y),
            precision_bits: args.precision_bits,
            quadrature_order: quadrature_order_for(
                inp.x.support_bound(),
                inp.y.support_bound(),
                inp.x.support_bound() + inp.y.support_bound(),
            ),
            thermal_epsilon: Num(THERMAL_EPSILON),
            difference_step: Num(DIFFERENCE_STEP),
        },
        checks,
        passed,
        wall_time_seconds: args
            .record_timing
            .then(|| Num(start.elapsed().as_secs_f64())),
    })
}

/// Writes the report, then maps its outcome to an exit status.
pub fn check(args: &CheckArgs, argv: &[String]) -> Result<()> {
    let report = build_report(args, argv)?;
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    fs::write(&args.report, text).map_err(|e| CliError::io(&args.report, e))?;
    let counted = |s: Status| {
        report
            .checks
            .iter()
            .filter(|c| c.kind == Kind::Identity && c.status == s)
            .map(|c| c.name)
            .collect::<Vec<_>>()
    };
    let failed = counted(Status::Fail);
    if !failed.is_empty() {
        return Err(CliError::IdentityViolation(format!(
            "checks failed: {}",
            failed.join(", ")
        )));
    }
    let errored = counted(Status::Error);
    if !errored.is_empty() {
        return Err(CliError::Numerical(format!(
            "checks could not be evaluated: {}",
            errored.join(", ")
        )));
    }
    Ok(())
}
