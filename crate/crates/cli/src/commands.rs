use std::path::Path;

use beamsplit_core::continuous::radial_density;
use beamsplit_core::dynamics::{evolve_heat_partial, EvolveConfig};
use beamsplit_core::{beamsplit_add, Backend, BeamsplitConfig, Eta};

use crate::args::{BackendArg, ConvolveArgs, DensityArgs, EvolveArgs};
use crate::error::{CliError, Result};
use crate::format::{float_text, pmf_json, read_pmf, write_output};

pub fn convolve(args: &ConvolveArgs) -> Result<()> {
    let eta = Eta::new(args.eta)?;
    let x = read_pmf(&args.x)?.pmf;
    let y = read_pmf(&args.y)?.pmf;
    let cfg = BeamsplitConfig {
        backend: match args.backend {
            BackendArg::Quadrature => Backend::Quadrature,
            BackendArg::Exact => Backend::ExactMoments,
        },
        m_max: args.mmax,
        precision_bits: args.precision_bits,
        ..BeamsplitConfig::default()
    };
    let z = beamsplit_add(&x, &y, eta, &cfg)?;
    write_output(args.out.as_deref(), &pmf_json(&z))
}

/// Parses `start:step:count` into `start + i*step` for `i < count`.
pub fn parse_eta_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Invalid(format!("eta grid {spec:?} is not start:step:count"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, step, count] = parts.as_slice() else {
        return Err(bad());
    };
    let start: f64 = start.trim().parse().map_err(|_| bad())?;
    let step: f64 = step.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if count == 0 {
        return Err(bad());
    }
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

pub fn evolve(args: &EvolveArgs) -> Result<()> {
    let grid = parse_eta_grid(&args.eta_grid)?;
    let x = read_pmf(&args.x)?.pmf;
    let mut cfg = EvolveConfig::new(grid)?;
    cfg.tau_step = args.tau_step;
    cfg.stability_limit = !args.no_stability_limit;
    cfg.state_size = args.state_size;
    let trajectory = evolve_heat_partial(&x, args.lambda_y, &cfg)?;

    let mut out = csv::Writer::from_writer(Vec::new());
    let csv_error = |e: csv::Error| CliError::Numerical(format!("writing CSV: {e}"));
    out.write_record(["eta", "n", "prob"]).map_err(csv_error)?;
    for (eta, p) in &trajectory.points {
        for (n, &prob) in p.probs().iter().enumerate() {
            out.write_record([float_text(*eta), n.to_string(), float_text(prob)])
                .map_err(csv_error)?;
        }
    }
    let bytes = out
        .into_inner()
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    // Rows reached before a failure are still written.
    write_output(
        args.out.as_deref(),
        &String::from_utf8(bytes).expect("CSV is UTF-8"),
    )?;
    match trajectory.failure {
        None => Ok(()),
        Some(source) => Err(CliError::Evolution {
            source,
            last_good_eta: trajectory.points.last().map_or(1.0, |(eta, _)| *eta),
        }),
    }
}

pub fn density(args: &DensityArgs) -> Result<()> {
    let x = read_pmf(&args.x)?.pmf;
    if args.points < 2 {
        return Err(CliError::Invalid("--points must be at least 2".into()));
    }
    let f = radial_density(&x);
    let u_max = match args.u_max {
        Some(u) if u > 0.0 && u.is_finite() => u,
        Some(_) => return Err(CliError::Invalid("--u-max must be positive".into())),
        None => f.tail_limit(1e-13),
    };
    let mut out = csv::Writer::from_writer(Vec::new());
    let csv_error = |e: csv::Error| CliError::Numerical(format!("writing CSV: {e}"));
    out.write_record(["u", "density"]).map_err(csv_error)?;
    for i in 0..args.points {
        let u = u_max * i as f64 / (args.points - 1) as f64;
        out.write_record([float_text(u), float_text(f.eval(u))])
            .map_err(csv_error)?;
    }
    let bytes = out
        .into_inner()
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    write_output(
        args.out.as_deref(),
        &String::from_utf8(bytes).expect("CSV is UTF-8"),
    )
}

/// Display form of a path for reports.
pub(crate) fn path_text(p: &Path) -> String {
    p.display().to_string()
}
