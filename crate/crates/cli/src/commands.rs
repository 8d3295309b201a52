//! The subcommands. Each is a pure function of the configuration and the
//! run options; the worker count never changes the output.

use std::path::PathBuf;

use disdrift_core::analysis::{
    cost_curve, estimate_order, hitting_fraction, predicted_order, run_error_study, sample_trajectory,
    sobolev_seminorm, ErrorStudy, SchemeId, MIN_HITTING_PATHS,
};
use disdrift_core::PiecewiseDrift;

use crate::config::{field, ExperimentConfig, Target};
use crate::output::{num, write_csv, write_gnuplot, Plot};
use crate::presets::{PresetValue, PRESETS};
use crate::CliError;

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: usize,
}

/// Files written and the human-readable summary.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub csv: Option<PathBuf>,
    pub script: Option<PathBuf>,
    pub summary: String,
}

fn seed(cfg: &ExperimentConfig, opts: &RunOptions) -> u64 {
    opts.seed.unwrap_or(cfg.seed)
}

fn output(cfg: &ExperimentConfig, opts: &RunOptions, default: &str) -> PathBuf {
    opts.out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from(default))
}

fn single_delta(cfg: &ExperimentConfig, command: &str) -> Result<f64, CliError> {
    match cfg.delta_ladder.as_slice() {
        [d] => Ok(*d),
        _ => Err(field("delta_ladder", &format!("{command} needs exactly one step size"))),
    }
}

fn required_paths(cfg: &ExperimentConfig) -> Result<usize, CliError> {
    cfg.paths.ok_or_else(|| field("paths", "required for this command"))
}

pub fn simulate(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let problem = cfg.sde()?;
    let scheme = cfg.scheme.unwrap_or(SchemeId::Em);
    let delta = single_delta(cfg, "simulate")?;
    let paths = cfg.paths.unwrap_or(1);
    let seed = seed(cfg, opts);
    let mut rows = Vec::new();
    for i in 0..paths {
        let tr = sample_trajectory(&problem, scheme, delta, cfg.eps0, seed, i as u64)?;
        for (t, x) in tr.times.iter().zip(&tr.values) {
            rows.push([i.to_string(), num(*t), num(*x)]);
        }
    }
    let path = output(cfg, opts, "simulate.csv");
    write_csv(&path, &["path_id", "t", "x"], rows, &[])?;
    let script = write_gnuplot(&path, Plot::Paths(paths))?;
    Ok(Outcome {
        summary: format!("{paths} {scheme} path(s) with δ = {delta} written to {}", path.display()),
        csv: Some(path),
        script: Some(script),
    })
}

pub fn estimate_order_cmd(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let problem = cfg.sde()?;
    let scheme = cfg.scheme.ok_or_else(|| field("scheme", "required for estimate-order"))?;
    if cfg.delta_ladder.len() < 4 {
        return Err(field("delta_ladder", "order regression needs at least 4 step sizes"));
    }
    let paths = required_paths(cfg)?;
    let seed = seed(cfg, opts);
    let mut study = ErrorStudy::new(problem, vec![scheme], cfg.delta_ladder.clone(), paths, seed);
    study.reference = cfg.reference;
    study.refinement = cfg.refinement;
    study.eps0 = cfg.eps0;
    study.workers = opts.workers;
    let errors = run_error_study(&study)?;
    let report = estimate_order(&errors[0].points)?.with_provenance(paths, seed);
    let path = output(cfg, opts, "estimate-order.csv");
    let rows = report.ladder.iter().map(|p| [num(p.delta), num(p.rmse), num(p.stderr)]);
    let footer = [
        format!("slope={}, ci={}", report.slope, report.slope_ci),
        format!("scheme={scheme}, paths={paths}, seed={seed}"),
    ];
    write_csv(&path, &["delta", "rmse", "stderr"], rows, &footer)?;
    let script = write_gnuplot(&path, Plot::ErrorLadder)?;
    Ok(Outcome {
        summary: format!(
            "{scheme}: slope = {:.4} ± {:.4} (95% CI), {paths} paths, seed {seed}",
            report.slope, report.slope_ci
        ),
        csv: Some(path),
        script: Some(script),
    })
}

pub fn adaptive_cost(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let problem = cfg.sde()?;
    match cfg.scheme {
        None | Some(SchemeId::AdaptiveEm) => {}
        Some(s) => return Err(field("scheme", &format!("adaptive-cost requires adaptive-em, got {s}"))),
    }
    if cfg.delta_ladder.len() < 4 {
        return Err(field("delta_ladder", "cost regression needs at least 4 step sizes"));
    }
    let paths = required_paths(cfg)?;
    let seed = seed(cfg, opts);
    let report = cost_curve(&problem, &cfg.delta_ladder, cfg.eps0, paths, seed, opts.workers)?;
    let path = output(cfg, opts, "adaptive-cost.csv");
    let rows = report.points.iter().map(|p| [num(p.delta), num(p.mean_steps), num(p.stderr)]);
    let footer = [
        format!("slope={}, ci={}", report.slope, report.slope_ci),
        format!("paths={paths}, seed={seed}, eps0={}", cfg.eps0),
    ];
    write_csv(&path, &["delta", "mean_steps", "stderr"], rows, &footer)?;
    let script = write_gnuplot(&path, Plot::Cost)?;
    Ok(Outcome {
        summary: format!("cost slope = {:.4} ± {:.4} (95% CI)", report.slope, report.slope_ci),
        csv: Some(path),
        script: Some(script),
    })
}

pub fn seminorm(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let b: PiecewiseDrift = match cfg.target()? {
        Target::Function(f) => f,
        Target::Problem(p) => p.drift().clone(),
    };
    if cfg.kappas.is_empty() {
        return Err(field("kappas", "at least one κ is required"));
    }
    let mut rows = Vec::with_capacity(cfg.kappas.len());
    let mut lines = Vec::new();
    for &kappa in &cfg.kappas {
        let r = sobolev_seminorm(&b, kappa, cfg.truncation, cfg.resolution)?;
        let order = predicted_order(kappa)?;
        lines.push(format!("κ = {kappa}: |b|_κ = {}, predicted order {order}", r.value));
        rows.push([num(kappa), num(r.value), num(order)]);
    }
    let path = output(cfg, opts, "seminorm.csv");
    write_csv(&path, &["kappa", "seminorm", "predicted_order"], rows, &[])?;
    let script = write_gnuplot(&path, Plot::Seminorm)?;
    Ok(Outcome {
        summary: lines.join("\n"),
        csv: Some(path),
        script: Some(script),
    })
}

/// Default step of the rare-event experiment.
pub const RARE_EVENT_DELTA: f64 = 1.0 / 1024.0;

pub fn rare_event(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, CliError> {
    let inward = cfg.sde()?;
    let band = cfg.band.ok_or_else(|| field("band", "required for rare-event"))?;
    let paths = required_paths(cfg)?;
    if paths < MIN_HITTING_PATHS {
        return Err(field("paths", &format!("rare-event needs at least {MIN_HITTING_PATHS} paths")));
    }
    let delta = match cfg.delta_ladder.as_slice() {
        [] => RARE_EVENT_DELTA,
        [d] => *d,
        _ => return Err(field("delta_ladder", "rare-event takes at most one step size")),
    };
    let seed = seed(cfg, opts);
    let outward = inward.clone().with_drift(inward.drift().scaled(-1.0));
    let f_in = hitting_fraction(&inward, delta, paths, band, seed, opts.workers)?;
    let f_out = hitting_fraction(&outward, delta, paths, band, seed, opts.workers)?;
    let csv = match opts.out.clone().or_else(|| cfg.output.clone()) {
        Some(path) => {
            let rows = [["inward".to_string(), num(f_in)], ["outward".to_string(), num(f_out)]];
            write_csv(&path, &["variant", "fraction"], rows, &[format!("band={band}, paths={paths}, seed={seed}")])?;
            Some(path)
        }
        None => None,
    };
    Ok(Outcome {
        summary: format!("inward fraction = {f_in}\noutward fraction = {f_out}"),
        csv,
        script: None,
    })
}

pub fn list_presets() -> String {
    PRESETS
        .iter()
        .map(|p| {
            let kind = match p.value() {
                PresetValue::Problem(_) => "problem",
                PresetValue::Function(_) => "function",
            };
            format!("{:<20} {:<9} {}", p.name, kind, p.note)
        })
        .collect::<Vec<_>>()
        .join("\n")
}
