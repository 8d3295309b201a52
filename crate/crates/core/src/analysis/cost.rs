//! Expected step counts of the adaptive scheme.

use rayon::prelude::*;
use serde::Serialize;

use super::order::loglog_fit;
use super::strong::{batch_mean, check_ladder, tags, with_workers, MIN_PATHS};
use crate::error::{invalid, Result};
use crate::noise::{sample_path, OnDemandBrownian, SeedSpec};
use crate::schemes::{adaptive_euler_maruyama_into, StepPolicy, Terminal};
use crate::sde::{SdeProblem, TimeGrid};

/// Mean adaptive step count at one `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostPoint {
    pub delta: f64,
    pub mean_steps: f64,
    pub stderr: f64,
}

/// Step counts over a `δ` ladder with the slope of `log₂ E[N]` against
/// `log₂(1/δ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub points: Vec<CostPoint>,
    pub slope: f64,
    pub slope_ci: f64,
    pub intercept: f64,
}

impl CostReport {
    pub fn from_points(points: Vec<CostPoint>) -> Result<Self> {
        let x: Vec<f64> = points.iter().map(|p| 1.0 / p.delta).collect();
        let y: Vec<f64> = points.iter().map(|p| p.mean_steps).collect();
        let fit = loglog_fit(&x, &y)?;
        Ok(CostReport {
            points,
            slope: fit.slope,
            slope_ci: fit.slope_ci,
            intercept: fit.intercept,
        })
    }
}

/// Runs the adaptive scheme for `paths` paths at every `δ` of `ladder` and
/// regresses the mean step count. Each level draws its own base path on the
/// uniform grid with `⌈T/δ⌉` steps.
pub fn cost_curve(
    problem: &SdeProblem,
    ladder: &[f64],
    eps0: f64,
    paths: usize,
    seed: u64,
    workers: usize,
) -> Result<CostReport> {
    if paths < MIN_PATHS {
        return Err(invalid(format!("need at least {MIN_PATHS} paths, got {paths}")));
    }
    check_ladder(ladder)?;
    if ladder.len() < 4 {
        return Err(invalid(format!("cost regression needs at least 4 ladder points, got {}", ladder.len())));
    }
    let horizon = problem.horizon();
    let levels: Vec<(StepPolicy, TimeGrid)> = ladder
        .iter()
        .map(|&d| {
            let policy = StepPolicy::adaptive(d, eps0)?;
            let n = (horizon / d - 1e-9).ceil().max(1.0) as usize;
            Ok((policy, TimeGrid::uniform(horizon, n)?))
        })
        .collect::<Result<_>>()?;

    let counts: Vec<Vec<f64>> = with_workers(workers, || {
        (0..paths)
            .into_par_iter()
            .map(|i| {
                let s = SeedSpec::new(seed, i as u64);
                levels
                    .iter()
                    .enumerate()
                    .map(|(l, (policy, grid))| {
                        let base = sample_path(grid, s.substream(tags::BASE + 10 * l as u64));
                        let mut src = OnDemandBrownian::new(&base, s.substream(tags::ADAPTIVE + l as u64));
                        let mut out = Terminal::default();
                        adaptive_euler_maruyama_into(problem, policy, &mut src, &mut out)?;
                        Ok(out.steps as f64)
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let points = ladder
        .iter()
        .enumerate()
        .map(|(l, &delta)| {
            let n: Vec<f64> = counts.iter().map(|c| c[l]).collect();
            let (mean_steps, stderr) = batch_mean(&n);
            CostPoint {
                delta,
                mean_steps,
                stderr,
            }
        })
        .collect();
    CostReport::from_points(points)
}
