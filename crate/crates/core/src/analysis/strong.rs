//! Monte Carlo strong-error measurement on coupled noise.
//!
//! For every path the Brownian motion is sampled on the coarsest ladder grid
//! and bridge-refined level by level down to the reference grid, so all
//! schemes, all step sizes and the reference see one and the same path.
//! Paths are independent streams keyed by `(seed, path_index)` and the
//! per-path results are reduced in index order, which makes the outcome
//! independent of the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cost::CostPoint;
use super::exact::ExactSolution;
use super::order::ErrorPoint;
use crate::error::{invalid, Error, Result};
use crate::noise::{coarsen, refine_bridge, sample_jumps, sample_path, JumpTrain, NoisePath, OnDemandBrownian, SeedSpec};
use crate::schemes::{
    adaptive_euler_maruyama_into, euler_maruyama_into, jump_euler_maruyama_into, milstein_into, transformed_into,
    StepPolicy, Terminal, Trajectory,
};
use crate::sde::{SdeProblem, TimeGrid};
use crate::transform::TransformedProblem;

pub(crate) mod tags {
    pub const BASE: u64 = 1;
    pub const LEVEL: u64 = 100;
    pub const REFERENCE: u64 = 2;
    pub const JUMPS: u64 = 3;
    pub const JUMP_BRIDGE: u64 = 4;
    pub const ADAPTIVE: u64 = 1_000;
}

/// Batches used for the standard error of Monte Carlo means.
pub const BATCHES: usize = 20;
/// Smallest accepted path count.
pub const MIN_PATHS: usize = 100;
/// Default reference refinement relative to the finest ladder step.
pub const DEFAULT_REFINEMENT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeId {
    Em,
    Milstein,
    TransformEm,
    TransformMilstein,
    AdaptiveEm,
    JumpEm,
}

impl SchemeId {
    pub const ALL: [SchemeId; 6] = [
        SchemeId::Em,
        SchemeId::Milstein,
        SchemeId::TransformEm,
        SchemeId::TransformMilstein,
        SchemeId::AdaptiveEm,
        SchemeId::JumpEm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::Em => "em",
            SchemeId::Milstein => "milstein",
            SchemeId::TransformEm => "transform-em",
            SchemeId::TransformMilstein => "transform-milstein",
            SchemeId::AdaptiveEm => "adaptive-em",
            SchemeId::JumpEm => "jump-em",
        }
    }

    pub fn is_transform(self) -> bool {
        matches!(self, SchemeId::TransformEm | SchemeId::TransformMilstein)
    }

    /// Checks the scheme's hypotheses against the problem.
    pub fn check_compatible(self, problem: &SdeProblem) -> Result<()> {
        match self {
            SchemeId::JumpEm if !problem.has_jumps() => {
                Err(invalid("jump-em requires a jump coefficient in the problem"))
            }
            SchemeId::JumpEm => Ok(()),
            _ if problem.has_jumps() => Err(invalid(format!(
                "{} cannot simulate a jump component; use jump-em",
                self.name()
            ))),
            s if s.is_transform() => problem.require_nondegenerate(),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for SchemeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| invalid(format!("unknown scheme '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferencePolicy {
    /// Closed-form solution on the reference path.
    Exact,
    /// Transformed Milstein (or Euler–Maruyama when `σ` vanishes at a
    /// breakpoint) on the refined reference grid.
    FineGrid,
}

/// A strong-error experiment over a ladder of step sizes.
#[derive(Debug, Clone)]
pub struct ErrorStudy {
    pub problem: SdeProblem,
    pub schemes: Vec<SchemeId>,
    /// Strictly decreasing maximal step sizes; each must divide the horizon
    /// and each finer grid must refine the coarser ones.
    pub ladder: Vec<f64>,
    pub paths: usize,
    pub reference: ReferencePolicy,
    /// Reference step is `min(ladder) / refinement`.
    pub refinement: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
    /// Distance scale of the adaptive step function.
    pub eps0: f64,
}

impl ErrorStudy {
    pub fn new(problem: SdeProblem, schemes: Vec<SchemeId>, ladder: Vec<f64>, paths: usize, seed: u64) -> Self {
        ErrorStudy {
            problem,
            schemes,
            ladder,
            paths,
            reference: ReferencePolicy::FineGrid,
            refinement: DEFAULT_REFINEMENT,
            seed,
            workers: 0,
            eps0: 1.0,
        }
    }
}

/// Error ladder of one scheme; adaptive schemes also report their cost.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeErrors {
    pub scheme: SchemeId,
    pub points: Vec<ErrorPoint>,
    pub cost: Option<Vec<CostPoint>>,
}

/// Number of uniform steps for `delta`, if `horizon / delta` is an integer.
pub(crate) fn steps_for(horizon: f64, delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid(format!("step size must be positive, got {delta}")));
    }
    let n = (horizon / delta).round();
    if n < 1.0 || ((horizon / n) - delta).abs() > 1e-9 * delta {
        return Err(invalid(format!("step size {delta} does not divide the horizon {horizon}")));
    }
    Ok(n as usize)
}

pub(crate) fn check_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.is_empty() {
        return Err(invalid("delta ladder is empty"));
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("delta ladder must be strictly decreasing"));
    }
    Ok(())
}

/// Mean and batch-means standard error of `values`.
pub(crate) fn batch_mean(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    let mean = values.iter().sum::<f64>() / m as f64;
    let batches = BATCHES.min(m);
    if batches < 2 {
        return (mean, 0.0);
    }
    let batch_means: Vec<f64> = (0..batches)
        .map(|b| {
            let (lo, hi) = (b * m / batches, (b + 1) * m / batches);
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect();
    let bm = batch_means.iter().sum::<f64>() / batches as f64;
    let var = batch_means.iter().map(|v| (v - bm).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (mean, (var / batches as f64).sqrt())
}

/// RMSE and its standard error (delta method on the batch-means error of
/// the mean square).
pub(crate) fn rmse_with_stderr(squares: &[f64]) -> (f64, f64) {
    let (mse, se) = batch_mean(squares);
    let rmse = mse.sqrt();
    let se = if rmse > 0.0 { se / (2.0 * rmse) } else { 0.0 };
    (rmse, se)
}

/// Runs `f` on a pool with `workers` threads (0 = global pool).
pub(crate) fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

enum Reference {
    Exact(ExactSolution),
    Transformed(TransformedProblem),
    Euler,
}

struct Plan<'a> {
    study: &'a ErrorStudy,
    levels: Vec<TimeGrid>,
    reference_grid: TimeGrid,
    reference: Reference,
    transformed: Option<TransformedProblem>,
    adaptive: Vec<StepPolicy>,
}

struct PathOutcome {
    /// `schemes × levels` squared errors, scheme-major.
    squares: Vec<f64>,
    /// Adaptive step counts per level (empty without an adaptive scheme).
    steps: Vec<f64>,
}

impl<'a> Plan<'a> {
    fn new(study: &'a ErrorStudy) -> Result<Self> {
        let problem = &study.problem;
        if study.paths < MIN_PATHS {
            return Err(invalid(format!("need at least {MIN_PATHS} paths, got {}", study.paths)));
        }
        if study.schemes.is_empty() {
            return Err(invalid("no scheme selected"));
        }
        if study.refinement < 2 {
            return Err(invalid("reference refinement must be at least 2"));
        }
        check_ladder(&study.ladder)?;
        for s in &study.schemes {
            s.check_compatible(problem)?;
        }
        let horizon = problem.horizon();
        let mut levels = Vec::with_capacity(study.ladder.len());
        for &delta in &study.ladder {
            let grid = TimeGrid::uniform(horizon, steps_for(horizon, delta)?)?;
            if let Some(prev) = levels.last() {
                if !grid.refines(prev) {
                    return Err(invalid(format!("grid for δ = {delta} does not refine the previous ladder grid")));
                }
            }
            levels.push(grid);
        }
        let finest = levels.last().expect("ladder is not empty").steps();
        let reference_grid = TimeGrid::uniform(horizon, finest * study.refinement)?;

        let nondegenerate = problem.is_nondegenerate();
        let transformed = if nondegenerate {
            Some(TransformedProblem::for_problem(problem)?)
        } else {
            None
        };
        let reference = match study.reference {
            ReferencePolicy::Exact => Reference::Exact(ExactSolution::detect(problem).ok_or_else(|| {
                Error::ReferenceUnavailable("exact reference requested but the problem has no closed form".into())
            })?),
            ReferencePolicy::FineGrid => match &transformed {
                Some(tp) => Reference::Transformed(tp.clone()),
                None => Reference::Euler,
            },
        };
        let adaptive = if study.schemes.contains(&SchemeId::AdaptiveEm) {
            study
                .ladder
                .iter()
                .map(|d| StepPolicy::adaptive(*d, study.eps0))
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        Ok(Plan {
            study,
            levels,
            reference_grid,
            reference,
            transformed,
            adaptive,
        })
    }

    fn run_path(&self, index: usize) -> Result<PathOutcome> {
        let problem = &self.study.problem;
        let seed = SeedSpec::new(self.study.seed, index as u64);

        let mut w = sample_path(&self.levels[0], seed.substream(tags::BASE));
        for (l, grid) in self.levels.iter().enumerate().skip(1) {
            w = refine_bridge(&w, grid, seed.substream(tags::LEVEL + l as u64))?;
        }
        let w_ref = refine_bridge(&w, &self.reference_grid, seed.substream(tags::REFERENCE))?;

        let jumps = if problem.has_jumps() {
            sample_jumps(problem.jump_rate(), problem.horizon(), seed.substream(tags::JUMPS))?
        } else {
            JumpTrain::empty()
        };
        let (ref_grid, w_jump) = if jumps.is_empty() {
            (self.reference_grid.clone(), None)
        } else {
            let g = self.reference_grid.augmented(jumps.event_times())?;
            let wj = refine_bridge(&w_ref, &g, seed.substream(tags::JUMP_BRIDGE))?;
            (g, Some(wj))
        };
        let w_full = w_jump.as_ref().unwrap_or(&w_ref);

        let x_ref = self.reference_value(&ref_grid, w_full, &jumps)?;

        let n_levels = self.levels.len();
        let mut squares = Vec::with_capacity(self.study.schemes.len() * n_levels);
        let mut steps = Vec::new();
        for &scheme in &self.study.schemes {
            for (l, grid) in self.levels.iter().enumerate() {
                let value = if scheme == SchemeId::AdaptiveEm {
                    let mut src = OnDemandBrownian::new(&w_ref, seed.substream(tags::ADAPTIVE + l as u64));
                    let mut out = Terminal::default();
                    adaptive_euler_maruyama_into(problem, &self.adaptive[l], &mut src, &mut out)?;
                    steps.push(out.steps as f64);
                    out.value
                } else {
                    let (g, noise) = if jumps.is_empty() {
                        (grid.clone(), coarsen(w_full, grid)?)
                    } else {
                        let g = grid.augmented(jumps.event_times())?;
                        let noise = coarsen(w_full, &g)?;
                        (g, noise)
                    };
                    self.scheme_value(scheme, &g, &noise, &jumps)?
                };
                squares.push((value - x_ref).powi(2));
            }
        }
        Ok(PathOutcome { squares, steps })
    }

    fn reference_value(&self, grid: &TimeGrid, noise: &NoisePath, jumps: &JumpTrain) -> Result<f64> {
        let problem = &self.study.problem;
        let mut out = Terminal::default();
        match &self.reference {
            Reference::Exact(exact) => return Ok(exact.terminal(problem.initial(), noise)),
            Reference::Transformed(tp) => {
                let j = problem.has_jumps().then_some(jumps);
                transformed_into(tp, grid, noise, j, true, &mut out)?
            }
            Reference::Euler if problem.has_jumps() => jump_euler_maruyama_into(problem, grid, noise, jumps, &mut out)?,
            Reference::Euler => euler_maruyama_into(problem, grid, noise, &mut out)?,
        }
        Ok(out.value)
    }

    fn scheme_value(&self, scheme: SchemeId, grid: &TimeGrid, noise: &NoisePath, jumps: &JumpTrain) -> Result<f64> {
        let problem = &self.study.problem;
        let mut out = Terminal::default();
        match scheme {
            SchemeId::Em => euler_maruyama_into(problem, grid, noise, &mut out)?,
            SchemeId::Milstein => milstein_into(problem, grid, noise, &mut out)?,
            SchemeId::JumpEm => jump_euler_maruyama_into(problem, grid, noise, jumps, &mut out)?,
            SchemeId::TransformEm | SchemeId::TransformMilstein => {
                let tp = self.transformed.as_ref().expect("compatibility checked");
                transformed_into(tp, grid, noise, None, scheme == SchemeId::TransformMilstein, &mut out)?
            }
            SchemeId::AdaptiveEm => unreachable!("adaptive runs on the on-demand source"),
        }
        Ok(out.value)
    }
}

/// Runs the study and returns one error ladder per scheme, in the order the
/// schemes were given.
pub fn run_error_study(study: &ErrorStudy) -> Result<Vec<SchemeErrors>> {
    let plan = Plan::new(study)?;
    let outcomes: Vec<PathOutcome> = with_workers(study.workers, || {
        (0..study.paths)
            .into_par_iter()
            .map(|i| plan.run_path(i))
            .collect::<Result<Vec<_>>>()
    })??;

    let n_levels = plan.levels.len();
    let mut adaptive_seen = false;
    let mut result = Vec::with_capacity(study.schemes.len());
    for (s, &scheme) in study.schemes.iter().enumerate() {
        let points = (0..n_levels)
            .map(|l| {
                let squares: Vec<f64> = outcomes.iter().map(|o| o.squares[s * n_levels + l]).collect();
                let (rmse, stderr) = rmse_with_stderr(&squares);
                ErrorPoint {
                    delta: study.ladder[l],
                    rmse,
                    stderr,
                }
            })
            .collect();
        let cost = (scheme == SchemeId::AdaptiveEm && !adaptive_seen).then(|| {
            adaptive_seen = true;
            (0..n_levels)
                .map(|l| {
                    let steps: Vec<f64> = outcomes.iter().map(|o| o.steps[l]).collect();
                    let (mean_steps, stderr) = batch_mean(&steps);
                    CostPoint {
                        delta: study.ladder[l],
                        mean_steps,
                        stderr,
                    }
                })
                .collect()
        });
        result.push(SchemeErrors { scheme, points, cost });
    }
    Ok(result)
}

/// RMSE at `T` of one scheme at one step size, with its batch-means
/// standard error.
pub fn strong_error(
    problem: &SdeProblem,
    scheme: SchemeId,
    delta: f64,
    paths: usize,
    reference: ReferencePolicy,
    seed: u64,
) -> Result<(f64, f64)> {
    let mut study = ErrorStudy::new(problem.clone(), vec![scheme], vec![delta], paths, seed);
    study.reference = reference;
    let r = run_error_study(&study)?;
    let p = r[0].points[0];
    Ok((p.rmse, p.stderr))
}

/// One trajectory of `scheme` with maximal step `delta`, driven by the
/// path-`index` streams of `seed`. Fixed-step schemes need `T/δ` to be an
/// integer; the adaptive scheme bridges a base path with `⌈T/δ⌉` steps.
pub fn sample_trajectory(
    problem: &SdeProblem,
    scheme: SchemeId,
    delta: f64,
    eps0: f64,
    seed: u64,
    index: u64,
) -> Result<Trajectory> {
    scheme.check_compatible(problem)?;
    let horizon = problem.horizon();
    let s = SeedSpec::new(seed, index);
    let mut tr = Trajectory::default();
    if scheme == SchemeId::AdaptiveEm {
        let policy = StepPolicy::adaptive(delta, eps0)?;
        let n = (horizon / delta - 1e-9).ceil().max(1.0) as usize;
        let base = sample_path(&TimeGrid::uniform(horizon, n)?, s.substream(tags::BASE));
        let mut src = OnDemandBrownian::new(&base, s.substream(tags::ADAPTIVE));
        adaptive_euler_maruyama_into(problem, &policy, &mut src, &mut tr)?;
        return Ok(tr);
    }
    let grid = TimeGrid::uniform(horizon, steps_for(horizon, delta)?)?;
    let mut noise = sample_path(&grid, s.substream(tags::BASE));
    let mut grid = grid;
    let jumps = if problem.has_jumps() {
        let j = sample_jumps(problem.jump_rate(), horizon, s.substream(tags::JUMPS))?;
        if !j.is_empty() {
            grid = grid.augmented(j.event_times())?;
            noise = refine_bridge(&noise, &grid, s.substream(tags::JUMP_BRIDGE))?;
        }
        j
    } else {
        JumpTrain::empty()
    };
    match scheme {
        SchemeId::Em => euler_maruyama_into(problem, &grid, &noise, &mut tr)?,
        SchemeId::Milstein => milstein_into(problem, &grid, &noise, &mut tr)?,
        SchemeId::JumpEm => jump_euler_maruyama_into(problem, &grid, &noise, &jumps, &mut tr)?,
        SchemeId::TransformEm | SchemeId::TransformMilstein => {
            let tp = TransformedProblem::for_problem(problem)?;
            transformed_into(&tp, &grid, &noise, None, scheme == SchemeId::TransformMilstein, &mut tr)?
        }
        SchemeId::AdaptiveEm => unreachable!("handled above"),
    }
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::exact::{geometric_problem, ornstein_uhlenbeck_problem};
    use crate::sde::{PiecewiseDrift, SmoothCoefficient};

    fn constant_problem() -> SdeProblem {
        SdeProblem::new(
            PiecewiseDrift::smooth(SmoothCoefficient::constant(0.7)),
            SmoothCoefficient::constant(-0.4),
            0.3,
            1.0,
        )
        .unwrap()
    }

    fn sign_mult() -> SdeProblem {
        SdeProblem::new(
            PiecewiseDrift::sign_type(0.5, -2.0, 0.0),
            SmoothCoefficient::sin_plus_const(0.2, 1.0, 1.0),
            1.0,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn scheme_names_round_trip() {
        for id in SchemeId::ALL {
            assert_eq!(id.name().parse::<SchemeId>().unwrap(), id);
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{}\"", id.name()));
        }
        assert!("rk4".parse::<SchemeId>().is_err());
    }

    #[test]
    fn exact_scheme_has_zero_error() {
        for delta in [0.25, 0.0625, 1.0 / 256.0] {
            let (rmse, _) = strong_error(&constant_problem(), SchemeId::Em, delta, 200, ReferencePolicy::Exact, 1).unwrap();
            assert!(rmse <= 1e-12, "rmse = {rmse}");
        }
    }

    #[test]
    fn preconditions() {
        let p = constant_problem();
        assert!(strong_error(&p, SchemeId::Em, 0.1, 99, ReferencePolicy::Exact, 0).is_err());
        assert!(strong_error(&p, SchemeId::Em, 0.3, 100, ReferencePolicy::Exact, 0).is_err());
        assert!(matches!(
            strong_error(&sign_mult(), SchemeId::Em, 0.25, 100, ReferencePolicy::Exact, 0),
            Err(Error::ReferenceUnavailable(_))
        ));
        assert!(strong_error(&p, SchemeId::JumpEm, 0.25, 100, ReferencePolicy::Exact, 0).is_err());
        let deg = SdeProblem::new(
            PiecewiseDrift::sign_type(0.0, 1.0, 0.0),
            SmoothCoefficient::affine(1.0, 0.0),
            1.0,
            1.0,
        )
        .unwrap();
        assert!(matches!(
            strong_error(&deg, SchemeId::TransformEm, 0.25, 100, ReferencePolicy::FineGrid, 0),
            Err(Error::DegenerateDiffusion { .. })
        ));
        // degenerate σ still has a fine-grid Euler reference for plain EM
        assert!(strong_error(&deg, SchemeId::Em, 0.25, 100, ReferencePolicy::FineGrid, 0).is_ok());
        let mut study = ErrorStudy::new(p.clone(), vec![SchemeId::Em], vec![0.25, 0.125 * 0.75], 100, 0);
        study.reference = ReferencePolicy::Exact;
        assert!(run_error_study(&study).is_err());
        study.ladder = vec![0.125, 0.25];
        assert!(run_error_study(&study).is_err());
    }

    /// Straight re-implementation of one path of the coupled experiment for
    /// Euler–Maruyama on Ornstein–Uhlenbeck, sharing only the seeding.
    fn brute_force_ou_rmse(delta: f64, paths: usize, seed: u64) -> f64 {
        let theta = 1.0;
        let n = (1.0 / delta).round() as usize;
        let n_ref = n * DEFAULT_REFINEMENT;
        let mut sum = 0.0;
        for i in 0..paths {
            let s = SeedSpec::new(seed, i as u64);
            let coarse = sample_path(&TimeGrid::uniform(1.0, n).unwrap(), s.substream(tags::BASE));
            let fine = refine_bridge(&coarse, &TimeGrid::uniform(1.0, n_ref).unwrap(), s.substream(tags::REFERENCE)).unwrap();
            let w = fine.cumulative();
            let mut x = 1.0;
            for k in 0..n {
                let dw = w[(k + 1) * DEFAULT_REFINEMENT] - w[k * DEFAULT_REFINEMENT];
                x += -theta * x * delta + dw;
            }
            let mut exact = (-theta as f64).exp();
            for k in 0..n_ref {
                let t = k as f64 / n_ref as f64;
                exact += (-theta * (1.0 - t)).exp() * (w[k + 1] - w[k]);
            }
            sum += (x - exact).powi(2);
        }
        (sum / paths as f64).sqrt()
    }

    #[test]
    fn ou_matches_brute_force_reimplementation() {
        let delta = 1.0 / 64.0;
        let m = 10_000;
        let p = ornstein_uhlenbeck_problem(1.0, 1.0, 1.0, 1.0).unwrap();
        let (rmse, se) = strong_error(&p, SchemeId::Em, delta, m, ReferencePolicy::Exact, 99).unwrap();
        let brute = brute_force_ou_rmse(delta, m, 99);
        assert!((rmse - brute).abs() <= 3.0 * se, "{rmse} vs {brute} (se {se})");
    }

    #[test]
    fn stderr_follows_square_root_law() {
        let p = geometric_problem(0.5, 0.3, 1.0, 1.0).unwrap();
        let (_, se1) = strong_error(&p, SchemeId::Em, 1.0 / 16.0, 2_000, ReferencePolicy::Exact, 5).unwrap();
        let (_, se2) = strong_error(&p, SchemeId::Em, 1.0 / 16.0, 8_000, ReferencePolicy::Exact, 5).unwrap();
        // quadrupling M halves the standard error; batch means are noisy, so
        // allow a generous band
        let ratio = se1 / se2;
        assert!((1.3..=3.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut study = ErrorStudy::new(
            sign_mult(),
            vec![SchemeId::Em, SchemeId::TransformMilstein, SchemeId::AdaptiveEm],
            vec![0.25, 0.125, 0.0625, 0.03125],
            120,
            3,
        );
        study.refinement = 8;
        let runs: Vec<_> = [1, 4, 16]
            .into_iter()
            .map(|w| {
                study.workers = w;
                run_error_study(&study).unwrap()
            })
            .collect();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[0], runs[2]);
        assert!(runs[0][2].cost.is_some());
    }

    #[test]
    fn jump_study_runs() {
        let p = sign_mult().with_jumps(SmoothCoefficient::constant(0.5), 1.0).unwrap();
        let mut study = ErrorStudy::new(p, vec![SchemeId::JumpEm], vec![0.25, 0.125], 100, 8);
        study.refinement = 4;
        let r = run_error_study(&study).unwrap();
        assert!(r[0].points.iter().all(|p| p.rmse > 0.0 && p.rmse.is_finite()));
    }

    #[test]
    fn batch_statistics() {
        let (m, se) = batch_mean(&[2.0; 40]);
        assert_eq!((m, se), (2.0, 0.0));
        let v: Vec<f64> = (0..40).map(|i| (i % 2) as f64).collect();
        let (m, _) = batch_mean(&v);
        assert_eq!(m, 0.5);
        assert_eq!(rmse_with_stderr(&[0.0; 40]), (0.0, 0.0));
    }
}
