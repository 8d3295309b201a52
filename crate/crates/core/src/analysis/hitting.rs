//! How often Euler paths visit a neighbourhood of the discontinuities.

use rayon::prelude::*;

use super::strong::{steps_for, tags, with_workers};
use crate::error::{invalid, Result};
use crate::noise::{sample_path, SeedSpec};
use crate::schemes::{euler_maruyama_into, Recorder};
use crate::sde::{SdeProblem, TimeGrid};

/// Smallest accepted path count.
pub const MIN_HITTING_PATHS: usize = 1_000;

/// Flags a path once a node lies in `[ζ − ε, ζ + ε]` or two consecutive
/// nodes sit on opposite sides of some `ζ`.
struct BandWatch<'a> {
    breakpoints: &'a [f64],
    band: f64,
    previous: Option<f64>,
    hit: bool,
}

impl Recorder for BandWatch<'_> {
    fn record(&mut self, _t: f64, x: f64) {
        if self.hit {
            return;
        }
        self.hit = self.breakpoints.iter().any(|z| {
            (x - z).abs() <= self.band || self.previous.is_some_and(|p| (p - z).signum() * (x - z).signum() < 0.0)
        });
        self.previous = Some(x);
    }
}

/// Fraction of `paths` Euler–Maruyama trajectories on the uniform grid of
/// step `delta` that enter the `band`-neighbourhood of a breakpoint by `T`.
/// Path `i` is driven by the same noise for every problem with the same
/// horizon, so fractions of two problems are paired.
pub fn hitting_fraction(
    problem: &SdeProblem,
    delta: f64,
    paths: usize,
    band: f64,
    seed: u64,
    workers: usize,
) -> Result<f64> {
    if paths < MIN_HITTING_PATHS {
        return Err(invalid(format!("need at least {MIN_HITTING_PATHS} paths, got {paths}")));
    }
    if !(band >= 0.0 && band.is_finite()) {
        return Err(invalid(format!("band must be nonnegative, got {band}")));
    }
    let breakpoints = problem.drift().breakpoints();
    if breakpoints.is_empty() {
        return Ok(0.0);
    }
    let grid = TimeGrid::uniform(problem.horizon(), steps_for(problem.horizon(), delta)?)?;
    let hits: Vec<bool> = with_workers(workers, || {
        (0..paths)
            .into_par_iter()
            .map(|i| {
                let noise = sample_path(&grid, SeedSpec::new(seed, i as u64).substream(tags::BASE));
                let mut watch = BandWatch {
                    breakpoints,
                    band,
                    previous: None,
                    hit: false,
                };
                euler_maruyama_into(problem, &grid, &noise, &mut watch)?;
                Ok(watch.hit)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(hits.iter().filter(|h| **h).count() as f64 / paths as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sde::{PiecewiseDrift, SmoothCoefficient};

    fn sign_problem(offset: f64, scale: f64, xi: f64) -> SdeProblem {
        SdeProblem::new(
            PiecewiseDrift::sign_type(offset, scale, 0.0),
            SmoothCoefficient::constant(1.0),
            xi,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn starting_inside_band_always_hits() {
        let p = sign_problem(0.5, -2.0, 0.005);
        assert_eq!(hitting_fraction(&p, 1.0 / 64.0, 1000, 0.01, 1, 0).unwrap(), 1.0);
    }

    #[test]
    fn distant_start_rarely_hits() {
        // P(sup |W| ≥ 10 − 2.5) is far below 1e-3 for drift bounded by 2.5
        let p = sign_problem(0.5, -2.0, 10.0);
        assert!(hitting_fraction(&p, 1.0 / 64.0, 1000, 0.01, 2, 0).unwrap() <= 0.001);
    }

    #[test]
    fn smooth_problem_and_preconditions() {
        let p = SdeProblem::new(
            PiecewiseDrift::smooth(SmoothCoefficient::constant(1.0)),
            SmoothCoefficient::constant(1.0),
            0.0,
            1.0,
        )
        .unwrap();
        assert_eq!(hitting_fraction(&p, 0.25, 1000, 0.1, 0, 0).unwrap(), 0.0);
        let s = sign_problem(0.5, -2.0, 1.0);
        assert!(hitting_fraction(&s, 0.25, 999, 0.1, 0, 0).is_err());
        assert!(hitting_fraction(&s, 0.3, 1000, 0.1, 0, 0).is_err());
    }

    #[test]
    fn crossing_between_nodes_counts() {
        let zs = [0.0];
        let mut w = BandWatch {
            breakpoints: &zs,
            band: 0.01,
            previous: None,
            hit: false,
        };
        w.record(0.0, 0.5);
        assert!(!w.hit);
        w.record(0.1, -0.5);
        assert!(w.hit);
    }
}
