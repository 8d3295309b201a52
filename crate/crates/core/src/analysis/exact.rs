//! Closed-form solutions used as exact references.

use crate::error::{Error, Result};
use crate::noise::NoisePath;
use crate::sde::{SdeProblem, SmoothCoefficient};

/// Problem families with a closed-form solution driven by a given path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactSolution {
    /// `μ ≡ c`, `σ ≡ s`: `X_T = ξ + cT + sW_T`.
    Constant { drift: f64, diffusion: f64 },
    /// `μ(x) = a + θx`, `σ ≡ s` (Ornstein–Uhlenbeck for `θ < 0`):
    /// `X_T = ξe^{θT} + a(e^{θT} − 1)/θ + s∫e^{θ(T−t)}dW_t`.
    Linear {
        intercept: f64,
        slope: f64,
        diffusion: f64,
    },
    /// `μ(x) = ax`, `σ(x) = bx`: `X_T = ξ exp((a − b²/2)T + bW_T)`.
    Geometric { a: f64, b: f64 },
}

impl ExactSolution {
    /// Recognises the closed-form families from the coefficient catalog.
    pub fn detect(problem: &SdeProblem) -> Option<Self> {
        if problem.has_jumps() || !problem.drift().breakpoints().is_empty() {
            return None;
        }
        let mu = problem.drift().pieces()[0].as_polynomial()?;
        let sigma = problem.diffusion().as_polynomial()?;
        match (mu.as_slice(), sigma.as_slice()) {
            ([c], [s]) => Some(ExactSolution::Constant {
                drift: *c,
                diffusion: *s,
            }),
            ([a, theta], [s]) => Some(ExactSolution::Linear {
                intercept: *a,
                slope: *theta,
                diffusion: *s,
            }),
            ([a0, a], [b0, b]) if *a0 == 0.0 && *b0 == 0.0 => Some(ExactSolution::Geometric { a: *a, b: *b }),
            _ => None,
        }
    }

    /// Terminal value on the given path. The Ornstein–Uhlenbeck stochastic
    /// integral is a left-point Itô sum on the path's grid, so that case is
    /// only as accurate as the path resolution.
    pub fn terminal(&self, initial: f64, noise: &NoisePath) -> f64 {
        let horizon = noise.grid().horizon();
        match *self {
            ExactSolution::Constant { drift, diffusion } => {
                initial + drift * horizon + diffusion * noise.terminal()
            }
            ExactSolution::Linear {
                intercept,
                slope,
                diffusion,
            } => {
                let growth = (slope * horizon).exp();
                let forcing = if slope == 0.0 {
                    intercept * horizon
                } else {
                    intercept * (growth - 1.0) / slope
                };
                let t = noise.grid().nodes();
                let integral: f64 = noise
                    .increments()
                    .enumerate()
                    .map(|(k, dw)| (slope * (horizon - t[k])).exp() * dw)
                    .sum();
                initial * growth + forcing + diffusion * integral
            }
            ExactSolution::Geometric { a, b } => {
                initial * ((a - 0.5 * b * b) * horizon + b * noise.terminal()).exp()
            }
        }
    }
}

/// Exact terminal value of `problem` on `noise`, if the problem has one.
pub fn exact_solution(problem: &SdeProblem, noise: &NoisePath) -> Result<f64> {
    let exact = ExactSolution::detect(problem).ok_or_else(|| {
        Error::ReferenceUnavailable("problem is not constant-coefficient, linear or geometric".into())
    })?;
    Ok(exact.terminal(problem.initial(), noise))
}

/// Convenience constructors for the closed-form families.
pub fn geometric_problem(a: f64, b: f64, initial: f64, horizon: f64) -> Result<SdeProblem> {
    SdeProblem::new(
        crate::sde::PiecewiseDrift::smooth(SmoothCoefficient::affine(a, 0.0)),
        SmoothCoefficient::affine(b, 0.0),
        initial,
        horizon,
    )
}

pub fn ornstein_uhlenbeck_problem(theta: f64, sigma: f64, initial: f64, horizon: f64) -> Result<SdeProblem> {
    SdeProblem::new(
        crate::sde::PiecewiseDrift::smooth(SmoothCoefficient::affine(-theta, 0.0)),
        SmoothCoefficient::constant(sigma),
        initial,
        horizon,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{coarsen, refine_bridge, sample_path, SeedSpec};
    use crate::sde::{PiecewiseDrift, TimeGrid};

    #[test]
    fn detection() {
        let gbm = geometric_problem(0.5, 0.3, 1.0, 1.0).unwrap();
        assert_eq!(ExactSolution::detect(&gbm), Some(ExactSolution::Geometric { a: 0.5, b: 0.3 }));
        let ou = ornstein_uhlenbeck_problem(2.0, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(ExactSolution::detect(&ou), Some(ExactSolution::Linear { slope, .. }) if slope == -2.0));
        let c = SdeProblem::new(
            PiecewiseDrift::smooth(SmoothCoefficient::constant(-1.5)),
            SmoothCoefficient::constant(0.5),
            1.0,
            1.0,
        )
        .unwrap();
        assert!(matches!(ExactSolution::detect(&c), Some(ExactSolution::Constant { .. })));
        let sign = SdeProblem::new(
            PiecewiseDrift::sign_type(0.0, 1.0, 0.0),
            SmoothCoefficient::constant(1.0),
            1.0,
            1.0,
        )
        .unwrap();
        assert_eq!(ExactSolution::detect(&sign), None);
        let w = sample_path(&TimeGrid::uniform(1.0, 4).unwrap(), SeedSpec::new(0, 0));
        assert!(matches!(exact_solution(&sign, &w), Err(Error::ReferenceUnavailable(_))));
    }

    #[test]
    fn closed_forms() {
        let g = TimeGrid::uniform(1.0, 8).unwrap();
        let w = sample_path(&g, SeedSpec::new(1, 2));
        let c = ExactSolution::Constant {
            drift: 2.0,
            diffusion: 3.0,
        };
        assert_eq!(c.terminal(1.0, &w), 1.0 + 2.0 + 3.0 * w.terminal());
        let gbm = ExactSolution::Geometric { a: 0.5, b: 0.3 };
        assert_eq!(gbm.terminal(2.0, &w), 2.0 * ((0.5 - 0.045) + 0.3 * w.terminal()).exp());
    }

    #[test]
    fn ou_oracle_converges_under_refinement() {
        // The Itô-sum error of the oracle at resolution 2^12 must be far below
        // the Euler error at 2^6 it is used to measure.
        let ou = ExactSolution::Linear {
            intercept: 0.0,
            slope: -1.0,
            diffusion: 1.0,
        };
        let coarse = TimeGrid::uniform(1.0, 1 << 12).unwrap();
        let fine = TimeGrid::uniform(1.0, 1 << 14).unwrap();
        let m = 200;
        let mut oracle_gap = 0.0;
        let mut scheme_err = 0.0;
        let p = ornstein_uhlenbeck_problem(1.0, 1.0, 1.0, 1.0).unwrap();
        let em_grid = TimeGrid::uniform(1.0, 1 << 6).unwrap();
        for i in 0..m {
            let s = SeedSpec::new(5, i);
            let wf = refine_bridge(&sample_path(&coarse, s), &fine, s.substream(1)).unwrap();
            let wc = coarsen(&wf, &coarse).unwrap();
            let a = ou.terminal(1.0, &wc);
            let b = ou.terminal(1.0, &wf);
            oracle_gap += (a - b).powi(2);
            let em = crate::schemes::euler_maruyama(&p, &em_grid, &coarsen(&wf, &em_grid).unwrap())
                .unwrap()
                .terminal();
            scheme_err += (em - b).powi(2);
        }
        assert!(oracle_gap.sqrt() * 10.0 < scheme_err.sqrt(), "{oracle_gap} vs {scheme_err}");
    }
}
