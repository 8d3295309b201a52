//! Log-log least squares for convergence orders.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{invalid, Error, Result};

/// One rung of an error ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorPoint {
    pub delta: f64,
    pub rmse: f64,
    pub stderr: f64,
}

/// Ordinary least squares line through `(log₂ x, log₂ y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% confidence half-width of the slope.
    pub slope_ci: f64,
}

impl LogLogFit {
    pub fn contains(&self, value: f64) -> bool {
        (self.slope - value).abs() <= self.slope_ci
    }
}

/// Regresses `log₂ y` on `log₂ x`. Needs at least four points, all positive.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<LogLogFit> {
    if x.len() != y.len() {
        return Err(invalid("x and y lengths differ"));
    }
    let n = x.len();
    if n < 4 {
        return Err(Error::InsufficientData(format!("regression needs at least 4 points, got {n}")));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InsufficientData(
            "log-log regression needs strictly positive finite values (an exact reference yields zero error)".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.log2()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.log2()).collect();
    let nf = n as f64;
    let mx = lx.iter().sum::<f64>() / nf;
    let my = ly.iter().sum::<f64>() / nf;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("regression abscissae are all equal"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let se = (ssr / (nf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 2.0)
        .expect("degrees of freedom are positive")
        .inverse_cdf(0.975);
    Ok(LogLogFit {
        slope,
        intercept,
        slope_ci: t * se,
    })
}

/// A measured error ladder with its regressed order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub ladder: Vec<ErrorPoint>,
    pub slope: f64,
    pub slope_ci: f64,
    pub intercept: f64,
    pub paths: Option<usize>,
    pub seed: Option<u64>,
}

impl RateReport {
    pub fn fit(&self) -> LogLogFit {
        LogLogFit {
            slope: self.slope,
            intercept: self.intercept,
            slope_ci: self.slope_ci,
        }
    }

    pub fn with_provenance(mut self, paths: usize, seed: u64) -> Self {
        self.paths = Some(paths);
        self.seed = Some(seed);
        self
    }
}

/// Empirical strong order: slope of `log₂ RMSE` against `log₂ δ`.
pub fn estimate_order(ladder: &[ErrorPoint]) -> Result<RateReport> {
    if ladder.windows(2).any(|w| w[1].delta >= w[0].delta) {
        return Err(invalid("ladder step sizes must be strictly decreasing"));
    }
    let x: Vec<f64> = ladder.iter().map(|p| p.delta).collect();
    let y: Vec<f64> = ladder.iter().map(|p| p.rmse).collect();
    let fit = loglog_fit(&x, &y)?;
    Ok(RateReport {
        ladder: ladder.to_vec(),
        slope: fit.slope,
        slope_ci: fit.slope_ci,
        intercept: fit.intercept,
        paths: None,
        seed: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ladder(f: impl Fn(f64) -> f64) -> Vec<ErrorPoint> {
        (4..=10)
            .map(|k| {
                let delta = 2f64.powi(-k);
                ErrorPoint {
                    delta,
                    rmse: f(delta),
                    stderr: 0.0,
                }
            })
            .collect()
    }

    #[test]
    fn exact_power_laws() {
        let r = estimate_order(&ladder(|d| d.sqrt())).unwrap();
        assert!((r.slope - 0.5).abs() < 1e-12);
        assert!(r.slope_ci < 1e-10);
        let r = estimate_order(&ladder(|d| 3.0 * d.powf(0.75))).unwrap();
        assert!((r.slope - 0.75).abs() < 1e-12);
        assert!((r.intercept - 3f64.log2()).abs() < 1e-10);
    }

    #[test]
    fn rejects_degenerate_ladders() {
        let short = &ladder(|d| d)[..3];
        assert!(matches!(estimate_order(short), Err(Error::InsufficientData(_))));
        let mut zero = ladder(|d| d);
        zero[2].rmse = 0.0;
        assert!(matches!(estimate_order(&zero), Err(Error::InsufficientData(_))));
        let mut unsorted = ladder(|d| d);
        unsorted.swap(0, 1);
        assert!(estimate_order(&unsorted).is_err());
    }

    #[test]
    fn ci_matches_textbook_value() {
        // y = x + noise with residuals ±e: hand-computed se and t(0.975, 2)
        let x = [1.0, 2.0, 4.0, 8.0];
        let e = 0.1_f64;
        let y: Vec<f64> = x
            .iter()
            .zip([e, -e, -e, e])
            .map(|(x, r): (&f64, f64)| (x.log2() + r).exp2())
            .collect();
        let fit = loglog_fit(&x, &y).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
        // lx = 0,1,2,3: sxx = 5, residuals after fit: ±0.1 pattern has zero
        // correlation with lx, ssr = 0.04
        let se = (0.04_f64 / 2.0 / 5.0).sqrt();
        assert!((fit.slope_ci - 4.302_652_729_911_275 * se).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn slope_invariant_under_scaling(
            c in 1e-3f64..1e3,
            noise in proptest::collection::vec(-0.3f64..0.3, 7),
        ) {
            let base: Vec<ErrorPoint> = ladder(|d| d.powf(0.6))
                .into_iter()
                .zip(&noise)
                .map(|(p, n)| ErrorPoint { rmse: p.rmse * n.exp(), ..p })
                .collect();
            let scaled: Vec<ErrorPoint> = base.iter().map(|p| ErrorPoint { rmse: c * p.rmse, ..*p }).collect();
            let a = estimate_order(&base).unwrap();
            let b = estimate_order(&scaled).unwrap();
            prop_assert!((a.slope - b.slope).abs() < 1e-9);
            prop_assert!((a.slope_ci - b.slope_ci).abs() < 1e-9);
        }
    }
}
