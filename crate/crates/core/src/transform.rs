//! The removal-of-discontinuity transform.
//!
//! `G(x) = x + Σ_k α_k φ_k(x − ζ_k)` with the compactly supported bump
//! `φ(u) = u|u|(1 − |u|/c)³` on `|u| ≤ c`. The bump has `φ(0) = φ′(0) = 0` and
//! `φ″(0±) = ±2`, so `G″` jumps by `4α_k` at `ζ_k`. With
//! `α_k = (μ(ζ_k−) − μ(ζ_k+)) / (2σ(ζ_k)²)` that jump cancels the drift jump in
//! the Itô drift `G′μ + ½G″σ²` of `Z = G(X)`.

use crate::error::{Error, Result};
use crate::sde::{PiecewiseDrift, SdeProblem, SmoothCoefficient};

const INVERSE_MAX_ITER: usize = 200;
const INVERSE_RTOL: f64 = 1e-12;
const CONTINUITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Bump {
    center: f64,
    alpha: f64,
    radius: f64,
}

impl Bump {
    #[inline]
    fn contains(&self, x: f64) -> bool {
        (x - self.center).abs() <= self.radius
    }

    /// `(φ, φ′, φ″)` at `u = x − ζ`, with the right value of `φ″` at `u = 0`.
    #[inline]
    fn profile(&self, x: f64) -> (f64, f64, f64) {
        let u = x - self.center;
        let a = u.abs();
        if a > self.radius {
            return (0.0, 0.0, 0.0);
        }
        let s = a / self.radius;
        let q = 1.0 - s;
        let q2 = q * q;
        let phi = u * a * q2 * q;
        let d1 = a * q2 * (2.0 - 5.0 * s);
        let d2 = q * (2.0 - 16.0 * s + 20.0 * s * s);
        (phi, d1, if u < 0.0 { -d2 } else { d2 })
    }
}

/// First derivative and the two one-sided second derivatives of `G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub first: f64,
    pub second_left: f64,
    pub second_right: f64,
}

/// The monotone map `G` and its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformG {
    bumps: Vec<Bump>,
}

impl TransformG {
    /// The identity map.
    pub fn identity() -> Self {
        TransformG { bumps: Vec::new() }
    }

    /// Slopes `α_k` and radii `c_k = min(gap_k/2, 1/(2|α_k| + 1))` for each
    /// breakpoint of `drift`.
    pub fn build(drift: &PiecewiseDrift, diffusion: &SmoothCoefficient) -> Result<Self> {
        let zetas = drift.breakpoints();
        let mut bumps = Vec::with_capacity(zetas.len());
        for (k, &zeta) in zetas.iter().enumerate() {
            let sigma = diffusion.eval(zeta);
            if sigma == 0.0 {
                return Err(Error::DegenerateDiffusion { breakpoint: zeta });
            }
            let (left, right) = drift.one_sided_limits(k)?;
            let alpha = (left - right) / (2.0 * sigma * sigma);
            let gap = match (k.checked_sub(1).map(|j| zetas[j]), zetas.get(k + 1)) {
                (Some(l), Some(r)) => (zeta - l).min(r - zeta),
                (Some(l), None) => zeta - l,
                (None, Some(r)) => r - zeta,
                (None, None) => f64::INFINITY,
            };
            let radius = (0.5 * gap).min(1.0 / (2.0 * alpha.abs() + 1.0));
            bumps.push(Bump {
                center: zeta,
                alpha,
                radius,
            });
        }
        Ok(TransformG { bumps })
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.bumps.iter().map(|b| b.center)
    }

    pub fn slopes(&self) -> impl Iterator<Item = f64> + '_ {
        self.bumps.iter().map(|b| b.alpha)
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        self.bumps.iter().map(|b| b.radius)
    }

    /// The bump whose support contains `x`, if any.
    #[inline]
    fn active(&self, x: f64) -> Option<&Bump> {
        match self.bumps.len() {
            0 => None,
            1 => Some(&self.bumps[0]).filter(|b| b.contains(x)),
            _ => {
                let k = self.bumps.partition_point(|b| b.center < x);
                [k.checked_sub(1), Some(k)]
                    .into_iter()
                    .flatten()
                    .filter_map(|i| self.bumps.get(i))
                    .find(|b| b.contains(x))
            }
        }
    }

    /// Whether `x` lies in the union of supports. Outside, `G` is the identity.
    #[inline]
    pub fn in_support(&self, x: f64) -> bool {
        self.active(x).is_some()
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self.active(x) {
            Some(b) => x + b.alpha * b.profile(x).0,
            None => x,
        }
    }

    #[inline]
    pub fn derivatives(&self, x: f64) -> Derivatives {
        match self.active(x) {
            Some(b) => {
                let (_, d1, d2) = b.profile(x);
                let first = 1.0 + b.alpha * d1;
                let second = b.alpha * d2;
                if x == b.center {
                    Derivatives {
                        first,
                        second_left: -second,
                        second_right: second,
                    }
                } else {
                    Derivatives {
                        first,
                        second_left: second,
                        second_right: second,
                    }
                }
            }
            None => Derivatives {
                first: 1.0,
                second_left: 0.0,
                second_right: 0.0,
            },
        }
    }

    /// `G⁻¹(z)` by bracketed, bisection-safeguarded Newton iteration. Each
    /// support interval is mapped onto itself, which provides the bracket.
    pub fn invert(&self, z: f64) -> Result<f64> {
        let Some(b) = self.active(z) else {
            return Ok(z);
        };
        let tol = INVERSE_RTOL * (1.0 + z.abs());
        let (mut lo, mut hi) = (b.center - b.radius, b.center + b.radius);
        let mut x = z;
        for _ in 0..INVERSE_MAX_ITER {
            let (phi, d1, _) = b.profile(x);
            let f = x + b.alpha * phi - z;
            if f.abs() <= tol {
                return Ok(x);
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let step = x - f / (1.0 + b.alpha * d1);
            x = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
            if hi - lo <= f64::EPSILON * (1.0 + z.abs()) {
                let f = x + b.alpha * b.profile(x).0 - z;
                if f.abs() <= tol {
                    return Ok(x);
                }
                break;
            }
        }
        Err(Error::InversionFailed {
            z,
            iterations: INVERSE_MAX_ITER,
        })
    }

    /// The first pair of breakpoints whose supports overlap, or `None` when
    /// supports are pairwise disjoint (touching endpoints allowed).
    pub fn overlapping_supports(&self) -> Option<(f64, f64)> {
        self.bumps
            .windows(2)
            .find(|w| w[0].center + w[0].radius > w[1].center - w[1].radius)
            .map(|w| (w[0].center, w[1].center))
    }
}

/// Coefficients of the SDE for `Z = G(X)` evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZCoefficients {
    /// `G⁻¹(z)`
    pub x: f64,
    /// `μ̃(z) = G′μ + ½G″σ²` at `x`
    pub drift: f64,
    /// `σ̃(z) = G′σ` at `x`
    pub diffusion: f64,
    /// `σ̃σ̃′(z) = σ(G″σ + G′σ′)` at `x`, the product the Milstein correction needs
    pub diffusion_product: f64,
}

/// The Itô-transformed problem for `Z = G(X)`.
#[derive(Debug, Clone)]
pub struct TransformedProblem {
    transform: TransformG,
    problem: SdeProblem,
}

impl TransformedProblem {
    /// Pairs `G` with the problem and checks that the transformed drift is
    /// continuous across every image breakpoint.
    pub fn new(transform: TransformG, problem: &SdeProblem) -> Result<Self> {
        problem.require_nondegenerate()?;
        let tp = TransformedProblem {
            transform,
            problem: problem.clone(),
        };
        for (k, zeta) in tp.problem.drift().breakpoints().iter().enumerate() {
            let (left, right) = tp.drift_limits(k)?;
            let gap = (right - left).abs();
            if !(gap <= CONTINUITY_TOL) {
                return Err(Error::ContinuityViolation {
                    breakpoint: *zeta,
                    gap,
                });
            }
        }
        Ok(tp)
    }

    /// Builds `G` for the problem and transforms it.
    pub fn for_problem(problem: &SdeProblem) -> Result<Self> {
        let g = TransformG::build(problem.drift(), problem.diffusion())?;
        TransformedProblem::new(g, problem)
    }

    pub fn transform(&self) -> &TransformG {
        &self.transform
    }

    pub fn problem(&self) -> &SdeProblem {
        &self.problem
    }

    /// `G(ξ)`
    pub fn initial(&self) -> f64 {
        self.transform.apply(self.problem.initial())
    }

    /// One-sided limits of `μ̃` at `G(ζ_k)`.
    pub fn drift_limits(&self, k: usize) -> Result<(f64, f64)> {
        let zeta = self.problem.drift().breakpoints()[k];
        let (mu_l, mu_r) = self.problem.drift().one_sided_limits(k)?;
        let d = self.transform.derivatives(zeta);
        let s2 = self.problem.diffusion().eval(zeta).powi(2);
        Ok((
            d.first * mu_l + 0.5 * d.second_left * s2,
            d.first * mu_r + 0.5 * d.second_right * s2,
        ))
    }

    /// All transformed coefficients at `z`, sharing one inversion.
    #[inline]
    pub fn coefficients(&self, z: f64) -> Result<ZCoefficients> {
        let drift = self.problem.drift();
        let sigma = self.problem.diffusion();
        if !self.transform.in_support(z) {
            let s = sigma.eval(z);
            return Ok(ZCoefficients {
                x: z,
                drift: drift.eval(z),
                diffusion: s,
                diffusion_product: s * sigma.derivative(z),
            });
        }
        let x = self.transform.invert(z)?;
        let d = self.transform.derivatives(x);
        let s = sigma.eval(x);
        Ok(ZCoefficients {
            x,
            drift: d.first * drift.eval(x) + 0.5 * d.second_right * s * s,
            diffusion: d.first * s,
            diffusion_product: s * (d.second_right * s + d.first * sigma.derivative(x)),
        })
    }

    pub fn drift(&self, z: f64) -> Result<f64> {
        Ok(self.coefficients(z)?.drift)
    }

    pub fn diffusion(&self, z: f64) -> Result<f64> {
        Ok(self.coefficients(z)?.diffusion)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn inward() -> PiecewiseDrift {
        PiecewiseDrift::sign_type(0.5, -2.0, 0.0)
    }

    fn multi() -> PiecewiseDrift {
        PiecewiseDrift::new(
            vec![-1.0, 0.5, 2.0],
            vec![
                SmoothCoefficient::affine(0.3, 1.0),
                SmoothCoefficient::constant(-2.0),
                SmoothCoefficient::sin_plus_const(1.0, 2.0, 0.5),
                SmoothCoefficient::tanh(1.0, 1.0, 3.0),
            ],
        )
        .unwrap()
    }

    fn sigma_var() -> SmoothCoefficient {
        SmoothCoefficient::sin_plus_const(0.2, 1.0, 1.0)
    }

    #[test]
    fn slopes_match_hand_computation() {
        let g = TransformG::build(&inward(), &SmoothCoefficient::constant(1.0)).unwrap();
        assert_eq!(g.slopes().collect::<Vec<_>>(), vec![2.0]);
        assert_eq!(g.radii().collect::<Vec<_>>(), vec![0.2]);
        let g = TransformG::build(&PiecewiseDrift::sign_type(0.0, 1.0, 0.0), &SmoothCoefficient::constant(2.0)).unwrap();
        assert_eq!(g.slopes().collect::<Vec<_>>(), vec![-0.25]);
    }

    #[test]
    fn continuous_drift_gives_identity() {
        let d = PiecewiseDrift::new(
            vec![0.0],
            vec![SmoothCoefficient::affine(1.0, 0.0), SmoothCoefficient::affine(1.0, 0.0)],
        )
        .unwrap();
        let g = TransformG::build(&d, &SmoothCoefficient::constant(1.0)).unwrap();
        assert_eq!(g.slopes().collect::<Vec<_>>(), vec![0.0]);
        for x in [-0.5, -0.01, 0.0, 0.3] {
            assert_eq!(g.apply(x), x);
        }
    }

    #[test]
    fn degenerate_diffusion_rejected() {
        let err = TransformG::build(&inward(), &SmoothCoefficient::affine(1.0, 0.0)).unwrap_err();
        assert_eq!(err, Error::DegenerateDiffusion { breakpoint: 0.0 });
    }

    #[test]
    fn apply_examples() {
        let g = TransformG {
            bumps: vec![Bump {
                center: 0.0,
                alpha: 2.0,
                radius: 0.5,
            }],
        };
        assert_eq!(g.apply(0.25), 0.265625);
        assert_eq!(g.apply(0.0), 0.0);
        assert_eq!(g.apply(0.7), 0.7);
        assert_eq!(g.apply(-3.0), -3.0);
    }

    #[test]
    fn derivatives_at_and_away_from_breakpoints() {
        let g = TransformG::build(&inward(), &SmoothCoefficient::constant(1.0)).unwrap();
        let d = g.derivatives(0.0);
        assert_eq!((d.first, d.second_left, d.second_right), (1.0, -4.0, 4.0));
        let out = g.derivatives(5.0);
        assert_eq!((out.first, out.second_left, out.second_right), (1.0, 0.0, 0.0));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let g = TransformG::build(&multi(), &sigma_var()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let h = 1e-6;
        let mut checked = 0;
        while checked < 1000 {
            let x: f64 = rng.random_range(-2.0..3.0);
            if g.breakpoints().any(|z| (x - z).abs() < 1e-4) {
                continue;
            }
            let fd = (g.apply(x + h) - g.apply(x - h)) / (2.0 * h);
            assert!((fd - g.derivatives(x).first).abs() <= 1e-6, "x = {x}");
            let fd2 = (g.derivatives(x + h).first - g.derivatives(x - h).first) / (2.0 * h);
            assert!((fd2 - g.derivatives(x).second_right).abs() <= 1e-5, "x = {x}");
            checked += 1;
        }
    }

    #[test]
    fn monotone_identity_outside_and_unit_slope_at_breakpoints() {
        for (drift, sigma) in [
            (inward(), SmoothCoefficient::constant(1.0)),
            (multi(), sigma_var()),
            (PiecewiseDrift::sign_type(0.0, 50.0, 0.0), SmoothCoefficient::constant(0.3)),
        ] {
            let g = TransformG::build(&drift, &sigma).unwrap();
            assert!(g.overlapping_supports().is_none());
            for b in &g.bumps {
                let n = 100_000;
                let lo = b.center - b.radius;
                let min = (0..=n)
                    .map(|i| g.derivatives(lo + 2.0 * b.radius * i as f64 / n as f64).first)
                    .fold(f64::INFINITY, f64::min);
                assert!(min >= 0.1, "G' dips to {min}");
                assert_eq!(g.derivatives(b.center).first, 1.0);
                for x in [b.center - b.radius * 1.0001, b.center + b.radius * 1.0001] {
                    if !g.in_support(x) {
                        assert_eq!(g.apply(x), x);
                    }
                }
            }
        }
    }

    #[test]
    fn inversion_round_trip() {
        let g = TransformG::build(&multi(), &sigma_var()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10_000 {
            let x: f64 = rng.random_range(-3.0..4.0);
            let z = g.apply(x);
            let back = g.invert(z).unwrap();
            assert!((back - x).abs() <= 1e-10, "{x} -> {z} -> {back}");
            assert!((g.apply(back) - z).abs() <= 1e-12 * (1.0 + z.abs()));
        }
        for z in g.breakpoints().collect::<Vec<_>>() {
            assert_eq!(g.invert(z).unwrap(), z);
        }
        assert_eq!(g.invert(100.0).unwrap(), 100.0);
    }

    #[test]
    fn transformed_drift_jump_cancels() {
        let p = SdeProblem::new(inward(), SmoothCoefficient::constant(1.0), 1.0, 1.0).unwrap();
        let tp = TransformedProblem::for_problem(&p).unwrap();
        let (l, r) = tp.drift_limits(0).unwrap();
        assert_eq!((l, r), (0.5, 0.5));

        let p = SdeProblem::new(multi(), sigma_var(), 0.0, 1.0).unwrap();
        let tp = TransformedProblem::for_problem(&p).unwrap();
        for k in 0..3 {
            let (l, r) = tp.drift_limits(k).unwrap();
            assert!((l - r).abs() <= 1e-8);
        }
    }

    #[test]
    fn wrong_slope_is_caught() {
        let p = SdeProblem::new(inward(), SmoothCoefficient::constant(1.0), 1.0, 1.0).unwrap();
        let wrong = TransformG {
            bumps: vec![Bump {
                center: 0.0,
                alpha: 1.0,
                radius: 0.2,
            }],
        };
        assert!(matches!(
            TransformedProblem::new(wrong, &p),
            Err(Error::ContinuityViolation { .. })
        ));
    }

    #[test]
    fn transformed_drift_has_bounded_difference_quotients() {
        let p = SdeProblem::new(inward(), sigma_var(), 1.0, 1.0).unwrap();
        let tp = TransformedProblem::for_problem(&p).unwrap();
        let h = 1e-4;
        let mut worst_tilde = 0.0_f64;
        let mut worst_raw = 0.0_f64;
        let n = 20_000;
        for i in 0..n {
            let z = -1.0 + 2.0 * i as f64 / n as f64;
            let q = (tp.drift(z + h).unwrap() - tp.drift(z - h).unwrap()).abs() / (2.0 * h);
            worst_tilde = worst_tilde.max(q);
            let q = (p.drift().eval(z + h) - p.drift().eval(z - h)).abs() / (2.0 * h);
            worst_raw = worst_raw.max(q);
        }
        assert!(worst_tilde < 1000.0, "μ̃ quotient {worst_tilde}");
        assert!(worst_raw >= 4.0 / (2.0 * h) * 0.99, "μ quotient {worst_raw}");
    }

    #[test]
    fn transformed_coefficients_without_breakpoints_are_untouched() {
        let drift = PiecewiseDrift::smooth(SmoothCoefficient::polynomial(vec![0.1, -1.0, 0.2]));
        let p = SdeProblem::new(drift.clone(), sigma_var(), 1.0, 1.0).unwrap();
        let tp = TransformedProblem::for_problem(&p).unwrap();
        for z in [-2.0, -0.3, 0.0, 0.7, 5.0] {
            let c = tp.coefficients(z).unwrap();
            assert_eq!(c.drift, drift.eval(z));
            assert_eq!(c.diffusion, sigma_var().eval(z));
            assert_eq!(c.x, z);
        }
        // outside the support of a nontrivial G as well
        let p = SdeProblem::new(inward(), sigma_var(), 1.0, 1.0).unwrap();
        let tp = TransformedProblem::for_problem(&p).unwrap();
        assert_eq!(tp.diffusion(3.0).unwrap(), sigma_var().eval(3.0));
    }

    #[test]
    fn milstein_product_matches_chain_rule() {
        // σ̃σ̃′ computed in x-coordinates against a finite difference of σ̃ in z
        let p = SdeProblem::new(inward(), sigma_var(), 1.0, 1.0).unwrap();
        let tp = TransformedProblem::for_problem(&p).unwrap();
        let h = 1e-6;
        for z in [-0.15, -0.05, 0.03, 0.12, 0.5] {
            let c = tp.coefficients(z).unwrap();
            let fd = (tp.diffusion(z + h).unwrap() - tp.diffusion(z - h).unwrap()) / (2.0 * h);
            assert!((c.diffusion * fd - c.diffusion_product).abs() <= 1e-6, "z = {z}");
        }
    }
}
