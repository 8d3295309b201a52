//! Problem representation: coefficients, piecewise drifts, the SDE itself and
//! time grids.
//!
//! Every coefficient is a closed form from a small catalog so that one-sided
//! limits and derivatives are exact. The drift is piecewise: finitely many
//! breakpoints `ζ_1 < … < ζ_m` split the line into `m + 1` open intervals and
//! each interval carries its own catalog entry.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A smooth scalar function from a fixed catalog, with exact first and second
/// derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothCoefficient {
    /// `value`
    Constant { value: f64 },
    /// `slope·x + intercept`
    Affine { slope: f64, intercept: f64 },
    /// `Σ coefficients[i]·xⁱ` (ascending powers)
    Polynomial { coefficients: Vec<f64> },
    /// `amplitude·sin(frequency·x) + offset`
    SinPlusConst {
        amplitude: f64,
        frequency: f64,
        offset: f64,
    },
    /// `amplitude·tanh(scale·x) + offset`
    Tanh {
        amplitude: f64,
        scale: f64,
        offset: f64,
    },
}

impl SmoothCoefficient {
    pub fn constant(value: f64) -> Self {
        SmoothCoefficient::Constant { value }
    }

    pub fn affine(slope: f64, intercept: f64) -> Self {
        SmoothCoefficient::Affine { slope, intercept }
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Self {
        SmoothCoefficient::Polynomial { coefficients }
    }

    pub fn sin_plus_const(amplitude: f64, frequency: f64, offset: f64) -> Self {
        SmoothCoefficient::SinPlusConst {
            amplitude,
            frequency,
            offset,
        }
    }

    pub fn tanh(amplitude: f64, scale: f64, offset: f64) -> Self {
        SmoothCoefficient::Tanh {
            amplitude,
            scale,
            offset,
        }
    }

    /// `λ·f`.
    pub fn scaled(&self, lambda: f64) -> Self {
        match self {
            SmoothCoefficient::Constant { value } => SmoothCoefficient::constant(lambda * value),
            SmoothCoefficient::Affine { slope, intercept } => SmoothCoefficient::affine(lambda * slope, lambda * intercept),
            SmoothCoefficient::Polynomial { coefficients } => {
                SmoothCoefficient::polynomial(coefficients.iter().map(|c| lambda * c).collect())
            }
            SmoothCoefficient::SinPlusConst {
                amplitude,
                frequency,
                offset,
            } => SmoothCoefficient::sin_plus_const(lambda * amplitude, *frequency, lambda * offset),
            SmoothCoefficient::Tanh {
                amplitude,
                scale,
                offset,
            } => SmoothCoefficient::tanh(lambda * amplitude, *scale, lambda * offset),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SmoothCoefficient::Constant { value } => *value,
            SmoothCoefficient::Affine { slope, intercept } => slope * x + intercept,
            SmoothCoefficient::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
            SmoothCoefficient::SinPlusConst {
                amplitude,
                frequency,
                offset,
            } => amplitude * (frequency * x).sin() + offset,
            SmoothCoefficient::Tanh {
                amplitude,
                scale,
                offset,
            } => amplitude * (scale * x).tanh() + offset,
        }
    }

    // Kept out of line: a sin and cos of the same argument in one function
    // get fused into sincos, which can round `eval` differently by one ulp.
    #[inline(never)]
    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            SmoothCoefficient::Constant { .. } => 0.0,
            SmoothCoefficient::Affine { slope, .. } => *slope,
            SmoothCoefficient::Polynomial { coefficients } => coefficients
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, c)| acc * x + i as f64 * c),
            SmoothCoefficient::SinPlusConst {
                amplitude,
                frequency,
                ..
            } => amplitude * frequency * (frequency * x).cos(),
            SmoothCoefficient::Tanh {
                amplitude, scale, ..
            } => {
                let t = (scale * x).tanh();
                amplitude * scale * (1.0 - t * t)
            }
        }
    }

    #[inline]
    pub fn second_derivative(&self, x: f64) -> f64 {
        match self {
            SmoothCoefficient::Constant { .. } | SmoothCoefficient::Affine { .. } => 0.0,
            SmoothCoefficient::Polynomial { coefficients } => coefficients
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (i, c)| acc * x + (i * (i - 1)) as f64 * c),
            SmoothCoefficient::SinPlusConst {
                amplitude,
                frequency,
                ..
            } => -amplitude * frequency * frequency * (frequency * x).sin(),
            SmoothCoefficient::Tanh {
                amplitude, scale, ..
            } => {
                let t = (scale * x).tanh();
                -2.0 * amplitude * scale * scale * t * (1.0 - t * t)
            }
        }
    }

    /// True when the function is identically zero.
    pub fn is_zero(&self) -> bool {
        match self {
            SmoothCoefficient::Constant { value } => *value == 0.0,
            SmoothCoefficient::Affine { slope, intercept } => *slope == 0.0 && *intercept == 0.0,
            SmoothCoefficient::Polynomial { coefficients } => coefficients.iter().all(|c| *c == 0.0),
            SmoothCoefficient::SinPlusConst {
                amplitude, offset, ..
            }
            | SmoothCoefficient::Tanh {
                amplitude, offset, ..
            } => *amplitude == 0.0 && *offset == 0.0,
        }
    }

    /// Polynomial coefficients (ascending) when the entry is a polynomial of
    /// any flavour, `None` for transcendental entries.
    pub fn as_polynomial(&self) -> Option<Vec<f64>> {
        let mut c = match self {
            SmoothCoefficient::Constant { value } => vec![*value],
            SmoothCoefficient::Affine { slope, intercept } => vec![*intercept, *slope],
            SmoothCoefficient::Polynomial { coefficients } => coefficients.clone(),
            _ => return None,
        };
        while c.len() > 1 && c.last() == Some(&0.0) {
            c.pop();
        }
        Some(c)
    }

    fn validate(&self) -> Result<()> {
        let finite = match self {
            SmoothCoefficient::Constant { value } => value.is_finite(),
            SmoothCoefficient::Affine { slope, intercept } => slope.is_finite() && intercept.is_finite(),
            SmoothCoefficient::Polynomial { coefficients } => coefficients.iter().all(|c| c.is_finite()),
            SmoothCoefficient::SinPlusConst {
                amplitude,
                frequency,
                offset,
            } => amplitude.is_finite() && frequency.is_finite() && offset.is_finite(),
            SmoothCoefficient::Tanh {
                amplitude,
                scale,
                offset,
            } => amplitude.is_finite() && scale.is_finite() && offset.is_finite(),
        };
        if finite {
            Ok(())
        } else {
            Err(invalid("coefficient parameters must be finite"))
        }
    }
}

/// Declared per-piece Lipschitz constants, valid on the box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzBounds {
    pub lower: f64,
    pub upper: f64,
    pub bounds: Vec<f64>,
}

#[derive(Deserialize)]
struct PiecewiseDriftRepr {
    #[serde(default)]
    breakpoints: Vec<f64>,
    pieces: Vec<SmoothCoefficient>,
    #[serde(default)]
    breakpoint_values: Option<Vec<f64>>,
    #[serde(default)]
    lipschitz: Option<LipschitzBounds>,
}

/// A piecewise smooth drift with finitely many breakpoints.
///
/// At a breakpoint the drift takes the stored breakpoint value, which is the
/// right limit unless overridden.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseDriftRepr")]
pub struct PiecewiseDrift {
    breakpoints: Vec<f64>,
    pieces: Vec<SmoothCoefficient>,
    breakpoint_values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lipschitz: Option<LipschitzBounds>,
}

impl TryFrom<PiecewiseDriftRepr> for PiecewiseDrift {
    type Error = Error;

    fn try_from(repr: PiecewiseDriftRepr) -> Result<Self> {
        let mut drift = PiecewiseDrift::new(repr.breakpoints, repr.pieces)?;
        if let Some(values) = repr.breakpoint_values {
            drift = drift.with_breakpoint_values(values)?;
        }
        if let Some(lip) = repr.lipschitz {
            drift = drift.with_lipschitz(lip)?;
        }
        Ok(drift)
    }
}

impl PiecewiseDrift {
    /// Builds a drift from strictly increasing breakpoints and one piece per
    /// open interval (`pieces.len() == breakpoints.len() + 1`).
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<SmoothCoefficient>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(invalid(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        if breakpoints.iter().any(|z| !z.is_finite()) {
            return Err(invalid("breakpoints must be finite"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        for p in &pieces {
            p.validate()?;
        }
        let breakpoint_values = breakpoints
            .iter()
            .enumerate()
            .map(|(k, z)| pieces[k + 1].eval(*z))
            .collect();
        Ok(PiecewiseDrift {
            breakpoints,
            pieces,
            breakpoint_values,
            lipschitz: None,
        })
    }

    /// A drift without breakpoints.
    pub fn smooth(piece: SmoothCoefficient) -> Self {
        PiecewiseDrift {
            breakpoints: Vec::new(),
            pieces: vec![piece],
            breakpoint_values: Vec::new(),
            lipschitz: None,
        }
    }

    /// `offset + scale·sign(x − at)` with the right-limit convention at `at`.
    pub fn sign_type(offset: f64, scale: f64, at: f64) -> Self {
        PiecewiseDrift::new(
            vec![at],
            vec![
                SmoothCoefficient::constant(offset - scale),
                SmoothCoefficient::constant(offset + scale),
            ],
        )
        .expect("single finite breakpoint is always valid")
    }

    /// `λ·μ`, breakpoint values and Lipschitz bounds included.
    pub fn scaled(&self, lambda: f64) -> Self {
        PiecewiseDrift {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.scaled(lambda)).collect(),
            breakpoint_values: self.breakpoint_values.iter().map(|v| lambda * v).collect(),
            lipschitz: self.lipschitz.as_ref().map(|l| LipschitzBounds {
                bounds: l.bounds.iter().map(|b| lambda.abs() * b).collect(),
                ..l.clone()
            }),
        }
    }

    pub fn with_breakpoint_values(mut self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.breakpoints.len() {
            return Err(invalid(format!(
                "expected {} breakpoint values, got {}",
                self.breakpoints.len(),
                values.len()
            )));
        }
        self.breakpoint_values = values;
        Ok(self)
    }

    pub fn with_lipschitz(mut self, lip: LipschitzBounds) -> Result<Self> {
        if lip.bounds.len() != self.pieces.len() {
            return Err(invalid("one Lipschitz bound per piece is required"));
        }
        if !(lip.lower < lip.upper) {
            return Err(invalid("Lipschitz box must satisfy lower < upper"));
        }
        self.lipschitz = Some(lip);
        Ok(self)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[SmoothCoefficient] {
        &self.pieces
    }

    pub fn lipschitz(&self) -> Option<&LipschitzBounds> {
        self.lipschitz.as_ref()
    }

    /// Index of the piece whose open interval contains `x`, and whether `x`
    /// sits exactly on a breakpoint.
    #[inline]
    fn locate(&self, x: f64) -> (usize, bool) {
        let k = self.breakpoints.partition_point(|z| *z < x);
        let on = k < self.breakpoints.len() && self.breakpoints[k] == x;
        (k, on)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self.locate(x) {
            (k, true) => self.breakpoint_values[k],
            (k, false) => self.pieces[k].eval(x),
        }
    }

    /// Derivative of the active piece; right derivative at breakpoints.
    pub fn derivative(&self, x: f64) -> f64 {
        match self.locate(x) {
            (k, true) => self.pieces[k + 1].derivative(x),
            (k, false) => self.pieces[k].derivative(x),
        }
    }

    /// Left and right limits at breakpoint `k` (zero-based).
    pub fn one_sided_limits(&self, k: usize) -> Result<(f64, f64)> {
        let z = *self.breakpoints.get(k).ok_or(Error::IndexOutOfRange {
            index: k,
            count: self.breakpoints.len(),
        })?;
        Ok((self.pieces[k].eval(z), self.pieces[k + 1].eval(z)))
    }

    /// Samples every piece on the declared Lipschitz box at `samples` points
    /// and returns the largest observed difference quotient per piece.
    /// Fails if any exceeds the declared bound.
    pub fn check_lipschitz(&self, samples: usize) -> Result<Vec<f64>> {
        let lip = self
            .lipschitz
            .as_ref()
            .ok_or_else(|| invalid("no Lipschitz bounds declared"))?;
        let mut observed = Vec::with_capacity(self.pieces.len());
        for (k, piece) in self.pieces.iter().enumerate() {
            let lo = if k == 0 { lip.lower } else { self.breakpoints[k - 1].max(lip.lower) };
            let hi = if k == self.breakpoints.len() {
                lip.upper
            } else {
                self.breakpoints[k].min(lip.upper)
            };
            let mut worst = 0.0_f64;
            if lo < hi {
                let h = (hi - lo) / samples.max(2) as f64;
                // open interval: stay off the endpoints
                let mut prev = piece.eval(lo + 0.5 * h);
                for i in 1..samples.max(2) {
                    let x = lo + (i as f64 + 0.5) * h;
                    let v = piece.eval(x);
                    worst = worst.max((v - prev).abs() / h);
                    prev = v;
                }
            }
            if worst > lip.bounds[k] * (1.0 + 1e-9) {
                return Err(invalid(format!(
                    "piece {k} has difference quotient {worst} above declared bound {}",
                    lip.bounds[k]
                )));
            }
            observed.push(worst);
        }
        Ok(observed)
    }
}

#[derive(Deserialize)]
struct SdeProblemRepr {
    drift: PiecewiseDrift,
    diffusion: SmoothCoefficient,
    #[serde(default)]
    jump: Option<SmoothCoefficient>,
    #[serde(default)]
    jump_rate: f64,
    initial: f64,
    horizon: f64,
}

/// `dX = μ(X)dt + σ(X)dW + ρ(X)dN`, `X_0 = ξ` on `[0, T]`, with `N` a Poisson
/// process of rate `λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SdeProblemRepr")]
pub struct SdeProblem {
    drift: PiecewiseDrift,
    diffusion: SmoothCoefficient,
    jump: Option<SmoothCoefficient>,
    jump_rate: f64,
    initial: f64,
    horizon: f64,
}

impl TryFrom<SdeProblemRepr> for SdeProblem {
    type Error = Error;

    fn try_from(r: SdeProblemRepr) -> Result<Self> {
        let p = SdeProblem::new(r.drift, r.diffusion, r.initial, r.horizon)?;
        match r.jump {
            Some(j) => p.with_jumps(j, r.jump_rate),
            None if r.jump_rate != 0.0 => Err(invalid("jump_rate must be 0 without a jump coefficient")),
            None => Ok(p),
        }
    }
}

impl SdeProblem {
    pub fn new(
        drift: PiecewiseDrift,
        diffusion: SmoothCoefficient,
        initial: f64,
        horizon: f64,
    ) -> Result<Self> {
        diffusion.validate()?;
        if !initial.is_finite() {
            return Err(invalid("initial value must be finite"));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid("horizon must be positive and finite"));
        }
        Ok(SdeProblem {
            drift,
            diffusion,
            jump: None,
            jump_rate: 0.0,
            initial,
            horizon,
        })
    }

    pub fn with_jumps(mut self, jump: SmoothCoefficient, rate: f64) -> Result<Self> {
        jump.validate()?;
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(invalid("a jump coefficient requires jump_rate > 0"));
        }
        self.jump = Some(jump);
        self.jump_rate = rate;
        Ok(self)
    }

    pub fn with_initial(mut self, initial: f64) -> Result<Self> {
        if !initial.is_finite() {
            return Err(invalid("initial value must be finite"));
        }
        self.initial = initial;
        Ok(self)
    }

    pub fn with_drift(mut self, drift: PiecewiseDrift) -> Self {
        self.drift = drift;
        self
    }

    pub fn drift(&self) -> &PiecewiseDrift {
        &self.drift
    }

    pub fn diffusion(&self) -> &SmoothCoefficient {
        &self.diffusion
    }

    pub fn jump(&self) -> Option<&SmoothCoefficient> {
        self.jump.as_ref()
    }

    pub fn jump_rate(&self) -> f64 {
        self.jump_rate
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn has_jumps(&self) -> bool {
        self.jump.is_some()
    }

    /// `min_k |σ(ζ_k)|`, or `+∞` without breakpoints.
    pub fn min_diffusion_at_breakpoints(&self) -> f64 {
        self.drift
            .breakpoints()
            .iter()
            .map(|z| self.diffusion.eval(*z).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.min_diffusion_at_breakpoints() > 0.0
    }

    /// Fails with the first breakpoint where the diffusion vanishes.
    pub fn require_nondegenerate(&self) -> Result<()> {
        match self
            .drift
            .breakpoints()
            .iter()
            .find(|z| self.diffusion.eval(**z) == 0.0)
        {
            Some(z) => Err(Error::DegenerateDiffusion { breakpoint: *z }),
            None => Ok(()),
        }
    }
}

/// Relative tolerance used to identify grid nodes across resolutions.
pub const NODE_TOLERANCE: f64 = 1e-12;

/// Strictly increasing time nodes `0 = t_0 < … < t_n = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
    delta: f64,
}

impl TimeGrid {
    /// Equidistant grid with `n` steps on `[0, horizon]`.
    pub fn uniform(horizon: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("a grid needs at least one step"));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid("grid horizon must be positive and finite"));
        }
        let mut nodes: Vec<f64> = (0..=n).map(|k| k as f64 * horizon / n as f64).collect();
        nodes[n] = horizon;
        Ok(TimeGrid {
            nodes,
            delta: horizon / n as f64,
        })
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(invalid("a grid needs at least two nodes"));
        }
        if nodes[0] != 0.0 {
            return Err(invalid("first grid node must be 0"));
        }
        if nodes.iter().any(|t| !t.is_finite()) || nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("grid nodes must be finite and strictly increasing"));
        }
        let delta = nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        Ok(TimeGrid { nodes, delta })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn horizon(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub(crate) fn tolerance(&self) -> f64 {
        NODE_TOLERANCE * self.horizon().max(1.0)
    }

    /// The grid with `extra` times in `(0, T]` merged in as nodes. Times that
    /// already coincide with a node are not duplicated.
    pub fn augmented(&self, extra: &[f64]) -> Result<Self> {
        let tol = self.tolerance();
        let mut nodes = Vec::with_capacity(self.nodes.len() + extra.len());
        let mut j = 0;
        for &t in &self.nodes {
            while j < extra.len() && extra[j] < t - tol {
                if nodes.last().is_some_and(|last: &f64| extra[j] <= *last + tol) {
                    j += 1;
                    continue;
                }
                nodes.push(extra[j]);
                j += 1;
            }
            while j < extra.len() && (extra[j] - t).abs() <= tol {
                j += 1;
            }
            nodes.push(t);
        }
        if j < extra.len() {
            return Err(invalid("augmenting times must lie in (0, T]"));
        }
        TimeGrid::from_nodes(nodes)
    }

    /// For each node of `coarse`, the index of the matching node in `self`.
    pub fn embedding_of(&self, coarse: &TimeGrid) -> Result<Vec<usize>> {
        let tol = self.tolerance().max(coarse.tolerance());
        let mut idx = Vec::with_capacity(coarse.nodes.len());
        let mut j = 0;
        for &t in &coarse.nodes {
            while j < self.nodes.len() && self.nodes[j] < t - tol {
                j += 1;
            }
            if j == self.nodes.len() || (self.nodes[j] - t).abs() > tol {
                return Err(Error::NotARefinement(format!("coarse node {t} missing from fine grid")));
            }
            idx.push(j);
        }
        if idx.last() != Some(&(self.nodes.len() - 1)) {
            return Err(Error::NotARefinement("grids end at different horizons".into()));
        }
        Ok(idx)
    }

    /// Whether every node of `coarse` is also a node of `self`.
    pub fn refines(&self, coarse: &TimeGrid) -> bool {
        self.embedding_of(coarse).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sign_drift() -> PiecewiseDrift {
        PiecewiseDrift::sign_type(0.0, 1.0, 0.0)
    }

    #[test]
    fn eval_sign_and_constant() {
        assert_eq!(sign_drift().eval(0.3), 1.0);
        assert_eq!(sign_drift().eval(0.0), 1.0);
        assert_eq!(sign_drift().eval(-0.3), -1.0);
        let c = PiecewiseDrift::smooth(SmoothCoefficient::constant(-1.5));
        for x in [-3.0, 0.0, 17.5] {
            assert_eq!(c.eval(x), -1.5);
        }
        let sq = PiecewiseDrift::smooth(SmoothCoefficient::polynomial(vec![0.0, 0.0, 1.0]));
        assert_eq!(sq.eval(2.0), 4.0);
    }

    #[test]
    fn scaling_is_pointwise() {
        let d = PiecewiseDrift::new(
            vec![-1.0, 0.5],
            vec![
                SmoothCoefficient::sin_plus_const(0.3, 2.0, 1.0),
                SmoothCoefficient::polynomial(vec![1.0, -2.0, 0.5]),
                SmoothCoefficient::tanh(2.0, 0.5, -1.0),
            ],
        )
        .unwrap();
        let s = d.scaled(-2.5);
        for x in [-3.0, -1.0, 0.0, 0.5, 0.7, 4.0] {
            assert!((s.eval(x) + 2.5 * d.eval(x)).abs() < 1e-12);
            assert!((s.derivative(x) + 2.5 * d.derivative(x)).abs() < 1e-12);
        }
        assert_eq!(SmoothCoefficient::affine(2.0, 1.0).scaled(3.0), SmoothCoefficient::affine(6.0, 3.0));
    }

    #[test]
    fn breakpoint_value_override() {
        let d = sign_drift().with_breakpoint_values(vec![0.0]).unwrap();
        assert_eq!(d.eval(0.0), 0.0);
        assert!(sign_drift().with_breakpoint_values(vec![]).is_err());
    }

    #[test]
    fn one_sided_limits_examples() {
        let d = PiecewiseDrift::sign_type(0.5, -2.0, 0.0);
        assert_eq!(d.one_sided_limits(0).unwrap(), (2.5, -1.5));
        assert_eq!(sign_drift().one_sided_limits(0).unwrap(), (-1.0, 1.0));
        let cont = PiecewiseDrift::new(
            vec![1.0],
            vec![SmoothCoefficient::affine(2.0, 1.0), SmoothCoefficient::affine(2.0, 1.0)],
        )
        .unwrap();
        let (l, r) = cont.one_sided_limits(0).unwrap();
        assert_eq!(l, r);
        assert_eq!(
            d.one_sided_limits(1),
            Err(Error::IndexOutOfRange { index: 1, count: 1 })
        );
    }

    #[test]
    fn drift_rejects_bad_layout() {
        assert!(PiecewiseDrift::new(vec![1.0, 0.0], vec![SmoothCoefficient::constant(0.0); 3]).is_err());
        assert!(PiecewiseDrift::new(vec![1.0], vec![SmoothCoefficient::constant(0.0)]).is_err());
        assert!(PiecewiseDrift::new(vec![f64::NAN], vec![SmoothCoefficient::constant(0.0); 2]).is_err());
    }

    #[test]
    fn limits_approached_at_lipschitz_rate() {
        let d = PiecewiseDrift::new(
            vec![-1.0, 2.0],
            vec![
                SmoothCoefficient::polynomial(vec![1.0, 0.5, -0.25]),
                SmoothCoefficient::sin_plus_const(0.7, 2.0, -1.0),
                SmoothCoefficient::tanh(3.0, 0.5, 0.2),
            ],
        )
        .unwrap()
        .with_lipschitz(LipschitzBounds {
            lower: -5.0,
            upper: 5.0,
            bounds: vec![3.0, 1.4, 0.75],
        })
        .unwrap();
        let observed = d.check_lipschitz(10_000).unwrap();
        let lip = observed.iter().cloned().fold(0.0, f64::max);
        for (k, z) in d.breakpoints().iter().enumerate() {
            let (l, r) = d.one_sided_limits(k).unwrap();
            for h in [1e-3, 1e-5, 1e-8] {
                assert!((d.eval(z - h) - l).abs() <= lip * h * 1.01);
                assert!((d.eval(z + h) - r).abs() <= lip * h * 1.01);
            }
        }
    }

    #[test]
    fn lipschitz_check_catches_understated_bound() {
        let d = PiecewiseDrift::smooth(SmoothCoefficient::affine(3.0, 0.0))
            .with_lipschitz(LipschitzBounds {
                lower: 0.0,
                upper: 1.0,
                bounds: vec![2.0],
            })
            .unwrap();
        assert!(d.check_lipschitz(100).is_err());
    }

    #[test]
    fn catalog_derivatives_match_finite_differences() {
        use rand::{Rng, SeedableRng};
        let catalog = [
            SmoothCoefficient::constant(2.0),
            SmoothCoefficient::affine(-0.3, 1.0),
            SmoothCoefficient::polynomial(vec![0.5, -1.0, 0.25, 0.1]),
            SmoothCoefficient::sin_plus_const(0.2, 1.0, 1.0),
            SmoothCoefficient::tanh(-1.0, 1.5, -1.0),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let h = 1e-5;
        for c in &catalog {
            for _ in 0..200 {
                let x: f64 = rng.random_range(-3.0..3.0);
                let fd1 = (c.eval(x + h) - c.eval(x - h)) / (2.0 * h);
                let fd2 = (c.derivative(x + h) - c.derivative(x - h)) / (2.0 * h);
                let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
                assert!(rel(fd1, c.derivative(x)) <= 1e-6, "{c:?} at {x}");
                assert!(rel(fd2, c.second_derivative(x)) <= 1e-6, "{c:?} at {x}");
            }
        }
    }

    #[test]
    fn problem_invariants() {
        let d = PiecewiseDrift::sign_type(0.5, -2.0, 0.0);
        let p = SdeProblem::new(d.clone(), SmoothCoefficient::constant(1.0), 1.0, 1.0).unwrap();
        assert!(p.is_nondegenerate());
        assert_eq!(p.jump_rate(), 0.0);
        let deg = SdeProblem::new(d, SmoothCoefficient::affine(1.0, 0.0), 1.0, 1.0).unwrap();
        assert_eq!(deg.require_nondegenerate(), Err(Error::DegenerateDiffusion { breakpoint: 0.0 }));
        assert!(p.clone().with_jumps(SmoothCoefficient::constant(0.5), 0.0).is_err());
        assert!(SdeProblem::new(
            PiecewiseDrift::smooth(SmoothCoefficient::constant(0.0)),
            SmoothCoefficient::constant(1.0),
            0.0,
            0.0
        )
        .is_err());
    }

    #[test]
    fn problem_json_round_trip_and_validation() {
        let json = r#"{
            "drift": {"breakpoints": [0.0], "pieces": [
                {"kind": "constant", "value": 2.5}, {"kind": "constant", "value": -1.5}]},
            "diffusion": {"kind": "sin_plus_const", "amplitude": 0.2, "frequency": 1.0, "offset": 1.0},
            "jump": {"kind": "constant", "value": 0.5},
            "jump_rate": 1.0,
            "initial": 1.0,
            "horizon": 1.0
        }"#;
        let p: SdeProblem = serde_json::from_str(json).unwrap();
        assert_eq!(p.drift().eval(-1.0), 2.5);
        assert_eq!(p.jump_rate(), 1.0);
        let back: SdeProblem = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);

        let bad = json.replace("\"jump_rate\": 1.0", "\"jump_rate\": 0.0");
        assert!(serde_json::from_str::<SdeProblem>(&bad).is_err());
        let unsorted = json.replace("[0.0]", "[0.0, -1.0]");
        assert!(serde_json::from_str::<SdeProblem>(&unsorted).is_err());
    }

    #[test]
    fn uniform_grid_examples() {
        let g = TimeGrid::uniform(1.0, 4).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.delta(), 0.25);
        assert_eq!(TimeGrid::uniform(1.0, 1).unwrap().nodes(), &[0.0, 1.0]);
        assert_eq!(TimeGrid::uniform(2.0, 8).unwrap().delta(), 0.25);
        assert!(TimeGrid::uniform(1.0, 0).is_err());
        assert!(TimeGrid::uniform(-1.0, 3).is_err());
        assert!(TimeGrid::uniform(0.0, 3).is_err());
    }

    #[test]
    fn grid_from_nodes_recomputes_delta() {
        let g = TimeGrid::from_nodes(vec![0.0, 0.1, 0.5, 0.6]).unwrap();
        assert!((g.delta() - 0.4).abs() < 1e-15);
        assert!(TimeGrid::from_nodes(vec![0.1, 0.5]).is_err());
        assert!(TimeGrid::from_nodes(vec![0.0, 0.5, 0.5]).is_err());
    }

    #[test]
    fn augment_and_embed() {
        let g = TimeGrid::uniform(1.0, 4).unwrap();
        let a = g.augmented(&[0.1, 0.5, 0.9, 1.0]).unwrap();
        assert_eq!(a.nodes(), &[0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0]);
        assert_eq!(a.embedding_of(&g).unwrap(), vec![0, 2, 3, 4, 6]);
        assert!(g.augmented(&[1.5]).is_err());
        assert!(!g.refines(&a));
        let fine = TimeGrid::uniform(1.0, 12).unwrap();
        assert!(fine.refines(&TimeGrid::uniform(1.0, 3).unwrap()));
        assert!(!fine.refines(&TimeGrid::uniform(1.0, 8).unwrap()));
    }
}
