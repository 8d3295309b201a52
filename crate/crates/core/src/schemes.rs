//! One-step approximation schemes.
//!
//! Every scheme is a pure function of the problem, the grid (or step policy)
//! and the driving noise. The `*_into` variants stream states into a
//! [`Recorder`] so Monte Carlo loops can keep only the terminal value.

use crate::error::{invalid, Error, Result};
use crate::noise::{JumpTrain, NoisePath, OnDemandBrownian};
use crate::sde::{SdeProblem, TimeGrid};
use crate::transform::{TransformG, TransformedProblem};

/// Smallest admissible adaptive step.
pub const MIN_STEP: f64 = 1e-14;

/// Receives `(t_k, X̂_{t_k})` in increasing time order.
pub trait Recorder {
    fn record(&mut self, t: f64, x: f64);
}

/// Keeps only the most recent state.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Terminal {
    pub time: f64,
    pub value: f64,
    pub steps: usize,
}

impl Recorder for Terminal {
    #[inline]
    fn record(&mut self, t: f64, x: f64) {
        if t > 0.0 {
            self.steps += 1;
        }
        self.time = t;
        self.value = x;
    }
}

/// A discrete approximation `(t_k, X̂_{t_k})`, `k = 0..=N`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl Recorder for Trajectory {
    #[inline]
    fn record(&mut self, t: f64, x: f64) {
        self.times.push(t);
        self.values.push(x);
    }
}

impl Trajectory {
    fn with_capacity(n: usize) -> Self {
        Trajectory {
            times: Vec::with_capacity(n),
            values: Vec::with_capacity(n),
        }
    }

    /// Number of steps actually taken.
    pub fn step_count(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("trajectory holds at least the initial state")
    }
}

/// Fixed grid or state-dependent step sizes bounded by `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    pub delta: f64,
    pub mode: StepMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode {
    Fixed,
    /// `h(x) = max(δ², min(δ, (dist(x, ζ)/ε₀)²))`
    Adaptive { eps0: f64 },
}

impl StepPolicy {
    pub fn fixed(delta: f64) -> Self {
        StepPolicy {
            delta,
            mode: StepMode::Fixed,
        }
    }

    pub fn adaptive(delta: f64, eps0: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid(format!("adaptive δ must lie in (0, 1), got {delta}")));
        }
        if !(eps0 > 0.0 && eps0.is_finite()) {
            return Err(invalid(format!("ε₀ must be positive, got {eps0}")));
        }
        Ok(StepPolicy {
            delta,
            mode: StepMode::Adaptive { eps0 },
        })
    }
}

fn check_noise(grid: &TimeGrid, noise: &NoisePath) -> Result<()> {
    if noise.grid().nodes() != grid.nodes() {
        return Err(Error::GridMismatch("noise path is not sampled on the scheme grid".into()));
    }
    Ok(())
}

fn no_jumps(problem: &SdeProblem, scheme: &str) -> Result<()> {
    if problem.has_jumps() {
        return Err(invalid(format!("{scheme} does not handle a jump component")));
    }
    Ok(())
}

pub fn euler_maruyama_into<R: Recorder>(
    problem: &SdeProblem,
    grid: &TimeGrid,
    noise: &NoisePath,
    rec: &mut R,
) -> Result<()> {
    no_jumps(problem, "euler_maruyama")?;
    check_noise(grid, noise)?;
    let (mu, sigma) = (problem.drift(), problem.diffusion());
    let t = grid.nodes();
    let mut x = problem.initial();
    rec.record(t[0], x);
    for k in 0..grid.steps() {
        x = x + mu.eval(x) * (t[k + 1] - t[k]) + sigma.eval(x) * noise.increment(k);
        rec.record(t[k + 1], x);
    }
    Ok(())
}

/// `X̂_{k+1} = X̂_k + μ(X̂_k)Δt + σ(X̂_k)ΔW`.
pub fn euler_maruyama(problem: &SdeProblem, grid: &TimeGrid, noise: &NoisePath) -> Result<Trajectory> {
    let mut tr = Trajectory::with_capacity(grid.nodes().len());
    euler_maruyama_into(problem, grid, noise, &mut tr)?;
    Ok(tr)
}

pub fn milstein_into<R: Recorder>(
    problem: &SdeProblem,
    grid: &TimeGrid,
    noise: &NoisePath,
    rec: &mut R,
) -> Result<()> {
    no_jumps(problem, "milstein")?;
    check_noise(grid, noise)?;
    let (mu, sigma) = (problem.drift(), problem.diffusion());
    let t = grid.nodes();
    let mut x = problem.initial();
    rec.record(t[0], x);
    for k in 0..grid.steps() {
        let dt = t[k + 1] - t[k];
        let dw = noise.increment(k);
        let s = sigma.eval(x);
        x = x + mu.eval(x) * dt + s * dw + 0.5 * s * sigma.derivative(x) * (dw * dw - dt);
        rec.record(t[k + 1], x);
    }
    Ok(())
}

/// Scalar Milstein: the Euler–Maruyama update plus `½σσ′((ΔW)² − Δt)`.
pub fn milstein(problem: &SdeProblem, grid: &TimeGrid, noise: &NoisePath) -> Result<Trajectory> {
    let mut tr = Trajectory::with_capacity(grid.nodes().len());
    milstein_into(problem, grid, noise, &mut tr)?;
    Ok(tr)
}

/// The adaptive step-size function: `δ` away from breakpoints, shrinking
/// quadratically with the distance to the nearest one, never below `δ²`.
#[inline]
pub fn step_size_h(x: f64, delta: f64, breakpoints: &[f64], eps0: f64) -> f64 {
    debug_assert!(delta > 0.0 && eps0 > 0.0);
    let dist = match breakpoints.len() {
        0 => f64::INFINITY,
        1 => (x - breakpoints[0]).abs(),
        _ => {
            let k = breakpoints.partition_point(|z| *z < x);
            let right = breakpoints.get(k).map_or(f64::INFINITY, |z| z - x);
            let left = k.checked_sub(1).map_or(f64::INFINITY, |j| x - breakpoints[j]);
            left.min(right)
        }
    };
    let scaled = dist / eps0;
    (delta * delta).max(delta.min(scaled * scaled))
}

pub fn adaptive_euler_maruyama_into<R: Recorder>(
    problem: &SdeProblem,
    policy: &StepPolicy,
    source: &mut OnDemandBrownian<'_>,
    rec: &mut R,
) -> Result<()> {
    no_jumps(problem, "adaptive_euler_maruyama")?;
    let StepMode::Adaptive { eps0 } = policy.mode else {
        return Err(invalid("adaptive_euler_maruyama needs an adaptive step policy"));
    };
    if source.time() != 0.0 {
        return Err(invalid("noise source must start at t = 0"));
    }
    if (source.horizon() - problem.horizon()).abs() > 1e-12 * problem.horizon().max(1.0) {
        return Err(Error::GridMismatch("noise source horizon differs from the problem horizon".into()));
    }
    let (mu, sigma) = (problem.drift(), problem.diffusion());
    let zetas = problem.drift().breakpoints();
    let horizon = source.horizon();
    let (mut t, mut w, mut x) = (0.0, 0.0, problem.initial());
    rec.record(t, x);
    while t < horizon {
        let h = step_size_h(x, policy.delta, zetas, eps0);
        if !(h >= MIN_STEP) {
            return Err(Error::StepUnderflow { time: t, step: h });
        }
        let (t_new, w_new) = source.advance_to(t + h);
        x = x + mu.eval(x) * (t_new - t) + sigma.eval(x) * (w_new - w);
        t = t_new;
        w = w_new;
        rec.record(t, x);
    }
    Ok(())
}

/// Euler–Maruyama with `τ_{k+1} = τ_k + h(X̂_{τ_k}, δ)`, the last step cut to
/// land on `T`. Brownian values at the random times come from `source`.
pub fn adaptive_euler_maruyama(
    problem: &SdeProblem,
    policy: &StepPolicy,
    source: &mut OnDemandBrownian<'_>,
) -> Result<Trajectory> {
    let mut tr = Trajectory::default();
    adaptive_euler_maruyama_into(problem, policy, source, &mut tr)?;
    Ok(tr)
}

/// Walks the event times alongside the grid; each event must be a node.
struct EventCursor<'a> {
    events: &'a [f64],
    next: usize,
    tol: f64,
}

impl<'a> EventCursor<'a> {
    fn new(jumps: Option<&'a JumpTrain>, grid: &TimeGrid) -> Self {
        EventCursor {
            events: jumps.map_or(&[], |j| j.event_times()),
            next: 0,
            tol: grid.tolerance(),
        }
    }

    /// Number of events at node time `t`; fails if one was skipped.
    #[inline]
    fn fires_at(&mut self, t: f64) -> Result<usize> {
        let start = self.next;
        while let Some(&e) = self.events.get(self.next) {
            if (e - t).abs() <= self.tol {
                self.next += 1;
            } else if e < t {
                return Err(Error::GridMismatch(format!("event time {e} missing from grid")));
            } else {
                break;
            }
        }
        Ok(self.next - start)
    }

    fn finish(&self) -> Result<()> {
        match self.events.get(self.next) {
            Some(e) => Err(Error::GridMismatch(format!("event time {e} missing from grid"))),
            None => Ok(()),
        }
    }
}

pub fn jump_euler_maruyama_into<R: Recorder>(
    problem: &SdeProblem,
    grid: &TimeGrid,
    noise: &NoisePath,
    jumps: &JumpTrain,
    rec: &mut R,
) -> Result<()> {
    let rho = problem
        .jump()
        .ok_or_else(|| invalid("jump_euler_maruyama needs a jump coefficient"))?;
    check_noise(grid, noise)?;
    let (mu, sigma) = (problem.drift(), problem.diffusion());
    let t = grid.nodes();
    let mut events = EventCursor::new(Some(jumps), grid);
    let mut x = problem.initial();
    rec.record(t[0], x);
    for k in 0..grid.steps() {
        x = x + mu.eval(x) * (t[k + 1] - t[k]) + sigma.eval(x) * noise.increment(k);
        for _ in 0..events.fires_at(t[k + 1])? {
            x += rho.eval(x);
        }
        rec.record(t[k + 1], x);
    }
    events.finish()
}

/// Euler–Maruyama with Poisson jumps. The grid must contain every event
/// time; at an event `t` the state `X̂_{t−}` receives `ρ(X̂_{t−})` once.
pub fn jump_euler_maruyama(
    problem: &SdeProblem,
    grid: &TimeGrid,
    noise: &NoisePath,
    jumps: &JumpTrain,
) -> Result<Trajectory> {
    let mut tr = Trajectory::with_capacity(grid.nodes().len());
    jump_euler_maruyama_into(problem, grid, noise, jumps, &mut tr)?;
    Ok(tr)
}

/// Euler–Maruyama or Milstein on the `Z = G(X)` equation, recording
/// `X̄ = G⁻¹(Ẑ)`. With `jumps`, an event at `t` maps `Z_{t−}` to
/// `G(X_{t−} + ρ(X_{t−}))`.
pub fn transformed_into<R: Recorder>(
    tp: &TransformedProblem,
    grid: &TimeGrid,
    noise: &NoisePath,
    jumps: Option<&JumpTrain>,
    milstein: bool,
    rec: &mut R,
) -> Result<()> {
    check_noise(grid, noise)?;
    let rho = match (tp.problem().jump(), jumps) {
        (Some(rho), _) => Some(rho),
        (None, Some(j)) if !j.is_empty() => {
            return Err(invalid("event times given for a problem without jump coefficient"));
        }
        (None, _) => None,
    };
    if rho.is_some() && jumps.is_none() {
        return Err(invalid("problem has a jump component but no event times were given"));
    }
    let g = tp.transform();
    let t = grid.nodes();
    let mut events = EventCursor::new(jumps, grid);
    let mut z = tp.initial();
    let mut c = tp.coefficients(z)?;
    rec.record(t[0], c.x);
    for k in 0..grid.steps() {
        let dt = t[k + 1] - t[k];
        let dw = noise.increment(k);
        z = z + c.drift * dt + c.diffusion * dw;
        if milstein {
            z += 0.5 * c.diffusion_product * (dw * dw - dt);
        }
        if let Some(rho) = rho {
            for _ in 0..events.fires_at(t[k + 1])? {
                let x = g.invert(z)?;
                z = g.apply(x + rho.eval(x));
            }
        }
        c = tp.coefficients(z)?;
        rec.record(t[k + 1], c.x);
    }
    events.finish()
}

fn transform_for(problem: &SdeProblem, g: &TransformG) -> Result<TransformedProblem> {
    no_jumps(problem, "transformation scheme")?;
    TransformedProblem::new(g.clone(), problem)
}

/// Euler–Maruyama on `Z = G(X)` mapped back through `G⁻¹`.
pub fn transform_method(
    problem: &SdeProblem,
    grid: &TimeGrid,
    noise: &NoisePath,
    g: &TransformG,
) -> Result<Trajectory> {
    let tp = transform_for(problem, g)?;
    let mut tr = Trajectory::with_capacity(grid.nodes().len());
    transformed_into(&tp, grid, noise, None, false, &mut tr)?;
    Ok(tr)
}

/// Milstein on `Z = G(X)` mapped back through `G⁻¹`.
pub fn transformed_milstein(
    problem: &SdeProblem,
    grid: &TimeGrid,
    noise: &NoisePath,
    g: &TransformG,
) -> Result<Trajectory> {
    let tp = transform_for(problem, g)?;
    let mut tr = Trajectory::with_capacity(grid.nodes().len());
    transformed_into(&tp, grid, noise, None, true, &mut tr)?;
    Ok(tr)
}
