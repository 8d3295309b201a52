//! Simulation and convergence analysis for scalar SDEs
//! `dX = μ(X)dt + σ(X)dW (+ ρ(X)dN)` whose drift `μ` jumps at finitely many
//! breakpoints.
//!
//! * [`sde`]: coefficients, problems and time grids.
//! * [`noise`]: seeded Brownian and Poisson noise with bridge coupling.
//! * [`transform`]: the monotone transform that removes drift jumps.
//! * [`schemes`]: Euler–Maruyama, Milstein, adaptive, jump and transformed schemes.
//! * [`analysis`]: Monte Carlo error ladders, order fits and diagnostics.

pub mod analysis;
pub mod error;
pub mod noise;
pub mod schemes;
pub mod sde;
pub mod transform;

pub use error::{Error, Result};
pub use noise::{JumpTrain, NoisePath, SeedSpec};
pub use schemes::{StepPolicy, Trajectory};
pub use sde::{LipschitzBounds, PiecewiseDrift, SdeProblem, SmoothCoefficient, TimeGrid};
pub use transform::{TransformG, TransformedProblem};
