//! Compiled-in problems for the experiments.

use disdrift_core::analysis::{geometric_problem, ornstein_uhlenbeck_problem};
use disdrift_core::{PiecewiseDrift, SdeProblem, SmoothCoefficient};

/// What a preset provides: an SDE, or a bare function for the seminorm.
#[derive(Debug, Clone, PartialEq)]
pub enum PresetValue {
    Problem(SdeProblem),
    Function(PiecewiseDrift),
}

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub note: &'static str,
    build: fn() -> PresetValue,
}

impl Preset {
    pub fn value(&self) -> PresetValue {
        (self.build)()
    }
}

fn problem(drift: PiecewiseDrift, sigma: SmoothCoefficient, xi: f64) -> PresetValue {
    PresetValue::Problem(SdeProblem::new(drift, sigma, xi, 1.0).expect("preset parameters are valid"))
}

/// `0.5 − 2·sign(x)`, pointing towards 0 from both sides.
fn inward() -> PiecewiseDrift {
    PiecewiseDrift::sign_type(0.5, -2.0, 0.0)
}

fn sign_mult() -> SdeProblem {
    SdeProblem::new(inward(), SmoothCoefficient::sin_plus_const(0.2, 1.0, 1.0), 1.0, 1.0).expect("valid")
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "ode-only",
        note: "μ ≡ −1.5, σ ≡ 0, ξ = 1: Euler reproduces x = 1 − 1.5t exactly",
        build: || problem(PiecewiseDrift::smooth(SmoothCoefficient::constant(-1.5)), SmoothCoefficient::constant(0.0), 1.0),
    },
    Preset {
        name: "chattering-ode",
        note: "μ = 0.5 − 2sign(x), σ ≡ 0, ξ = 1: the ODE has no solution and Euler iterates chatter around 0",
        build: || problem(inward(), SmoothCoefficient::constant(0.0), 1.0),
    },
    Preset {
        name: "sign-inward",
        note: "μ = 0.5 − 2sign(x), σ ≡ 1, ξ = 1: drift pushes paths onto the discontinuity",
        build: || problem(inward(), SmoothCoefficient::constant(1.0), 1.0),
    },
    Preset {
        name: "sign-outward",
        note: "μ = −(0.5 − 2sign(x)), σ ≡ 1, ξ = 0.1: drift pushes paths away, few visit the discontinuity",
        build: || problem(inward().scaled(-1.0), SmoothCoefficient::constant(1.0), 0.1),
    },
    Preset {
        name: "sign-mult",
        note: "μ = 0.5 − 2sign(x), σ = 1 + 0.2sin(x), ξ = 1: multiplicative noise, Euler order 1/2",
        build: || PresetValue::Problem(sign_mult()),
    },
    Preset {
        name: "sign-additive",
        note: "μ = sign(x), σ ≡ 1, ξ = 0.1: additive noise, Euler order 3/4",
        build: || problem(PiecewiseDrift::sign_type(0.0, 1.0, 0.0), SmoothCoefficient::constant(1.0), 0.1),
    },
    Preset {
        name: "jump-sign",
        note: "sign-mult plus jumps ρ ≡ 0.5 at rate λ = 1",
        build: || {
            PresetValue::Problem(
                sign_mult()
                    .with_jumps(SmoothCoefficient::constant(0.5), 1.0)
                    .expect("valid"),
            )
        },
    },
    Preset {
        name: "gbm",
        note: "μ(x) = 0.5x, σ(x) = 0.3x, ξ = 1: geometric Brownian motion with closed form",
        build: || PresetValue::Problem(geometric_problem(0.5, 0.3, 1.0, 1.0).expect("valid")),
    },
    Preset {
        name: "ou",
        note: "μ(x) = −x, σ ≡ 1, ξ = 1: Ornstein–Uhlenbeck with closed form",
        build: || PresetValue::Problem(ornstein_uhlenbeck_problem(1.0, 1.0, 1.0, 1.0).expect("valid")),
    },
    Preset {
        name: "constant",
        note: "μ ≡ −1.5, σ ≡ 0.5, ξ = 1: Euler is exact",
        build: || problem(PiecewiseDrift::smooth(SmoothCoefficient::constant(-1.5)), SmoothCoefficient::constant(0.5), 1.0),
    },
    Preset {
        name: "sign-decomposition",
        note: "b = sign − tanh, the irregular part of sign = tanh + b",
        build: || {
            PresetValue::Function(
                PiecewiseDrift::new(
                    vec![0.0],
                    vec![
                        SmoothCoefficient::tanh(-1.0, 1.0, -1.0),
                        SmoothCoefficient::tanh(-1.0, 1.0, 1.0),
                    ],
                )
                .expect("valid"),
            )
        },
    },
    Preset {
        name: "constant-b",
        note: "b ≡ 2: every seminorm vanishes",
        build: || PresetValue::Function(PiecewiseDrift::smooth(SmoothCoefficient::constant(2.0))),
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
