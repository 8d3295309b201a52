//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use disdrift_core::analysis::{ReferencePolicy, SchemeId};
use disdrift_core::{PiecewiseDrift, SdeProblem};
use serde::Deserialize;
use serde_json::Value;

use crate::presets::{self, PresetValue};
use crate::CliError;

fn default_reference() -> ReferencePolicy {
    ReferencePolicy::FineGrid
}

fn default_eps0() -> f64 {
    1.0
}

fn default_truncation() -> f64 {
    10.0
}

fn default_resolution() -> usize {
    2000
}

fn default_refinement() -> usize {
    disdrift_core::analysis::strong::DEFAULT_REFINEMENT
}

/// One experiment. `problem` is a preset name, an inline problem object, or
/// `{"function": <drift>}` for the seminorm.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: Value,
    #[serde(default)]
    pub scheme: Option<SchemeId>,
    #[serde(default)]
    pub delta_ladder: Vec<f64>,
    #[serde(default)]
    pub paths: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_reference")]
    pub reference: ReferencePolicy,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_refinement")]
    pub refinement: usize,
    #[serde(default = "default_eps0")]
    pub eps0: f64,
    #[serde(default)]
    pub kappas: Vec<f64>,
    #[serde(default)]
    pub band: Option<f64>,
    #[serde(default = "default_truncation")]
    pub truncation: f64,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

/// A resolved `problem` field.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Problem(SdeProblem),
    Function(PiecewiseDrift),
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Field-level checks that do not depend on the subcommand.
    pub fn validate(&self) -> Result<(), CliError> {
        let target = self.target()?;
        if self.delta_ladder.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(field("delta_ladder", "every step size must be positive and finite"));
        }
        if self.delta_ladder.windows(2).any(|w| w[1] >= w[0]) {
            return Err(field("delta_ladder", "step sizes must be strictly decreasing"));
        }
        if let Some(0) = self.paths {
            return Err(field("paths", "must be positive"));
        }
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            return Err(field("eps0", "must be positive"));
        }
        if let Some(b) = self.band {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(field("band", "must be nonnegative"));
            }
        }
        if let Some(k) = self.kappas.iter().find(|k| !(**k > 0.0 && **k < 1.0)) {
            return Err(field("kappas", &format!("κ = {k} lies outside (0, 1)")));
        }
        if let (Some(scheme), Target::Problem(p)) = (self.scheme, &target) {
            check_scheme(scheme, p)?;
        }
        Ok(())
    }

    pub fn target(&self) -> Result<Target, CliError> {
        match &self.problem {
            Value::String(name) => match presets::find(name) {
                Some(p) => Ok(match p.value() {
                    PresetValue::Problem(q) => Target::Problem(q),
                    PresetValue::Function(f) => Target::Function(f),
                }),
                None => Err(field("problem", &format!("unknown preset '{name}' (see `disdrift presets`)"))),
            },
            Value::Object(map) if map.contains_key("function") => {
                serde_json::from_value(map["function"].clone())
                    .map(Target::Function)
                    .map_err(|e| field("problem.function", &e.to_string()))
            }
            v @ Value::Object(_) => serde_json::from_value(v.clone())
                .map(Target::Problem)
                .map_err(|e| field("problem", &e.to_string())),
            _ => Err(field("problem", "expected a preset name or an object")),
        }
    }

    pub fn sde(&self) -> Result<SdeProblem, CliError> {
        match self.target()? {
            Target::Problem(p) => Ok(p),
            Target::Function(_) => Err(field("problem", "this command needs an SDE, not a bare function")),
        }
    }
}

pub(crate) fn field(name: &str, msg: &str) -> CliError {
    CliError::Config(format!("{name}: {msg}"))
}

/// Rejects scheme/problem pairs that violate a scheme's hypotheses.
pub fn check_scheme(scheme: SchemeId, problem: &SdeProblem) -> Result<(), CliError> {
    match scheme {
        SchemeId::JumpEm if !problem.has_jumps() => {
            Err(field("scheme", "jump-em requires a jump coefficient ρ and a positive jump_rate"))
        }
        SchemeId::JumpEm => Ok(()),
        s if problem.has_jumps() => Err(field(
            "scheme",
            &format!("{s} cannot simulate the jump component; use jump-em"),
        )),
        SchemeId::TransformEm | SchemeId::TransformMilstein if !problem.is_nondegenerate() => Err(field(
            "scheme",
            &format!(
                "transform scheme requires σ(ζ) ≠ 0 at every breakpoint ζ (non-degeneracy hypothesis of the transformation method; min |σ(ζ)| = {})",
                problem.min_diffusion_at_breakpoints()
            ),
        )),
        _ => Ok(()),
    }
}
