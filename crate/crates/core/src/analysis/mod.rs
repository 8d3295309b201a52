//! Strong-error measurement, order regression, cost curves, closed-form
//! oracles and the fractional seminorm.

pub mod cost;
pub mod exact;
pub mod hitting;
pub mod order;
pub mod seminorm;
pub mod strong;

pub use cost::{cost_curve, CostPoint, CostReport};
pub use exact::{exact_solution, geometric_problem, ornstein_uhlenbeck_problem, ExactSolution};
pub use hitting::{hitting_fraction, MIN_HITTING_PATHS};
pub use order::{estimate_order, loglog_fit, ErrorPoint, LogLogFit, RateReport};
pub use seminorm::{predicted_order, sobolev_seminorm, PiecewiseSmooth, SeminormResult};
pub use strong::{run_error_study, sample_trajectory, strong_error, ErrorStudy, ReferencePolicy, SchemeErrors, SchemeId};
