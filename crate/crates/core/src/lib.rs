//! Accelerated proximal gradient methods with adaptive regularization
//! (AdaAPG) and gradient-mapping-driven restarts (rAdaAPG) for composite
//! problems min f(x) + Ψ(x) with f smooth convex and Ψ proximable convex.

pub mod adaptive;
pub mod bounds;
pub mod engine;
pub mod error;
pub mod gradient_map;
pub mod problem;
pub mod prox;
pub mod rate;
pub mod smooth;
pub mod testbed;
pub mod trace;
pub mod vector;

pub use adaptive::{
    ada_apg, ada_apg_auto, ada_apg_traced, apg_fixed_sigma, choose_sigma0, choose_sigma0_heb, pg_solve, r_ada_apg,
    r_ada_apg_traced, AdaApgResult, AdaApgRun, HebParams, RAdaApgRun, RestartRecord, Status,
};
pub use engine::{apg_step, estimate_min, pg_step, solve_a, ApgStepOutput, EstimateState, PgStepOutput};
pub use error::{Error, Result};
pub use gradient_map::{apg_conditions, descent_condition, model_value, prox_grad_point, reg_prox_grad_point, MapResult};
pub use problem::{
    phi, CompositeProblem, OracleCounters, PhiParts, Regularizer, Sigma0Endpoint, SmoothOracle, SolverParams,
};
pub use rate::{fit_rate, RateClass, RateFit};
pub use testbed::{dist_to_opt, HebProblem, OptSet};
pub use trace::{Trace, TraceFormat, TraceRecord};
pub use vector::Vector;
