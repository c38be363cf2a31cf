//! Truncated instanton traces, their L^p scaling, and fibering maps along them.

mod fiber;
mod rates;
mod trace;

pub use fiber::{
    beta_eps, fiber_report, fibering_g, half_space_threshold, lambda_crossover, lambda_sweep, maximize_fiber,
    sup_vs_threshold, Crossover, FiberBracket, FiberingReport, TraceQuantities, ROOT_TOL,
};
pub use rates::{
    linear_fit, lp_rate_experiment, rate_regime, weighted_critical_integral, RateRegime, RateReport, RateRow,
    WeightedIntegral, MIN_SAMPLES,
};
pub use trace::{instanton_trace, TruncatedInstanton};
