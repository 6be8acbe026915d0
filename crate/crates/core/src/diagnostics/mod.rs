//! Lyapunov bookkeeping, rate fitting and trace comparison.

mod compare;
mod lyapunov;
mod rate;

pub use compare::{compare_traces, Axis, ComparisonReport, ComparisonRow, CompareOptions};
pub use lyapunov::{asynchronicity_error, lyapunov, LyapunovMeter};
pub use rate::{fit_rate, fit_series, Metric, RateFit, MIN_FIT_POINTS};
