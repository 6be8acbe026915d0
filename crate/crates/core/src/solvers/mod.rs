//! Single-threaded reference solvers and the deterministic delay simulator.

pub mod delay;
pub mod dense;
pub mod simulate;
pub mod trace;

pub use delay::{DelaySchedule, IterateHistory};
pub use dense::{a2bcd_step, nu_acdm_step, rbcd_step, DenseState, NuAcdmCoefficients};
pub use simulate::{
    nu_acdm_run, presolve_optimum, rbcd_run, resolve_optimum, run_simulated, Optimum, OptimumSource,
    RunOptions,
};
pub use trace::{Checkpoint, Trace};
