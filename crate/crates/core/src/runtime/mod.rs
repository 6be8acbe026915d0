//! Shared-memory parallel runtime over the sparsified iteration.

mod atomic;
mod parallel;
mod staleness;
mod state;
mod transform;
mod worker;

pub use atomic::AtomicVec;
pub use parallel::{
    dry_run_tau, run_parallel, Budget, DryRun, ParallelOptions, ParallelRun, TransformAudit, AUDIT_TOLERANCE,
};
pub use staleness::StalenessRecord;
pub use state::{recover_yv, restart_period, SparseState, MIN_DET};
pub use transform::{averaging_power, det, inverse, mat_mul, Mat2, TransformSnapshot, IDENTITY};
pub use worker::{StepOutcome, UpdatePlan, Worker};
