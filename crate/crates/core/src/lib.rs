//! Asynchronous accelerated block coordinate descent.
//!
//! Dense reference solvers, a deterministic delay simulator, a lock-light
//! shared-memory runtime built on the sparsified three-sequence iteration,
//! Lyapunov diagnostics and the delayed-ODE view of the method.

pub mod diagnostics;
pub mod error;
mod linalg;
pub mod problem;
pub mod ode;
pub mod problems;
pub mod runtime;
pub mod sampler;
pub mod schedule;
pub mod solvers;

pub use error::{Error, Result};
pub use problem::{AffineGradient, BlockPartition, Objective, ProblemParams};
pub use sampler::BlockSampler;
pub use schedule::{Schedule, Variant, WindowPolicy};
