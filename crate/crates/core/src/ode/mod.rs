//! Continuous-time limit of the method: the accelerated ODE, its delayed
//! version, and their energies.

mod consistency;
mod energy;
mod integrate;
mod potential;

pub use consistency::{discrete_scheme, limit_velocity, richardson_check, scheme_limit, RichardsonReport};
pub use energy::{
    async_error_terms, composite_energy, delay_threshold, delay_weight, delayed_constants, energy,
    max_relative_increase, undiscounted_energy, verdicts, write_trajectory_csv, OdeVerdicts,
};
pub use integrate::{integrate_delayed, integrate_sync, DelayMode, OdeConfig, OdeTrajectory};
pub use potential::{DiagonalQuadratic, LogCoshToy, Potential, Rescaled};
