pub mod compare;
pub mod dryrun;
pub mod lowerbound;
pub mod ode;
pub mod solve;
