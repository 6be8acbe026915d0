//! Test and benchmark objectives.

pub mod libsvm;
pub mod lower_bound;
pub mod quadratic;
pub mod ridge;
pub mod sparse;
pub mod worst_case;

pub use libsvm::{parse_libsvm, write_libsvm, LabeledDataset};
pub use lower_bound::{expected_q_power, lower_bound_ratio, optimal_probabilities, LowerBound};
pub use quadratic::{synth_quadratic, SyntheticQuadratic};
pub use ridge::{synthetic_dataset, RidgeDual};
pub use sparse::SparseColumnMatrix;
pub use worst_case::WorstCase;
