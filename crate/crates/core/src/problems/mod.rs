//! The bilinear sign problem, its exact solver and its vector relaxation.

mod brute;
mod instance;
mod relax;

pub use brute::{brute_force_naive, brute_force_opt, MAX_ENUMERATED_SIDE};
pub use instance::{ProblemInstance, SignAssignment};
pub use relax::{sdp_relax, RelaxConfig, RelaxOutcome};
