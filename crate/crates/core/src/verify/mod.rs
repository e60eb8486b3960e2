//! Pass/fail reports for the inequalities of the theory.

mod brunn;
mod checks;
mod report;

pub use brunn::check_brunn_minkowski;
pub use checks::{
    check_claim_sharp_identity, check_isoperimetric, check_monotonicity, check_schwarzschild_bound, MonteCarlo,
    SCHWARZSCHILD_TOL, SHARP_IDENTITY_TOL, SIGMAS,
};
pub use report::{to_csv, Relation, VerificationReport};
