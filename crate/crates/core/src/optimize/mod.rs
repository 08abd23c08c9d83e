//! Optimization layers on top of the divergences.

mod calculus;
mod channel_info;
mod exponent;
mod mutual_info;
pub mod solver;
mod variational;

pub use mutual_info::{
    log_euclidean_mutual_info, log_euclidean_mutual_info_with, sandwiched_mutual_info,
    sandwiched_mutual_info_with, MarginalMinimum,
};
pub use solver::{HermitianBasis, SolverOptions};
pub use channel_info::{
    channel_renyi_info, channel_renyi_info_with, ea_capacity, log_euclidean_channel_info,
    log_euclidean_channel_info_single, ChannelInfo, InputOptions,
};
pub use exponent::{
    exponent_candidate_f, feedback_exponent, pf_ps_transform, quantum_exponent,
    strong_converse_exponent, ExponentQuery, ExponentResult, InnerSolve, PfPsDirection,
};
pub use variational::{
    f1_f2_split, log_euclidean_variational, variational_f, ConstrainedValue, SplitValues,
    VariationalAssignment,
};
