//! Finite-dimensional Hermitian linear algebra.
//!
//! Composite systems use the listed order of subsystems with row-major
//! composite indices, so `|i⟩ ⊗ |j⟩` on `d₁ ⊗ d₂` is basis vector `i·d₂ + j`.

mod channel;
mod pinching;
mod spectral;
mod state;
mod tensor;

pub use channel::{apply_channel, QuantumChannel, KRAUS_TOL};
pub use pinching::{distinct_eigenvalue_count, pinching, Pinching};
pub use spectral::{
    eigh, eigvalsh, hermitian_eigensystem, spectral_apply, CMatrix, CVector, Eigensystem,
    HermitianOperator, C64, EIGEN_CLUSTER_REL, HERMITIAN_TOL, PSD_CLIP, SUPPORT_LEAK, SUPPORT_REL,
};
pub use state::{canonical_input_state, DensityOperator, PureState, StateEnsemble};
pub use tensor::{
    partial_trace_matrix, permute_subsystems, permute_vector, tensor_all, tensor_product,
    tensor_vectors,
};

pub(crate) use channel::shift_phase;
pub(crate) use spectral::{
    entropy_of, exp2_hermitian, hermitian_norm, log2_sum_powers, log2_trace_exp2, max_abs,
    min_eigenvalue, psd_sqrt, re, trace_product, trace_re,
};
#[cfg(test)]
pub(crate) use spectral::{psd_log2, psd_power};
pub(crate) use state::{canonical_input_vector, normalize_psd};
pub(crate) use tensor::permutation_index_map;

/// Partial trace of a state, keeping the listed subsystems.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> crate::Result<DensityOperator> {
    rho.partial_trace(keep)
}
