//! Measurements as non-selective channels.
//!
//! Every channel here uses the Kraus operators `K_i = √E_i`. The closed
//! forms in [`families`] are cross-checks against [`luders_apply`], which is
//! treated as authoritative wherever they differ.

mod families;
mod povm;

pub use families::{
    coherent_basis_projectors, coherent_state, coherent_state_bloch, coherent_state_complement,
    effect_bloch, n_outcome_povm, one_param_apply_closed, one_param_coherence, one_param_povm,
    trine_cnm_povm, two_outcome_bloch_closed, two_outcome_coherence_closed, two_outcome_delta0_bound,
    two_outcome_delta0_coherence, two_outcome_povm, NOutcomeParams, OneParamPovmParams,
    TwoOutcomeParams, DEGENERATE_DIRECTION,
};
pub use povm::{
    compose_channels, luders_apply, selective_outcome, tensor_channels, validate_povm,
    validate_povm_with_tolerance, Povm, PovmJson, COMPLETENESS_TOL, ZERO_PROBABILITY,
};

use crate::error::{Error, Result};
use crate::state::{is_incoherent, DensityMatrix};

/// Default off-diagonal tolerance for CNM checks.
pub const CNM_TOL: f64 = 1e-9;

/// Whether the measurement maps every incoherent state to an incoherent state.
///
/// The channel is affine and the incoherent states are the convex hull of
/// the basis projectors, so checking those `d` vertices is enough.
pub fn is_cnm(povm: &Povm, tol: f64) -> bool {
    (0..povm.dim()).all(|k| {
        let out = luders_apply(povm, &DensityMatrix::basis(povm.dim(), k))
            .expect("basis state has the POVM's dimension");
        is_incoherent(&out, tol)
    })
}

/// [`is_cnm`] restricted to qubit measurements.
pub fn is_cnm_qubit(povm: &Povm, tol: f64) -> Result<bool> {
    if povm.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            actual: povm.dim(),
        });
    }
    Ok(is_cnm(povm, tol))
}
