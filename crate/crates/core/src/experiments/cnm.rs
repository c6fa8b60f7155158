use std::f64::consts::FRAC_1_SQRT_2;

use crate::coherence::{c_formation_rank2_bound, c_rel_ent, Rank2Grid};
use crate::error::Result;
use crate::linalg::{c64, herm_eig, ComplexMatrix};
use crate::measurement::{is_cnm, tensor_channels, validate_povm, Povm, CNM_TOL};
use crate::state::DensityMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct CnmCfExample {
    pub identity_is_cnm: bool,
    pub povm_is_cnm: bool,
    /// Coherence of formation of `|ψ₊>`, equal to its diagonal entropy.
    pub c_f_initial: f64,
    /// Spectrum of the output state, ascending.
    pub output_eigenvalues: Vec<f64>,
    pub c_f_final_lower_bound: f64,
    pub increased: bool,
}

/// `E₁,₂ = ½ I ∓ σx / (2√2)`.
pub fn example_povm() -> Povm {
    let off = 0.5 * FRAC_1_SQRT_2;
    let effect = |sign: f64| ComplexMatrix::from_fn(2, |i, j| c64(if i == j { 0.5 } else { sign * off }, 0.0));
    validate_povm(vec![effect(-1.0), effect(1.0)]).expect("valid two-outcome POVM")
}

/// Applies `{I} ⊗ {E₁, E₂}` to `|ψ₊> = (|00> + |11>)/√2` and bounds the
/// coherence of formation of the output from below by the smallest diagonal
/// entropy of a pure state in its support.
pub fn cnm_cf_example() -> Result<CnmCfExample> {
    let identity = validate_povm(vec![ComplexMatrix::identity(2)])?;
    let povm = example_povm();
    let s = FRAC_1_SQRT_2;
    let zero = c64(0.0, 0.0);
    let psi_plus = DensityMatrix::pure(&[c64(s, 0.0), zero, zero, c64(s, 0.0)])?;
    let out = tensor_channels(&identity, &povm, &psi_plus)?;
    let eig = herm_eig(out.matrix())?;
    let e1 = eig.eigenvectors.column(3);
    let e2 = eig.eigenvectors.column(2);
    let bound = c_formation_rank2_bound(&out, &e1, &e2, Rank2Grid::default())?;
    let c_f_initial = c_rel_ent(&psi_plus);
    Ok(CnmCfExample {
        identity_is_cnm: is_cnm(&identity, CNM_TOL),
        povm_is_cnm: is_cnm(&povm, CNM_TOL),
        c_f_initial,
        output_eigenvalues: eig.eigenvalues,
        c_f_final_lower_bound: bound,
        increased: bound > c_f_initial,
    })
}
