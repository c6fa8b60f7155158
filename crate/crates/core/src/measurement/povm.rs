use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, herm_eig, psd_sqrt_from_eig, tensor, ComplexMatrix, HERMITIAN_TOL, PSD_CLAMP};
use crate::state::DensityMatrix;

/// Entrywise tolerance on `Σ E_i = I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Outcomes with probability at or below this have no conditional state.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// A validated measurement: PSD effects of equal dimension summing to the identity.
///
/// The Kraus operators `√E_i` are computed once at validation.
#[derive(Debug, Clone)]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
    kraus: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    /// `√E_i` for each effect.
    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }
}

/// Validates with the default completeness tolerance.
pub fn validate_povm(effects: Vec<ComplexMatrix>) -> Result<Povm> {
    validate_povm_with_tolerance(effects, COMPLETENESS_TOL)
}

pub fn validate_povm_with_tolerance(effects: Vec<ComplexMatrix>, completeness_tol: f64) -> Result<Povm> {
    let first = effects.first().ok_or(Error::Empty("POVM has no effects"))?;
    let dim = first.dim();
    let mut sum = ComplexMatrix::zeros(dim);
    let mut kraus = Vec::with_capacity(effects.len());
    for (index, e) in effects.iter().enumerate() {
        if e.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: e.dim(),
            });
        }
        if e.hermiticity_error() > HERMITIAN_TOL {
            return Err(Error::NotHermitian(e.hermiticity_error()));
        }
        let eig = herm_eig(e)?;
        if eig.min_eigenvalue() < -PSD_CLAMP {
            return Err(Error::EffectNotPsd {
                index,
                min_eigenvalue: eig.min_eigenvalue(),
            });
        }
        kraus.push(psd_sqrt_from_eig(&eig)?);
        sum = &sum + e;
    }
    let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    if deviation > completeness_tol {
        return Err(Error::NotComplete(deviation));
    }
    Ok(Povm { effects, kraus })
}

fn check_dim(povm: &Povm, rho: &DensityMatrix) -> Result<()> {
    if povm.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            actual: rho.dim(),
        });
    }
    Ok(())
}

/// Sum of `K ρ K†` over a Kraus family, returned as a raw matrix.
pub(crate) fn apply_kraus(kraus: &[ComplexMatrix], rho: &ComplexMatrix) -> ComplexMatrix {
    kraus
        .iter()
        .fold(ComplexMatrix::zeros(rho.dim()), |acc, k| &acc + &k.sandwich(rho))
}

/// Non-selective Lüders update `ρ ↦ Σ √E_i ρ √E_i`.
pub fn luders_apply(povm: &Povm, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_dim(povm, rho)?;
    Ok(DensityMatrix::from_matrix_unchecked(apply_kraus(
        povm.kraus(),
        rho.matrix(),
    )))
}

/// Probability of outcome `index` and the conditional post-measurement state.
pub fn selective_outcome(povm: &Povm, rho: &DensityMatrix, index: usize) -> Result<(f64, DensityMatrix)> {
    check_dim(povm, rho)?;
    if index >= povm.outcomes() {
        return Err(Error::OutcomeOutOfRange {
            index,
            outcomes: povm.outcomes(),
        });
    }
    let probability = (&povm.effects[index] * rho.matrix()).trace().re;
    if probability <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome { index, probability });
    }
    let post = povm.kraus[index]
        .sandwich(rho.matrix())
        .scale(1.0 / probability);
    Ok((probability.min(1.0), DensityMatrix::from_matrix_unchecked(post)))
}

/// `Λ_{M1} ∘ Λ_{M2}`: applies `m2` first, then `m1`.
pub fn compose_channels(m1: &Povm, m2: &Povm, rho: &DensityMatrix) -> Result<DensityMatrix> {
    luders_apply(m1, &luders_apply(m2, rho)?)
}

/// `Λ_{M1} ⊗ Λ_{M2}` on a bipartite state, with Kraus products `√E_j ⊗ √F_i`.
pub fn tensor_channels(m1: &Povm, m2: &Povm, rho_ab: &DensityMatrix) -> Result<DensityMatrix> {
    let dim = m1.dim() * m2.dim();
    if rho_ab.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: rho_ab.dim(),
        });
    }
    let kraus: Vec<ComplexMatrix> = m1
        .kraus()
        .iter()
        .flat_map(|a| m2.kraus().iter().map(move |b| tensor(a, b)))
        .collect();
    Ok(DensityMatrix::from_matrix_unchecked(apply_kraus(
        &kraus,
        rho_ab.matrix(),
    )))
}

/// File form of a POVM: `{ "dim": d, "effects": [[[re, im], ...], ...] }`.
///
/// Each effect lists its `d * d` entries in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmJson {
    pub dim: usize,
    pub effects: Vec<Vec<[f64; 2]>>,
}

impl PovmJson {
    pub fn from_povm(povm: &Povm) -> Self {
        Self {
            dim: povm.dim(),
            effects: povm
                .effects()
                .iter()
                .map(|e| e.to_row_major().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    /// Builds the effect matrices without validating them as a measurement.
    pub fn effect_matrices(&self) -> Result<Vec<ComplexMatrix>> {
        self.effects
            .iter()
            .map(|entries| {
                let flat: Vec<_> = entries.iter().map(|[re, im]| c64(*re, *im)).collect();
                ComplexMatrix::from_row_major(self.dim, &flat)
            })
            .collect()
    }

    pub fn to_povm(&self) -> Result<Povm> {
        validate_povm(self.effect_matrices()?)
    }
}
