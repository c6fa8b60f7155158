//! Coherence quantifiers in the computational basis.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, ComplexMatrix, C64};
use crate::measurement::Povm;
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::state::{binary_entropy, dephase, entropy, shannon_bits, DensityMatrix};

/// Elements with raw quantumness at or below this count as diagonal.
pub const RAW_QUANTUMNESS_TOL: f64 = 1e-10;

const SUPPORT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceReport {
    pub c_l1: f64,
    pub c_rel_ent: f64,
    pub state_dim: usize,
}

pub fn coherence_report(rho: &DensityMatrix) -> CoherenceReport {
    CoherenceReport {
        c_l1: c_l1(rho),
        c_rel_ent: c_rel_ent(rho),
        state_dim: rho.dim(),
    }
}

fn off_diagonal_sum(m: &ComplexMatrix) -> f64 {
    let d = m.dim();
    let mut total = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                total += m[(i, j)].norm();
            }
        }
    }
    total
}

/// `Σ_{i≠j} |ρ_ij|`.
pub fn c_l1(rho: &DensityMatrix) -> f64 {
    off_diagonal_sum(rho.matrix())
}

/// `S(ρ^D) - S(ρ)` in bits, floored at zero.
pub fn c_rel_ent(rho: &DensityMatrix) -> f64 {
    (entropy(&dephase(rho)) - entropy(rho)).max(0.0)
}

fn require_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            actual: rho.dim(),
        });
    }
    Ok(())
}

/// Trace-norm distance `‖ρ - ρ^D‖_tr`, which is the closest-incoherent-state
/// distance for a qubit.
pub fn c_trace_qubit(rho: &DensityMatrix) -> Result<f64> {
    require_qubit(rho)?;
    let diff = rho.matrix() - dephase(rho).matrix();
    Ok(herm_eig(&diff)?.eigenvalues.iter().map(|l| l.abs()).sum())
}

/// Qubit coherence of formation, `H2((1 + √(1 - C_l1²)) / 2)`.
pub fn c_formation_qubit(rho: &DensityMatrix) -> Result<f64> {
    require_qubit(rho)?;
    let c = c_l1(rho).min(1.0);
    Ok(binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0))
}

/// Grid used by [`c_formation_rank2_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rank2Grid {
    /// Points on `θ ∈ [0, π/2]`, endpoints included.
    pub theta_steps: usize,
    /// Points on `φ ∈ [0, 2π)`.
    pub phi_steps: usize,
    /// Run a Nelder-Mead pass from the best grid point.
    pub refine: bool,
}

impl Default for Rank2Grid {
    fn default() -> Self {
        Self {
            theta_steps: 181,
            phi_steps: 360,
            refine: true,
        }
    }
}

fn normalized(v: &[C64]) -> Result<Vec<C64>> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(n > 0.0) {
        return Err(Error::SupportMismatch("zero basis vector".into()));
    }
    Ok(v.iter().map(|z| z / n).collect())
}

/// `min_{θ,φ} S(dephase(|ψ><ψ|))` over `|ψ> = cosθ|e1> + e^{iφ} sinθ|e2>`,
/// a lower bound on the coherence of formation of `ρ` when `ρ` lives in
/// `span{e1, e2}`.
pub fn c_formation_rank2_bound(rho: &DensityMatrix, e1: &[C64], e2: &[C64], grid: Rank2Grid) -> Result<f64> {
    let d = rho.dim();
    if e1.len() != d || e2.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: e1.len().max(e2.len()),
        });
    }
    let e1 = normalized(e1)?;
    let e2 = normalized(e2)?;
    let overlap: C64 = e1.iter().zip(&e2).map(|(a, b)| a.conj() * b).sum();
    if overlap.norm() > SUPPORT_TOL {
        return Err(Error::SupportMismatch(format!(
            "basis vectors overlap by {:e}",
            overlap.norm()
        )));
    }
    let projector = &ComplexMatrix::outer(&e1) + &ComplexMatrix::outer(&e2);
    let leak = projector.sandwich(rho.matrix()).max_abs_diff(rho.matrix());
    if leak > SUPPORT_TOL {
        return Err(Error::SupportMismatch(format!("state leaks {leak:e} outside the span")));
    }

    let objective = |theta: f64, phi: f64| {
        let (s, c) = theta.sin_cos();
        let phase = C64::from_polar(s, phi);
        shannon_bits(e1.iter().zip(&e2).map(|(a, b)| (a * c + b * phase).norm_sqr()))
    };

    let theta_div = grid.theta_steps.saturating_sub(1).max(1) as f64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..grid.theta_steps.max(1) {
        let theta = FRAC_PI_2 * i as f64 / theta_div;
        for j in 0..grid.phi_steps.max(1) {
            let phi = TAU * j as f64 / grid.phi_steps.max(1) as f64;
            let v = objective(theta, phi);
            if v < best.0 {
                best = (v, theta, phi);
            }
        }
    }
    if grid.refine {
        let m = nelder_mead(
            |x| objective(x[0].clamp(0.0, FRAC_PI_2), x[1]),
            &[best.1, best.2],
            &[FRAC_PI_2 / theta_div, TAU / grid.phi_steps.max(1) as f64],
            NelderMeadOptions::default(),
        );
        best.0 = best.0.min(m.value);
    }
    Ok(best.0)
}

/// Sum of off-diagonal magnitudes of a single effect.
pub fn raw_quantumness_element(e: &ComplexMatrix) -> f64 {
    off_diagonal_sum(e)
}

/// All effects diagonal in the computational basis.
pub fn is_free_measurement(povm: &Povm) -> bool {
    povm
        .effects()
        .iter()
        .all(|e| raw_quantumness_element(e) <= RAW_QUANTUMNESS_TOL)
}
