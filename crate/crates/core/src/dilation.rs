//! Apparatus-system dilation: a global unitary on `A ⊗ S` followed by a
//! projective measurement of the apparatus qubit `A`.

use std::f64::consts::{PI, TAU};

use crate::coherence::c_rel_ent;
use crate::error::{Error, Result};
use crate::linalg::{c64, herm_eig, partial_trace, tensor, ComplexMatrix, Subsystem, C64};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::random::{haar_unitary, sample_bloch_sphere, sample_pure_qubit, sample_qubit_state, substream, Domain};
use crate::state::{entropy, shannon_bits, DensityMatrix};

/// Tolerance on `U†U = I`.
pub const UNITARY_TOL: f64 = 1e-9;
/// Slack for the entropy inequalities checked in [`tradeoff_report`].
pub const TRADEOFF_SLACK: f64 = 1e-9;
const PURITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct DilationSetup {
    rho_a: DensityMatrix,
    rho_s: DensityMatrix,
    u: ComplexMatrix,
    rho_as: DensityMatrix,
}

impl DilationSetup {
    pub fn new(rho_a: DensityMatrix, rho_s: DensityMatrix, u: ComplexMatrix) -> Result<Self> {
        for rho in [&rho_a, &rho_s] {
            if rho.dim() != 2 {
                return Err(Error::WrongDimension {
                    expected: 2,
                    actual: rho.dim(),
                });
            }
        }
        if u.dim() != 4 {
            return Err(Error::WrongDimension {
                expected: 4,
                actual: u.dim(),
            });
        }
        let defect = (&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(4));
        if !(defect <= UNITARY_TOL) {
            return Err(Error::InvalidParams(format!("U is not unitary: ‖U†U - I‖ = {defect:e}")));
        }
        let joint = u.sandwich(&tensor(rho_a.matrix(), rho_s.matrix()));
        let rho_as = DensityMatrix::new((&joint + &joint.adjoint()).scale(0.5))?;
        Ok(Self {
            rho_a,
            rho_s,
            u,
            rho_as,
        })
    }

    pub fn rho_a(&self) -> &DensityMatrix {
        &self.rho_a
    }

    pub fn rho_s(&self) -> &DensityMatrix {
        &self.rho_s
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.u
    }

    /// `U (ρ_A ⊗ ρ_S) U†`.
    pub fn rho_as(&self) -> &DensityMatrix {
        &self.rho_as
    }

    /// `S(ρ_AS) = S(ρ_A) + S(ρ_S)` by unitary invariance.
    pub fn joint_entropy(&self) -> f64 {
        entropy(&self.rho_a) + entropy(&self.rho_s)
    }

    /// Apparatus marginal `Tr_S ρ_AS` at the time of measurement.
    pub fn apparatus_marginal(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(
            partial_trace(self.rho_as.matrix(), Subsystem::A, (2, 2)).expect("4 = 2 x 2"),
        )
    }
}

/// Measured apparatus basis `{|π₀>, |π₁>}` given by its Bloch angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApparatusProjectors {
    pub theta: f64,
    pub phi: f64,
}

impl ApparatusProjectors {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }.canonical()
    }

    pub fn computational() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    /// Same basis with `θ ∈ [0, π]` and `φ ∈ [0, 2π)`.
    pub fn canonical(self) -> Self {
        let mut theta = self.theta.rem_euclid(TAU);
        let mut phi = self.phi;
        if theta > PI {
            theta = TAU - theta;
            phi += PI;
        }
        Self {
            theta,
            phi: phi.rem_euclid(TAU),
        }
    }

    /// `|π₀> = (cos θ/2, e^{iφ} sin θ/2)`, `|π₁> = (sin θ/2, -e^{iφ} cos θ/2)`.
    pub fn vectors(&self) -> [[C64; 2]; 2] {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let phase = C64::from_polar(1.0, self.phi);
        [[c64(c, 0.0), phase * s], [c64(s, 0.0), -phase * c]]
    }

    pub fn projectors(&self) -> [ComplexMatrix; 2] {
        self.vectors().map(|v| ComplexMatrix::outer(&v))
    }
}

/// `(<π| ⊗ I) ρ (|π> ⊗ I)`, the unnormalized system block for outcome `π`.
fn system_block(rho_as: &ComplexMatrix, pi: &[C64; 2]) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |s, t| {
        let mut acc = C64::default();
        for a in 0..2 {
            for b in 0..2 {
                acc += pi[a].conj() * rho_as[(2 * a + s, 2 * b + t)] * pi[b];
            }
        }
        acc
    })
}

fn blocks(setup: &DilationSetup, proj: &ApparatusProjectors) -> [ComplexMatrix; 2] {
    proj.vectors().map(|v| system_block(setup.rho_as.matrix(), &v))
}

/// `Σ_i (Π_i ⊗ I) ρ_AS (Π_i ⊗ I)`.
pub fn dilate_and_measure(setup: &DilationSetup, proj: &ApparatusProjectors) -> DensityMatrix {
    let rho = setup.rho_as.matrix();
    let out = proj.projectors().iter().fold(ComplexMatrix::zeros(4), |acc, p| {
        let lifted = tensor(p, &ComplexMatrix::identity(2));
        &acc + &(&(&lifted * rho) * &lifted)
    });
    DensityMatrix::from_matrix_unchecked(out)
}

/// `S(ρ₂ᴹ) - S(ρ_AS)`.
///
/// `ρ₂ᴹ = Σ_i |π_i><π_i| ⊗ B_i` is block diagonal, so its spectrum is the
/// union of the spectra of the two 2x2 blocks `B_i`.
pub fn entanglement_gain(setup: &DilationSetup, proj: &ApparatusProjectors) -> f64 {
    measured_entropy(setup, proj) - setup.joint_entropy()
}

fn measured_entropy(setup: &DilationSetup, proj: &ApparatusProjectors) -> f64 {
    blocks(setup, proj)
        .iter()
        .map(|b| shannon_bits(herm_eig(b).expect("block of a Hermitian matrix").eigenvalues))
        .sum()
}

/// Angle grid for [`e_min`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleGrid {
    /// Points on `θ ∈ [0, π]`, endpoints included.
    pub theta_steps: usize,
    /// Points on `φ ∈ [0, 2π)`.
    pub phi_steps: usize,
    pub refine: bool,
}

impl Default for AngleGrid {
    fn default() -> Self {
        Self {
            theta_steps: 60,
            phi_steps: 120,
            refine: true,
        }
    }
}

/// Minimum of [`entanglement_gain`] over apparatus bases.
pub fn e_min(setup: &DilationSetup, grid: AngleGrid) -> (f64, ApparatusProjectors) {
    let gain = |theta: f64, phi: f64| entanglement_gain(setup, &ApparatusProjectors { theta, phi });
    let theta_steps = grid.theta_steps.max(1);
    let phi_steps = grid.phi_steps.max(1);
    let d_theta = PI / (theta_steps.saturating_sub(1).max(1)) as f64;
    let d_phi = TAU / phi_steps as f64;
    let mut best = (f64::INFINITY, ApparatusProjectors::computational());
    for i in 0..theta_steps {
        let theta = d_theta * i as f64;
        // the poles do not depend on φ
        let phis = if i == 0 || (theta_steps > 1 && i == theta_steps - 1) {
            1
        } else {
            phi_steps
        };
        for j in 0..phis {
            let phi = d_phi * j as f64;
            let v = gain(theta, phi);
            if v < best.0 {
                best = (v, ApparatusProjectors { theta, phi });
            }
        }
    }
    if grid.refine {
        let m = nelder_mead(
            |x| gain(x[0], x[1]),
            &[best.1.theta, best.1.phi],
            &[0.5 * d_theta, 0.5 * d_phi],
            NelderMeadOptions {
                max_evals: 400,
                ..Default::default()
            },
        );
        if m.value < best.0 {
            best = (m.value, ApparatusProjectors::new(m.x[0], m.x[1]));
        }
    }
    best
}

/// Terms of the entanglement-coherence-mixedness trade-off for one basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffReport {
    /// `E(Π) = S(ρ₂ᴹ) - S(ρ_AS)`.
    pub e_gain: f64,
    /// `C_r(Tr_A ρ₂ᴹ)`.
    pub c_r_system_after: f64,
    /// `S(ρ_S)` of the initial system.
    pub mixedness: f64,
    pub lhs: f64,
    /// `log2(N M)`.
    pub rhs: f64,
    pub holds: bool,
    /// `S(ρ_Aᴹ) + S(ρ_Sᴹ) - S(ρ_A) - S(ρ_S)` with `ρ_Aᴹ` the measured
    /// apparatus marginal, dephased in the Π basis.
    pub intermediate_bound: f64,
    pub intermediate_holds: bool,
    /// `C_r` of the initial apparatus state written in the Π basis.
    pub c_r_apparatus: f64,
}

/// `ρ` expressed in the measured basis, so that its diagonal holds the
/// outcome probabilities.
pub fn in_measured_basis(rho: &DensityMatrix, proj: &ApparatusProjectors) -> DensityMatrix {
    let v = proj.vectors();
    let basis_change = ComplexMatrix::from_fn(2, |i, j| v[i][j].conj());
    DensityMatrix::from_matrix_unchecked(basis_change.sandwich(rho.matrix()))
}

pub fn tradeoff_report(setup: &DilationSetup, proj: &ApparatusProjectors) -> TradeoffReport {
    let [b0, b1] = blocks(setup, proj);
    let measured = shannon_bits(herm_eig(&b0).unwrap().eigenvalues) + shannon_bits(herm_eig(&b1).unwrap().eigenvalues);
    let s_a = entropy(&setup.rho_a);
    let s_s = entropy(&setup.rho_s);
    let e_gain = measured - s_a - s_s;

    let system_after = DensityMatrix::from_matrix_unchecked(&b0 + &b1);
    let c_r_system_after = c_rel_ent(&system_after);
    let lhs = e_gain + c_r_system_after + s_s;
    let rhs = 4f64.log2();

    let p0 = b0.trace().re;
    let apparatus_after = shannon_bits([p0, 1.0 - p0]);
    let intermediate_bound = apparatus_after + entropy(&system_after) - s_a - s_s;

    TradeoffReport {
        e_gain,
        c_r_system_after,
        mixedness: s_s,
        lhs,
        rhs,
        holds: lhs <= rhs + TRADEOFF_SLACK,
        intermediate_bound,
        intermediate_holds: e_gain <= intermediate_bound + TRADEOFF_SLACK,
        c_r_apparatus: c_rel_ent(&in_measured_basis(&setup.rho_a, proj)),
    }
}

/// Kraus operators `K_i = (<π_i| ⊗ I) U (|a> ⊗ I)` that the dilation induces
/// on the system when the apparatus starts in the pure state `|a>`.
pub fn induced_kraus(setup: &DilationSetup, proj: &ApparatusProjectors) -> Result<[ComplexMatrix; 2]> {
    let eig = herm_eig(setup.rho_a.matrix())?;
    let top = eig.eigenvalues[1];
    if (top - 1.0).abs() > PURITY_TOL {
        return Err(Error::InvalidState(format!(
            "apparatus is not pure (largest eigenvalue {top})"
        )));
    }
    let a = eig.eigenvectors.column(1);
    let u = &setup.u;
    Ok(proj.vectors().map(|pi| {
        ComplexMatrix::from_fn(2, |s, t| {
            let mut acc = C64::default();
            for (x, pix) in pi.iter().enumerate() {
                for (y, ay) in a.iter().enumerate() {
                    acc += pix.conj() * u[(2 * x + s, 2 * y + t)] * ay;
                }
            }
            acc
        })
    }))
}

/// `Tr_A ρ₂ᴹ`.
pub fn system_after(setup: &DilationSetup, proj: &ApparatusProjectors) -> DensityMatrix {
    let [b0, b1] = blocks(setup, proj);
    DensityMatrix::from_matrix_unchecked(&b0 + &b1)
}

/// Haar 4x4 unitary for sample `index`.
pub fn random_unitary_4(master_seed: u64, index: u64) -> ComplexMatrix {
    haar_unitary(4, &mut substream(master_seed, Domain::Unitary, index))
}

/// Random setup for sample `index`: states uniform in the Bloch ball (or on
/// the sphere for a pure apparatus) and a Haar unitary.
pub fn random_setup(master_seed: u64, index: u64, pure_apparatus: bool) -> DilationSetup {
    let mut rng = substream(master_seed, Domain::State, index);
    let rho_a = if pure_apparatus {
        sample_pure_qubit(&mut rng)
    } else {
        sample_qubit_state(&mut rng)
    };
    let rho_s = sample_qubit_state(&mut rng);
    DilationSetup::new(rho_a, rho_s, random_unitary_4(master_seed, index)).expect("Haar unitary and valid states")
}

/// `count` apparatus bases with isotropic Bloch directions for sample `index`.
pub fn random_projectors(master_seed: u64, index: u64, count: usize) -> Vec<ApparatusProjectors> {
    let mut rng = substream(master_seed, Domain::Projectors, index);
    (0..count)
        .map(|_| {
            let r = sample_bloch_sphere(&mut rng);
            ApparatusProjectors::new(r.r3.clamp(-1.0, 1.0).acos(), r.r2.atan2(r.r1))
        })
        .collect()
}
