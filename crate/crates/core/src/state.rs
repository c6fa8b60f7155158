//! Density matrices in the fixed computational basis, with the qubit Bloch view.

use crate::error::{Error, Result};
use crate::linalg::{c64, herm_eig, ComplexMatrix, C64};

/// Trace and positivity tolerance for [`DensityMatrix::new`].
pub const STATE_TOL: f64 = 1e-9;

/// Eigenvalues at or below this are dropped from entropy sums.
pub const ENTROPY_FLOOR: f64 = 1e-15;

/// Default off-diagonal tolerance for [`is_incoherent`].
pub const INCOHERENCE_TOL: f64 = 1e-9;

/// Bloch vector `(r1, r2, r3)` of a qubit state `(I + r·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl BlochVector {
    pub const fn new(r1: f64, r2: f64, r3: f64) -> Self {
        Self { r1, r2, r3 }
    }

    pub fn from_array(r: [f64; 3]) -> Self {
        Self::new(r[0], r[1], r[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.r1, self.r2, self.r3]
    }

    pub fn norm(self) -> f64 {
        (self.r1 * self.r1 + self.r2 * self.r2 + self.r3 * self.r3).sqrt()
    }

    pub fn dot(self, other: Self) -> f64 {
        self.r1 * other.r1 + self.r2 * other.r2 + self.r3 * other.r3
    }

    /// `R = r1 + i r2`; its modulus is the l1 coherence of the state.
    pub fn transverse(self) -> C64 {
        c64(self.r1, self.r2)
    }

    pub fn scaled(self, s: f64) -> Self {
        Self::new(self.r1 * s, self.r2 * s, self.r3 * s)
    }

    pub fn plus(self, other: Self) -> Self {
        Self::new(self.r1 + other.r1, self.r2 + other.r2, self.r3 + other.r3)
    }
}

/// Unit-trace positive semi-definite Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let eig = herm_eig(&matrix)?;
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        if eig.min_eigenvalue() < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "min eigenvalue {:e}",
                eig.min_eigenvalue()
            )));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix known to be a state by construction (channel outputs).
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `|ψ><ψ|` for the normalized version of `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let unit: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self::from_matrix_unchecked(ComplexMatrix::outer(&unit)))
    }

    /// `|k><k|` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut diag = vec![0.0; dim];
        diag[k] = 1.0;
        Self::from_matrix_unchecked(ComplexMatrix::from_real_diagonal(&diag))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_matrix_unchecked(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        herm_eig(&self.matrix)
            .expect("density matrices are Hermitian")
            .eigenvalues
    }
}

/// `ρ = (I + r·σ)/2`.
pub fn from_bloch(r: BlochVector) -> Result<DensityMatrix> {
    let len = r.norm();
    if !len.is_finite() || len > 1.0 + STATE_TOL {
        return Err(Error::OutsideBlochBall(len));
    }
    let m = ComplexMatrix::from_row_major(
        2,
        &[
            c64(0.5 * (1.0 + r.r3), 0.0),
            c64(0.5 * r.r1, -0.5 * r.r2),
            c64(0.5 * r.r1, 0.5 * r.r2),
            c64(0.5 * (1.0 - r.r3), 0.0),
        ],
    )?;
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

pub fn to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            actual: rho.dim(),
        });
    }
    Ok(bloch_of(rho.matrix()))
}

/// Bloch components of any 2x2 matrix, `r_k = Tr(M σ_k)`.
pub(crate) fn bloch_of(m: &ComplexMatrix) -> BlochVector {
    let off = m[(1, 0)] + m[(0, 1)].conj();
    BlochVector::new(off.re, off.im, (m[(0, 0)] - m[(1, 1)]).re)
}

/// Removes every off-diagonal entry.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim();
    let diag: Vec<f64> = (0..d).map(|i| rho.matrix()[(i, i)].re).collect();
    DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_real_diagonal(&diag))
}

/// `-Σ p log2 p` over a probability-like spectrum, skipping entries below the floor.
pub fn shannon_bits(probabilities: impl IntoIterator<Item = f64>) -> f64 {
    probabilities
        .into_iter()
        .filter(|&p| p > ENTROPY_FLOOR)
        .map(|p| -p * p.log2())
        .sum()
}

/// Binary entropy `H2(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    shannon_bits([p, 1.0 - p])
}

/// Von Neumann entropy in bits, clamped to `[0, log2 d]`.
pub fn entropy(rho: &DensityMatrix) -> f64 {
    let max = (rho.dim() as f64).log2();
    shannon_bits(rho.eigenvalues()).clamp(0.0, max)
}

pub fn is_incoherent(rho: &DensityMatrix, tol: f64) -> bool {
    let m = rho.matrix();
    let d = m.dim();
    (0..d).all(|i| (0..d).all(|j| i == j || m[(i, j)].norm() <= tol))
}
