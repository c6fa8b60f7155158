//! Small dense complex linear algebra.
//!
//! Everything here operates on square matrices of dimension 2 or 4 in
//! practice. Dimension 2 takes a closed-form eigensolver; larger Hermitian
//! matrices go through `nalgebra`'s symmetric eigensolver.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Entrywise tolerance for Hermitian symmetry checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as zero by [`psd_sqrt`].
pub const PSD_CLAMP: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense square complex matrix indexed as `(row, col)`.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, |i, j| f(i, j)))
    }

    /// Builds a matrix from `dim * dim` entries in row-major order.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Ok(Self(DMatrix::from_row_slice(dim, dim, entries)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| {
            if i == j {
                c64(diag[i], 0.0)
            } else {
                C64::default()
            }
        })
    }

    /// `|v><v|` for an (unnormalized) vector `v`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn pauli_x() -> Self {
        Self::from_row_major(2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)])
            .expect("2x2")
    }

    pub fn pauli_y() -> Self {
        Self::from_row_major(2, &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)])
            .expect("2x2")
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diagonal(&[1.0, -1.0])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    /// `max_{jk} |M[j][k] - conj(M[k][j])|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_error() <= HERMITIAN_TOL
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<C64> {
        let d = self.dim();
        (0..d * d).map(|k| self.0[(k / d, k % d)]).collect()
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim()).map(|i| self.0[(i, j)]).collect()
    }

    /// `A ρ A†`.
    pub fn sandwich(&self, inner: &Self) -> Self {
        Self(&self.0 * &inner.0 * self.0.adjoint())
    }

    pub(crate) fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub(crate) fn from_inner(m: DMatrix<C64>) -> Self {
        debug_assert!(m.is_square());
        Self(m)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim();
        writeln!(f, "ComplexMatrix({d}x{d}) [")?;
        for i in 0..d {
            write!(f, "  ")?;
            for j in 0..d {
                let z = self.0[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Spectral decomposition `M = V diag(λ) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors.0;
        let d = v.nrows();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(d, |i, j| {
            (0..d).fold(C64::default(), |acc, k| acc + v[(i, k)] * v[(j, k)].conj() * fl[k])
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| l)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn herm_eig(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let asym = m.hermiticity_error();
    if asym > HERMITIAN_TOL || !m.is_finite() {
        return Err(Error::NotHermitian(asym));
    }
    Ok(if m.dim() == 2 {
        eig2(m)
    } else {
        eig_general(m)
    })
}

/// Closed form for `[[a, b], [b*, d]]`.
fn eig2(m: &ComplexMatrix) -> HermitianEigen {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    // average the two off-diagonal copies so tiny asymmetries do not bias V
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = half.hypot(b.norm());
    if r == 0.0 {
        return HermitianEigen {
            eigenvalues: vec![mean, mean],
            eigenvectors: ComplexMatrix::identity(2),
        };
    }
    // two algebraically equivalent eigenvectors for λ+; take the better conditioned one
    let (v0, v1) = if half >= 0.0 {
        (c64(r + half, 0.0), b.conj())
    } else {
        (b, c64(r - half, 0.0))
    };
    let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    let (p0, p1) = (v0 / norm, v1 / norm);
    let eigenvectors =
        ComplexMatrix::from_row_major(2, &[-p1.conj(), p0, p0.conj(), p1]).expect("2x2");
    HermitianEigen {
        eigenvalues: vec![mean - r, mean + r],
        eigenvectors,
    }
}

fn eig_general(m: &ComplexMatrix) -> HermitianEigen {
    let d = m.dim();
    // symmetrize before handing to the solver, which only reads one triangle
    let herm = (&m.0 + m.0.adjoint()) * c64(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(d, |i, j| eig.eigenvectors[(i, order[j])]);
    HermitianEigen {
        eigenvalues,
        eigenvectors,
    }
}

/// Principal square root of a positive semi-definite matrix.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(m)?;
    psd_sqrt_from_eig(&eig)
}

pub(crate) fn psd_sqrt_from_eig(eig: &HermitianEigen) -> Result<ComplexMatrix> {
    let min = eig.min_eigenvalue();
    if min < -PSD_CLAMP {
        return Err(Error::NotPsd(min));
    }
    // Roundoff-sized eigenvalues would otherwise come back as their square roots.
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let snap = 64.0 * f64::EPSILON * scale;
    Ok(eig.map(|l| if l <= snap { 0.0 } else { l.sqrt() }))
}

/// Kronecker product with `(a ⊗ b)[i·db + k][j·db + l] = a[i][j] · b[k][l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Which factor of a bipartite space to keep in [`partial_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace over the factor not named by `keep`, for `m` on `C^dA ⊗ C^dB`.
pub fn partial_trace(m: &ComplexMatrix, keep: Subsystem, dims: (usize, usize)) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if m.dim() != da * db {
        return Err(Error::DimensionMismatch {
            expected: da * db,
            actual: m.dim(),
        });
    }
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, |i, j| {
            (0..db).fold(C64::default(), |acc, k| acc + m[(i * db + k, j * db + k)])
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, |k, l| {
            (0..da).fold(C64::default(), |acc, i| acc + m[(i * db + k, i * db + l)])
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_hermitian(dim: usize, entries: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(dim);
        let mut it = entries.iter().copied().cycle();
        for i in 0..dim {
            m[(i, i)] = c64(it.next().unwrap(), 0.0);
            for j in (i + 1)..dim {
                let z = c64(it.next().unwrap(), it.next().unwrap());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn unitarity_error(v: &ComplexMatrix) -> f64 {
        (&v.adjoint() * v).max_abs_diff(&ComplexMatrix::identity(v.dim()))
    }

    #[test]
    fn pauli_z_spectrum() {
        let e = herm_eig(&ComplexMatrix::pauli_z()).unwrap();
        assert_eq!(e.eigenvalues, vec![-1.0, 1.0]);
        assert!(unitarity_error(&e.eigenvectors) < 1e-12);
    }

    #[test]
    fn identity_spectrum() {
        for d in [2, 4] {
            let e = herm_eig(&ComplexMatrix::identity(d)).unwrap();
            assert!(e.eigenvalues.iter().all(|&l| (l - 1.0).abs() < 1e-12));
            assert!(unitarity_error(&e.eigenvectors) < 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c64(1.0, 0.0);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn sqrt_of_diagonals() {
        let r = psd_sqrt(&ComplexMatrix::identity(2)).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
        let r = psd_sqrt(&ComplexMatrix::from_real_diagonal(&[4.0, 9.0])).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[2.0, 3.0])) < 1e-14);
        let r = psd_sqrt(&ComplexMatrix::from_real_diagonal(&[4.0, 9.0, 0.25, 0.0])).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[2.0, 3.0, 0.5, 0.0])) < 1e-12);
    }

    #[test]
    fn sqrt_of_two_outcome_effect_squares_back() {
        // E+ = 0.5 I + 0.3 σx
        let e = &ComplexMatrix::identity(2).scale(0.5) + &ComplexMatrix::pauli_x().scale(0.3);
        let r = psd_sqrt(&e).unwrap();
        assert!((&r * &r).max_abs_diff(&e) < 1e-10);
        assert!(r.is_hermitian());
    }

    #[test]
    fn sqrt_clamps_tiny_negative_and_rejects_real_negative() {
        let m = ComplexMatrix::from_real_diagonal(&[1.0, -5e-11]);
        let r = psd_sqrt(&m).unwrap();
        assert_eq!(r[(1, 1)].re, 0.0);
        let m = ComplexMatrix::from_real_diagonal(&[1.0, -1e-6]);
        assert!(matches!(psd_sqrt(&m), Err(Error::NotPsd(_))));
    }

    #[test]
    fn kronecker_examples() {
        let i4 = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));
        let zi = tensor(&ComplexMatrix::pauli_z(), &ComplexMatrix::identity(2));
        assert_eq!(zi, ComplexMatrix::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn kronecker_index_law() {
        let a = random_hermitian(2, &[0.3, -0.2, 0.7, 1.1]);
        let b = random_hermitian(2, &[-0.5, 0.9, 0.1, 0.4]);
        let ab = tensor(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        assert_eq!(ab[(i * 2 + k, j * 2 + l)], a[(i, j)] * b[(k, l)]);
                    }
                }
            }
        }
    }

    #[test]
    fn partial_trace_examples() {
        let mixed = ComplexMatrix::identity(4).scale(0.25);
        let rb = partial_trace(&mixed, Subsystem::B, (2, 2)).unwrap();
        assert!(rb.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);

        let rho = random_hermitian(2, &[0.7, 0.1, -0.2, 0.3]);
        let zero = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let rb = partial_trace(&tensor(&zero, &rho), Subsystem::B, (2, 2)).unwrap();
        assert!(rb.max_abs_diff(&rho) < 1e-15);

        assert!(matches!(
            partial_trace(&mixed, Subsystem::A, (2, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bell_state_reductions_match_index_sum() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [c64(s, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(s, 0.0)];
        let bell = ComplexMatrix::outer(&psi);
        // ρ_A[i][j] = Σ_k ψ[i,k] ψ*[j,k]
        let oracle = ComplexMatrix::from_fn(2, |i, j| {
            (0..2).map(|k| psi[2 * i + k] * psi[2 * j + k].conj()).sum()
        });
        for keep in [Subsystem::A, Subsystem::B] {
            let r = partial_trace(&bell, keep, (2, 2)).unwrap();
            assert!(r.max_abs_diff(&oracle) < 1e-15);
            assert!(r.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
        }
    }

    #[test]
    fn non_square_dims_for_partial_trace() {
        let a = random_hermitian(2, &[0.2, 0.3, 0.4, 0.5]);
        let b = random_hermitian(3, &[0.1, -0.3, 0.6, 0.2, 0.8, -0.4, 0.9]);
        let ab = tensor(&a, &b);
        let ra = partial_trace(&ab, Subsystem::A, (2, 3)).unwrap();
        let rb = partial_trace(&ab, Subsystem::B, (2, 3)).unwrap();
        assert!(ra.max_abs_diff(&a.scale_complex(b.trace())) < 1e-13);
        assert!(rb.max_abs_diff(&b.scale_complex(a.trace())) < 1e-13);
    }

    proptest! {
        #[test]
        fn eig_reconstructs(dim in prop_oneof![Just(2usize), Just(3), Just(4)],
                            entries in prop::collection::vec(-1.0f64..1.0, 16)) {
            let m = random_hermitian(dim, &entries);
            let e = herm_eig(&m).unwrap();
            prop_assert!(e.reconstruct().max_abs_diff(&m) < 1e-9);
            prop_assert!(unitarity_error(&e.eigenvectors) < 1e-9);
            prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            let sum: f64 = e.eigenvalues.iter().sum();
            prop_assert!((sum - m.trace().re).abs() < 1e-9);
        }

        #[test]
        fn sqrt_squares_back(dim in prop_oneof![Just(2usize), Just(4)],
                             entries in prop::collection::vec(-1.0f64..1.0, 16)) {
            let h = random_hermitian(dim, &entries);
            let psd = &h * &h;
            let r = psd_sqrt(&psd).unwrap();
            prop_assert!((&r * &r).max_abs_diff(&psd) < 1e-8);
            prop_assert!(herm_eig(&r).unwrap().min_eigenvalue() >= -1e-10);
        }

        #[test]
        fn trace_is_multiplicative(x in prop::collection::vec(-1.0f64..1.0, 16),
                                   y in prop::collection::vec(-1.0f64..1.0, 16)) {
            let a = random_hermitian(2, &x);
            let b = random_hermitian(4, &y);
            let t = tensor(&a, &b).trace();
            prop_assert!((t - a.trace() * b.trace()).norm() < 1e-12);
        }

        #[test]
        fn partial_trace_factorizes(x in prop::collection::vec(-1.0f64..1.0, 16),
                                    y in prop::collection::vec(-1.0f64..1.0, 16)) {
            let a = random_hermitian(2, &x);
            let b = random_hermitian(2, &y);
            let ab = tensor(&a, &b);
            let ra = partial_trace(&ab, Subsystem::A, (2, 2)).unwrap();
            let rb = partial_trace(&ab, Subsystem::B, (2, 2)).unwrap();
            prop_assert!(ra.max_abs_diff(&a.scale_complex(b.trace())) < 1e-10);
            prop_assert!(rb.max_abs_diff(&b.scale_complex(a.trace())) < 1e-10);
            prop_assert!((ra.trace() - ab.trace()).norm() < 1e-12);
        }
    }
}
