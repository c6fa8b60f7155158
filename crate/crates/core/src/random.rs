//! Reproducible random POVMs, states and unitaries.
//!
//! Every draw comes from a ChaCha20 stream keyed by `(master_seed, domain)`
//! and positioned by the sample index, so a sample depends on nothing but
//! those three values and parallel evaluation order is irrelevant.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{c64, herm_eig, ComplexMatrix, C64};
use crate::measurement::{
    n_outcome_povm, trine_cnm_povm, validate_povm_with_tolerance, NOutcomeParams, Povm, TwoOutcomeParams,
};
use crate::state::{from_bloch, BlochVector, DensityMatrix};

/// Normalizers with an eigenvalue below this are redrawn.
pub const SINGULAR_NORMALIZER: f64 = 1e-12;
/// Completeness tolerance every sampled POVM is validated against.
pub const SAMPLED_POVM_TOL: f64 = 1e-10;
const MAX_REDRAWS: usize = 64;

/// Independent random streams. Each experiment draws from its own domain so
/// that adding draws to one never shifts another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Povm,
    TwoOutcome,
    State,
    Unitary,
    Projectors,
    Cnm,
    Refinement,
}

impl Domain {
    fn tag(self) -> u64 {
        match self {
            Domain::Povm => 1,
            Domain::TwoOutcome => 2,
            Domain::State => 3,
            Domain::Unitary => 4,
            Domain::Projectors => 5,
            Domain::Cnm => 6,
            Domain::Refinement => 7,
        }
    }
}

/// Stream for sample `index` of `domain` under `master_seed`.
pub fn substream(master_seed: u64, domain: Domain, index: u64) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.tag().to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub n: usize,
    pub dim: usize,
    pub master_seed: u64,
    pub sample_index: u64,
}

impl SamplerConfig {
    /// Qubit sampler for `n`-outcome POVMs, positioned at index 0.
    pub fn new(n: usize, master_seed: u64) -> Self {
        Self {
            n,
            dim: 2,
            master_seed,
            sample_index: 0,
        }
    }

    pub fn at(self, sample_index: u64) -> Self {
        Self { sample_index, ..self }
    }

    pub fn rng(&self, domain: Domain) -> ChaCha20Rng {
        substream(self.master_seed, domain, self.sample_index)
    }
}

/// `(x + iy)/√2` with `x, y` standard normal.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    c64(x, y) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| complex_normal(rng))
}

/// Wishart-normalized random POVM: `E_i = S^{-1/2} G_i G_i† S^{-1/2}` with
/// `S = Σ G_i G_i†`.
pub fn sample_povm(cfg: &SamplerConfig) -> Result<Povm> {
    if cfg.n == 0 || cfg.dim == 0 {
        return Err(Error::InvalidParams(format!(
            "need at least one outcome and dimension, got n = {}, dim = {}",
            cfg.n, cfg.dim
        )));
    }
    if cfg.n == 1 {
        return validate_povm_with_tolerance(vec![ComplexMatrix::identity(cfg.dim)], SAMPLED_POVM_TOL);
    }
    let mut rng = cfg.rng(Domain::Povm);
    let mut smallest = 0.0;
    for _ in 0..MAX_REDRAWS {
        let wishart: Vec<ComplexMatrix> = (0..cfg.n)
            .map(|_| {
                let g = ginibre(cfg.dim, &mut rng);
                &g * &g.adjoint()
            })
            .collect();
        let total = wishart
            .iter()
            .fold(ComplexMatrix::zeros(cfg.dim), |acc, a| &acc + a);
        let eig = herm_eig(&total)?;
        smallest = eig.min_eigenvalue();
        if smallest < SINGULAR_NORMALIZER {
            continue;
        }
        let inv_sqrt = eig.map(|l| 1.0 / l.sqrt());
        let effects = wishart
            .iter()
            .map(|a| {
                let e = inv_sqrt.sandwich(a);
                (&e + &e.adjoint()).scale(0.5)
            })
            .collect();
        return validate_povm_with_tolerance(effects, SAMPLED_POVM_TOL);
    }
    Err(Error::SingularNormalizer(smallest))
}

/// `a₊` uniform on `[0, 1]`, `a⃗` uniform in the ball of radius `min(a₊, 1 - a₊)`.
pub fn sample_two_outcome_params(cfg: &SamplerConfig) -> TwoOutcomeParams {
    let mut rng = cfg.rng(Domain::TwoOutcome);
    let a_plus: f64 = rng.random();
    let radius = a_plus.min(1.0 - a_plus);
    let a_vec = loop {
        let v: [f64; 3] = std::array::from_fn(|_| radius * rng.random_range(-1.0..=1.0));
        if v.iter().map(|x| x * x).sum::<f64>() <= radius * radius {
            break v;
        }
    };
    TwoOutcomeParams::new(a_plus, a_vec).expect("sampled inside the admissible ball")
}

fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.map(|x| x / n);
        }
    }
}

/// Uniform point in the unit ball (isotropic direction, cube-root radius).
pub fn sample_bloch_ball<R: Rng + ?Sized>(rng: &mut R) -> BlochVector {
    let u: f64 = rng.random();
    BlochVector::from_array(unit_vector(rng)).scaled(u.cbrt())
}

/// Uniform point on the unit sphere.
pub fn sample_bloch_sphere<R: Rng + ?Sized>(rng: &mut R) -> BlochVector {
    BlochVector::from_array(unit_vector(rng))
}

pub fn sample_qubit_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    from_bloch(sample_bloch_ball(rng)).expect("inside the ball")
}

pub fn sample_pure_qubit<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    from_bloch(sample_bloch_sphere(rng)).expect("on the sphere")
}

/// Haar unitary from the QR decomposition of a Ginibre matrix, with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(dim, rng).inner().clone().qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_inner(q)
}

fn simplex_weights<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Random qubit measurement with diagonal effects.
pub fn sample_free_povm(cfg: &SamplerConfig) -> Result<Povm> {
    let mut rng = cfg.rng(Domain::Cnm);
    sample_free_with(cfg.n.max(1), &mut rng)
}

fn sample_free_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Povm> {
    let top = simplex_weights(n, rng);
    let bottom = simplex_weights(n, rng);
    validate_povm_with_tolerance(
        top.iter()
            .zip(&bottom)
            .map(|(&p, &q)| ComplexMatrix::from_real_diagonal(&[p, q]))
            .collect(),
        SAMPLED_POVM_TOL,
    )
}

/// Random qubit CNM, drawn evenly from three families: diagonal effects,
/// rank-one equatorial effects in antipodal pairs, and the trine family
/// with a random equatorial rotation.
pub fn sample_qubit_cnm(cfg: &SamplerConfig) -> Result<Povm> {
    let mut rng = cfg.rng(Domain::Cnm);
    let outcomes = cfg.n.max(2);
    match rng.random_range(0..3u8) {
        0 => sample_free_with(outcomes, &mut rng),
        1 => {
            let pairs = outcomes.div_ceil(2);
            let weights = simplex_weights(pairs, &mut rng);
            let mut a = Vec::with_capacity(2 * pairs);
            let mut dirs = Vec::with_capacity(2 * pairs);
            for w in weights {
                let phi = rng.random_range(0.0..std::f64::consts::TAU);
                let (s, c) = phi.sin_cos();
                a.extend([w / 2.0, w / 2.0]);
                dirs.extend([[c, s, 0.0], [-c, -s, 0.0]]);
            }
            n_outcome_povm(&NOutcomeParams::new(a, dirs)?)
        }
        _ => {
            let t = rng.random_range(0.05..0.95);
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            let phase = C64::from_polar(1.0, phi);
            let rot = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
                (0, 0) => c64(1.0, 0.0),
                (1, 1) => phase,
                _ => c64(0.0, 0.0),
            });
            let effects = trine_cnm_povm(t)?.effects().iter().map(|e| rot.sandwich(e)).collect();
            validate_povm_with_tolerance(effects, SAMPLED_POVM_TOL)
        }
    }
}
