//! Parametric qubit measurement families and their closed-form Bloch evolutions.

use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix, C64};
use crate::state::{bloch_of, BlochVector, DensityMatrix};

use super::povm::{validate_povm, Povm};

/// Slack on parameter-domain checks (unit disc, unit interval, ball radius).
const PARAM_TOL: f64 = 1e-12;

/// Below this `|a|` the two-outcome closed form is singular.
pub const DEGENERATE_DIRECTION: f64 = 1e-9;

const SUM_TOL: f64 = 1e-9;

/// `a0 I + a·σ` for real `a0` and Bloch-like `a`.
pub(crate) fn bloch_operator(a0: f64, a: [f64; 3]) -> ComplexMatrix {
    ComplexMatrix::from_row_major(
        2,
        &[
            c64(a0 + a[2], 0.0),
            c64(a[0], -a[1]),
            c64(a[0], a[1]),
            c64(a0 - a[2], 0.0),
        ],
    )
    .expect("2x2")
}

fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// `|ψ> = α|0> + √(1-|α|²)|1>`.
pub fn coherent_state(alpha: C64) -> [C64; 2] {
    [alpha, c64((1.0 - alpha.norm_sqr()).max(0.0).sqrt(), 0.0)]
}

/// `|ψ̃> = √(1-|α|²)|0> - α*|1>`, orthogonal to [`coherent_state`].
pub fn coherent_state_complement(alpha: C64) -> [C64; 2] {
    [c64((1.0 - alpha.norm_sqr()).max(0.0).sqrt(), 0.0), -alpha.conj()]
}

/// Bloch direction of [`coherent_state`].
pub fn coherent_state_bloch(alpha: C64) -> BlochVector {
    let rest = (1.0 - alpha.norm_sqr()).max(0.0).sqrt();
    BlochVector::new(
        2.0 * rest * alpha.re,
        -2.0 * rest * alpha.im,
        2.0 * alpha.norm_sqr() - 1.0,
    )
}

fn check_alpha(alpha: C64) -> Result<()> {
    if !(alpha.norm() <= 1.0 + PARAM_TOL) {
        return Err(Error::InvalidParams(format!("|alpha| = {} exceeds 1", alpha.norm())));
    }
    Ok(())
}

/// Rank-one projectors onto `|ψ>` and `|ψ̃>`.
pub fn coherent_basis_projectors(alpha: C64) -> Result<Povm> {
    check_alpha(alpha)?;
    validate_povm(vec![
        ComplexMatrix::outer(&coherent_state(alpha)),
        ComplexMatrix::outer(&coherent_state_complement(alpha)),
    ])
}

/// Unsharp version of [`coherent_basis_projectors`] with sharpness `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneParamPovmParams {
    alpha: C64,
    lambda: f64,
}

impl OneParamPovmParams {
    pub fn new(alpha: C64, lambda: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(-PARAM_TOL..=1.0 + PARAM_TOL).contains(&lambda) {
            return Err(Error::InvalidParams(format!("lambda = {lambda} outside [0, 1]")));
        }
        Ok(Self {
            alpha,
            lambda: lambda.clamp(0.0, 1.0),
        })
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Weight `1 - √(1-λ²)` on the projective part of the channel.
    pub fn projective_weight(&self) -> f64 {
        1.0 - (1.0 - self.lambda * self.lambda).sqrt()
    }
}

/// `E± = λ P± + (1-λ)/2 I`.
pub fn one_param_povm(p: &OneParamPovmParams) -> Povm {
    let noise = ComplexMatrix::identity(2).scale(0.5 * (1.0 - p.lambda));
    let plus = ComplexMatrix::outer(&coherent_state(p.alpha));
    let minus = ComplexMatrix::outer(&coherent_state_complement(p.alpha));
    validate_povm(vec![
        &plus.scale(p.lambda) + &noise,
        &minus.scale(p.lambda) + &noise,
    ])
    .expect("one-parameter effects are a valid POVM for admissible parameters")
}

/// `√(1-λ²) ρ + (1-√(1-λ²)) (P+ ρ P+ + P- ρ P-)`.
pub fn one_param_apply_closed(p: &OneParamPovmParams, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            actual: rho.dim(),
        });
    }
    let w = p.projective_weight();
    let plus = ComplexMatrix::outer(&coherent_state(p.alpha));
    let minus = ComplexMatrix::outer(&coherent_state_complement(p.alpha));
    let dephased = &plus.sandwich(rho.matrix()) + &minus.sandwich(rho.matrix());
    let out = &rho.matrix().scale(1.0 - w) + &dephased.scale(w);
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// l1 coherence after the one-parameter channel, evaluated on Bloch vectors.
///
/// Dephasing in the `{|ψ>, |ψ̃>}` basis sends `r` to `(r·n) n`, so the output
/// Bloch vector is `(1-w) r + w (r·n) n` with `w` the projective weight.
pub fn one_param_coherence(p: &OneParamPovmParams, r: BlochVector) -> f64 {
    let n = coherent_state_bloch(p.alpha);
    let w = p.projective_weight();
    ((1.0 - w) * r.transverse() + w * r.dot(n) * n.transverse()).norm()
}

/// `E± = a± I ± a·σ` with `a+ + a- = 1` and `|a| ≤ min(a+, a-)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoOutcomeParams {
    a_plus: f64,
    a_vec: [f64; 3],
}

impl TwoOutcomeParams {
    pub fn new(a_plus: f64, a_vec: [f64; 3]) -> Result<Self> {
        if !(0.0..=1.0).contains(&a_plus) {
            return Err(Error::InvalidParams(format!("a+ = {a_plus} outside [0, 1]")));
        }
        let radius = a_plus.min(1.0 - a_plus);
        let len = norm3(a_vec);
        if !(len <= radius + PARAM_TOL) {
            return Err(Error::InvalidParams(format!(
                "|a| = {len} exceeds min(a+, a-) = {radius}"
            )));
        }
        Ok(Self { a_plus, a_vec })
    }

    /// The trivial measurement `{I/2, I/2}`.
    pub fn trivial() -> Self {
        Self {
            a_plus: 0.5,
            a_vec: [0.0; 3],
        }
    }

    pub fn a_plus(&self) -> f64 {
        self.a_plus
    }

    pub fn a_minus(&self) -> f64 {
        1.0 - self.a_plus
    }

    pub fn a_vec(&self) -> [f64; 3] {
        self.a_vec
    }

    pub fn a_norm(&self) -> f64 {
        norm3(self.a_vec)
    }

    fn eta(a: f64, len: f64) -> f64 {
        (a * a - len * len).max(0.0).sqrt()
    }

    pub fn eta_plus(&self) -> f64 {
        Self::eta(self.a_plus, self.a_norm())
    }

    pub fn eta_minus(&self) -> f64 {
        Self::eta(self.a_minus(), self.a_norm())
    }

    /// `β = η+ + η-`, the shrink factor applied to the input Bloch vector.
    pub fn beta(&self) -> f64 {
        self.eta_plus() + self.eta_minus()
    }

    fn transverse(&self) -> f64 {
        self.a_vec[0].hypot(self.a_vec[1])
    }
}

pub fn two_outcome_povm(p: &TwoOutcomeParams) -> Povm {
    let minus_vec = p.a_vec.map(|x| -x);
    validate_povm(vec![
        bloch_operator(p.a_plus, p.a_vec),
        bloch_operator(p.a_minus(), minus_vec),
    ])
    .expect("admissible two-outcome parameters give a valid POVM")
}

/// Selective-branch Bloch vectors `s± = θ± a ± β r`, `θ± = (a·r/|a|²)(±1 ∓ β)`.
///
/// `s+` is also the Bloch vector of the non-selective output; `s- = -s+`.
pub fn two_outcome_bloch_closed(p: &TwoOutcomeParams, r: BlochVector) -> Result<(BlochVector, BlochVector)> {
    let len = p.a_norm();
    if len <= DEGENERATE_DIRECTION {
        return Err(Error::DegenerateDirection(len));
    }
    let a = BlochVector::from_array(p.a_vec);
    let beta = p.beta();
    let k = a.dot(r) / (len * len);
    let theta_plus = k * (1.0 - beta);
    let theta_minus = k * (-1.0 + beta);
    Ok((
        a.scaled(theta_plus).plus(r.scaled(beta)),
        a.scaled(theta_minus).plus(r.scaled(-beta)),
    ))
}

/// `|θ+ (a1 + i a2) + β R|`.
pub fn two_outcome_coherence_closed(p: &TwoOutcomeParams, r: BlochVector) -> Result<f64> {
    let (s_plus, _) = two_outcome_bloch_closed(p, r)?;
    Ok(s_plus.transverse().norm())
}

/// Coherence produced from `|0><0|`: `(|a3| / |a|²) |1 - β| √(a1² + a2²)`.
///
/// Tends to zero as `|a| → 0` and is reported as zero below the degeneracy threshold.
pub fn two_outcome_delta0_coherence(p: &TwoOutcomeParams) -> f64 {
    let len = p.a_norm();
    if len <= DEGENERATE_DIRECTION {
        return 0.0;
    }
    p.a_vec[2].abs() / (len * len) * (1.0 - p.beta()).abs() * p.transverse()
}

/// Upper bound `(|a3| √(a1²+a2²) / |a|²)(1 - √(1 - 2|a|))` on [`two_outcome_delta0_coherence`].
///
/// Uses `β ≥ √(1 - 2|a|)`, the value of the concave `β(a+)` at the domain
/// endpoint `a+ = |a|`. Never exceeds 1/2.
pub fn two_outcome_delta0_bound(p: &TwoOutcomeParams) -> f64 {
    let len = p.a_norm();
    if len <= DEGENERATE_DIRECTION {
        return 0.0;
    }
    p.a_vec[2].abs() * p.transverse() / (len * len) * (1.0 - (1.0 - 2.0 * len).max(0.0).sqrt())
}

/// `E_i = a_i (I + s_i·σ)` with `Σ a_i = 1` and `Σ a_i s_i = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NOutcomeParams {
    weights: Vec<f64>,
    directions: Vec<[f64; 3]>,
}

impl NOutcomeParams {
    pub fn new(weights: Vec<f64>, directions: Vec<[f64; 3]>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty("n-outcome POVM needs at least one weight"));
        }
        if weights.len() != directions.len() {
            return Err(Error::InvalidParams(format!(
                "{} weights but {} directions",
                weights.len(),
                directions.len()
            )));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, &w)| !(w >= 0.0)) {
            return Err(Error::InvalidParams(format!("weight a_{i} = {w} is negative")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidParams(format!("weights sum to {total}, not 1")));
        }
        if let Some((i, s)) = directions
            .iter()
            .enumerate()
            .find(|(_, s)| !(norm3(**s) <= 1.0 + PARAM_TOL))
        {
            return Err(Error::InvalidParams(format!(
                "direction s_{i} has length {} > 1",
                norm3(*s)
            )));
        }
        let mut centroid = [0.0; 3];
        for (w, s) in weights.iter().zip(&directions) {
            for k in 0..3 {
                centroid[k] += w * s[k];
            }
        }
        if norm3(centroid) > SUM_TOL {
            return Err(Error::InvalidParams(format!(
                "weighted directions sum to {centroid:?}, not 0"
            )));
        }
        Ok(Self { weights, directions })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn directions(&self) -> &[[f64; 3]] {
        &self.directions
    }
}

pub fn n_outcome_povm(p: &NOutcomeParams) -> Result<Povm> {
    validate_povm(
        p.weights
            .iter()
            .zip(&p.directions)
            .map(|(&a, s)| bloch_operator(a, s.map(|x| a * x)))
            .collect(),
    )
}

/// Three-outcome POVM with raw quantumness that still maps incoherent states
/// to incoherent states, for `t ∈ (0, 1)`.
pub fn trine_cnm_povm(t: f64) -> Result<Povm> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParams(format!("t = {t} outside (0, 1)")));
    }
    let b = t / (3.0 - t);
    let side = (1.0 - b * b).sqrt();
    let a1 = t / 3.0;
    let a23 = 0.5 * (1.0 - t / 3.0);
    n_outcome_povm(&NOutcomeParams::new(
        vec![a1, a23, a23],
        vec![[1.0, 0.0, 0.0], [-b, side, 0.0], [-b, -side, 0.0]],
    )?)
}

/// Bloch decomposition `(a0, a)` of a 2x2 Hermitian effect `a0 I + a·σ`.
pub fn effect_bloch(e: &ComplexMatrix) -> (f64, BlochVector) {
    let r = bloch_of(e);
    (0.5 * e.trace().re, r.scaled(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::c_l1;
    use crate::linalg::herm_eig;
    use crate::measurement::{is_cnm_qubit, luders_apply};
    use crate::state::{from_bloch, to_bloch};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn delta0() -> DensityMatrix {
        DensityMatrix::basis(2, 0)
    }

    /// `2|α|√(1-|α|²)|2|α|²-1|`.
    fn projective_curve(abs_alpha: f64) -> f64 {
        2.0 * abs_alpha * (1.0 - abs_alpha * abs_alpha).sqrt() * (2.0 * abs_alpha * abs_alpha - 1.0).abs()
    }

    #[test]
    fn projector_reductions() {
        let comp = coherent_basis_projectors(c64(1.0, 0.0)).unwrap();
        assert!(comp.effects()[0].max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-15);
        assert!(comp.effects()[1].max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0])) < 1e-15);

        let pm = coherent_basis_projectors(c64(FRAC_1_SQRT_2, 0.0)).unwrap();
        let plus = ComplexMatrix::identity(2).scale(0.5);
        let x = ComplexMatrix::pauli_x().scale(0.5);
        assert!(pm.effects()[0].max_abs_diff(&(&plus + &x)) < 1e-15);
        assert!(pm.effects()[1].max_abs_diff(&(&plus - &x)) < 1e-15);
        assert!(coherent_basis_projectors(c64(1.0, 0.1)).is_err());
    }

    #[test]
    fn projective_measurement_creates_coherence_from_incoherent_state() {
        for abs_alpha in [0.1, 0.384, 0.5, 0.7, 0.924] {
            let alpha = C64::from_polar(abs_alpha, 0.7);
            let out = luders_apply(&coherent_basis_projectors(alpha).unwrap(), &delta0()).unwrap();
            let err = (c_l1(&out) - projective_curve(abs_alpha)).abs();
            assert!(err < 1e-12, "{abs_alpha}: {err:e}");
        }
    }

    #[test]
    fn one_param_reductions() {
        let alpha = c64(0.3, -0.4);
        let sharp = one_param_povm(&OneParamPovmParams::new(alpha, 1.0).unwrap());
        let proj = coherent_basis_projectors(alpha).unwrap();
        for (a, b) in sharp.effects().iter().zip(proj.effects()) {
            assert!(a.max_abs_diff(b) < 1e-15);
        }
        let blunt = one_param_povm(&OneParamPovmParams::new(alpha, 0.0).unwrap());
        for e in blunt.effects() {
            assert!(e.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
        }
        assert!(OneParamPovmParams::new(alpha, 1.5).is_err());
    }

    #[test]
    fn one_param_closed_form_examples() {
        let rho = from_bloch(BlochVector::new(0.1, 0.2, 0.3)).unwrap();
        let p = OneParamPovmParams::new(c64(0.6, 0.2), 0.0).unwrap();
        assert!(one_param_apply_closed(&p, &rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);

        let alpha = c64(0.384, 0.0);
        let projective = c_l1(&luders_apply(&coherent_basis_projectors(alpha).unwrap(), &delta0()).unwrap());
        let sharp = OneParamPovmParams::new(alpha, 1.0).unwrap();
        let out = one_param_apply_closed(&sharp, &delta0()).unwrap();
        assert!((c_l1(&out) - projective_curve(0.384)).abs() < 1e-12);
        for lambda in [0.1, 0.5, 0.9] {
            let p = OneParamPovmParams::new(alpha, lambda).unwrap();
            let c = c_l1(&one_param_apply_closed(&p, &delta0()).unwrap());
            let scale = 1.0 - (1.0 - lambda * lambda).sqrt();
            assert!((c - scale * projective).abs() < 1e-12);
        }
        assert!(one_param_apply_closed(&sharp, &DensityMatrix::maximally_mixed(4)).is_err());
    }

    #[test]
    fn two_outcome_reductions() {
        let trivial = two_outcome_povm(&TwoOutcomeParams::trivial());
        for e in trivial.effects() {
            assert!(e.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
        }
        let proj = two_outcome_povm(&TwoOutcomeParams::new(0.5, [0.0, 0.0, 0.5]).unwrap());
        assert!(proj.effects()[0].max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-15);
        assert!(proj.effects()[1].max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0])) < 1e-15);
        assert!(matches!(
            TwoOutcomeParams::new(0.3, [0.0, 0.0, 0.31]),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            two_outcome_bloch_closed(&TwoOutcomeParams::trivial(), BlochVector::new(0.0, 0.0, 1.0)),
            Err(Error::DegenerateDirection(_))
        ));
    }

    #[test]
    fn diagonal_two_outcome_shrinks_coherence() {
        let p = TwoOutcomeParams::new(0.4, [0.0, 0.0, 0.25]).unwrap();
        let r = BlochVector::new(0.5, -0.3, 0.6);
        let c = two_outcome_coherence_closed(&p, r).unwrap();
        assert!((c - p.beta() * r.transverse().norm()).abs() < 1e-15);
        assert!(c <= r.transverse().norm());
    }

    #[test]
    fn delta0_coherence_formula_matches_channel() {
        let p = TwoOutcomeParams::new(0.45, [0.1, -0.2, 0.3]).unwrap();
        let out = luders_apply(&two_outcome_povm(&p), &delta0()).unwrap();
        assert!((c_l1(&out) - two_outcome_delta0_coherence(&p)).abs() < 1e-12);
    }

    #[test]
    fn delta0_third_component_follows_general_form() {
        // s3 = (a3² + (|a|² - a3²) β) / |a|², the specialization of s+ to r = z
        let p = TwoOutcomeParams::new(0.45, [0.1, -0.2, 0.3]).unwrap();
        let out = to_bloch(&luders_apply(&two_outcome_povm(&p), &delta0()).unwrap()).unwrap();
        let (a3, len2, beta) = (0.3, p.a_norm().powi(2), p.beta());
        let general = (a3 * a3 + (len2 - a3 * a3) * beta) / len2;
        assert!((out.r3 - general).abs() < 1e-12);
        // the variant with (1 - a3²) in place of (|a|² - a3²) does not describe the channel
        let variant = (a3 * a3 + (1.0 - a3 * a3) * beta) / len2;
        assert!((out.r3 - variant).abs() > 0.1);
    }

    #[test]
    fn near_projective_closed_form_matches_channel() {
        let p = TwoOutcomeParams::new(0.5, [0.0, 0.0, 0.49]).unwrap();
        let povm = two_outcome_povm(&p);
        for k in 0..100 {
            let t = k as f64 * 0.37;
            let r = BlochVector::new(0.6 * t.cos(), 0.6 * t.sin(), 0.7 * (1.3 * t).cos());
            let rho = from_bloch(r).unwrap();
            let channel = to_bloch(&luders_apply(&povm, &rho).unwrap()).unwrap();
            let (s_plus, s_minus) = two_outcome_bloch_closed(&p, r).unwrap();
            for (x, y) in channel.to_array().iter().zip(s_plus.to_array()) {
                assert!((x - y).abs() < 1e-8);
            }
            assert_eq!(s_minus, s_plus.scaled(-1.0));
        }
    }

    #[test]
    fn n_outcome_reductions() {
        let single = n_outcome_povm(&NOutcomeParams::new(vec![1.0], vec![[0.0; 3]]).unwrap()).unwrap();
        assert!(single.effects()[0].max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(NOutcomeParams::new(vec![1.0], vec![[0.0, 0.0, 0.5]]).is_err());

        // two outcomes with a = a1 s1 reproduce the two-outcome family
        let s1 = [0.2, 0.4, -0.1];
        let a1 = 0.6;
        let s2 = s1.map(|x| -a1 * x / (1.0 - a1));
        let two = n_outcome_povm(&NOutcomeParams::new(vec![a1, 1.0 - a1], vec![s1, s2]).unwrap()).unwrap();
        let direct = two_outcome_povm(&TwoOutcomeParams::new(a1, s1.map(|x| a1 * x)).unwrap());
        for (a, b) in two.effects().iter().zip(direct.effects()) {
            assert!(a.max_abs_diff(b) < 1e-15);
        }
    }

    #[test]
    fn n_outcome_errors_name_the_constraint() {
        let msg = |r: Result<NOutcomeParams>| match r {
            Err(Error::InvalidParams(m)) => m,
            other => panic!("{other:?}"),
        };
        assert!(msg(NOutcomeParams::new(vec![0.5, 0.4], vec![[0.0; 3]; 2])).contains("sum to"));
        assert!(msg(NOutcomeParams::new(vec![1.2, -0.2], vec![[0.0; 3]; 2])).contains("negative"));
        assert!(msg(NOutcomeParams::new(vec![0.5, 0.5], vec![[1.5, 0.0, 0.0], [-1.5, 0.0, 0.0]])).contains("length"));
        assert!(msg(NOutcomeParams::new(vec![0.5, 0.5], vec![[0.5, 0.0, 0.0], [0.5, 0.0, 0.0]])).contains("weighted"));
    }

    #[test]
    fn trine_is_cnm_with_raw_quantumness() {
        for t in [0.1, 0.5, 0.9] {
            let povm = trine_cnm_povm(t).unwrap();
            let sum = povm.effects().iter().fold(ComplexMatrix::zeros(2), |acc, e| &acc + e);
            assert!(sum.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-10);
            assert!(c_l1(&luders_apply(&povm, &delta0()).unwrap()) <= 1e-9);
            assert!(povm
                .effects()
                .iter()
                .any(|e| crate::coherence::raw_quantumness_element(e) > 0.0));
            assert!(is_cnm_qubit(&povm, 1e-9).unwrap());
        }
        assert!(trine_cnm_povm(0.0).is_err());
        assert!(trine_cnm_povm(1.0).is_err());
    }

    proptest! {
        #[test]
        fn one_param_spectrum(re in -0.7f64..0.7, im in -0.7f64..0.7, lambda in 0.0f64..1.0) {
            let p = OneParamPovmParams::new(c64(re, im), lambda).unwrap();
            for e in one_param_povm(&p).effects() {
                let ev = herm_eig(e).unwrap().eigenvalues;
                prop_assert!((ev[0] - (1.0 - lambda) / 2.0).abs() < 1e-12);
                prop_assert!((ev[1] - (1.0 + lambda) / 2.0).abs() < 1e-12);
            }
        }

        #[test]
        fn coherent_basis_is_orthonormal(re in -0.7f64..0.7, im in -0.7f64..0.7) {
            let a = coherent_state(c64(re, im));
            let b = coherent_state_complement(c64(re, im));
            let gram = |u: &[C64; 2], v: &[C64; 2]| u[0].conj() * v[0] + u[1].conj() * v[1];
            prop_assert!((gram(&a, &a) - 1.0).norm() < 1e-12);
            prop_assert!((gram(&b, &b) - 1.0).norm() < 1e-12);
            prop_assert!(gram(&a, &b).norm() < 1e-12);
        }

        #[test]
        fn scalar_one_param_coherence_matches_matrix(re in -0.7f64..0.7, im in -0.7f64..0.7, lambda in 0.0f64..1.0,
                                                     r1 in -0.57f64..0.57, r2 in -0.57f64..0.57, r3 in -0.57f64..0.57) {
            let p = OneParamPovmParams::new(c64(re, im), lambda).unwrap();
            let r = BlochVector::new(r1, r2, r3);
            let out = one_param_apply_closed(&p, &from_bloch(r).unwrap()).unwrap();
            prop_assert!((one_param_coherence(&p, r) - c_l1(&out)).abs() < 1e-12);
        }

        #[test]
        fn two_outcome_effect_spectrum(a_plus in 0.0f64..1.0, u in -1.0f64..1.0, v in -1.0f64..1.0, w in -1.0f64..1.0, scale in 0.0f64..1.0) {
            let dir = BlochVector::new(u, v, w);
            prop_assume!(dir.norm() > 1e-6);
            let len = scale * a_plus.min(1.0 - a_plus);
            let a = dir.scaled(len / dir.norm()).to_array();
            let p = TwoOutcomeParams::new(a_plus, a).unwrap();
            let povm = two_outcome_povm(&p);
            let ev_plus = herm_eig(&povm.effects()[0]).unwrap().eigenvalues;
            prop_assert!((ev_plus[0] - (a_plus - len)).abs() < 1e-12);
            prop_assert!((ev_plus[1] - (a_plus + len)).abs() < 1e-12);
            let (a0, bloch) = effect_bloch(&povm.effects()[0]);
            prop_assert!((a0 - a_plus).abs() < 1e-15);
            prop_assert!((bloch.norm() - len).abs() < 1e-12);
        }
    }
}
