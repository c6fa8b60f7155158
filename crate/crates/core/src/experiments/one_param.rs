use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use rayon::prelude::*;

use super::{argmax, fmt_sig, CsvRow, NUMERIC_SLACK};
use crate::coherence::c_l1;
use crate::error::{Error, Result};
use crate::linalg::{c64, C64};
use crate::measurement::{coherent_state_bloch, one_param_apply_closed, one_param_coherence, OneParamPovmParams};
use crate::optimize::{golden_max, nelder_mead, NelderMeadOptions};
use crate::random::{sample_bloch_ball, substream, Domain};
use crate::state::{to_bloch, BlochVector, DensityMatrix};

/// Improvements smaller than this do not move an argmax, which keeps the
/// earliest (sharpest) grid point on flat optima.
const TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig1Row {
    pub lambda: f64,
    pub alpha_abs: f64,
    pub c_final: f64,
}

impl CsvRow for Fig1Row {
    fn header() -> &'static [&'static str] {
        &["lambda", "alpha_abs", "c_final"]
    }

    fn fields(&self) -> Vec<String> {
        vec![fmt_sig(self.lambda), fmt_sig(self.alpha_abs), fmt_sig(self.c_final)]
    }
}

fn delta0_coherence(alpha_abs: f64, lambda: f64) -> Result<f64> {
    let p = OneParamPovmParams::new(c64(alpha_abs, 0.0), lambda)?;
    Ok(c_l1(&one_param_apply_closed(&p, &DensityMatrix::basis(2, 0))?))
}

/// l1 coherence of `|0><0|` after the one-parameter measurement, for every
/// `(λ, |α|)` pair, grouped by `λ`.
pub fn fig1_curve(alphas: &[f64], lambdas: &[f64]) -> Result<Vec<Fig1Row>> {
    let mut rows = Vec::with_capacity(alphas.len() * lambdas.len());
    for &lambda in lambdas {
        for &alpha_abs in alphas {
            rows.push(Fig1Row {
                lambda,
                alpha_abs,
                c_final: delta0_coherence(alpha_abs, lambda)?,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub alpha_abs: f64,
    pub value: f64,
}

/// The two maxima of the projective (`λ = 1`) curve from `|0><0|`, one on
/// each side of `|α| = 1/√2`, located on a uniform grid of `points` values of
/// `|α| ∈ [0, 1]` and polished by golden-section search between the grid
/// neighbours.
pub fn projective_peaks(points: usize) -> Result<[Peak; 2]> {
    if points < 3 {
        return Err(Error::InvalidParams(format!("need at least 3 grid points, got {points}")));
    }
    let step = 1.0 / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|k| k as f64 * step).collect();
    let values = grid
        .iter()
        .map(|&a| delta0_coherence(a, 1.0))
        .collect::<Result<Vec<_>>>()?;
    let split = grid.partition_point(|&a| a < FRAC_1_SQRT_2);
    let curve = |a: f64| delta0_coherence(a, 1.0).unwrap_or(f64::NEG_INFINITY);
    let polish = |offset: usize, range: &[f64]| {
        let (k, _) = argmax(range).expect("non-empty half");
        let k = k + offset;
        let lo = grid[k.saturating_sub(1)];
        let hi = grid[(k + 1).min(points - 1)];
        let (alpha_abs, value) = golden_max(curve, lo, hi, 1e-12);
        Peak { alpha_abs, value }
    };
    Ok([polish(0, &values[..split]), polish(split, &values[split..])])
}

/// Analytic optimum `½(C + √(C² + r₃²))` with `C = √(r₁² + r₂²)`.
pub fn one_param_closed_max(r: BlochVector) -> f64 {
    let c = r.r1.hypot(r.r2);
    0.5 * (c + c.hypot(r.r3))
}

/// Grid for [`maximize_one_param_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneParamSearch {
    /// Points on `|α| ∈ [0, 1]`, endpoints included.
    pub alpha_steps: usize,
    /// Points on `arg α ∈ [0, 2π)`.
    pub phase_steps: usize,
    /// Points on `λ ∈ [0, 1]`, endpoints included.
    pub lambda_steps: usize,
    pub refine: bool,
}

impl OneParamSearch {
    pub fn full() -> Self {
        Self {
            alpha_steps: 400,
            phase_steps: 90,
            lambda_steps: 100,
            refine: true,
        }
    }

    /// Cheaper grid for large scans; the refinement pass carries the accuracy.
    pub fn coarse() -> Self {
        Self {
            alpha_steps: 48,
            phase_steps: 24,
            lambda_steps: 6,
            refine: true,
        }
    }
}

impl Default for OneParamSearch {
    fn default() -> Self {
        Self::full()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneParamMax {
    pub c_max: f64,
    pub alpha: C64,
    pub lambda: f64,
}

/// [`maximize_one_param_with`] on the full grid.
pub fn maximize_one_param(rho: &DensityMatrix) -> Result<OneParamMax> {
    maximize_one_param_with(rho, OneParamSearch::full())
}

/// Largest l1 coherence reachable from `ρ` with one one-parameter
/// measurement, by grid search over `(|α|, arg α, λ)` and a Nelder-Mead pass.
pub fn maximize_one_param_with(rho: &DensityMatrix, search: OneParamSearch) -> Result<OneParamMax> {
    let r = to_bloch(rho)?;
    let coherence = |a: f64, phase: f64, lambda: f64| {
        let p = OneParamPovmParams::new(C64::from_polar(a.clamp(0.0, 1.0), phase), lambda.clamp(0.0, 1.0))
            .expect("clamped into the parameter domain");
        one_param_coherence(&p, r)
    };
    let span = |steps: usize| (steps.max(2) - 1) as f64;
    let (na, np, nl) = (search.alpha_steps.max(2), search.phase_steps.max(1), search.lambda_steps.max(2));
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0, 1.0);
    let mut sharp = best;
    // Each grid basis contributes (r·n) times the transverse part of n; the
    // channel output is (1 - w) r + w (r·n) n for projective weight w.
    let transverse = r.transverse();
    let directions: Vec<(f64, f64, C64)> = (0..na)
        .flat_map(|i| (0..np).map(move |j| (i, j)))
        .map(|(i, j)| {
            let (a, phase) = (i as f64 / span(na), TAU * j as f64 / np as f64);
            let n = coherent_state_bloch(C64::from_polar(a, phase));
            (a, phase, n.transverse() * r.dot(n))
        })
        .collect();
    // λ runs downward so that flat optima keep the sharpest measurement
    for l in (0..nl).rev() {
        let lambda = l as f64 / span(nl);
        let w = 1.0 - (1.0 - lambda * lambda).sqrt();
        for &(a, phase, projected) in &directions {
            let v = ((1.0 - w) * transverse + w * projected).norm();
            if v > best.0 + TIE {
                best = (v, a, phase, lambda);
            }
        }
        if l == nl - 1 {
            sharp = best;
        }
    }
    // The output Bloch vector is affine in the projective weight and the
    // coherence is convex in it, so optima sit at λ = 1 or at the trivial
    // λ = 0 (which gives C_l1(ρ) for every α). Refining the sharp slice is enough.
    if search.refine {
        let m = nelder_mead(
            |x| -coherence(x[0], x[1], 1.0),
            &[sharp.1, sharp.2],
            &[1.0 / span(na), TAU / np as f64],
            NelderMeadOptions {
                max_evals: 600,
                ..Default::default()
            },
        );
        if -m.value > best.0 + TIE {
            best = (-m.value, m.x[0].clamp(0.0, 1.0), m.x[1].rem_euclid(TAU), 1.0);
        }
    }
    Ok(OneParamMax {
        c_max: best.0,
        alpha: C64::from_polar(best.1, best.2),
        lambda: best.3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterRow {
    pub index: u64,
    pub r: BlochVector,
    pub c_initial: f64,
    pub c_max: f64,
    pub c_closed: f64,
    pub alpha_abs: f64,
    pub alpha_phase: f64,
    pub lambda: f64,
}

impl ScatterRow {
    /// `x ≤ y ≤ (x + 1)/2` up to `slack`.
    pub fn within_envelope(&self, slack: f64) -> bool {
        self.c_max >= self.c_initial - slack && self.c_max <= 0.5 * (self.c_initial + 1.0) + slack
    }
}

impl CsvRow for ScatterRow {
    fn header() -> &'static [&'static str] {
        &[
            "index", "r1", "r2", "r3", "c_initial", "c_max", "c_closed", "alpha_abs", "alpha_phase", "lambda",
            "within_envelope",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.index.to_string(),
            fmt_sig(self.r.r1),
            fmt_sig(self.r.r2),
            fmt_sig(self.r.r3),
            fmt_sig(self.c_initial),
            fmt_sig(self.c_max),
            fmt_sig(self.c_closed),
            fmt_sig(self.alpha_abs),
            fmt_sig(self.alpha_phase),
            fmt_sig(self.lambda),
            self.within_envelope(NUMERIC_SLACK).to_string(),
        ]
    }
}

/// Optimized one-parameter coherence for `n_states` states drawn uniformly
/// from the Bloch ball.
pub fn fig2_scatter(n_states: u64, master_seed: u64, search: OneParamSearch) -> Vec<ScatterRow> {
    (0..n_states)
        .into_par_iter()
        .map(|index| {
            let r = sample_bloch_ball(&mut substream(master_seed, Domain::State, index));
            let rho = crate::state::from_bloch(r).expect("inside the ball");
            let best = maximize_one_param_with(&rho, search).expect("qubit state");
            ScatterRow {
                index,
                r,
                c_initial: c_l1(&rho),
                c_max: best.c_max,
                c_closed: one_param_closed_max(r),
                alpha_abs: best.alpha.norm(),
                alpha_phase: best.alpha.arg().rem_euclid(TAU),
                lambda: best.lambda,
            }
        })
        .collect()
}
