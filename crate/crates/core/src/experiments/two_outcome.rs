use rayon::prelude::*;

use super::{argmax, fmt_sig, CsvRow, NUMERIC_SLACK};
use crate::coherence::c_l1;
use crate::error::Result;
use crate::measurement::{luders_apply, two_outcome_povm, TwoOutcomeParams};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::random::{sample_bloch_ball, sample_two_outcome_params, substream, Domain, SamplerConfig};
use crate::state::{from_bloch, to_bloch, BlochVector, DensityMatrix};

use super::one_param::one_param_closed_max;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoOutcomeMax {
    pub c_max: f64,
    pub params: TwoOutcomeParams,
    /// Best sampled value before refinement.
    pub c_sampled: f64,
}

fn coherence_after(p: &TwoOutcomeParams, rho: &DensityMatrix) -> f64 {
    c_l1(&luders_apply(&two_outcome_povm(p), rho).expect("qubit state and qubit POVM"))
}

/// Maps unconstrained coordinates onto the admissible set: `a₊` clamped to
/// `[0, 1]` and `a⃗ = min(a₊, a₋) v` with `v` pulled back into the unit ball.
fn feasible(x: &[f64]) -> TwoOutcomeParams {
    let a_plus = x[0].clamp(0.0, 1.0);
    let radius = a_plus.min(1.0 - a_plus);
    let v = [x[1], x[2], x[3]];
    let len = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    let shrink = if len > 1.0 { radius / len } else { radius };
    TwoOutcomeParams::new(a_plus, v.map(|c| c * shrink)).expect("feasible by construction")
}

/// Largest l1 coherence of `ρ` after a two-outcome measurement: the best of
/// `samples` random parameter sets and the trivial measurement, followed by
/// a Nelder-Mead pass over the admissible set.
pub fn maximize_two_outcome(rho: &DensityMatrix, samples: u64, master_seed: u64) -> Result<TwoOutcomeMax> {
    to_bloch(rho)?;
    let cfg = SamplerConfig::new(2, master_seed);
    let candidates: Vec<TwoOutcomeParams> = std::iter::once(TwoOutcomeParams::trivial())
        .chain((0..samples).map(|k| sample_two_outcome_params(&cfg.at(k))))
        .collect();
    let values: Vec<f64> = candidates.par_iter().map(|p| coherence_after(p, rho)).collect();
    let (k, c_sampled) = argmax(&values).expect("the trivial candidate is always present");
    let start = candidates[k];
    let radius = start.a_plus().min(start.a_minus());
    let v = if radius > 0.0 {
        start.a_vec().map(|c| c / radius)
    } else {
        [0.0; 3]
    };
    let m = nelder_mead(
        |x| -coherence_after(&feasible(x), rho),
        &[start.a_plus(), v[0], v[1], v[2]],
        &[0.05, 0.1, 0.1, 0.1],
        NelderMeadOptions {
            max_evals: 800,
            ..Default::default()
        },
    );
    let (c_max, params) = if -m.value > c_sampled {
        (-m.value, feasible(&m.x))
    } else {
        (c_sampled, start)
    };
    Ok(TwoOutcomeMax {
        c_max,
        params,
        c_sampled,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoOutcomeScatterRow {
    pub index: u64,
    pub r: BlochVector,
    pub c_initial: f64,
    pub c_max: f64,
    /// Optimum over the one-parameter family, for comparison.
    pub c_one_param: f64,
    pub a_plus: f64,
    pub a_vec: [f64; 3],
}

impl TwoOutcomeScatterRow {
    pub fn within_envelope(&self, slack: f64) -> bool {
        self.c_max >= self.c_initial - slack && self.c_max <= 0.5 * (self.c_initial + 1.0) + slack
    }
}

impl CsvRow for TwoOutcomeScatterRow {
    fn header() -> &'static [&'static str] {
        &[
            "index", "r1", "r2", "r3", "c_initial", "c_max", "c_one_param", "a_plus", "a1", "a2", "a3",
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
            fmt_sig(self.c_one_param),
            fmt_sig(self.a_plus),
            fmt_sig(self.a_vec[0]),
            fmt_sig(self.a_vec[1]),
            fmt_sig(self.a_vec[2]),
            self.within_envelope(NUMERIC_SLACK).to_string(),
        ]
    }
}

/// [`maximize_two_outcome`] on `n_states` states uniform in the Bloch ball.
pub fn two_outcome_scatter(n_states: u64, samples: u64, master_seed: u64) -> Vec<TwoOutcomeScatterRow> {
    (0..n_states)
        .into_par_iter()
        .map(|index| {
            let r = sample_bloch_ball(&mut substream(master_seed, Domain::State, index));
            let rho = from_bloch(r).expect("inside the ball");
            let best = maximize_two_outcome(&rho, samples, master_seed).expect("qubit state");
            TwoOutcomeScatterRow {
                index,
                r,
                c_initial: c_l1(&rho),
                c_max: best.c_max,
                c_one_param: one_param_closed_max(r),
                a_plus: best.params.a_plus(),
                a_vec: best.params.a_vec(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incoherent_states_reach_half_of_r3() {
        for r3 in [1.0, -0.6, 0.2] {
            let rho = from_bloch(BlochVector::new(0.0, 0.0, r3)).unwrap();
            let best = maximize_two_outcome(&rho, 2000, 1).unwrap();
            assert!(best.c_max <= r3.abs() / 2.0 + 1e-9);
            assert!((best.c_max - r3.abs() / 2.0).abs() < 5e-3, "{r3}: {best:?}");
        }
    }

    #[test]
    fn never_below_the_trivial_measurement() {
        let rho = from_bloch(BlochVector::new(0.4, 0.3, 0.0)).unwrap();
        let best = maximize_two_outcome(&rho, 10, 2).unwrap();
        assert!(best.c_max >= c_l1(&rho) - 1e-12);
    }

    #[test]
    fn feasible_map_stays_admissible() {
        for x in [[-1.0, 5.0, 0.0, 0.0], [0.3, 0.1, -0.2, 0.3], [2.0, 0.0, 0.0, 0.0], [0.5, 3.0, 4.0, 0.0]] {
            let p = feasible(&x);
            assert!(p.a_norm() <= p.a_plus().min(p.a_minus()) + 1e-12);
        }
    }

    #[test]
    fn scatter_stays_in_envelope() {
        let rows = two_outcome_scatter(20, 300, 4);
        assert!(rows.iter().all(|r| r.within_envelope(NUMERIC_SLACK)), "{rows:?}");
        assert_eq!(rows, two_outcome_scatter(20, 300, 4));
    }
}
