use rayon::prelude::*;

use super::{argmax, fmt_sig, CsvRow};
use crate::coherence::c_l1;
use crate::measurement::{luders_apply, two_outcome_povm};
use crate::random::{sample_two_outcome_params, SamplerConfig};
use crate::state::{to_bloch, BlochVector, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessiveRow {
    pub step: usize,
    pub c_l1: f64,
    /// Sample that produced the carried state, `None` when no sample beat
    /// keeping the current state.
    pub best_index: Option<u64>,
    pub r: BlochVector,
}

impl CsvRow for SuccessiveRow {
    fn header() -> &'static [&'static str] {
        &["step", "c_l1", "best_index", "r1", "r2", "r3"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.step.to_string(),
            fmt_sig(self.c_l1),
            self.best_index.map_or_else(String::new, |k| k.to_string()),
            fmt_sig(self.r.r1),
            fmt_sig(self.r.r2),
            fmt_sig(self.r.r3),
        ]
    }
}

/// Greedy chain of two-outcome measurements starting from `|0><0|`.
///
/// At each step `samples_per_step` fresh random measurements are applied to
/// the carried state and the output with the largest l1 coherence is kept.
/// The trivial measurement is always a candidate, so the sequence never
/// decreases. Row 0 is the initial state.
pub fn fig4_successive(steps: usize, samples_per_step: u64, master_seed: u64) -> Vec<SuccessiveRow> {
    let cfg = SamplerConfig::new(2, master_seed);
    let mut state = DensityMatrix::basis(2, 0);
    let mut rows = vec![SuccessiveRow {
        step: 0,
        c_l1: c_l1(&state),
        best_index: None,
        r: to_bloch(&state).expect("qubit"),
    }];
    for step in 1..=steps {
        let outputs: Vec<(DensityMatrix, f64)> = (0..samples_per_step)
            .into_par_iter()
            .map(|k| {
                let p = sample_two_outcome_params(&cfg.at(((step as u64) << 32) | k));
                let out = luders_apply(&two_outcome_povm(&p), &state).expect("qubit");
                let c = c_l1(&out);
                (out, c)
            })
            .collect();
        let current = c_l1(&state);
        let values: Vec<f64> = outputs.iter().map(|o| o.1).collect();
        let best_index = match argmax(&values) {
            Some((k, v)) if v > current => {
                state = outputs[k].0.clone();
                Some(k as u64)
            }
            _ => None,
        };
        rows.push(SuccessiveRow {
            step,
            c_l1: c_l1(&state),
            best_index,
            r: to_bloch(&state).expect("qubit"),
        });
    }
    rows
}
