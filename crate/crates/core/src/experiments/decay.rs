use rayon::prelude::*;

use super::{argmax, fmt_sig, CsvRow};
use crate::coherence::c_l1;
use crate::error::{Error, Result};
use crate::measurement::luders_apply;
use crate::random::{sample_povm, SamplerConfig};
use crate::state::DensityMatrix;

/// `value ≈ amplitude · exp(-rate · n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFit {
    pub amplitude: f64,
    pub rate: f64,
    /// RMS of the residuals of `ln value`.
    pub residual: f64,
}

/// Least-squares line through `(n, ln value)`.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<ExpFit> {
    if points.len() < 2 {
        return Err(Error::Empty("need at least two points to fit"));
    }
    if let Some(&(n, value)) = points.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::NonPositiveValue { n, value });
    }
    let len = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_y = points.iter().map(|p| p.1.ln()).sum::<f64>() / len;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParams("all abscissae coincide".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1.ln() - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual = (points
        .iter()
        .map(|p| (p.1.ln() - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / len)
        .sqrt();
    Ok(ExpFit {
        amplitude: intercept.exp(),
        rate: -slope,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow {
    pub n: usize,
    pub c_max: f64,
    pub argmax_index: u64,
    pub samples: u64,
}

impl CsvRow for DecayRow {
    fn header() -> &'static [&'static str] {
        &["n", "c_max", "argmax_index", "samples"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            fmt_sig(self.c_max),
            self.argmax_index.to_string(),
            self.samples.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayRun {
    pub rows: Vec<DecayRow>,
    pub fit: ExpFit,
}

impl DecayRun {
    /// Whether `c_max` never rises by more than `slack` from one `n` to the next.
    pub fn non_increasing(&self, slack: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].c_max <= w[0].c_max + slack)
    }
}

/// Sample index of draw `k` for `n` outcomes; each `n` gets its own range.
fn decay_index(n: usize, k: u64) -> u64 {
    ((n as u64) << 32) | k
}

/// Largest l1 coherence created from `|0><0|` by `samples_per_n` random
/// `n`-outcome POVMs, for `n = 2..=n_max`, and an exponential fit in `n`.
pub fn fig3_decay(n_max: usize, samples_per_n: u64, master_seed: u64) -> Result<DecayRun> {
    if n_max < 4 {
        return Err(Error::InvalidParams(format!("n_max = {n_max} must be at least 4")));
    }
    if samples_per_n == 0 {
        return Err(Error::Empty("no samples per n"));
    }
    let delta0 = DensityMatrix::basis(2, 0);
    let mut rows = Vec::with_capacity(n_max - 1);
    for n in 2..=n_max {
        let cfg = SamplerConfig::new(n, master_seed);
        let values = (0..samples_per_n)
            .into_par_iter()
            .map(|k| {
                let povm = sample_povm(&cfg.at(decay_index(n, k)))?;
                Ok(c_l1(&luders_apply(&povm, &delta0)?))
            })
            .collect::<Result<Vec<f64>>>()?;
        let (k, c_max) = argmax(&values).expect("at least one sample");
        rows.push(DecayRow {
            n,
            c_max,
            argmax_index: k as u64,
            samples: samples_per_n,
        });
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.c_max)).collect();
    let fit = fit_exponential(&points)?;
    Ok(DecayRun { rows, fit })
}
