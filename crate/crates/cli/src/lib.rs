//! Experiment runner and POVM inspector behind the `coherence-forge` binary.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use coherence_forge::coherence::{is_free_measurement, raw_quantumness_element};
use coherence_forge::experiments::{
    cnm_cf_example, fig1_curve, fig2_scatter, fig3_decay, fig4_successive, fmt_sig, neumark_consistency,
    projective_peaks, to_csv_string, tradeoff_audit, two_outcome_scatter, Check, CnmCfExample, CsvRow,
    OneParamSearch, DESK_SAMPLES, NUMERIC_SLACK, PAPER_SCALE_SAMPLES,
};
use coherence_forge::linalg::herm_eig;
use coherence_forge::measurement::{is_cnm, validate_povm, PovmJson, CNM_TOL, COMPLETENESS_TOL};
use coherence_forge::ComplexMatrix;
use serde::Deserialize;

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: parse error: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Core(#[from] coherence_forge::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    TwoOutcomeScatter,
    Tradeoff,
    CnmExample,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::TwoOutcomeScatter => "two-outcome-scatter",
            Experiment::Tradeoff => "tradeoff",
            Experiment::CnmExample => "cnm-example",
        };
        f.write_str(name)
    }
}

/// Pass/fail bands checked at the end of a run.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Slack on `x ≤ y ≤ (x + 1)/2` for optimized scatter points.
    pub envelope: f64,
    /// Allowed rise of `C_max` from one outcome count to the next.
    pub monotone: f64,
    /// Slack on the trade-off inequalities.
    pub tradeoff: f64,
    pub decay_rate_min: f64,
    pub decay_rate_max: f64,
    pub decay_residual: f64,
    pub saturation_min: f64,
    pub saturation_max: f64,
    /// Required increase of the coherence-of-formation bound.
    pub formation_gain: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            envelope: NUMERIC_SLACK,
            monotone: 0.02,
            tradeoff: 1e-9,
            decay_rate_min: 0.25,
            decay_rate_max: 0.50,
            decay_residual: 0.1,
            saturation_min: 0.74,
            saturation_max: 0.78,
            formation_gain: 0.01,
        }
    }
}

impl Tolerances {
    /// Bands for the full-size runs: the decay rate must land within 0.05 of 0.37.
    pub fn paper_scale(self) -> Self {
        Self {
            decay_rate_min: 0.32,
            decay_rate_max: 0.42,
            ..self
        }
    }
}

/// One run, from a JSON file and/or command-line flags. Missing counts fall
/// back to per-experiment defaults.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// States for scatters, samples per point for Monte Carlo runs.
    #[serde(default)]
    pub samples: Option<u64>,
    /// Random measurements tried per state in the two-outcome scatter.
    #[serde(default)]
    pub povm_samples: Option<u64>,
    /// Random dilations in the trade-off audit.
    #[serde(default)]
    pub setups: Option<u64>,
    /// Apparatus bases per dilation.
    #[serde(default)]
    pub bases: Option<usize>,
    #[serde(default)]
    pub nmax: Option<usize>,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub paper_scale: bool,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            seed: DEFAULT_SEED,
            samples: None,
            povm_samples: None,
            setups: None,
            bases: None,
            nmax: None,
            steps: None,
            out: None,
            paper_scale: false,
            tolerances: None,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    pub fn out_path(&self) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.experiment)))
    }

    fn tolerances(&self) -> Tolerances {
        let t = self.tolerances.unwrap_or_default();
        if self.paper_scale {
            t.paper_scale()
        } else {
            t
        }
    }

    fn monte_carlo_samples(&self) -> u64 {
        self.samples
            .unwrap_or(if self.paper_scale { PAPER_SCALE_SAMPLES } else { DESK_SAMPLES })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub experiment: Experiment,
    pub csv: String,
    /// `key=value` pairs describing the run.
    pub values: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "experiment={}", self.experiment)?;
        for (k, v) in &self.values {
            writeln!(f, "{k}={v}")?;
        }
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {} {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

fn value(key: &str, v: impl ToString) -> (String, String) {
    (key.to_string(), v.to_string())
}

fn positive<T: PartialOrd + Default + fmt::Display>(name: &str, v: T) -> Result<T, CliError> {
    if v > T::default() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

/// Runs the experiment and returns its CSV and checks without touching disk.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let tol = cfg.tolerances();
    let seed = cfg.seed;
    let mut values = vec![value("seed", seed)];
    let mut checks = Vec::new();
    let csv = match cfg.experiment {
        Experiment::Fig1 => {
            let points = positive("samples", cfg.samples.unwrap_or(1001))? as usize;
            let alphas: Vec<f64> = (0..points).map(|k| k as f64 / (points.max(2) - 1) as f64).collect();
            let rows = fig1_curve(&alphas, &[0.25, 0.5, 0.75, 1.0])?;
            let peaks = projective_peaks(1000)?;
            for (name, p) in ["peak_low", "peak_high"].iter().zip(&peaks) {
                values.push(value(name, format!("{}@{}", fmt_sig(p.value), fmt_sig(p.alpha_abs))));
            }
            let ok = peaks.iter().all(|p| (p.value - 0.5).abs() <= 1e-6);
            checks.push(Check::new("projective_peak", ok, "both maxima equal 1/2 within 1e-6"));
            to_csv_string(&rows)
        }
        Experiment::Fig2 => {
            let states = positive("samples", cfg.samples.unwrap_or(15_000))?;
            let rows = fig2_scatter(states, seed, OneParamSearch::coarse());
            let violations = rows.iter().filter(|r| !r.within_envelope(tol.envelope)).count();
            values.push(value("states", states));
            values.push(value("violations", violations));
            checks.push(Check::new("envelope", violations == 0, format!("violations={violations}")));
            to_csv_string(&rows)
        }
        Experiment::Fig3 => {
            let samples = positive("samples", cfg.monte_carlo_samples())?;
            let run = fig3_decay(cfg.nmax.unwrap_or(10), samples, seed)?;
            values.push(value("samples_per_n", samples));
            values.push(value("b", fmt_sig(run.fit.rate)));
            values.push(value("amplitude", fmt_sig(run.fit.amplitude)));
            values.push(value("residual", fmt_sig(run.fit.residual)));
            checks.push(Check::new(
                "two_outcome_ceiling",
                run.rows[0].c_max <= 0.5 + 1e-9,
                format!("c_max(2)={}", fmt_sig(run.rows[0].c_max)),
            ));
            checks.push(Check::new(
                "non_increasing",
                run.non_increasing(tol.monotone),
                format!("slack={}", tol.monotone),
            ));
            checks.push(Check::new(
                "decay_rate",
                (tol.decay_rate_min..=tol.decay_rate_max).contains(&run.fit.rate),
                format!("b={} band=[{}, {}]", fmt_sig(run.fit.rate), tol.decay_rate_min, tol.decay_rate_max),
            ));
            checks.push(Check::new(
                "fit_residual",
                run.fit.residual < tol.decay_residual,
                format!("residual={}", fmt_sig(run.fit.residual)),
            ));
            to_csv_string(&run.rows)
        }
        Experiment::Fig4 => {
            let samples = positive("samples", cfg.monte_carlo_samples())?;
            let rows = fig4_successive(cfg.steps.unwrap_or(30), samples, seed);
            let last = rows.last().expect("row for step 0").c_l1;
            values.push(value("samples_per_step", samples));
            values.push(value("saturation", fmt_sig(last)));
            checks.push(Check::new(
                "saturation",
                (tol.saturation_min..=tol.saturation_max).contains(&last),
                format!("final={} band=[{}, {}]", fmt_sig(last), tol.saturation_min, tol.saturation_max),
            ));
            to_csv_string(&rows)
        }
        Experiment::TwoOutcomeScatter => {
            let states = positive("samples", cfg.samples.unwrap_or(1000))?;
            let povm_samples = positive("povm_samples", cfg.povm_samples.unwrap_or(2000))?;
            let rows = two_outcome_scatter(states, povm_samples, seed);
            let violations = rows.iter().filter(|r| !r.within_envelope(tol.envelope)).count();
            values.push(value("states", states));
            values.push(value("violations", violations));
            checks.push(Check::new("envelope", violations == 0, format!("violations={violations}")));
            to_csv_string(&rows)
        }
        Experiment::Tradeoff => {
            let setups = positive("setups", cfg.setups.unwrap_or(500))?;
            let bases = positive("bases", cfg.bases.unwrap_or(20))?;
            let audit = tradeoff_audit(setups, bases, seed);
            let violations = audit.rows.iter().filter(|r| r.lhs > r.rhs + tol.tradeoff).count();
            let intermediate = audit
                .rows
                .iter()
                .filter(|r| r.e_gain > r.intermediate_bound + tol.tradeoff)
                .count();
            let neumark = neumark_consistency(setups.min(100), 3, seed);
            values.push(value("cases", audit.rows.len()));
            values.push(value("violations", violations));
            values.push(value("intermediate_violations", intermediate));
            values.push(value("neumark_gap", fmt_sig(neumark)));
            checks.push(Check::new("tradeoff", violations == 0, format!("violations={violations}")));
            checks.push(Check::new(
                "intermediate_bound",
                intermediate == 0,
                format!("violations={intermediate}"),
            ));
            checks.push(Check::new("neumark", neumark <= 1e-8, format!("gap={}", fmt_sig(neumark))));
            to_csv_string(&audit.rows)
        }
        Experiment::CnmExample => {
            let ex = cnm_cf_example()?;
            values.push(value("c_f_initial", fmt_sig(ex.c_f_initial)));
            values.push(value("c_f_final_lower_bound", fmt_sig(ex.c_f_final_lower_bound)));
            checks.push(Check::new(
                "cnm",
                ex.identity_is_cnm && ex.povm_is_cnm,
                format!("identity={} povm={}", ex.identity_is_cnm, ex.povm_is_cnm),
            ));
            checks.push(Check::new(
                "formation_increase",
                ex.c_f_final_lower_bound >= ex.c_f_initial + tol.formation_gain,
                format!("required gain={}", tol.formation_gain),
            ));
            to_csv_string(&[CnmRow(ex)])
        }
    };
    Ok(RunSummary {
        experiment: cfg.experiment,
        csv,
        values,
        checks,
    })
}

struct CnmRow(CnmCfExample);

impl CsvRow for CnmRow {
    fn header() -> &'static [&'static str] {
        &[
            "identity_is_cnm", "povm_is_cnm", "c_f_initial", "c_f_final_lower_bound", "increased", "lambda1", "lambda2",
            "lambda3", "lambda4",
        ]
    }

    fn fields(&self) -> Vec<String> {
        let ex = &self.0;
        let mut f = vec![
            ex.identity_is_cnm.to_string(),
            ex.povm_is_cnm.to_string(),
            fmt_sig(ex.c_f_initial),
            fmt_sig(ex.c_f_final_lower_bound),
            ex.increased.to_string(),
        ];
        // round-off below 1e-12 prints as zero rather than as noise
        f.extend(
            ex.output_eigenvalues
                .iter()
                .map(|&v| fmt_sig(if v.abs() < 1e-12 { 0.0 } else { v })),
        );
        f
    }
}

/// Runs the experiment and writes its CSV to [`RunConfig::out_path`].
pub fn cmd_run(cfg: &RunConfig) -> Result<(RunSummary, PathBuf), CliError> {
    let summary = run_experiment(cfg)?;
    let path = cfg.out_path();
    fs::write(&path, &summary.csv).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok((summary, path))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectReport {
    pub min_eigenvalue: f64,
    pub raw_quantumness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateReport {
    pub dim: usize,
    pub effects: Vec<EffectReport>,
    /// `‖Σ E_i - I‖` as the largest entry.
    pub completeness_error: f64,
    pub cnm: bool,
    pub free: bool,
}

impl fmt::Display for ValidateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim={} outcomes={}", self.dim, self.effects.len())?;
        writeln!(f, "psd=ok")?;
        writeln!(f, "completeness=ok error={}", fmt_sig(self.completeness_error))?;
        for (i, e) in self.effects.iter().enumerate() {
            writeln!(
                f,
                "effect {i}: min_eigenvalue={} raw_quantumness={}",
                fmt_sig(e.min_eigenvalue),
                fmt_sig(e.raw_quantumness)
            )?;
        }
        writeln!(f, "cnm={}", self.cnm)?;
        writeln!(f, "free={}", self.free)
    }
}

/// Parses and validates a POVM file; validation failures name the effect.
pub fn cmd_validate(path: &Path) -> Result<ValidateReport, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    let json: PovmJson = serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })?;
    let matrices = json.effect_matrices()?;
    let povm = validate_povm(matrices)?;
    let total = povm
        .effects()
        .iter()
        .fold(ComplexMatrix::zeros(povm.dim()), |acc, e| &acc + e);
    let completeness_error = total.max_abs_diff(&ComplexMatrix::identity(povm.dim()));
    debug_assert!(completeness_error <= COMPLETENESS_TOL);
    let effects = povm
        .effects()
        .iter()
        .map(|e| {
            Ok(EffectReport {
                min_eigenvalue: herm_eig(e)?.min_eigenvalue(),
                raw_quantumness: raw_quantumness_element(e),
            })
        })
        .collect::<Result<Vec<_>, coherence_forge::Error>>()?;
    Ok(ValidateReport {
        dim: povm.dim(),
        effects,
        completeness_error,
        cnm: is_cnm(&povm, CNM_TOL),
        free: is_free_measurement(&povm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_unknown_keys() {
        let ok: RunConfig = serde_json::from_str(r#"{"experiment":"fig3","seed":3,"samples":100}"#).unwrap();
        assert_eq!(ok.experiment, Experiment::Fig3);
        assert_eq!(ok.samples, Some(100));
        assert!(serde_json::from_str::<RunConfig>(r#"{"experiment":"fig3","colour":1}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"experiment":"fig9"}"#).is_err());
        let with_tol: RunConfig =
            serde_json::from_str(r#"{"experiment":"fig4","tolerances":{"saturation_min":0.5}}"#).unwrap();
        let t = with_tol.tolerances.unwrap();
        assert_eq!(t.saturation_min, 0.5);
        assert_eq!(t.saturation_max, 0.78);
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::new(Experiment::TwoOutcomeScatter);
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert_eq!(cfg.out_path(), PathBuf::from("two-outcome-scatter.csv"));
        assert_eq!(cfg.monte_carlo_samples(), DESK_SAMPLES);
        let paper = RunConfig {
            paper_scale: true,
            ..cfg
        };
        assert_eq!(paper.monte_carlo_samples(), PAPER_SCALE_SAMPLES);
        assert_eq!(paper.tolerances().decay_rate_min, 0.32);
    }

    #[test]
    fn zero_counts_are_config_errors() {
        let cfg = RunConfig {
            samples: Some(0),
            ..RunConfig::new(Experiment::Fig2)
        };
        assert!(matches!(run_experiment(&cfg), Err(CliError::Config(_))));
    }

    #[test]
    fn small_runs_report_checks() {
        let cfg = RunConfig {
            samples: Some(50),
            ..RunConfig::new(Experiment::Fig2)
        };
        let summary = run_experiment(&cfg).unwrap();
        assert!(summary.passed());
        assert_eq!(summary.csv.lines().count(), 51);
        assert!(summary.to_string().contains("violations=0"));
    }
}
