use rayon::prelude::*;

use super::{fmt_sig, CsvRow};
use crate::dilation::{
    e_min, induced_kraus, random_projectors, random_setup, system_after, tradeoff_report, AngleGrid,
    TRADEOFF_SLACK,
};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffRow {
    pub seed: u64,
    pub index: u64,
    pub theta: f64,
    pub phi: f64,
    pub e_gain: f64,
    pub e_min: f64,
    pub c_r_after: f64,
    pub mixedness: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub intermediate_bound: f64,
    pub intermediate_holds: bool,
}

impl CsvRow for TradeoffRow {
    fn header() -> &'static [&'static str] {
        &[
            "seed", "index", "theta", "phi", "e_gain", "e_min", "c_r_after", "mixedness", "lhs", "rhs", "holds",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            self.index.to_string(),
            fmt_sig(self.theta),
            fmt_sig(self.phi),
            fmt_sig(self.e_gain),
            fmt_sig(self.e_min),
            fmt_sig(self.c_r_after),
            fmt_sig(self.mixedness),
            fmt_sig(self.lhs),
            fmt_sig(self.rhs),
            self.holds.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffAudit {
    pub rows: Vec<TradeoffRow>,
    /// Rows with `lhs > rhs`.
    pub violations: usize,
    /// Rows where `E(Π)` exceeds the intermediate bound.
    pub intermediate_violations: usize,
    /// Rows where the minimized gain exceeds the audited gain.
    pub e_min_violations: usize,
    pub min_gain: f64,
}

/// Trade-off terms for `setups` random dilations, each measured in
/// `per_setup` random apparatus bases. Rows are ordered by setup, then basis.
pub fn tradeoff_audit(setups: u64, per_setup: usize, master_seed: u64) -> TradeoffAudit {
    let rows: Vec<TradeoffRow> = (0..setups)
        .into_par_iter()
        .flat_map_iter(|index| {
            let setup = random_setup(master_seed, index, false);
            let (minimum, _) = e_min(&setup, AngleGrid::default());
            random_projectors(master_seed, index, per_setup)
                .into_iter()
                .map(move |proj| {
                    let r = tradeoff_report(&setup, &proj);
                    TradeoffRow {
                        seed: master_seed,
                        index,
                        theta: proj.theta,
                        phi: proj.phi,
                        e_gain: r.e_gain,
                        e_min: minimum,
                        c_r_after: r.c_r_system_after,
                        mixedness: r.mixedness,
                        lhs: r.lhs,
                        rhs: r.rhs,
                        holds: r.holds,
                        intermediate_bound: r.intermediate_bound,
                        intermediate_holds: r.intermediate_holds,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    TradeoffAudit {
        violations: rows.iter().filter(|r| !r.holds).count(),
        intermediate_violations: rows.iter().filter(|r| !r.intermediate_holds).count(),
        e_min_violations: rows.iter().filter(|r| r.e_min > r.e_gain + TRADEOFF_SLACK).count(),
        min_gain: rows.iter().map(|r| r.e_gain).fold(f64::INFINITY, f64::min),
        rows,
    }
}

/// Largest entrywise gap, over `setups` dilations with a pure apparatus,
/// between the measured system marginal and the system state produced by
/// the Kraus operators the dilation induces.
pub fn neumark_consistency(setups: u64, per_setup: usize, master_seed: u64) -> f64 {
    (0..setups)
        .into_par_iter()
        .map(|index| {
            let setup = random_setup(master_seed, index, true);
            random_projectors(master_seed, index, per_setup)
                .iter()
                .map(|proj| {
                    let kraus = induced_kraus(&setup, proj).expect("pure apparatus");
                    let direct = kraus
                        .iter()
                        .fold(ComplexMatrix::zeros(2), |acc, k| &acc + &k.sandwich(setup.rho_s().matrix()));
                    system_after(&setup, proj).matrix().max_abs_diff(&direct)
                })
                .fold(0.0, f64::max)
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::to_csv_string;

    #[test]
    fn small_audit() {
        let audit = tradeoff_audit(10, 4, 7);
        assert_eq!(audit.rows.len(), 40);
        assert_eq!(audit.violations, 0);
        assert_eq!(audit.intermediate_violations, 0);
        assert_eq!(audit.e_min_violations, 0);
        assert!(audit.min_gain >= -1e-9);
        assert!(audit.rows.windows(2).all(|w| w[0].index <= w[1].index));
        let csv = to_csv_string(&audit.rows);
        assert!(csv.starts_with("seed,index,theta,phi,e_gain,e_min,c_r_after,mixedness,lhs,rhs,holds\n"));
        assert_eq!(csv, to_csv_string(&tradeoff_audit(10, 4, 7).rows));
    }

    #[test]
    fn neumark_gap_is_small() {
        assert!(neumark_consistency(20, 3, 1) < 1e-8);
    }
}
