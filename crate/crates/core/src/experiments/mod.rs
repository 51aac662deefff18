//! Repeated fixed-ridge vs shrinkage discriminant trials on the synthetic
//! two-class problem.
//!
//! Every trial seed is derived from `(master seed, n_g, repetition)` and every
//! trial draws its training and test sets from two further sub-streams, so a
//! sweep is reproducible regardless of how trials are scheduled.

pub mod boundary;
pub mod data;
pub mod ttest;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::kfda::{misclassification_rate, train, KfdaModel, RegularizerSpec, DEFAULT_FIXED_RIDGE};
use crate::shrinkage::FeatureDim;
use crate::stats::{mean_and_std, seed_stream};

pub use boundary::{boundary_grid, export_boundary_grid, Bounds, BoundaryGrid, GridPoint};
pub use data::generate_two_class;
pub use ttest::{paired_t_test, student_t_two_sided, TTestResult};

pub const REPORT_FILE: &str = "report.json";
pub const SUMMARY_FILE: &str = "summary.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub ng_min: usize,
    pub ng_max: usize,
    pub repetitions: usize,
    pub sigma2: f64,
    pub fixed_lambda: f64,
    pub test_points_per_component: usize,
    pub seed: u64,
    pub p_policy: FeatureDim,
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            ng_min: 3,
            ng_max: 30,
            repetitions: 100,
            sigma2: 0.1,
            fixed_lambda: DEFAULT_FIXED_RIDGE,
            test_points_per_component: 500,
            seed: 0,
            p_policy: FeatureDim::Observations,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ng_min < 3 {
            return Err(Error::InvalidConfig(format!(
                "n_g range must start at 3 or more, got {}",
                self.ng_min
            )));
        }
        if self.ng_max < self.ng_min {
            return Err(Error::InvalidConfig(format!(
                "empty n_g range {}..={}",
                self.ng_min, self.ng_max
            )));
        }
        if self.repetitions < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 repetitions, got {}",
                self.repetitions
            )));
        }
        if self.test_points_per_component == 0 {
            return Err(Error::InvalidConfig("test set must not be empty".into()));
        }
        self.kernel()?;
        RegularizerSpec::fixed_ridge(self.fixed_lambda)?;
        if let FeatureDim::Finite(0) = self.p_policy {
            return Err(Error::InvalidConfig("p must be at least 1".into()));
        }
        Ok(())
    }

    pub fn kernel(&self) -> Result<KernelSpec> {
        KernelSpec::rbf(self.sigma2)
    }

    pub fn regularizers(&self) -> (RegularizerSpec, RegularizerSpec) {
        (
            RegularizerSpec::FixedRidge {
                lambda: self.fixed_lambda,
            },
            RegularizerSpec::Shrinkage { p: self.p_policy },
        )
    }

    pub fn trial_seed(&self, n_g: usize, repetition: usize) -> u64 {
        seed_stream(self.seed, &[n_g as u64, repetition as u64])
    }
}

/// One repetition: test-set error of both discriminants and the `λ̂` used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub repetition: usize,
    pub seed: u64,
    pub rate_fixed: f64,
    pub rate_shrinkage: f64,
    pub lambda_hat: f64,
}

/// Both discriminants trained on the same training set.
#[derive(Debug, Clone)]
pub struct TrainedPair {
    pub fixed: KfdaModel,
    pub shrinkage: KfdaModel,
}

fn train_seed(trial_seed: u64) -> u64 {
    seed_stream(trial_seed, &[0])
}

fn test_seed(trial_seed: u64) -> u64 {
    seed_stream(trial_seed, &[1])
}

/// Trains both discriminants on the training set drawn for `trial_seed`.
pub fn train_pair(n_g: usize, cfg: &ExperimentConfig, trial_seed: u64) -> Result<TrainedPair> {
    let ds = generate_two_class(n_g, train_seed(trial_seed))?;
    let kernel = cfg.kernel()?;
    let (fixed, shrink) = cfg.regularizers();
    Ok(TrainedPair {
        fixed: train(&ds, kernel, fixed)?,
        shrinkage: train(&ds, kernel, shrink)?,
    })
}

/// Misclassification of both discriminants on a fresh test set of
/// `test_points_per_component` points per mixture component.
pub fn run_trial(n_g: usize, cfg: &ExperimentConfig, trial_seed: u64) -> Result<TrialOutcome> {
    let pair = train_pair(n_g, cfg, trial_seed)?;
    let test = generate_two_class(cfg.test_points_per_component, test_seed(trial_seed))?;
    Ok(TrialOutcome {
        repetition: 0,
        seed: trial_seed,
        rate_fixed: misclassification_rate(&pair.fixed, &test)?,
        rate_shrinkage: misclassification_rate(&pair.shrinkage, &test)?,
        lambda_hat: pair.shrinkage.lambda_used,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgSummary {
    pub n_g: usize,
    pub mean_rate_fixed: f64,
    pub std_rate_fixed: f64,
    pub mean_rate_shrinkage: f64,
    pub std_rate_shrinkage: f64,
    pub mean_lambda_hat: f64,
    pub std_lambda_hat: f64,
    /// Paired test on `rate_fixed - rate_shrinkage`.
    pub ttest: TTestResult,
    pub trials: Vec<TrialOutcome>,
}

impl NgSummary {
    fn from_trials(n_g: usize, trials: Vec<TrialOutcome>) -> Result<Self> {
        let fixed: Vec<f64> = trials.iter().map(|t| t.rate_fixed).collect();
        let shrink: Vec<f64> = trials.iter().map(|t| t.rate_shrinkage).collect();
        let lambdas: Vec<f64> = trials.iter().map(|t| t.lambda_hat).collect();
        let (mean_rate_fixed, std_rate_fixed) = mean_and_std(&fixed);
        let (mean_rate_shrinkage, std_rate_shrinkage) = mean_and_std(&shrink);
        let (mean_lambda_hat, std_lambda_hat) = mean_and_std(&lambdas);
        Ok(Self {
            n_g,
            mean_rate_fixed,
            std_rate_fixed,
            mean_rate_shrinkage,
            std_rate_shrinkage,
            mean_lambda_hat,
            std_lambda_hat,
            ttest: paired_t_test(&fixed, &shrink)?,
            trials,
        })
    }

    pub fn shrinkage_not_worse(&self) -> bool {
        self.mean_rate_shrinkage <= self.mean_rate_fixed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub test_protocol: String,
    pub per_ng: Vec<NgSummary>,
    /// Paired test on all per-repetition differences pooled across `n_g`.
    pub pooled_ttest: TTestResult,
    /// Number of `n_g` values where shrinkage's mean error is not above the
    /// fixed ridge's.
    pub shrinkage_not_worse_count: usize,
}

/// Runs `repetitions` trials for every `n_g` in range, in parallel, then
/// aggregates in `(n_g, repetition)` order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (cfg.ng_min..=cfg.ng_max)
        .flat_map(|n_g| (0..cfg.repetitions).map(move |r| (n_g, r)))
        .collect();
    let outcomes: Vec<TrialOutcome> = jobs
        .par_iter()
        .map(|&(n_g, repetition)| {
            let seed = cfg.trial_seed(n_g, repetition);
            run_trial(n_g, cfg, seed)
                .map(|o| TrialOutcome { repetition, ..o })
                .map_err(|e| Error::Trial {
                    n_g,
                    repetition,
                    seed,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;

    let mut per_ng = Vec::new();
    for (chunk, n_g) in outcomes.chunks(cfg.repetitions).zip(cfg.ng_min..=cfg.ng_max) {
        per_ng.push(NgSummary::from_trials(n_g, chunk.to_vec())?);
    }
    let fixed: Vec<f64> = outcomes.iter().map(|t| t.rate_fixed).collect();
    let shrink: Vec<f64> = outcomes.iter().map(|t| t.rate_shrinkage).collect();
    Ok(ExperimentReport {
        config: cfg.clone(),
        test_protocol: format!(
            "fresh i.i.d. test set of {} points per mixture component per trial",
            cfg.test_points_per_component
        ),
        shrinkage_not_worse_count: per_ng.iter().filter(|s| s.shrinkage_not_worse()).count(),
        pooled_ttest: paired_t_test(&fixed, &shrink)?,
        per_ng,
    })
}

#[derive(Serialize)]
struct SummaryRow {
    n_g: usize,
    mean_rate_fixed: f64,
    std_rate_fixed: f64,
    mean_rate_shrinkage: f64,
    std_rate_shrinkage: f64,
    mean_lambda_hat: f64,
    std_lambda_hat: f64,
    t_statistic: f64,
    p_value: f64,
    reject_at_99: bool,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

pub fn per_ng_file_name(n_g: usize) -> String {
    format!("ng_{n_g:03}.csv")
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Writes `report.json`, `summary.csv` and one `ng_XXX.csv` per `n_g`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let report = dir.join(REPORT_FILE);
        fs::write(&report, self.to_json()?).map_err(|e| Error::io(&report, e))?;

        let summary = dir.join(SUMMARY_FILE);
        let mut w = csv_writer(&summary)?;
        for s in &self.per_ng {
            w.serialize(SummaryRow {
                n_g: s.n_g,
                mean_rate_fixed: s.mean_rate_fixed,
                std_rate_fixed: s.std_rate_fixed,
                mean_rate_shrinkage: s.mean_rate_shrinkage,
                std_rate_shrinkage: s.std_rate_shrinkage,
                mean_lambda_hat: s.mean_lambda_hat,
                std_lambda_hat: s.std_lambda_hat,
                t_statistic: s.ttest.t_statistic,
                p_value: s.ttest.p_value,
                reject_at_99: s.ttest.reject_at_99,
            })?;
        }
        w.flush().map_err(|e| Error::io(&summary, e))?;

        for s in &self.per_ng {
            let path = dir.join(per_ng_file_name(s.n_g));
            let mut w = csv_writer(&path)?;
            for t in &s.trials {
                w.serialize(t)?;
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }

    pub fn read_from_dir(dir: &Path) -> Result<Self> {
        let path = dir.join(REPORT_FILE);
        let s = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Self::from_json(&s)
    }

    pub fn summary(&self, n_g: usize) -> Option<&NgSummary> {
        self.per_ng.iter().find(|s| s.n_g == n_g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            ng_min: 3,
            ng_max: 4,
            repetitions: 2,
            test_points_per_component: 50,
            seed: 7,
            ..Default::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let bad = [
            ExperimentConfig { ng_min: 2, ..small() },
            ExperimentConfig { ng_max: 2, ..small() },
            ExperimentConfig { repetitions: 1, ..small() },
            ExperimentConfig { sigma2: 0.0, ..small() },
            ExperimentConfig { fixed_lambda: 0.0, ..small() },
            ExperimentConfig { p_policy: FeatureDim::Finite(0), ..small() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn sweep_bookkeeping() {
        let report = run_sweep(&small()).unwrap();
        assert_eq!(report.per_ng.len(), 2);
        for (s, n_g) in report.per_ng.iter().zip(3..) {
            assert_eq!(s.n_g, n_g);
            assert_eq!(s.trials.len(), 2);
            assert_eq!(s.trials[0].repetition, 0);
            assert_eq!(s.trials[1].repetition, 1);
            for t in &s.trials {
                assert!((0.0..=1.0).contains(&t.rate_fixed));
                assert!((0.0..=1.0).contains(&t.rate_shrinkage));
                assert!((0.0..=1.0).contains(&t.lambda_hat));
            }
        }
    }

    #[test]
    fn trial_seeds_are_distinct() {
        let cfg = ExperimentConfig::default();
        let mut seeds: Vec<u64> = (3..=30)
            .flat_map(|g| (0..100).map(move |r| (g, r)))
            .map(|(g, r)| cfg.trial_seed(g, r))
            .collect();
        let total = seeds.len();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), total);
    }

    #[test]
    fn same_seed_same_trial() {
        let cfg = small();
        assert_eq!(run_trial(5, &cfg, 11).unwrap(), run_trial(5, &cfg, 11).unwrap());
    }

    #[test]
    fn report_round_trips_through_json() {
        let report = run_sweep(&small()).unwrap();
        let back = ExperimentReport::from_json(&report.to_json().unwrap()).unwrap();
        assert_eq!(back, report);
    }
}
