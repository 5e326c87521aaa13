//! Repeated random-split evaluation of SVM kernels.

mod metrics;
mod split;

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use metrics::{metrics, Confusion, Metrics, Summary};
pub use split::{derive_seed, split_indices, SplitIndices};

use crate::error::{Error, Result};
use crate::svm::{KernelSpec, Scaler, SmoParams, SvmModel};

/// Retries per run when training fails or does not converge.
pub const MAX_ATTEMPTS: u64 = 3;

/// A binary problem: which class tags form the negative and the positive
/// (seizure) class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub name: String,
    pub negative: Vec<String>,
    pub positive: Vec<String>,
}

pub const PROBLEM_PRESETS: &[&str] = &["a-vs-e", "abcd-vs-e"];

impl ProblemSpec {
    pub fn new(name: impl Into<String>, negative: &[&str], positive: &[&str]) -> Self {
        ProblemSpec {
            name: name.into(),
            negative: negative.iter().map(|s| s.to_string()).collect(),
            positive: positive.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn a_vs_e() -> Self {
        ProblemSpec::new("a-vs-e", &["A"], &["E"])
    }

    pub fn abcd_vs_e() -> Self {
        ProblemSpec::new("abcd-vs-e", &["A", "B", "C", "D"], &["E"])
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "a-vs-e" => Ok(ProblemSpec::a_vs_e()),
            "abcd-vs-e" => Ok(ProblemSpec::abcd_vs_e()),
            _ => Err(Error::InvalidConfig(format!(
                "unknown problem `{name}`; valid: {}",
                PROBLEM_PRESETS.join(", ")
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.negative.is_empty() || self.positive.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "problem `{}` needs at least one negative and one positive class",
                self.name
            )));
        }
        if let Some(c) = self.negative.iter().find(|c| self.positive.contains(c)) {
            return Err(Error::InvalidConfig(format!(
                "problem `{}`: class `{c}` is both negative and positive",
                self.name
            )));
        }
        Ok(())
    }

    /// `+1`, `-1`, or `None` when the tag takes no part in this problem.
    pub fn label_of(&self, class: &str) -> Option<i8> {
        if self.positive.iter().any(|c| c == class) {
            Some(1)
        } else if self.negative.iter().any(|c| c == class) {
            Some(-1)
        } else {
            None
        }
    }

    pub fn classes(&self) -> impl Iterator<Item = &str> {
        self.negative.iter().chain(&self.positive).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    rows: Vec<Vec<f64>>,
    labels: Vec<i8>,
    problem: String,
}

impl LabeledDataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<i8>, problem: impl Into<String>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::InvalidInput(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if let Some(l) = labels.iter().find(|&&l| l != 1 && l != -1) {
            return Err(Error::InvalidInput(format!("labels must be +1 or -1, got {l}")));
        }
        if !labels.contains(&1) || !labels.contains(&-1) {
            return Err(Error::InvalidInput("dataset needs both classes".into()));
        }
        let dim = rows[0].len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: r.len(),
            });
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("dataset contains non-finite values".into()));
        }
        Ok(LabeledDataset {
            rows,
            labels,
            problem: problem.into(),
        })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn problem(&self) -> &str {
        &self.problem
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l > 0).count()
    }

    pub fn subset(&self, idx: &[usize]) -> (Vec<Vec<f64>>, Vec<i8>) {
        (
            idx.iter().map(|&i| self.rows[i].clone()).collect(),
            idx.iter().map(|&i| self.labels[i]).collect(),
        )
    }

    pub fn split(&self, train_fraction: f64, stratify: bool, seed: u64) -> Result<(Self, Self)> {
        let s = split_indices(&self.labels, train_fraction, stratify, seed)?;
        let part = |idx: &[usize]| {
            let (rows, labels) = self.subset(idx);
            LabeledDataset {
                rows,
                labels,
                problem: self.problem.clone(),
            }
        };
        Ok((part(&s.train), part(&s.test)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kernels: Vec<KernelSpec>,
    pub smo: SmoParams,
    pub runs: usize,
    pub train_fraction: f64,
    pub stratify: bool,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kernels: KernelSpec::standard_set(),
            smo: SmoParams::default(),
            runs: 100,
            train_fraction: 0.7,
            stratify: true,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kernels.is_empty() {
            return Err(Error::InvalidConfig("no kernels configured".into()));
        }
        for k in &self.kernels {
            k.validate()?;
        }
        self.smo.validate()?;
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "train_fraction must lie strictly between 0 and 1, got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub run: usize,
    /// Which attempt produced this result (0 unless retried).
    pub attempt: u64,
    pub confusion: Confusion,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub kernel: KernelSpec,
    pub name: String,
    pub accuracy: Summary,
    pub sensitivity: Summary,
    pub specificity: Summary,
    pub confusion_totals: Confusion,
    /// Runs that failed every attempt.
    pub excluded_runs: Vec<usize>,
    pub runs: Vec<RunOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub problem: String,
    pub seed: u64,
    pub runs: usize,
    pub train_fraction: f64,
    pub stratify: bool,
    pub c: f64,
    pub kernels: Vec<KernelReport>,
}

/// Called once per training attempt, before the scaler is fitted.
pub struct FitEvent<'a> {
    pub kernel: usize,
    pub run: usize,
    pub attempt: u64,
    /// Dataset rows the scaler and the SVM are fitted on.
    pub fit_rows: &'a [usize],
    pub test_rows: &'a [usize],
}

fn run_once(
    dataset: &LabeledDataset,
    config: &ExperimentConfig,
    kernel_idx: usize,
    run: usize,
    observer: &(dyn Fn(&FitEvent<'_>) + Sync),
) -> Option<RunOutcome> {
    let kernel = config.kernels[kernel_idx];
    for attempt in 0..MAX_ATTEMPTS {
        let seed = derive_seed(config.seed, run as u64, attempt);
        let outcome = (|| -> Result<Option<RunOutcome>> {
            let s = split_indices(dataset.labels(), config.train_fraction, config.stratify, seed)?;
            observer(&FitEvent {
                kernel: kernel_idx,
                run,
                attempt,
                fit_rows: &s.train,
                test_rows: &s.test,
            });
            let (train_rows, train_labels) = dataset.subset(&s.train);
            let scaler = Scaler::fit(&train_rows)?;
            let model = SvmModel::fit_with_scaler(scaler, &train_rows, &train_labels, kernel, &config.smo)?;
            if !model.converged() {
                return Ok(None);
            }
            let (test_rows, test_labels) = dataset.subset(&s.test);
            let predicted = model.predict_rows(&test_rows)?;
            let confusion = Confusion::from_predictions(&test_labels, &predicted);
            Ok(Some(RunOutcome {
                run,
                attempt,
                confusion,
                metrics: confusion.metrics(),
            }))
        })();
        match outcome {
            Ok(Some(o)) => return Some(o),
            Ok(None) => log::warn!("{kernel}: run {run} attempt {attempt} did not converge; retrying"),
            Err(e) => log::warn!("{kernel}: run {run} attempt {attempt} failed: {e}; retrying"),
        }
    }
    log::warn!("{kernel}: run {run} excluded after {MAX_ATTEMPTS} failed attempts");
    None
}

pub fn run_experiment(dataset: &LabeledDataset, config: &ExperimentConfig) -> Result<EvalReport> {
    run_experiment_observed(dataset, config, &|_| {})
}

/// [`run_experiment`] with a hook that sees the row indices of every fit.
///
/// Runs execute in parallel on the current rayon pool; results are ordered
/// by run index, so the report does not depend on scheduling.
pub fn run_experiment_observed(
    dataset: &LabeledDataset,
    config: &ExperimentConfig,
    observer: &(dyn Fn(&FitEvent<'_>) + Sync),
) -> Result<EvalReport> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = (0..config.kernels.len())
        .flat_map(|k| (0..config.runs).map(move |r| (k, r)))
        .collect();
    let outcomes: Vec<Option<RunOutcome>> = jobs
        .par_iter()
        .map(|&(k, r)| run_once(dataset, config, k, r, observer))
        .collect();

    let kernels = config
        .kernels
        .iter()
        .enumerate()
        .map(|(k, &kernel)| {
            let slice = &outcomes[k * config.runs..(k + 1) * config.runs];
            let runs: Vec<RunOutcome> = slice.iter().flatten().cloned().collect();
            let excluded_runs = slice
                .iter()
                .enumerate()
                .filter(|(_, o)| o.is_none())
                .map(|(r, _)| r)
                .collect();
            let mut confusion_totals = Confusion::default();
            for o in &runs {
                confusion_totals += o.confusion;
            }
            KernelReport {
                kernel,
                name: kernel.to_string(),
                accuracy: Summary::of(runs.iter().filter_map(|o| o.metrics.accuracy)),
                sensitivity: Summary::of(runs.iter().filter_map(|o| o.metrics.sensitivity)),
                specificity: Summary::of(runs.iter().filter_map(|o| o.metrics.specificity)),
                confusion_totals,
                excluded_runs,
                runs,
            }
        })
        .collect();

    Ok(EvalReport {
        problem: dataset.problem().to_string(),
        seed: config.seed,
        runs: config.runs,
        train_fraction: config.train_fraction,
        stratify: config.stratify,
        c: config.smo.c,
        kernels,
    })
}

fn cell(s: &Summary) -> String {
    match (s.mean, s.std) {
        (Some(m), Some(sd)) => format!("{m:.2} ± {sd:.2}"),
        _ => "n/a".to_string(),
    }
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Highest mean accuracy; ties go to the smaller std, then to the kernel
    /// listed first.
    pub fn best_kernel(&self) -> Option<&KernelReport> {
        let key = |k: &KernelReport| (k.accuracy.mean.unwrap(), -k.accuracy.std.unwrap_or(0.0));
        self.kernels
            .iter()
            .filter(|k| k.accuracy.mean.is_some())
            .fold(None, |best: Option<&KernelReport>, k| match best {
                Some(b) if key(k).partial_cmp(&key(b)) != Some(std::cmp::Ordering::Greater) => Some(b),
                _ => Some(k),
            })
    }

    /// Kernel × metric table, mean ± std in percent.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{} | {} runs | seed {} | train fraction {} | C = {}",
            self.problem, self.runs, self.seed, self.train_fraction, self.c
        )
        .unwrap();
        writeln!(
            out,
            "{:<24} {:>16} {:>16} {:>16} {:>9}",
            "kernel", "AC (%)", "SN (%)", "SP (%)", "excluded"
        )
        .unwrap();
        for k in &self.kernels {
            writeln!(
                out,
                "{:<24} {:>16} {:>16} {:>16} {:>9}",
                k.name,
                cell(&k.accuracy),
                cell(&k.sensitivity),
                cell(&k.specificity),
                k.excluded_runs.len()
            )
            .unwrap();
        }
        out
    }
}
