use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::embedding::{Dimension, EmbeddingConfig};
use crate::error::{Error, Result};
use crate::eval::{ExperimentConfig, ProblemSpec, PROBLEM_PRESETS};
use crate::geometry::{FEATURE_NAMES_2D, FEATURE_NAMES_3D};
use crate::ingest::{BandpassSpec, BONN_SAMPLE_RATE};
use crate::plot::PlotStyle;
use crate::stats::FeatureSelection;
use crate::svm::{KernelSpec, SmoParams};
use crate::timeseries::DetrendMode;

fn in_field(name: &str, e: Error) -> Error {
    match e {
        Error::InvalidConfig(m) => Error::InvalidConfig(format!("{name}: {m}")),
        other => Error::InvalidConfig(format!("{name}: {other}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    /// One integer per line, 173.61 Hz.
    #[default]
    Bonn,
    /// First numeric column of each file, at `sample_rate`.
    Csv,
}

/// A problem given either by preset name or spelled out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemEntry {
    Preset(String),
    Custom(ProblemSpec),
}

impl ProblemEntry {
    pub fn resolve(&self) -> Result<ProblemSpec> {
        let spec = match self {
            ProblemEntry::Preset(name) => ProblemSpec::preset(name)?,
            ProblemEntry::Custom(spec) => spec.clone(),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Class tag → directory of records.
    pub data: BTreeMap<String, PathBuf>,
    pub input_format: InputFormat,
    /// Sampling rate for CSV input; Bonn records are always 173.61 Hz.
    pub sample_rate: f64,
    /// Empty: every preset whose classes are all present in `data`.
    pub problems: Vec<ProblemEntry>,
    /// Embedding orders n; every order gets its own features, tests and
    /// classification.
    pub orders: Vec<usize>,
    pub dimension: Dimension,
    pub detrend: Option<DetrendMode>,
    /// `None` disables band-pass preprocessing.
    pub bandpass: Option<BandpassSpec>,
    /// Feature columns used by stats and classify; empty means all.
    pub features: Vec<String>,
    pub selection: FeatureSelection,
    pub kernels: Vec<String>,
    pub c: f64,
    pub tol: f64,
    pub max_iterations: Option<usize>,
    pub runs: usize,
    pub train_fraction: f64,
    pub stratify: bool,
    pub seed: u64,
    pub output: PathBuf,
    /// Write point-cloud CSVs during `pipeline`.
    pub save_embeddings: bool,
    /// Render figures (`embed` SVGs, StationPlots, box plots).
    pub plot: bool,
    pub style: PlotStyle,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            data: BTreeMap::new(),
            input_format: InputFormat::Bonn,
            sample_rate: BONN_SAMPLE_RATE,
            problems: Vec::new(),
            orders: vec![0, 1, 2],
            dimension: Dimension::Two,
            detrend: None,
            bandpass: None,
            features: Vec::new(),
            selection: FeatureSelection::All,
            kernels: KernelSpec::standard_set().iter().map(kernel_string).collect(),
            c: 1.0,
            tol: 1e-3,
            max_iterations: None,
            runs: 100,
            train_fraction: 0.7,
            stratify: true,
            seed: 0,
            output: PathBuf::from("stationplot-out"),
            save_embeddings: false,
            plot: true,
            style: PlotStyle::default(),
        }
    }
}

fn kernel_string(k: &KernelSpec) -> String {
    match *k {
        KernelSpec::Linear => "linear".into(),
        KernelSpec::Polynomial { degree: 2, .. } => "quadratic".into(),
        KernelSpec::Polynomial { degree, .. } => format!("polynomial:{degree}"),
        KernelSpec::Rbf { sigma } => format!("rbf:{sigma}"),
    }
}

impl PipelineConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    pub fn effective_sample_rate(&self) -> f64 {
        match self.input_format {
            InputFormat::Bonn => BONN_SAMPLE_RATE,
            InputFormat::Csv => self.sample_rate,
        }
    }

    pub fn all_feature_names(&self) -> &'static [&'static str] {
        match self.dimension {
            Dimension::Two => &FEATURE_NAMES_2D,
            Dimension::Three => &FEATURE_NAMES_3D,
        }
    }

    pub fn selected_features(&self) -> Vec<String> {
        if self.features.is_empty() {
            self.all_feature_names().iter().map(|s| s.to_string()).collect()
        } else {
            self.features.clone()
        }
    }

    pub fn kernel_specs(&self) -> Result<Vec<KernelSpec>> {
        if self.kernels.is_empty() {
            return Err(Error::InvalidConfig("kernels: at least one kernel is required".into()));
        }
        self.kernels
            .iter()
            .map(|k| k.parse::<KernelSpec>().map_err(|e| in_field("kernels", e)))
            .collect()
    }

    pub fn embedding(&self, order: usize) -> EmbeddingConfig {
        EmbeddingConfig {
            base_order: order,
            dimension: self.dimension,
            detrend: self.detrend,
        }
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let cfg = ExperimentConfig {
            kernels: self.kernel_specs()?,
            smo: SmoParams {
                c: self.c,
                tol: self.tol,
                max_iterations: self.max_iterations,
            },
            runs: self.runs,
            train_fraction: self.train_fraction,
            stratify: self.stratify,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Problems to evaluate against the classes in `data`.
    pub fn resolved_problems(&self) -> Result<Vec<ProblemSpec>> {
        self.problems_for(self.data.keys().map(String::as_str))
    }

    /// Problems to evaluate against an explicit set of available classes.
    pub fn problems_for<'a>(&self, classes: impl IntoIterator<Item = &'a str>) -> Result<Vec<ProblemSpec>> {
        let classes: std::collections::BTreeSet<&str> = classes.into_iter().collect();
        let present = |c: &str| classes.contains(c);
        if self.problems.is_empty() {
            let auto: Vec<ProblemSpec> = PROBLEM_PRESETS
                .iter()
                .map(|p| ProblemSpec::preset(p).expect("preset names resolve"))
                .filter(|p| p.classes().all(present))
                .collect();
            if auto.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "problems: none given and no preset ({}) matches the classes {:?}",
                    PROBLEM_PRESETS.join(", "),
                    classes
                )));
            }
            return Ok(auto);
        }
        let mut out = Vec::new();
        for entry in &self.problems {
            let p = entry.resolve().map_err(|e| in_field("problems", e))?;
            if let Some(c) = p.classes().find(|c| !present(c)) {
                return Err(Error::InvalidConfig(format!(
                    "problems: `{}` uses class `{c}`, which is not among the available classes",
                    p.name
                )));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Checks everything except the data paths.
    pub fn validate_settings(&self) -> Result<()> {
        let field = |name: &str, msg: String| Err(Error::InvalidConfig(format!("{name}: {msg}")));
        if self.orders.is_empty() {
            return field("orders", "at least one embedding order is required".into());
        }
        let mut seen = self.orders.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.orders.len() {
            return field("orders", format!("duplicate orders in {:?}", self.orders));
        }
        if self.input_format == InputFormat::Csv && !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return field("sample_rate", format!("must be positive, got {}", self.sample_rate));
        }
        if let Some(bp) = &self.bandpass {
            bp.validate(self.effective_sample_rate())
                .map_err(|e| in_field("bandpass", e))?;
        }
        let all = self.all_feature_names();
        for f in &self.features {
            if !all.contains(&f.as_str()) {
                return field("features", format!("unknown feature `{f}`; valid: {}", all.join(", ")));
            }
        }
        if let FeatureSelection::MaxPValue(p) = self.selection {
            if !(0.0..=1.0).contains(&p) {
                return field("selection", format!("p-value threshold must lie in [0, 1], got {p}"));
            }
        }
        if self.runs == 0 {
            return field("runs", "must be at least 1".into());
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return field(
                "train_fraction",
                format!("must lie strictly between 0 and 1, got {}", self.train_fraction),
            );
        }
        self.experiment()?;
        self.style.validate().map_err(|e| in_field("style", e))?;
        Ok(())
    }

    /// Full validation, including that every data directory exists.
    pub fn validate(&self) -> Result<()> {
        if self.data.is_empty() {
            return Err(Error::InvalidConfig("data: no class directories given".into()));
        }
        for (class, dir) in &self.data {
            if class.is_empty() || class.contains([',', '/', '\\']) {
                return Err(Error::InvalidConfig(format!("data: invalid class tag {class:?}")));
            }
            if !dir.is_dir() {
                return Err(Error::InvalidConfig(format!(
                    "data.{class}: directory {} does not exist",
                    dir.display()
                )));
            }
        }
        self.validate_settings()?;
        self.resolved_problems()?;
        Ok(())
    }
}
