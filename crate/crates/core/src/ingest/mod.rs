//! Loading raw time-series records and optional band-pass preprocessing.
//!
//! Two on-disk formats are understood: the Bonn EEG ASCII layout (one signed
//! decimal integer per line) and a generic CSV with a single numeric column
//! selected by index or header name.

mod filter;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use filter::{bandpass, ButterworthBandpass, Sos};

/// Sampling frequency of every record in the Bonn EEG corpus.
pub const BONN_SAMPLE_RATE: f64 = 173.61;

/// Number of samples in an official Bonn record.
pub const BONN_RECORD_LEN: usize = 4097;

/// A labeled, uniformly sampled, real-valued time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate: f64,
    label: String,
    source_id: String,
}

impl Signal {
    pub fn new(
        samples: Vec<f64>,
        sample_rate: f64,
        label: impl Into<String>,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("signal has no samples".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sample {i} is not finite ({})",
                samples[i]
            )));
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sample rate must be positive, got {sample_rate}"
            )));
        }
        Ok(Signal {
            samples,
            sample_rate,
            label: label.into(),
            source_id: source_id.into(),
        })
    }

    /// Same label, rate and identifier with replaced samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        Signal::new(samples, self.sample_rate, self.label.clone(), self.source_id.clone())
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    /// Duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }
}

/// Band-pass preprocessing parameters.
///
/// `filter_order` is the order of the Butterworth low-pass prototype; the
/// realized band-pass has twice that order and `filter_order` second-order
/// sections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandpassSpec {
    pub low_cut: f64,
    pub high_cut: f64,
    pub filter_order: usize,
    pub zero_phase: bool,
}

impl Default for BandpassSpec {
    fn default() -> Self {
        BandpassSpec {
            low_cut: 0.53,
            high_cut: 40.0,
            filter_order: 4,
            zero_phase: true,
        }
    }
}

impl BandpassSpec {
    pub fn validate(&self, sample_rate: f64) -> Result<()> {
        let nyquist = sample_rate / 2.0;
        if self.filter_order == 0 {
            return Err(Error::InvalidConfig("band-pass filter_order must be positive".into()));
        }
        if !(self.low_cut > 0.0 && self.low_cut < self.high_cut && self.high_cut < nyquist) {
            return Err(Error::InvalidConfig(format!(
                "band-pass corners must satisfy 0 < low_cut < high_cut < {nyquist} Hz, got {}..{} Hz",
                self.low_cut, self.high_cut
            )));
        }
        Ok(())
    }
}

/// Applies the optional band-pass stage. `None` returns the input unchanged.
pub fn preprocess(signal: &Signal, spec: Option<&BandpassSpec>) -> Result<Signal> {
    match spec {
        Some(spec) => bandpass(signal, spec),
        None => Ok(signal.clone()),
    }
}

fn source_id_for(path: &Path) -> String {
    path.file_stem()
        .or_else(|| path.file_name())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Parses Bonn ASCII text (one signed integer per line).
pub fn parse_bonn(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut samples = Vec::with_capacity(BONN_RECORD_LEN);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            // blank lines carry no sample
            continue;
        }
        let value: i64 = line.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: format!("expected an integer amplitude, found {line:?}"),
        })?;
        samples.push(value as f64);
    }
    Ok(samples)
}

/// Loads one Bonn EEG record. Records whose length differs from 4097 are
/// accepted and reported through `log::warn!`.
pub fn load_bonn_record(path: impl AsRef<Path>, label: &str) -> Result<Signal> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let samples = parse_bonn(&text, path)?;
    if samples.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: "record contains no samples".into(),
        });
    }
    if samples.len() != BONN_RECORD_LEN {
        log::warn!(
            "{}: {} samples, official Bonn records have {}",
            path.display(),
            samples.len(),
            BONN_RECORD_LEN
        );
    }
    Signal::new(samples, BONN_SAMPLE_RATE, label, source_id_for(path))
}

/// Serializes integer-valued samples back to the Bonn layout with a single
/// trailing newline.
pub fn to_bonn_string(signal: &Signal) -> Result<String> {
    let mut out = String::with_capacity(signal.len() * 6);
    for (i, &v) in signal.samples().iter().enumerate() {
        if v.fract() != 0.0 || v.abs() > 9.0e15 {
            return Err(Error::InvalidInput(format!(
                "sample {i} ({v}) is not an integer amplitude"
            )));
        }
        writeln!(out, "{}", v as i64).expect("writing to a String cannot fail");
    }
    Ok(out)
}

/// Lists regular files of a directory in filename order, skipping hidden ones.
pub(crate) fn sorted_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let hidden = path
            .file_name()
            .map(|n| n.to_string_lossy().starts_with('.'))
            .unwrap_or(true);
        if path.is_file() && !hidden {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Loads every record of a Bonn set directory, sorted by filename.
pub fn load_set(dir: impl AsRef<Path>, label: &str) -> Result<Vec<Signal>> {
    let dir = dir.as_ref();
    let files = sorted_files(dir)?;
    if files.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{}: directory contains no records",
            dir.display()
        )));
    }
    files
        .iter()
        .map(|path| {
            load_bonn_record(path, label).map_err(|e| match e {
                // parse errors already carry the file name
                e @ (Error::Parse { .. } | Error::Io { .. }) => e,
                other => Error::InFile {
                    path: path.clone(),
                    source: Box::new(other),
                },
            })
        })
        .collect()
}

/// Column selector for generic CSV input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CsvColumn {
    Index(usize),
    Name(String),
}

impl Default for CsvColumn {
    fn default() -> Self {
        CsvColumn::Index(0)
    }
}

/// Loads a numeric column from a comma-separated file. A first line that
/// does not parse as a number in the selected column is treated as a header.
pub fn load_csv(path: impl AsRef<Path>, column: &CsvColumn, sample_rate: f64, label: &str) -> Result<Signal> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();

    let mut index = match column {
        CsvColumn::Index(i) => Some(*i),
        CsvColumn::Name(_) => None,
    };
    if let Some(&(_, first)) = lines.peek() {
        let fields: Vec<&str> = first.split(',').map(str::trim).collect();
        let is_header = match (column, index) {
            (CsvColumn::Name(name), _) => {
                let pos = fields.iter().position(|f| f.trim_matches('"') == name);
                index = Some(pos.ok_or_else(|| Error::Parse {
                    path: path.to_path_buf(),
                    line: 1,
                    message: format!("no column named {name:?} in header"),
                })?);
                true
            }
            (_, Some(i)) => fields.get(i).is_none_or(|f| f.parse::<f64>().is_err()),
            _ => false,
        };
        if is_header {
            lines.next();
        }
    }
    let index = index.unwrap_or(0);

    let mut samples = Vec::new();
    for (i, line) in lines {
        let field = line.split(',').nth(index).map(str::trim).ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: format!("missing column {index}"),
        })?;
        let value: f64 = field.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: format!("expected a number, found {field:?}"),
        })?;
        samples.push(value);
    }
    if samples.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: "file contains no samples".into(),
        });
    }
    Signal::new(samples, sample_rate, label, source_id_for(path))
}
