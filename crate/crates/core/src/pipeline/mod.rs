//! End-to-end runs: records → StationPlots → CHG features → significance
//! tests → repeated SVM evaluation → figures, written under one output
//! directory:
//!
//! ```text
//! embeddings/<class>/<record>_n<order>.csv (.svg)
//! features/features.csv          features/excluded.csv
//! stats/significance_n<order>.csv|json
//! reports/<problem>_n<order>.json|txt   reports/summary.json|txt
//! figures/*.svg
//! ```
//!
//! All per-record and per-run work goes through rayon; results are collected
//! in input order, so outputs do not depend on the number of threads.

mod config;
mod table;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{InputFormat, PipelineConfig, ProblemEntry};
pub use table::{exclusions_csv, Exclusion, FeatureRow, FeatureTable};

use crate::embedding::{embed, PointCloud, Points};
use crate::error::{Error, Result};
use crate::eval::{run_experiment, EvalReport, LabeledDataset, ProblemSpec};
use crate::geometry::{chg_features, quickhull2d, quickhull3d, Hull};
use crate::ingest::{load_csv, load_set, preprocess, sorted_files, CsvColumn, Signal};
use crate::plot::{render_boxplot, render_stationplot};
use crate::stats::{boxplot_summary, rank_features, RankedFeature, SignificanceReport};

pub const EMBEDDINGS_DIR: &str = "embeddings";
pub const FEATURES_DIR: &str = "features";
pub const STATS_DIR: &str = "stats";
pub const REPORTS_DIR: &str = "reports";
pub const FIGURES_DIR: &str = "figures";
pub const FEATURES_FILE: &str = "features.csv";
pub const EXCLUDED_FILE: &str = "excluded.csv";

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidConfig("threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot start {n} worker threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Loads every class directory (classes in tag order, files by name) and
/// applies the optional band-pass stage.
pub fn load_records(config: &PipelineConfig) -> Result<Vec<Signal>> {
    let mut raw = Vec::new();
    for (class, dir) in &config.data {
        let set = match config.input_format {
            InputFormat::Bonn => load_set(dir, class)?,
            InputFormat::Csv => {
                let files = sorted_files(dir)?;
                if files.is_empty() {
                    return Err(Error::InvalidInput(format!(
                        "{}: directory contains no records",
                        dir.display()
                    )));
                }
                files
                    .iter()
                    .map(|f| load_csv(f, &CsvColumn::Index(0), config.sample_rate, class))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        log::info!("loaded {} records of class {class} from {}", set.len(), dir.display());
        raw.extend(set);
    }
    raw.par_iter()
        .map(|s| preprocess(s, config.bandpass.as_ref()))
        .collect()
}

/// Writes one point-cloud CSV per record and order (plus an SVG when
/// plotting is enabled). Returns the number of clouds written.
pub fn run_embed(config: &PipelineConfig, records: &[Signal]) -> Result<usize> {
    config.validate_settings()?;
    let jobs: Vec<(&Signal, usize)> = records
        .iter()
        .flat_map(|r| config.orders.iter().map(move |&n| (r, n)))
        .collect();
    let written: Vec<Result<()>> = jobs
        .par_iter()
        .map(|&(rec, order)| {
            let cloud = embed(rec, &config.embedding(order))?;
            let stem = config
                .output
                .join(EMBEDDINGS_DIR)
                .join(file_safe(rec.label()))
                .join(format!("{}_n{order}", file_safe(rec.source_id())));
            write_file(&stem.with_extension("csv"), &cloud.to_csv())?;
            if config.plot {
                let svg = render_stationplot(&cloud, cloud_hull(&cloud).as_ref(), Some(rec.label()), &config.style)?;
                write_file(&stem.with_extension("svg"), &svg)?;
            }
            Ok(())
        })
        .collect();
    for w in written {
        w?;
    }
    Ok(jobs.len())
}

fn cloud_hull(cloud: &PointCloud) -> Option<Hull> {
    match cloud.points() {
        Points::Planar(p) => quickhull2d(p).ok().map(Hull::Planar),
        Points::Spatial(p) => quickhull3d(p).ok().map(Hull::Spatial),
    }
}

/// Feature rows for every record and order; records whose embedding or hull
/// is degenerate are returned as exclusions instead.
pub fn extract_features(config: &PipelineConfig, records: &[Signal]) -> (FeatureTable, Vec<Exclusion>) {
    let jobs: Vec<(&Signal, usize)> = config
        .orders
        .iter()
        .flat_map(|&n| records.iter().map(move |r| (r, n)))
        .collect();
    let results: Vec<std::result::Result<FeatureRow, Exclusion>> = jobs
        .par_iter()
        .map(|&(rec, order)| {
            embed(rec, &config.embedding(order))
                .and_then(|cloud| chg_features(&cloud))
                .map(|f| FeatureRow {
                    source_id: rec.source_id().to_string(),
                    label: rec.label().to_string(),
                    order,
                    values: f.values(),
                })
                .map_err(|e| Exclusion {
                    source_id: rec.source_id().to_string(),
                    label: rec.label().to_string(),
                    order,
                    reason: e.to_string(),
                })
        })
        .collect();
    let mut table = FeatureTable {
        names: config.all_feature_names().iter().map(|s| s.to_string()).collect(),
        rows: Vec::new(),
    };
    let mut excluded = Vec::new();
    for r in results {
        match r {
            Ok(row) => table.rows.push(row),
            Err(e) => {
                log::warn!(
                    "excluding {} (class {}, n = {}): {}",
                    e.source_id,
                    e.label,
                    e.order,
                    e.reason
                );
                excluded.push(e);
            }
        }
    }
    (table, excluded)
}

/// Extracts and writes `features/features.csv` and `features/excluded.csv`.
pub fn run_features(config: &PipelineConfig, records: &[Signal]) -> Result<(FeatureTable, Vec<Exclusion>)> {
    config.validate_settings()?;
    let (table, excluded) = extract_features(config, records);
    let dir = config.output.join(FEATURES_DIR);
    write_file(&dir.join(FEATURES_FILE), &table.to_csv()?)?;
    write_file(&dir.join(EXCLUDED_FILE), &exclusions_csv(&excluded))?;
    Ok((table, excluded))
}

/// Rows of one order whose class takes part in `problem`, labelled ±1.
pub fn problem_dataset(table: &FeatureTable, problem: &ProblemSpec, order: usize) -> (Vec<Vec<f64>>, Vec<i8>) {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for r in table.rows.iter().filter(|r| r.order == order) {
        if let Some(l) = problem.label_of(&r.label) {
            rows.push(r.values.clone());
            labels.push(l);
        }
    }
    (rows, labels)
}

fn check_two_classes(labels: &[i8], problem: &ProblemSpec, order: usize) -> Result<()> {
    if !labels.contains(&1) || !labels.contains(&-1) {
        return Err(Error::InvalidInput(format!(
            "problem `{}` at n = {order}: feature table lacks one of the classes",
            problem.name
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderSignificance {
    pub order: usize,
    pub report: SignificanceReport,
}

/// Orders present in the table and requested by the configuration.
fn table_orders(config: &PipelineConfig, table: &FeatureTable) -> Result<Vec<usize>> {
    let orders: Vec<usize> = table
        .orders()
        .into_iter()
        .filter(|o| config.orders.contains(o))
        .collect();
    if orders.is_empty() {
        return Err(Error::InvalidInput(format!(
            "feature table has orders {:?}, none of the requested {:?}",
            table.orders(),
            config.orders
        )));
    }
    Ok(orders)
}

/// Problems over the classes named in `data` or present in the table.
fn table_problems(config: &PipelineConfig, table: &FeatureTable) -> Result<Vec<ProblemSpec>> {
    let classes = config
        .data
        .keys()
        .map(String::as_str)
        .chain(table.rows.iter().map(|r| r.label.as_str()));
    config.problems_for(classes)
}

/// ANOVA and Kruskal-Wallis tables for every order, box plots per feature.
pub fn run_stats(config: &PipelineConfig, table: &FeatureTable) -> Result<Vec<OrderSignificance>> {
    config.validate_settings()?;
    let problems = table_problems(config, table)?;
    let table = table.select(&config.selected_features())?;
    let orders = table_orders(config, &table)?;
    let mut out = Vec::new();
    for &order in &orders {
        let mut report = SignificanceReport::new(table.names.clone());
        for p in &problems {
            let (rows, labels) = problem_dataset(&table, p, order);
            check_two_classes(&labels, p, order)?;
            report.add_problem(&p.name, &rows, &labels)?;
        }
        let dir = config.output.join(STATS_DIR);
        write_file(&dir.join(format!("significance_n{order}.csv")), &report.to_csv())?;
        write_file(&dir.join(format!("significance_n{order}.json")), &report.to_json()?)?;

        if config.plot {
            let classes: std::collections::BTreeSet<&String> = table.rows.iter().map(|r| &r.label).collect();
            for (f, name) in table.names.iter().enumerate() {
                let mut summaries = Vec::new();
                for class in &classes {
                    let values: Vec<f64> = table
                        .rows
                        .iter()
                        .filter(|r| r.order == order && &&r.label == class)
                        .map(|r| r.values[f])
                        .collect();
                    if !values.is_empty() {
                        summaries.push((class.to_string(), boxplot_summary(&values)?));
                    }
                }
                if !summaries.is_empty() {
                    let svg = render_boxplot(&summaries, &format!("{name} (n = {order})"), &config.style)?;
                    write_file(
                        &config
                            .output
                            .join(FIGURES_DIR)
                            .join(format!("boxplot_{}_n{order}.svg", file_safe(name))),
                        &svg,
                    )?;
                }
            }
        }
        out.push(OrderSignificance { order, report });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub problem: ProblemSpec,
    pub order: usize,
    pub ranking: Vec<RankedFeature>,
    pub features_used: Vec<String>,
    pub evaluation: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestResult {
    pub problem: String,
    pub order: usize,
    pub kernel: String,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationSummary {
    pub reports: Vec<ClassificationReport>,
    /// Highest mean accuracy per problem over orders and kernels.
    pub best: Vec<BestResult>,
}

fn best_results(reports: &[ClassificationReport], problems: &[ProblemSpec]) -> Vec<BestResult> {
    let mut best = Vec::new();
    for p in problems {
        let mut top: Option<BestResult> = None;
        for r in reports.iter().filter(|r| r.problem.name == p.name) {
            if let Some(k) = r.evaluation.best_kernel() {
                let (m, s) = (k.accuracy.mean.unwrap_or(0.0), k.accuracy.std.unwrap_or(0.0));
                if top.as_ref().is_none_or(|t| m > t.accuracy_mean) {
                    top = Some(BestResult {
                        problem: p.name.clone(),
                        order: r.order,
                        kernel: k.name.clone(),
                        accuracy_mean: m,
                        accuracy_std: s,
                    });
                }
            }
        }
        best.extend(top);
    }
    best
}

/// Repeated-split SVM evaluation for every problem and order.
pub fn run_classify(config: &PipelineConfig, table: &FeatureTable) -> Result<ClassificationSummary> {
    config.validate_settings()?;
    let problems = table_problems(config, table)?;
    let experiment = config.experiment()?;
    let table = table.select(&config.selected_features())?;
    let orders = table_orders(config, &table)?;
    let mut reports = Vec::new();
    let mut text = String::new();
    for p in &problems {
        for &order in &orders {
            let (rows, labels) = problem_dataset(&table, p, order);
            check_two_classes(&labels, p, order)?;
            let ranking = rank_features(&rows, &labels, &table.names)?;
            let chosen: Vec<usize> = config.selection.apply(&ranking).iter().map(|f| f.index).collect();
            if chosen.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "selection: no feature passes the rule for `{}` at n = {order}",
                    p.name
                )));
            }
            let mut chosen_sorted = chosen.clone();
            chosen_sorted.sort_unstable();
            let rows: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| chosen_sorted.iter().map(|&i| r[i]).collect())
                .collect();
            let dataset = LabeledDataset::new(rows, labels, p.name.clone())?;
            let evaluation = run_experiment(&dataset, &experiment)?;
            let report = ClassificationReport {
                problem: p.clone(),
                order,
                ranking,
                features_used: chosen_sorted.iter().map(|&i| table.names[i].clone()).collect(),
                evaluation,
            };
            let stem = config
                .output
                .join(REPORTS_DIR)
                .join(format!("{}_n{order}", file_safe(&p.name)));
            let table_text = format!("n = {order}\n{}", report.evaluation.to_table());
            write_file(&stem.with_extension("json"), &serde_json::to_string_pretty(&report)?)?;
            write_file(&stem.with_extension("txt"), &table_text)?;
            text.push_str(&table_text);
            text.push('\n');
            reports.push(report);
        }
    }
    let best = best_results(&reports, &problems);
    for b in &best {
        text.push_str(&format!(
            "best for {}: n = {}, {} with {:.2} ± {:.2} % accuracy\n",
            b.problem, b.order, b.kernel, b.accuracy_mean, b.accuracy_std
        ));
    }
    let summary = ClassificationSummary { reports, best };
    let dir = config.output.join(REPORTS_DIR);
    write_file(&dir.join("summary.json"), &serde_json::to_string_pretty(&summary.best)?)?;
    write_file(&dir.join("summary.txt"), &text)?;
    Ok(summary)
}

/// StationPlots with hull overlays for the first record of every class.
pub fn run_plot(config: &PipelineConfig, records: &[Signal]) -> Result<Vec<PathBuf>> {
    config.validate_settings()?;
    let mut firsts: Vec<&Signal> = Vec::new();
    for r in records {
        if !firsts.iter().any(|f| f.label() == r.label()) {
            firsts.push(r);
        }
    }
    let jobs: Vec<(&Signal, usize)> = firsts
        .iter()
        .flat_map(|&r| config.orders.iter().map(move |&n| (r, n)))
        .collect();
    jobs.par_iter()
        .map(|&(rec, order)| {
            let cloud = embed(rec, &config.embedding(order))?;
            let svg = render_stationplot(&cloud, cloud_hull(&cloud).as_ref(), Some(rec.label()), &config.style)?;
            let path = config.output.join(FIGURES_DIR).join(format!(
                "stationplot_{}_{}_n{order}.svg",
                file_safe(rec.label()),
                file_safe(rec.source_id())
            ));
            write_file(&path, &svg)?;
            Ok(path)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSummary {
    pub records: usize,
    pub feature_rows: usize,
    pub excluded: usize,
    pub best: Vec<BestResult>,
}

/// Every stage in sequence: (embeddings,) features, stats, classify, plots.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineSummary> {
    config.validate()?;
    let records = load_records(config)?;
    if config.save_embeddings {
        run_embed(config, &records)?;
    }
    let (table, excluded) = run_features(config, &records)?;
    run_stats(config, &table)?;
    let summary = run_classify(config, &table)?;
    if config.plot {
        run_plot(config, &records)?;
    }
    Ok(PipelineSummary {
        records: records.len(),
        feature_rows: table.rows.len(),
        excluded: excluded.len(),
        best: summary.best,
    })
}
