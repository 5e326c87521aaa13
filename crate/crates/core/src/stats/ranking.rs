use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::hypothesis::{anova_oneway, kruskal_wallis, AnovaResult, KruskalResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub index: usize,
    pub name: String,
    pub h_statistic: f64,
    pub p_value: f64,
}

/// Splits column `feature` of `rows` into one group per distinct label,
/// groups ordered by label.
pub fn group_column<L: Ord + Clone>(rows: &[Vec<f64>], labels: &[L], feature: usize) -> Result<Vec<Vec<f64>>> {
    if rows.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} rows but {} labels",
            rows.len(),
            labels.len()
        )));
    }
    let mut groups: BTreeMap<L, Vec<f64>> = BTreeMap::new();
    for (row, label) in rows.iter().zip(labels) {
        let v = *row.get(feature).ok_or(Error::DimensionMismatch {
            expected: feature + 1,
            actual: row.len(),
        })?;
        groups.entry(label.clone()).or_default().push(v);
    }
    if groups.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 classes, found {}",
            groups.len()
        )));
    }
    Ok(groups.into_values().collect())
}

/// Orders features by ascending Kruskal-Wallis p-value (ties by larger H,
/// then by column index).
pub fn rank_features<L: Ord + Clone>(rows: &[Vec<f64>], labels: &[L], names: &[String]) -> Result<Vec<RankedFeature>> {
    let mut ranked = Vec::with_capacity(names.len());
    for (index, name) in names.iter().enumerate() {
        let kw = kruskal_wallis(&group_column(rows, labels, index)?)?;
        ranked.push(RankedFeature {
            index,
            name: name.clone(),
            h_statistic: kw.h_statistic,
            p_value: kw.p_value,
        });
    }
    ranked.sort_by(|a, b| {
        a.p_value
            .total_cmp(&b.p_value)
            .then(b.h_statistic.total_cmp(&a.h_statistic))
            .then(a.index.cmp(&b.index))
    });
    Ok(ranked)
}

/// Which ranked features are passed on to the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "value")]
pub enum FeatureSelection {
    #[default]
    All,
    TopK(usize),
    MaxPValue(f64),
}

impl FeatureSelection {
    pub fn apply<'a>(&self, ranked: &'a [RankedFeature]) -> Vec<&'a RankedFeature> {
        match *self {
            FeatureSelection::All => ranked.iter().collect(),
            FeatureSelection::TopK(k) => ranked.iter().take(k).collect(),
            FeatureSelection::MaxPValue(p) => ranked.iter().filter(|f| f.p_value <= p).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTests {
    pub anova: AnovaResult,
    pub kruskal: KruskalResult,
}

/// ANOVA and Kruskal-Wallis results per feature and classification problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceReport {
    pub features: Vec<String>,
    pub problems: Vec<String>,
    /// `results[feature][problem]`
    pub results: Vec<Vec<FeatureTests>>,
}

impl SignificanceReport {
    pub fn new(features: Vec<String>) -> Self {
        let results = vec![Vec::new(); features.len()];
        SignificanceReport {
            features,
            problems: Vec::new(),
            results,
        }
    }

    /// Tests every feature column for one problem.
    pub fn add_problem<L: Ord + Clone>(&mut self, problem: &str, rows: &[Vec<f64>], labels: &[L]) -> Result<()> {
        for (f, slot) in self.results.iter_mut().enumerate() {
            let groups = group_column(rows, labels, f)?;
            slot.push(FeatureTests {
                anova: anova_oneway(&groups)?,
                kruskal: kruskal_wallis(&groups)?,
            });
        }
        self.problems.push(problem.to_string());
        Ok(())
    }

    pub fn get(&self, feature: &str, problem: &str) -> Option<&FeatureTests> {
        let f = self.features.iter().position(|n| n == feature)?;
        let p = self.problems.iter().position(|n| n == problem)?;
        self.results[f].get(p)
    }

    /// Wide table: one row per feature, ANOVA and Kruskal-Wallis p-values
    /// for every problem.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature");
        for p in &self.problems {
            write!(out, ",{p}_anova_p,{p}_kruskal_p").unwrap();
        }
        out.push('\n');
        for (name, row) in self.features.iter().zip(&self.results) {
            out.push_str(name);
            for t in row {
                write!(out, ",{:e},{:e}", t.anova.p_value, t.kruskal.p_value).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
