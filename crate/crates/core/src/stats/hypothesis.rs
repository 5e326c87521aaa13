use serde::{Deserialize, Serialize};

use super::special::{chi2_sf, f_sf};
use crate::error::{Error, Result};

/// Smallest p-value reported; anything below is clamped and flagged.
pub const P_VALUE_FLOOR: f64 = 1e-300;

fn clamp_p(p: f64) -> (f64, bool) {
    if p < P_VALUE_FLOOR {
        (P_VALUE_FLOOR, true)
    } else {
        (p.min(1.0), false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub f_statistic: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub p_value: f64,
    /// True when the exact p-value fell below [`P_VALUE_FLOOR`].
    pub p_clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruskalResult {
    pub h_statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub tie_corrected: bool,
    pub p_clamped: bool,
}

fn check_values<G: AsRef<[f64]>>(groups: &[G]) -> Result<()> {
    for (g, group) in groups.iter().enumerate() {
        if group.as_ref().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("group {g} contains non-finite values")));
        }
    }
    Ok(())
}

/// Classic one-way analysis of variance.
pub fn anova_oneway<G: AsRef<[f64]>>(groups: &[G]) -> Result<AnovaResult> {
    if groups.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "ANOVA needs at least 2 groups, got {}",
            groups.len()
        )));
    }
    if let Some(g) = groups.iter().position(|g| g.as_ref().len() < 2) {
        return Err(Error::InvalidInput(format!(
            "ANOVA needs at least 2 samples per group; group {g} has {}",
            groups[g].as_ref().len()
        )));
    }
    check_values(groups)?;

    let k = groups.len();
    let total: usize = groups.iter().map(|g| g.as_ref().len()).sum();
    let means: Vec<f64> = groups
        .iter()
        .map(|g| g.as_ref().iter().sum::<f64>() / g.as_ref().len() as f64)
        .collect();
    let grand = groups.iter().flat_map(|g| g.as_ref()).sum::<f64>() / total as f64;

    let ss_between: f64 = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.as_ref().len() as f64 * (m - grand).powi(2))
        .sum();
    let ss_within: f64 = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.as_ref().iter().map(|v| (v - m).powi(2)).sum::<f64>())
        .sum();

    let (df_between, df_within) = (k - 1, total - k);
    if ss_within == 0.0 {
        let means_equal = means.iter().all(|&m| m == means[0]);
        if means_equal {
            return Ok(AnovaResult {
                f_statistic: 0.0,
                df_between,
                df_within,
                p_value: 1.0,
                p_clamped: false,
            });
        }
        return Err(Error::Numeric(
            "zero within-group variance with distinct group means".into(),
        ));
    }
    let f = (ss_between / df_between as f64) / (ss_within / df_within as f64);
    let (p_value, p_clamped) = clamp_p(f_sf(f, df_between as f64, df_within as f64)?);
    Ok(AnovaResult {
        f_statistic: f,
        df_between,
        df_within,
        p_value,
        p_clamped,
    })
}

/// Mid-ranks (1-based) of `values`, ties sharing the average rank, plus the
/// tie sizes.
pub fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = rank;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

/// Kruskal-Wallis H test with mid-rank tie handling and tie correction.
pub fn kruskal_wallis<G: AsRef<[f64]>>(groups: &[G]) -> Result<KruskalResult> {
    if groups.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "Kruskal-Wallis needs at least 2 groups, got {}",
            groups.len()
        )));
    }
    if let Some(g) = groups.iter().position(|g| g.as_ref().is_empty()) {
        return Err(Error::InvalidInput(format!("group {g} is empty")));
    }
    check_values(groups)?;

    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.as_ref().iter().copied()).collect();
    let n = pooled.len() as f64;
    let df = groups.len() - 1;
    let (ranks, ties) = midranks(&pooled);

    let tie_sum: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
    let correction = 1.0 - tie_sum / (n * n * n - n);
    if correction <= 0.0 {
        // every value identical
        return Ok(KruskalResult {
            h_statistic: 0.0,
            df,
            p_value: 1.0,
            tie_corrected: true,
            p_clamped: false,
        });
    }

    let mut offset = 0;
    let mut sum_sq = 0.0;
    for g in groups {
        let len = g.as_ref().len();
        let r: f64 = ranks[offset..offset + len].iter().sum();
        sum_sq += r * r / len as f64;
        offset += len;
    }
    let h_raw = 12.0 / (n * (n + 1.0)) * sum_sq - 3.0 * (n + 1.0);
    let h = (h_raw / correction).max(0.0);
    let (p_value, p_clamped) = clamp_p(chi2_sf(h, df as f64)?);
    Ok(KruskalResult {
        h_statistic: h,
        df,
        p_value,
        tie_corrected: !ties.is_empty(),
        p_clamped,
    })
}
