//! Per-feature significance tests, feature ranking, and box-plot summaries.

mod boxplot;
mod hypothesis;
mod ranking;
pub mod special;

pub use boxplot::{boxplot_summary, quantile_sorted, BoxplotSummary};
pub use hypothesis::{anova_oneway, kruskal_wallis, midranks, AnovaResult, KruskalResult, P_VALUE_FLOOR};
pub use ranking::{group_column, rank_features, FeatureSelection, FeatureTests, RankedFeature, SignificanceReport};
