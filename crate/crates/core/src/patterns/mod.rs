//! Criteria queries over the pair stores and the analytics built on them:
//! clusters, coverage statistics, similarity networks, target-to-all
//! reports, tracking and external-abstract matching.

mod cluster;
mod criteria;
mod network;
mod target;
mod tracking;
mod upload;

pub use cluster::{
    cluster, cluster_summary, connected_components, coverage_stats, edge_strength, edge_strengths,
    Cluster, ClusterResult, ClusterSummary, ClusterView, CoverageStats, UnionFind,
};
pub use criteria::{evaluate_criteria, CriteriaSpec, Criterion, MatchSet};
pub use network::{
    betweenness, network_for_members, similarity_network, NetworkEdge, NetworkNode,
    SimilarityNetwork, BRIDGE_FRACTION,
};
pub use target::{status_for, target_to_all, TargetEntry, TargetReport, TargetStatus};
pub use tracking::{track, tracked_mask, TrackQuery};
pub use upload::{match_external_abstract, UploadMatch};

use crate::corpus::{ArticleId, Corpus};
use crate::embedding::AspectId;
use crate::simstore::SimilarityModel;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum PatternError {
    #[error("no criterion is active")]
    NoActiveCriteria,
    #[error("unknown article {0}")]
    UnknownId(ArticleId),
    #[error("tracking query has neither keyword nor author")]
    EmptyQuery,
    #[error("members are not connected by matching pairs")]
    DisconnectedMembers,
    #[error("vector length {0} does not match the model dimension {1}")]
    DimensionMismatch(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub criteria: CriteriaSpec,
    pub clusters: Vec<ClusterView>,
    pub unclustered: Vec<ArticleId>,
    pub stats: CoverageStats,
    /// Number of tracked articles when a tracking query was given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tracked_count: Option<usize>,
    pub banner: String,
}

/// Evaluates criteria, clusters the matches and applies optional tracking.
pub fn run_query(
    spec: &CriteriaSpec,
    tracking: Option<&TrackQuery>,
    corpus: &Corpus,
    model: &SimilarityModel,
) -> Result<QueryResult, PatternError> {
    let matches = evaluate_criteria(spec, model)?;
    let tracked = tracking.map(|q| track(q, corpus)).transpose()?;
    let mask = tracked.as_ref().map(|t| tracked_mask(model.len(), t));
    let result = cluster(&matches, None, mask.as_deref(), model);
    let banner = banner(spec, &result, tracking.zip(tracked.as_ref().map(Vec::len)));
    Ok(QueryResult {
        criteria: *spec,
        clusters: result
            .clusters
            .iter()
            .map(|c| c.view(model, false))
            .collect(),
        unclustered: result
            .unclustered
            .iter()
            .map(|&i| model.id(i).clone())
            .collect(),
        stats: result.stats,
        tracked_count: tracked.map(|t| t.len()),
        banner,
    })
}

fn plural(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

/// Plain-text explanation of the settings and results for the header.
pub fn banner(
    spec: &CriteriaSpec,
    result: &ClusterResult,
    tracking: Option<(&TrackQuery, usize)>,
) -> String {
    let settings: Vec<String> = spec
        .active()
        .into_iter()
        .map(|(a, c)| {
            format!(
                "{} {}",
                a.label(),
                if c == Criterion::Yes {
                    "similar"
                } else {
                    "dissimilar"
                }
            )
        })
        .collect();
    let inactive: Vec<&str> = AspectId::ALL
        .into_iter()
        .filter(|&a| spec.get(a) == Criterion::Inactive)
        .map(|a| a.label())
        .collect();
    let s = &result.stats;
    let mut text = format!(
        "Showing pairs where {}{}. {} cover {} ({:.1}% of all articles), forming {}.",
        settings.join(" and "),
        if inactive.is_empty() {
            String::new()
        } else {
            format!("; ignoring {}", inactive.join(", "))
        },
        plural(s.pair_count, "matching pair", "matching pairs"),
        plural(s.covered_articles, "article", "articles"),
        100.0 * s.covered_fraction,
        plural(result.clusters.len(), "cluster", "clusters"),
    );
    if let Some((q, count)) = tracking {
        let mut what = Vec::new();
        if let Some(k) = q.keyword.as_deref().filter(|k| !k.trim().is_empty()) {
            what.push(format!("keyword \"{}\"", k.trim()));
        }
        if let Some(a) = q.author.as_deref().filter(|a| !a.trim().is_empty()) {
            what.push(format!("author \"{}\"", a.trim()));
        }
        text.push_str(&format!(
            " Tracking {}: {} tracked, {} shown.",
            what.join(" and "),
            plural(count, "article", "articles"),
            plural(result.clusters.len(), "cluster", "clusters"),
        ));
    }
    text
}
