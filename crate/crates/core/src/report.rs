//! Summary tables for the two worked analyses: citation structure and
//! missing citations of a corpus, and keyword-driven topic exploration.

use crate::corpus::{ArticleId, CitationGraph, Corpus};
use crate::embedding::AspectId;
use crate::patterns::{
    cluster, coverage_stats, evaluate_criteria, track, tracked_mask, ClusterView, CoverageStats,
    CriteriaSpec, Criterion, PatternError, TrackQuery,
};
use crate::simstore::{SimilarityModel, StoreMode, TriState};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissingCitation {
    pub a: ArticleId,
    pub b: ArticleId,
    pub text_score: f64,
    pub author_score: f64,
    pub author_class: TriState,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CitationReport {
    pub articles: usize,
    pub topology_mode: StoreMode,
    pub authors_mode: StoreMode,
    /// Articles in at least one pair with {topology: yes}.
    pub intra_set_citation: CoverageStats,
    /// Articles in at least one pair with {topology: yes, authors: yes}.
    pub self_citation: CoverageStats,
    /// Same two figures restricted to direct citation links.
    pub direct_citation: CoverageStats,
    pub direct_self_citation: CoverageStats,
    /// Pairs with {text: yes, topology: no}, best text score first.
    pub missing_citations: Vec<MissingCitation>,
    pub missing_with_similar_authors: usize,
    pub missing_without_similar_authors: usize,
}

fn spec(pairs: &[(AspectId, Criterion)]) -> CriteriaSpec {
    pairs
        .iter()
        .fold(CriteriaSpec::default(), |s, &(a, c)| s.with(a, c))
}

pub fn citation_report(
    corpus: &Corpus,
    graph: &CitationGraph,
    model: &SimilarityModel,
) -> Result<CitationReport, PatternError> {
    use AspectId::*;
    use Criterion::*;
    let n = model.len();
    let intra = evaluate_criteria(&spec(&[(Topology, Yes)]), model)?;
    let selfc = evaluate_criteria(&spec(&[(Topology, Yes), (Authors, Yes)]), model)?;

    let direct: Vec<(u32, u32)> = {
        let mut e: Vec<(u32, u32)> = graph
            .edges()
            .iter()
            .map(|&(s, t)| (s.min(t) as u32, s.max(t) as u32))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    };
    let direct_self: Vec<(u32, u32)> = direct
        .iter()
        .copied()
        .filter(|&(i, j)| model.class(Authors, i as usize, j as usize) == TriState::Similar)
        .collect();

    let missing = evaluate_criteria(&spec(&[(Text, Yes), (Topology, No)]), model)?;
    let mut missing_citations: Vec<MissingCitation> = missing
        .pairs
        .iter()
        .map(|&(i, j)| {
            let (i, j) = (i as usize, j as usize);
            MissingCitation {
                a: model.id(i).clone(),
                b: model.id(j).clone(),
                text_score: model.score(Text, i, j),
                author_score: model.score(Authors, i, j),
                author_class: model.class(Authors, i, j),
            }
        })
        .collect();
    missing_citations.sort_by(|x, y| {
        y.text_score
            .total_cmp(&x.text_score)
            .then_with(|| (&x.a, &x.b).cmp(&(&y.a, &y.b)))
    });
    let similar_authors = missing_citations
        .iter()
        .filter(|m| m.author_class == TriState::Similar)
        .count();
    debug_assert_eq!(corpus.len(), n);

    Ok(CitationReport {
        articles: n,
        topology_mode: model.store(Topology).mode(),
        authors_mode: model.store(Authors).mode(),
        intra_set_citation: coverage_stats(&intra.pairs, n),
        self_citation: coverage_stats(&selfc.pairs, n),
        direct_citation: coverage_stats(&direct, n),
        direct_self_citation: coverage_stats(&direct_self, n),
        missing_without_similar_authors: missing_citations.len() - similar_authors,
        missing_with_similar_authors: similar_authors,
        missing_citations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopicReport {
    pub query: TrackQuery,
    pub tracked: Vec<ArticleId>,
    pub criteria: CriteriaSpec,
    /// Clusters holding at least one tracked article, largest first.
    pub clusters: Vec<ClusterView>,
    pub unclustered_tracked: Vec<ArticleId>,
    pub stats: CoverageStats,
}

/// Tracks `query`, then clusters under `criteria` (text similarity by
/// default) keeping only clusters with a tracked member.
pub fn topic_report(
    query: &TrackQuery,
    criteria: Option<CriteriaSpec>,
    corpus: &Corpus,
    model: &SimilarityModel,
) -> Result<TopicReport, PatternError> {
    let criteria = criteria.unwrap_or_else(|| spec(&[(AspectId::Text, Criterion::Yes)]));
    let tracked = track(query, corpus)?;
    let matches = evaluate_criteria(&criteria, model)?;
    let mask = tracked_mask(model.len(), &tracked);
    let result = cluster(&matches, None, Some(&mask), model);
    Ok(TopicReport {
        query: query.clone(),
        tracked: tracked.iter().map(|&i| model.id(i).clone()).collect(),
        criteria,
        clusters: result
            .clusters
            .iter()
            .map(|c| c.view(model, false))
            .collect(),
        unclustered_tracked: result
            .unclustered
            .iter()
            .map(|&i| model.id(i).clone())
            .collect(),
        stats: result.stats,
    })
}
