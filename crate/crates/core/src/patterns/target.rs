use super::{edge_strength, CriteriaSpec, PatternError};
use crate::corpus::{tokenize, ArticleId, Corpus};
use crate::embedding::AspectId;
use crate::simstore::{AspectScore, SimilarityModel};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetStatus {
    Match,
    /// Exactly one active criterion fails; it is the named aspect.
    NearMiss(AspectId),
    Other,
}

impl TargetStatus {
    fn rank(self) -> u8 {
        match self {
            TargetStatus::Match => 0,
            TargetStatus::NearMiss(_) => 1,
            TargetStatus::Other => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetEntry {
    pub id: ArticleId,
    pub aspects: BTreeMap<AspectId, AspectScore>,
    pub status: TargetStatus,
    /// Ordering key: mean score over Yes aspects (see [`edge_strength`]).
    pub strength: f64,
    pub shared_authors: Vec<String>,
    pub shared_words: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetReport {
    pub target: ArticleId,
    pub criteria: CriteriaSpec,
    pub match_count: usize,
    pub near_miss_count: usize,
    pub entries: Vec<TargetEntry>,
}

pub fn status_for(
    spec: &CriteriaSpec,
    model: &SimilarityModel,
    i: usize,
    j: usize,
) -> TargetStatus {
    let failed = spec.violations(model, i, j);
    match failed.as_slice() {
        [] => TargetStatus::Match,
        [a] => TargetStatus::NearMiss(*a),
        _ => TargetStatus::Other,
    }
}

fn abstract_tokens(corpus: &Corpus, id: &ArticleId) -> BTreeSet<String> {
    corpus
        .get(id)
        .map(|a| tokenize(&a.abstract_text).into_iter().collect())
        .unwrap_or_default()
}

/// Classifies every other article against `target`. Matches come first,
/// then near misses, each by descending strength; everything else follows
/// by id. Co-occurring authors and abstract words are filled in for matches
/// and near misses only.
pub fn target_to_all(
    target: &ArticleId,
    spec: &CriteriaSpec,
    model: &SimilarityModel,
    corpus: &Corpus,
) -> Result<TargetReport, PatternError> {
    spec.require_active()?;
    let t = model
        .index_of(target)
        .map_err(|_| PatternError::UnknownId(target.clone()))?;
    let t_authors: BTreeSet<&str> = corpus
        .get(target)
        .map(|a| a.authors.iter().map(String::as_str).collect())
        .unwrap_or_default();
    let t_words = abstract_tokens(corpus, target);

    let mut entries: Vec<TargetEntry> = (0..model.len())
        .filter(|&c| c != t)
        .map(|c| {
            let id = model.id(c).clone();
            let status = status_for(spec, model, t, c);
            let (shared_authors, shared_words) = if status == TargetStatus::Other {
                (Vec::new(), Vec::new())
            } else {
                let authors = corpus
                    .get(&id)
                    .map(|a| {
                        a.authors
                            .iter()
                            .filter(|n| t_authors.contains(n.as_str()))
                            .cloned()
                            .collect()
                    })
                    .unwrap_or_default();
                let words = abstract_tokens(corpus, &id)
                    .intersection(&t_words)
                    .cloned()
                    .collect();
                (authors, words)
            };
            TargetEntry {
                aspects: AspectId::ALL
                    .into_iter()
                    .map(|a| (a, model.aspect_score(a, t, c)))
                    .collect(),
                strength: edge_strength(spec, model, t, c),
                status,
                shared_authors,
                shared_words,
                id,
            }
        })
        .collect();

    entries.sort_by(|a, b| {
        a.status.rank().cmp(&b.status.rank()).then_with(|| {
            if a.status == TargetStatus::Other {
                a.id.cmp(&b.id)
            } else {
                b.strength
                    .total_cmp(&a.strength)
                    .then_with(|| a.id.cmp(&b.id))
            }
        })
    });
    Ok(TargetReport {
        target: target.clone(),
        criteria: *spec,
        match_count: entries
            .iter()
            .filter(|e| e.status == TargetStatus::Match)
            .count(),
        near_miss_count: entries
            .iter()
            .filter(|e| matches!(e.status, TargetStatus::NearMiss(_)))
            .count(),
        entries,
    })
}
