use super::PatternError;
use crate::corpus::{tokenize, Corpus};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Keyword and/or author filter. Blank fields count as absent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackQuery {
    pub keyword: Option<String>,
    pub author: Option<String>,
}

impl TrackQuery {
    pub fn keyword(k: &str) -> Self {
        TrackQuery {
            keyword: Some(k.to_owned()),
            author: None,
        }
    }

    pub fn author(a: &str) -> Self {
        TrackQuery {
            keyword: None,
            author: Some(a.to_owned()),
        }
    }

    fn field(f: &Option<String>) -> Option<&str> {
        f.as_deref().map(str::trim).filter(|s| !s.is_empty())
    }

    pub fn is_empty(&self) -> bool {
        Self::field(&self.keyword).is_none() && Self::field(&self.author).is_none()
    }
}

/// Sorted corpus indices of tracked articles.
///
/// A keyword is tokenized like article text and matches articles whose
/// title, abstract or keyword tokens contain every resulting token. A
/// keyword that leaves no token (all stopwords) tracks nothing. Authors
/// match by case-insensitive substring of any author name. Both given means
/// both must hold.
pub fn track(query: &TrackQuery, corpus: &Corpus) -> Result<Vec<usize>, PatternError> {
    if query.is_empty() {
        return Err(PatternError::EmptyQuery);
    }
    let mut result: Option<BTreeSet<usize>> = None;

    if let Some(k) = TrackQuery::field(&query.keyword) {
        let tokens = tokenize(k);
        let mut hits: Option<BTreeSet<usize>> = None;
        for t in &tokens {
            let docs = corpus.token_index().get(t).cloned().unwrap_or_default();
            hits = Some(match hits {
                None => docs,
                Some(h) => h.intersection(&docs).copied().collect(),
            });
        }
        result = Some(hits.unwrap_or_default());
    }

    if let Some(a) = TrackQuery::field(&query.author) {
        let needle = a.to_lowercase();
        let hits: BTreeSet<usize> = corpus
            .author_index()
            .iter()
            .filter(|(name, _)| name.to_lowercase().contains(&needle))
            .flat_map(|(_, docs)| docs.iter().copied())
            .collect();
        result = Some(match result {
            None => hits,
            Some(r) => r.intersection(&hits).copied().collect(),
        });
    }
    Ok(result.unwrap_or_default().into_iter().collect())
}

/// Boolean mask over the corpus from a list of tracked indices.
pub fn tracked_mask(n: usize, tracked: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n];
    tracked.iter().for_each(|&i| mask[i] = true);
    mask
}
