use super::PatternError;
use crate::embedding::AspectId;
use crate::simstore::{SimilarityModel, TriState};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One slider position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// Pair must be classified similar.
    Yes,
    /// Pair must be classified dissimilar.
    No,
    #[default]
    #[serde(alias = "unactive")]
    Inactive,
}

impl Criterion {
    /// Uncertain pairs satisfy neither `Yes` nor `No`.
    pub fn accepts(self, class: TriState) -> bool {
        match self {
            Criterion::Yes => class == TriState::Similar,
            Criterion::No => class == TriState::Dissimilar,
            Criterion::Inactive => true,
        }
    }
}

/// Slider state for all four aspects; missing aspects are inactive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct CriteriaSpec {
    pub topology: Criterion,
    pub text: Criterion,
    pub authors: Criterion,
    pub numeric: Criterion,
}

impl CriteriaSpec {
    pub fn get(&self, aspect: AspectId) -> Criterion {
        match aspect {
            AspectId::Topology => self.topology,
            AspectId::Text => self.text,
            AspectId::Authors => self.authors,
            AspectId::Numeric => self.numeric,
        }
    }

    pub fn with(mut self, aspect: AspectId, c: Criterion) -> Self {
        match aspect {
            AspectId::Topology => self.topology = c,
            AspectId::Text => self.text = c,
            AspectId::Authors => self.authors = c,
            AspectId::Numeric => self.numeric = c,
        }
        self
    }

    /// Active (aspect, criterion) pairs in aspect order.
    pub fn active(&self) -> Vec<(AspectId, Criterion)> {
        AspectId::ALL
            .into_iter()
            .map(|a| (a, self.get(a)))
            .filter(|(_, c)| *c != Criterion::Inactive)
            .collect()
    }

    pub fn aspects_with(&self, c: Criterion) -> Vec<AspectId> {
        AspectId::ALL
            .into_iter()
            .filter(|&a| self.get(a) == c)
            .collect()
    }

    pub fn has_active(&self) -> bool {
        AspectId::ALL
            .iter()
            .any(|&a| self.get(a) != Criterion::Inactive)
    }

    pub fn require_active(&self) -> Result<(), PatternError> {
        if self.has_active() {
            Ok(())
        } else {
            Err(PatternError::NoActiveCriteria)
        }
    }

    /// Active aspects whose criterion rejects the pair (i, j).
    pub fn violations(&self, model: &SimilarityModel, i: usize, j: usize) -> Vec<AspectId> {
        self.active()
            .into_iter()
            .filter(|&(a, c)| !c.accepts(model.class(a, i, j)))
            .map(|(a, _)| a)
            .collect()
    }
}

/// Pairs (i, j), i < j, satisfying every active criterion; sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchSet {
    pub criteria: CriteriaSpec,
    pub pairs: Vec<(u32, u32)>,
}

impl MatchSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        let (i, j) = crate::simstore::canonical(i, j);
        self.pairs.binary_search(&(i as u32, j as u32)).is_ok()
    }
}

pub fn evaluate_criteria(
    spec: &CriteriaSpec,
    model: &SimilarityModel,
) -> Result<MatchSet, PatternError> {
    spec.require_active()?;
    let active = spec.active();
    let accepts_all = |i: usize, j: usize, skip: Option<AspectId>| {
        active
            .iter()
            .all(|&(a, c)| Some(a) == skip || c.accepts(model.class(a, i, j)))
    };

    let yes = spec.aspects_with(Criterion::Yes);
    let pairs: Vec<(u32, u32)> =
        if let Some(&seed) = yes.iter().min_by_key(|&&a| model.store(a).counts().similar) {
            // Candidates come from the sparsest similar set among the Yes aspects.
            let entries = model.store(seed).entries();
            entries
                .par_chunks(4096)
                .map(|chunk| {
                    chunk
                        .iter()
                        .filter(|e| {
                            e.class == TriState::Similar
                                && accepts_all(e.i as usize, e.j as usize, Some(seed))
                        })
                        .map(|e| (e.i, e.j))
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>()
                .concat()
        } else {
            // Only No criteria: every pair is a candidate unless some No store
            // holds it as similar or uncertain.
            let n = model.len();
            let no = spec.aspects_with(Criterion::No);
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut blocked: Vec<u32> = no
                        .iter()
                        .flat_map(|&a| model.store(a).row(i).iter().map(|e| e.j))
                        .collect();
                    blocked.sort_unstable();
                    blocked.dedup();
                    let mut out = Vec::with_capacity(n - i - 1 - blocked.len().min(n - i - 1));
                    let mut b = blocked.iter().peekable();
                    for j in (i + 1) as u32..n as u32 {
                        if b.peek() == Some(&&j) {
                            b.next();
                            continue;
                        }
                        out.push((i as u32, j));
                    }
                    out
                })
                .collect::<Vec<_>>()
                .concat()
        };
    Ok(MatchSet {
        criteria: *spec,
        pairs,
    })
}
