//! Per-aspect article embeddings.
//!
//! Each article is embedded four times, once per [`AspectId`]: its position
//! in the citation graph, its abstract, its co-authors and its two citation
//! counts. All emitted vectors have unit L2 norm, except the `Null`
//! sentinel which stands for "nothing to compare".

mod authors;
mod import;
mod numeric;
mod text;
mod topology;
mod vector;

pub use authors::{embed_authors, ochiai};
pub use import::{read_single_vector, read_vector_file};
pub use numeric::{embed_numeric, numeric_features};
pub use text::{embed_external_abstract, embed_text, Projection, TextFit, TextMode};
pub use topology::{embed_topology, generate_walks, TopologyParams, TrainingMode};
pub use vector::{SparseVector, Vector};

use crate::corpus::ArticleId;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AspectId {
    Topology,
    Text,
    Authors,
    Numeric,
}

impl AspectId {
    pub const ALL: [AspectId; 4] = [
        AspectId::Topology,
        AspectId::Text,
        AspectId::Authors,
        AspectId::Numeric,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            AspectId::Topology => "topology",
            AspectId::Text => "text",
            AspectId::Authors => "authors",
            AspectId::Numeric => "numeric",
        }
    }

    /// Human-facing criterion label.
    pub fn label(self) -> &'static str {
        match self {
            AspectId::Topology => "Citation Proximity",
            AspectId::Text => "Text Similarity",
            AspectId::Authors => "Author Similarity",
            AspectId::Numeric => "Numeric Attribute Similarity",
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for AspectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AspectId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AspectId::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown aspect {s:?}"))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no imported vector for article {0}")]
    MissingVector(ArticleId),
    #[error("no text fit state; uploads need the builtin text embedder")]
    NoFitState,
    #[error("text has no tokens known to the corpus vocabulary")]
    NoKnownTokens,
    #[error("vector file {path}: {message}")]
    VectorFile { path: PathBuf, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorSource {
    Builtin,
    Imported,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: VectorSource,
    pub params: BTreeMap<String, serde_json::Value>,
    pub seed: Option<u64>,
}

impl Provenance {
    pub(crate) fn builtin(
        params: impl IntoIterator<Item = (&'static str, serde_json::Value)>,
        seed: Option<u64>,
    ) -> Self {
        Provenance {
            source: VectorSource::Builtin,
            params: params.into_iter().map(|(k, v)| (k.to_owned(), v)).collect(),
            seed,
        }
    }
}

/// One aspect's embedding for every corpus article, in corpus index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AspectVectors {
    pub aspect: AspectId,
    pub dim: usize,
    pub ids: Vec<ArticleId>,
    pub vectors: Vec<Vector>,
    pub meta: Provenance,
}

impl AspectVectors {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, index: usize) -> &Vector {
        &self.vectors[index]
    }

    /// Checks that dimensions agree and every non-sentinel vector is unit norm.
    pub fn check(&self) -> Result<(), String> {
        if self.ids.len() != self.vectors.len() {
            return Err(format!(
                "{} ids but {} vectors",
                self.ids.len(),
                self.vectors.len()
            ));
        }
        for (id, v) in self.ids.iter().zip(&self.vectors) {
            match v {
                Vector::Dense(d) if d.len() != self.dim => {
                    return Err(format!("{id}: length {} != dim {}", d.len(), self.dim));
                }
                Vector::Sparse(s)
                    if s.indices().last().is_some_and(|&i| i as usize >= self.dim) =>
                {
                    return Err(format!("{id}: sparse index beyond dim {}", self.dim));
                }
                _ => {}
            }
            if !v.is_null() && (v.norm() - 1.0).abs() > 1e-9 {
                return Err(format!("{id}: norm {} is not 1", v.norm()));
            }
        }
        Ok(())
    }
}
