//! Pairwise cosine scores, tri-state classification and sparse pair storage.
//!
//! Only similar and uncertain pairs are materialized; any pair absent from a
//! store is dissimilar, and its score is recomputed from the vectors on
//! demand.

mod exact;
mod model;
mod persist;
mod store;

pub use exact::{exact_authors_store, exact_mode_override, exact_topology_store, ExactOverrides};
pub use model::{AspectScore, PairRecord, SimilarityModel};
pub use persist::{read_store, write_store, StoreSidecar, STORE_FORMAT_VERSION, STORE_MAGIC};
pub use store::{build_store, pair_cosine, AspectPairStore, ClassCounts, PairEntry, StoreMode};

use crate::corpus::ArticleId;
use crate::embedding::AspectId;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("vector lengths differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("cosine of a zero vector is undefined")]
    ZeroVector,
    #[error("unknown article {0}")]
    UnknownId(ArticleId),
    #[error("invalid thresholds for {aspect}: {reason}")]
    InvalidThresholds { aspect: AspectId, reason: String },
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),
    #[error("store file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriState {
    Similar,
    Dissimilar,
    Uncertain,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AspectThresholds {
    #[serde(rename = "theta_hi")]
    pub hi: f64,
    #[serde(rename = "theta_lo")]
    pub lo: f64,
}

impl AspectThresholds {
    pub const fn new(hi: f64, lo: f64) -> Self {
        AspectThresholds { hi, lo }
    }

    pub fn check(&self) -> Result<(), String> {
        if !(-1.0 <= self.lo && self.lo <= self.hi && self.hi <= 1.0) {
            return Err(format!(
                "need -1 <= theta_lo ({}) <= theta_hi ({}) <= 1",
                self.lo, self.hi
            ));
        }
        Ok(())
    }
}

/// Per-aspect classification cut-offs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub topology: AspectThresholds,
    pub text: AspectThresholds,
    pub authors: AspectThresholds,
    pub numeric: AspectThresholds,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            topology: AspectThresholds::new(0.60, 0.40),
            text: AspectThresholds::new(0.50, 0.35),
            authors: AspectThresholds::new(0.30, 0.15),
            // Numeric cosines crowd near 1 because of the constant component.
            numeric: AspectThresholds::new(0.95, 0.85),
        }
    }
}

impl Thresholds {
    pub fn get(&self, aspect: AspectId) -> AspectThresholds {
        match aspect {
            AspectId::Topology => self.topology,
            AspectId::Text => self.text,
            AspectId::Authors => self.authors,
            AspectId::Numeric => self.numeric,
        }
    }

    pub fn set(&mut self, aspect: AspectId, th: AspectThresholds) {
        match aspect {
            AspectId::Topology => self.topology = th,
            AspectId::Text => self.text = th,
            AspectId::Authors => self.authors = th,
            AspectId::Numeric => self.numeric = th,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for aspect in AspectId::ALL {
            self.get(aspect)
                .check()
                .map_err(|reason| SimError::InvalidThresholds { aspect, reason })?;
        }
        Ok(())
    }
}

/// dot(u, v) / (|u| |v|), clamped to [-1, 1].
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64, SimError> {
    if u.len() != v.len() {
        return Err(SimError::DimensionMismatch(u.len(), v.len()));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(SimError::ZeroVector);
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// Similar iff score >= theta_hi, dissimilar iff score <= theta_lo,
/// uncertain otherwise.
pub fn classify(score: f64, th: AspectThresholds) -> TriState {
    if score >= th.hi {
        TriState::Similar
    } else if score <= th.lo {
        TriState::Dissimilar
    } else {
        TriState::Uncertain
    }
}

/// Orders a pair of indices smaller-first.
pub fn canonical(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}
