use super::{classify, AspectThresholds, SimError, TriState};
use crate::embedding::{AspectId, AspectVectors, Vector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How a store's classes were produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StoreMode {
    /// Thresholded embedding cosines.
    Embedding,
    /// Graph / author-set ground truth; every stored pair is similar.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub i: u32,
    pub j: u32,
    pub score: f64,
    pub class: TriState,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub similar: u64,
    pub uncertain: u64,
    pub dissimilar: u64,
}

impl ClassCounts {
    pub fn total(&self) -> u64 {
        self.similar + self.uncertain + self.dissimilar
    }
}

/// Non-dissimilar pairs of one aspect, sorted by (i, j) with i < j, where
/// i and j are corpus indices.
#[derive(Clone, Debug, PartialEq)]
pub struct AspectPairStore {
    aspect: AspectId,
    n: usize,
    thresholds: AspectThresholds,
    mode: StoreMode,
    entries: Vec<PairEntry>,
    /// `entries[row_start[i]..row_start[i + 1]]` holds the pairs (i, j > i).
    row_start: Vec<usize>,
}

impl AspectPairStore {
    /// Assembles a store from entries; they are sorted and checked here.
    pub fn from_entries(
        aspect: AspectId,
        n: usize,
        thresholds: AspectThresholds,
        mode: StoreMode,
        mut entries: Vec<PairEntry>,
    ) -> Result<Self, SimError> {
        entries.sort_unstable_by_key(|e| (e.i, e.j));
        for w in entries.windows(2) {
            if (w[0].i, w[0].j) == (w[1].i, w[1].j) {
                return Err(SimError::Inconsistent(format!(
                    "pair ({}, {}) stored twice",
                    w[0].i, w[0].j
                )));
            }
        }
        if let Some(e) = entries.iter().find(|e| e.i >= e.j || e.j as usize >= n) {
            return Err(SimError::Inconsistent(format!(
                "pair ({}, {}) invalid for n = {n}",
                e.i, e.j
            )));
        }
        if entries.iter().any(|e| e.class == TriState::Dissimilar) {
            return Err(SimError::Inconsistent(
                "dissimilar pairs are never stored".into(),
            ));
        }
        let mut row_start = vec![0usize; n + 1];
        for e in &entries {
            row_start[e.i as usize + 1] += 1;
        }
        for k in 0..n {
            row_start[k + 1] += row_start[k];
        }
        Ok(AspectPairStore {
            aspect,
            n,
            thresholds,
            mode,
            entries,
            row_start,
        })
    }

    pub fn aspect(&self) -> AspectId {
        self.aspect
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn thresholds(&self) -> AspectThresholds {
        self.thresholds
    }

    pub fn mode(&self) -> StoreMode {
        self.mode
    }

    /// Every stored (similar or uncertain) pair in (i, j) order.
    pub fn entries(&self) -> &[PairEntry] {
        &self.entries
    }

    /// Stored pairs (i, j) with j > i.
    pub fn row(&self, i: usize) -> &[PairEntry] {
        &self.entries[self.row_start[i]..self.row_start[i + 1]]
    }

    pub fn similar_pairs(&self) -> impl Iterator<Item = &PairEntry> {
        self.entries.iter().filter(|e| e.class == TriState::Similar)
    }

    pub fn uncertain_pairs(&self) -> impl Iterator<Item = &PairEntry> {
        self.entries
            .iter()
            .filter(|e| e.class == TriState::Uncertain)
    }

    pub fn lookup(&self, i: usize, j: usize) -> Option<&PairEntry> {
        let (i, j) = super::canonical(i, j);
        if i == j || j >= self.n {
            return None;
        }
        let row = self.row(i);
        row.binary_search_by_key(&(j as u32), |e| e.j)
            .ok()
            .map(|k| &row[k])
    }

    pub fn class(&self, i: usize, j: usize) -> TriState {
        self.lookup(i, j).map_or(TriState::Dissimilar, |e| e.class)
    }

    pub fn counts(&self) -> ClassCounts {
        let similar = self.similar_pairs().count() as u64;
        let uncertain = self.entries.len() as u64 - similar;
        let total = (self.n as u64) * (self.n.saturating_sub(1) as u64) / 2;
        ClassCounts {
            similar,
            uncertain,
            dissimilar: total - similar - uncertain,
        }
    }
}

/// Cosine of two aspect vectors. Pairs involving the `Null` sentinel score 0.
pub fn pair_cosine(a: &Vector, b: &Vector) -> f64 {
    if a.is_null() || b.is_null() {
        return 0.0;
    }
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return 0.0;
    }
    (a.dot(b) / denom).clamp(-1.0, 1.0)
}

const ROW_BLOCK: usize = 32;
const COL_TILE: usize = 512;

/// Scores and classifies all n(n-1)/2 pairs. Work is split into row blocks
/// processed in parallel and tiled over columns; the merged output does not
/// depend on the thread count.
pub fn build_store(
    vectors: &AspectVectors,
    th: AspectThresholds,
) -> Result<AspectPairStore, SimError> {
    th.check().map_err(|reason| SimError::InvalidThresholds {
        aspect: vectors.aspect,
        reason,
    })?;
    let n = vectors.len();
    for v in &vectors.vectors {
        if let Vector::Dense(d) = v {
            if d.len() != vectors.dim {
                return Err(SimError::DimensionMismatch(d.len(), vectors.dim));
            }
        }
    }
    let norms: Vec<f64> = vectors.vectors.iter().map(Vector::norm).collect();
    let score = |i: usize, j: usize| -> Option<f64> {
        let (a, b) = (&vectors.vectors[i], &vectors.vectors[j]);
        if a.is_null() || b.is_null() || norms[i] == 0.0 || norms[j] == 0.0 {
            return None;
        }
        Some((a.dot(b) / (norms[i] * norms[j])).clamp(-1.0, 1.0))
    };

    let blocks: Vec<usize> = (0..n).step_by(ROW_BLOCK).collect();
    let per_block: Vec<Vec<PairEntry>> = blocks
        .par_iter()
        .map(|&r0| {
            let r1 = (r0 + ROW_BLOCK).min(n);
            let mut out = Vec::new();
            let mut c0 = r0 + 1;
            while c0 < n {
                let c1 = (c0 + COL_TILE).min(n);
                for i in r0..r1 {
                    for j in c0.max(i + 1)..c1 {
                        if let Some(s) = score(i, j) {
                            let class = classify(s, th);
                            if class != TriState::Dissimilar {
                                out.push(PairEntry {
                                    i: i as u32,
                                    j: j as u32,
                                    score: s,
                                    class,
                                });
                            }
                        }
                    }
                }
                c0 = c1;
            }
            out.sort_unstable_by_key(|e| (e.i, e.j));
            out
        })
        .collect();

    let entries: Vec<PairEntry> = per_block.into_iter().flatten().collect();
    AspectPairStore::from_entries(vectors.aspect, n, th, StoreMode::Embedding, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ArticleId;
    use crate::embedding::{Provenance, VectorSource};

    pub(crate) fn dense(aspect: AspectId, rows: &[&[f64]]) -> AspectVectors {
        AspectVectors {
            aspect,
            dim: rows.first().map_or(0, |r| r.len()),
            ids: (0..rows.len())
                .map(|i| ArticleId(format!("A{i}")))
                .collect(),
            vectors: rows
                .iter()
                .map(|r| Vector::Dense(r.to_vec()).normalized())
                .collect(),
            meta: Provenance {
                source: VectorSource::Imported,
                params: Default::default(),
                seed: None,
            },
        }
    }

    #[test]
    fn identical_vectors_are_all_similar() {
        let v = dense(AspectId::Text, &[&[1.0, 2.0], &[1.0, 2.0], &[2.0, 4.0]]);
        let s = build_store(&v, AspectThresholds::new(1.0, 0.5)).unwrap();
        assert_eq!(
            s.counts(),
            ClassCounts {
                similar: 3,
                uncertain: 0,
                dissimilar: 0
            }
        );
    }

    #[test]
    fn four_vector_hand_classification() {
        // Pairwise cosines: (0,1)=0.96, (0,2)=0.8, (0,3)=0.6, (1,2)=0.6, (1,3)=0.8, (2,3)=0.
        let v = dense(
            AspectId::Topology,
            &[&[3.0, 4.0], &[4.0, 3.0], &[0.0, 1.0], &[1.0, 0.0]],
        );
        let s = build_store(&v, AspectThresholds::new(0.9, 0.7)).unwrap();
        assert_eq!(s.class(0, 1), TriState::Similar);
        assert_eq!(s.class(0, 2), TriState::Uncertain);
        assert_eq!(s.class(0, 3), TriState::Dissimilar);
        assert_eq!(s.class(1, 2), TriState::Dissimilar);
        assert_eq!(s.class(3, 1), TriState::Uncertain);
        assert_eq!(s.class(3, 2), TriState::Dissimilar);
        assert_eq!(
            s.counts(),
            ClassCounts {
                similar: 1,
                uncertain: 2,
                dissimilar: 3
            }
        );
        assert!((s.lookup(2, 0).unwrap().score - 0.8).abs() < 1e-12);
    }

    #[test]
    fn single_article_gives_empty_store() {
        let v = dense(AspectId::Numeric, &[&[1.0, 0.0, 1.0]]);
        let s = build_store(&v, AspectThresholds::new(0.5, 0.2)).unwrap();
        assert!(s.entries().is_empty());
        assert_eq!(s.counts().total(), 0);
    }

    #[test]
    fn null_vectors_are_always_dissimilar() {
        let mut v = dense(AspectId::Text, &[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        v.vectors[0] = Vector::Null;
        let s = build_store(&v, AspectThresholds::new(-1.0, -1.0)).unwrap();
        assert_eq!(s.class(0, 1), TriState::Dissimilar);
        assert_eq!(s.class(1, 2), TriState::Similar);
    }

    #[test]
    fn rows_span_many_blocks_and_tiles() {
        let rows: Vec<Vec<f64>> = (0..700).map(|i| vec![1.0, (i % 7) as f64]).collect();
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let v = dense(AspectId::Numeric, &refs);
        let th = AspectThresholds::new(0.999, 0.9);
        let s = build_store(&v, th).unwrap();
        for (i, j) in [(0, 7), (3, 699), (650, 699), (0, 1), (100, 561)] {
            let c = pair_cosine(v.get(i), v.get(j));
            assert_eq!(s.class(i, j), classify(c, th), "({i},{j})");
        }
        assert!(s
            .entries()
            .windows(2)
            .all(|w| (w[0].i, w[0].j) < (w[1].i, w[1].j)));
    }

    #[test]
    fn bad_entries_are_rejected() {
        let th = AspectThresholds::new(0.5, 0.2);
        let e = |i, j| PairEntry {
            i,
            j,
            score: 0.9,
            class: TriState::Similar,
        };
        assert!(AspectPairStore::from_entries(
            AspectId::Text,
            3,
            th,
            StoreMode::Embedding,
            vec![e(1, 1)]
        )
        .is_err());
        assert!(AspectPairStore::from_entries(
            AspectId::Text,
            3,
            th,
            StoreMode::Embedding,
            vec![e(0, 3)]
        )
        .is_err());
        assert!(AspectPairStore::from_entries(
            AspectId::Text,
            3,
            th,
            StoreMode::Embedding,
            vec![e(0, 1), e(0, 1)]
        )
        .is_err());
    }
}
