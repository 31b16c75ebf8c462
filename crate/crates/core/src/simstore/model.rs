use super::{
    build_store, exact_mode_override, pair_cosine, AspectPairStore, SimError, StoreMode,
    Thresholds, TriState,
};
use crate::corpus::{ArticleId, CitationGraph, Corpus};
use crate::embedding::{AspectId, AspectVectors};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AspectScore {
    pub score: f64,
    pub class: TriState,
}

/// Per-aspect score and class of one unordered pair. `a` is always the
/// lexicographically smaller id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub a: ArticleId,
    pub b: ArticleId,
    pub aspects: BTreeMap<AspectId, AspectScore>,
}

/// The four aspect embeddings with their pair stores, all over the same
/// article indexing.
#[derive(Clone, Debug)]
pub struct SimilarityModel {
    vectors: Vec<AspectVectors>,
    stores: Vec<AspectPairStore>,
    by_id: HashMap<ArticleId, usize>,
}

impl SimilarityModel {
    /// `vectors` and `stores` may be given in any order but must cover each
    /// aspect exactly once over the same ids.
    pub fn new(
        mut vectors: Vec<AspectVectors>,
        mut stores: Vec<AspectPairStore>,
    ) -> Result<Self, SimError> {
        vectors.sort_by_key(|v| v.aspect);
        stores.sort_by_key(|s| s.aspect());
        let aspects_v: Vec<_> = vectors.iter().map(|v| v.aspect).collect();
        let aspects_s: Vec<_> = stores.iter().map(|s| s.aspect()).collect();
        if aspects_v != AspectId::ALL || aspects_s != AspectId::ALL {
            return Err(SimError::Inconsistent(
                "need exactly one vector set and one store per aspect".into(),
            ));
        }
        let ids = &vectors[0].ids;
        if vectors.iter().any(|v| &v.ids != ids) || stores.iter().any(|s| s.n() != ids.len()) {
            return Err(SimError::Inconsistent(
                "aspects disagree on the article set".into(),
            ));
        }
        let by_id = ids
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, id)| (id, i))
            .collect();
        Ok(SimilarityModel {
            vectors,
            stores,
            by_id,
        })
    }

    /// Builds all four stores from embeddings.
    pub fn build(vectors: Vec<AspectVectors>, th: &Thresholds) -> Result<Self, SimError> {
        th.validate()?;
        let stores = vectors
            .iter()
            .map(|v| build_store(v, th.get(v.aspect)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(vectors, stores)
    }

    /// Model over stores alone, with empty embeddings: every pair absent
    /// from a store scores 0. Used for hand-specified classifications.
    pub fn from_stores(
        ids: Vec<ArticleId>,
        stores: Vec<AspectPairStore>,
    ) -> Result<Self, SimError> {
        let vectors = AspectId::ALL
            .into_iter()
            .map(|aspect| AspectVectors {
                aspect,
                dim: 0,
                ids: ids.clone(),
                vectors: vec![crate::embedding::Vector::Null; ids.len()],
                meta: crate::embedding::Provenance {
                    source: crate::embedding::VectorSource::Imported,
                    params: Default::default(),
                    seed: None,
                },
            })
            .collect();
        Self::new(vectors, stores)
    }

    /// Swaps the topology and author stores for their exact versions.
    pub fn with_exact_overrides(
        mut self,
        graph: &CitationGraph,
        corpus: &Corpus,
        th: &Thresholds,
    ) -> Self {
        let exact = exact_mode_override(graph, corpus, th);
        self.stores[AspectId::Topology.index()] = exact.topology;
        self.stores[AspectId::Authors.index()] = exact.authors;
        self
    }

    pub fn replace_store(&mut self, store: AspectPairStore) -> Result<(), SimError> {
        if store.n() != self.len() {
            return Err(SimError::Inconsistent(
                "store size differs from the model".into(),
            ));
        }
        let k = store.aspect().index();
        self.stores[k] = store;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vectors[0].ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ids(&self) -> &[ArticleId] {
        &self.vectors[0].ids
    }

    pub fn id(&self, i: usize) -> &ArticleId {
        &self.vectors[0].ids[i]
    }

    pub fn index_of(&self, id: &ArticleId) -> Result<usize, SimError> {
        self.by_id
            .get(id)
            .copied()
            .ok_or_else(|| SimError::UnknownId(id.clone()))
    }

    pub fn store(&self, aspect: AspectId) -> &AspectPairStore {
        &self.stores[aspect.index()]
    }

    pub fn stores(&self) -> &[AspectPairStore] {
        &self.stores
    }

    pub fn vectors(&self, aspect: AspectId) -> &AspectVectors {
        &self.vectors[aspect.index()]
    }

    pub fn class(&self, aspect: AspectId, i: usize, j: usize) -> TriState {
        self.store(aspect).class(i, j)
    }

    /// Stored score, or the recomputed score of a dissimilar pair.
    pub fn score(&self, aspect: AspectId, i: usize, j: usize) -> f64 {
        match self.store(aspect).lookup(i, j) {
            Some(e) => e.score,
            None => self.unstored_score(aspect, i, j),
        }
    }

    /// Score of a pair the caller knows is absent from the store.
    pub fn unstored_score(&self, aspect: AspectId, i: usize, j: usize) -> f64 {
        // Exact-mode dissimilar pairs have no shared author / no short path.
        if self.store(aspect).mode() == StoreMode::Exact {
            return 0.0;
        }
        let v = self.vectors(aspect);
        pair_cosine(v.get(i), v.get(j))
    }

    pub fn aspect_score(&self, aspect: AspectId, i: usize, j: usize) -> AspectScore {
        AspectScore {
            score: self.score(aspect, i, j),
            class: self.class(aspect, i, j),
        }
    }

    pub fn pair_record_at(&self, i: usize, j: usize) -> PairRecord {
        let (i, j) = super::canonical(i, j);
        PairRecord {
            a: self.id(i).clone(),
            b: self.id(j).clone(),
            aspects: AspectId::ALL
                .into_iter()
                .map(|a| (a, self.aspect_score(a, i, j)))
                .collect(),
        }
    }

    pub fn pair_record(&self, a: &ArticleId, b: &ArticleId) -> Result<PairRecord, SimError> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        if i == j {
            return Err(SimError::Inconsistent(format!("pair of {a} with itself")));
        }
        Ok(self.pair_record_at(i, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_citation_graph, test_support::article};
    use crate::embedding::{
        embed_authors, embed_numeric, embed_text, embed_topology, TextMode, TopologyParams,
    };

    fn model() -> (Corpus, SimilarityModel) {
        let c = Corpus::from_articles(
            vec![
                article("A1", &["ann"], "graph layout edge bundling", &["A2"]),
                article("A2", &["ann", "bo"], "graph layout edge bundling", &[]),
                article("A3", &["cy"], "volume rendering transfer functions", &[]),
                article("A4", &["di"], "parallel coordinates axes", &["A3"]),
            ],
            None,
        )
        .unwrap();
        let g = build_citation_graph(&c);
        let small = TopologyParams {
            dim: 8,
            walks_per_node: 2,
            walk_length: 6,
            epochs: 1,
            ..Default::default()
        };
        let vectors = vec![
            embed_topology(&g, &small).unwrap(),
            embed_text(&c, &TextMode::default()).unwrap().0,
            embed_authors(&c),
            embed_numeric(&c),
        ];
        (
            c,
            SimilarityModel::build(vectors, &Thresholds::default()).unwrap(),
        )
    }

    #[test]
    fn stored_and_recomputed_scores() {
        let (_, m) = model();
        let r = m.pair_record(&"A1".into(), &"A2".into()).unwrap();
        assert_eq!(r.aspects[&AspectId::Text].class, TriState::Similar);
        assert!((r.aspects[&AspectId::Text].score - 1.0).abs() < 1e-12);

        let r = m.pair_record(&"A1".into(), &"A3".into()).unwrap();
        assert_eq!(r.aspects[&AspectId::Text].class, TriState::Dissimilar);
        assert_eq!(r.aspects[&AspectId::Text].score, 0.0);
        assert_eq!(r.aspects[&AspectId::Authors].class, TriState::Dissimilar);
    }

    #[test]
    fn records_are_symmetric() {
        let (_, m) = model();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(m.pair_record_at(i, j), m.pair_record_at(j, i));
                }
            }
        }
    }

    #[test]
    fn unknown_ids_and_self_pairs() {
        let (_, m) = model();
        assert!(matches!(
            m.pair_record(&"A1".into(), &"Z".into()),
            Err(SimError::UnknownId(_))
        ));
        assert!(m.pair_record(&"A1".into(), &"A1".into()).is_err());
    }

    #[test]
    fn exact_overrides_replace_two_stores() {
        let (c, m) = model();
        let g = build_citation_graph(&c);
        let m = m.with_exact_overrides(&g, &c, &Thresholds::default());
        assert_eq!(m.store(AspectId::Topology).mode(), StoreMode::Exact);
        assert_eq!(m.store(AspectId::Text).mode(), StoreMode::Embedding);
        assert_eq!(m.class(AspectId::Topology, 0, 1), TriState::Similar);
        assert_eq!(m.score(AspectId::Topology, 0, 2), 0.0);
    }

    #[test]
    fn constructor_checks_coverage() {
        let (_, m) = model();
        let vecs: Vec<_> = AspectId::ALL
            .iter()
            .map(|&a| m.vectors(a).clone())
            .collect();
        let stores = m.stores()[..3].to_vec();
        assert!(SimilarityModel::new(vecs, stores).is_err());
    }
}
