//! Ground-truth classes for the topology and author aspects, used to
//! validate embedding-based classes and to compute citation statistics
//! independently of embedding quality.
//!
//! Topology: similar iff the undirected citation distance is at most 2
//! (a direct citation or a shared neighbour), scored 1.0 and 0.5
//! respectively. Authors: similar iff at least one shared author, scored by
//! the Ochiai coefficient. There is no uncertain class in either.

use super::{AspectPairStore, AspectThresholds, PairEntry, StoreMode, Thresholds, TriState};
use crate::corpus::{CitationGraph, Corpus};
use crate::embedding::{ochiai, AspectId};
use std::collections::BTreeSet;

pub struct ExactOverrides {
    pub topology: AspectPairStore,
    pub authors: AspectPairStore,
}

pub fn exact_topology_store(graph: &CitationGraph, th: AspectThresholds) -> AspectPairStore {
    let n = graph.node_count();
    let mut entries = Vec::new();
    let mut mark = vec![usize::MAX; n];
    let mut found = Vec::new();
    for u in 0..n {
        found.clear();
        for &v in graph.neighbors(u) {
            if v > u && mark[v] != u {
                mark[v] = u;
                found.push((v, 1.0));
            }
        }
        for &v in graph.neighbors(u) {
            for &w in graph.neighbors(v) {
                if w > u && mark[w] != u {
                    mark[w] = u;
                    found.push((w, 0.5));
                }
            }
        }
        entries.extend(found.iter().map(|&(v, score)| PairEntry {
            i: u as u32,
            j: v as u32,
            score,
            class: TriState::Similar,
        }));
    }
    AspectPairStore::from_entries(AspectId::Topology, n, th, StoreMode::Exact, entries)
        .expect("exact topology entries are canonical")
}

pub fn exact_authors_store(corpus: &Corpus, th: AspectThresholds) -> AspectPairStore {
    let articles = corpus.articles();
    let mut entries = Vec::new();
    for (u, a) in articles.iter().enumerate() {
        let partners: BTreeSet<usize> = a
            .authors
            .iter()
            .flat_map(|name| corpus.author_index()[name].iter().copied())
            .filter(|&v| v > u)
            .collect();
        entries.extend(partners.into_iter().map(|v| PairEntry {
            i: u as u32,
            j: v as u32,
            score: ochiai(&a.authors, &articles[v].authors),
            class: TriState::Similar,
        }));
    }
    AspectPairStore::from_entries(
        AspectId::Authors,
        articles.len(),
        th,
        StoreMode::Exact,
        entries,
    )
    .expect("exact author entries are canonical")
}

pub fn exact_mode_override(
    graph: &CitationGraph,
    corpus: &Corpus,
    th: &Thresholds,
) -> ExactOverrides {
    ExactOverrides {
        topology: exact_topology_store(graph, th.topology),
        authors: exact_authors_store(corpus, th.authors),
    }
}
