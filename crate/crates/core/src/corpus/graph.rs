use super::{ArticleId, Corpus};
use std::collections::{BTreeSet, VecDeque};

/// Directed citation graph over corpus indices, with a derived undirected
/// adjacency used by the random walker and the exact proximity check.
#[derive(Clone, Debug, PartialEq)]
pub struct CitationGraph {
    nodes: Vec<ArticleId>,
    edges: Vec<(usize, usize)>,
    undirected: Vec<Vec<usize>>,
}

pub fn build_citation_graph(corpus: &Corpus) -> CitationGraph {
    let edges = corpus.articles().iter().enumerate().flat_map(|(u, a)| {
        a.references
            .iter()
            .map(move |r| (u, corpus.index_of(r).expect("validated reference")))
    });
    CitationGraph::from_edges(corpus.ids().cloned().collect(), edges)
}

impl CitationGraph {
    /// Builds a graph over `nodes` from directed index pairs. Self-loops and
    /// repeated edges are discarded.
    pub fn from_edges(
        nodes: Vec<ArticleId>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let n = nodes.len();
        let edges: BTreeSet<(usize, usize)> = edges
            .into_iter()
            .inspect(|&(u, v)| assert!(u < n && v < n, "edge ({u},{v}) out of range for {n} nodes"))
            .filter(|(u, v)| u != v)
            .collect();
        let mut undirected = vec![Vec::new(); n];
        for &(u, v) in &edges {
            undirected[u].push(v);
            undirected[v].push(u);
        }
        for adj in &mut undirected {
            adj.sort_unstable();
            adj.dedup();
        }
        CitationGraph {
            nodes,
            edges: edges.into_iter().collect(),
            undirected,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[ArticleId] {
        &self.nodes
    }

    /// Directed (citing, cited) pairs, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.binary_search(&(from, to)).is_ok()
    }

    /// Sorted undirected neighbours of `node`.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.undirected[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.undirected[node].len()
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.undirected[a].binary_search(&b).is_ok()
    }

    /// Undirected hop distance, or `None` if unreachable.
    pub fn distance(&self, from: usize, to: usize) -> Option<usize> {
        if from == to {
            return Some(0);
        }
        let mut dist = vec![usize::MAX; self.nodes.len()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.undirected[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    if v == to {
                        return Some(dist[v]);
                    }
                    queue.push_back(v);
                }
            }
        }
        None
    }
}
