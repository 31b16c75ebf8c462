//! Similarity clustering: connected components of the matched-pair graph.
//!
//! Members of a cluster need not be pairwise matched; they are only
//! guaranteed to be linked by a path of matched pairs.

use super::{CriteriaSpec, Criterion, MatchSet};
use crate::corpus::ArticleId;
use crate::embedding::{AspectVectors, Vector};
use crate::simstore::{SimilarityModel, StoreMode};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn component_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

/// Components (size >= 2) of the graph on `universe` with edges `pairs`;
/// edges touching a node outside the universe are ignored. Members are
/// sorted, components ordered by their smallest member.
pub fn connected_components(n: usize, pairs: &[(u32, u32)], universe: &[bool]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(n);
    for &(i, j) in pairs {
        let (i, j) = (i as usize, j as usize);
        if universe[i] && universe[j] {
            uf.union(i, j);
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for v in (0..n).filter(|&v| universe[v]) {
        if uf.component_size(v) < 2 {
            continue;
        }
        let r = uf.find(v);
        if slot[r] == usize::MAX {
            slot[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[slot[r]].push(v);
    }
    comps
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoverageStats {
    pub pair_count: usize,
    pub covered_articles: usize,
    pub covered_fraction: f64,
}

/// Distinct articles touched by at least one matched pair, over the size of
/// the universe.
pub fn coverage_stats(pairs: &[(u32, u32)], universe_size: usize) -> CoverageStats {
    let size = pairs
        .iter()
        .map(|&(i, j)| i.max(j) as usize + 1)
        .max()
        .unwrap_or(0);
    let mut seen = vec![false; size];
    for &(i, j) in pairs {
        seen[i as usize] = true;
        seen[j as usize] = true;
    }
    let covered = seen.iter().filter(|&&s| s).count();
    CoverageStats {
        pair_count: pairs.len(),
        covered_articles: covered,
        covered_fraction: if universe_size == 0 {
            0.0
        } else {
            covered as f64 / universe_size as f64
        },
    }
}

/// Strength of one matched edge: mean cosine over the Yes aspects, or,
/// with no Yes aspect active, mean (1 - cosine) over the No aspects.
pub fn edge_strength(spec: &CriteriaSpec, model: &SimilarityModel, i: usize, j: usize) -> f64 {
    let yes = spec.aspects_with(Criterion::Yes);
    if !yes.is_empty() {
        return yes.iter().map(|&a| model.score(a, i, j)).sum::<f64>() / yes.len() as f64;
    }
    let no = spec.aspects_with(Criterion::No);
    if no.is_empty() {
        return 0.0;
    }
    no.iter().map(|&a| 1.0 - model.score(a, i, j)).sum::<f64>() / no.len() as f64
}

/// [`edge_strength`] of every pair. Pairs sorted by (i, j), as
/// [`evaluate_criteria`](super::evaluate_criteria) returns them, are scored
/// by one merge pass over each store instead of a lookup per pair.
pub fn edge_strengths(
    spec: &CriteriaSpec,
    model: &SimilarityModel,
    pairs: &[(u32, u32)],
) -> Vec<f64> {
    if !pairs.windows(2).all(|w| w[0] < w[1]) {
        return pairs
            .iter()
            .map(|&(i, j)| edge_strength(spec, model, i as usize, j as usize))
            .collect();
    }
    let yes = spec.aspects_with(Criterion::Yes);
    let (aspects, invert) = if yes.is_empty() {
        (spec.aspects_with(Criterion::No), true)
    } else {
        (yes, false)
    };
    if aspects.is_empty() {
        return vec![0.0; pairs.len()];
    }
    let k = aspects.len() as f64;
    let mut out = vec![0.0; pairs.len()];
    out.par_chunks_mut(4096)
        .zip(pairs.par_chunks(4096))
        .for_each(|(sums, chunk)| {
            for &a in &aspects {
                let entries = model.store(a).entries();
                let mut c = entries.partition_point(|e| (e.i, e.j) < chunk[0]);
                for (sum, &(i, j)) in sums.iter_mut().zip(chunk) {
                    while c < entries.len() && (entries[c].i, entries[c].j) < (i, j) {
                        c += 1;
                    }
                    let score = match entries.get(c) {
                        Some(e) if (e.i, e.j) == (i, j) => e.score,
                        _ => model.unstored_score(a, i as usize, j as usize),
                    };
                    *sum += if invert { 1.0 - score } else { score };
                }
            }
            sums.iter_mut().for_each(|s| *s /= k);
        });
    out
}

/// Sum of the cosines of all pairs within `members`, from the squared norm
/// of their summed unit vectors. `Null` vectors contribute nothing.
fn all_pairs_cosine_sum(vectors: &AspectVectors, members: &[usize]) -> f64 {
    let mut acc = vec![0.0; vectors.dim];
    let mut self_terms = 0.0;
    for &m in members {
        let v = vectors.get(m);
        let norm = v.norm();
        if v.is_null() || norm == 0.0 {
            continue;
        }
        match v {
            Vector::Dense(d) => d
                .iter()
                .zip(acc.iter_mut())
                .for_each(|(x, a)| *a += x / norm),
            Vector::Sparse(s) => s
                .indices()
                .iter()
                .zip(s.values())
                .for_each(|(&i, x)| acc[i as usize] += x / norm),
            Vector::Null => {}
        }
        self_terms += v.dot(v) / (norm * norm);
    }
    (acc.iter().map(|a| a * a).sum::<f64>() - self_terms) / 2.0
}

/// Per-cluster strength totals when only No criteria are active. Every pair
/// inside such a cluster is matched unless a No store holds it, so each
/// total is the all-pairs sum minus the few stored pairs, and the millions
/// of unstored cosines are never evaluated one by one.
fn no_only_totals(
    spec: &CriteriaSpec,
    model: &SimilarityModel,
    comps: &[Vec<usize>],
    comp_of: &[usize],
    edges: &[Vec<(u32, u32)>],
) -> Vec<f64> {
    let no = spec.aspects_with(Criterion::No);
    let mut blocked: Vec<Vec<(u32, u32)>> = vec![Vec::new(); comps.len()];
    for &a in &no {
        for e in model.store(a).entries() {
            let k = comp_of[e.i as usize];
            if k != usize::MAX && comp_of[e.j as usize] == k {
                blocked[k].push((e.i, e.j));
            }
        }
    }
    comps
        .par_iter()
        .zip(blocked)
        .zip(edges)
        .map(|((members, mut blocked), edges)| {
            blocked.sort_unstable();
            blocked.dedup();
            let mut score_sum = 0.0;
            for &a in &no {
                // Exact stores score every unstored pair 0.
                if model.store(a).mode() == StoreMode::Exact {
                    continue;
                }
                let all = all_pairs_cosine_sum(model.vectors(a), members);
                let held: f64 = blocked
                    .iter()
                    .map(|&(i, j)| model.score(a, i as usize, j as usize))
                    .sum();
                score_sum += all - held;
            }
            let k = no.len() as f64;
            (edges.len() as f64 * k - score_sum) / k
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub avg_score: f64,
    pub size: usize,
}

/// Mean edge strength over the cluster's matched pairs. Partial sums are
/// taken over fixed chunks so the result does not depend on scheduling.
pub fn cluster_summary(
    members: &[usize],
    intra_edges: &[(u32, u32)],
    spec: &CriteriaSpec,
    model: &SimilarityModel,
) -> ClusterSummary {
    let partial: Vec<f64> = intra_edges
        .par_chunks(2048)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&(i, j)| edge_strength(spec, model, i as usize, j as usize))
                .sum()
        })
        .collect();
    let avg = if intra_edges.is_empty() {
        0.0
    } else {
        partial.iter().sum::<f64>() / intra_edges.len() as f64
    };
    ClusterSummary {
        avg_score: avg,
        size: members.len(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    /// Sorted corpus indices.
    pub members: Vec<usize>,
    /// Matched pairs inside the cluster, sorted.
    pub intra_edges: Vec<(u32, u32)>,
    pub avg_score: f64,
    pub tracked: usize,
    pub tracked_fraction: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterResult {
    pub clusters: Vec<Cluster>,
    pub unclustered: Vec<usize>,
    pub stats: CoverageStats,
}

/// Clusters the matched pairs over `universe` (all articles when `None`).
///
/// With `tracked` given, only clusters holding at least one tracked article
/// are kept, every cluster's tracked fraction is filled in, and the
/// unclustered set shrinks to tracked articles outside the kept clusters.
/// Coverage statistics always refer to the unfiltered universe.
pub fn cluster(
    matches: &MatchSet,
    universe: Option<&[bool]>,
    tracked: Option<&[bool]>,
    model: &SimilarityModel,
) -> ClusterResult {
    let n = model.len();
    let all = vec![true; n];
    let universe = universe.unwrap_or(&all);
    let comps = connected_components(n, &matches.pairs, universe);

    let mut comp_of = vec![usize::MAX; n];
    for (k, members) in comps.iter().enumerate() {
        for &m in members {
            comp_of[m] = k;
        }
    }
    let intra = |&(i, j): &(u32, u32)| {
        let k = comp_of[i as usize];
        (k != usize::MAX && comp_of[j as usize] == k).then_some(k)
    };
    let mut sizes = vec![0usize; comps.len()];
    matches
        .pairs
        .iter()
        .filter_map(intra)
        .for_each(|k| sizes[k] += 1);
    let mut edges: Vec<Vec<(u32, u32)>> = sizes.into_iter().map(Vec::with_capacity).collect();
    let spec = &matches.criteria;
    let totals = if spec.aspects_with(Criterion::Yes).is_empty() && spec.has_active() {
        for p in &matches.pairs {
            if let Some(k) = intra(p) {
                edges[k].push(*p);
            }
        }
        no_only_totals(spec, model, &comps, &comp_of, &edges)
    } else {
        let strengths = edge_strengths(spec, model, &matches.pairs);
        let mut totals = vec![0.0; comps.len()];
        for (p, s) in matches.pairs.iter().zip(&strengths) {
            if let Some(k) = intra(p) {
                edges[k].push(*p);
                totals[k] += s;
            }
        }
        totals
    };

    let mut clusters: Vec<Cluster> = comps
        .into_iter()
        .zip(edges)
        .zip(totals)
        .map(|((members, intra_edges), total)| {
            let tracked_count = tracked.map_or(0, |t| members.iter().filter(|&&m| t[m]).count());
            Cluster {
                tracked_fraction: tracked_count as f64 / members.len() as f64,
                tracked: tracked_count,
                avg_score: total / intra_edges.len() as f64,
                members,
                intra_edges,
            }
        })
        .collect();

    let in_universe = universe.iter().filter(|&&u| u).count();
    let stats = if in_universe == n {
        coverage_stats(&matches.pairs, n)
    } else {
        let inside: Vec<(u32, u32)> = matches
            .pairs
            .iter()
            .copied()
            .filter(|&(i, j)| universe[i as usize] && universe[j as usize])
            .collect();
        coverage_stats(&inside, in_universe)
    };

    let unclustered: Vec<usize> = match tracked {
        None => (0..n)
            .filter(|&v| universe[v] && comp_of[v] == usize::MAX)
            .collect(),
        Some(t) => {
            clusters.retain(|c| c.tracked > 0);
            (0..n)
                .filter(|&v| universe[v] && t[v] && comp_of[v] == usize::MAX)
                .collect()
        }
    };

    clusters.sort_by(|a, b| {
        b.members
            .len()
            .cmp(&a.members.len())
            .then(a.members[0].cmp(&b.members[0]))
    });
    ClusterResult {
        clusters,
        unclustered,
        stats,
    }
}

/// Serializable cluster with article ids in place of indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterView {
    pub members: Vec<ArticleId>,
    pub size: usize,
    pub edge_count: usize,
    pub avg_score: f64,
    pub tracked: usize,
    pub tracked_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intra_edges: Option<Vec<(ArticleId, ArticleId)>>,
}

impl Cluster {
    pub fn view(&self, model: &SimilarityModel, with_edges: bool) -> ClusterView {
        let id = |i: usize| model.id(i).clone();
        ClusterView {
            members: self.members.iter().map(|&m| id(m)).collect(),
            size: self.members.len(),
            edge_count: self.intra_edges.len(),
            avg_score: self.avg_score,
            tracked: self.tracked,
            tracked_fraction: self.tracked_fraction,
            intra_edges: with_edges.then(|| {
                self.intra_edges
                    .iter()
                    .map(|&(i, j)| (id(i as usize), id(j as usize)))
                    .collect()
            }),
        }
    }
}
