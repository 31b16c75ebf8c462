//! Intra-cluster similarity networks with betweenness-based bridge flags.

use super::{evaluate_criteria, CriteriaSpec, PatternError};
use crate::corpus::ArticleId;
use crate::embedding::AspectId;
use crate::simstore::{AspectScore, SimilarityModel};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

/// Nodes at or above this fraction of the maximum betweenness are bridges.
pub const BRIDGE_FRACTION: f64 = 0.8;

/// Exact betweenness on an undirected, unweighted graph given as sorted
/// adjacency lists (Brandes' accumulation). Each unordered endpoint pair is
/// counted once, so the centre of a path a-b-c scores 1.
pub fn betweenness(adj: &[Vec<usize>]) -> Vec<f64> {
    let n = adj.len();
    let mut bc = vec![0.0; n];
    let mut stack = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut queue = VecDeque::new();

    for s in 0..n {
        stack.clear();
        for v in 0..n {
            preds[v].clear();
            sigma[v] = 0.0;
            dist[v] = usize::MAX;
            delta[v] = 0.0;
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    // Every unordered pair was visited from both ends.
    bc.iter_mut().for_each(|b| *b /= 2.0);
    bc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkNode {
    pub id: ArticleId,
    pub degree: usize,
    pub betweenness: f64,
    pub bridge: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkEdge {
    pub a: ArticleId,
    pub b: ArticleId,
    pub aspects: BTreeMap<AspectId, AspectScore>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityNetwork {
    pub nodes: Vec<NetworkNode>,
    pub edges: Vec<NetworkEdge>,
    /// Node order for the adjacency matrix: degree descending, then id.
    pub matrix_order: Vec<ArticleId>,
}

/// Network over `members` (sorted corpus indices) with `edges` (pairs of
/// corpus indices, all inside `members`).
pub fn similarity_network(
    members: &[usize],
    edges: &[(u32, u32)],
    model: &SimilarityModel,
) -> SimilarityNetwork {
    let local: BTreeMap<usize, usize> = members.iter().enumerate().map(|(k, &m)| (m, k)).collect();
    let mut adj = vec![Vec::new(); members.len()];
    for &(i, j) in edges {
        let (a, b) = (local[&(i as usize)], local[&(j as usize)]);
        adj[a].push(b);
        adj[b].push(a);
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let bc = betweenness(&adj);
    let max = bc.iter().copied().fold(0.0, f64::max);

    let nodes: Vec<NetworkNode> = members
        .iter()
        .enumerate()
        .map(|(k, &m)| NetworkNode {
            id: model.id(m).clone(),
            degree: adj[k].len(),
            betweenness: bc[k],
            bridge: bc[k] > 0.0 && bc[k] >= BRIDGE_FRACTION * max,
        })
        .collect();

    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&x, &y| {
        nodes[y]
            .degree
            .cmp(&nodes[x].degree)
            .then_with(|| nodes[x].id.cmp(&nodes[y].id))
    });

    SimilarityNetwork {
        matrix_order: order.into_iter().map(|k| nodes[k].id.clone()).collect(),
        edges: edges
            .iter()
            .map(|&(i, j)| {
                let r = model.pair_record_at(i as usize, j as usize);
                NetworkEdge {
                    a: r.a,
                    b: r.b,
                    aspects: r.aspects,
                }
            })
            .collect(),
        nodes,
    }
}

/// Stateless form used by the service: re-evaluates the criteria and builds
/// the network induced on `members`, which must be connected by matched
/// pairs.
pub fn network_for_members(
    spec: &CriteriaSpec,
    members: &[ArticleId],
    model: &SimilarityModel,
) -> Result<SimilarityNetwork, PatternError> {
    spec.require_active()?;
    let mut idx = members
        .iter()
        .map(|id| {
            model
                .index_of(id)
                .map_err(|_| PatternError::UnknownId(id.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    idx.sort_unstable();
    idx.dedup();
    if idx.len() < 2 {
        return Err(PatternError::DisconnectedMembers);
    }
    let matches = evaluate_criteria(spec, model)?;
    let mut inside = vec![false; model.len()];
    idx.iter().for_each(|&i| inside[i] = true);
    let edges: Vec<(u32, u32)> = matches
        .pairs
        .iter()
        .copied()
        .filter(|&(i, j)| inside[i as usize] && inside[j as usize])
        .collect();
    let comps = super::connected_components(model.len(), &edges, &inside);
    if comps.len() != 1 || comps[0].len() != idx.len() {
        return Err(PatternError::DisconnectedMembers);
    }
    Ok(similarity_network(&idx, &edges, model))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adj(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut a = vec![Vec::new(); n];
        for &(x, y) in edges {
            a[x].push(y);
            a[y].push(x);
        }
        a.iter_mut().for_each(|v| v.sort_unstable());
        a
    }

    #[test]
    fn path_triangle_star() {
        assert_eq!(betweenness(&adj(3, &[(0, 1), (1, 2)])), vec![0.0, 1.0, 0.0]);
        assert_eq!(
            betweenness(&adj(3, &[(0, 1), (1, 2), (0, 2)])),
            vec![0.0; 3]
        );
        assert_eq!(
            betweenness(&adj(4, &[(0, 1), (0, 2), (0, 3)])),
            vec![3.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn square_splits_paths_evenly() {
        // 4-cycle: each opposite pair has two shortest paths.
        assert_eq!(
            betweenness(&adj(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])),
            vec![0.5; 4]
        );
    }

    #[test]
    fn single_edge_and_empty() {
        assert_eq!(betweenness(&adj(2, &[(0, 1)])), vec![0.0, 0.0]);
        assert!(betweenness(&[]).is_empty());
    }
}
