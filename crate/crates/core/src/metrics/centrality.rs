use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use super::components::{component_members, connected_components};
use crate::error::{Error, Result};
use crate::model::{BipartiteGraph, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    /// Geodesics count hops; edge weights are ignored.
    #[default]
    Hops,
    /// Edge weights are path lengths.
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetweennessOptions {
    pub normalized: bool,
    pub paths: PathMode,
}

impl Default for BetweennessOptions {
    fn default() -> Self {
        BetweennessOptions {
            normalized: true,
            paths: PathMode::Hops,
        }
    }
}

/// Shortest-path betweenness (Brandes). Each unordered pair `{s, t}`
/// contributes to `v` the fraction of `s–t` geodesics passing through `v`.
/// When normalized, values are divided by `(n−1)(n−2)/2`.
pub fn betweenness(g: &WeightedGraph, opts: BetweennessOptions) -> Vec<f64> {
    let n = g.node_count();
    let adj: Vec<Vec<(usize, f64)>> = (0..n).map(|i| g.neighbors(i).collect()).collect();
    let mut cb = vec![0.0; n];

    let mut sigma = vec![0.0f64; n];
    let mut delta = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);

    for s in 0..n {
        order.clear();
        for v in 0..n {
            sigma[v] = 0.0;
            delta[v] = 0.0;
            preds[v].clear();
        }
        sigma[s] = 1.0;
        match opts.paths {
            PathMode::Hops => single_source_hops(&adj, s, &mut sigma, &mut preds, &mut order),
            PathMode::Weighted => {
                single_source_weighted(&adj, s, &mut sigma, &mut preds, &mut order)
            }
        }
        while let Some(w) = order.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                cb[w] += delta[w];
            }
        }
    }

    // every unordered pair was visited from both endpoints
    for x in cb.iter_mut() {
        *x /= 2.0;
    }
    if opts.normalized {
        let pairs = if n > 2 {
            (n - 1) as f64 * (n - 2) as f64 / 2.0
        } else {
            0.0
        };
        for x in cb.iter_mut() {
            *x = if pairs > 0.0 { *x / pairs } else { 0.0 };
        }
    }
    cb
}

fn single_source_hops(
    adj: &[Vec<(usize, f64)>],
    s: usize,
    sigma: &mut [f64],
    preds: &mut [Vec<usize>],
    order: &mut Vec<usize>,
) {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(w, _) in &adj[v] {
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
}

#[derive(PartialEq)]
struct HeapItem {
    dist: f64,
    node: usize,
    pred: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then node index for determinism
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
            .then_with(|| other.pred.cmp(&self.pred))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn same_length(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn single_source_weighted(
    adj: &[Vec<(usize, f64)>],
    s: usize,
    sigma: &mut [f64],
    preds: &mut [Vec<usize>],
    order: &mut Vec<usize>,
) {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(HeapItem {
        dist: 0.0,
        node: s,
        pred: s,
    });
    while let Some(HeapItem {
        dist: d, node: v, ..
    }) = heap.pop()
    {
        if done[v] {
            continue;
        }
        done[v] = true;
        order.push(v);
        for &(w, len) in &adj[v] {
            let alt = d + len;
            if done[w] {
                continue;
            }
            if dist[w].is_infinite() || (alt < dist[w] && !same_length(alt, dist[w])) {
                dist[w] = alt;
                sigma[w] = sigma[v];
                preds[w].clear();
                preds[w].push(v);
                heap.push(HeapItem {
                    dist: alt,
                    node: w,
                    pred: v,
                });
            } else if same_length(alt, dist[w]) {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
}

/// One row of a ranked centrality table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedRow {
    pub id: String,
    pub name: String,
    pub value: f64,
    /// Competition rank: ties share a rank, the next rank skips.
    pub rank: usize,
    pub is_panelist: bool,
}

/// Nodes sorted by decreasing score (ties by id), with ranks.
pub fn ranked_table(g: &WeightedGraph, scores: &[f64]) -> Vec<RankedRow> {
    let mut idx: Vec<usize> = (0..g.node_count()).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then_with(|| g.node(a).id.cmp(&g.node(b).id))
    });
    let mut rows: Vec<RankedRow> = Vec::with_capacity(idx.len());
    for (pos, &i) in idx.iter().enumerate() {
        let rank = match rows.last() {
            Some(prev) if prev.value == scores[i] => prev.rank,
            _ => pos + 1,
        };
        let node = g.node(i);
        rows.push(RankedRow {
            id: node.id.clone(),
            name: node.label.clone(),
            value: scores[i],
            rank,
            is_panelist: node.attrs.is_panelist,
        });
    }
    rows
}

pub const EIGEN_TOLERANCE: f64 = 1e-10;
pub const EIGEN_MAX_ITERATIONS: usize = 10_000;

/// Matrix whose principal eigenvector scores a two-mode network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMatrix {
    /// Symmetric adjacency over both modes; one joint unit-norm vector.
    #[default]
    Adjacency,
    /// Hubs/authorities: principal eigenvectors of `B·Bᵀ` and `Bᵀ·B`,
    /// each mode normalized on its own.
    HubsAuthorities,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Use edge weights as adjacency entries; otherwise every edge counts 1.
    pub weighted: bool,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub matrix: EigenMatrix,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            weighted: true,
            tolerance: EIGEN_TOLERANCE,
            max_iterations: EIGEN_MAX_ITERATIONS,
            matrix: EigenMatrix::Adjacency,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    /// Score per node, non-negative, Euclidean norm 1.
    pub scores: Vec<f64>,
    pub eigenvalue: f64,
    pub iterations: usize,
}

/// Eigenvector centrality by power iteration.
///
/// The principal eigenvector of a disconnected graph lives on the component
/// with the largest spectral radius; that component is scored and every
/// other node gets 0. Ties between components go to the larger component,
/// then to the one holding the lowest node index. Iteration runs on
/// `A + I`, which has the same eigenvectors as `A` but no oscillation on
/// bipartite components. It stops when successive iterates differ by less
/// than `tolerance` in every entry.
pub fn eigenvector_centrality(g: &WeightedGraph, opts: &EigenOptions) -> Result<EigenResult> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Undefined(
            "eigenvector centrality of an empty graph".into(),
        ));
    }
    if g.edge_count() == 0 {
        // zero matrix: every vector is an eigenvector; use the uniform one
        return Ok(EigenResult {
            scores: vec![1.0 / (n as f64).sqrt(); n],
            eigenvalue: 0.0,
            iterations: 0,
        });
    }
    let comps = component_members(&connected_components(g).partition);
    // (eigenvalue, members, vector, iterations) of the dominant component
    type Candidate = (f64, Vec<usize>, Vec<f64>, usize);
    let mut best: Option<Candidate> = None;
    for members in comps {
        if members.len() < 2 {
            continue;
        }
        let (vec, lambda, iters) = power_iterate(g, &members, opts)?;
        let better = match &best {
            None => true,
            Some((bl, bm, _, _)) => {
                let tol = 1e-9 * bl.abs().max(1.0);
                if lambda > bl + tol {
                    true
                } else if lambda < bl - tol {
                    false
                } else {
                    members.len() > bm.len() || (members.len() == bm.len() && members[0] < bm[0])
                }
            }
        };
        if better {
            best = Some((lambda, members, vec, iters));
        }
    }
    let (eigenvalue, members, vec, iterations) = best.expect("graph has an edge");
    let mut scores = vec![0.0; n];
    for (k, &i) in members.iter().enumerate() {
        scores[i] = vec[k];
    }
    Ok(EigenResult {
        scores,
        eigenvalue,
        iterations,
    })
}

fn power_iterate(
    g: &WeightedGraph,
    members: &[usize],
    opts: &EigenOptions,
) -> Result<(Vec<f64>, f64, usize)> {
    let k = members.len();
    let mut local = vec![usize::MAX; g.node_count()];
    for (pos, &i) in members.iter().enumerate() {
        local[i] = pos;
    }
    let adj: Vec<Vec<(usize, f64)>> = members
        .iter()
        .map(|&i| {
            g.neighbors(i)
                .map(|(j, w)| (local[j], if opts.weighted { w } else { 1.0 }))
                .collect()
        })
        .collect();
    let multiply = |x: &[f64], out: &mut [f64]| {
        for (v, row) in adj.iter().enumerate() {
            out[v] = row.iter().map(|&(u, w)| w * x[u]).sum();
        }
    };
    let mut x = vec![1.0 / (k as f64).sqrt(); k];
    let mut y = vec![0.0; k];
    for it in 1..=opts.max_iterations {
        multiply(&x, &mut y);
        for v in 0..k {
            y[v] += x[v];
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in y.iter_mut() {
            *v /= norm;
        }
        let diff = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut y);
        if diff < opts.tolerance {
            multiply(&x, &mut y);
            let lambda: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            return Ok((x, lambda, it));
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
    })
}

/// Eigenvector centrality of a two-mode network. Returns the scores of the
/// left and right nodes.
pub fn eigenvector_centrality_bipartite(
    b: &BipartiteGraph,
    opts: &EigenOptions,
) -> Result<(Vec<f64>, Vec<f64>, EigenResult)> {
    let g = b.to_weighted_graph();
    let res = eigenvector_centrality(&g, opts)?;
    let nl = b.left().len();
    let mut left = res.scores[..nl].to_vec();
    let mut right = res.scores[nl..].to_vec();
    if opts.matrix == EigenMatrix::HubsAuthorities {
        // [u; v] for the largest singular value of B: u and v are the
        // principal eigenvectors of B·Bᵀ and Bᵀ·B up to scale
        for side in [&mut left, &mut right] {
            let norm = side.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                side.iter_mut().for_each(|v| *v /= norm);
            }
        }
    }
    Ok((left, right, res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NodeAttrs;

    fn graph(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
        let mut g = WeightedGraph::new();
        for i in 0..n {
            g.add_node(&format!("n{i}"), "", NodeAttrs::default())
                .unwrap();
        }
        for &(u, v) in edges {
            g.add_edge_idx(u, v, 1.0).unwrap();
        }
        g
    }

    #[test]
    fn path_center_is_one() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let b = betweenness(&g, BetweennessOptions::default());
        assert_eq!(b, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn cycle_is_symmetric() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let b = betweenness(&g, BetweennessOptions::default());
        for x in &b {
            assert!((x - b[0]).abs() < 1e-15);
        }
        // each node is on one of the two geodesics of the opposite pair
        assert!((b[0] - 0.5 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn raw_counts_split_between_geodesics() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let opts = BetweennessOptions {
            normalized: false,
            paths: PathMode::Hops,
        };
        assert_eq!(betweenness(&g, opts), vec![0.5; 4]);
    }

    #[test]
    fn weighted_paths_avoid_heavy_edges() {
        // 0-2 direct with length 5, or 0-1-2 with length 2
        let mut g = graph(3, &[(0, 1), (1, 2)]);
        g.add_edge_idx(0, 2, 5.0).unwrap();
        let hops = betweenness(&g, BetweennessOptions::default());
        assert_eq!(hops, vec![0.0; 3]);
        let weighted = betweenness(
            &g,
            BetweennessOptions {
                normalized: true,
                paths: PathMode::Weighted,
            },
        );
        assert_eq!(weighted, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn ranks_share_ties() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let rows = ranked_table(&g, &[0.0, 2.0, 2.0, 0.0]);
        let ranks: Vec<_> = rows.iter().map(|r| (r.id.as_str(), r.rank)).collect();
        assert_eq!(ranks, vec![("n1", 1), ("n2", 1), ("n0", 3), ("n3", 3)]);
    }

    #[test]
    fn regular_graph_is_uniform() {
        let g = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let r = eigenvector_centrality(&g, &EigenOptions::default()).unwrap();
        for s in &r.scores {
            assert!((s - 1.0 / 5f64.sqrt()).abs() < 1e-9);
        }
        assert!((r.eigenvalue - 2.0).abs() < 1e-9);
    }

    #[test]
    fn star_center_dominates() {
        let g = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let r = eigenvector_centrality(&g, &EigenOptions::default()).unwrap();
        assert!(r.scores[1..].iter().all(|&s| s < r.scores[0]));
        // star K1,4: λ = 2, centre 1/√2
        assert!((r.scores[0] - 0.5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn smaller_components_get_zero() {
        let g = graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4)]);
        let r = eigenvector_centrality(&g, &EigenOptions::default()).unwrap();
        assert_eq!(&r.scores[3..], &[0.0, 0.0, 0.0]);
        assert!(r.scores[..3].iter().all(|&s| s > 0.5));
    }

    #[test]
    fn non_convergence_is_reported() {
        let g = graph(12, &(0..11).map(|i| (i, i + 1)).collect::<Vec<_>>());
        let opts = EigenOptions {
            max_iterations: 3,
            ..EigenOptions::default()
        };
        match eigenvector_centrality(&g, &opts) {
            Err(Error::NoConvergence { iterations }) => assert_eq!(iterations, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hubs_authorities_normalizes_each_mode() {
        let mut b = BipartiteGraph::new();
        for l in ["a", "b", "c"] {
            b.add_left(l, l, NodeAttrs::default()).unwrap();
        }
        for r in ["X", "Y"] {
            b.add_right(r, r, NodeAttrs::default()).unwrap();
        }
        for (l, r) in [("a", "X"), ("b", "X"), ("b", "Y"), ("c", "Y")] {
            b.add_edge(l, r, 1.0).unwrap();
        }
        let opts = EigenOptions {
            matrix: EigenMatrix::HubsAuthorities,
            ..EigenOptions::default()
        };
        let (left, right, _) = eigenvector_centrality_bipartite(&b, &opts).unwrap();
        let nl: f64 = left.iter().map(|v| v * v).sum();
        let nr: f64 = right.iter().map(|v| v * v).sum();
        assert!((nl - 1.0).abs() < 1e-9 && (nr - 1.0).abs() < 1e-9);
        assert!(left[1] > left[0]);
        assert!((right[0] - right[1]).abs() < 1e-9);
    }
}
