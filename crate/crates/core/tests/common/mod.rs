//! Random graph generators and brute-force oracles shared by the
//! integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::PathBuf;

use panelnet::{BipartiteGraph, NodeAttrs, WeightedGraph};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

pub struct Gen(ChaCha8Rng);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in `0..n` (modulo bias is irrelevant at these sizes).
    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Graph on `n` nodes `v00..`, each pair linked with probability `p`,
    /// integer weights in `1..=wmax`.
    pub fn graph(&mut self, n: usize, p: f64, wmax: usize) -> WeightedGraph {
        let mut g = WeightedGraph::new();
        for i in 0..n {
            g.add_node(&format!("v{i:02}"), "", NodeAttrs::default())
                .unwrap();
        }
        for u in 0..n {
            for v in u + 1..n {
                if self.chance(p) {
                    g.add_edge_idx(u, v, self.range(1, wmax) as f64).unwrap();
                }
            }
        }
        g
    }

    /// Connected graph: a random spanning tree plus extra edges.
    pub fn connected_graph(&mut self, n: usize, p: f64, wmax: usize) -> WeightedGraph {
        let mut g = self.graph(n, p, wmax);
        for v in 1..n {
            let u = self.below(v);
            if g.weight(u, v).is_none() {
                g.add_edge_idx(u, v, self.range(1, wmax) as f64).unwrap();
            }
        }
        g
    }

    pub fn bipartite(&mut self, nl: usize, nr: usize, p: f64) -> BipartiteGraph {
        let mut b = BipartiteGraph::new();
        for i in 0..nl {
            b.add_left(&format!("l{i}"), "", NodeAttrs::default())
                .unwrap();
        }
        for j in 0..nr {
            b.add_right(&format!("r{j}"), "", NodeAttrs::default())
                .unwrap();
        }
        for i in 0..nl {
            for j in 0..nr {
                if self.chance(p) {
                    b.add_edge_idx(i, j, self.range(1, 3) as f64).unwrap();
                }
            }
        }
        b
    }
}

fn adjacency(g: &WeightedGraph) -> Vec<Vec<(usize, f64)>> {
    (0..g.node_count())
        .map(|i| g.neighbors(i).collect())
        .collect()
}

/// Component label per node by depth-first search, numbered by first node.
pub fn dfs_components(g: &WeightedGraph) -> Vec<u32> {
    let adj = adjacency(g);
    let mut label = vec![0u32; adj.len()];
    let mut next = 0;
    for s in 0..adj.len() {
        if label[s] != 0 {
            continue;
        }
        next += 1;
        let mut stack = vec![s];
        label[s] = next;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adj[v] {
                if label[w] == 0 {
                    label[w] = next;
                    stack.push(w);
                }
            }
        }
    }
    label
}

fn connected_within(adj: &[Vec<(usize, f64)>], set: u32, min_weight: f64) -> bool {
    let start = set.trailing_zeros() as usize;
    let mut seen = 1u32 << start;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &(w, wt) in &adj[v] {
            let bit = 1u32 << w;
            if set & bit != 0 && seen & bit == 0 && wt > min_weight {
                seen |= bit;
                stack.push(w);
            }
        }
    }
    seen == set
}

/// Every line island of `g` with at least two vertices, by enumerating all
/// vertex subsets: a subset qualifies when it is connected through internal
/// edges strictly heavier than its heaviest boundary edge.
pub fn all_line_islands(g: &WeightedGraph) -> Vec<u32> {
    let n = g.node_count();
    assert!(n <= 20);
    let adj = adjacency(g);
    let mut out = Vec::new();
    for set in 1u32..(1u32 << n) {
        if set.count_ones() < 2 {
            continue;
        }
        let mut boundary = f64::NEG_INFINITY;
        for v in 0..n {
            if set & (1 << v) != 0 {
                for &(w, wt) in &adj[v] {
                    if set & (1 << w) == 0 {
                        boundary = boundary.max(wt);
                    }
                }
            }
        }
        if connected_within(&adj, set, boundary) {
            out.push(set);
        }
    }
    out
}

/// For every vertex, the largest island containing it with size in
/// `[max(min, 2), max]`; returned as a set of sorted member lists.
pub fn island_oracle(g: &WeightedGraph, min: usize, max: usize) -> BTreeSet<Vec<usize>> {
    let lower = min.max(2) as u32;
    let islands: Vec<u32> = all_line_islands(g)
        .into_iter()
        .filter(|s| (lower..=max as u32).contains(&s.count_ones()))
        .collect();
    let mut chosen = BTreeSet::new();
    for v in 0..g.node_count() {
        let best = islands
            .iter()
            .filter(|&&s| s & (1 << v) != 0)
            .max_by_key(|s| s.count_ones());
        if let Some(&s) = best {
            chosen.insert((0..g.node_count()).filter(|&i| s & (1 << i) != 0).collect());
        }
    }
    chosen
}

/// Betweenness by listing every shortest path explicitly. Distances come
/// from Floyd-Warshall; paths are enumerated depth-first with pruning.
/// Unnormalized; `weighted` uses edge weights as lengths (integers expected).
pub fn betweenness_oracle(g: &WeightedGraph, weighted: bool) -> Vec<f64> {
    let n = g.node_count();
    let adj = adjacency(g);
    let len = |w: f64| if weighted { w } else { 1.0 };
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for v in 0..n {
        dist[v][v] = 0.0;
        for &(w, wt) in &adj[v] {
            dist[v][w] = len(wt);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if dist[i][k] + dist[k][j] < dist[i][j] {
                    dist[i][j] = dist[i][k] + dist[k][j];
                }
            }
        }
    }
    let mut score = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            if !dist[s][t].is_finite() {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut path = vec![s];
            let mut on = vec![false; n];
            on[s] = true;
            enumerate(
                &adj, &len, t, dist[s][t], 0.0, &mut path, &mut on, &mut paths,
            );
            let total = paths.len() as f64;
            let mut through = vec![0usize; n];
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    through[v] += 1;
                }
            }
            for v in 0..n {
                score[v] += through[v] as f64 / total;
            }
        }
    }
    score
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    adj: &[Vec<(usize, f64)>],
    len: &dyn Fn(f64) -> f64,
    target: usize,
    limit: f64,
    sofar: f64,
    path: &mut Vec<usize>,
    on: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    let v = *path.last().unwrap();
    if v == target {
        if sofar == limit {
            out.push(path.clone());
        }
        return;
    }
    for &(w, wt) in &adj[v] {
        let next = sofar + len(wt);
        if on[w] || next > limit {
            continue;
        }
        on[w] = true;
        path.push(w);
        enumerate(adj, len, target, limit, next, path, on, out);
        path.pop();
        on[w] = false;
    }
}

/// Principal eigenvector (non-negative, unit norm) and eigenvalue of the
/// weighted adjacency matrix via a dense symmetric eigendecomposition.
pub fn eigen_oracle(g: &WeightedGraph) -> (Vec<f64>, f64) {
    let n = g.node_count();
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for e in g.edges() {
        m[(e.u, e.v)] = e.weight;
        m[(e.v, e.u)] = e.weight;
    }
    let eig = nalgebra::SymmetricEigen::new(m);
    let (k, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let col = eig.eigenvectors.column(k);
    let sign = if col.sum() < 0.0 { -1.0 } else { 1.0 };
    let v: Vec<f64> = col.iter().map(|x| x * sign).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (v.iter().map(|x| x / norm).collect(), lambda)
}

/// Shared-neighbour counts between left nodes, keyed by id pairs.
pub fn projection_oracle(b: &BipartiteGraph) -> BTreeMap<(String, String), f64> {
    let nbrs: Vec<HashSet<String>> = b
        .left()
        .iter()
        .map(|l| {
            b.edges()
                .filter(|e| b.left()[e.u].id == l.id)
                .map(|e| b.right()[e.v].id.clone())
                .collect()
        })
        .collect();
    let mut out = BTreeMap::new();
    for i in 0..nbrs.len() {
        for j in i + 1..nbrs.len() {
            let c = nbrs[i].intersection(&nbrs[j]).count();
            if c > 0 {
                let (a, z) = (b.left()[i].id.clone(), b.left()[j].id.clone());
                let key = if a < z { (a, z) } else { (z, a) };
                out.insert(key, c as f64);
            }
        }
    }
    out
}

/// Edges of `g` keyed by ordered id pairs.
pub fn edge_map(g: &WeightedGraph) -> BTreeMap<(String, String), f64> {
    g.edges()
        .map(|e| {
            let (a, z) = (g.node(e.u).id.clone(), g.node(e.v).id.clone());
            (if a < z { (a, z) } else { (z, a) }, e.weight)
        })
        .collect()
}

/// Reads a `degree,frequency` CSV.
pub fn degree_counts(rel: &str) -> Vec<(usize, usize)> {
    let mut rdr = csv::Reader::from_path(fixture(rel)).unwrap();
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap())
        })
        .collect()
}
