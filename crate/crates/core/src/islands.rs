//! Line islands of weighted networks, off-island shares, important
//! vertices and their cross-tabulation.
//!
//! A line island is a vertex set `C` that stays connected using only edges
//! strictly heavier than every edge joining `C` to the rest of the graph.
//! Equivalently, `C` is a connected component of the threshold graph
//! `G[w ≥ t]` for some `t`, so the islands of a graph form a hierarchy that
//! is recovered by merging components while scanning edges by decreasing
//! weight. The strength of an island is the weight at which it forms, i.e.
//! the weakest edge of its maximum spanning tree.
//!
//! Selection returns, for every vertex, the largest island containing it
//! whose size lies within the bounds. Singleton islands are never reported;
//! their vertices are off-island.

use std::collections::HashMap;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Node, Partition, WeightedGraph};
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IslandParams {
    pub min_size: usize,
    pub max_size: usize,
}

impl IslandParams {
    pub fn new(min_size: usize, max_size: usize) -> Result<Self> {
        let p = IslandParams { min_size, max_size };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_size == 0 {
            return Err(Error::InvalidArgument(
                "island min_size must be at least 1".into(),
            ));
        }
        if self.min_size > self.max_size {
            return Err(Error::InvalidArgument(format!(
                "island min_size {} exceeds max_size {}",
                self.min_size, self.max_size
            )));
        }
        Ok(())
    }

    /// Bounds used for journal networks: `[1, ⌊3n/5⌋]` for `n` panelists.
    pub fn journal_default(panelists: usize) -> Self {
        IslandParams {
            min_size: 1,
            max_size: (3 * panelists / 5).max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Island {
    /// Node indices, ascending.
    pub members: Vec<usize>,
    pub strength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IslandResult {
    /// Ordered by size (desc), strength (desc), smallest member id.
    pub islands: Vec<Island>,
    pub off_island: Vec<usize>,
    pub params: IslandParams,
    /// Island id per node (`1..=k` following `islands`), 0 off-island.
    pub partition: Partition,
}

impl IslandResult {
    pub fn largest(&self) -> Option<&Island> {
        self.islands.first()
    }
}

#[derive(Debug)]
struct TreeNode {
    size: usize,
    strength: f64,
    children: Vec<usize>,
}

/// Builds the island hierarchy. Leaves `0..n` are the vertices; every
/// internal node is a component of some threshold graph. Returns the nodes
/// and the roots (one per connected component).
fn hierarchy(g: &WeightedGraph) -> (Vec<TreeNode>, Vec<usize>) {
    let n = g.node_count();
    let mut tree: Vec<TreeNode> = (0..n)
        .map(|_| TreeNode {
            size: 1,
            strength: f64::INFINITY,
            children: Vec::new(),
        })
        .collect();
    let mut tree_of_root: Vec<usize> = (0..n).collect();
    let mut uf = UnionFind::new(n);

    let mut edges: Vec<_> = g.edges().collect();
    edges.sort_by(|a, b| {
        b.weight
            .total_cmp(&a.weight)
            .then((a.u, a.v).cmp(&(b.u, b.v)))
    });

    let mut start = 0;
    while start < edges.len() {
        let w = edges[start].weight;
        let end = start + edges[start..].iter().take_while(|e| e.weight == w).count();
        let group = &edges[start..end];

        let before: Vec<(usize, usize)> = group
            .iter()
            .map(|e| (tree_of_root[uf.find(e.u)], tree_of_root[uf.find(e.v)]))
            .collect();
        for e in group {
            uf.union(e.u, e.v);
        }
        // new root -> subtrees it swallowed at this level
        let mut merged: HashMap<usize, Vec<usize>> = HashMap::new();
        for (e, &(tu, tv)) in group.iter().zip(&before) {
            let r = uf.find(e.u);
            let list = merged.entry(r).or_default();
            list.push(tu);
            list.push(tv);
        }
        let mut roots: Vec<usize> = merged.keys().copied().collect();
        roots.sort_unstable();
        for r in roots {
            let mut children = merged.remove(&r).unwrap_or_default();
            children.sort_unstable();
            children.dedup();
            if children.len() < 2 {
                continue;
            }
            let size = children.iter().map(|&c| tree[c].size).sum();
            tree.push(TreeNode {
                size,
                strength: w,
                children,
            });
            tree_of_root[r] = tree.len() - 1;
        }
        start = end;
    }

    let mut roots: Vec<usize> = (0..n)
        .filter(|&i| uf.find(i) == i)
        .map(|i| tree_of_root[i])
        .collect();
    roots.sort_unstable();
    (tree, roots)
}

fn leaves(tree: &[TreeNode], node: usize, n: usize, out: &mut Vec<usize>) {
    let mut stack = vec![node];
    while let Some(t) = stack.pop() {
        if t < n {
            out.push(t);
        } else {
            stack.extend(tree[t].children.iter().copied());
        }
    }
}

/// Maximal line islands of `g` with sizes in `[params.min_size,
/// params.max_size]`, ignoring singletons.
pub fn line_islands(g: &WeightedGraph, params: IslandParams) -> Result<IslandResult> {
    params.validate()?;
    let n = g.node_count();
    let (tree, roots) = hierarchy(g);
    let lower = params.min_size.max(2);

    let mut islands = Vec::new();
    let mut stack = roots;
    while let Some(t) = stack.pop() {
        let node = &tree[t];
        if node.size <= params.max_size {
            if node.size >= lower {
                let mut members = Vec::with_capacity(node.size);
                leaves(&tree, t, n, &mut members);
                members.sort_unstable();
                islands.push(Island {
                    members,
                    strength: node.strength,
                });
            }
        } else {
            stack.extend(node.children.iter().copied());
        }
    }

    islands.sort_by(|a, b| {
        b.members
            .len()
            .cmp(&a.members.len())
            .then(b.strength.total_cmp(&a.strength))
            .then_with(|| smallest_id(g, &a.members).cmp(smallest_id(g, &b.members)))
    });

    let mut assignment = vec![0u32; n];
    for (k, isl) in islands.iter().enumerate() {
        for &m in &isl.members {
            assignment[m] = k as u32 + 1;
        }
    }
    let off_island = (0..n).filter(|&i| assignment[i] == 0).collect();
    Ok(IslandResult {
        islands,
        off_island,
        params,
        partition: Partition::new(assignment),
    })
}

fn smallest_id<'a>(g: &'a WeightedGraph, members: &[usize]) -> &'a str {
    members
        .iter()
        .map(|&i| g.node(i).id.as_str())
        .min()
        .unwrap_or("")
}

/// Percentage of `panelists` (node indices) that belong to no island.
pub fn off_island_share(res: &IslandResult, panelists: &[usize]) -> Result<f64> {
    if panelists.is_empty() {
        return Err(Error::Undefined(
            "off-island share with no panelists".into(),
        ));
    }
    let off = panelists
        .iter()
        .filter(|&&i| res.partition.assignment.get(i).copied() == Some(0))
        .count();
    Ok(100.0 * off as f64 / panelists.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceSelection {
    /// All nodes by non-increasing score, ties by id.
    pub ranked: Vec<(usize, f64)>,
    pub k: usize,
}

impl ImportanceSelection {
    /// The first `min(k, n)` ranked nodes.
    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.ranked.iter().take(self.k).map(|&(i, _)| i)
    }

    pub fn len(&self) -> usize {
        self.k.min(self.ranked.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, node: usize) -> bool {
        self.selected().any(|i| i == node)
    }
}

/// Top-`k` nodes by centrality score.
pub fn important_vertices(nodes: &[Node], scores: &[f64], k: usize) -> Result<ImportanceSelection> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if k > nodes.len() {
        warn!("k = {k} exceeds the {} nodes; selecting all", nodes.len());
    }
    let mut ranked: Vec<(usize, f64)> = scores.iter().copied().enumerate().collect();
    ranked.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| nodes[a.0].id.cmp(&nodes[b.0].id))
    });
    Ok(ImportanceSelection {
        ranked,
        k: k.min(nodes.len()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosstabRow {
    /// Island id, 0 for the off-island row.
    pub island: u32,
    pub nodes: usize,
    pub important: usize,
    pub important_pct: f64,
}

/// Important vertices per island, one row per island followed by the
/// off-island row.
pub fn importance_island_crosstab(
    res: &IslandResult,
    sel: &ImportanceSelection,
) -> Vec<CrosstabRow> {
    let k = res.islands.len();
    let mut important = vec![0usize; k + 1];
    for i in sel.selected() {
        important[res.partition.assignment[i] as usize] += 1;
    }
    let total = sel.len();
    let pct = |x: usize| {
        if total == 0 {
            0.0
        } else {
            100.0 * x as f64 / total as f64
        }
    };
    let mut rows: Vec<CrosstabRow> = res
        .islands
        .iter()
        .enumerate()
        .map(|(j, isl)| CrosstabRow {
            island: j as u32 + 1,
            nodes: isl.members.len(),
            important: important[j + 1],
            important_pct: pct(important[j + 1]),
        })
        .collect();
    rows.push(CrosstabRow {
        island: 0,
        nodes: res.off_island.len(),
        important: important[0],
        important_pct: pct(important[0]),
    });
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NodeAttrs;

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> WeightedGraph {
        let mut g = WeightedGraph::new();
        for i in 0..n {
            g.add_node(&format!("v{i:02}"), "", NodeAttrs::default())
                .unwrap();
        }
        for &(u, v, w) in edges {
            g.add_edge_idx(u, v, w).unwrap();
        }
        g
    }

    #[test]
    fn uniform_graph_is_one_island() {
        let g = graph(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]);
        let r = line_islands(&g, IslandParams::new(1, 4).unwrap()).unwrap();
        assert_eq!(r.islands.len(), 1);
        assert_eq!(r.islands[0].members, vec![0, 1, 2, 3]);
        assert!(r.off_island.is_empty());
        // too large: no sub-island exists, everything is off-island
        let r = line_islands(&g, IslandParams::new(1, 3).unwrap()).unwrap();
        assert!(r.islands.is_empty());
        assert_eq!(r.off_island.len(), 4);
    }

    #[test]
    fn two_triangles_split_at_the_bridge() {
        let g = graph(
            6,
            &[
                (0, 1, 5.0),
                (1, 2, 5.0),
                (0, 2, 5.0),
                (3, 4, 5.0),
                (4, 5, 5.0),
                (3, 5, 5.0),
                (2, 3, 1.0),
            ],
        );
        let r = line_islands(&g, IslandParams::new(1, 3).unwrap()).unwrap();
        assert_eq!(r.islands.len(), 2);
        assert_eq!(r.islands[0].members, vec![0, 1, 2]);
        assert_eq!(r.islands[1].members, vec![3, 4, 5]);
        assert_eq!(r.islands[0].strength, 5.0);
        assert_eq!(r.partition.assignment, vec![1, 1, 1, 2, 2, 2]);
        let r = line_islands(&g, IslandParams::new(1, 6).unwrap()).unwrap();
        assert_eq!(r.islands.len(), 1);
        assert_eq!(r.islands[0].strength, 1.0);
    }

    #[test]
    fn nested_islands_prefer_the_largest_within_bounds() {
        // heavy pair 0-1 inside a medium triangle 0-1-2, weakly tied to 3
        let g = graph(4, &[(0, 1, 9.0), (1, 2, 4.0), (0, 2, 3.0), (2, 3, 1.0)]);
        let r = line_islands(&g, IslandParams::new(1, 3).unwrap()).unwrap();
        assert_eq!(r.islands.len(), 1);
        assert_eq!(r.islands[0].members, vec![0, 1, 2]);
        assert_eq!(r.off_island, vec![3]);
        let r = line_islands(&g, IslandParams::new(1, 2).unwrap()).unwrap();
        assert_eq!(r.islands[0].members, vec![0, 1]);
        let r = line_islands(&g, IslandParams::new(3, 3).unwrap()).unwrap();
        assert_eq!(r.islands[0].members, vec![0, 1, 2]);
    }

    #[test]
    fn bad_params() {
        assert!(IslandParams::new(5, 3).is_err());
        assert!(IslandParams::new(0, 3).is_err());
        assert_eq!(IslandParams::journal_default(36).max_size, 21);
        assert_eq!(IslandParams::journal_default(31).max_size, 18);
        assert_eq!(IslandParams::journal_default(37).max_size, 22);
    }

    #[test]
    fn off_island_percentages() {
        let g = graph(4, &[(0, 1, 2.0), (2, 3, 1.0), (1, 2, 1.0)]);
        let r = line_islands(&g, IslandParams::new(1, 2).unwrap()).unwrap();
        assert_eq!(r.islands.len(), 1);
        assert_eq!(off_island_share(&r, &[0, 1, 2, 3]).unwrap(), 50.0);
        assert_eq!(off_island_share(&r, &[0, 1]).unwrap(), 0.0);
        assert!(off_island_share(&r, &[]).is_err());
    }

    #[test]
    fn importance_ties_by_id() {
        let g = graph(4, &[]);
        let sel = important_vertices(g.nodes(), &[0.5, 0.5, 0.5, 0.5], 2).unwrap();
        assert_eq!(sel.selected().collect::<Vec<_>>(), vec![0, 1]);
        let sel = important_vertices(g.nodes(), &[0.1, 0.9, 0.5, 0.2], 10).unwrap();
        assert_eq!(sel.len(), 4);
        assert_eq!(sel.selected().next(), Some(1));
    }

    #[test]
    fn crosstab_sums_to_hundred() {
        let g = graph(5, &[(0, 1, 3.0), (1, 2, 1.0), (3, 4, 2.0)]);
        let r = line_islands(&g, IslandParams::new(1, 2).unwrap()).unwrap();
        let sel = important_vertices(g.nodes(), &[0.9, 0.8, 0.7, 0.1, 0.0], 3).unwrap();
        let rows = importance_island_crosstab(&r, &sel);
        assert_eq!(rows.len(), r.islands.len() + 1);
        let total: f64 = rows.iter().map(|r| r.important_pct).sum();
        assert!((total - 100.0).abs() < 1e-9);
        assert_eq!(rows.last().unwrap().important, 1);

        let empty = graph(3, &[]);
        let r = line_islands(&empty, IslandParams::new(1, 3).unwrap()).unwrap();
        let sel = important_vertices(empty.nodes(), &[1.0, 0.5, 0.2], 2).unwrap();
        let rows = importance_island_crosstab(&r, &sel);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].important_pct, 100.0);
    }
}
