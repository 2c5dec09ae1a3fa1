use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::model::{Partition, WeightedGraph};
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentRow {
    pub cluster: u32,
    pub size: usize,
    pub size_pct: f64,
    pub panelists: usize,
    pub panelists_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Components {
    /// Component id per node, `1..=k` in discovery order.
    pub partition: Partition,
    pub rows: Vec<ComponentRow>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.rows.len()
    }

    pub fn largest(&self) -> Option<&ComponentRow> {
        // first of the largest wins on ties
        self.rows
            .iter()
            .fold(None, |best: Option<&ComponentRow>, r| match best {
                Some(b) if b.size >= r.size => Some(b),
                _ => Some(r),
            })
    }
}

/// Connected components by breadth-first search, scanning start nodes in
/// index order.
pub fn connected_components(g: &WeightedGraph) -> Components {
    let n = g.node_count();
    let mut assignment = vec![0u32; n];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if assignment[s] != 0 {
            continue;
        }
        next += 1;
        assignment[s] = next;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for (w, _) in g.neighbors(v) {
                if assignment[w] == 0 {
                    assignment[w] = next;
                    queue.push_back(w);
                }
            }
        }
    }
    let partition = Partition::new(assignment);
    let rows = summarize(g, &partition);
    Components { partition, rows }
}

/// Same partition as [`connected_components`], computed with a disjoint-set
/// forest and numbered by first appearance in node order.
pub fn components_union_find(g: &WeightedGraph) -> Partition {
    let n = g.node_count();
    let mut uf = UnionFind::new(n);
    for e in g.edges() {
        uf.union(e.u, e.v);
    }
    let roots: Vec<u32> = (0..n).map(|i| uf.find(i) as u32 + 1).collect();
    Partition::new(roots).normalized()
}

fn summarize(g: &WeightedGraph, p: &Partition) -> Vec<ComponentRow> {
    let k = p.cluster_count();
    let mut size = vec![0usize; k + 1];
    let mut panel = vec![0usize; k + 1];
    for (i, &c) in p.assignment.iter().enumerate() {
        size[c as usize] += 1;
        if g.node(i).attrs.is_panelist {
            panel[c as usize] += 1;
        }
    }
    let n = g.node_count().max(1) as f64;
    let total_panel = g.panelist_count();
    (1..=k)
        .map(|c| ComponentRow {
            cluster: c as u32,
            size: size[c],
            size_pct: 100.0 * size[c] as f64 / n,
            panelists: panel[c],
            panelists_pct: if total_panel == 0 {
                0.0
            } else {
                100.0 * panel[c] as f64 / total_panel as f64
            },
        })
        .collect()
}

/// Node indices of each cluster `1..=k` of `p`.
pub fn component_members(p: &Partition) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); p.cluster_count()];
    for (i, &c) in p.assignment.iter().enumerate() {
        if c > 0 {
            out[c as usize - 1].push(i);
        }
    }
    out
}
