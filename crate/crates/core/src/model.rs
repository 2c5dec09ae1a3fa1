//! Graph data model shared by every analysis.
//!
//! Two graph types cover all networks built by the crate:
//!
//! - [`WeightedGraph`]: undirected, simple, positively weighted. Parallel
//!   insertions aggregate into a single edge whose weight is the sum.
//! - [`BipartiteGraph`]: two-mode network (scholars on the left, journals or
//!   institutions on the right) with disjoint id spaces.
//!
//! Nodes are keyed by their ingest-supplied id. Display names are carried
//! for reporting only and never used for identity.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identity of a scholar as supplied by the input data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ScholarId {
    pub id: String,
    #[serde(default)]
    pub display_name: String,
}

impl ScholarId {
    pub fn new(id: impl Into<String>, display_name: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(Error::Validation("scholar id must be non-empty".into()));
        }
        Ok(ScholarId {
            id,
            display_name: display_name.into(),
        })
    }

    /// Display name, falling back to the id when no name is known.
    pub fn label(&self) -> &str {
        if self.display_name.is_empty() {
            &self.id
        } else {
            &self.display_name
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeAttrs {
    pub is_panelist: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub panel_label: Option<String>,
    /// Affiliation category of an institution node; reporting only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
}

impl NodeAttrs {
    pub fn panelist(panel_label: Option<&str>) -> Self {
        NodeAttrs {
            is_panelist: true,
            panel_label: panel_label.map(str::to_string),
            category: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub label: String,
    #[serde(default)]
    pub attrs: NodeAttrs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Edge counts by weight class: exactly 1, exactly 2, above 2.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightHistogram {
    pub weight_1: usize,
    pub weight_2: usize,
    pub weight_gt_2: usize,
}

impl WeightHistogram {
    pub fn total(&self) -> usize {
        self.weight_1 + self.weight_2 + self.weight_gt_2
    }

    fn record(&mut self, w: f64) {
        if w == 1.0 {
            self.weight_1 += 1;
        } else if w == 2.0 {
            self.weight_2 += 1;
        } else if w > 2.0 {
            self.weight_gt_2 += 1;
        }
        // weights in (0,1) and (1,2) have no class
    }
}

fn check_weight(w: f64) -> Result<()> {
    if w.is_finite() && w > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidWeight(w))
    }
}

/// Undirected weighted simple graph.
///
/// Node indices are dense (`0..node_count()`) and follow insertion order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct WeightedGraph {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    adj: Vec<BTreeMap<usize, f64>>,
    edge_count: usize,
}

impl WeightedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a new node. Fails if the id is already present.
    pub fn add_node(&mut self, id: &str, label: &str, attrs: NodeAttrs) -> Result<usize> {
        if id.is_empty() {
            return Err(Error::Validation("node id must be non-empty".into()));
        }
        if self.index.contains_key(id) {
            return Err(Error::DuplicateNode(id.to_string()));
        }
        let idx = self.nodes.len();
        self.nodes.push(Node {
            id: id.to_string(),
            label: label.to_string(),
            attrs,
        });
        self.index.insert(id.to_string(), idx);
        self.adj.push(BTreeMap::new());
        Ok(idx)
    }

    /// Returns the index of `id`, registering it first if needed.
    pub fn ensure_node(&mut self, id: &str, label: &str, attrs: NodeAttrs) -> Result<usize> {
        match self.index.get(id) {
            Some(&i) => Ok(i),
            None => self.add_node(id, label, attrs),
        }
    }

    /// Adds `w` to the weight of edge `{u, v}`, creating it if absent.
    pub fn add_edge(&mut self, u: &str, v: &str, w: f64) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(u.to_string()));
        }
        let ui = self
            .index_of(u)
            .ok_or_else(|| Error::UnknownNode(u.to_string()))?;
        let vi = self
            .index_of(v)
            .ok_or_else(|| Error::UnknownNode(v.to_string()))?;
        self.add_edge_idx(ui, vi, w)
    }

    pub fn add_edge_idx(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        let n = self.nodes.len();
        if u >= n {
            return Err(Error::UnknownNode(format!("#{u}")));
        }
        if v >= n {
            return Err(Error::UnknownNode(format!("#{v}")));
        }
        if u == v {
            return Err(Error::SelfLoop(self.nodes[u].id.clone()));
        }
        check_weight(w)?;
        let entry = self.adj[u].entry(v).or_insert(0.0);
        if *entry == 0.0 {
            self.edge_count += 1;
        }
        *entry += w;
        let total = *entry;
        self.adj[v].insert(u, total);
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn total_weight(&self) -> f64 {
        self.edges().map(|e| e.weight).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn set_attrs(&mut self, i: usize, attrs: NodeAttrs) {
        self.nodes[i].attrs = attrs;
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj[i].iter().map(|(&j, &w)| (j, w))
    }

    /// Number of incident edges (unweighted).
    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.adj.get(u).and_then(|m| m.get(&v)).copied()
    }

    /// Every edge once, with `u < v`, in ascending `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, m)| {
            m.range(u + 1..)
                .map(move |(&v, &weight)| Edge { u, v, weight })
        })
    }

    pub fn min_edge_weight(&self) -> Option<f64> {
        self.edges().map(|e| e.weight).reduce(f64::min)
    }

    pub fn max_edge_weight(&self) -> Option<f64> {
        self.edges().map(|e| e.weight).reduce(f64::max)
    }

    pub fn edge_weight_histogram(&self) -> WeightHistogram {
        let mut h = WeightHistogram::default();
        for e in self.edges() {
            h.record(e.weight);
        }
        h
    }

    pub fn panelist_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.attrs.is_panelist).count()
    }

    /// Subgraph induced by `keep` (indices into this graph). Node order in
    /// the result follows `keep`.
    pub fn induced_subgraph(&self, keep: &[usize]) -> WeightedGraph {
        let mut sub = WeightedGraph::new();
        let mut map = HashMap::with_capacity(keep.len());
        for &i in keep {
            let n = &self.nodes[i];
            if let Ok(j) = sub.add_node(&n.id, &n.label, n.attrs.clone()) {
                map.insert(i, j);
            }
        }
        for &i in keep {
            for (j, w) in self.neighbors(i) {
                if i < j {
                    if let (Some(&a), Some(&b)) = (map.get(&i), map.get(&j)) {
                        sub.adj[a].insert(b, w);
                        sub.adj[b].insert(a, w);
                        sub.edge_count += 1;
                    }
                }
            }
        }
        sub
    }

    /// Copy of the graph with every weight passed through `f`.
    pub fn map_weights(&self, f: impl Fn(f64) -> f64) -> Result<WeightedGraph> {
        let mut g = self.clone();
        for m in g.adj.iter_mut() {
            for w in m.values_mut() {
                *w = f(*w);
                check_weight(*w)?;
            }
        }
        Ok(g)
    }

    /// Edges as `(id, id, weight)` with the smaller id first, sorted.
    /// Two graphs with equal canonical edges and node sets are isomorphic
    /// under their id labelling.
    pub fn canonical_edges(&self) -> Vec<(String, String, f64)> {
        let mut out: Vec<_> = self
            .edges()
            .map(|e| {
                let a = self.nodes[e.u].id.clone();
                let b = self.nodes[e.v].id.clone();
                if a <= b {
                    (a, b, e.weight)
                } else {
                    (b, a, e.weight)
                }
            })
            .collect();
        out.sort_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
        out
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    nodes: Vec<Node>,
    edges: Vec<EdgeRepr>,
}

#[derive(Serialize, Deserialize)]
struct EdgeRepr {
    u: String,
    v: String,
    w: f64,
}

impl From<WeightedGraph> for GraphRepr {
    fn from(g: WeightedGraph) -> Self {
        let edges = g
            .edges()
            .map(|e| EdgeRepr {
                u: g.nodes[e.u].id.clone(),
                v: g.nodes[e.v].id.clone(),
                w: e.weight,
            })
            .collect();
        GraphRepr {
            nodes: g.nodes,
            edges,
        }
    }
}

impl TryFrom<GraphRepr> for WeightedGraph {
    type Error = Error;

    fn try_from(r: GraphRepr) -> Result<Self> {
        let mut g = WeightedGraph::new();
        for n in r.nodes {
            g.add_node(&n.id, &n.label, n.attrs)?;
        }
        for e in r.edges {
            g.add_edge(&e.u, &e.v, e.w)?;
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Two-mode network. Edges only join a left node to a right node.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BipartiteRepr", into = "BipartiteRepr")]
pub struct BipartiteGraph {
    left: Vec<Node>,
    right: Vec<Node>,
    left_index: HashMap<String, usize>,
    right_index: HashMap<String, usize>,
    /// left index -> (right index -> weight)
    adj: Vec<BTreeMap<usize, f64>>,
    edge_count: usize,
}

impl BipartiteGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_left(&mut self, id: &str, label: &str, attrs: NodeAttrs) -> Result<usize> {
        if id.is_empty() {
            return Err(Error::Validation("node id must be non-empty".into()));
        }
        if self.right_index.contains_key(id) {
            return Err(Error::Validation(format!(
                "id `{id}` already used on the right side"
            )));
        }
        if let Some(&i) = self.left_index.get(id) {
            return Ok(i);
        }
        let i = self.left.len();
        self.left.push(Node {
            id: id.to_string(),
            label: label.to_string(),
            attrs,
        });
        self.left_index.insert(id.to_string(), i);
        self.adj.push(BTreeMap::new());
        Ok(i)
    }

    pub fn add_right(&mut self, id: &str, label: &str, attrs: NodeAttrs) -> Result<usize> {
        if id.is_empty() {
            return Err(Error::Validation("node id must be non-empty".into()));
        }
        if self.left_index.contains_key(id) {
            return Err(Error::Validation(format!(
                "id `{id}` already used on the left side"
            )));
        }
        if let Some(&i) = self.right_index.get(id) {
            return Ok(i);
        }
        let i = self.right.len();
        self.right.push(Node {
            id: id.to_string(),
            label: label.to_string(),
            attrs,
        });
        self.right_index.insert(id.to_string(), i);
        Ok(i)
    }

    pub fn add_edge_idx(&mut self, l: usize, r: usize, w: f64) -> Result<()> {
        if l >= self.left.len() {
            return Err(Error::UnknownNode(format!("left #{l}")));
        }
        if r >= self.right.len() {
            return Err(Error::UnknownNode(format!("right #{r}")));
        }
        check_weight(w)?;
        let entry = self.adj[l].entry(r).or_insert(0.0);
        if *entry == 0.0 {
            self.edge_count += 1;
        }
        *entry += w;
        Ok(())
    }

    pub fn add_edge(&mut self, left: &str, right: &str, w: f64) -> Result<()> {
        let l = *self
            .left_index
            .get(left)
            .ok_or_else(|| Error::UnknownNode(left.to_string()))?;
        let r = *self
            .right_index
            .get(right)
            .ok_or_else(|| Error::UnknownNode(right.to_string()))?;
        self.add_edge_idx(l, r, w)
    }

    pub fn left(&self) -> &[Node] {
        &self.left
    }

    pub fn right(&self) -> &[Node] {
        &self.right
    }

    pub fn nodes(&self, side: Side) -> &[Node] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn left_index_of(&self, id: &str) -> Option<usize> {
        self.left_index.get(id).copied()
    }

    pub fn right_index_of(&self, id: &str) -> Option<usize> {
        self.right_index.get(id).copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn total_weight(&self) -> f64 {
        self.edges().map(|e| e.weight).sum()
    }

    /// Edges as `(left, right, weight)` index triples.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, m)| m.iter().map(move |(&v, &weight)| Edge { u, v, weight }))
    }

    pub fn left_neighbors(&self, l: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj[l].iter().map(|(&r, &w)| (r, w))
    }

    pub fn left_degree(&self, l: usize) -> usize {
        self.adj[l].len()
    }

    /// Right-side adjacency lists, ordered by left index.
    pub fn right_adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut out = vec![Vec::new(); self.right.len()];
        for e in self.edges() {
            out[e.v].push((e.u, e.weight));
        }
        out
    }

    /// Neighbor lists of one side, by index on that side.
    pub fn adjacency(&self, side: Side) -> Vec<Vec<usize>> {
        match side {
            Side::Left => self
                .adj
                .iter()
                .map(|m| m.keys().copied().collect())
                .collect(),
            Side::Right => self
                .right_adjacency()
                .into_iter()
                .map(|v| v.into_iter().map(|(l, _)| l).collect())
                .collect(),
        }
    }

    /// Single-mode view over `left ++ right` (left nodes first). Used where
    /// an algorithm needs the symmetric adjacency of the two-mode network.
    pub fn to_weighted_graph(&self) -> WeightedGraph {
        let mut g = WeightedGraph::new();
        for n in self.left.iter().chain(self.right.iter()) {
            // ids are disjoint across sides, so this cannot collide
            g.add_node(&n.id, &n.label, n.attrs.clone())
                .expect("bipartite sides have disjoint ids");
        }
        let offset = self.left.len();
        for e in self.edges() {
            g.add_edge_idx(e.u, offset + e.v, e.weight)
                .expect("valid bipartite edge");
        }
        g
    }
}

#[derive(Serialize, Deserialize)]
struct BipartiteRepr {
    left: Vec<Node>,
    right: Vec<Node>,
    edges: Vec<EdgeRepr>,
}

impl From<BipartiteGraph> for BipartiteRepr {
    fn from(b: BipartiteGraph) -> Self {
        let edges = b
            .edges()
            .map(|e| EdgeRepr {
                u: b.left[e.u].id.clone(),
                v: b.right[e.v].id.clone(),
                w: e.weight,
            })
            .collect();
        BipartiteRepr {
            left: b.left,
            right: b.right,
            edges,
        }
    }
}

impl TryFrom<BipartiteRepr> for BipartiteGraph {
    type Error = Error;

    fn try_from(r: BipartiteRepr) -> Result<Self> {
        let mut b = BipartiteGraph::new();
        for n in r.left {
            b.add_left(&n.id, &n.label, n.attrs)?;
        }
        for n in r.right {
            b.add_right(&n.id, &n.label, n.attrs)?;
        }
        for e in r.edges {
            b.add_edge(&e.u, &e.v, e.w)?;
        }
        Ok(b)
    }
}

/// Node to cluster assignment, aligned with a graph's node order.
/// Cluster `0` means unassigned (off-island).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub assignment: Vec<u32>,
}

impl Partition {
    pub fn new(assignment: Vec<u32>) -> Self {
        Partition { assignment }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Highest cluster id in use.
    pub fn cluster_count(&self) -> usize {
        self.assignment.iter().copied().max().unwrap_or(0) as usize
    }

    /// Relabels non-zero clusters to `1..=k` in order of first appearance.
    pub fn normalized(&self) -> Partition {
        let mut map: HashMap<u32, u32> = HashMap::new();
        let assignment = self
            .assignment
            .iter()
            .map(|&c| {
                if c == 0 {
                    0
                } else {
                    let next = map.len() as u32 + 1;
                    *map.entry(c).or_insert(next)
                }
            })
            .collect();
        Partition { assignment }
    }

    /// Size of each cluster `1..=cluster_count()`, index 0 holds unassigned.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.cluster_count() + 1];
        for &c in &self.assignment {
            sizes[c as usize] += 1;
        }
        sizes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> WeightedGraph {
        let mut g = WeightedGraph::new();
        for id in ["a", "b", "c"] {
            g.add_node(id, id, NodeAttrs::default()).unwrap();
        }
        g
    }

    #[test]
    fn repeated_insertions_aggregate() {
        let mut g = abc();
        g.add_edge("a", "b", 1.0).unwrap();
        g.add_edge("b", "a", 1.0).unwrap();
        g.add_edge("a", "b", 1.0).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(0, 1), Some(3.0));
        assert_eq!(g.weight(1, 0), Some(3.0));
    }

    #[test]
    fn self_loop_rejected() {
        let mut g = abc();
        let err = g.add_edge("a", "a", 1.0).unwrap_err();
        assert!(err.to_string().contains("self-loop"));
    }

    #[test]
    fn unknown_node_rejected() {
        let mut g = abc();
        assert!(matches!(
            g.add_edge("a", "z", 1.0),
            Err(Error::UnknownNode(_))
        ));
    }

    #[test]
    fn bad_weights_rejected() {
        let mut g = abc();
        assert!(g.add_edge("a", "b", 0.0).is_err());
        assert!(g.add_edge("a", "b", -1.0).is_err());
        assert!(g.add_edge("a", "b", f64::NAN).is_err());
    }

    #[test]
    fn counts() {
        let g = WeightedGraph::new();
        assert_eq!(
            (g.node_count(), g.edge_count(), g.total_weight()),
            (0, 0, 0.0)
        );
        let mut t = abc();
        t.add_edge("a", "b", 1.0).unwrap();
        t.add_edge("b", "c", 1.0).unwrap();
        t.add_edge("a", "c", 1.0).unwrap();
        assert_eq!(
            (t.node_count(), t.edge_count(), t.total_weight()),
            (3, 3, 3.0)
        );
    }

    #[test]
    fn histogram() {
        let mut g = WeightedGraph::new();
        for id in ["a", "b", "c", "d", "e"] {
            g.add_node(id, id, NodeAttrs::default()).unwrap();
        }
        g.add_edge("a", "b", 1.0).unwrap();
        g.add_edge("a", "c", 1.0).unwrap();
        g.add_edge("a", "d", 2.0).unwrap();
        g.add_edge("a", "e", 5.0).unwrap();
        let h = g.edge_weight_histogram();
        assert_eq!((h.weight_1, h.weight_2, h.weight_gt_2), (2, 1, 1));
        assert_eq!(WeightedGraph::new().edge_weight_histogram().total(), 0);
    }

    #[test]
    fn json_round_trip() {
        let mut g = abc();
        g.add_edge("a", "c", 2.5).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        let back: WeightedGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn bipartite_sides_disjoint() {
        let mut b = BipartiteGraph::new();
        b.add_left("x", "x", NodeAttrs::default()).unwrap();
        assert!(b.add_right("x", "x", NodeAttrs::default()).is_err());
        b.add_right("J", "J", NodeAttrs::default()).unwrap();
        b.add_edge("x", "J", 1.0).unwrap();
        b.add_edge("x", "J", 2.0).unwrap();
        assert_eq!(b.edge_count(), 1);
        assert_eq!(b.total_weight(), 3.0);
        let g = b.to_weighted_graph();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
    }

    #[test]
    fn partition_normalizes_from_one() {
        let p = Partition::new(vec![7, 0, 7, 3, 3, 9]).normalized();
        assert_eq!(p.assignment, vec![1, 0, 1, 2, 2, 3]);
        assert_eq!(p.sizes(), vec![1, 2, 2, 1]);
    }
}
