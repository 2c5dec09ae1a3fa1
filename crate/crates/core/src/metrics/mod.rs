//! Structural indicators: degree distributions, density conventions,
//! average degree, components, fragmentation and centralities.

mod centrality;
mod components;

pub use centrality::{
    betweenness, eigenvector_centrality, eigenvector_centrality_bipartite, ranked_table,
    BetweennessOptions, EigenMatrix, EigenOptions, EigenResult, PathMode, RankedRow,
    EIGEN_MAX_ITERATIONS, EIGEN_TOLERANCE,
};
pub use components::{
    component_members, components_union_find, connected_components, ComponentRow, Components,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BipartiteGraph, WeightHistogram, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeRow {
    pub degree: usize,
    pub frequency: usize,
    pub frequency_pct: f64,
}

/// Frequency of each degree value, ascending by degree.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DegreeFrequencyTable {
    pub rows: Vec<DegreeRow>,
}

impl DegreeFrequencyTable {
    /// Builds a table from `(degree, frequency)` pairs. Repeated degrees are
    /// summed and zero frequencies dropped.
    pub fn from_counts(counts: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut map = BTreeMap::new();
        for (d, f) in counts {
            if f > 0 {
                *map.entry(d).or_insert(0) += f;
            }
        }
        let total: usize = map.values().sum();
        let rows = map
            .into_iter()
            .map(|(degree, frequency)| DegreeRow {
                degree,
                frequency,
                frequency_pct: 100.0 * frequency as f64 / total as f64,
            })
            .collect();
        DegreeFrequencyTable { rows }
    }

    pub fn from_sample(degrees: &[usize]) -> Self {
        Self::from_counts(degrees.iter().map(|&d| (d, 1)))
    }

    /// Number of observations (nodes).
    pub fn total(&self) -> usize {
        self.rows.iter().map(|r| r.frequency).sum()
    }

    /// Σ degree × frequency, i.e. twice the edge count of the source graph.
    pub fn degree_sum(&self) -> usize {
        self.rows.iter().map(|r| r.degree * r.frequency).sum()
    }

    /// The raw sample the table summarizes, ascending.
    pub fn expand(&self) -> Vec<usize> {
        self.rows
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.degree, r.frequency))
            .collect()
    }
}

/// Unweighted degree distribution of `g`.
pub fn degree_frequency(g: &WeightedGraph) -> DegreeFrequencyTable {
    DegreeFrequencyTable::from_counts((0..g.node_count()).map(|i| (g.degree(i), 1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityConvention {
    /// `2m / n²`: the denominator counts loops as possible ties.
    #[default]
    LoopsAllowed,
    /// `2m / (n(n−1))`.
    Simple,
}

pub fn density_from_counts(n: usize, m: usize, convention: DensityConvention) -> Result<f64> {
    if n == 0 {
        return Err(Error::Undefined("density of an empty graph".into()));
    }
    let (n, m) = (n as f64, m as f64);
    Ok(match convention {
        DensityConvention::LoopsAllowed => 2.0 * m / (n * n),
        DensityConvention::Simple => {
            if n < 2.0 {
                0.0
            } else {
                2.0 * m / (n * (n - 1.0))
            }
        }
    })
}

pub fn density(g: &WeightedGraph, convention: DensityConvention) -> Result<f64> {
    density_from_counts(g.node_count(), g.edge_count(), convention)
}

pub fn bipartite_density_from_counts(n_left: usize, n_right: usize, m: usize) -> Result<f64> {
    if n_left == 0 || n_right == 0 {
        return Err(Error::Undefined(
            "two-mode density with an empty mode".into(),
        ));
    }
    Ok(m as f64 / (n_left as f64 * n_right as f64))
}

/// Two-mode density `m / (n_left · n_right)`.
pub fn bipartite_density(b: &BipartiteGraph) -> Result<f64> {
    bipartite_density_from_counts(b.left().len(), b.right().len(), b.edge_count())
}

pub fn average_degree_from_counts(n: usize, m: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Undefined("average degree of an empty graph".into()));
    }
    Ok(2.0 * m as f64 / n as f64)
}

pub fn average_degree(g: &WeightedGraph) -> Result<f64> {
    average_degree_from_counts(g.node_count(), g.edge_count())
}

/// Realized components over the maximum possible number, one per
/// appointed member. Lies in `[1/n_official, 1]`.
pub fn fragmentation_ratio(component_count: usize, n_official: usize) -> Result<f64> {
    if n_official == 0 {
        return Err(Error::Undefined(
            "fragmentation with an empty roster".into(),
        ));
    }
    if component_count == 0 {
        return Err(Error::InvalidArgument(
            "component count must be at least 1".into(),
        ));
    }
    if component_count > n_official {
        return Err(Error::InvalidArgument(format!(
            "{component_count} components exceed the {n_official} panel members"
        )));
    }
    Ok(component_count as f64 / n_official as f64)
}

/// Density and average degree computed on one choice of node count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeBaseStats {
    pub nodes: usize,
    pub density: f64,
    pub average_degree: f64,
}

impl NodeBaseStats {
    fn new(nodes: usize, edges: usize, convention: DensityConvention) -> Option<Self> {
        Some(NodeBaseStats {
            nodes,
            density: density_from_counts(nodes, edges, convention).ok()?,
            average_degree: average_degree_from_counts(nodes, edges).ok()?,
        })
    }
}

/// Basic statistics of a one-mode network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub nodes: usize,
    pub panelists: usize,
    pub non_panelists: usize,
    pub edges: usize,
    pub total_weight: f64,
    pub min_edge_weight: Option<f64>,
    pub max_edge_weight: Option<f64>,
    pub weight_histogram: WeightHistogram,
    pub density_convention: DensityConvention,
    /// Density and average degree over all nodes.
    pub all_nodes: Option<NodeBaseStats>,
    /// The same over non-panelist nodes only.
    pub non_panelist_nodes: Option<NodeBaseStats>,
    pub component_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fragmentation_ratio: Option<f64>,
}

impl MetricsSummary {
    /// `n_official`, when given, is the denominator of the fragmentation
    /// ratio.
    pub fn compute(
        g: &WeightedGraph,
        convention: DensityConvention,
        n_official: Option<usize>,
    ) -> Result<Self> {
        let panelists = g.panelist_count();
        let non_panelists = g.node_count() - panelists;
        let component_count = connected_components(g).rows.len();
        let fragmentation_ratio = match n_official {
            Some(n) => Some(fragmentation_ratio(component_count, n)?),
            None => None,
        };
        Ok(MetricsSummary {
            nodes: g.node_count(),
            panelists,
            non_panelists,
            edges: g.edge_count(),
            total_weight: g.total_weight(),
            min_edge_weight: g.min_edge_weight(),
            max_edge_weight: g.max_edge_weight(),
            weight_histogram: g.edge_weight_histogram(),
            density_convention: convention,
            all_nodes: NodeBaseStats::new(g.node_count(), g.edge_count(), convention),
            non_panelist_nodes: NodeBaseStats::new(non_panelists, g.edge_count(), convention),
            component_count,
            fragmentation_ratio,
        })
    }

    pub fn density(&self) -> Option<f64> {
        self.all_nodes.map(|s| s.density)
    }

    pub fn average_degree(&self) -> Option<f64> {
        self.all_nodes.map(|s| s.average_degree)
    }
}

/// Basic statistics of a two-mode network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteSummary {
    pub left_nodes: usize,
    pub right_nodes: usize,
    pub edges: usize,
    pub total_weight: f64,
    /// Edges per left node.
    pub right_per_left: Option<f64>,
    /// Left nodes per right node.
    pub left_per_right: Option<f64>,
    pub density: Option<f64>,
}

impl BipartiteSummary {
    pub fn compute(b: &BipartiteGraph) -> Self {
        let (l, r, m) = (b.left().len(), b.right().len(), b.edge_count());
        BipartiteSummary {
            left_nodes: l,
            right_nodes: r,
            edges: m,
            total_weight: b.total_weight(),
            right_per_left: (l > 0).then(|| m as f64 / l as f64),
            left_per_right: (r > 0).then(|| l as f64 / r as f64),
            density: bipartite_density(b).ok(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NodeAttrs;

    pub(crate) fn graph(n: usize, edges: &[(usize, usize, f64)]) -> WeightedGraph {
        let mut g = WeightedGraph::new();
        for i in 0..n {
            g.add_node(&format!("n{i:02}"), "", NodeAttrs::default())
                .unwrap();
        }
        for &(u, v, w) in edges {
            g.add_edge_idx(u, v, w).unwrap();
        }
        g
    }

    fn rows(t: &DegreeFrequencyTable) -> Vec<(usize, usize)> {
        t.rows.iter().map(|r| (r.degree, r.frequency)).collect()
    }

    #[test]
    fn degree_tables() {
        let tri = graph(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]);
        assert_eq!(rows(&degree_frequency(&tri)), vec![(2, 3)]);
        let star = graph(5, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 3.0)]);
        let t = degree_frequency(&star);
        assert_eq!(rows(&t), vec![(1, 4), (4, 1)]);
        assert_eq!(t.total(), 5);
        assert_eq!(t.degree_sum(), 8);
        assert!((t.rows[0].frequency_pct - 80.0).abs() < 1e-12);
    }

    #[test]
    fn density_conventions() {
        let d = density_from_counts(21, 58, DensityConvention::LoopsAllowed).unwrap();
        assert!((d - 116.0 / 441.0).abs() < 1e-15);
        assert_eq!(format!("{d:.3}"), "0.263");
        let d = density_from_counts(58, 551, DensityConvention::LoopsAllowed).unwrap();
        assert!((d - 1102.0 / 3364.0).abs() < 1e-15);
        let k4 = graph(
            4,
            &[
                (0, 1, 1.0),
                (0, 2, 1.0),
                (0, 3, 1.0),
                (1, 2, 1.0),
                (1, 3, 1.0),
                (2, 3, 1.0),
            ],
        );
        assert_eq!(density(&k4, DensityConvention::Simple).unwrap(), 1.0);
        assert!(density(&WeightedGraph::new(), DensityConvention::Simple).is_err());
    }

    #[test]
    fn two_mode_density() {
        let d = bipartite_density_from_counts(58, 191, 426).unwrap();
        assert_eq!(format!("{d:.3}"), "0.038");
        let d = bipartite_density_from_counts(40, 147, 306).unwrap();
        assert_eq!(format!("{d:.3}"), "0.052");
        assert!(bipartite_density_from_counts(0, 3, 0).is_err());
        let mut b = BipartiteGraph::new();
        for l in ["a", "b"] {
            b.add_left(l, l, NodeAttrs::default()).unwrap();
        }
        for r in ["X", "Y", "Z"] {
            b.add_right(r, r, NodeAttrs::default()).unwrap();
        }
        for l in ["a", "b"] {
            for r in ["X", "Y", "Z"] {
                b.add_edge(l, r, 1.0).unwrap();
            }
        }
        assert_eq!(bipartite_density(&b).unwrap(), 1.0);
    }

    #[test]
    fn average_degrees() {
        assert_eq!(
            format!("{:.3}", average_degree_from_counts(17, 25).unwrap()),
            "2.941"
        );
        assert!((average_degree_from_counts(21, 58).unwrap() - 5.5238).abs() < 1e-4);
        let c5 = graph(
            5,
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (2, 3, 1.0),
                (3, 4, 1.0),
                (4, 0, 1.0),
            ],
        );
        assert_eq!(average_degree(&c5).unwrap(), 2.0);
        assert!(average_degree(&WeightedGraph::new()).is_err());
    }

    #[test]
    fn fragmentation() {
        assert_eq!(
            format!("{:.1}", 100.0 * fragmentation_ratio(12, 36).unwrap()),
            "33.3"
        );
        assert_eq!(fragmentation_ratio(25, 40).unwrap(), 0.625);
        assert_eq!(fragmentation_ratio(1, 8).unwrap(), 0.125);
        assert!(fragmentation_ratio(9, 8).is_err());
        assert!(fragmentation_ratio(0, 8).is_err());
    }

    #[test]
    fn summary_reports_both_node_bases() {
        let mut g = graph(4, &[(0, 1, 1.0), (0, 2, 2.0), (0, 3, 5.0)]);
        g.set_attrs(0, NodeAttrs::panelist(None));
        let s = MetricsSummary::compute(&g, DensityConvention::LoopsAllowed, Some(1)).unwrap();
        assert_eq!(
            (s.nodes, s.panelists, s.non_panelists, s.edges),
            (4, 1, 3, 3)
        );
        assert_eq!(s.all_nodes.unwrap().average_degree, 1.5);
        assert_eq!(s.non_panelist_nodes.unwrap().average_degree, 2.0);
        assert_eq!(s.component_count, 1);
        assert_eq!(s.fragmentation_ratio, Some(1.0));
        assert_eq!(s.max_edge_weight, Some(5.0));
    }
}
