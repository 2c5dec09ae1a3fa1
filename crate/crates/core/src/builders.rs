//! Construction of the three network families: co-authorship ego networks,
//! journal two-mode networks and affiliation ("affinity") two-mode networks,
//! plus the one-mode projections of any two-mode network.

use std::collections::HashSet;

use log::info;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ingest::{AffiliationRecord, PanelRoster, PublicationRecord};
use crate::model::{BipartiteGraph, NodeAttrs, ScholarId, Side, WeightedGraph};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoauthorshipOptions {
    /// Papers with more authors than this are skipped. `None` keeps all.
    #[serde(default)]
    pub max_authors: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoauthorshipBuild {
    pub graph: WeightedGraph,
    /// Papers with at least one panelist author that entered the network.
    pub papers: usize,
    /// Single-author papers (node only, no edges).
    pub solo_papers: usize,
    /// Papers dropped by the `max_authors` guard.
    pub skipped_large: usize,
}

/// Roster members with at least one record in `pubs`, in roster order.
pub fn analyzed_members<'a>(
    roster: &'a PanelRoster,
    pubs: &[PublicationRecord],
) -> Vec<&'a ScholarId> {
    let authors: HashSet<&str> = pubs
        .iter()
        .flat_map(|p| p.author_ids.iter().map(String::as_str))
        .collect();
    roster
        .members
        .iter()
        .filter(|m| authors.contains(m.id.as_str()))
        .collect()
}

fn panelist_attrs(roster: &PanelRoster) -> NodeAttrs {
    NodeAttrs::panelist(Some(&roster.panel_label))
}

/// Ego co-authorship network of the panel.
///
/// Nodes are the panelists with at least one publication plus every
/// co-author on their papers. Each paper with a panelist among its authors
/// adds one unit of weight to every pair of its authors, so ties between two
/// co-authors of the same panelist are included.
pub fn build_coauthorship(
    roster: &PanelRoster,
    pubs: &[PublicationRecord],
    opts: &CoauthorshipOptions,
) -> Result<CoauthorshipBuild> {
    let members = roster.member_ids();
    let mut g = WeightedGraph::new();
    for m in analyzed_members(roster, pubs) {
        g.add_node(&m.id, m.label(), panelist_attrs(roster))?;
    }
    let mut papers = 0;
    let mut solo_papers = 0;
    let mut skipped_large = 0;
    for p in pubs {
        if !p.author_ids.iter().any(|a| members.contains(a.as_str())) {
            continue;
        }
        if let Some(max) = opts.max_authors {
            if p.author_ids.len() > max {
                skipped_large += 1;
                continue;
            }
        }
        papers += 1;
        let idx: Vec<usize> = p
            .author_ids
            .iter()
            .map(|a| {
                let attrs = if members.contains(a.as_str()) {
                    panelist_attrs(roster)
                } else {
                    NodeAttrs::default()
                };
                g.ensure_node(a, a, attrs)
            })
            .collect::<Result<_>>()?;
        if idx.len() == 1 {
            solo_papers += 1;
        }
        for (k, &u) in idx.iter().enumerate() {
            for &v in &idx[k + 1..] {
                g.add_edge_idx(u, v, 1.0)?;
            }
        }
    }
    Ok(CoauthorshipBuild {
        graph: g,
        papers,
        solo_papers,
        skipped_large,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct JournalBuild {
    pub graph: BipartiteGraph,
    /// Panelist papers that carry no journal id.
    pub missing_journal: usize,
}

/// Panelist × journal network. Edge weight is the number of the panelist's
/// papers in that journal; analyzed panelists without journal papers stay as
/// isolated left nodes.
pub fn build_journal_bipartite(
    roster: &PanelRoster,
    pubs: &[PublicationRecord],
) -> Result<JournalBuild> {
    let mut b = BipartiteGraph::new();
    let analyzed = analyzed_members(roster, pubs);
    for m in &analyzed {
        b.add_left(&m.id, m.label(), panelist_attrs(roster))?;
    }
    let mut missing_journal = 0;
    for p in pubs {
        let panel_authors: Vec<usize> = p
            .author_ids
            .iter()
            .filter_map(|a| b.left_index_of(a))
            .collect();
        if panel_authors.is_empty() {
            continue;
        }
        let Some(journal) = &p.journal_id else {
            missing_journal += 1;
            continue;
        };
        let r = b.add_right(journal, journal, NodeAttrs::default())?;
        for l in panel_authors {
            b.add_edge_idx(l, r, 1.0)?;
        }
    }
    if missing_journal > 0 {
        info!(
            "panel `{}`: {missing_journal} papers without journal id skipped",
            roster.panel_label
        );
    }
    Ok(JournalBuild {
        graph: b,
        missing_journal,
    })
}

/// One-mode projection onto `side`. Two nodes are linked when they share at
/// least one neighbour on the other side; the weight counts the distinct
/// shared neighbours, ignoring two-mode edge multiplicities.
pub fn project_shared_neighbors(b: &BipartiteGraph, side: Side) -> WeightedGraph {
    let mut g = WeightedGraph::new();
    for n in b.nodes(side) {
        g.add_node(&n.id, &n.label, n.attrs.clone())
            .expect("bipartite side ids are unique");
    }
    let other = match side {
        Side::Left => Side::Right,
        Side::Right => Side::Left,
    };
    // neighbour lists of the other side, expressed as indices on `side`
    for members in b.adjacency(other) {
        for (k, &x) in members.iter().enumerate() {
            for &y in &members[k + 1..] {
                g.add_edge_idx(x, y, 1.0).expect("distinct nodes");
            }
        }
    }
    g
}

/// Non-panelist nodes whose normalized betweenness is strictly above
/// `threshold`. Returns node indices of `g` in ascending order.
pub fn select_central_coauthors(
    g: &WeightedGraph,
    betweenness: &[f64],
    threshold: f64,
) -> Vec<usize> {
    (0..g.node_count())
        .filter(|&i| !g.node(i).attrs.is_panelist && betweenness[i] > threshold)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffinityScholar {
    pub id: String,
    pub label: String,
    pub is_panelist: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffinityBuild {
    pub graph: BipartiteGraph,
    /// Records whose scholar is outside the scholar set.
    pub skipped: usize,
}

impl AffinityBuild {
    /// Average number of institutions per scholar (edges / scholars).
    pub fn institutions_per_scholar(&self) -> f64 {
        self.graph.edge_count() as f64 / self.graph.left().len() as f64
    }

    pub fn scholars_per_institution(&self) -> f64 {
        self.graph.left().len() as f64 / self.graph.right().len() as f64
    }
}

/// Scholar × institution network. All affiliation categories share one
/// institution mode; the category of the first record naming an institution
/// is kept as a node attribute.
pub fn build_affinity_bipartite(
    scholars: &[AffinityScholar],
    affs: &[AffiliationRecord],
    panel_label: Option<&str>,
) -> Result<AffinityBuild> {
    let mut b = BipartiteGraph::new();
    for s in scholars {
        let attrs = if s.is_panelist {
            NodeAttrs::panelist(panel_label)
        } else {
            NodeAttrs::default()
        };
        b.add_left(&s.id, &s.label, attrs)?;
    }
    let mut skipped = 0;
    let mut seen_pairs: HashSet<(usize, usize)> = HashSet::new();
    for rec in affs {
        let Some(l) = b.left_index_of(&rec.scholar_id) else {
            skipped += 1;
            continue;
        };
        let attrs = NodeAttrs {
            category: Some(rec.category.to_string()),
            ..NodeAttrs::default()
        };
        let r = b.add_right(&rec.institution_id, &rec.institution_id, attrs)?;
        // a scholar listing the same institution under two categories is one tie
        if seen_pairs.insert((l, r)) {
            b.add_edge_idx(l, r, 1.0)?;
        }
    }
    Ok(AffinityBuild { graph: b, skipped })
}
