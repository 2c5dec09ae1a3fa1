//! Per-panel indicator bundles, the comparison against the control panel,
//! and their JSON, markdown and CSV renderings.
//!
//! Rounding in markdown and CSV output: 2 decimals in percentage tables
//! (degree, component and cross-tabulation shares), 3 decimals for
//! densities, average degrees and centralities, 1 decimal for summary
//! percentages. JSON keeps full precision.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::builders::{
    analyzed_members, build_affinity_bipartite, build_coauthorship, build_journal_bipartite,
    project_shared_neighbors, select_central_coauthors, AffinityScholar, CoauthorshipOptions,
};
use crate::config::Parameters;
use crate::error::{Error, Result};
use crate::ingest::{filter_window, AffiliationRecord, PanelRoster, PublicationRecord};
use crate::io_pajek::vertex_order;
use crate::islands::{
    importance_island_crosstab, important_vertices, line_islands, off_island_share, CrosstabRow,
    IslandParams, IslandResult,
};
use crate::metrics::{
    average_degree, betweenness, connected_components, degree_frequency, density,
    eigenvector_centrality_bipartite, ranked_table, BetweennessOptions, BipartiteSummary,
    ComponentRow, DegreeFrequencyTable, EigenOptions, MetricsSummary, RankedRow,
};
use crate::model::{Side, WeightedGraph};
use crate::stats::{ks_two_sample, Adjustment, KsPValue, KsResult, NullModelRun};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub id: String,
    pub name: String,
    /// Has at least one publication in the window.
    pub analyzed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IslandRow {
    pub island: u32,
    pub size: usize,
    pub strength: f64,
    pub members: Vec<String>,
}

/// One row per node, in `.net` vertex order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeIslandRow {
    pub node: String,
    pub island_id: u32,
    pub is_important: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IslandSection {
    pub params: IslandParams,
    pub islands: Vec<IslandRow>,
    pub off_island: Vec<String>,
    pub nodes: Vec<NodeIslandRow>,
}

impl IslandSection {
    fn new(g: &WeightedGraph, res: &IslandResult, important: &HashSet<usize>) -> Self {
        let id = |i: &usize| g.node(*i).id.clone();
        IslandSection {
            params: res.params,
            islands: res
                .islands
                .iter()
                .enumerate()
                .map(|(j, isl)| IslandRow {
                    island: j as u32 + 1,
                    size: isl.members.len(),
                    strength: isl.strength,
                    members: isl.members.iter().map(id).collect(),
                })
                .collect(),
            off_island: res.off_island.iter().map(id).collect(),
            nodes: vertex_order(g)
                .into_iter()
                .map(|i| NodeIslandRow {
                    node: g.node(i).id.clone(),
                    island_id: res.partition.assignment[i],
                    is_important: important.contains(&i),
                })
                .collect(),
        }
    }
}

/// Density and average degree of the subgraph induced by one island.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IslandStats {
    pub nodes: usize,
    pub edges: usize,
    pub density: f64,
    pub average_degree: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoauthorshipSection {
    pub summary: MetricsSummary,
    pub papers: usize,
    pub solo_papers: usize,
    pub skipped_large_papers: usize,
    pub degree_table: DegreeFrequencyTable,
    pub components: Vec<ComponentRow>,
    /// Percentage of analyzed panelists in the largest component.
    pub largest_component_panelist_share: f64,
    pub betweenness: Vec<RankedRow>,
    /// Non-panelists above the betweenness threshold.
    pub central_coauthors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalSection {
    pub bipartite: BipartiteSummary,
    pub papers_without_journal: usize,
    pub projection: MetricsSummary,
    pub islands: IslandSection,
    pub off_island_share: f64,
    pub largest_island: Option<IslandStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSection {
    pub summary: MetricsSummary,
    pub islands: IslandSection,
    /// Eigenvector scores of this mode of the two-mode network.
    pub centrality: Vec<RankedRow>,
    pub important: Vec<String>,
    pub crosstab: Vec<CrosstabRow>,
    pub largest_island: Option<IslandStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinitySection {
    pub bipartite: BipartiteSummary,
    pub skipped_records: usize,
    pub eigenvalue: f64,
    pub scholars: ProjectionSection,
    pub institutions: ProjectionSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelAnalysis {
    pub panel_label: String,
    pub appointment_year: i32,
    pub window: (i32, i32),
    pub roster_size_official: usize,
    pub members: Vec<Member>,
    pub coauthorship: CoauthorshipSection,
    pub journal: JournalSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affinity: Option<AffinitySection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub null_model: Vec<NullModelRun>,
}

impl PanelAnalysis {
    /// Headline indicators compared against the control panel.
    pub fn indicators(&self) -> Vec<(&'static str, Option<f64>)> {
        let c = &self.coauthorship;
        let mut out = vec![
            (
                "coauthorship_fragmentation_ratio",
                c.summary.fragmentation_ratio,
            ),
            ("coauthorship_density", c.summary.density()),
            ("coauthorship_average_degree", c.summary.average_degree()),
            (
                "coauthorship_largest_component_panelist_share",
                Some(c.largest_component_panelist_share),
            ),
            (
                "journal_projection_density",
                self.journal.projection.density(),
            ),
            (
                "journal_off_island_share",
                Some(self.journal.off_island_share),
            ),
        ];
        let a = self.affinity.as_ref();
        out.push(("affinity_density", a.and_then(|a| a.bipartite.density)));
        out.push((
            "affinity_scholars_off_island_share",
            a.map(|a| {
                100.0 * a.scholars.islands.off_island.len() as f64
                    / a.scholars.summary.nodes.max(1) as f64
            }),
        ));
        out
    }

    fn member_name(&self, id: &str) -> Option<&str> {
        self.members
            .iter()
            .find(|m| m.id == id)
            .map(|m| m.name.as_str())
    }
}

fn island_stats(
    g: &WeightedGraph,
    res: &IslandResult,
    params: &Parameters,
) -> Result<Option<IslandStats>> {
    let Some(isl) = res.largest() else {
        return Ok(None);
    };
    let sub = g.induced_subgraph(&isl.members);
    Ok(Some(IslandStats {
        nodes: sub.node_count(),
        edges: sub.edge_count(),
        density: density(&sub, params.density_convention)?,
        average_degree: average_degree(&sub)?,
    }))
}

fn coauthorship_section(
    roster: &PanelRoster,
    pubs: &[PublicationRecord],
    params: &Parameters,
) -> Result<(CoauthorshipSection, WeightedGraph, Vec<f64>)> {
    let opts = CoauthorshipOptions {
        max_authors: params.max_authors,
    };
    let built = build_coauthorship(roster, pubs, &opts)?;
    let g = built.graph;
    let summary = MetricsSummary::compute(
        &g,
        params.density_convention,
        Some(roster.roster_size_official),
    )?;
    let comps = connected_components(&g);
    let panelists = g.panelist_count();
    let largest = comps.largest().map_or(0, |r| r.panelists);
    let bw = betweenness(
        &g,
        BetweennessOptions {
            normalized: true,
            paths: params.betweenness_paths,
        },
    );
    let central = select_central_coauthors(&g, &bw, params.betweenness_threshold);
    let section = CoauthorshipSection {
        summary,
        papers: built.papers,
        solo_papers: built.solo_papers,
        skipped_large_papers: built.skipped_large,
        degree_table: degree_frequency(&g),
        components: comps.rows,
        largest_component_panelist_share: 100.0 * largest as f64 / panelists.max(1) as f64,
        betweenness: ranked_table(&g, &bw),
        central_coauthors: central.iter().map(|&i| g.node(i).id.clone()).collect(),
    };
    Ok((section, g, bw))
}

fn journal_section(
    roster: &PanelRoster,
    pubs: &[PublicationRecord],
    params: &Parameters,
) -> Result<JournalSection> {
    let built = build_journal_bipartite(roster, pubs)?;
    let proj = project_shared_neighbors(&built.graph, Side::Left);
    let n = proj.node_count();
    let res = line_islands(&proj, params.journal_islands(n)?)?;
    let panelists: Vec<usize> = (0..n).collect();
    Ok(JournalSection {
        bipartite: BipartiteSummary::compute(&built.graph),
        papers_without_journal: built.missing_journal,
        projection: MetricsSummary::compute(&proj, params.density_convention, None)?,
        off_island_share: off_island_share(&res, &panelists)?,
        largest_island: island_stats(&proj, &res, params)?,
        islands: IslandSection::new(&proj, &res, &HashSet::new()),
    })
}

fn projection_section(
    proj: &WeightedGraph,
    scores: &[f64],
    params: &Parameters,
) -> Result<ProjectionSection> {
    let res = line_islands(proj, params.affinity_islands()?)?;
    let (sel, important) = if proj.node_count() == 0 {
        (None, HashSet::new())
    } else {
        let sel = important_vertices(proj.nodes(), scores, params.importance_k)?;
        let set: HashSet<usize> = sel.selected().collect();
        (Some(sel), set)
    };
    Ok(ProjectionSection {
        summary: MetricsSummary::compute(proj, params.density_convention, None)?,
        centrality: ranked_table(proj, scores),
        important: sel
            .as_ref()
            .map(|s| s.selected().map(|i| proj.node(i).id.clone()).collect())
            .unwrap_or_default(),
        crosstab: sel
            .as_ref()
            .map(|s| importance_island_crosstab(&res, s))
            .unwrap_or_default(),
        largest_island: island_stats(proj, &res, params)?,
        islands: IslandSection::new(proj, &res, &important),
    })
}

fn affinity_section(
    roster: &PanelRoster,
    coauthors: &WeightedGraph,
    central: &[String],
    affs: &[AffiliationRecord],
    params: &Parameters,
) -> Result<AffinitySection> {
    let mut scholars: Vec<AffinityScholar> = roster
        .members
        .iter()
        .map(|m| AffinityScholar {
            id: m.id.clone(),
            label: m.label().to_string(),
            is_panelist: true,
        })
        .collect();
    for id in central {
        let i = coauthors.index_of(id).expect("central co-author is a node");
        scholars.push(AffinityScholar {
            id: id.clone(),
            label: coauthors.node(i).label.clone(),
            is_panelist: false,
        });
    }
    let built = build_affinity_bipartite(&scholars, affs, Some(&roster.panel_label))?;
    let b = &built.graph;
    let opts = EigenOptions {
        matrix: params.eigen_matrix,
        ..EigenOptions::default()
    };
    let (left, right, eig) = eigenvector_centrality_bipartite(b, &opts)?;
    let scholar_proj = project_shared_neighbors(b, Side::Left);
    let inst_proj = project_shared_neighbors(b, Side::Right);
    Ok(AffinitySection {
        bipartite: BipartiteSummary::compute(b),
        skipped_records: built.skipped,
        eigenvalue: eig.eigenvalue,
        scholars: projection_section(&scholar_proj, &left, params)?,
        institutions: projection_section(&inst_proj, &right, params)?,
    })
}

/// Full indicator bundle for one panel. Publications outside the roster's
/// window are ignored.
pub fn analyze_panel(
    roster: &PanelRoster,
    pubs: &[PublicationRecord],
    affs: Option<&[AffiliationRecord]>,
    params: &Parameters,
) -> Result<PanelAnalysis> {
    analyze_inner(roster, pubs, affs, params).map_err(|e| e.in_panel(&roster.panel_label))
}

fn analyze_inner(
    roster: &PanelRoster,
    pubs: &[PublicationRecord],
    affs: Option<&[AffiliationRecord]>,
    params: &Parameters,
) -> Result<PanelAnalysis> {
    roster.validate()?;
    params.validate()?;
    let mut roster = roster.clone();
    if let Some(w) = params.window_years {
        roster.analysis_window_years = w;
    }
    let pubs = filter_window(pubs, &roster);
    let analyzed: HashSet<&str> = analyzed_members(&roster, &pubs)
        .into_iter()
        .map(|m| m.id.as_str())
        .collect();
    if analyzed.is_empty() {
        return Err(Error::Validation("no analyzable members".into()));
    }
    let (coauthorship, g, _) = coauthorship_section(&roster, &pubs, params)?;
    let journal = journal_section(&roster, &pubs, params)?;
    let affinity = match affs {
        Some(a) => Some(affinity_section(
            &roster,
            &g,
            &coauthorship.central_coauthors,
            a,
            params,
        )?),
        None => None,
    };
    Ok(PanelAnalysis {
        panel_label: roster.panel_label.clone(),
        appointment_year: roster.appointment_year,
        window: roster.window(),
        roster_size_official: roster.roster_size_official,
        members: roster
            .members
            .iter()
            .map(|m| Member {
                id: m.id.clone(),
                name: m.label().to_string(),
                analyzed: analyzed.contains(m.id.as_str()),
            })
            .collect(),
        coauthorship,
        journal,
        affinity,
        null_model: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsEntry {
    pub a: String,
    pub b: String,
    #[serde(flatten)]
    pub result: KsResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub panel: String,
    pub indicator: String,
    pub value: Option<f64>,
    pub control_value: Option<f64>,
    /// `value − control_value`.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapRow {
    pub a: String,
    pub b: String,
    pub shared: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema_version: u32,
    pub control: String,
    pub ks_method: KsPValue,
    pub adjustment: Adjustment,
    /// Co-authorship degree distributions, every unordered pair of panels
    /// in panel order.
    pub ks: Vec<KsEntry>,
    pub deltas: Vec<DeltaRow>,
    pub shared_panelists: Vec<OverlapRow>,
    pub shared_important_scholars: Vec<OverlapRow>,
    pub panels: Vec<PanelAnalysis>,
}

impl ComparisonReport {
    pub fn panel(&self, label: &str) -> Option<&PanelAnalysis> {
        self.panels.iter().find(|p| p.panel_label == label)
    }

    /// Symmetric matrix of D statistics in panel order.
    pub fn d_matrix(&self) -> Vec<Vec<f64>> {
        let pos: HashMap<&str, usize> = self
            .panels
            .iter()
            .enumerate()
            .map(|(i, p)| (p.panel_label.as_str(), i))
            .collect();
        let n = self.panels.len();
        let mut m = vec![vec![0.0; n]; n];
        for e in &self.ks {
            let (i, j) = (pos[e.a.as_str()], pos[e.b.as_str()]);
            m[i][j] = e.result.d_statistic;
            m[j][i] = e.result.d_statistic;
        }
        m
    }
}

fn overlap(a: &[String], b: &[String]) -> Vec<String> {
    let b: HashSet<&String> = b.iter().collect();
    let shared: BTreeSet<String> = a.iter().filter(|x| b.contains(x)).cloned().collect();
    shared.into_iter().collect()
}

/// Comparison of every panel against the control panel.
pub fn compare_panels(
    analyses: Vec<PanelAnalysis>,
    control: &str,
    ks_method: KsPValue,
    adjustment: Adjustment,
) -> Result<ComparisonReport> {
    let mut seen = HashSet::new();
    for a in &analyses {
        if !seen.insert(a.panel_label.as_str()) {
            return Err(Error::Validation(format!(
                "duplicate panel label `{}`",
                a.panel_label
            )));
        }
    }
    let ctrl = analyses
        .iter()
        .find(|a| a.panel_label == control)
        .ok_or_else(|| Error::Validation(format!("control panel `{control}` not found")))?;

    let mut ks = Vec::new();
    for (i, a) in analyses.iter().enumerate() {
        for b in &analyses[i + 1..] {
            let result = ks_two_sample(
                &a.coauthorship.degree_table,
                &b.coauthorship.degree_table,
                ks_method,
            )?;
            ks.push(KsEntry {
                a: a.panel_label.clone(),
                b: b.panel_label.clone(),
                result,
            });
        }
    }
    let raw: Vec<f64> = ks.iter().map(|e| e.result.p_raw).collect();
    for (e, p) in ks.iter_mut().zip(adjustment.apply(&raw)?) {
        e.result.p_adjusted = Some(p);
    }

    let control_values = ctrl.indicators();
    let mut deltas = Vec::new();
    for a in &analyses {
        for ((name, v), (_, c)) in a.indicators().into_iter().zip(&control_values) {
            deltas.push(DeltaRow {
                panel: a.panel_label.clone(),
                indicator: name.to_string(),
                value: v,
                control_value: *c,
                delta: v.zip(*c).map(|(v, c)| v - c),
            });
        }
    }

    let mut shared_panelists = Vec::new();
    let mut shared_important = Vec::new();
    for (i, a) in analyses.iter().enumerate() {
        for b in &analyses[i + 1..] {
            let ids =
                |p: &PanelAnalysis| p.members.iter().map(|m| m.id.clone()).collect::<Vec<_>>();
            shared_panelists.push(OverlapRow {
                a: a.panel_label.clone(),
                b: b.panel_label.clone(),
                shared: overlap(&ids(a), &ids(b)),
            });
            if let (Some(x), Some(y)) = (&a.affinity, &b.affinity) {
                shared_important.push(OverlapRow {
                    a: a.panel_label.clone(),
                    b: b.panel_label.clone(),
                    shared: overlap(&x.scholars.important, &y.scholars.important),
                });
            }
        }
    }

    Ok(ComparisonReport {
        schema_version: SCHEMA_VERSION,
        control: control.to_string(),
        ks_method,
        adjustment,
        ks,
        deltas,
        shared_panelists,
        shared_important_scholars: shared_important,
        panels: analyses,
    })
}

// ---------------------------------------------------------------------------
// Rendering

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Markdown,
    CsvBundle,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" | "csv-bundle" => Ok(ReportFormat::CsvBundle),
            _ => Err(Error::InvalidArgument(format!(
                "unknown report format `{s}`"
            ))),
        }
    }
}

/// Percentages in frequency tables.
pub fn fmt_table_pct(x: f64) -> String {
    format!("{x:.2}")
}

/// Densities, average degrees and centralities.
pub fn fmt_measure(x: f64) -> String {
    format!("{x:.3}")
}

/// Headline percentages.
pub fn fmt_summary_pct(x: f64) -> String {
    format!("{x:.1}")
}

fn opt(x: Option<f64>, f: fn(f64) -> String) -> String {
    x.map(f).unwrap_or_else(|| "n/a".into())
}

fn fmt_p(x: f64) -> String {
    format!("{x:.3e}")
}

pub fn render_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn md_table(out: &mut String, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) {
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
    for r in rows {
        let _ = writeln!(out, "| {} |", r.join(" | "));
    }
    out.push('\n');
}

fn md_summary(out: &mut String, s: &MetricsSummary) {
    let mut rows = vec![
        vec!["Nodes".into(), s.nodes.to_string()],
        vec!["Panelists".into(), s.panelists.to_string()],
        vec!["Edges".into(), s.edges.to_string()],
        vec!["Total edge weight".into(), s.total_weight.to_string()],
        vec![
            "Edges of weight 1".into(),
            s.weight_histogram.weight_1.to_string(),
        ],
        vec![
            "Edges of weight 2".into(),
            s.weight_histogram.weight_2.to_string(),
        ],
        vec![
            "Edges of weight > 2".into(),
            s.weight_histogram.weight_gt_2.to_string(),
        ],
        vec![
            "Density (all nodes)".into(),
            opt(s.all_nodes.map(|b| b.density), fmt_measure),
        ],
        vec![
            "Density (non-panelist nodes)".into(),
            opt(s.non_panelist_nodes.map(|b| b.density), fmt_measure),
        ],
        vec![
            "Average degree".into(),
            opt(s.all_nodes.map(|b| b.average_degree), fmt_measure),
        ],
        vec!["Components".into(), s.component_count.to_string()],
    ];
    if let Some(f) = s.fragmentation_ratio {
        rows.push(vec![
            "Realized components over maximum (%)".into(),
            fmt_summary_pct(100.0 * f),
        ]);
    }
    md_table(out, &["Indicator", "Value"], rows);
}

fn md_bipartite(out: &mut String, b: &BipartiteSummary, left: &str, right: &str) {
    md_table(
        out,
        &["Indicator", "Value"],
        [
            vec![left.to_string(), b.left_nodes.to_string()],
            vec![right.to_string(), b.right_nodes.to_string()],
            vec!["Edges".into(), b.edges.to_string()],
            vec![
                format!("{right} per {}", left.to_lowercase()),
                opt(b.right_per_left, fmt_measure),
            ],
            vec!["Density".into(), opt(b.density, fmt_measure)],
        ],
    );
}

fn md_islands(out: &mut String, s: &IslandSection, name: impl Fn(&str) -> String) {
    let _ = writeln!(
        out,
        "Island size bounds [{}, {}]; {} islands, {} off-island nodes.\n",
        s.params.min_size,
        s.params.max_size,
        s.islands.len(),
        s.off_island.len()
    );
    md_table(
        out,
        &["Island", "Size", "Strength", "Members"],
        s.islands.iter().map(|r| {
            vec![
                r.island.to_string(),
                r.size.to_string(),
                r.strength.to_string(),
                r.members
                    .iter()
                    .map(|m| name(m))
                    .collect::<Vec<_>>()
                    .join(", "),
            ]
        }),
    );
}

fn md_island_stats(out: &mut String, s: &Option<IslandStats>) {
    if let Some(s) = s {
        md_table(
            out,
            &["Largest island", "Value"],
            [
                vec!["Nodes".into(), s.nodes.to_string()],
                vec!["Edges".into(), s.edges.to_string()],
                vec!["Density".into(), fmt_measure(s.density)],
                vec!["Average degree".into(), fmt_measure(s.average_degree)],
            ],
        );
    }
}

fn md_ranked(out: &mut String, rows: &[RankedRow], limit: usize) {
    md_table(
        out,
        &["Rank", "Name", "Value", "Panelist"],
        rows.iter().take(limit).map(|r| {
            vec![
                r.rank.to_string(),
                r.name.clone(),
                fmt_measure(r.value),
                if r.is_panelist { "yes" } else { "no" }.into(),
            ]
        }),
    );
}

fn md_projection(out: &mut String, title: &str, p: &ProjectionSection) {
    let _ = writeln!(out, "#### {title}\n");
    md_summary(out, &p.summary);
    md_island_stats(out, &p.largest_island);
    md_islands(out, &p.islands, |m| m.to_string());
    let _ = writeln!(out, "Important vertices (eigenvector centrality):\n");
    md_ranked(out, &p.centrality, p.important.len());
    md_table(
        out,
        &["Island", "Nodes", "Important", "Important %"],
        p.crosstab.iter().map(|r| {
            vec![
                if r.island == 0 {
                    "off-island".into()
                } else {
                    r.island.to_string()
                },
                r.nodes.to_string(),
                r.important.to_string(),
                fmt_table_pct(r.important_pct),
            ]
        }),
    );
}

const MD_TOP_BETWEENNESS: usize = 20;

fn md_panel(out: &mut String, p: &PanelAnalysis) {
    let analyzed = p.members.iter().filter(|m| m.analyzed).count();
    let _ = writeln!(out, "## Panel {}\n", p.panel_label);
    let _ = writeln!(
        out,
        "Appointed {}, publications {}-{}, official size {}, {} members with publications.\n",
        p.appointment_year, p.window.0, p.window.1, p.roster_size_official, analyzed
    );

    let c = &p.coauthorship;
    let _ = writeln!(out, "### Co-authorship network\n");
    md_summary(out, &c.summary);
    let _ = writeln!(
        out,
        "Panelists in the largest component: {}%.\n",
        fmt_summary_pct(c.largest_component_panelist_share)
    );
    md_table(
        out,
        &["Degree", "Freq", "Freq%"],
        c.degree_table.rows.iter().map(|r| {
            vec![
                r.degree.to_string(),
                r.frequency.to_string(),
                fmt_table_pct(r.frequency_pct),
            ]
        }),
    );
    md_table(
        out,
        &["Cluster", "Freq", "Freq%", "Members", "Members%"],
        c.components.iter().map(|r| {
            vec![
                r.cluster.to_string(),
                r.size.to_string(),
                fmt_table_pct(r.size_pct),
                r.panelists.to_string(),
                fmt_table_pct(r.panelists_pct),
            ]
        }),
    );
    let _ = writeln!(out, "Betweenness centrality (top {MD_TOP_BETWEENNESS}):\n");
    md_ranked(out, &c.betweenness, MD_TOP_BETWEENNESS);

    let j = &p.journal;
    let _ = writeln!(out, "### Journal network\n");
    md_bipartite(out, &j.bipartite, "Panelists", "Journals");
    md_summary(out, &j.projection);
    let _ = writeln!(
        out,
        "Off-island panelists: {}%.\n",
        fmt_summary_pct(j.off_island_share)
    );
    md_island_stats(out, &j.largest_island);
    md_islands(out, &j.islands, |m| {
        p.member_name(m).unwrap_or(m).to_string()
    });

    if let Some(a) = &p.affinity {
        let _ = writeln!(out, "### Affinity network\n");
        md_bipartite(out, &a.bipartite, "Scholars", "Institutions");
        md_projection(out, "Scholars", &a.scholars);
        md_projection(out, "Institutions", &a.institutions);
    }

    for run in &p.null_model {
        let _ = writeln!(
            out,
            "Null model `{}` on the {:?} network: {} panels, observed {}, percentile {}.\n",
            run.indicator,
            run.network,
            run.samples,
            opt(run.observed, fmt_measure),
            opt(run.percentile, fmt_summary_pct),
        );
    }
}

pub fn render_markdown(r: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Panel composition audit\n");
    let _ = writeln!(
        out,
        "Control panel: {}. Report schema version {}.\n",
        r.control, r.schema_version
    );
    let _ = writeln!(out, "## Comparison\n");
    let _ = writeln!(
        out,
        "Two-sample Kolmogorov-Smirnov tests on co-authorship degree distributions ({:?} p-values, {:?} adjustment).\n",
        r.ks_method, r.adjustment
    );
    md_table(
        &mut out,
        &["Panel A", "Panel B", "D", "p", "p adjusted"],
        r.ks.iter().map(|e| {
            vec![
                e.a.clone(),
                e.b.clone(),
                fmt_measure(e.result.d_statistic),
                fmt_p(e.result.p_raw),
                opt(e.result.p_adjusted, fmt_p),
            ]
        }),
    );
    md_table(
        &mut out,
        &["Panel", "Indicator", "Value", "Control", "Delta"],
        r.deltas.iter().map(|d| {
            vec![
                d.panel.clone(),
                d.indicator.clone(),
                opt(d.value, fmt_measure),
                opt(d.control_value, fmt_measure),
                opt(d.delta, fmt_measure),
            ]
        }),
    );
    let name = |label: &str, id: &str| -> String {
        r.panel(label)
            .and_then(|p| p.member_name(id))
            .unwrap_or(id)
            .to_string()
    };
    md_table(
        &mut out,
        &["Panel A", "Panel B", "Shared panelists"],
        r.shared_panelists.iter().map(|o| {
            vec![
                o.a.clone(),
                o.b.clone(),
                o.shared
                    .iter()
                    .map(|id| name(&o.a, id))
                    .collect::<Vec<_>>()
                    .join(", "),
            ]
        }),
    );
    if !r.shared_important_scholars.is_empty() {
        md_table(
            &mut out,
            &["Panel A", "Panel B", "Shared important scholars"],
            r.shared_important_scholars
                .iter()
                .map(|o| vec![o.a.clone(), o.b.clone(), o.shared.join(", ")]),
        );
    }
    for p in &r.panels {
        md_panel(&mut out, p);
    }
    out
}

fn csv_string<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::Validation(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Validation(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[derive(Serialize)]
struct DegreeCsv {
    degree: usize,
    frequency: usize,
    frequency_pct: String,
}

#[derive(Serialize)]
struct ComponentCsv {
    cluster: u32,
    size: usize,
    size_pct: String,
    panelists: usize,
    panelists_pct: String,
}

#[derive(Serialize)]
struct CentralityCsv<'a> {
    name: &'a str,
    value: String,
    rank: usize,
    is_panelist: bool,
}

#[derive(Serialize)]
struct KsCsv<'a> {
    a: &'a str,
    b: &'a str,
    d: String,
    p_raw: String,
    p_adjusted: String,
}

#[derive(Serialize)]
struct DeltaCsv<'a> {
    panel: &'a str,
    indicator: &'a str,
    value: String,
    control_value: String,
    delta: String,
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn centrality_csv(rows: &[RankedRow]) -> Result<String> {
    csv_string(rows.iter().map(|r| CentralityCsv {
        name: &r.name,
        value: fmt_measure(r.value),
        rank: r.rank,
        is_panelist: r.is_panelist,
    }))
}

/// The CSV bundle as `(file name, contents)` pairs.
pub fn csv_bundle(r: &ComparisonReport) -> Result<Vec<(String, String)>> {
    let mut files = Vec::new();
    files.push((
        "ks.csv".to_string(),
        csv_string(r.ks.iter().map(|e| KsCsv {
            a: &e.a,
            b: &e.b,
            d: fmt_measure(e.result.d_statistic),
            p_raw: fmt_p(e.result.p_raw),
            p_adjusted: opt(e.result.p_adjusted, fmt_p),
        }))?,
    ));
    files.push((
        "deltas.csv".to_string(),
        csv_string(r.deltas.iter().map(|d| DeltaCsv {
            panel: &d.panel,
            indicator: &d.indicator,
            value: opt(d.value, fmt_measure),
            control_value: opt(d.control_value, fmt_measure),
            delta: opt(d.delta, fmt_measure),
        }))?,
    ));
    for p in &r.panels {
        let stem = file_stem(&p.panel_label);
        let c = &p.coauthorship;
        files.push((
            format!("{stem}_degree.csv"),
            csv_string(c.degree_table.rows.iter().map(|d| DegreeCsv {
                degree: d.degree,
                frequency: d.frequency,
                frequency_pct: fmt_table_pct(d.frequency_pct),
            }))?,
        ));
        files.push((
            format!("{stem}_components.csv"),
            csv_string(c.components.iter().map(|x| ComponentCsv {
                cluster: x.cluster,
                size: x.size,
                size_pct: fmt_table_pct(x.size_pct),
                panelists: x.panelists,
                panelists_pct: fmt_table_pct(x.panelists_pct),
            }))?,
        ));
        files.push((
            format!("{stem}_betweenness.csv"),
            centrality_csv(&c.betweenness)?,
        ));
        files.push((
            format!("{stem}_journal_islands.csv"),
            csv_string(&p.journal.islands.nodes)?,
        ));
        if let Some(a) = &p.affinity {
            for (mode, s) in [("scholars", &a.scholars), ("institutions", &a.institutions)] {
                files.push((
                    format!("{stem}_affinity_{mode}_eigenvector.csv"),
                    centrality_csv(&s.centrality)?,
                ));
                files.push((
                    format!("{stem}_affinity_{mode}_islands.csv"),
                    csv_string(&s.islands.nodes)?,
                ));
            }
        }
    }
    Ok(files)
}

/// Writes the report in `format` under `dir`; returns the written paths.
pub fn render(r: &ComparisonReport, format: ReportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = match format {
        ReportFormat::Json => vec![("report.json".to_string(), render_json(r)?)],
        ReportFormat::Markdown => vec![("report.md".to_string(), render_markdown(r))],
        ReportFormat::CsvBundle => csv_bundle(r)?,
    };
    let mut written = Vec::with_capacity(files.len());
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
