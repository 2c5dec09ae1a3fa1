//! Command-line driver: `build`, `analyze` and `simulate`.
//!
//! Exit codes: 0 on success, 2 for usage and validation errors, 3 when a
//! computation fails. Log verbosity follows the `PANELNET_LOG` variable
//! (`error`, `warn`, `info`, `debug`), defaulting to `warn`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use rayon::prelude::*;

use crate::builders::{
    build_affinity_bipartite, build_coauthorship, build_journal_bipartite,
    project_shared_neighbors, select_central_coauthors, AffinityScholar, CoauthorshipOptions,
};
use crate::config::{AuditConfig, PanelEntry, Parameters};
use crate::error::{Error, Result};
use crate::ingest::{
    filter_window, load_affiliations, load_pool, load_publications, load_roster, PanelRoster,
};
use crate::io_pajek::{write_bipartite_net, write_net};
use crate::metrics::{betweenness, connected_components, BetweennessOptions};
use crate::model::Side;
use crate::report::{
    analyze_panel, compare_panels, render, render_json, PanelAnalysis, ReportFormat,
};
use crate::stats::{
    evaluate_indicator, null_model_sample, DrawMode, Indicator, NetworkKind, NullModelConfig,
};

pub const LOG_ENV: &str = "PANELNET_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "panelnet",
    version,
    about = "Network indicators for evaluation panel audits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Coauthorship,
    Journal,
    Affinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Markdown,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one network for a roster and export it as JSON and Pajek.
    Build {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        roster: PathBuf,
        /// Publications (CSV or JSON lines); required for coauthorship and
        /// journal networks. For affinity networks, adds central co-authors.
        #[arg(long)]
        pubs: Option<PathBuf>,
        /// Affiliations CSV; required for affinity networks.
        #[arg(long)]
        affs: Option<PathBuf>,
        /// Publication window in years, overriding the roster.
        #[arg(long)]
        window: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Analyze every panel of a config file and compare them.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Output formats; all three by default.
        #[arg(long, value_enum, value_delimiter = ',')]
        format: Vec<Format>,
    },
    /// Distribution of an indicator over random panels drawn from a pool.
    Simulate {
        #[arg(long)]
        pool: PathBuf,
        #[arg(long)]
        pubs: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        size: u64,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "fragmentation_ratio")]
        indicator: String,
        /// `coauthorship` or `journal`; defaults per indicator.
        #[arg(long)]
        network: Option<String>,
        /// Enumerate every panel of the given size instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        /// Roster of the observed panel, whose value is located in the
        /// distribution.
        #[arg(long, conflicts_with = "observed")]
        observed_roster: Option<PathBuf>,
        /// Observed indicator value.
        #[arg(long)]
        observed: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build {
            kind,
            roster,
            pubs,
            affs,
            window,
            out,
        } => build(
            kind,
            &roster,
            pubs.as_deref(),
            affs.as_deref(),
            window,
            &out,
        ),
        Command::Analyze {
            config,
            out,
            format,
        } => analyze(&config, &out, &format),
        Command::Simulate {
            pool,
            pubs,
            size,
            samples,
            seed,
            indicator,
            network,
            exhaustive,
            observed_roster,
            observed,
            out,
        } => {
            let indicator: Indicator = indicator.parse()?;
            let network = network.map(|n| n.parse::<NetworkKind>()).transpose()?;
            let mut cfg = NullModelConfig::new(size as usize, samples as usize, seed, indicator);
            cfg.network = network;
            if exhaustive {
                cfg.draws = DrawMode::Exhaustive;
            }
            simulate(
                &pool,
                &pubs,
                &cfg,
                observed_roster.as_deref(),
                observed,
                &out,
            )
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn require<'a>(p: Option<&'a Path>, flag: &str, kind: &str) -> Result<&'a Path> {
    p.ok_or_else(|| Error::InvalidArgument(format!("--{flag} is required for --kind {kind}")))
}

fn load_roster_with_window(path: &Path, window: Option<u32>) -> Result<PanelRoster> {
    let mut roster = load_roster(path)?.into_value();
    if let Some(w) = window {
        roster.analysis_window_years = w;
        roster.validate()?;
    }
    Ok(roster)
}

fn build(
    kind: Kind,
    roster: &Path,
    pubs: Option<&Path>,
    affs: Option<&Path>,
    window: Option<u32>,
    out: &Path,
) -> Result<()> {
    let (pubs_path, affs_path) = match kind {
        Kind::Coauthorship => (Some(require(pubs, "pubs", "coauthorship")?), None),
        Kind::Journal => (Some(require(pubs, "pubs", "journal")?), None),
        Kind::Affinity => (pubs, Some(require(affs, "affs", "affinity")?)),
    };
    let roster = load_roster_with_window(roster, window)?;
    let pubs = match pubs_path {
        Some(p) => filter_window(&load_publications(p)?.into_value(), &roster),
        None => Vec::new(),
    };
    create_dir(out)?;
    let opts = CoauthorshipOptions::default();
    match kind {
        Kind::Coauthorship => {
            let g = build_coauthorship(&roster, &pubs, &opts)?.graph;
            write(&out.join("coauthorship.json"), &render_json(&g)?)?;
            write_net(&g, &out.join("coauthorship.net"))?;
            println!(
                "kind=coauthorship nodes={} edges={} components={}",
                g.node_count(),
                g.edge_count(),
                connected_components(&g).count()
            );
        }
        Kind::Journal => {
            let b = build_journal_bipartite(&roster, &pubs)?.graph;
            let proj = project_shared_neighbors(&b, Side::Left);
            write(&out.join("journal.json"), &render_json(&b)?)?;
            write_bipartite_net(&b, &out.join("journal.net"))?;
            write(&out.join("journal_projection.json"), &render_json(&proj)?)?;
            write_net(&proj, &out.join("journal_projection.net"))?;
            println!(
                "kind=journal panelists={} journals={} edges={} components={}",
                b.left().len(),
                b.right().len(),
                b.edge_count(),
                connected_components(&proj).count()
            );
        }
        Kind::Affinity => {
            let mut scholars: Vec<AffinityScholar> = roster
                .members
                .iter()
                .map(|m| AffinityScholar {
                    id: m.id.clone(),
                    label: m.label().to_string(),
                    is_panelist: true,
                })
                .collect();
            if !pubs.is_empty() {
                let g = build_coauthorship(&roster, &pubs, &opts)?.graph;
                let bw = betweenness(&g, BetweennessOptions::default());
                let threshold = Parameters::default().betweenness_threshold;
                for i in select_central_coauthors(&g, &bw, threshold) {
                    scholars.push(AffinityScholar {
                        id: g.node(i).id.clone(),
                        label: g.node(i).label.clone(),
                        is_panelist: false,
                    });
                }
            }
            let affs = load_affiliations(affs_path.expect("checked above"))?.into_value();
            let b = build_affinity_bipartite(&scholars, &affs, Some(&roster.panel_label))?.graph;
            write(&out.join("affinity.json"), &render_json(&b)?)?;
            write_bipartite_net(&b, &out.join("affinity.net"))?;
            let proj = project_shared_neighbors(&b, Side::Left);
            println!(
                "kind=affinity scholars={} institutions={} edges={} components={}",
                b.left().len(),
                b.right().len(),
                b.edge_count(),
                connected_components(&proj).count()
            );
        }
    }
    Ok(())
}

struct PanelData {
    entry: PanelEntry,
    roster: PanelRoster,
    pubs: Vec<crate::ingest::PublicationRecord>,
    affs: Option<Vec<crate::ingest::AffiliationRecord>>,
}

fn load_panel(entry: &PanelEntry) -> Result<PanelData> {
    let mut roster = load_roster(&entry.roster)?.into_value();
    if roster.panel_label != entry.label {
        info!(
            "roster `{}` is analyzed under the config label `{}`",
            roster.panel_label, entry.label
        );
        roster.panel_label = entry.label.clone();
    }
    let pubs = load_publications(&entry.publications)?.into_value();
    let affs = match &entry.affiliations {
        Some(p) => Some(load_affiliations(p)?.into_value()),
        None => None,
    };
    Ok(PanelData {
        entry: entry.clone(),
        roster,
        pubs,
        affs,
    })
}

fn null_model_runs(
    cfg: &AuditConfig,
    data: &PanelData,
    analysis: &mut PanelAnalysis,
) -> Result<()> {
    let (Some(section), Some(pool_path)) = (&cfg.null_model, &data.entry.pool) else {
        return Ok(());
    };
    let mut pool = load_pool(pool_path)?.into_value();
    pool.appointment_year = data.roster.appointment_year;
    pool.analysis_window_years = cfg
        .parameters
        .window_years
        .unwrap_or(data.roster.analysis_window_years);
    let mut roster = data.roster.clone();
    roster.analysis_window_years = pool.analysis_window_years;
    for &indicator in &section.indicators {
        let mut nm =
            NullModelConfig::new(roster.members.len(), section.samples, cfg.seed, indicator);
        nm.density_convention = cfg.parameters.density_convention;
        nm.coauthorship.max_authors = cfg.parameters.max_authors;
        let observed = evaluate_indicator(
            &roster,
            &data.pubs,
            indicator,
            nm.network(),
            nm.density_convention,
            &nm.coauthorship,
        )?;
        analysis
            .null_model
            .push(null_model_sample(&pool, &data.pubs, &nm, Some(observed))?);
    }
    Ok(())
}

fn analyze(config: &Path, out: &Path, formats: &[Format]) -> Result<()> {
    let cfg = AuditConfig::load(config)?;
    let panels: Vec<PanelData> = cfg
        .panels
        .iter()
        .map(|e| load_panel(e).map_err(|err| err.in_panel(&e.label)))
        .collect::<Result<_>>()?;
    let analyses: Vec<PanelAnalysis> = panels
        .par_iter()
        .map(|d| {
            let mut a = analyze_panel(&d.roster, &d.pubs, d.affs.as_deref(), &cfg.parameters)?;
            null_model_runs(&cfg, d, &mut a).map_err(|e| e.in_panel(&d.entry.label))?;
            Ok(a)
        })
        .collect::<Result<_>>()?;

    create_dir(out)?;
    let panels_dir = out.join("panels");
    create_dir(&panels_dir)?;
    for a in &analyses {
        let stem: String = a
            .panel_label
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        write(&panels_dir.join(format!("{stem}.json")), &render_json(a)?)?;
    }
    let report = compare_panels(
        analyses,
        &cfg.control,
        cfg.parameters.ks_p_value,
        cfg.parameters.adjustment,
    )?;
    let formats = if formats.is_empty() {
        vec![Format::Json, Format::Markdown, Format::Csv]
    } else {
        formats.to_vec()
    };
    for f in formats {
        match f {
            Format::Json => render(&report, ReportFormat::Json, out)?,
            Format::Markdown => render(&report, ReportFormat::Markdown, out)?,
            Format::Csv => render(&report, ReportFormat::CsvBundle, &out.join("csv"))?,
        };
    }
    for e in &report.ks {
        println!(
            "ks {} vs {}: D={:.3} p={:.3e} p_adj={:.3e}",
            e.a,
            e.b,
            e.result.d_statistic,
            e.result.p_raw,
            e.result.p_adjusted.unwrap_or(f64::NAN)
        );
    }
    for p in &report.panels {
        println!(
            "panel {}: components={} fragmentation={:.1}%",
            p.panel_label,
            p.coauthorship.summary.component_count,
            100.0
                * p.coauthorship
                    .summary
                    .fragmentation_ratio
                    .unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

fn simulate(
    pool: &Path,
    pubs: &Path,
    cfg: &NullModelConfig,
    observed_roster: Option<&Path>,
    observed: Option<f64>,
    out: &Path,
) -> Result<()> {
    let pool = load_pool(pool)?.into_value();
    let pubs = load_publications(pubs)?.into_value();
    let observed = match observed_roster {
        Some(path) => {
            let mut roster = load_roster(path)?.into_value();
            roster.appointment_year = pool.appointment_year;
            roster.analysis_window_years = pool.analysis_window_years;
            Some(evaluate_indicator(
                &roster,
                &pubs,
                cfg.indicator,
                cfg.network(),
                cfg.density_convention,
                &cfg.coauthorship,
            )?)
        }
        None => observed,
    };
    let run = null_model_sample(&pool, &pubs, cfg, observed)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write(out, &render_json(&run)?)?;
    println!(
        "indicator={} samples={} mean={:.6} observed={} percentile={}",
        run.indicator,
        run.samples,
        run.mean(),
        run.observed.map_or("n/a".into(), |v| format!("{v:.6}")),
        run.percentile.map_or("n/a".into(), |v| format!("{v:.2}")),
    );
    Ok(())
}
