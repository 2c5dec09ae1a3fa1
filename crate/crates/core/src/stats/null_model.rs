use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builders::{
    build_coauthorship, build_journal_bipartite, project_shared_neighbors, CoauthorshipOptions,
};
use crate::error::{Error, Result};
use crate::ingest::{filter_window, CandidatePool, PanelRoster, PublicationRecord};
use crate::islands::{line_islands, off_island_share, IslandParams};
use crate::metrics::{
    average_degree, connected_components, density, fragmentation_ratio, DensityConvention,
};
use crate::model::{Side, WeightedGraph};

/// Largest number of panels an exhaustive run will enumerate.
pub const EXHAUSTIVE_LIMIT: u64 = 5_000_000;

const HISTOGRAM_BUCKETS: usize = 10;
const BATCH: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    FragmentationRatio,
    OffIslandShare,
    LargestComponentPanelistShare,
    Density,
    AverageDegree,
}

impl Indicator {
    pub const ALL: [Indicator; 5] = [
        Indicator::FragmentationRatio,
        Indicator::OffIslandShare,
        Indicator::LargestComponentPanelistShare,
        Indicator::Density,
        Indicator::AverageDegree,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Indicator::FragmentationRatio => "fragmentation_ratio",
            Indicator::OffIslandShare => "off_island_share",
            Indicator::LargestComponentPanelistShare => "largest_component_panelist_share",
            Indicator::Density => "density",
            Indicator::AverageDegree => "average_degree",
        }
    }

    /// Off-island share is a journal-network indicator; the others default
    /// to the co-authorship network.
    pub fn default_network(self) -> NetworkKind {
        match self {
            Indicator::OffIslandShare => NetworkKind::Journal,
            _ => NetworkKind::Coauthorship,
        }
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Indicator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Indicator::ALL
            .into_iter()
            .find(|i| i.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Indicator::ALL.iter().map(|i| i.as_str()).collect();
                Error::InvalidArgument(format!(
                    "unknown indicator `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Network an indicator is computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkKind {
    /// Ego co-authorship network.
    Coauthorship,
    /// Panelist projection of the panelist × journal network.
    Journal,
}

impl FromStr for NetworkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coauthorship" => Ok(NetworkKind::Coauthorship),
            "journal" => Ok(NetworkKind::Journal),
            _ => Err(Error::InvalidArgument(format!(
                "unknown network `{s}` (expected coauthorship or journal)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrawMode {
    /// `samples` independent uniform panels.
    Random { samples: usize },
    /// Every panel of the requested size, in lexicographic order of pool
    /// indices.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullModelConfig {
    pub panel_size: usize,
    pub draws: DrawMode,
    pub seed: u64,
    pub indicator: Indicator,
    /// Defaults to [`Indicator::default_network`].
    pub network: Option<NetworkKind>,
    pub density_convention: DensityConvention,
    pub coauthorship: CoauthorshipOptions,
}

impl NullModelConfig {
    pub fn new(panel_size: usize, samples: usize, seed: u64, indicator: Indicator) -> Self {
        NullModelConfig {
            panel_size,
            draws: DrawMode::Random { samples },
            seed,
            indicator,
            network: None,
            density_convention: DensityConvention::default(),
            coauthorship: CoauthorshipOptions::default(),
        }
    }

    pub fn network(&self) -> NetworkKind {
        self.network.unwrap_or(self.indicator.default_network())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBucket {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullModelRun {
    pub seed: u64,
    pub samples: usize,
    pub exhaustive: bool,
    pub indicator: Indicator,
    pub network: NetworkKind,
    pub pool_size: usize,
    pub panel_size: usize,
    pub observed: Option<f64>,
    /// Share of sampled values `≤ observed`, in percent.
    pub percentile: Option<f64>,
    pub histogram: Vec<HistogramBucket>,
    pub values: Vec<f64>,
}

impl NullModelRun {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        let var =
            self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / self.values.len() as f64;
        var.sqrt()
    }
}

/// Uniform integer in `0..bound` by rejection sampling on 64-bit outputs.
pub fn uniform_below(rng: &mut impl RngCore, bound: u64) -> u64 {
    assert!(bound > 0);
    let limit = u64::MAX - u64::MAX % bound;
    loop {
        let x = rng.next_u64();
        if x < limit {
            return x % bound;
        }
    }
}

/// Pool indices of draw `index`: ChaCha8 seeded with `seed` on stream
/// `index`, then a partial Fisher–Yates shuffle of `0..pool_size` for the
/// first `k` positions. Returned sorted.
fn draw(seed: u64, index: u64, pool_size: usize, k: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut idx: Vec<usize> = (0..pool_size).collect();
    for j in 0..k {
        let r = j + uniform_below(&mut rng, (pool_size - j) as u64) as usize;
        idx.swap(j, r);
    }
    let mut picks = idx[..k].to_vec();
    picks.sort_unstable();
    picks
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > u64::MAX as u128 {
            return c;
        }
    }
    c
}

/// Advances `c` to the next k-combination of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Value of `indicator` for one roster.
pub fn evaluate_indicator(
    roster: &PanelRoster,
    pubs: &[PublicationRecord],
    indicator: Indicator,
    network: NetworkKind,
    convention: DensityConvention,
    opts: &CoauthorshipOptions,
) -> Result<f64> {
    let windowed = filter_window(pubs, roster);
    evaluate_windowed(roster, &windowed, indicator, network, convention, opts)
}

fn evaluate_windowed(
    roster: &PanelRoster,
    pubs: &[PublicationRecord],
    indicator: Indicator,
    network: NetworkKind,
    convention: DensityConvention,
    opts: &CoauthorshipOptions,
) -> Result<f64> {
    let g = match network {
        NetworkKind::Coauthorship => build_coauthorship(roster, pubs, opts)?.graph,
        NetworkKind::Journal => {
            project_shared_neighbors(&build_journal_bipartite(roster, pubs)?.graph, Side::Left)
        }
    };
    if g.panelist_count() == 0 {
        return Err(Error::Undefined("no analyzable members".into()));
    }
    indicator_on_graph(&g, indicator, roster.roster_size_official, convention)
}

fn indicator_on_graph(
    g: &WeightedGraph,
    indicator: Indicator,
    n_official: usize,
    convention: DensityConvention,
) -> Result<f64> {
    let panelists: Vec<usize> = (0..g.node_count())
        .filter(|&i| g.node(i).attrs.is_panelist)
        .collect();
    match indicator {
        Indicator::FragmentationRatio => {
            fragmentation_ratio(connected_components(g).count(), n_official)
        }
        Indicator::LargestComponentPanelistShare => {
            let c = connected_components(g);
            let largest = c.largest().expect("graph has nodes");
            Ok(100.0 * largest.panelists as f64 / panelists.len() as f64)
        }
        Indicator::OffIslandShare => {
            let res = line_islands(g, IslandParams::journal_default(panelists.len()))?;
            off_island_share(&res, &panelists)
        }
        Indicator::Density => density(g, convention),
        Indicator::AverageDegree => average_degree(g),
    }
}

fn histogram(values: &[f64]) -> Vec<HistogramBucket> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() {
        return Vec::new();
    }
    if lo == hi {
        return vec![HistogramBucket {
            lower: lo,
            upper: hi,
            count: values.len(),
        }];
    }
    let width = (hi - lo) / HISTOGRAM_BUCKETS as f64;
    let mut counts = [0usize; HISTOGRAM_BUCKETS];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(HISTOGRAM_BUCKETS - 1);
        counts[b] += 1;
    }
    counts
        .iter()
        .enumerate()
        .map(|(b, &count)| HistogramBucket {
            lower: lo + b as f64 * width,
            upper: if b + 1 == HISTOGRAM_BUCKETS {
                hi
            } else {
                lo + (b + 1) as f64 * width
            },
            count,
        })
        .collect()
}

/// Distribution of `cfg.indicator` over random panels drawn from `pool`,
/// and the percentile of `observed` within it.
///
/// Each draw is seeded independently from `(seed, draw index)`, so the
/// values do not depend on how draws are scheduled across threads.
pub fn null_model_sample(
    pool: &CandidatePool,
    pubs: &[PublicationRecord],
    cfg: &NullModelConfig,
    observed: Option<f64>,
) -> Result<NullModelRun> {
    let n = pool.len();
    let k = cfg.panel_size;
    if k == 0 {
        return Err(Error::InvalidArgument(
            "panel size must be at least 1".into(),
        ));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "pool of {n} candidates is smaller than the panel size {k}"
        )));
    }
    let network = cfg.network();
    let template = pool.roster_for(&pool.label, &[]);
    let windowed = filter_window(pubs, &template);
    let eval = |picks: &[usize]| -> Result<f64> {
        let roster = pool.roster_for(&pool.label, picks);
        evaluate_windowed(
            &roster,
            &windowed,
            cfg.indicator,
            network,
            cfg.density_convention,
            &cfg.coauthorship,
        )
    };

    let values: Vec<f64> = match cfg.draws {
        DrawMode::Random { samples } => {
            if samples == 0 {
                return Err(Error::InvalidArgument("samples must be at least 1".into()));
            }
            (0..samples as u64)
                .into_par_iter()
                .map(|i| eval(&draw(cfg.seed, i, n, k)))
                .collect::<Result<_>>()?
        }
        DrawMode::Exhaustive => {
            let total = binomial(n, k);
            if total > EXHAUSTIVE_LIMIT as u128 {
                return Err(Error::InvalidArgument(format!(
                    "exhaustive enumeration of C({n},{k}) = {total} panels exceeds the limit of {EXHAUSTIVE_LIMIT}"
                )));
            }
            let mut out = Vec::with_capacity(total as usize);
            let mut c: Vec<usize> = (0..k).collect();
            let mut more = true;
            while more {
                let mut batch = Vec::with_capacity(BATCH);
                while more && batch.len() < BATCH {
                    batch.push(c.clone());
                    more = next_combination(&mut c, n);
                }
                let vals: Vec<f64> = batch.par_iter().map(|p| eval(p)).collect::<Result<_>>()?;
                out.extend(vals);
            }
            out
        }
    };

    let percentile = observed.map(|o| {
        let below = values.iter().filter(|&&v| v <= o).count();
        100.0 * below as f64 / values.len() as f64
    });
    Ok(NullModelRun {
        seed: cfg.seed,
        samples: values.len(),
        exhaustive: cfg.draws == DrawMode::Exhaustive,
        indicator: cfg.indicator,
        network,
        pool_size: n,
        panel_size: k,
        observed,
        percentile,
        histogram: histogram(&values),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ScholarId;

    fn pool(n: usize) -> CandidatePool {
        CandidatePool {
            label: "pool".into(),
            appointment_year: 2010,
            analysis_window_years: 25,
            candidates: (0..n)
                .map(|i| ScholarId::new(format!("s{i:02}"), "").unwrap())
                .collect(),
        }
    }

    /// Every candidate has a solo paper; candidates in the same group of
    /// `group` share one paper.
    fn grouped_pubs(n: usize, group: usize) -> Vec<PublicationRecord> {
        let mut pubs: Vec<PublicationRecord> = (0..n)
            .map(|i| PublicationRecord {
                paper_id: format!("solo{i}"),
                year: 2005,
                author_ids: vec![format!("s{i:02}")],
                journal_id: Some(format!("j{i}")),
            })
            .collect();
        for g in 0..n / group {
            pubs.push(PublicationRecord {
                paper_id: format!("group{g}"),
                year: 2006,
                author_ids: (g * group..(g + 1) * group)
                    .map(|i| format!("s{i:02}"))
                    .collect(),
                journal_id: Some(format!("jg{g}")),
            });
        }
        pubs
    }

    #[test]
    fn indicator_names_round_trip() {
        for i in Indicator::ALL {
            assert_eq!(i.as_str().parse::<Indicator>().unwrap(), i);
        }
        assert!("modularity".parse::<Indicator>().is_err());
    }

    #[test]
    fn uniform_below_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for bound in [1u64, 2, 3, 7, 1 << 40] {
            for _ in 0..200 {
                assert!(uniform_below(&mut rng, bound) < bound);
            }
        }
    }

    #[test]
    fn draws_are_distinct_and_reproducible() {
        let a = draw(9, 4, 20, 6);
        assert_eq!(a, draw(9, 4, 20, 6));
        assert_ne!(a, draw(9, 5, 20, 6));
        let mut d = a.clone();
        d.dedup();
        assert_eq!(d.len(), 6);
        assert!(a.iter().all(|&i| i < 20));
    }

    #[test]
    fn combinations_enumerate_binomial() {
        let mut c = vec![0, 1, 2];
        let mut count = 1;
        while next_combination(&mut c, 6) {
            count += 1;
        }
        assert_eq!(count, 20);
        assert_eq!(binomial(12, 3), 220);
        assert_eq!(binomial(5, 5), 1);
    }

    #[test]
    fn whole_pool_draw_equals_observed() {
        let p = pool(6);
        let pubs = grouped_pubs(6, 3);
        let cfg = NullModelConfig::new(6, 5, 1, Indicator::FragmentationRatio);
        let roster = p.roster_for("obs", &(0..6).collect::<Vec<_>>());
        let obs = evaluate_indicator(
            &roster,
            &pubs,
            cfg.indicator,
            cfg.network(),
            cfg.density_convention,
            &cfg.coauthorship,
        )
        .unwrap();
        assert!((obs - 2.0 / 6.0).abs() < 1e-12);
        let run = null_model_sample(&p, &pubs, &cfg, Some(obs)).unwrap();
        assert_eq!(run.samples, 5);
        assert!(run.values.iter().all(|&v| v == obs));
        assert_eq!(run.percentile, Some(100.0));
        assert_eq!(run.histogram.len(), 1);
    }

    #[test]
    fn exhaustive_matches_direct_count() {
        // 12 candidates in 4 groups of 3; panels of 3
        let p = pool(12);
        let pubs = grouped_pubs(12, 3);
        let mut cfg = NullModelConfig::new(3, 1, 0, Indicator::FragmentationRatio);
        cfg.draws = DrawMode::Exhaustive;
        let run = null_model_sample(&p, &pubs, &cfg, Some(2.0 / 3.0)).unwrap();
        assert_eq!(run.samples, 220);
        // panels touching exactly one, two or three groups
        let one = 4;
        let three = 4 * 27;
        let two = 220 - one - three;
        let mean = (one as f64 / 3.0 + two as f64 * 2.0 / 3.0 + three as f64) / 220.0;
        assert!((run.mean() - mean).abs() < 1e-12);
        assert_eq!(run.percentile, Some(100.0 * (one + two) as f64 / 220.0));
    }

    #[test]
    fn argument_errors() {
        let p = pool(4);
        let pubs = grouped_pubs(4, 2);
        let cfg = NullModelConfig::new(5, 10, 0, Indicator::Density);
        assert!(null_model_sample(&p, &pubs, &cfg, None).is_err());
        let cfg = NullModelConfig::new(2, 0, 0, Indicator::Density);
        assert!(null_model_sample(&p, &pubs, &cfg, None).is_err());
    }

    #[test]
    fn journal_network_off_island_share() {
        let p = pool(6);
        let pubs = grouped_pubs(6, 3);
        let cfg = NullModelConfig::new(6, 3, 2, Indicator::OffIslandShare);
        assert_eq!(cfg.network(), NetworkKind::Journal);
        let run = null_model_sample(&p, &pubs, &cfg, None).unwrap();
        // two groups of three, island bound ⌊18/5⌋ = 3: nobody off-island
        assert!(run.values.iter().all(|&v| v == 0.0));
    }
}
