//! Input datasets: panel rosters, candidate pools, publication records and
//! affiliation records.
//!
//! File formats:
//!
//! - `publications.csv`: header `paper_id,year,authors,journal_id`, authors
//!   joined with `;`, empty `journal_id` for records without a venue.
//!   A JSON-lines variant (`.jsonl`/`.ndjson`) carries one object per line
//!   with the same field names and `authors` as an array.
//! - `roster.json` / `pool.json`:
//!   `{panel_label, appointment_year, official_size, members: [{id, name}]}`.
//! - `affiliations.csv`: header `scholar_id,institution_id,category`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ScholarId;

pub const DEFAULT_WINDOW_YEARS: u32 = 25;
pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

/// A parsed value together with the non-fatal issues found while loading it.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

impl<T> Loaded<T> {
    fn new(value: T, warnings: Vec<String>) -> Self {
        for w in &warnings {
            warn!("{w}");
        }
        Loaded { value, warnings }
    }

    /// Drops the warnings, which have already been logged.
    pub fn into_value(self) -> T {
        self.value
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    JsonLines,
    Json,
}

impl InputFormat {
    pub fn from_path(path: &Path) -> InputFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") => InputFormat::JsonLines,
            Some("json") => InputFormat::Json,
            _ => InputFormat::Csv,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// Rosters and pools

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanelRoster {
    pub panel_label: String,
    /// Year the panel was appointed; the publication window ends here.
    pub appointment_year: i32,
    /// Assessed period, informational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<(i32, i32)>,
    pub members: Vec<ScholarId>,
    pub roster_size_official: usize,
    pub analysis_window_years: u32,
}

impl PanelRoster {
    pub fn new(
        panel_label: impl Into<String>,
        appointment_year: i32,
        members: Vec<ScholarId>,
        roster_size_official: Option<usize>,
    ) -> Result<Loaded<Self>> {
        let mut warnings = Vec::new();
        let official = match roster_size_official {
            Some(n) => n,
            None => {
                warnings.push(format!(
                    "official_size missing; defaulting to member count {}",
                    members.len()
                ));
                members.len()
            }
        };
        let roster = PanelRoster {
            panel_label: panel_label.into(),
            appointment_year,
            period: None,
            members,
            roster_size_official: official,
            analysis_window_years: DEFAULT_WINDOW_YEARS,
        };
        roster.validate()?;
        Ok(Loaded::new(roster, warnings))
    }

    pub fn validate(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::Validation(format!(
                "roster `{}` has no members",
                self.panel_label
            )));
        }
        let mut seen = HashSet::new();
        for m in &self.members {
            if m.id.trim().is_empty() {
                return Err(Error::Validation("member with empty id".into()));
            }
            if !seen.insert(m.id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate member id `{}` in roster `{}`",
                    m.id, self.panel_label
                )));
            }
        }
        if self.roster_size_official < self.members.len() {
            return Err(Error::Validation(format!(
                "official size {} is smaller than the {} listed members",
                self.roster_size_official,
                self.members.len()
            )));
        }
        if self.analysis_window_years == 0 {
            return Err(Error::Validation(
                "analysis window must be at least 1 year".into(),
            ));
        }
        Ok(())
    }

    /// Inclusive publication window `[appointment − (years − 1), appointment]`.
    pub fn window(&self) -> (i32, i32) {
        let span = self.analysis_window_years as i32 - 1;
        (self.appointment_year - span, self.appointment_year)
    }

    pub fn member_ids(&self) -> HashSet<&str> {
        self.members.iter().map(|m| m.id.as_str()).collect()
    }
}

#[derive(Debug, Deserialize)]
struct RosterFile {
    panel_label: String,
    appointment_year: i32,
    #[serde(default)]
    official_size: Option<usize>,
    #[serde(default)]
    period: Option<(i32, i32)>,
    #[serde(default)]
    analysis_window_years: Option<u32>,
    members: Vec<MemberEntry>,
}

#[derive(Debug, Deserialize)]
struct MemberEntry {
    id: String,
    #[serde(default)]
    name: String,
}

pub fn parse_roster(text: &str, source: &Path) -> Result<Loaded<PanelRoster>> {
    let file: RosterFile = serde_json::from_str(text)
        .map_err(|e| Error::parse(source, e.line(), format!("invalid roster JSON: {e}")))?;
    let members = file
        .members
        .into_iter()
        .map(|m| ScholarId::new(m.id, m.name))
        .collect::<Result<Vec<_>>>()?;
    let mut loaded = PanelRoster::new(
        file.panel_label,
        file.appointment_year,
        members,
        file.official_size,
    )?;
    loaded.value.period = file.period;
    if let Some(w) = file.analysis_window_years {
        loaded.value.analysis_window_years = w;
    }
    loaded.value.validate()?;
    Ok(loaded)
}

pub fn load_roster(path: &Path) -> Result<Loaded<PanelRoster>> {
    parse_roster(&read(path)?, path)
}

/// Scholars eligible for a random panel draw.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePool {
    pub label: String,
    pub appointment_year: i32,
    pub analysis_window_years: u32,
    pub candidates: Vec<ScholarId>,
}

impl CandidatePool {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// A roster made of the given candidate indices.
    pub fn roster_for(&self, label: &str, picks: &[usize]) -> PanelRoster {
        PanelRoster {
            panel_label: label.to_string(),
            appointment_year: self.appointment_year,
            period: None,
            members: picks.iter().map(|&i| self.candidates[i].clone()).collect(),
            roster_size_official: picks.len(),
            analysis_window_years: self.analysis_window_years,
        }
    }
}

impl From<PanelRoster> for CandidatePool {
    fn from(r: PanelRoster) -> Self {
        CandidatePool {
            label: r.panel_label,
            appointment_year: r.appointment_year,
            analysis_window_years: r.analysis_window_years,
            candidates: r.members,
        }
    }
}

pub fn load_pool(path: &Path) -> Result<Loaded<CandidatePool>> {
    let loaded = load_roster(path)?;
    Ok(Loaded {
        value: loaded.value.into(),
        warnings: loaded.warnings,
    })
}

// ---------------------------------------------------------------------------
// Publications

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub paper_id: String,
    pub year: i32,
    pub author_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub journal_id: Option<String>,
}

#[derive(Debug, Deserialize)]
struct PublicationRow {
    paper_id: String,
    year: i32,
    authors: String,
    #[serde(default)]
    journal_id: Option<String>,
}

#[derive(Debug, Deserialize)]
struct PublicationLine {
    paper_id: String,
    year: i32,
    authors: Vec<String>,
    #[serde(default)]
    journal_id: Option<String>,
}

fn non_empty(s: Option<String>) -> Option<String> {
    s.map(|s| s.trim().to_string()).filter(|s| !s.is_empty())
}

fn dedup_keep_order(ids: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut seen = HashSet::new();
    ids.into_iter()
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty() && seen.insert(s.clone()))
        .collect()
}

/// Parses the CSV publication format. Rows are returned with their
/// 1-based line number for diagnostics.
fn parse_publications_csv(text: &str, source: &Path) -> Result<Vec<(usize, PublicationRecord)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(source, 1, e.to_string()))?
        .clone();
    let expected = ["paper_id", "year", "authors", "journal_id"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::parse(
            source,
            1,
            format!("expected header `{}`", expected.join(",")),
        ));
    }
    let mut out = Vec::new();
    for row in rdr.deserialize::<PublicationRow>() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(source, line, e.to_string())
        })?;
        let line = out.len() + 2;
        out.push((
            line,
            PublicationRecord {
                paper_id: row.paper_id.trim().to_string(),
                year: row.year,
                author_ids: row.authors.split(';').map(str::to_string).collect(),
                journal_id: non_empty(row.journal_id),
            },
        ));
    }
    Ok(out)
}

fn parse_publications_jsonl(text: &str, source: &Path) -> Result<Vec<(usize, PublicationRecord)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: PublicationLine =
            serde_json::from_str(line).map_err(|e| Error::parse(source, i + 1, e.to_string()))?;
        out.push((
            i + 1,
            PublicationRecord {
                paper_id: rec.paper_id.trim().to_string(),
                year: rec.year,
                author_ids: rec.authors,
                journal_id: non_empty(rec.journal_id),
            },
        ));
    }
    Ok(out)
}

/// Validates and normalizes raw publication rows: author lists are
/// deduplicated, rows without authors are dropped, and repeated
/// `paper_id`s are merged when they agree on year and journal.
pub fn normalize_publications(
    rows: Vec<(usize, PublicationRecord)>,
    source: &Path,
) -> Result<Loaded<Vec<PublicationRecord>>> {
    let mut warnings = Vec::new();
    let mut out: Vec<PublicationRecord> = Vec::with_capacity(rows.len());
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for (line, mut rec) in rows {
        if rec.paper_id.is_empty() {
            return Err(Error::parse(source, line, "empty paper_id"));
        }
        if !(MIN_YEAR..=MAX_YEAR).contains(&rec.year) {
            return Err(Error::parse(
                source,
                line,
                format!("year {} outside [{MIN_YEAR}, {MAX_YEAR}]", rec.year),
            ));
        }
        rec.author_ids = dedup_keep_order(rec.author_ids);
        if rec.author_ids.is_empty() {
            warnings.push(format!(
                "{}:{line}: paper `{}` has no authors; row rejected",
                source.display(),
                rec.paper_id
            ));
            continue;
        }
        match by_id.get(&rec.paper_id) {
            None => {
                by_id.insert(rec.paper_id.clone(), out.len());
                out.push(rec);
            }
            Some(&k) => {
                let prev = &mut out[k];
                if prev.journal_id != rec.journal_id {
                    return Err(Error::parse(
                        source,
                        line,
                        format!("conflicting journal for paper `{}`", rec.paper_id),
                    ));
                }
                if prev.year != rec.year {
                    return Err(Error::parse(
                        source,
                        line,
                        format!("conflicting year for paper `{}`", rec.paper_id),
                    ));
                }
                let merged = dedup_keep_order(prev.author_ids.drain(..).chain(rec.author_ids));
                prev.author_ids = merged;
                warnings.push(format!(
                    "{}:{line}: duplicate paper `{}` merged",
                    source.display(),
                    rec.paper_id
                ));
            }
        }
    }
    Ok(Loaded::new(out, warnings))
}

pub fn parse_publications(
    text: &str,
    format: InputFormat,
    source: &Path,
) -> Result<Loaded<Vec<PublicationRecord>>> {
    let rows = match format {
        InputFormat::Csv => parse_publications_csv(text, source)?,
        InputFormat::JsonLines | InputFormat::Json => parse_publications_jsonl(text, source)?,
    };
    normalize_publications(rows, source)
}

pub fn load_publications(path: &Path) -> Result<Loaded<Vec<PublicationRecord>>> {
    parse_publications(&read(path)?, InputFormat::from_path(path), path)
}

/// Keeps the records published inside the roster's window (both bounds
/// inclusive).
pub fn filter_window(pubs: &[PublicationRecord], roster: &PanelRoster) -> Vec<PublicationRecord> {
    let (lo, hi) = roster.window();
    pubs.iter()
        .filter(|p| (lo..=hi).contains(&p.year))
        .cloned()
        .collect()
}

// ---------------------------------------------------------------------------
// Affiliations

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AffiliationCategory {
    Graduation,
    Postgraduate,
    University,
    ResearchCentre,
    Media,
}

impl AffiliationCategory {
    pub const ALL: [AffiliationCategory; 5] = [
        AffiliationCategory::Graduation,
        AffiliationCategory::Postgraduate,
        AffiliationCategory::University,
        AffiliationCategory::ResearchCentre,
        AffiliationCategory::Media,
    ];

    /// Maximum records per scholar.
    pub fn cap(self) -> usize {
        match self {
            AffiliationCategory::Graduation
            | AffiliationCategory::Postgraduate
            | AffiliationCategory::University => 2,
            AffiliationCategory::ResearchCentre | AffiliationCategory::Media => 5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AffiliationCategory::Graduation => "graduation",
            AffiliationCategory::Postgraduate => "postgraduate",
            AffiliationCategory::University => "university",
            AffiliationCategory::ResearchCentre => "research_centre",
            AffiliationCategory::Media => "media",
        }
    }
}

impl fmt::Display for AffiliationCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AffiliationCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AffiliationCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s.trim())
            .ok_or_else(|| Error::Validation(format!("unknown affiliation category `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffiliationRecord {
    pub scholar_id: String,
    pub institution_id: String,
    pub category: AffiliationCategory,
}

#[derive(Debug, Deserialize)]
struct AffiliationRow {
    scholar_id: String,
    institution_id: String,
    category: String,
}

/// Drops records beyond the per-category cap, first come first kept.
pub fn enforce_caps(records: Vec<AffiliationRecord>) -> Loaded<Vec<AffiliationRecord>> {
    let mut counts: HashMap<(String, AffiliationCategory), usize> = HashMap::new();
    let mut warnings = Vec::new();
    let mut kept = Vec::with_capacity(records.len());
    for rec in records {
        let n = counts
            .entry((rec.scholar_id.clone(), rec.category))
            .or_insert(0);
        if *n >= rec.category.cap() {
            warnings.push(format!(
                "scholar `{}`: {} affiliation `{}` exceeds cap {}; rejected",
                rec.scholar_id,
                rec.category,
                rec.institution_id,
                rec.category.cap()
            ));
            continue;
        }
        *n += 1;
        kept.push(rec);
    }
    Loaded::new(kept, warnings)
}

pub fn parse_affiliations(text: &str, source: &Path) -> Result<Loaded<Vec<AffiliationRecord>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(source, 1, e.to_string()))?
        .clone();
    let expected = ["scholar_id", "institution_id", "category"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::parse(
            source,
            1,
            format!("expected header `{}`", expected.join(",")),
        ));
    }
    let mut records = Vec::new();
    for (i, row) in rdr.deserialize::<AffiliationRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::parse(source, line, e.to_string()))?;
        let category = row
            .category
            .parse::<AffiliationCategory>()
            .map_err(|e| Error::parse(source, line, e.to_string()))?;
        let scholar_id = row.scholar_id.trim().to_string();
        let institution_id = row.institution_id.trim().to_string();
        if scholar_id.is_empty() || institution_id.is_empty() {
            return Err(Error::parse(
                source,
                line,
                "empty scholar or institution id",
            ));
        }
        records.push(AffiliationRecord {
            scholar_id,
            institution_id,
            category,
        });
    }
    Ok(enforce_caps(records))
}

pub fn load_affiliations(path: &Path) -> Result<Loaded<Vec<AffiliationRecord>>> {
    parse_affiliations(&read(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn src() -> &'static Path {
        Path::new("test.csv")
    }

    fn members(n: usize) -> Vec<ScholarId> {
        (0..n)
            .map(|i| ScholarId::new(format!("s{i}"), "").unwrap())
            .collect()
    }

    #[test]
    fn roster_sizes() {
        let r = PanelRoster::new("p", 2011, members(36), Some(36))
            .unwrap()
            .value;
        assert_eq!((r.members.len(), r.roster_size_official), (36, 36));
        let r = PanelRoster::new("p", 2020, members(37), Some(40))
            .unwrap()
            .value;
        assert_eq!((r.members.len(), r.roster_size_official), (37, 40));
    }

    #[test]
    fn roster_errors() {
        assert!(PanelRoster::new("p", 2011, vec![], Some(3)).is_err());
        let mut dup = members(3);
        dup.push(dup[0].clone());
        assert!(PanelRoster::new("p", 2011, dup, None).is_err());
        assert!(PanelRoster::new("p", 2011, members(5), Some(4)).is_err());
    }

    #[test]
    fn roster_official_size_defaults_with_warning() {
        let text = r#"{"panel_label":"x","appointment_year":2011,
            "members":[{"id":"a","name":"A"},{"id":"b","name":"B"}]}"#;
        let loaded = parse_roster(text, Path::new("r.json")).unwrap();
        assert_eq!(loaded.value.roster_size_official, 2);
        assert_eq!(loaded.warnings.len(), 1);
        assert_eq!(loaded.value.window(), (1987, 2011));
    }

    #[test]
    fn roster_duplicate_id_is_hard_error() {
        let text = r#"{"panel_label":"x","appointment_year":2011,"official_size":2,
            "members":[{"id":"a","name":"A"},{"id":"a","name":"B"}]}"#;
        assert!(parse_roster(text, Path::new("r.json")).is_err());
    }

    #[test]
    fn authors_are_deduplicated() {
        let text = "paper_id,year,authors,journal_id\np1,2005,a;b;b,J1\n";
        let pubs = parse_publications(text, InputFormat::Csv, src())
            .unwrap()
            .value;
        assert_eq!(pubs[0].author_ids, vec!["a", "b"]);
        assert_eq!(pubs[0].journal_id.as_deref(), Some("J1"));
    }

    #[test]
    fn conflicting_journal_rejected() {
        let text = "paper_id,year,authors,journal_id\np1,2005,a,J1\np1,2005,b,J2\n";
        let err = parse_publications(text, InputFormat::Csv, src()).unwrap_err();
        assert!(err.to_string().contains("conflicting journal"), "{err}");
        assert!(err.to_string().contains(":3:"), "{err}");
    }

    #[test]
    fn duplicate_rows_merge() {
        let text = "paper_id,year,authors,journal_id\np1,2005,a,J1\np1,2005,b;a,J1\n";
        let loaded = parse_publications(text, InputFormat::Csv, src()).unwrap();
        assert_eq!(loaded.value.len(), 1);
        assert_eq!(loaded.value[0].author_ids, vec!["a", "b"]);
        assert_eq!(loaded.warnings.len(), 1);
    }

    #[test]
    fn zero_author_rows_rejected_not_fatal() {
        let text = "paper_id,year,authors,journal_id\np1,2005,,J1\np2,2006,a,\n";
        let loaded = parse_publications(text, InputFormat::Csv, src()).unwrap();
        assert_eq!(loaded.value.len(), 1);
        assert_eq!(loaded.value[0].journal_id, None);
        assert_eq!(loaded.warnings.len(), 1);
    }

    #[test]
    fn year_out_of_range() {
        let text = "paper_id,year,authors,journal_id\np1,1850,a,J1\n";
        assert!(parse_publications(text, InputFormat::Csv, src()).is_err());
    }

    #[test]
    fn bad_header() {
        let text = "id,year,authors,journal\np1,2005,a,J1\n";
        assert!(parse_publications(text, InputFormat::Csv, src()).is_err());
    }

    #[test]
    fn jsonl_matches_csv() {
        let csv_text = "paper_id,year,authors,journal_id\np1,2005,a;b,J1\np2,2007,c,\n";
        let jsonl =
            "{\"paper_id\":\"p1\",\"year\":2005,\"authors\":[\"a\",\"b\"],\"journal_id\":\"J1\"}\n\
                     {\"paper_id\":\"p2\",\"year\":2007,\"authors\":[\"c\"]}\n";
        let a = parse_publications(csv_text, InputFormat::Csv, src())
            .unwrap()
            .value;
        let b = parse_publications(jsonl, InputFormat::JsonLines, src())
            .unwrap()
            .value;
        assert_eq!(a, b);
    }

    fn roster_2011() -> PanelRoster {
        PanelRoster::new("p", 2011, members(1), None).unwrap().value
    }

    fn paper(year: i32) -> PublicationRecord {
        PublicationRecord {
            paper_id: format!("p{year}"),
            year,
            author_ids: vec!["s0".into()],
            journal_id: None,
        }
    }

    #[test]
    fn window_bounds_inclusive() {
        let r = roster_2011();
        assert_eq!(r.window(), (1987, 2011));
        let kept = filter_window(&[paper(1986), paper(1987), paper(2011), paper(2012)], &r);
        let years: Vec<_> = kept.iter().map(|p| p.year).collect();
        assert_eq!(years, vec![1987, 2011]);
    }

    #[test]
    fn caps_enforced_in_input_order() {
        let mut text = String::from("scholar_id,institution_id,category\n");
        for i in 0..6 {
            text.push_str(&format!("s,rc{i},research_centre\n"));
        }
        for i in 0..3 {
            text.push_str(&format!("s,u{i},university\n"));
        }
        let loaded = parse_affiliations(&text, src()).unwrap();
        let rc: Vec<_> = loaded
            .value
            .iter()
            .filter(|r| r.category == AffiliationCategory::ResearchCentre)
            .map(|r| r.institution_id.as_str())
            .collect();
        assert_eq!(rc, vec!["rc0", "rc1", "rc2", "rc3", "rc4"]);
        let uni: Vec<_> = loaded
            .value
            .iter()
            .filter(|r| r.category == AffiliationCategory::University)
            .map(|r| r.institution_id.as_str())
            .collect();
        assert_eq!(uni, vec!["u0", "u1"]);
        assert_eq!(loaded.warnings.len(), 2);
    }

    #[test]
    fn well_formed_affiliations() {
        let text = "scholar_id,institution_id,category\n\
                    a,U1,university\na,G1,graduation\nb,M1,media\nb,P1,postgraduate\n";
        assert_eq!(parse_affiliations(text, src()).unwrap().value.len(), 4);
    }

    #[test]
    fn unknown_category_is_hard_error() {
        let text = "scholar_id,institution_id,category\na,U1,club\n";
        let err = parse_affiliations(text, src()).unwrap_err();
        assert!(err.to_string().contains("club"));
    }
}
