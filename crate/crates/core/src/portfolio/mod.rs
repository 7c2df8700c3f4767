//! Researcher portfolios: cluster retrieval by name variants, time-window
//! and scenario filters, manual decisions, and name-only baselines.
//!
//! Filters work on [`Assignment`] rows. A filter only ever moves a row from
//! `candidate` to `dropped`; the final scenario step turns the surviving
//! candidates into `kept`.

mod baseline;
mod decisions;
mod roster;
mod variants;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::Cluster;
use crate::corpus::Corpus;
use crate::normalize::{normalize_text, NormalizeOptions};

pub use baseline::{baseline_assign, BaselineMode};
pub use decisions::{append_decision, apply_decisions, finalize, DecisionLog, ReviewDecision, Verdict};
pub use roster::{read_roster_csv, write_roster_csv, RosterEntry};
pub use variants::{name_variants, split_full_name, NamePattern};

#[derive(Debug, Error)]
pub enum PortfolioError {
    #[error("invalid window {0}:{1}, start after end")]
    InvalidWindow(i32, i32),
    #[error("bad window {0:?}, expected Y0:Y1")]
    BadWindow(String),
    #[error("roster line {line}: {msg}")]
    Roster { line: usize, msg: String },
    #[error("decision for unknown candidate ({person_id}, {cluster_id})")]
    UnknownPair { person_id: String, cluster_id: u64 },
    #[error("duplicate decision for ({person_id}, {cluster_id})")]
    DuplicateDecision { person_id: String, cluster_id: u64 },
    #[error("{0} candidate(s) still pending review")]
    Pending(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown cluster {0}")]
    UnknownCluster(u64),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Window {
    pub start: i32,
    pub end: i32,
}

impl Window {
    pub fn new(start: i32, end: i32) -> Result<Self, PortfolioError> {
        if start > end {
            return Err(PortfolioError::InvalidWindow(start, end));
        }
        Ok(Window { start, end })
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }

    pub fn overlaps(&self, first: i32, last: i32) -> bool {
        first <= self.end && last >= self.start
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

impl FromStr for Window {
    type Err = PortfolioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PortfolioError::BadWindow(s.to_string());
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        Window::new(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Name-variant retrieval plus the time window, before any scenario.
    Retrieval,
    S1,
    S2,
    S3,
    Baseline1,
    Baseline2,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scenario::Retrieval => "retrieval",
            Scenario::S1 => "s1",
            Scenario::S2 => "s2",
            Scenario::S3 => "s3",
            Scenario::Baseline1 => "baseline1",
            Scenario::Baseline2 => "baseline2",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DropReason {
    Window,
    ForeignCountry,
    IncompatibleFirstName,
    OtherCity,
    Rejected,
}

impl DropReason {
    fn as_str(self) -> &'static str {
        match self {
            DropReason::Window => "window",
            DropReason::ForeignCountry => "foreign_country",
            DropReason::IncompatibleFirstName => "incompatible_first_name",
            DropReason::OtherCity => "other_city",
            DropReason::Rejected => "rejected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Candidate,
    Kept,
    Pending,
    Dropped(DropReason),
}

impl Status {
    pub fn is_live(self) -> bool {
        matches!(self, Status::Candidate | Status::Kept)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Candidate => f.write_str("candidate"),
            Status::Kept => f.write_str("kept"),
            Status::Pending => f.write_str("pending"),
            Status::Dropped(r) => write!(f, "dropped:{}", r.as_str()),
        }
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "candidate" => Status::Candidate,
            "kept" => Status::Kept,
            "pending" => Status::Pending,
            other => {
                let reason = other
                    .strip_prefix("dropped:")
                    .ok_or_else(|| format!("unknown status {s:?}"))?;
                Status::Dropped(match reason {
                    "window" => DropReason::Window,
                    "foreign_country" => DropReason::ForeignCountry,
                    "incompatible_first_name" => DropReason::IncompatibleFirstName,
                    "other_city" => DropReason::OtherCity,
                    "rejected" => DropReason::Rejected,
                    _ => return Err(format!("unknown drop reason {reason:?}")),
                })
            }
        })
    }
}

impl Serialize for Status {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Status {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    pub person_id: String,
    pub cluster_id: u64,
    pub scenario: Scenario,
    pub status: Status,
}

/// Clusters addressable by id.
#[derive(Debug, Clone, Default)]
pub struct ClusterSet {
    clusters: Vec<Cluster>,
    by_id: HashMap<u64, usize>,
    by_surname: HashMap<String, Vec<usize>>,
}

impl ClusterSet {
    pub fn new(clusters: Vec<Cluster>) -> Self {
        let by_id = clusters
            .iter()
            .enumerate()
            .map(|(i, c)| (c.cluster_id, i))
            .collect();
        let mut by_surname: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, c) in clusters.iter().enumerate() {
            for name in [&c.meta.full_name, &c.meta.alternative_full_name] {
                if name.is_empty() {
                    continue;
                }
                let list = by_surname.entry(split_full_name(name).0.to_string()).or_default();
                if list.last() != Some(&i) {
                    list.push(i);
                }
            }
        }
        ClusterSet {
            clusters,
            by_id,
            by_surname,
        }
    }

    pub fn get(&self, id: u64) -> Option<&Cluster> {
        self.by_id.get(&id).map(|&i| &self.clusters[i])
    }

    pub fn all(&self) -> &[Cluster] {
        &self.clusters
    }

    fn require(&self, id: u64) -> &Cluster {
        // rows are only ever built from this set
        self.get(id).expect("assignment refers to a cluster of this set")
    }
}

/// Equivalence classes of place names, e.g. `roma` and `rome`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Synonyms(HashMap<String, String>);

impl Synonyms {
    /// Each line lists equivalent names separated by commas; the first one
    /// is canonical.
    pub fn from_reader<R: BufRead>(reader: R) -> std::io::Result<Self> {
        let mut map = HashMap::new();
        for line in reader.lines() {
            let line = line?;
            let names: Vec<String> = line
                .split(',')
                .map(|n| normalize_text(n, NormalizeOptions::default()))
                .filter(|n| !n.is_empty())
                .collect();
            if let Some(canon) = names.first() {
                for n in &names {
                    map.insert(n.clone(), canon.clone());
                }
            }
        }
        Ok(Synonyms(map))
    }

    pub fn canonical(&self, name: &str) -> String {
        let n = normalize_text(name, NormalizeOptions::default());
        self.0.get(&n).cloned().unwrap_or(n)
    }
}

#[derive(Debug, Clone, Default)]
pub struct FilterConfig {
    pub synonyms: Synonyms,
    /// Also accept any city from the roster career records in scenario 2.
    pub use_career_cities: bool,
}

/// Compatible iff equal, one is a single letter matching the other's
/// initial, or one equals the other's first token.
pub fn first_names_compatible(a: &str, b: &str) -> bool {
    let a = normalize_text(a, NormalizeOptions::default());
    let b = normalize_text(b, NormalizeOptions::default());
    if a.is_empty() || b.is_empty() || a == b {
        return true;
    }
    let first_token = |s: &str| s.split_whitespace().next().unwrap_or("").to_string();
    let single_letter = |x: &str, y: &str| x.chars().count() == 1 && y.starts_with(x);
    single_letter(&a, &b) || single_letter(&b, &a) || first_token(&b) == a || first_token(&a) == b
}

/// Clusters whose full name or alternative full name matches any of the
/// researcher's name variants, as candidate rows.
pub fn retrieve_clusters(entry: &RosterEntry, clusters: &ClusterSet) -> Vec<Assignment> {
    let mut hits = BTreeSet::new();
    for pattern in name_variants(entry) {
        for &i in clusters.by_surname.get(&pattern.last).into_iter().flatten() {
            let c = &clusters.clusters[i];
            if pattern.matches(&c.meta.full_name) || pattern.matches(&c.meta.alternative_full_name) {
                hits.insert(c.cluster_id);
            }
        }
    }
    hits.into_iter()
        .map(|cluster_id| Assignment {
            person_id: entry.person_id.clone(),
            cluster_id,
            scenario: Scenario::Retrieval,
            status: Status::Candidate,
        })
        .collect()
}

fn drop_where<F>(rows: Vec<Assignment>, reason: DropReason, mut drop: F) -> Vec<Assignment>
where
    F: FnMut(&Assignment) -> bool,
{
    rows.into_iter()
        .map(|mut r| {
            if r.status == Status::Candidate && drop(&r) {
                r.status = Status::Dropped(reason);
            }
            r
        })
        .collect()
}

/// Drops candidates whose year span misses the window.
pub fn window_filter(rows: Vec<Assignment>, clusters: &ClusterSet, window: Window) -> Vec<Assignment> {
    drop_where(rows, DropReason::Window, |r| {
        let m = &clusters.require(r.cluster_id).meta;
        !window.overlaps(m.first_year, m.last_year)
    })
}

/// True when at least one value is present and none is acceptable.
fn all_present_mismatch<'a>(values: [&'a str; 2], ok: impl Fn(&'a str) -> bool) -> bool {
    let present: Vec<&str> = values.into_iter().filter(|v| !v.is_empty()).collect();
    !present.is_empty() && !present.into_iter().any(ok)
}

/// Country and first-name checks. Clusters lacking the field are kept.
pub fn scenario1_filter(
    rows: Vec<Assignment>,
    clusters: &ClusterSet,
    entry: &RosterEntry,
    config: &FilterConfig,
) -> Vec<Assignment> {
    let country = config.synonyms.canonical(&entry.country);
    let rows = drop_where(rows, DropReason::ForeignCountry, |r| {
        let m = &clusters.require(r.cluster_id).meta;
        all_present_mismatch([&m.address_country, &m.alternative_address_country], |c| {
            config.synonyms.canonical(c) == country
        })
    });
    drop_where(rows, DropReason::IncompatibleFirstName, |r| {
        let m = &clusters.require(r.cluster_id).meta;
        all_present_mismatch([&m.first_name, &m.alternative_first_name], |f| {
            first_names_compatible(f, &entry.first_name)
        })
    })
    .into_iter()
    .map(|mut r| {
        r.scenario = Scenario::S1;
        r
    })
    .collect()
}

/// City check on top of scenario 1 output. Clusters lacking a city are kept.
pub fn scenario2_filter(
    rows: Vec<Assignment>,
    clusters: &ClusterSet,
    entry: &RosterEntry,
    config: &FilterConfig,
) -> Vec<Assignment> {
    let mut cities: BTreeSet<String> = BTreeSet::new();
    cities.insert(config.synonyms.canonical(&entry.affiliation_city));
    if config.use_career_cities {
        cities.extend(entry.career.iter().map(|(_, c)| config.synonyms.canonical(c)));
    }
    drop_where(rows, DropReason::OtherCity, |r| {
        let m = &clusters.require(r.cluster_id).meta;
        all_present_mismatch([&m.address_city, &m.alternative_address_city], |c| {
            cities.contains(&config.synonyms.canonical(c))
        })
    })
    .into_iter()
    .map(|mut r| {
        r.scenario = Scenario::S2;
        r
    })
    .collect()
}

/// Turns surviving candidates into kept rows.
pub fn keep_candidates(rows: Vec<Assignment>) -> Vec<Assignment> {
    rows.into_iter()
        .map(|mut r| {
            if r.status == Status::Candidate {
                r.status = Status::Kept;
            }
            r
        })
        .collect()
}

/// Retrieval plus window filter for every roster entry.
pub fn match_roster(roster: &[RosterEntry], clusters: &ClusterSet, window: Window) -> Vec<Assignment> {
    roster
        .iter()
        .flat_map(|e| window_filter(retrieve_clusters(e, clusters), clusters, window))
        .collect()
}

/// Runs scenario 1 or 2 over the retrieval rows of every roster entry.
pub fn run_automatic_scenario(
    scenario: Scenario,
    roster: &[RosterEntry],
    candidates: &[Assignment],
    clusters: &ClusterSet,
    config: &FilterConfig,
) -> Result<Vec<Assignment>, PortfolioError> {
    for c in candidates {
        if clusters.get(c.cluster_id).is_none() {
            return Err(PortfolioError::UnknownCluster(c.cluster_id));
        }
    }
    let mut by_person: BTreeMap<&str, Vec<Assignment>> = BTreeMap::new();
    for c in candidates {
        by_person.entry(&c.person_id).or_default().push(c.clone());
    }
    let mut out = Vec::new();
    for entry in roster {
        let rows = by_person.remove(entry.person_id.as_str()).unwrap_or_default();
        let rows = scenario1_filter(rows, clusters, entry, config);
        let rows = match scenario {
            Scenario::S1 => rows,
            Scenario::S2 => scenario2_filter(rows, clusters, entry, config),
            other => panic!("{other} is not an automatic scenario"),
        };
        out.extend(keep_candidates(rows));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Authorship {
    pub person_id: String,
    pub pub_id: String,
}

/// Publications of the person's kept clusters that fall inside the window.
pub fn portfolio(
    person_id: &str,
    assignments: &[Assignment],
    clusters: &ClusterSet,
    corpus: &Corpus,
    window: Window,
) -> BTreeSet<Authorship> {
    let mut out = BTreeSet::new();
    for a in assignments {
        if a.person_id != person_id || a.status != Status::Kept {
            continue;
        }
        let Some(cluster) = clusters.get(a.cluster_id) else {
            continue;
        };
        for pub_id in cluster.pub_ids() {
            let in_window = corpus
                .publication(pub_id)
                .is_some_and(|p| window.contains(p.year()));
            if in_window {
                out.insert(Authorship {
                    person_id: person_id.to_string(),
                    pub_id: pub_id.to_string(),
                });
            }
        }
    }
    out
}

/// Portfolios of all persons with kept rows.
pub fn all_portfolios(
    assignments: &[Assignment],
    clusters: &ClusterSet,
    corpus: &Corpus,
    window: Window,
) -> BTreeSet<Authorship> {
    let persons: BTreeSet<&str> = assignments.iter().map(|a| a.person_id.as_str()).collect();
    persons
        .into_iter()
        .flat_map(|p| portfolio(p, assignments, clusters, corpus, window))
        .collect()
}

pub fn write_assignments_jsonl<W: Write>(rows: &[Assignment], mut w: W) -> std::io::Result<()> {
    for r in rows {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_assignments_jsonl<R: BufRead>(reader: R) -> Result<Vec<Assignment>, PortfolioError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| PortfolioError::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn write_portfolio_csv<W: Write>(
    rows: &BTreeSet<Authorship>,
    scenario: Scenario,
    w: W,
) -> Result<(), PortfolioError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["person_id", "pub_id", "scenario"])?;
    let tag = scenario.to_string();
    for a in rows {
        wtr.write_record([a.person_id.as_str(), &a.pub_id, &tag])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads `person_id,pub_id[,scenario]` rows; extra columns are ignored.
pub fn read_authorships_csv<R: Read>(reader: R) -> Result<BTreeSet<Authorship>, PortfolioError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| PortfolioError::Parse {
            line: 1,
            msg: format!("missing column {name}"),
        })
    };
    let (pi, bi) = (col("person_id")?, col("pub_id")?);
    let mut out = BTreeSet::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let get = |k: usize| {
            rec.get(k).map(str::to_string).ok_or_else(|| PortfolioError::Parse {
                line: i + 2,
                msg: "short row".into(),
            })
        };
        out.insert(Authorship {
            person_id: get(pi)?,
            pub_id: get(bi)?,
        });
    }
    Ok(out)
}
