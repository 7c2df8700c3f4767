//! Publication records, author mentions and the PAC table.
//!
//! A [`Corpus`] is built once from a JSONL stream (or from in-memory records)
//! and is immutable afterwards. Every author mention becomes a [`Pac`] with
//! its normalized name, email, linked affiliations and name-block key.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocking::{block_key, BlockKey};
use crate::normalize::{
    normalize_email, normalize_key, normalize_name_with, normalize_text, NormalizeOptions,
    NormalizedName,
};

/// Publications with at least this many authors are hyper-authorship papers.
pub const HYPER_AUTHOR_MIN: usize = 50;
/// Publications with at least this many institutes are hyper-instituteship papers.
pub const HYPER_INSTITUTE_MIN: usize = 20;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: malformed record: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: duplicate pub_id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: {msg}")]
    Invalid { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Affiliation {
    #[serde(default)]
    pub org: String,
    #[serde(default)]
    pub dept: String,
    #[serde(default)]
    pub city: String,
    #[serde(default)]
    pub country: String,
}

impl Affiliation {
    pub fn normalized(&self, opts: NormalizeOptions) -> Affiliation {
        Affiliation {
            org: normalize_text(&self.org, opts),
            dept: normalize_text(&self.dept, opts),
            city: normalize_text(&self.city, opts),
            country: normalize_text(&self.country, opts),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorMentionRaw {
    pub position: u32,
    #[serde(default)]
    pub last_name: String,
    #[serde(default)]
    pub first_name: String,
    #[serde(default)]
    pub initials: String,
    #[serde(default)]
    pub email: String,
    #[serde(rename = "affiliation_idx", default)]
    pub linked_affiliation_indices: Vec<usize>,
}

/// A cited reference: either a publication of the corpus or a normalized
/// free-text key (first author last name, year, source).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RefKey {
    Pub(String),
    Text(String),
}

impl RefKey {
    pub fn text(raw: &str) -> Self {
        RefKey::Text(normalize_key(raw))
    }
}

/// Key for a reference that does not resolve to a corpus publication.
pub fn reference_key(first_author_last: &str, year: i32, source: &str) -> String {
    normalize_key(&format!("{first_author_last}{year}{source}"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum WireRef {
    Pub { pub_id: String },
    Key { key: String },
}

impl From<WireRef> for RefKey {
    fn from(w: WireRef) -> Self {
        match w {
            WireRef::Pub { pub_id } => RefKey::Pub(pub_id),
            WireRef::Key { key } => RefKey::text(&key),
        }
    }
}

impl From<&RefKey> for WireRef {
    fn from(r: &RefKey) -> Self {
        match r {
            RefKey::Pub(id) => WireRef::Pub { pub_id: id.clone() },
            RefKey::Text(k) => WireRef::Key { key: k.clone() },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PublicationRecord {
    pub pub_id: String,
    pub year: i32,
    pub title: String,
    pub source_title: String,
    pub subject_categories: Vec<String>,
    pub authors: Vec<AuthorMentionRaw>,
    pub affiliations: Vec<Affiliation>,
    pub grant_numbers: Vec<String>,
    pub references: Vec<RefKey>,
}

fn is_empty_str(s: &str) -> bool {
    s.is_empty()
}

/// One line of the publications JSONL file.
#[derive(Debug, Serialize, Deserialize)]
struct RecordLine {
    pub_id: String,
    year: i32,
    authors: Vec<AuthorMentionRaw>,
    #[serde(default, skip_serializing_if = "is_empty_str")]
    title: String,
    #[serde(default, skip_serializing_if = "is_empty_str")]
    source_title: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    subject_categories: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    affiliations: Vec<Affiliation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    grants: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    references: Vec<WireRef>,
}

impl From<RecordLine> for PublicationRecord {
    fn from(l: RecordLine) -> Self {
        PublicationRecord {
            pub_id: l.pub_id,
            year: l.year,
            title: l.title,
            source_title: l.source_title,
            subject_categories: l.subject_categories,
            authors: l.authors,
            affiliations: l.affiliations,
            grant_numbers: l.grants,
            references: l.references.into_iter().map(RefKey::from).collect(),
        }
    }
}

impl From<&PublicationRecord> for RecordLine {
    fn from(r: &PublicationRecord) -> Self {
        RecordLine {
            pub_id: r.pub_id.clone(),
            year: r.year,
            authors: r.authors.clone(),
            title: r.title.clone(),
            source_title: r.source_title.clone(),
            subject_categories: r.subject_categories.clone(),
            affiliations: r.affiliations.clone(),
            grants: r.grant_numbers.clone(),
            references: r.references.iter().map(WireRef::from).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperFlags {
    pub hyper_author: bool,
    pub hyper_institute: bool,
}

impl HyperFlags {
    pub fn either(self, other: HyperFlags) -> HyperFlags {
        HyperFlags {
            hyper_author: self.hyper_author || other.hyper_author,
            hyper_institute: self.hyper_institute || other.hyper_institute,
        }
    }
}

/// A publication with the normalized attributes used by the scoring rules.
#[derive(Debug, Clone)]
pub struct Publication {
    pub record: PublicationRecord,
    pub source: String,
    pub categories: BTreeSet<String>,
    pub grants: BTreeSet<String>,
    pub affiliations: Vec<Affiliation>,
    /// Name-block key of each author, in byline order.
    pub author_blocks: Vec<BlockKey>,
    pub flags: HyperFlags,
}

impl Publication {
    pub fn id(&self) -> &str {
        &self.record.pub_id
    }

    pub fn year(&self) -> i32 {
        self.record.year
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PacId {
    pub pub_id: String,
    pub position: u32,
}

impl PacId {
    pub fn new(pub_id: impl Into<String>, position: u32) -> Self {
        PacId {
            pub_id: pub_id.into(),
            position,
        }
    }
}

impl fmt::Display for PacId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.pub_id, self.position)
    }
}

impl FromStr for PacId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (id, pos) = s
            .rsplit_once('#')
            .ok_or_else(|| format!("bad PAC id {s:?}"))?;
        let position = pos.parse().map_err(|_| format!("bad PAC position in {s:?}"))?;
        Ok(PacId::new(id, position))
    }
}

impl Serialize for PacId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PacId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Publication-author combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pac {
    pub id: PacId,
    pub pub_idx: usize,
    pub name: NormalizedName,
    pub email: String,
    pub linked_affiliations: Vec<Affiliation>,
    pub block: BlockKey,
}

impl Pac {
    /// "last, initials", the form used for cluster names.
    pub fn full_name(&self) -> String {
        format!("{}, {}", self.name.last, self.name.initials)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pubs: Vec<Publication>,
    by_id: HashMap<String, usize>,
    pacs: Vec<Pac>,
    pac_by_id: HashMap<PacId, usize>,
    options: NormalizeOptions,
}

impl Corpus {
    pub fn from_records(records: Vec<PublicationRecord>) -> Result<Corpus, CorpusError> {
        Self::from_records_with(records, NormalizeOptions::default())
    }

    pub fn from_records_with(
        records: Vec<PublicationRecord>,
        options: NormalizeOptions,
    ) -> Result<Corpus, CorpusError> {
        let mut by_id = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            let line = i + 1;
            if r.pub_id.is_empty() {
                return Err(CorpusError::Invalid {
                    line,
                    msg: "empty pub_id".into(),
                });
            }
            if by_id.insert(r.pub_id.clone(), i).is_some() {
                return Err(CorpusError::DuplicateId {
                    line,
                    id: r.pub_id.clone(),
                });
            }
        }

        let mut pubs = Vec::with_capacity(records.len());
        let mut pacs = Vec::new();
        for (pub_idx, mut record) in records.into_iter().enumerate() {
            let line = pub_idx + 1;
            let invalid = |msg: String| CorpusError::Invalid { line, msg };
            if record.year <= 0 {
                return Err(invalid(format!("year must be positive, got {}", record.year)));
            }
            for r in record.references.iter_mut() {
                if let RefKey::Pub(id) = r {
                    if !by_id.contains_key(id.as_str()) {
                        *r = RefKey::text(id);
                    }
                }
            }

            let affiliations: Vec<Affiliation> =
                record.affiliations.iter().map(|a| a.normalized(options)).collect();
            let mut positions = HashSet::new();
            let mut author_blocks = Vec::with_capacity(record.authors.len());
            for a in &record.authors {
                if a.position == 0 {
                    return Err(invalid("author position must be >= 1".into()));
                }
                if !positions.insert(a.position) {
                    return Err(invalid(format!("duplicate author position {}", a.position)));
                }
                if let Some(&bad) = a
                    .linked_affiliation_indices
                    .iter()
                    .find(|&&k| k >= affiliations.len())
                {
                    return Err(invalid(format!(
                        "author {} links affiliation {bad}, only {} present",
                        a.position,
                        affiliations.len()
                    )));
                }
                let name = normalize_name_with(options, &a.last_name, &a.first_name, &a.initials)
                    .map_err(|e| invalid(format!("author {}: {e}", a.position)))?;
                let block = block_key(&name)
                    .map_err(|e| invalid(format!("author {}: {e}", a.position)))?;
                author_blocks.push(block.clone());
                let mut linked: Vec<Affiliation> = a
                    .linked_affiliation_indices
                    .iter()
                    .map(|&k| affiliations[k].clone())
                    .collect();
                linked.dedup();
                let id = PacId::new(record.pub_id.clone(), a.position);
                pacs.push(Pac {
                    id,
                    pub_idx,
                    name,
                    email: normalize_email(&a.email),
                    linked_affiliations: linked,
                    block,
                });
            }

            let institutes: BTreeSet<String> = affiliations
                .iter()
                .map(|a| {
                    if a.org.is_empty() {
                        format!("{}|{}|{}", a.dept, a.city, a.country)
                    } else {
                        a.org.clone()
                    }
                })
                .filter(|k| k != "||")
                .collect();
            let flags = HyperFlags {
                hyper_author: record.authors.len() >= HYPER_AUTHOR_MIN,
                hyper_institute: institutes.len() >= HYPER_INSTITUTE_MIN,
            };
            pubs.push(Publication {
                source: normalize_text(&record.source_title, options),
                categories: record
                    .subject_categories
                    .iter()
                    .map(|c| normalize_text(c, options))
                    .filter(|c| !c.is_empty())
                    .collect(),
                grants: record
                    .grant_numbers
                    .iter()
                    .map(|g| normalize_key(g))
                    .filter(|g| !g.is_empty())
                    .collect(),
                affiliations,
                author_blocks,
                flags,
                record,
            });
        }

        let pac_by_id = pacs
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.clone(), i))
            .collect();
        Ok(Corpus {
            pubs,
            by_id,
            pacs,
            pac_by_id,
            options,
        })
    }

    pub fn publications(&self) -> &[Publication] {
        &self.pubs
    }

    pub fn publication(&self, pub_id: &str) -> Option<&Publication> {
        self.by_id.get(pub_id).map(|&i| &self.pubs[i])
    }

    pub fn pub_index(&self, pub_id: &str) -> Option<usize> {
        self.by_id.get(pub_id).copied()
    }

    pub fn pacs(&self) -> &[Pac] {
        &self.pacs
    }

    pub fn pac(&self, idx: usize) -> &Pac {
        &self.pacs[idx]
    }

    pub fn pac_index(&self, id: &PacId) -> Option<usize> {
        self.pac_by_id.get(id).copied()
    }

    pub fn publication_of(&self, pac: &Pac) -> &Publication {
        &self.pubs[pac.pub_idx]
    }

    pub fn options(&self) -> NormalizeOptions {
        self.options
    }

    pub fn is_empty(&self) -> bool {
        self.pubs.is_empty()
    }

    /// Writes the corpus back as publications JSONL.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<(), CorpusError> {
        for p in &self.pubs {
            let line = serde_json::to_string(&RecordLine::from(&p.record))
                .map_err(std::io::Error::other)?;
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

pub fn parse_record_line(text: &str, line: usize) -> Result<PublicationRecord, CorpusError> {
    serde_json::from_str::<RecordLine>(text)
        .map(PublicationRecord::from)
        .map_err(|e| CorpusError::Malformed {
            line,
            msg: e.to_string(),
        })
}

/// Reads publications JSONL. Blank lines are skipped; line numbers in
/// errors are 1-based physical lines.
pub fn parse_corpus<R: BufRead>(reader: R) -> Result<Corpus, CorpusError> {
    parse_corpus_with(reader, NormalizeOptions::default())
}

pub fn parse_corpus_with<R: BufRead>(
    reader: R,
    options: NormalizeOptions,
) -> Result<Corpus, CorpusError> {
    let mut records = Vec::new();
    let mut lines = Vec::new();
    for (i, text) in reader.lines().enumerate() {
        let text = text?;
        if text.trim().is_empty() {
            continue;
        }
        records.push(parse_record_line(&text, i + 1)?);
        lines.push(i + 1);
    }
    // Map record-index based line numbers back to physical lines.
    Corpus::from_records_with(records, options).map_err(|e| match e {
        CorpusError::DuplicateId { line, id } => CorpusError::DuplicateId {
            line: lines[line - 1],
            id,
        },
        CorpusError::Invalid { line, msg } => CorpusError::Invalid {
            line: lines[line - 1],
            msg,
        },
        other => other,
    })
}
