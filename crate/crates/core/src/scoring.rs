//! Pairwise evidence scores between PACs of one name block.
//!
//! The rule set awards points for matching author data (email, initials,
//! first name, linked affiliation), publication data (shared co-authors,
//! grants, publication affiliations), source data (journal, subject
//! category) and citation relations (direct citation, bibliographic
//! coupling, co-citation). Co-author, publication-affiliation and direct
//! citation evidence is dampened for hyper-authorship and
//! hyper-instituteship publications.
//!
//! Tiered rules award only their best tier. Journal and subject category
//! are exclusive, journal first.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocking::BlockKey;
use crate::citation::CitationIndex;
use crate::corpus::{Affiliation, Corpus, HyperFlags, Pac, Publication};
use crate::normalize::{is_full_first_name, normalize_text};

pub const EMAIL: i32 = 100;
pub const INITIALS_TWO: i32 = 5;
pub const INITIALS_MORE: i32 = 10;
pub const INITIALS_CONFLICT: i32 = -10;
pub const FIRST_NAME_GENERAL: i32 = 3;
pub const FIRST_NAME_OTHER: i32 = 6;
/// Linked affiliation: country+city, +organization, +department.
pub const LINKED_AFFILIATION: [i32; 4] = [0, 4, 7, 10];
/// Shared co-authors: none, one, two, more than two.
pub const SHARED_COAUTHORS: [i32; 4] = [0, 4, 7, 10];
pub const SHARED_COAUTHORS_HYPER: [i32; 4] = [0, 2, 4, 5];
pub const GRANT: i32 = 10;
pub const UNLINKED_AFFILIATION: [i32; 4] = [0, 2, 5, 8];
pub const UNLINKED_AFFILIATION_HYPER: [i32; 4] = [0, 1, 3, 4];
pub const SUBJECT_CATEGORY: i32 = 3;
pub const JOURNAL: i32 = 6;
pub const SELF_CITATION: i32 = 10;
pub const SELF_CITATION_HYPER: i32 = 5;
/// Indexed by shared reference count, saturating at "more than four".
pub const BIB_COUPLING: [i32; 6] = [0, 2, 4, 6, 8, 10];
pub const CO_CITATION: [i32; 6] = [0, 2, 3, 4, 5, 6];

/// First names appearing in more than this many blocks count as general.
pub const DEFAULT_GENERAL_NAME_BLOCKS: usize = 25;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScoringError {
    #[error("PACs {a} and {b} belong to different name blocks")]
    CrossBlock { a: String, b: String },
    #[error("PACs {a} and {b} are on the same publication")]
    SamePublication { a: String, b: String },
    #[error("block size must be at least 1")]
    EmptyBlock,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub email: i32,
    pub initials: i32,
    pub first_name: i32,
    pub linked_affiliation: i32,
    pub shared_coauthors: i32,
    pub grant: i32,
    pub unlinked_affiliation: i32,
    pub subject_category: i32,
    pub journal: i32,
    pub self_citation: i32,
    pub bib_coupling: i32,
    pub co_citation: i32,
    pub total: i32,
}

impl ScoreBreakdown {
    pub fn components(&self) -> [(&'static str, i32); 12] {
        [
            ("email", self.email),
            ("initials", self.initials),
            ("first_name", self.first_name),
            ("linked_affiliation", self.linked_affiliation),
            ("shared_coauthors", self.shared_coauthors),
            ("grant", self.grant),
            ("unlinked_affiliation", self.unlinked_affiliation),
            ("subject_category", self.subject_category),
            ("journal", self.journal),
            ("self_citation", self.self_citation),
            ("bib_coupling", self.bib_coupling),
            ("co_citation", self.co_citation),
        ]
    }

    pub fn component_sum(&self) -> i32 {
        self.components().iter().map(|(_, v)| v).sum()
    }

    fn with_total(mut self) -> Self {
        self.total = self.component_sum();
        self
    }

    /// Adds the components of `other`; both sides are partial breakdowns
    /// with disjoint non-zero components.
    pub fn combine(self, other: ScoreBreakdown) -> ScoreBreakdown {
        ScoreBreakdown {
            email: self.email + other.email,
            initials: self.initials + other.initials,
            first_name: self.first_name + other.first_name,
            linked_affiliation: self.linked_affiliation + other.linked_affiliation,
            shared_coauthors: self.shared_coauthors + other.shared_coauthors,
            grant: self.grant + other.grant,
            unlinked_affiliation: self.unlinked_affiliation + other.unlinked_affiliation,
            subject_category: self.subject_category + other.subject_category,
            journal: self.journal + other.journal,
            self_citation: self.self_citation + other.self_citation,
            bib_coupling: self.bib_coupling + other.bib_coupling,
            co_citation: self.co_citation + other.co_citation,
            total: 0,
        }
        .with_total()
    }
}

/// First names treated as general (common) for the first-name rule.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeneralNames(HashSet<String>);

impl GeneralNames {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        GeneralNames(
            names
                .into_iter()
                .map(|n| normalize_text(n.as_ref(), Default::default()))
                .filter(|n| !n.is_empty())
                .collect(),
        )
    }

    /// One name per line; blank lines and `#` comments ignored.
    pub fn from_list<R: BufRead>(reader: R) -> std::io::Result<Self> {
        let mut names = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('#') {
                names.push(t.to_string());
            }
        }
        Ok(Self::new(names))
    }

    /// Full first names that occur in more than `max_blocks` distinct blocks.
    pub fn from_corpus(corpus: &Corpus, max_blocks: usize) -> Self {
        let mut spread: HashMap<&str, HashSet<&BlockKey>> = HashMap::new();
        for pac in corpus.pacs() {
            if is_full_first_name(&pac.name.first, &pac.name.initials) {
                spread.entry(&pac.name.first).or_default().insert(&pac.block);
            }
        }
        GeneralNames(
            spread
                .into_iter()
                .filter(|(_, blocks)| blocks.len() > max_blocks)
                .map(|(n, _)| n.to_string())
                .collect(),
        )
    }

    pub fn contains(&self, first: &str) -> bool {
        self.0.contains(first)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// 0 none, 1 country+city, 2 +organization, 3 +department.
pub fn affiliation_tier(a: &Affiliation, b: &Affiliation) -> usize {
    if a.country.is_empty() || a.city.is_empty() || a.country != b.country || a.city != b.city {
        return 0;
    }
    if a.org.is_empty() || a.org != b.org {
        return 1;
    }
    if a.dept.is_empty() || a.dept != b.dept {
        return 2;
    }
    3
}

fn best_tier(a: &[Affiliation], b: &[Affiliation]) -> usize {
    let mut best = 0;
    for x in a {
        for y in b {
            best = best.max(affiliation_tier(x, y));
            if best == 3 {
                return best;
            }
        }
    }
    best
}

fn initials_score(a: &str, b: &str) -> i32 {
    let (la, lb) = (a.chars().count(), b.chars().count());
    if la < 2 || lb < 2 {
        return 0;
    }
    if a == b {
        return if la == 2 { INITIALS_TWO } else { INITIALS_MORE };
    }
    if a.chars().zip(b.chars()).skip(1).any(|(x, y)| x != y) {
        INITIALS_CONFLICT
    } else {
        0
    }
}

pub fn score_author_data(a: &Pac, b: &Pac, general: &GeneralNames) -> ScoreBreakdown {
    let email = if !a.email.is_empty() && a.email == b.email {
        EMAIL
    } else {
        0
    };
    let first_name = if a.name.first == b.name.first
        && is_full_first_name(&a.name.first, &a.name.initials)
        && is_full_first_name(&b.name.first, &b.name.initials)
    {
        if general.contains(&a.name.first) {
            FIRST_NAME_GENERAL
        } else {
            FIRST_NAME_OTHER
        }
    } else {
        0
    };
    ScoreBreakdown {
        email,
        initials: initials_score(&a.name.initials, &b.name.initials),
        first_name,
        linked_affiliation: LINKED_AFFILIATION
            [best_tier(&a.linked_affiliations, &b.linked_affiliations)],
        ..Default::default()
    }
    .with_total()
}

/// `focal` is the name block of the pair; its key never counts as a shared
/// co-author. `flags` should be the either-side combination of both
/// publications' hyper flags.
pub fn score_publication_data<'a>(
    a: &'a Publication,
    b: &'a Publication,
    focal: &BlockKey,
    flags: HyperFlags,
) -> ScoreBreakdown {
    let coauthors = |p: &'a Publication| -> BTreeSet<&'a BlockKey> {
        p.author_blocks.iter().filter(|k| *k != focal).collect()
    };
    let (ca, cb) = (coauthors(a), coauthors(b));
    let shared = ca.intersection(&cb).count().min(3);
    let coauthor_table = if flags.hyper_author {
        &SHARED_COAUTHORS_HYPER
    } else {
        &SHARED_COAUTHORS
    };
    let affiliation_table = if flags.hyper_institute {
        &UNLINKED_AFFILIATION_HYPER
    } else {
        &UNLINKED_AFFILIATION
    };
    ScoreBreakdown {
        shared_coauthors: coauthor_table[shared],
        grant: if a.grants.is_disjoint(&b.grants) { 0 } else { GRANT },
        unlinked_affiliation: affiliation_table[best_tier(&a.affiliations, &b.affiliations)],
        ..Default::default()
    }
    .with_total()
}

pub fn score_source_data(a: &Publication, b: &Publication) -> ScoreBreakdown {
    let mut s = ScoreBreakdown::default();
    if !a.source.is_empty() && a.source == b.source {
        s.journal = JOURNAL;
    } else if !a.categories.is_disjoint(&b.categories) {
        s.subject_category = SUBJECT_CATEGORY;
    }
    s.with_total()
}

pub fn score_citation_data(
    a: &Publication,
    b: &Publication,
    index: &CitationIndex,
    flags: HyperFlags,
) -> ScoreBreakdown {
    let direct = index.cites(a.id(), b.id()) || index.cites(b.id(), a.id());
    let self_citation = match (direct, flags.hyper_author) {
        (false, _) => 0,
        (true, false) => SELF_CITATION,
        (true, true) => SELF_CITATION_HYPER,
    };
    ScoreBreakdown {
        self_citation,
        bib_coupling: BIB_COUPLING[index.shared_references(a.id(), b.id()).min(5)],
        co_citation: CO_CITATION[index.co_citations(a.id(), b.id()).min(5)],
        ..Default::default()
    }
    .with_total()
}

/// Everything needed to score pairs of one corpus.
#[derive(Debug, Clone, Copy)]
pub struct Scorer<'a> {
    pub corpus: &'a Corpus,
    pub index: &'a CitationIndex,
    pub general: &'a GeneralNames,
}

impl<'a> Scorer<'a> {
    pub fn new(corpus: &'a Corpus, index: &'a CitationIndex, general: &'a GeneralNames) -> Self {
        Scorer {
            corpus,
            index,
            general,
        }
    }

    /// Scores two PACs by corpus index.
    pub fn score(&self, a: usize, b: usize) -> Result<ScoreBreakdown, ScoringError> {
        score_pair(
            self.corpus.pac(a),
            self.corpus.pac(b),
            self.corpus,
            self.index,
            self.general,
        )
    }
}

pub fn score_pair(
    pac_a: &Pac,
    pac_b: &Pac,
    corpus: &Corpus,
    index: &CitationIndex,
    general: &GeneralNames,
) -> Result<ScoreBreakdown, ScoringError> {
    if pac_a.block != pac_b.block {
        return Err(ScoringError::CrossBlock {
            a: pac_a.id.to_string(),
            b: pac_b.id.to_string(),
        });
    }
    if pac_a.pub_idx == pac_b.pub_idx {
        return Err(ScoringError::SamePublication {
            a: pac_a.id.to_string(),
            b: pac_b.id.to_string(),
        });
    }
    let pa = corpus.publication_of(pac_a);
    let pb = corpus.publication_of(pac_b);
    let flags = pa.flags.either(pb.flags);
    Ok(score_author_data(pac_a, pac_b, general)
        .combine(score_publication_data(pa, pb, &pac_a.block, flags))
        .combine(score_source_data(pa, pb))
        .combine(score_citation_data(pa, pb, index, flags)))
}

/// Minimum score for a block of `block_size` PACs; `None` means no pairing
/// (singleton blocks).
pub fn threshold_for(block_size: usize) -> Result<Option<i32>, ScoringError> {
    Ok(Some(match block_size {
        0 => return Err(ScoringError::EmptyBlock),
        1 => return Ok(None),
        2..=500 => 11,
        501..=1500 => 13,
        1501..=7000 => 17,
        7001..=22500 => 21,
        _ => 90,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    /// Block-size dependent thresholds.
    #[default]
    BySize,
    Fixed(i32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ThresholdPolicy {
    pub mode: ThresholdMode,
    /// Require the score to exceed the threshold instead of reaching it.
    pub strict: bool,
}

impl ThresholdPolicy {
    pub fn threshold(&self, block_size: usize) -> Result<Option<i32>, ScoringError> {
        let base = threshold_for(block_size)?;
        Ok(match self.mode {
            ThresholdMode::BySize => base,
            ThresholdMode::Fixed(n) => base.map(|_| n),
        })
    }

    pub fn links(&self, score: i32, threshold: i32) -> bool {
        if self.strict {
            score > threshold
        } else {
            score >= threshold
        }
    }
}
