//! Citation links between publications: direct citation, bibliographic
//! coupling (shared references) and co-citation (shared citing documents).

use std::collections::{BTreeSet, HashMap};

use crate::corpus::{Corpus, RefKey};

#[derive(Debug, Clone, Default)]
pub struct CitationIndex {
    pub cites: HashMap<String, BTreeSet<RefKey>>,
    pub cited_by: HashMap<RefKey, BTreeSet<String>>,
}

static EMPTY_REFS: BTreeSet<RefKey> = BTreeSet::new();
static EMPTY_PUBS: BTreeSet<String> = BTreeSet::new();

fn intersection_len<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().filter(|x| large.contains(x)).count()
}

impl CitationIndex {
    pub fn references_of(&self, pub_id: &str) -> &BTreeSet<RefKey> {
        self.cites.get(pub_id).unwrap_or(&EMPTY_REFS)
    }

    pub fn citing(&self, key: &RefKey) -> &BTreeSet<String> {
        self.cited_by.get(key).unwrap_or(&EMPTY_PUBS)
    }

    /// Whether `citing` lists `cited` among its references.
    pub fn cites(&self, citing: &str, cited: &str) -> bool {
        self.references_of(citing)
            .contains(&RefKey::Pub(cited.to_string()))
    }

    /// Bibliographic coupling strength.
    pub fn shared_references(&self, a: &str, b: &str) -> usize {
        intersection_len(self.references_of(a), self.references_of(b))
    }

    /// Co-citation strength: documents citing both `a` and `b`.
    pub fn co_citations(&self, a: &str, b: &str) -> usize {
        intersection_len(
            self.citing(&RefKey::Pub(a.to_string())),
            self.citing(&RefKey::Pub(b.to_string())),
        )
    }
}

pub fn build_citation_index(corpus: &Corpus) -> CitationIndex {
    let mut index = CitationIndex::default();
    for p in corpus.publications() {
        let refs: BTreeSet<RefKey> = p.record.references.iter().cloned().collect();
        for r in &refs {
            index
                .cited_by
                .entry(r.clone())
                .or_default()
                .insert(p.id().to_string());
        }
        if !refs.is_empty() {
            index.cites.insert(p.id().to_string(), refs);
        }
    }
    index
}
