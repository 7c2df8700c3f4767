//! Author name blocks: all PACs sharing a last name and first initial.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, PacId};
use crate::normalize::NormalizedName;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlockingError {
    #[error("mention has neither initials nor a first name")]
    NoInitial,
    #[error("mention has no last name")]
    NoSurname,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockKey {
    /// Surname with spaces and hyphens removed.
    pub last: String,
    pub first_initial: char,
}

impl fmt::Display for BlockKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}", self.last, self.first_initial)
    }
}

/// Middle initials never influence the key.
pub fn block_key(name: &NormalizedName) -> Result<BlockKey, BlockingError> {
    let last: String = name.last.chars().filter(|c| c.is_alphabetic()).collect();
    if last.is_empty() {
        return Err(BlockingError::NoSurname);
    }
    let first_initial = name
        .initials
        .chars()
        .next()
        .or_else(|| name.first.chars().next())
        .ok_or(BlockingError::NoInitial)?;
    Ok(BlockKey {
        last,
        first_initial,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub key: BlockKey,
    /// Indices into [`Corpus::pacs`], ascending.
    pub pacs: Vec<usize>,
}

impl Block {
    pub fn size(&self) -> usize {
        self.pacs.len()
    }
}

/// Partitions the corpus PACs into blocks, ordered by key.
pub fn build_blocks(corpus: &Corpus) -> Vec<Block> {
    let mut map: BTreeMap<&BlockKey, Vec<usize>> = BTreeMap::new();
    for (i, pac) in corpus.pacs().iter().enumerate() {
        map.entry(&pac.block).or_default().push(i);
    }
    map.into_iter()
        .map(|(key, pacs)| Block {
            key: key.clone(),
            pacs,
        })
        .collect()
}

#[derive(Serialize)]
struct BlockLine<'a> {
    last: &'a str,
    initial: String,
    size: usize,
    pac_ids: Vec<&'a PacId>,
}

pub fn write_blocks_jsonl<W: Write>(
    blocks: &[Block],
    corpus: &Corpus,
    mut w: W,
) -> std::io::Result<()> {
    for b in blocks {
        let line = BlockLine {
            last: &b.key.last,
            initial: b.key.first_initial.to_string(),
            size: b.size(),
            pac_ids: b.pacs.iter().map(|&i| &corpus.pac(i).id).collect(),
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AuthorMentionRaw, PublicationRecord};
    use crate::normalize::normalize_name;

    fn key(l: &str, f: &str, i: &str) -> BlockKey {
        block_key(&normalize_name(l, f, i).unwrap()).unwrap()
    }

    #[test]
    fn grosso_variants_share_a_block() {
        let k = BlockKey {
            last: "grosso".into(),
            first_initial: 'a',
        };
        assert_eq!(key("Grosso", "Andrea Cesare", ""), k);
        assert_eq!(key("Grosso", "Andrea", ""), k);
        assert_eq!(key("Grosso", "Anna", ""), k);
        assert_eq!(k.to_string(), "grosso, a");
    }

    #[test]
    fn compound_surnames_concatenate() {
        assert_eq!(key("bernelli-zazzera", "", "f").last, "bernellizazzera");
        assert_eq!(key("Bernelli Zazzera", "Franco", "").last, "bernellizazzera");
    }

    #[test]
    fn middle_initials_do_not_matter() {
        assert_eq!(key("rossi", "", "f"), key("rossi", "", "fab"));
    }

    #[test]
    fn key_errors() {
        let nameless = NormalizedName {
            last: "rossi".into(),
            first: String::new(),
            initials: String::new(),
        };
        assert_eq!(block_key(&nameless), Err(BlockingError::NoInitial));
        let no_last = NormalizedName {
            last: String::new(),
            first: "anna".into(),
            initials: "a".into(),
        };
        assert_eq!(block_key(&no_last), Err(BlockingError::NoSurname));
    }

    fn corpus(names: &[(&str, &str)]) -> Corpus {
        let records = names
            .iter()
            .enumerate()
            .map(|(i, (l, f))| PublicationRecord {
                pub_id: format!("W{i}"),
                year: 2000,
                authors: vec![AuthorMentionRaw {
                    position: 1,
                    last_name: l.to_string(),
                    first_name: f.to_string(),
                    ..Default::default()
                }],
                ..Default::default()
            })
            .collect();
        Corpus::from_records(records).unwrap()
    }

    #[test]
    fn three_grossos_one_block() {
        let c = corpus(&[("Grosso", "Andrea Cesare"), ("Grosso", "Andrea"), ("Grosso", "Anna")]);
        let blocks = build_blocks(&c);
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].size(), 3);
    }

    #[test]
    fn distinct_keys_distinct_blocks() {
        let c = corpus(&[("rossi", "f"), ("russo", "a")]);
        assert_eq!(build_blocks(&c).len(), 2);
        assert!(build_blocks(&Corpus::default()).is_empty());
    }

    #[test]
    fn blocks_partition_pacs() {
        let c = corpus(&[("rossi", "f"), ("russo", "a"), ("rossi", "fa"), ("Rossi", "Fabio"), ("russo", "b")]);
        let blocks = build_blocks(&c);
        let mut all: Vec<usize> = blocks.iter().flat_map(|b| b.pacs.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..c.pacs().len()).collect::<Vec<_>>());
        let mut buf = Vec::new();
        write_blocks_jsonl(&blocks, &c, &mut buf).unwrap();
        let first = String::from_utf8(buf).unwrap();
        assert!(first.starts_with(r#"{"last":"rossi","initial":"f","size":3,"pac_ids":["W0#1","W2#1","W3#1"]}"#));
    }
}
