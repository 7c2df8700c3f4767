//! Name-only attribution baselines.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{Authorship, RosterEntry, Window};
use crate::blocking::block_key;
use crate::corpus::Corpus;
use crate::normalize::{is_full_first_name, normalize_name_with};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineMode {
    /// Last name and first initial.
    Initials,
    /// Last name and full first name.
    Fullname,
}

/// Every in-window mention whose normalized name matches the roster entry
/// under `mode`. Mentions without a full first name never match `Fullname`.
pub fn baseline_assign(
    mode: BaselineMode,
    roster: &[RosterEntry],
    corpus: &Corpus,
    window: Window,
) -> BTreeSet<Authorship> {
    let mut by_block: HashMap<_, Vec<(&str, String)>> = HashMap::new();
    for e in roster {
        let Ok(name) = normalize_name_with(corpus.options(), &e.last_name, &e.first_name, "") else {
            continue;
        };
        let Ok(key) = block_key(&name) else {
            continue;
        };
        by_block
            .entry(key)
            .or_default()
            .push((e.person_id.as_str(), name.first));
    }
    let mut out = BTreeSet::new();
    for pac in corpus.pacs() {
        let Some(persons) = by_block.get(&pac.block) else {
            continue;
        };
        let publication = corpus.publication_of(pac);
        if !window.contains(publication.year()) {
            continue;
        }
        for (person_id, first) in persons {
            let hit = match mode {
                BaselineMode::Initials => true,
                BaselineMode::Fullname => {
                    is_full_first_name(&pac.name.first, &pac.name.initials)
                        && pac.name.first == *first
                }
            };
            if hit {
                out.insert(Authorship {
                    person_id: person_id.to_string(),
                    pub_id: publication.id().to_string(),
                });
            }
        }
    }
    out
}
