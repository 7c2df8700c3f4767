//! Surname/initial query patterns for a roster researcher.

use std::fmt;

use super::RosterEntry;
use crate::normalize::{fold, NormalizeOptions};

/// Matches cluster names `last, initials...` whose surname equals `last`
/// and whose initials start with `initial`. Rendered as `last, i%`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NamePattern {
    pub last: String,
    pub initial: char,
}

impl fmt::Display for NamePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}%", self.last, self.initial)
    }
}

/// Splits a cluster `full_name` into surname and initials.
pub fn split_full_name(full_name: &str) -> (&str, &str) {
    full_name.split_once(", ").unwrap_or((full_name, ""))
}

impl NamePattern {
    pub fn matches(&self, full_name: &str) -> bool {
        let (last, initials) = split_full_name(full_name);
        last == self.last && initials.starts_with(self.initial)
    }
}

fn surname_parts(raw: &str) -> Vec<String> {
    fold(raw, NormalizeOptions::default())
        .split(|c: char| c.is_whitespace() || c == '-')
        .map(|p| p.chars().filter(|c| c.is_alphabetic()).collect::<String>())
        .filter(|p| !p.is_empty())
        .collect()
}

/// Each surname part alone, then (for compound surnames) the concatenated,
/// space-joined and hyphen-joined full forms.
pub fn name_variants(entry: &RosterEntry) -> Vec<NamePattern> {
    let parts = surname_parts(&entry.last_name);
    let Some(initial) = fold(&entry.first_name, NormalizeOptions::default())
        .chars()
        .find(|c| c.is_alphabetic())
    else {
        return Vec::new();
    };
    let mut lasts = parts.clone();
    if parts.len() > 1 {
        lasts.push(parts.concat());
        lasts.push(parts.join(" "));
        lasts.push(parts.join("-"));
    }
    lasts
        .into_iter()
        .map(|last| NamePattern { last, initial })
        .collect()
}
