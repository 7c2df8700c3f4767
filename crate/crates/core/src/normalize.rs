//! String normalization for author names, emails, affiliations and keys.
//!
//! Names are lowercased, diacritics are folded (configurable) and every
//! non-letter character is dropped. Last names keep their internal spaces
//! and hyphens so that surname variants can still be generated from them;
//! the blocking key removes those separators later.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NameError {
    #[error("unnamed mention")]
    Unnamed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizeOptions {
    pub fold_diacritics: bool,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        Self {
            fold_diacritics: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalizedName {
    pub last: String,
    pub first: String,
    pub initials: String,
}

/// Letters that do not decompose under NFD.
fn fold_special(c: char, out: &mut String) -> bool {
    let rep = match c {
        'ß' => "ss",
        'æ' => "ae",
        'œ' => "oe",
        'ø' => "o",
        'ł' => "l",
        'đ' | 'ð' => "d",
        'þ' => "th",
        'ı' => "i",
        _ => return false,
    };
    out.push_str(rep);
    true
}

/// Lowercase and, when enabled, strip accents.
pub fn fold(s: &str, opts: NormalizeOptions) -> String {
    let lower = s.to_lowercase();
    if !opts.fold_diacritics {
        return lower;
    }
    let mut out = String::with_capacity(lower.len());
    for c in lower.nfd() {
        if is_combining_mark(c) {
            continue;
        }
        if !fold_special(c, &mut out) {
            out.push(c);
        }
    }
    out
}

/// Keeps letters; separator runs collapse to a single `-` if they contain a
/// hyphen, otherwise to a single space. Everything else is dropped.
fn clean_last(folded: &str) -> String {
    let mut out = String::with_capacity(folded.len());
    let mut pending: Option<char> = None;
    for c in folded.chars() {
        if c.is_alphabetic() {
            if let Some(sep) = pending.take() {
                if !out.is_empty() {
                    out.push(sep);
                }
            }
            out.push(c);
        } else if c == '-' || c == '\u{2010}' || c == '\u{2011}' {
            pending = Some('-');
        } else if c.is_whitespace() && pending.is_none() {
            pending = Some(' ');
        }
    }
    out
}

/// Keeps letters and single spaces between words.
fn clean_first(folded: &str) -> String {
    folded
        .split_whitespace()
        .map(|w| w.chars().filter(|c| c.is_alphabetic()).collect::<String>())
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// First letter of every letter run, e.g. "J.-P." gives "jp".
fn derive_initials(folded: &str) -> String {
    let mut out = String::new();
    let mut in_word = false;
    for c in folded.chars() {
        if c.is_alphabetic() {
            if !in_word {
                out.push(c);
            }
            in_word = true;
        } else {
            in_word = false;
        }
    }
    out
}

pub fn normalize_name(
    raw_last: &str,
    raw_first: &str,
    raw_initials: &str,
) -> Result<NormalizedName, NameError> {
    normalize_name_with(NormalizeOptions::default(), raw_last, raw_first, raw_initials)
}

/// Initials come from whichever of the initials field and the first-name
/// tokens yields more letters; the explicit field wins ties.
pub fn normalize_name_with(
    opts: NormalizeOptions,
    raw_last: &str,
    raw_first: &str,
    raw_initials: &str,
) -> Result<NormalizedName, NameError> {
    let last = clean_last(&fold(raw_last, opts));
    let folded_first = fold(raw_first, opts);
    let first = clean_first(&folded_first);
    let given: String = fold(raw_initials, opts)
        .chars()
        .filter(|c| c.is_alphabetic())
        .collect();
    let derived = derive_initials(&folded_first);
    let initials = if given.chars().count() >= derived.chars().count() {
        given
    } else {
        derived
    };
    if last.is_empty() && first.is_empty() && initials.is_empty() {
        return Err(NameError::Unnamed);
    }
    Ok(NormalizedName {
        last,
        first,
        initials,
    })
}

pub fn normalize_email(raw: &str) -> String {
    raw.trim().to_lowercase()
}

/// Free text (organizations, cities, titles): folded, punctuation replaced
/// by spaces, whitespace collapsed.
pub fn normalize_text(raw: &str, opts: NormalizeOptions) -> String {
    fold(raw, opts)
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Compact key: folded alphanumerics only.
pub fn normalize_key(raw: &str) -> String {
    fold(raw, NormalizeOptions::default())
        .chars()
        .filter(|c| c.is_alphanumeric())
        .collect()
}

/// A name is "full" when it carries more than its initials.
pub fn is_full_first_name(first: &str, initials: &str) -> bool {
    let compact: String = first.chars().filter(|c| !c.is_whitespace()).collect();
    !compact.is_empty() && compact != initials && first.split_whitespace().any(|w| w.chars().count() > 1)
}
