//! Manual review decisions for scenario 3.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Assignment, DropReason, PortfolioError, Scenario, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewDecision {
    pub person_id: String,
    pub cluster_id: u64,
    pub verdict: Verdict,
    #[serde(default)]
    pub reviewer: String,
    #[serde(default)]
    pub ts: String,
}

impl ReviewDecision {
    fn key(&self) -> (String, u64) {
        (self.person_id.clone(), self.cluster_id)
    }
}

/// Append-only set of decisions; the first decision on a pair is final.
#[derive(Debug, Clone, Default)]
pub struct DecisionLog {
    entries: Vec<ReviewDecision>,
    index: HashMap<(String, u64), usize>,
}

impl DecisionLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Replays a JSONL log. A second decision on the same pair is an error,
    /// never an overwrite.
    pub fn load<R: BufRead>(reader: R) -> Result<Self, PortfolioError> {
        let mut log = DecisionLog::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let d: ReviewDecision =
                serde_json::from_str(&line).map_err(|e| PortfolioError::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                })?;
            log.insert(d)?;
        }
        Ok(log)
    }

    pub fn insert(&mut self, d: ReviewDecision) -> Result<(), PortfolioError> {
        if self.index.contains_key(&d.key()) {
            return Err(PortfolioError::DuplicateDecision {
                person_id: d.person_id,
                cluster_id: d.cluster_id,
            });
        }
        self.index.insert(d.key(), self.entries.len());
        self.entries.push(d);
        Ok(())
    }

    pub fn get(&self, person_id: &str, cluster_id: u64) -> Option<&ReviewDecision> {
        self.index
            .get(&(person_id.to_string(), cluster_id))
            .map(|&i| &self.entries[i])
    }

    pub fn entries(&self) -> &[ReviewDecision] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Writes one decision as a JSONL line.
pub fn append_decision<W: Write>(d: &ReviewDecision, mut w: W) -> std::io::Result<()> {
    serde_json::to_writer(&mut w, d)?;
    w.write_all(b"\n")?;
    w.flush()
}

/// Scenario 3: live candidates become kept on accept, dropped on reject and
/// pending otherwise. Rows the window already dropped pass through. A
/// decision on a pair that is not a live candidate is an error.
pub fn apply_decisions(
    candidates: &[Assignment],
    log: &DecisionLog,
) -> Result<Vec<Assignment>, PortfolioError> {
    let live: HashSet<(&str, u64)> = candidates
        .iter()
        .filter(|c| c.status == Status::Candidate)
        .map(|c| (c.person_id.as_str(), c.cluster_id))
        .collect();
    if let Some(d) = log
        .entries()
        .iter()
        .find(|d| !live.contains(&(d.person_id.as_str(), d.cluster_id)))
    {
        return Err(PortfolioError::UnknownPair {
            person_id: d.person_id.clone(),
            cluster_id: d.cluster_id,
        });
    }
    Ok(candidates
        .iter()
        .map(|c| {
            let status = match c.status {
                Status::Candidate => match log.get(&c.person_id, c.cluster_id) {
                    Some(d) if d.verdict == Verdict::Accept => Status::Kept,
                    Some(_) => Status::Dropped(DropReason::Rejected),
                    None => Status::Pending,
                },
                other => other,
            };
            Assignment {
                scenario: Scenario::S3,
                status,
                ..c.clone()
            }
        })
        .collect())
}

/// Refuses scenario 3 output while any row is pending.
pub fn finalize(rows: Vec<Assignment>) -> Result<Vec<Assignment>, PortfolioError> {
    match rows.iter().filter(|r| r.status == Status::Pending).count() {
        0 => Ok(rows),
        n => Err(PortfolioError::Pending(n)),
    }
}
