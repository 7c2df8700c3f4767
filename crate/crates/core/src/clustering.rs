//! Candidate oeuvres from thresholded similarity graphs, the cross-block
//! email merge, and per-cluster metadata.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocking::{build_blocks, Block};
use crate::citation::CitationIndex;
use crate::corpus::{Corpus, PacId};
use crate::normalize::is_full_first_name;
use crate::scoring::{GeneralNames, ScoreBreakdown, Scorer, ScoringError, ThresholdPolicy};
use crate::union_find::DisjointSet;

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Metadata of a cluster; most and second most common values per field.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterMeta {
    pub n_pubs: usize,
    pub first_year: i32,
    pub last_year: i32,
    pub full_name: String,
    pub first_name: String,
    pub email: String,
    pub address_organization: String,
    pub address_city: String,
    pub address_country: String,
    pub alternative_full_name: String,
    pub alternative_first_name: String,
    pub alternative_email: String,
    pub alternative_address_organization: String,
    pub alternative_address_city: String,
    pub alternative_address_country: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub cluster_id: u64,
    pub pac_ids: Vec<PacId>,
    #[serde(flatten)]
    pub meta: ClusterMeta,
}

impl Cluster {
    pub fn pub_ids(&self) -> BTreeSet<&str> {
        self.pac_ids.iter().map(|p| p.pub_id.as_str()).collect()
    }

    pub fn overlaps_window(&self, y0: i32, y1: i32) -> bool {
        self.meta.first_year <= y1 && self.meta.last_year >= y0
    }
}

/// Undirected edges between block-local nodes whose score reaches the
/// threshold (or exceeds it in strict mode). `None` links nothing.
pub fn build_similarity_graph(
    scores: &[(usize, usize, i32)],
    threshold: Option<i32>,
    policy: ThresholdPolicy,
) -> Vec<(usize, usize)> {
    let Some(t) = threshold else {
        return Vec::new();
    };
    scores
        .iter()
        .filter(|&&(_, _, s)| policy.links(s, t))
        .map(|&(a, b, _)| (a.min(b), a.max(b)))
        .collect()
}

/// Single-linkage components over nodes `0..n`.
pub fn connected_components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut ds = DisjointSet::new(n);
    for &(a, b) in edges {
        ds.union(a, b);
    }
    ds.groups()
}

/// Groups item indices transitively whenever two items share a key.
/// Empty keys must be filtered by the caller.
pub fn merge_on_shared_keys<K: Eq + Hash>(keys: &[Vec<K>]) -> Vec<Vec<usize>> {
    let mut ds = DisjointSet::new(keys.len());
    let mut owner: HashMap<&K, usize> = HashMap::new();
    for (i, ks) in keys.iter().enumerate() {
        for k in ks {
            match owner.get(k) {
                Some(&j) => {
                    ds.union(i, j);
                }
                None => {
                    owner.insert(k, i);
                }
            }
        }
    }
    ds.groups()
}

/// Unions candidate oeuvres (lists of PAC indices) that share any non-empty
/// member email.
pub fn merge_by_email(corpus: &Corpus, oeuvres: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let emails: Vec<Vec<&str>> = oeuvres
        .iter()
        .map(|o| {
            o.iter()
                .map(|&i| corpus.pac(i).email.as_str())
                .filter(|e| !e.is_empty())
                .collect()
        })
        .collect();
    merge_on_shared_keys(&emails)
        .into_iter()
        .map(|group| group.into_iter().flat_map(|g| oeuvres[g].iter().copied()).collect())
        .collect()
}

/// Values by frequency descending, then lexicographically.
fn ranked<'a, I: IntoIterator<Item = &'a str>>(values: I) -> (String, String) {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for v in values {
        if !v.is_empty() {
            *counts.entry(v).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let mut it = ranked.into_iter().map(|(v, _)| v.to_string());
    (it.next().unwrap_or_default(), it.next().unwrap_or_default())
}

pub fn compute_cluster_meta(members: &[usize], corpus: &Corpus) -> ClusterMeta {
    let pacs: Vec<_> = members.iter().map(|&i| corpus.pac(i)).collect();
    let pubs: BTreeSet<usize> = pacs.iter().map(|p| p.pub_idx).collect();
    let years: Vec<i32> = pubs.iter().map(|&i| corpus.publications()[i].year()).collect();
    let full_names: Vec<String> = pacs.iter().map(|p| p.full_name()).collect();
    let (full_name, alternative_full_name) = ranked(full_names.iter().map(String::as_str));
    let (first_name, alternative_first_name) = ranked(
        pacs.iter()
            .filter(|p| is_full_first_name(&p.name.first, &p.name.initials))
            .map(|p| p.name.first.as_str()),
    );
    let (email, alternative_email) = ranked(pacs.iter().map(|p| p.email.as_str()));
    let affs = || pacs.iter().flat_map(|p| p.linked_affiliations.iter());
    let (address_organization, alternative_address_organization) =
        ranked(affs().map(|a| a.org.as_str()));
    let (address_city, alternative_address_city) = ranked(affs().map(|a| a.city.as_str()));
    let (address_country, alternative_address_country) =
        ranked(affs().map(|a| a.country.as_str()));
    ClusterMeta {
        n_pubs: pubs.len(),
        first_year: years.iter().copied().min().unwrap_or_default(),
        last_year: years.iter().copied().max().unwrap_or_default(),
        full_name,
        first_name,
        email,
        address_organization,
        address_city,
        address_country,
        alternative_full_name,
        alternative_first_name,
        alternative_email,
        alternative_address_organization,
        alternative_address_city,
        alternative_address_country,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub threshold: ThresholdPolicy,
    /// Keep every scored pair for the score-trace dump.
    pub trace: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    pub pac_a: PacId,
    pub pac_b: PacId,
    #[serde(flatten)]
    pub score: ScoreBreakdown,
}

#[derive(Debug, Clone)]
pub struct ClusterRun {
    pub blocks: Vec<Block>,
    pub clusters: Vec<Cluster>,
    pub trace: Vec<TraceRow>,
}

/// Candidate oeuvres of one block as corpus PAC indices. Pairs on the same
/// publication are never linked directly.
pub fn cluster_block(
    block: &Block,
    scorer: &Scorer<'_>,
    config: &ClusterConfig,
) -> Result<(Vec<Vec<usize>>, Vec<TraceRow>), ClusterError> {
    let threshold = config.threshold.threshold(block.size())?;
    let mut scores = Vec::new();
    let mut trace = Vec::new();
    if threshold.is_some() || config.trace {
        for i in 0..block.pacs.len() {
            for j in i + 1..block.pacs.len() {
                let (a, b) = (block.pacs[i], block.pacs[j]);
                if scorer.corpus.pac(a).pub_idx == scorer.corpus.pac(b).pub_idx {
                    continue;
                }
                let s = scorer.score(a, b)?;
                if config.trace {
                    trace.push(TraceRow {
                        pac_a: scorer.corpus.pac(a).id.clone(),
                        pac_b: scorer.corpus.pac(b).id.clone(),
                        score: s,
                    });
                }
                scores.push((i, j, s.total));
            }
        }
    }
    let edges = build_similarity_graph(&scores, threshold, config.threshold);
    let components = connected_components(block.size(), &edges)
        .into_iter()
        .map(|c| c.into_iter().map(|local| block.pacs[local]).collect())
        .collect();
    Ok((components, trace))
}

/// Full clustering pass: blocks, pair scores, components, email merge and
/// metadata. `threads == 0` uses the global worker pool. Output does not
/// depend on the number of workers.
pub fn cluster_corpus(
    corpus: &Corpus,
    index: &CitationIndex,
    general: &GeneralNames,
    config: &ClusterConfig,
    threads: usize,
) -> Result<ClusterRun, ClusterError> {
    let blocks = build_blocks(corpus);
    let scorer = Scorer::new(corpus, index, general);
    let work = || -> Result<Vec<_>, ClusterError> {
        blocks
            .par_iter()
            .map(|b| cluster_block(b, &scorer, config))
            .collect()
    };
    let per_block = if threads == 0 {
        work()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| ClusterError::Pool(e.to_string()))?
            .install(work)?
    };

    let mut oeuvres = Vec::new();
    let mut trace = Vec::new();
    for (components, rows) in per_block {
        oeuvres.extend(components);
        trace.extend(rows);
    }
    let mut merged = merge_by_email(corpus, oeuvres);
    for m in merged.iter_mut() {
        m.sort_by(|&a, &b| corpus.pac(a).id.cmp(&corpus.pac(b).id));
    }
    merged.sort_by(|a, b| corpus.pac(a[0]).id.cmp(&corpus.pac(b[0]).id));

    let mut seen = vec![false; corpus.pacs().len()];
    for &i in merged.iter().flatten() {
        if std::mem::replace(&mut seen[i], true) {
            return Err(ClusterError::Invariant(format!(
                "PAC {} assigned to two clusters",
                corpus.pac(i).id
            )));
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(ClusterError::Invariant(format!(
            "PAC {} not assigned to any cluster",
            corpus.pac(i).id
        )));
    }

    let clusters = merged
        .iter()
        .enumerate()
        .map(|(k, members)| Cluster {
            cluster_id: k as u64 + 1,
            pac_ids: members.iter().map(|&i| corpus.pac(i).id.clone()).collect(),
            meta: compute_cluster_meta(members, corpus),
        })
        .collect();
    Ok(ClusterRun {
        blocks,
        clusters,
        trace,
    })
}

pub fn write_jsonl<W: Write, T: Serialize>(items: &[T], mut w: W) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_clusters_jsonl<R: BufRead>(reader: R) -> Result<Vec<Cluster>, ClusterError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| ClusterError::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?);
    }
    Ok(out)
}
