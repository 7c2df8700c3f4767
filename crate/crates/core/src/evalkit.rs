//! Precision, recall and F-measure of retrieved authorships against a gold
//! set, overall and per person.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::portfolio::Authorship;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub retrieved: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub relevant: u64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// Nothing retrieved and nothing relevant; scored as perfect.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub vacuous: bool,
}

impl Metrics {
    /// Builds metrics from the three counts; `relevant` follows as
    /// retrieved + FN - FP.
    ///
    /// # Panics
    /// If `false_positives > retrieved`.
    pub fn from_counts(retrieved: u64, false_positives: u64, false_negatives: u64) -> Metrics {
        assert!(false_positives <= retrieved, "more false positives than retrieved items");
        let tp = retrieved - false_positives;
        let relevant = tp + false_negatives;
        let ratio = |n: u64, d: u64| if d == 0 { 0.0 } else { n as f64 / d as f64 };
        let vacuous = retrieved == 0 && relevant == 0;
        let (precision, recall, f_measure) = if vacuous {
            (1.0, 1.0, 1.0)
        } else {
            // 2PR/(P+R) reduces to 2tp/(retrieved+relevant)
            (ratio(tp, retrieved), ratio(tp, relevant), ratio(2 * tp, retrieved + relevant))
        };
        Metrics {
            retrieved,
            false_positives,
            false_negatives,
            relevant,
            precision,
            recall,
            f_measure,
            vacuous,
        }
    }

    pub fn true_positives(&self) -> u64 {
        self.retrieved - self.false_positives
    }
}

/// A fraction as a percentage with one decimal, e.g. `96.1`.
pub fn percent(x: f64) -> String {
    format!("{:.1}", x * 100.0)
}

pub fn compare(gold: &BTreeSet<Authorship>, retrieved: &BTreeSet<Authorship>) -> Metrics {
    let fp = retrieved.difference(gold).count() as u64;
    let fn_ = gold.difference(retrieved).count() as u64;
    Metrics::from_counts(retrieved.len() as u64, fp, fn_)
}

pub const HISTOGRAM_BINS: [&str; 11] = [
    "0-10", "10-20", "20-30", "30-40", "40-50", "50-60", "60-70", "70-80", "80-90", "90-100", "100",
];

/// Histogram bin of an F-measure. Only an exact 100% lands in `100`; the
/// bin index is computed from the counts so ratios such as 0.7 never slip
/// into the bin below through rounding.
pub fn histogram_bin(m: &Metrics) -> &'static str {
    let tp = m.true_positives();
    let denom = m.retrieved + m.relevant;
    if m.vacuous || (denom > 0 && 2 * tp == denom) {
        return HISTOGRAM_BINS[10];
    }
    // F in percent is 200 tp / denom; tenths of the range are 20 tp / denom
    let idx = ((20 * tp) / denom).min(9) as usize;
    HISTOGRAM_BINS[idx]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    #[serde(flatten)]
    pub overall: Metrics,
    pub per_person: BTreeMap<String, Metrics>,
    pub histogram: BTreeMap<String, u64>,
}

fn by_person(set: &BTreeSet<Authorship>) -> BTreeMap<&str, BTreeSet<Authorship>> {
    let mut out: BTreeMap<&str, BTreeSet<Authorship>> = BTreeMap::new();
    for a in set {
        out.entry(a.person_id.as_str()).or_default().insert(a.clone());
    }
    out
}

/// Per-person metrics for every roster person and every person present in
/// either set, plus the histogram of their F-measures.
pub fn per_person<'a>(
    gold: &'a BTreeSet<Authorship>,
    retrieved: &'a BTreeSet<Authorship>,
    roster: impl IntoIterator<Item = &'a str>,
) -> (BTreeMap<String, Metrics>, BTreeMap<String, u64>) {
    let gold_by = by_person(gold);
    let ret_by = by_person(retrieved);
    let persons: BTreeSet<&str> = roster
        .into_iter()
        .chain(gold_by.keys().copied())
        .chain(ret_by.keys().copied())
        .collect();
    let empty = BTreeSet::new();
    let mut histogram: BTreeMap<String, u64> =
        HISTOGRAM_BINS.iter().map(|b| (b.to_string(), 0)).collect();
    let mut reports = BTreeMap::new();
    for p in persons {
        let m = compare(
            gold_by.get(p).unwrap_or(&empty),
            ret_by.get(p).unwrap_or(&empty),
        );
        *histogram.entry(histogram_bin(&m).to_string()).or_default() += 1;
        reports.insert(p.to_string(), m);
    }
    (reports, histogram)
}

pub fn evaluate<'a>(
    gold: &'a BTreeSet<Authorship>,
    retrieved: &'a BTreeSet<Authorship>,
    roster: impl IntoIterator<Item = &'a str>,
) -> EvaluationReport {
    let (per_person, histogram) = per_person(gold, retrieved, roster);
    EvaluationReport {
        overall: compare(gold, retrieved),
        per_person,
        histogram,
    }
}

pub fn write_per_person_csv<W: Write>(report: &EvaluationReport, w: W) -> Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "person_id",
        "retrieved",
        "false_positives",
        "false_negatives",
        "relevant",
        "precision",
        "recall",
        "f_measure",
        "vacuous",
    ])?;
    for (p, m) in &report.per_person {
        wtr.write_record([
            p.clone(),
            m.retrieved.to_string(),
            m.false_positives.to_string(),
            m.false_negatives.to_string(),
            m.relevant.to_string(),
            percent(m.precision),
            percent(m.recall),
            percent(m.f_measure),
            m.vacuous.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_histogram_csv<W: Write>(report: &EvaluationReport, w: W) -> Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["bin", "count"])?;
    for bin in HISTOGRAM_BINS {
        let n = report.histogram.get(bin).copied().unwrap_or(0);
        wtr.write_record([bin.to_string(), n.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(items: &[(&str, &str)]) -> BTreeSet<Authorship> {
        items
            .iter()
            .map(|(p, b)| Authorship {
                person_id: p.to_string(),
                pub_id: b.to_string(),
            })
            .collect()
    }

    #[test]
    fn reported_figures_render() {
        let m = Metrics::from_counts(11659, 450, 463);
        assert_eq!(m.relevant, 11672);
        assert_eq!(percent(m.precision), "96.1");
        assert_eq!(percent(m.recall), "96.0");
        assert_eq!(percent(m.f_measure), "96.1");
    }

    #[test]
    fn identity_and_all_wrong() {
        let g = set(&[("P", "a"), ("P", "b")]);
        let m = compare(&g, &g);
        assert_eq!((m.precision, m.recall, m.f_measure), (1.0, 1.0, 1.0));
        assert!(!m.vacuous);
        let m = Metrics::from_counts(10, 10, 0);
        assert_eq!((m.precision, m.recall, m.f_measure, m.relevant), (0.0, 0.0, 0.0, 0));
        let m = Metrics::from_counts(0, 0, 4);
        assert_eq!((m.precision, m.recall, m.f_measure), (0.0, 0.0, 0.0));
    }

    #[test]
    fn bins() {
        let bin = |r, fp, fn_| histogram_bin(&Metrics::from_counts(r, fp, fn_));
        assert_eq!(bin(3, 0, 0), "100");
        assert_eq!(bin(0, 0, 0), "100");
        assert_eq!(bin(0, 0, 3), "0-10");
        // F = 2*11/(20+20) = 0.55
        assert_eq!(bin(20, 9, 9), "50-60");
        // F = 0.7 exactly lands in 70-80
        assert_eq!(bin(10, 3, 3), "70-80");
        // F just under 1
        assert_eq!(bin(100, 1, 0), "90-100");
    }

    #[test]
    fn per_person_covers_roster_and_sums() {
        let gold = set(&[("P", "a"), ("P", "b"), ("Q", "a")]);
        let ret = set(&[("P", "a"), ("Q", "a"), ("Q", "c"), ("X", "d")]);
        let report = evaluate(&gold, &ret, ["P", "Q", "Z"]);
        assert_eq!(report.per_person.len(), 4);
        assert!(report.per_person["Z"].vacuous);
        assert_eq!(report.per_person["X"].f_measure, 0.0);
        let sum = |f: fn(&Metrics) -> u64| report.per_person.values().map(f).sum::<u64>();
        assert_eq!(sum(|m| m.retrieved), report.overall.retrieved);
        assert_eq!(sum(|m| m.false_positives), report.overall.false_positives);
        assert_eq!(sum(|m| m.false_negatives), report.overall.false_negatives);
        assert_eq!(report.histogram.values().sum::<u64>(), 4);
        assert_eq!(report.histogram["100"], 1);

        let mut buf = Vec::new();
        write_histogram_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("bin,count\n0-10,1\n"));
        assert_eq!(text.lines().count(), 12);
        let mut buf = Vec::new();
        write_per_person_csv(&report, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("\nZ,0,0,0,0,100.0,100.0,100.0,true\n"));
    }

    proptest! {
        #[test]
        fn formula_properties(r in 0u64..500, fp_frac in 0.0f64..=1.0, fn_ in 0u64..500) {
            let fp = (r as f64 * fp_frac) as u64;
            let m = Metrics::from_counts(r, fp, fn_);
            prop_assert_eq!(m.relevant + fp, r + fn_);
            prop_assert!((0.0..=1.0).contains(&m.f_measure));
            if m.precision + m.recall > 0.0 && !m.vacuous {
                let f = 2.0 * m.precision * m.recall / (m.precision + m.recall);
                prop_assert!((f - m.f_measure).abs() < 1e-12);
                prop_assert!(m.f_measure <= (m.precision + m.recall) / 2.0 + 1e-12);
            }
        }
    }
}
