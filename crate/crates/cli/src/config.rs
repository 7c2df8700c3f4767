//! Pipeline configuration: a TOML file whose keys mirror the command-line
//! flags. Flags given on the command line win.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use oeuvre::portfolio::{BaselineMode, Window};
use oeuvre::scoring::{ThresholdMode, ThresholdPolicy};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub roster: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub decisions: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub window: Option<String>,
    pub scenario: Option<String>,
    pub general_names: Option<PathBuf>,
    pub synonyms: Option<PathBuf>,
    /// `by-size` or `fixed:N`.
    pub threshold: Option<String>,
    pub strict_threshold: Option<bool>,
    pub career_cities: Option<bool>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    /// Fold accented letters to ASCII when normalizing names (default true).
    pub fold_diacritics: Option<bool>,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|_| Failure::MissingInput(path.display().to_string()))?;
        let config: PipelineConfig =
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if let Some(w) = &self.window {
            w.parse::<Window>()?;
        }
        if let Some(s) = &self.scenario {
            s.parse::<ScenarioArg>()?;
        }
        if let Some(t) = &self.threshold {
            parse_threshold_mode(t)?;
        }
        Ok(())
    }
}

/// Scenario selector accepted by `filter`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScenarioArg {
    S1,
    S2,
    S3,
    Baseline(BaselineMode),
}

impl FromStr for ScenarioArg {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "1" | "s1" => ScenarioArg::S1,
            "2" | "s2" => ScenarioArg::S2,
            "3" | "s3" => ScenarioArg::S3,
            "baseline1" | "initials" => ScenarioArg::Baseline(BaselineMode::Initials),
            "baseline2" | "fullname" => ScenarioArg::Baseline(BaselineMode::Fullname),
            other => bail!("unknown scenario {other:?}, expected 1, 2, 3, baseline1 or baseline2"),
        })
    }
}

impl fmt::Display for ScenarioArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioArg::S1 => f.write_str("1"),
            ScenarioArg::S2 => f.write_str("2"),
            ScenarioArg::S3 => f.write_str("3"),
            ScenarioArg::Baseline(BaselineMode::Initials) => f.write_str("baseline1"),
            ScenarioArg::Baseline(BaselineMode::Fullname) => f.write_str("baseline2"),
        }
    }
}

pub fn parse_threshold_mode(s: &str) -> anyhow::Result<ThresholdMode> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("by-size") {
        return Ok(ThresholdMode::BySize);
    }
    match s.split_once(':') {
        Some((k, n)) if k.eq_ignore_ascii_case("fixed") => Ok(ThresholdMode::Fixed(
            n.trim().parse().with_context(|| format!("bad fixed threshold {n:?}"))?,
        )),
        _ => bail!("unknown threshold mode {s:?}, expected by-size or fixed:N"),
    }
}

pub fn threshold_policy(mode: Option<&str>, strict: bool) -> anyhow::Result<ThresholdPolicy> {
    Ok(ThresholdPolicy {
        mode: mode.map(parse_threshold_mode).transpose()?.unwrap_or_default(),
        strict,
    })
}

/// First of the flag and config values, or a missing-input failure naming
/// the flag.
pub fn require<T: Clone>(flag: &Option<T>, config: &Option<T>, name: &str) -> anyhow::Result<T> {
    flag.clone()
        .or_else(|| config.clone())
        .ok_or_else(|| Failure::MissingInput(format!("--{name}")).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = r#"
            corpus = "c.jsonl"
            roster = "r.csv"
            window = "2010:2016"
            scenario = "baseline2"
            threshold = "fixed:10"
            strict_threshold = true
            threads = 4
        "#;
        let c: PipelineConfig = toml::from_str(text).unwrap();
        c.validate().unwrap();
        assert_eq!(c.threads, Some(4));
        assert_eq!(
            c.scenario.unwrap().parse::<ScenarioArg>().unwrap(),
            ScenarioArg::Baseline(BaselineMode::Fullname)
        );
    }

    #[test]
    fn rejects_invalid_values() {
        for text in [
            "window = \"2016:2010\"",
            "scenario = \"4\"",
            "threshold = \"fixed:x\"",
        ] {
            let c: PipelineConfig = toml::from_str(text).unwrap();
            assert!(c.validate().is_err(), "{text}");
        }
        assert!(toml::from_str::<PipelineConfig>("colour = 1").is_err());
    }

    #[test]
    fn threshold_modes() {
        assert_eq!(parse_threshold_mode("by-size").unwrap(), ThresholdMode::BySize);
        assert_eq!(parse_threshold_mode("fixed:10").unwrap(), ThresholdMode::Fixed(10));
        assert!(parse_threshold_mode("fixed").is_err());
    }
}
