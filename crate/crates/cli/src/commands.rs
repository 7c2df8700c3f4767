use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};
use oeuvre::blocking::write_blocks_jsonl;
use oeuvre::citation::build_citation_index;
use oeuvre::clustering::{cluster_corpus, read_clusters_jsonl, write_jsonl, ClusterConfig, ClusterError};
use oeuvre::corpus::{parse_corpus_with, Corpus};
use oeuvre::normalize::NormalizeOptions;
use oeuvre::evalkit::{evaluate, percent, write_histogram_csv, write_per_person_csv};
use oeuvre::portfolio::{
    all_portfolios, apply_decisions, baseline_assign, finalize, match_roster, read_assignments_jsonl,
    read_authorships_csv, read_roster_csv, run_automatic_scenario, write_assignments_jsonl,
    write_portfolio_csv, write_roster_csv, Assignment, Authorship, BaselineMode, ClusterSet, DecisionLog,
    FilterConfig, PortfolioError, RosterEntry, Scenario, Status, Synonyms, Window,
};
use oeuvre::scoring::{GeneralNames, DEFAULT_GENERAL_NAME_BLOCKS};
use oeuvre::synth::{compound_surname_fixture, generate, SynthConfig};
use serde::Serialize;

use crate::config::{require, threshold_policy, PipelineConfig, ScenarioArg};
use crate::manifest::Manifest;
use crate::serve::{router, ReviewState, TOKEN_ENV};
use crate::Failure;

/// Author disambiguation and researcher portfolio pipeline
#[derive(Debug, Parser)]
#[command(name = "oeuvre", version, about)]
pub struct Cli {
    /// TOML file with defaults for any flag
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Keep accented letters distinct when normalizing names
    #[arg(long, global = true)]
    pub keep_diacritics: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a publications JSONL file and write name blocks
    Ingest {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score pairs within name blocks and build clusters
    Cluster {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 uses all cores
        #[arg(long)]
        threads: Option<usize>,
        /// Also write every scored pair to trace.jsonl
        #[arg(long)]
        trace: bool,
        /// One general first name per line; derived from the corpus if absent
        #[arg(long)]
        general_names: Option<PathBuf>,
        /// by-size or fixed:N
        #[arg(long)]
        threshold: Option<String>,
        /// Link only scores strictly above the threshold
        #[arg(long)]
        strict: bool,
    },
    /// Retrieve candidate clusters for every roster researcher
    Match {
        #[arg(long)]
        roster: Option<PathBuf>,
        #[arg(long)]
        clusters: Option<PathBuf>,
        /// Evaluation window, Y0:Y1
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply scenario 1, 2 or 3 (or a baseline) and write portfolios
    Filter {
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        roster: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        clusters: Option<PathBuf>,
        #[arg(long)]
        candidates: Option<PathBuf>,
        /// Review decisions JSONL, required for scenario 3
        #[arg(long)]
        decisions: Option<PathBuf>,
        /// City and country synonyms, one comma-separated group per line
        #[arg(long)]
        synonyms: Option<PathBuf>,
        /// Accept roster career cities in scenario 2
        #[arg(long)]
        career_cities: bool,
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Name-only attribution baselines
    Baseline {
        /// initials or fullname
        #[arg(long)]
        mode: String,
        #[arg(long)]
        roster: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Precision, recall and F-measure against gold authorships
    Evaluate {
        #[arg(long)]
        gold: Option<PathBuf>,
        /// Portfolio CSV to evaluate
        #[arg(long)]
        retrieved: PathBuf,
        /// Roster, so researchers with nothing retrieved are reported too
        #[arg(long)]
        roster: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic corpus, roster and gold set
    Gen {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 200)]
        researchers: usize,
        /// Emit the small compound-surname fixture instead
        #[arg(long)]
        fixture: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the review API and static assets
    Serve {
        #[arg(long)]
        roster: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        clusters: Option<PathBuf>,
        #[arg(long)]
        candidates: Option<PathBuf>,
        /// Append-only decisions log
        #[arg(long)]
        decisions: Option<PathBuf>,
        /// Directory of static UI assets
        #[arg(long)]
        assets: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|_| Failure::MissingInput(path.display().to_string()).into())
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("creating {}", path.display()))
}

fn out_dir(flag: &Option<PathBuf>, config: &PipelineConfig) -> anyhow::Result<PathBuf> {
    let dir = flag.clone().or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn window(flag: &Option<String>, config: &PipelineConfig) -> anyhow::Result<Window> {
    Ok(require(flag, &config.window, "window")?.parse()?)
}

fn load_corpus(path: &Path, options: NormalizeOptions) -> anyhow::Result<Corpus> {
    parse_corpus_with(open(path)?, options).with_context(|| format!("reading corpus {}", path.display()))
}

fn load_roster(path: &Path) -> anyhow::Result<Vec<RosterEntry>> {
    read_roster_csv(open(path)?).with_context(|| format!("reading roster {}", path.display()))
}

fn load_clusters(path: &Path) -> anyhow::Result<ClusterSet> {
    let clusters = read_clusters_jsonl(open(path)?).with_context(|| format!("reading {}", path.display()))?;
    Ok(ClusterSet::new(clusters))
}

fn load_assignments(path: &Path) -> anyhow::Result<Vec<Assignment>> {
    read_assignments_jsonl(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn write_portfolio(path: &Path, rows: &BTreeSet<Authorship>, scenario: Scenario) -> anyhow::Result<()> {
    let mut w = create(path)?;
    write_portfolio_csv(rows, scenario, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let config = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    let norm = NormalizeOptions {
        fold_diacritics: !cli.keep_diacritics && config.fold_diacritics.unwrap_or(true),
    };
    match &cli.command {
        Command::Ingest { corpus, out } => ingest(&config, corpus, out, norm),
        Command::Cluster {
            corpus,
            out,
            threads,
            trace,
            general_names,
            threshold,
            strict,
        } => {
            let args = ClusterArgs {
                corpus: require(corpus, &config.corpus, "corpus")?,
                general_names: general_names.clone().or_else(|| config.general_names.clone()),
                threshold: threshold.clone().or_else(|| config.threshold.clone()),
                strict: *strict || config.strict_threshold.unwrap_or(false),
                threads: threads.or(config.threads).unwrap_or(0),
                trace: *trace,
                normalize: norm,
            };
            cluster(&args, &out_dir(out, &config)?)
        }
        Command::Match {
            roster,
            clusters,
            window: w,
            out,
        } => {
            let out = out_dir(out, &config)?;
            let roster = require(roster, &config.roster, "roster")?;
            let clusters = clusters.clone().unwrap_or_else(|| out.join("clusters.jsonl"));
            match_stage(&roster, &clusters, window(w, &config)?, &out)
        }
        Command::Filter {
            scenario,
            roster,
            corpus,
            clusters,
            candidates,
            decisions,
            synonyms,
            career_cities,
            window: w,
            out,
        } => {
            let out = out_dir(out, &config)?;
            let scenario: ScenarioArg = require(scenario, &config.scenario, "scenario")?.parse()?;
            let args = FilterArgs {
                scenario,
                roster: require(roster, &config.roster, "roster")?,
                corpus: require(corpus, &config.corpus, "corpus")?,
                clusters: clusters.clone().unwrap_or_else(|| out.join("clusters.jsonl")),
                candidates: candidates.clone().unwrap_or_else(|| out.join("candidates.jsonl")),
                decisions: decisions.clone().or_else(|| config.decisions.clone()),
                synonyms: synonyms.clone().or_else(|| config.synonyms.clone()),
                career_cities: *career_cities || config.career_cities.unwrap_or(false),
                window: window(w, &config)?,
                normalize: norm,
            };
            filter(&args, &out)
        }
        Command::Baseline {
            mode,
            roster,
            corpus,
            window: w,
            out,
        } => {
            let mode = match mode.parse::<ScenarioArg>()? {
                ScenarioArg::Baseline(m) => m,
                other => anyhow::bail!("--mode must be initials or fullname, not {other}"),
            };
            let roster = require(roster, &config.roster, "roster")?;
            let corpus = require(corpus, &config.corpus, "corpus")?;
            baseline(mode, &roster, &corpus, norm, window(w, &config)?, &out_dir(out, &config)?)
        }
        Command::Evaluate {
            gold,
            retrieved,
            roster,
            out,
        } => {
            let gold = require(gold, &config.gold, "gold")?;
            let roster = roster.clone().or_else(|| config.roster.clone());
            evaluate_stage(&gold, retrieved, roster.as_deref(), &out_dir(out, &config)?)
        }
        Command::Gen {
            seed,
            researchers,
            fixture,
            out,
        } => {
            let seed = seed.or(config.seed).unwrap_or(42);
            gen(seed, *researchers, *fixture, &out_dir(out, &config)?)
        }
        Command::Serve {
            roster,
            corpus,
            clusters,
            candidates,
            decisions,
            assets,
            addr,
            out,
        } => {
            let out = out_dir(out, &config)?;
            let roster = load_roster(&require(roster, &config.roster, "roster")?)?;
            let clusters = read_clusters_jsonl(open(&clusters.clone().unwrap_or_else(|| out.join("clusters.jsonl")))?)?;
            let assignments = load_assignments(&candidates.clone().unwrap_or_else(|| out.join("candidates.jsonl")))?;
            let corpus = corpus
                .clone()
                .or_else(|| config.corpus.clone())
                .map(|p| load_corpus(&p, norm))
                .transpose()?;
            let decisions = decisions
                .clone()
                .or_else(|| config.decisions.clone())
                .unwrap_or_else(|| out.join("decisions.jsonl"));
            let token = std::env::var(TOKEN_ENV).ok().filter(|t| !t.is_empty());
            let state = ReviewState::new(roster, clusters, &assignments, corpus.as_ref(), Some(&decisions), token)?;
            serve(router(state, assets.clone()), addr)
        }
    }
}

fn ingest(
    config: &PipelineConfig,
    corpus: &Option<PathBuf>,
    out: &Option<PathBuf>,
    norm: NormalizeOptions,
) -> anyhow::Result<()> {
    let path = require(corpus, &config.corpus, "corpus")?;
    let out = out_dir(out, config)?;
    let corpus = load_corpus(&path, norm)?;
    let blocks = oeuvre::blocking::build_blocks(&corpus);

    let corpus_out = out.join("corpus.jsonl");
    let mut w = create(&corpus_out)?;
    corpus.write_jsonl(&mut w)?;
    w.flush()?;
    let blocks_out = out.join("blocks.jsonl");
    let mut w = create(&blocks_out)?;
    write_blocks_jsonl(&blocks, &corpus, &mut w)?;
    w.flush()?;

    let mut m = Manifest::new("ingest", norm)?;
    m.input("corpus", &path)?;
    m.output("corpus", &corpus_out)?;
    m.output("blocks", &blocks_out)?;
    m.write(&out.join("ingest.manifest.json"))?;
    println!(
        "{} publications, {} author mentions, {} name blocks",
        corpus.publications().len(),
        corpus.pacs().len(),
        blocks.len()
    );
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct ClusterArgs {
    corpus: PathBuf,
    general_names: Option<PathBuf>,
    threshold: Option<String>,
    strict: bool,
    threads: usize,
    trace: bool,
    normalize: NormalizeOptions,
}

fn cluster(args: &ClusterArgs, out: &Path) -> anyhow::Result<()> {
    let corpus = load_corpus(&args.corpus, args.normalize)?;
    let general = match &args.general_names {
        Some(p) => GeneralNames::from_list(open(p)?)?,
        None => GeneralNames::from_corpus(&corpus, DEFAULT_GENERAL_NAME_BLOCKS),
    };
    let config = ClusterConfig {
        threshold: threshold_policy(args.threshold.as_deref(), args.strict)?,
        trace: args.trace,
    };
    let index = build_citation_index(&corpus);
    let run = cluster_corpus(&corpus, &index, &general, &config, args.threads).map_err(|e| match e {
        ClusterError::Invariant(msg) => anyhow::Error::from(Failure::Invariant(msg)),
        other => other.into(),
    })?;

    let mut m = Manifest::new("cluster", args)?;
    m.input("corpus", &args.corpus)?;
    if let Some(p) = &args.general_names {
        m.input("general_names", p)?;
    }
    let clusters_out = out.join("clusters.jsonl");
    let mut w = create(&clusters_out)?;
    write_jsonl(&run.clusters, &mut w)?;
    w.flush()?;
    m.output("clusters", &clusters_out)?;
    let blocks_out = out.join("blocks.jsonl");
    let mut w = create(&blocks_out)?;
    write_blocks_jsonl(&run.blocks, &corpus, &mut w)?;
    w.flush()?;
    m.output("blocks", &blocks_out)?;
    if args.trace {
        let trace_out = out.join("trace.jsonl");
        let mut w = create(&trace_out)?;
        write_jsonl(&run.trace, &mut w)?;
        w.flush()?;
        m.output("trace", &trace_out)?;
    }
    m.write(&out.join("cluster.manifest.json"))?;
    println!(
        "{} author mentions in {} name blocks, {} clusters",
        corpus.pacs().len(),
        run.blocks.len(),
        run.clusters.len()
    );
    Ok(())
}

fn match_stage(roster_path: &Path, clusters_path: &Path, window: Window, out: &Path) -> anyhow::Result<()> {
    let roster = load_roster(roster_path)?;
    let clusters = load_clusters(clusters_path)?;
    let rows = match_roster(&roster, &clusters, window);

    let path = out.join("candidates.jsonl");
    let mut w = create(&path)?;
    write_assignments_jsonl(&rows, &mut w)?;
    w.flush()?;
    let mut m = Manifest::new("match", serde_json::json!({ "window": window.to_string() }))?;
    m.input("roster", roster_path)?;
    m.input("clusters", clusters_path)?;
    m.output("candidates", &path)?;
    m.write(&out.join("match.manifest.json"))?;

    let live = rows.iter().filter(|r| r.status == Status::Candidate).count();
    let persons: BTreeSet<&str> = rows.iter().map(|r| r.person_id.as_str()).collect();
    println!(
        "{} clusters retrieved for {} of {} researchers, {} inside {window}",
        rows.len(),
        persons.len(),
        roster.len(),
        live
    );
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct FilterArgs {
    scenario: ScenarioArg,
    roster: PathBuf,
    corpus: PathBuf,
    clusters: PathBuf,
    candidates: PathBuf,
    decisions: Option<PathBuf>,
    synonyms: Option<PathBuf>,
    career_cities: bool,
    window: Window,
    normalize: NormalizeOptions,
}

fn filter(args: &FilterArgs, out: &Path) -> anyhow::Result<()> {
    let (scenario, tag) = match args.scenario {
        ScenarioArg::S1 => (Scenario::S1, "s1"),
        ScenarioArg::S2 => (Scenario::S2, "s2"),
        ScenarioArg::S3 => (Scenario::S3, "s3"),
        ScenarioArg::Baseline(mode) => {
            return baseline(mode, &args.roster, &args.corpus, args.normalize, args.window, out);
        }
    };
    let roster = load_roster(&args.roster)?;
    let corpus = load_corpus(&args.corpus, args.normalize)?;
    let clusters = load_clusters(&args.clusters)?;
    let candidates = load_assignments(&args.candidates)?;
    let mut m = Manifest::new(format!("filter {tag}"), args)?;
    m.input("roster", &args.roster)?;
    m.input("corpus", &args.corpus)?;
    m.input("clusters", &args.clusters)?;
    m.input("candidates", &args.candidates)?;

    let rows = if scenario == Scenario::S3 {
        let path = args
            .decisions
            .as_ref()
            .ok_or_else(|| Failure::MissingInput("--decisions".into()))?;
        m.input("decisions", path)?;
        let log = DecisionLog::load(open(path)?).with_context(|| format!("reading {}", path.display()))?;
        apply_decisions(&candidates, &log)?
    } else {
        let synonyms = match &args.synonyms {
            Some(p) => {
                m.input("synonyms", p)?;
                Synonyms::from_reader(open(p)?)?
            }
            None => Synonyms::default(),
        };
        let config = FilterConfig {
            synonyms,
            use_career_cities: args.career_cities,
        };
        run_automatic_scenario(scenario, &roster, &candidates, &clusters, &config)?
    };

    let assignments_out = out.join(format!("assignments_{tag}.jsonl"));
    let mut w = create(&assignments_out)?;
    write_assignments_jsonl(&rows, &mut w)?;
    w.flush()?;
    m.output("assignments", &assignments_out)?;

    let rows = match finalize(rows) {
        Ok(rows) => rows,
        Err(PortfolioError::Pending(n)) => {
            m.write(&out.join(format!("filter_{tag}.manifest.json")))?;
            return Err(Failure::Pending(n).into());
        }
        Err(e) => return Err(e.into()),
    };
    let portfolio = all_portfolios(&rows, &clusters, &corpus, args.window);
    let portfolio_out = out.join(format!("portfolio_{tag}.csv"));
    write_portfolio(&portfolio_out, &portfolio, scenario)?;
    m.output("portfolio", &portfolio_out)?;
    m.write(&out.join(format!("filter_{tag}.manifest.json")))?;

    let kept = rows.iter().filter(|r| r.status == Status::Kept).count();
    println!("scenario {tag}: {kept} clusters kept, {} authorships", portfolio.len());
    Ok(())
}

fn baseline(
    mode: BaselineMode,
    roster_path: &Path,
    corpus_path: &Path,
    norm: NormalizeOptions,
    window: Window,
    out: &Path,
) -> anyhow::Result<()> {
    let roster = load_roster(roster_path)?;
    let corpus = load_corpus(corpus_path, norm)?;
    let (scenario, tag) = match mode {
        BaselineMode::Initials => (Scenario::Baseline1, "baseline1"),
        BaselineMode::Fullname => (Scenario::Baseline2, "baseline2"),
    };
    let rows = baseline_assign(mode, &roster, &corpus, window);
    let path = out.join(format!("portfolio_{tag}.csv"));
    write_portfolio(&path, &rows, scenario)?;
    let mut m = Manifest::new(
        format!("baseline {tag}"),
        serde_json::json!({ "mode": mode, "window": window.to_string(), "normalize": norm }),
    )?;
    m.input("roster", roster_path)?;
    m.input("corpus", corpus_path)?;
    m.output("portfolio", &path)?;
    m.write(&out.join(format!("{tag}.manifest.json")))?;
    println!("{tag}: {} authorships", rows.len());
    Ok(())
}

fn evaluate_stage(gold_path: &Path, retrieved_path: &Path, roster_path: Option<&Path>, out: &Path) -> anyhow::Result<()> {
    let gold = read_authorships_csv(open(gold_path)?).with_context(|| format!("reading {}", gold_path.display()))?;
    let retrieved =
        read_authorships_csv(open(retrieved_path)?).with_context(|| format!("reading {}", retrieved_path.display()))?;
    let roster = roster_path.map(load_roster).transpose()?.unwrap_or_default();
    let report = evaluate(&gold, &retrieved, roster.iter().map(|r| r.person_id.as_str()));

    let mut m = Manifest::new("evaluate", serde_json::json!({}))?;
    m.input("gold", gold_path)?;
    m.input("retrieved", retrieved_path)?;
    if let Some(p) = roster_path {
        m.input("roster", p)?;
    }
    let report_out = out.join("report.json");
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    std::fs::write(&report_out, text)?;
    m.output("report", &report_out)?;
    let per_person_out = out.join("per_person.csv");
    let mut w = create(&per_person_out)?;
    write_per_person_csv(&report, &mut w)?;
    w.flush()?;
    m.output("per_person", &per_person_out)?;
    let histogram_out = out.join("histogram.csv");
    let mut w = create(&histogram_out)?;
    write_histogram_csv(&report, &mut w)?;
    w.flush()?;
    m.output("histogram", &histogram_out)?;
    m.write(&out.join("evaluate.manifest.json"))?;

    let o = &report.overall;
    println!(
        "retrieved {} false positives {} false negatives {} relevant {}",
        o.retrieved, o.false_positives, o.false_negatives, o.relevant
    );
    println!(
        "precision {}% recall {}% F-measure {}%",
        percent(o.precision),
        percent(o.recall),
        percent(o.f_measure)
    );
    Ok(())
}

fn gen(seed: u64, researchers: usize, fixture: bool, out: &Path) -> anyhow::Result<()> {
    let corpus_out = out.join("corpus.jsonl");
    let roster_out = out.join("roster.csv");
    let mut m;
    if fixture {
        let f = compound_surname_fixture();
        let corpus = Corpus::from_records(f.records)?;
        let mut w = create(&corpus_out)?;
        corpus.write_jsonl(&mut w)?;
        w.flush()?;
        let mut w = create(&roster_out)?;
        write_roster_csv(std::slice::from_ref(&f.entry), &mut w)?;
        w.flush()?;
        m = Manifest::new("gen", serde_json::json!({ "fixture": "compound_surname" }))?;
        println!("fixture: {} publications", corpus.publications().len());
    } else {
        let config = SynthConfig {
            seed,
            researchers,
            ..Default::default()
        };
        let population = generate(&config);
        let corpus = Corpus::from_records(population.records)?;
        let mut w = create(&corpus_out)?;
        corpus.write_jsonl(&mut w)?;
        w.flush()?;
        let mut w = create(&roster_out)?;
        write_roster_csv(&population.roster, &mut w)?;
        w.flush()?;

        let gold_out = out.join("gold.csv");
        let mut w = create(&gold_out)?;
        writeln!(w, "person_id,pub_id")?;
        for g in &population.gold {
            writeln!(w, "{},{}", g.person_id, g.pub_id)?;
        }
        w.flush()?;
        let planted_out = out.join("planted.jsonl");
        let mut w = create(&planted_out)?;
        write_jsonl(&population.planted, &mut w)?;
        w.flush()?;
        let truth_out = out.join("truth.csv");
        let mut w = create(&truth_out)?;
        writeln!(w, "pac_id,entity")?;
        for (pac, who) in &population.truth {
            writeln!(w, "{pac},{who}")?;
        }
        w.flush()?;

        m = Manifest::new("gen", &config)?;
        m.output("gold", &gold_out)?;
        m.output("planted", &planted_out)?;
        m.output("truth", &truth_out)?;
        println!(
            "{} researchers, {} publications, {} gold authorships, {} planted homonyms",
            population.roster.len(),
            corpus.publications().len(),
            population.gold.len(),
            population.planted.len()
        );
    }
    m.output("corpus", &corpus_out)?;
    m.output("roster", &roster_out)?;
    m.write(&out.join("gen.manifest.json"))?;
    Ok(())
}

fn serve(app: axum::Router, addr: &str) -> anyhow::Result<()> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("binding {addr}"))?;
        println!("review API on http://{}", listener.local_addr()?);
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
