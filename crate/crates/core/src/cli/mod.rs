//! Command-line front end.
//!
//! Exit codes: 0 success, 2 empty input, 64 usage, 65 bad data,
//! 66 missing input, 70 numeric failure.

pub mod config;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::Error;
use crate::experiment::{self, RunConfig, SweepParameter, SweepSpec};
use crate::graph::{NodeId, TemporalGraph};
use crate::ingest::{self, EventFormat};
use crate::predictor::{write_checkpoint_file, Predictor};
use crate::scoring;
use config::{ConfigArgs, ConfigError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_EVENTS: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_NUMERIC: i32 = 70;

#[derive(Debug, Parser)]
#[command(name = "kinemb", version, about = "Velocity-based temporal link prediction")]
pub struct Cli {
    /// Worker threads (falls back to KINEMB_THREADS)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse an event file into snapshots and write graph.json plus a summary
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// triple | coauthorship-csv
        #[arg(long, default_value = "triple")]
        format: EventFormat,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        #[arg(long, default_value_t = 0.0)]
        overlap: f64,
        #[arg(long, default_value = "out")]
        output: PathBuf,
    },
    /// Embed every snapshot of the dataset and write embeddings.txt
    Embed(ConfigArgs),
    /// Train, predict and evaluate on the held-out snapshot
    Run(ConfigArgs),
    /// Repeat `run` over values of one hyperparameter
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// dim | series_length | history
        #[arg(long)]
        param: SweepParameter,
        /// Comma list and/or inclusive ranges, e.g. `2..9` or `32,64,128`
        #[arg(long)]
        values: String,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
    },
    /// Forecast one step past the last snapshot and rank every node pair
    Score {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Usage(m) => Failure::Usage(m),
            ConfigError::Source(e) => Failure::Run(e),
        }
    }
}

/// Exit status for a pipeline error.
pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::NoEvents => EXIT_NO_EVENTS,
        Error::Io { .. } => EXIT_NO_INPUT,
        Error::NonFinite(_) => EXIT_NUMERIC,
        Error::Parse { .. }
        | Error::Format(_)
        | Error::Json(_)
        | Error::UnknownLabel(_)
        | Error::SelfLoop(..)
        | Error::MissingEntry { .. }
        | Error::ShapeMismatch { .. }
        | Error::NodeOutOfRange { .. }
        | Error::TimestepOutOfRange { .. }
        | Error::InsufficientHistory(_)
        | Error::InvalidArgument(_) => EXIT_DATA,
        Error::Stage { .. } | Error::Sweep { .. } => EXIT_NUMERIC,
    }
}

/// Parse `args` (program name first), run, and return the exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let threads = cli
        .threads
        .or_else(|| std::env::var("KINEMB_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::debug!("thread pool already initialized: {e}");
        }
    }
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Ingest {
            input,
            format,
            bins,
            overlap,
            output,
        } => cmd_ingest(&input, format, bins, overlap, &output),
        Command::Embed(args) => cmd_embed(&args),
        Command::Run(args) => cmd_run(&args),
        Command::Sweep {
            config,
            param,
            values,
            repeats,
        } => cmd_sweep(&config, param, &values, repeats),
        Command::Score { config, top } => cmd_score(&config, top),
    }
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn create_file(path: &Path) -> Result<BufWriter<File>, Error> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Resolve and fully validate a config, then load its dataset.
fn prepare(args: &ConfigArgs) -> Result<(RunConfig, TemporalGraph), Failure> {
    let cfg = args.resolve()?;
    if cfg.dataset.is_none() {
        return Err(Failure::Usage(
            "no dataset given (use --dataset or a config file)".into(),
        ));
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    cfg.validate_paths()?;
    let g = experiment::load_dataset(&cfg)?;
    Ok((cfg, g))
}

#[derive(Serialize)]
struct GraphSummary {
    nodes: usize,
    snapshots: usize,
    edges_per_snapshot: Vec<usize>,
}

fn summarize(g: &TemporalGraph) -> GraphSummary {
    GraphSummary {
        nodes: g.num_nodes(),
        snapshots: g.num_snapshots(),
        edges_per_snapshot: g.edge_counts(),
    }
}

fn cmd_ingest(input: &Path, format: EventFormat, bins: usize, overlap: f64, out: &Path) -> Result<(), Failure> {
    if bins < 2 || !(0.0..1.0).contains(&overlap) {
        return Err(Failure::Usage("bins must be >= 2 and overlap in [0, 1)".into()));
    }
    let file = File::open(input).map_err(|e| Error::io(input, e))?;
    let events = ingest::parse_edge_events(file, format)?;
    let g = ingest::bin_snapshots(&events, bins, overlap)?;
    create_dir(out)?;
    serde_json::to_writer(create_file(&out.join("graph.json"))?, &g).map_err(Error::from)?;
    let summary = summarize(&g);
    serde_json::to_writer_pretty(create_file(&out.join("summary.json"))?, &summary).map_err(Error::from)?;
    println!(
        "{} events, {} nodes, {} snapshots",
        events.len(),
        summary.nodes,
        summary.snapshots
    );
    for (i, e) in summary.edges_per_snapshot.iter().enumerate() {
        println!("snapshot {i}: {e} edges");
    }
    Ok(())
}

fn cmd_embed(args: &ConfigArgs) -> Result<(), Failure> {
    let (cfg, g) = prepare(args)?;
    let e = experiment::embed_window(&g, 0..g.num_snapshots(), &cfg).map_err(Failure::Run)?;
    create_dir(&cfg.output)?;
    let path = cfg.output.join("embeddings.txt");
    crate::embedding::write_embeddings_file(&e, &g, &path)?;
    println!(
        "wrote {} ({} x {} x {})",
        path.display(),
        e.num_timesteps(),
        e.num_nodes(),
        e.dim()
    );
    Ok(())
}

fn write_model(predictor: &Predictor, dir: &Path) -> Result<(), Error> {
    match predictor.recurrent() {
        Some(r) => write_checkpoint_file(r, &dir.join("model.ckpt")),
        None => {
            log::info!("closed-form predictor; no checkpoint written");
            Ok(())
        }
    }
}

fn cmd_run(args: &ConfigArgs) -> Result<(), Failure> {
    let (cfg, g) = prepare(args)?;
    let outcome = experiment::run_pipeline(&g, &cfg)?;
    create_dir(&cfg.output)?;
    outcome.report.write_json(&cfg.output.join("report.json"))?;
    scoring::write_scored_pairs(
        &outcome.scored,
        g.registry(),
        create_file(&cfg.output.join("scored_pairs.csv"))?,
    )?;
    write_model(&outcome.predictor, &cfg.output)?;
    let r = &outcome.report;
    println!("AUROC {:.6}", r.auroc);
    println!("AUPRC {:.6}", r.auprc);
    println!("baseline AUROC {:.6}", r.baseline.auroc);
    println!("baseline AUPRC {:.6}", r.baseline.auprc);
    Ok(())
}

/// `2..9` (inclusive), `2..=9`, `32,64` and mixtures.
pub fn parse_values(text: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || format!("invalid value {part:?}");
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(format!("empty range {part:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err("no sweep values".into());
    }
    Ok(out)
}

fn cmd_sweep(args: &ConfigArgs, param: SweepParameter, values: &str, repeats: usize) -> Result<(), Failure> {
    let values = parse_values(values).map_err(Failure::Usage)?;
    let (cfg, g) = prepare(args)?;
    let spec = SweepSpec {
        parameter: param,
        values,
        repeats,
        base: cfg.clone(),
    };
    spec.clone().normalized().map_err(|e| Failure::Usage(e.to_string()))?;
    let records = experiment::run_sweep(&g, &spec)?;
    create_dir(&cfg.output)?;
    for r in &records {
        let name = format!("run_{}_{}_r{}.json", param.as_str(), r.value, r.repeat);
        r.report.write_json(&cfg.output.join(name))?;
    }
    let path = cfg.output.join("sweep.csv");
    experiment::write_sweep_csv(&records, create_file(&path)?)?;
    for r in &records {
        println!(
            "{}={} repeat {}: AUROC {:.4} AUPRC {:.4}",
            param.as_str(),
            r.value,
            r.repeat,
            r.report.auroc,
            r.report.auprc
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_score(args: &ConfigArgs, top: usize) -> Result<(), Failure> {
    let (cfg, g) = prepare(args)?;
    let t = g.num_snapshots();
    let l = cfg.series_length;
    if l > t {
        return Err(Failure::Usage(format!("series length {l} exceeds the {t} snapshots")));
    }
    let range = t - l..t;
    let series = g.window(range.clone())?;
    let e = experiment::embed_window(&g, range, &cfg)?;
    let (locs, _) = experiment::forecast_locations(&series, &e, &cfg)?;
    let n = g.num_nodes();
    let pairs: Vec<(NodeId, NodeId)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (NodeId::from(u), NodeId::from(v))))
        .collect();
    let scored = scoring::score_pairs(&locs, &pairs)?;
    let ranked = scoring::rank_candidates(&scored, top.min(scored.len()))?;
    create_dir(&cfg.output)?;
    scoring::write_scored_pairs(&scored, g.registry(), create_file(&cfg.output.join("candidates.csv"))?)?;
    let mut stdout = std::io::stdout().lock();
    for s in &ranked {
        let label = |p: NodeId| g.registry().label(p).unwrap_or("?");
        writeln!(stdout, "{}\t{}\t{:.6}", label(s.u), label(s.v), s.score).map_err(|e| Error::io("<stdout>", e))?;
    }
    Ok(())
}
