//! End-to-end evaluation runs and hyperparameter sweeps.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{self, AlignedEmbedderConfig, Alignment, EmbeddingSequence};
use crate::error::{Error, Result, StageContext};
use crate::graph::{NodeId, TemporalGraph};
use crate::ingest::{self, EventFormat, SplitSpec};
use crate::kinematics::{self, HistoryWindow, LocationSet};
use crate::metrics;
use crate::predictor::{self, Predictor, PredictorKind, PredictorSpec, TrainConfig, DEFAULT_HIDDEN};
use crate::scoring::{self, ScoredPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetFormat {
    Triple,
    CoauthorshipCsv,
    /// A serialized [`TemporalGraph`] as written by `ingest`.
    Graph,
}

impl FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graph" | "json" => Ok(DatasetFormat::Graph),
            other => match EventFormat::from_str(other) {
                Ok(EventFormat::Triple) => Ok(DatasetFormat::Triple),
                Ok(EventFormat::CoauthorshipCsv) => Ok(DatasetFormat::CoauthorshipCsv),
                Err(_) => Err(Error::InvalidArgument(format!("unknown dataset format {other:?}"))),
            },
        }
    }
}

impl DatasetFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            DatasetFormat::Triple => "triple",
            DatasetFormat::CoauthorshipCsv => "coauthorship-csv",
            DatasetFormat::Graph => "graph",
        }
    }

    fn events(self) -> Option<EventFormat> {
        match self {
            DatasetFormat::Triple => Some(EventFormat::Triple),
            DatasetFormat::CoauthorshipCsv => Some(EventFormat::CoauthorshipCsv),
            DatasetFormat::Graph => None,
        }
    }
}

/// Where per-timestep positions come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "kebab-case")]
pub enum EmbeddingSource {
    Builtin { alignment: Alignment },
    File { path: PathBuf },
}

impl Default for EmbeddingSource {
    fn default() -> Self {
        EmbeddingSource::Builtin {
            alignment: Alignment::Procrustes,
        }
    }
}

/// Every setting of one evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub format: DatasetFormat,
    pub bins: usize,
    pub overlap: f64,
    pub split: SplitSpec,
    pub embedding: EmbeddingSource,
    pub dim: usize,
    /// Velocities combined by the recency-weighted aggregation, forecast included.
    pub history: usize,
    /// Consecutive training snapshots fed to the pipeline.
    pub series_length: usize,
    pub predictor: PredictorKind,
    pub layers: Vec<usize>,
    /// Forecaster input length; `None` means `history`.
    pub input_window: Option<usize>,
    pub train: TrainConfig,
    pub sampling_seed: u64,
    pub model_seed: u64,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: None,
            format: DatasetFormat::Triple,
            bins: 10,
            overlap: 0.0,
            split: SplitSpec::default(),
            embedding: EmbeddingSource::default(),
            dim: 16,
            history: 3,
            series_length: 6,
            predictor: PredictorKind::Recurrent,
            layers: DEFAULT_HIDDEN.to_vec(),
            input_window: None,
            train: TrainConfig::default(),
            sampling_seed: 0,
            model_seed: 0,
            output: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn input_window(&self) -> usize {
        self.input_window.unwrap_or(self.history)
    }

    /// Cross-field checks that need no data.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.dim == 0 {
            return bad("dim must be at least 1".into());
        }
        HistoryWindow::new(self.history)?;
        if self.history > self.series_length {
            return bad(format!(
                "history h = {} exceeds series length l = {}",
                self.history, self.series_length
            ));
        }
        if self.series_length < 2 {
            return bad("series length must be at least 2".into());
        }
        if self.predictor == PredictorKind::Recurrent && self.series_length < self.input_window() + 2 {
            return bad(format!(
                "series length {} leaves no training windows for input window {} (need l >= {})",
                self.series_length,
                self.input_window(),
                self.input_window() + 2
            ));
        }
        if self.bins < 2 {
            return bad("bins must be at least 2".into());
        }
        if !(0.0..1.0).contains(&self.overlap) {
            return bad(format!("overlap must lie in [0, 1), got {}", self.overlap));
        }
        self.predictor_spec().validate()?;
        self.train.validate()?;
        if let SplitSpec::RatioByTime { train_fraction } = self.split {
            if !(train_fraction > 0.0 && train_fraction < 1.0) {
                return bad(format!("split ratio must lie in (0, 1), got {train_fraction}"));
            }
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus existence of every input path.
    pub fn validate_paths(&self) -> Result<()> {
        let check = |p: &Path| {
            if p.exists() {
                Ok(())
            } else {
                Err(Error::io(
                    p,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
                ))
            }
        };
        if let Some(p) = &self.dataset {
            check(p)?;
        }
        if let EmbeddingSource::File { path } = &self.embedding {
            check(path)?;
        }
        Ok(())
    }

    pub fn predictor_spec(&self) -> PredictorSpec {
        PredictorSpec {
            kind: self.predictor,
            hidden_layers: self.layers.clone(),
            input_window: self.input_window(),
            seed: self.model_seed,
        }
    }
}

/// Load and bin the configured dataset.
pub fn load_dataset(cfg: &RunConfig) -> Result<TemporalGraph> {
    let path = cfg
        .dataset
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("no dataset configured".into()))?;
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    match cfg.format.events() {
        None => Ok(serde_json::from_reader(std::io::BufReader::new(file))?),
        Some(format) => {
            let events = ingest::parse_edge_events(file, format)?;
            ingest::bin_snapshots(&events, cfg.bins, cfg.overlap)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineMetrics {
    pub auroc: f64,
    pub auprc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub auroc: f64,
    pub auprc: f64,
    pub n_pos: usize,
    pub n_neg: usize,
    /// Sampling seed of this run.
    pub seed: u64,
    pub model_seed: u64,
    /// Final-position similarity on the same pairs.
    pub baseline: BaselineMetrics,
    pub target_timestep: usize,
    /// Embedding width actually used (`dim` capped at the node count).
    pub effective_dim: usize,
    pub final_train_loss: Option<f64>,
    pub config: RunConfig,
}

impl EvalReport {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer_pretty(&mut f, self)?;
        writeln!(f).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
    }
}

/// A finished run with the artifacts behind its report.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: EvalReport,
    /// Pipeline scores, labeled.
    pub scored: Vec<ScoredPair>,
    pub baseline_scored: Vec<ScoredPair>,
    pub predictor: Predictor,
    pub embeddings: EmbeddingSequence,
}

fn label(scored: &mut [ScoredPair], pairs: &ingest::LabeledPairSet) {
    for (s, p) in scored.iter_mut().zip(&pairs.pairs) {
        s.label = Some(p.label);
    }
}

/// Positions for snapshots `range` of `g` from the configured backend.
pub fn embed_window(g: &TemporalGraph, range: std::ops::Range<usize>, cfg: &RunConfig) -> Result<EmbeddingSequence> {
    match &cfg.embedding {
        EmbeddingSource::Builtin { alignment } => {
            let dim = cfg.dim.min(g.num_nodes());
            if dim < cfg.dim {
                log::warn!("dim {} exceeds the {} nodes; using {dim}", cfg.dim, g.num_nodes());
            }
            embedding::embed_aligned(
                &g.window(range)?,
                &AlignedEmbedderConfig {
                    dim,
                    seed: cfg.model_seed,
                    alignment: *alignment,
                },
            )
        }
        EmbeddingSource::File { path } => embedding::read_embeddings_file(path, g)?.window(range),
    }
}

/// Predicted next-step locations for every node of `series`, whose last
/// snapshot supplies the neighborhoods.
pub fn forecast_locations(
    series: &TemporalGraph,
    embeddings: &EmbeddingSequence,
    cfg: &RunConfig,
) -> Result<(LocationSet, Predictor)> {
    let vels = kinematics::compute_velocities(embeddings).stage("kinematics")?;
    let predictor = predictor::fit_predictor(&cfg.predictor_spec(), &vels, &cfg.train).stage("predictor")?;
    let forecasts = predictor::predict_all(&predictor, &vels).stage("predictor")?;
    let locs = (|| {
        let w = HistoryWindow::new(cfg.history)?;
        let agg: Vec<Vec<f64>> = forecasts
            .iter()
            .enumerate()
            .map(|(p, f)| kinematics::aggregate_velocity(&vels, NodeId::from(p), f, w))
            .collect::<Result<_>>()?;
        let init = kinematics::init_locations(embeddings, &agg)?;
        kinematics::aggregate_neighborhood(&init, series, series.num_snapshots() - 1)
    })()
    .stage("kinematics")?;
    Ok((locs, predictor))
}

/// Run the full pipeline on `g` and evaluate against the held-out snapshot.
pub fn run_experiment(g: &TemporalGraph, cfg: &RunConfig) -> Result<EvalReport> {
    run_pipeline(g, cfg).map(|o| o.report)
}

/// [`run_experiment`] keeping scored pairs, predictor and embeddings.
pub fn run_pipeline(g: &TemporalGraph, cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate().stage("config")?;

    let target = cfg.split.target_index(g.num_snapshots()).stage("split")?;
    let l = cfg.series_length;
    if l > target {
        return Err(Error::InsufficientHistory(format!(
            "series length {l} exceeds the {target} training snapshots"
        )))
        .stage("split");
    }
    let range = target - l..target;
    let series = g.window(range.clone()).stage("split")?;
    let target_snap = g.snapshot(target).stage("split")?;

    let embeddings = embed_window(g, range, cfg).stage("embedding")?;
    let (locs, predictor) = forecast_locations(&series, &embeddings, cfg)?;

    let cohort: BTreeSet<NodeId> = g.registry().ids().collect();
    let pairs = ingest::sample_labeled_pairs(g, target_snap, &cohort, cfg.sampling_seed).stage("sampling")?;

    let (scored, baseline_scored, report) = (|| {
        let mut scored = scoring::score_pairs(&locs, &pairs.node_pairs())?;
        label(&mut scored, &pairs);
        let baseline_scored = embedding::raw_similarity_baseline(&embeddings, &pairs)?;
        let report = EvalReport {
            auroc: metrics::auroc(&scored)?,
            auprc: metrics::auprc(&scored)?,
            n_pos: pairs.positives().count(),
            n_neg: pairs.negatives().count(),
            seed: cfg.sampling_seed,
            model_seed: cfg.model_seed,
            baseline: BaselineMetrics {
                auroc: metrics::auroc(&baseline_scored)?,
                auprc: metrics::auprc(&baseline_scored)?,
            },
            target_timestep: target,
            effective_dim: embeddings.dim(),
            final_train_loss: predictor.recurrent().and_then(|r| r.loss_trace.last().copied()),
            config: cfg.clone(),
        };
        Ok((scored, baseline_scored, report))
    })()
    .stage("evaluation")?;

    Ok(RunOutcome {
        report,
        scored,
        baseline_scored,
        predictor,
        embeddings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    Dim,
    SeriesLength,
    History,
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dim" => Ok(SweepParameter::Dim),
            "series_length" | "series-length" | "l" => Ok(SweepParameter::SeriesLength),
            "history" | "h" => Ok(SweepParameter::History),
            other => Err(Error::InvalidArgument(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::Dim => "dim",
            SweepParameter::SeriesLength => "series_length",
            SweepParameter::History => "history",
        }
    }

    /// Values previously studied for this parameter.
    pub fn studied_values(self) -> &'static [usize] {
        match self {
            SweepParameter::Dim => &[32, 64, 128, 256],
            SweepParameter::SeriesLength => &[6, 9, 12, 15],
            SweepParameter::History => &[2, 3, 4, 5, 6, 7, 8, 9],
        }
    }

    fn apply(self, cfg: &mut RunConfig, value: usize) {
        match self {
            SweepParameter::Dim => cfg.dim = value,
            SweepParameter::SeriesLength => cfg.series_length = value,
            SweepParameter::History => cfg.history = value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<usize>,
    pub repeats: usize,
    pub base: RunConfig,
}

impl SweepSpec {
    /// Drop repeated values (keeping first occurrences) and check the base
    /// config under every value.
    pub fn normalized(mut self) -> Result<Self> {
        let mut seen = BTreeSet::new();
        self.values.retain(|v| seen.insert(*v));
        if self.values.is_empty() {
            return Err(Error::InvalidArgument("sweep has no values".into()));
        }
        if self.repeats == 0 {
            return Err(Error::InvalidArgument("repeats must be at least 1".into()));
        }
        for &v in &self.values {
            let mut cfg = self.base.clone();
            self.parameter.apply(&mut cfg, v);
            cfg.validate()
                .map_err(|e| Error::InvalidArgument(format!("{} = {v}: {e}", self.parameter.as_str())))?;
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub parameter: SweepParameter,
    pub value: usize,
    pub repeat: usize,
    pub report: EvalReport,
}

/// One report per `(value, repeat)`, ordered by value then repeat. Repeat
/// `r` uses sampling seed `base.sampling_seed + r`.
pub fn run_sweep(g: &TemporalGraph, spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    let requested = spec.values.len();
    let spec = spec.clone().normalized()?;
    if spec.values.len() < requested {
        log::warn!("dropped {} duplicate sweep values", requested - spec.values.len());
    }
    let name = spec.parameter.as_str();
    for v in spec
        .values
        .iter()
        .filter(|v| !spec.parameter.studied_values().contains(v))
    {
        log::warn!("{name} = {v} is outside the studied range (extrapolation)");
    }
    let jobs: Vec<(usize, usize)> = spec
        .values
        .iter()
        .flat_map(|&v| (0..spec.repeats).map(move |r| (v, r)))
        .collect();
    jobs.par_iter()
        .map(|&(value, repeat)| {
            let mut cfg = spec.base.clone();
            spec.parameter.apply(&mut cfg, value);
            cfg.sampling_seed = spec.base.sampling_seed.wrapping_add(repeat as u64);
            run_experiment(g, &cfg)
                .map(|report| SweepRecord {
                    parameter: spec.parameter,
                    value,
                    repeat,
                    report,
                })
                .map_err(|e| Error::Sweep {
                    parameter: spec.parameter.as_str(),
                    value,
                    repeat,
                    source: Box::new(e),
                })
        })
        .collect()
}

/// Long-format `param,value,repeat,auroc,auprc,n_pos,n_neg,seed` table.
pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Format(format!("writing sweep table: {e}"));
    w.write_record(["param", "value", "repeat", "auroc", "auprc", "n_pos", "n_neg", "seed"])
        .map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.parameter.as_str().to_string(),
            r.value.to_string(),
            r.repeat.to_string(),
            r.report.auroc.to_string(),
            r.report.auprc.to_string(),
            r.report.n_pos.to_string(),
            r.report.n_neg.to_string(),
            r.report.seed.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<sweep table>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{drift_graph, DriftConfig};

    fn quick() -> RunConfig {
        RunConfig {
            dim: 4,
            layers: vec![8],
            train: TrainConfig {
                epochs: 5,
                ..TrainConfig::default()
            },
            ..RunConfig::default()
        }
    }

    #[test]
    fn history_longer_than_series_is_rejected() {
        let g = drift_graph(&DriftConfig::default()).unwrap();
        let cfg = RunConfig { history: 7, ..quick() };
        let err = run_experiment(&g, &cfg).unwrap_err();
        assert!(err.to_string().contains("history"), "{err}");
    }

    #[test]
    fn same_seeds_same_report() {
        let g = drift_graph(&DriftConfig::default()).unwrap();
        let a = run_experiment(&g, &quick()).unwrap();
        let b = run_experiment(&g, &quick()).unwrap();
        assert_eq!(a, b);
        assert!(a.n_pos >= 1 && a.n_pos == a.n_neg);
    }

    #[test]
    fn sweep_deduplicates_and_orders() {
        let g = drift_graph(&DriftConfig::default()).unwrap();
        let spec = SweepSpec {
            parameter: SweepParameter::History,
            values: vec![3, 2, 3],
            repeats: 2,
            base: RunConfig {
                predictor: PredictorKind::Persistence,
                ..quick()
            },
        };
        let recs = run_sweep(&g, &spec).unwrap();
        let keys: Vec<_> = recs.iter().map(|r| (r.value, r.repeat, r.report.seed)).collect();
        assert_eq!(keys, vec![(3, 0, 0), (3, 1, 1), (2, 0, 0), (2, 1, 1)]);
        let mut buf = Vec::new();
        write_sweep_csv(&recs, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
    }
}
