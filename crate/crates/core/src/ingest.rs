//! Dataset ingestion: event parsing, time binning, temporal splits and
//! balanced positive/negative link sampling.

use std::collections::{BTreeSet, HashSet};
use std::io::{BufRead, Read, Write};
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeRegistry, Snapshot, TemporalGraph};

/// One timestamped undirected interaction between two labelled nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeEvent {
    pub time: f64,
    pub u: String,
    pub v: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventFormat {
    /// Whitespace separated `t u v` lines; `#` starts a comment line.
    Triple,
    /// `paper_id,year,authors` with `;`-separated author labels.
    CoauthorshipCsv,
}

impl FromStr for EventFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triple" => Ok(EventFormat::Triple),
            "coauthorship-csv" | "csv" => Ok(EventFormat::CoauthorshipCsv),
            other => Err(Error::InvalidArgument(format!("unknown event format {other:?}"))),
        }
    }
}

impl EventFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            EventFormat::Triple => "triple",
            EventFormat::CoauthorshipCsv => "coauthorship-csv",
        }
    }
}

pub fn parse_edge_events<R: Read>(input: R, format: EventFormat) -> Result<Vec<EdgeEvent>> {
    let events = match format {
        EventFormat::Triple => parse_triples(std::io::BufReader::new(input))?,
        EventFormat::CoauthorshipCsv => parse_coauthorship(input)?,
    };
    if events.is_empty() {
        return Err(Error::NoEvents);
    }
    Ok(events)
}

fn parse_time(raw: &str, line: usize) -> Result<f64> {
    let t: f64 = raw
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid timestamp {raw:?}")))?;
    if !t.is_finite() {
        return Err(Error::parse(line, format!("non-finite timestamp {raw:?}")));
    }
    Ok(t)
}

fn parse_triples<R: BufRead>(reader: R) -> Result<Vec<EdgeEvent>> {
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                lineno,
                format!("expected 3 fields `t u v`, found {}", fields.len()),
            ));
        }
        let time = parse_time(fields[0], lineno)?;
        if fields[1] == fields[2] {
            return Err(Error::parse(lineno, format!("self-contact for node {:?}", fields[1])));
        }
        events.push(EdgeEvent {
            time,
            u: fields[1].to_owned(),
            v: fields[2].to_owned(),
        });
    }
    Ok(events)
}

fn parse_coauthorship<R: Read>(input: R) -> Result<Vec<EdgeEvent>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = reader.headers().map_err(|e| Error::parse(1, e.to_string()))?.clone();
    let expected = ["paper_id", "year", "authors"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h.trim() != e) {
        return Err(Error::parse(
            1,
            format!("expected header `paper_id,year,authors`, found {headers:?}"),
        ));
    }

    let mut events = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let year = parse_time(record[1].trim(), line)?;
        let mut authors: Vec<&str> = Vec::new();
        for a in record[2].split(';').map(str::trim).filter(|a| !a.is_empty()) {
            if !authors.contains(&a) {
                authors.push(a);
            }
        }
        for (i, a) in authors.iter().enumerate() {
            for b in &authors[i + 1..] {
                events.push(EdgeEvent {
                    time: year,
                    u: (*a).to_owned(),
                    v: (*b).to_owned(),
                });
            }
        }
    }
    Ok(events)
}

fn format_time(t: f64) -> String {
    if t.fract() == 0.0 && t.abs() < 9.0e15 {
        format!("{}", t as i64)
    } else {
        format!("{t}")
    }
}

/// Write events in the triple format accepted by [`parse_edge_events`].
pub fn write_triples<W: Write>(events: &[EdgeEvent], mut out: W) -> std::io::Result<()> {
    for e in events {
        writeln!(out, "{} {} {}", format_time(e.time), e.u, e.v)?;
    }
    Ok(())
}

/// Bin boundaries shared by [`bin_snapshots`] and its callers.
#[derive(Debug, Clone, Copy)]
pub struct Binning {
    pub start: f64,
    pub end: f64,
    pub num_bins: usize,
    pub overlap: f64,
}

impl Binning {
    pub fn width(&self) -> f64 {
        (self.end - self.start) / self.num_bins as f64
    }

    pub fn lower(&self, k: usize) -> f64 {
        self.start + k as f64 * self.width()
    }

    /// Exclusive upper edge of bin `k` (the last bin is closed at `end`).
    pub fn upper(&self, k: usize) -> f64 {
        self.lower(k + 1) + self.overlap * self.width()
    }

    /// Bins containing `t`, in increasing order.
    pub fn bins_of(&self, t: f64) -> impl Iterator<Item = usize> {
        let last = self.num_bins - 1;
        let mut k = (((t - self.start) / self.width()).floor().max(0.0) as usize).min(last);
        while k > 0 && t < self.lower(k) {
            k -= 1;
        }
        while k < last && t >= self.lower(k + 1) {
            k += 1;
        }
        let this = *self;
        // Earlier bins reach into bin k only through the overlap extension.
        let first = (0..k).rev().take_while(move |&j| t < this.upper(j)).last().unwrap_or(k);
        first..=k
    }
}

/// Partition the event time range into `num_bins` equal-width snapshots.
///
/// Intervals are left-closed, the last one right-closed. With `overlap > 0`
/// every bin is extended rightwards by that fraction of its width.
pub fn bin_snapshots(events: &[EdgeEvent], num_bins: usize, overlap: f64) -> Result<TemporalGraph> {
    if num_bins < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 bins, got {num_bins}")));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::InvalidArgument(format!(
            "overlap must lie in [0, 1), got {overlap}"
        )));
    }
    if events.is_empty() {
        return Err(Error::NoEvents);
    }
    let (start, end) = events.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
        (lo.min(e.time), hi.max(e.time))
    });
    if start == end {
        return Err(Error::InvalidArgument(format!(
            "all events share timestamp {start}; cannot bin"
        )));
    }
    let binning = Binning {
        start,
        end,
        num_bins,
        overlap,
    };

    let mut registry = NodeRegistry::new();
    let mut lists: Vec<Vec<(NodeId, NodeId)>> = vec![Vec::new(); num_bins];
    for e in events {
        if e.u == e.v {
            return Err(Error::InvalidArgument(format!("self-contact for node {:?}", e.u)));
        }
        let u = registry.intern(&e.u);
        let v = registry.intern(&e.v);
        for k in binning.bins_of(e.time) {
            lists[k].push((u, v));
        }
    }
    TemporalGraph::new(registry, lists)
}

/// How to carve a training series and a prediction target out of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SplitSpec {
    /// The first `ceil(train_fraction * T)` snapshots train; the next is the target.
    RatioByTime { train_fraction: f64 },
    /// Snapshots before `test_timestep` train; that snapshot is the target.
    PerYearHoldout { test_timestep: usize },
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec::RatioByTime { train_fraction: 0.75 }
    }
}

impl SplitSpec {
    /// Index of the target snapshot in a graph with `total` snapshots.
    pub fn target_index(&self, total: usize) -> Result<usize> {
        if total < 3 {
            return Err(Error::InvalidArgument(format!(
                "temporal split needs at least 3 snapshots, graph has {total}"
            )));
        }
        let target = match *self {
            SplitSpec::RatioByTime { train_fraction } => {
                if !(train_fraction > 0.0 && train_fraction < 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "train fraction must lie in (0, 1), got {train_fraction}"
                    )));
                }
                // Guard against 0.7 * 10 = 7.000000000000001 style round-up.
                (train_fraction * total as f64 - 1e-9).ceil() as usize
            }
            SplitSpec::PerYearHoldout { test_timestep } => test_timestep,
        };
        if target < 2 {
            return Err(Error::InvalidArgument(format!(
                "split leaves {target} training snapshots; at least 2 are required"
            )));
        }
        if target >= total {
            return Err(Error::InvalidArgument(format!(
                "split target {target} is beyond the last snapshot {}",
                total - 1
            )));
        }
        Ok(target)
    }
}

/// Split into a training series and the snapshot to predict.
pub fn temporal_split(g: &TemporalGraph, spec: &SplitSpec) -> Result<(TemporalGraph, Snapshot)> {
    let target = spec.target_index(g.num_snapshots())?;
    let train = g.window(0..target)?;
    Ok((train, g.snapshot(target)?.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "+1")]
    Positive,
    #[serde(rename = "-1")]
    Negative,
}

impl Label {
    pub fn as_i8(self) -> i8 {
        match self {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabeledPair {
    pub u: NodeId,
    pub v: NodeId,
    pub label: Label,
}

/// Balanced evaluation pairs for one target timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPairSet {
    pub pairs: Vec<LabeledPair>,
    pub timestep: usize,
}

impl LabeledPairSet {
    pub fn positives(&self) -> impl Iterator<Item = &LabeledPair> {
        self.pairs.iter().filter(|p| p.label.is_positive())
    }

    pub fn negatives(&self) -> impl Iterator<Item = &LabeledPair> {
        self.pairs.iter().filter(|p| !p.label.is_positive())
    }

    pub fn node_pairs(&self) -> Vec<(NodeId, NodeId)> {
        self.pairs.iter().map(|p| (p.u, p.v)).collect()
    }
}

/// All target edges inside `cohort` as positives plus the same number of
/// uniformly drawn cohort non-edges as negatives.
pub fn sample_labeled_pairs(
    g: &TemporalGraph,
    target: &Snapshot,
    cohort: &BTreeSet<NodeId>,
    seed: u64,
) -> Result<LabeledPairSet> {
    if let Some(bad) = cohort.iter().find(|p| p.index() >= g.num_nodes()) {
        return Err(Error::NodeOutOfRange {
            id: bad.index(),
            len: g.num_nodes(),
        });
    }
    if target.num_nodes() != g.num_nodes() {
        return Err(Error::ShapeMismatch {
            expected: g.num_nodes(),
            actual: target.num_nodes(),
        });
    }
    let members: Vec<NodeId> = cohort.iter().copied().collect();
    let positives: Vec<(NodeId, NodeId)> = target
        .edges()
        .iter()
        .copied()
        .filter(|(u, v)| cohort.contains(u) && cohort.contains(v))
        .collect();
    if positives.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "target snapshot {} has no edges inside the cohort",
            target.index()
        )));
    }
    let n = members.len();
    let total_pairs = n * (n - 1) / 2;
    let available = total_pairs - positives.len();
    let wanted = positives.len();
    if available < wanted {
        return Err(Error::InvalidArgument(format!(
            "cohort of {n} nodes has only {available} non-edges for {wanted} negatives"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let negatives: Vec<(NodeId, NodeId)> = if available <= 4 * wanted {
        // Dense regime: enumerate and subsample.
        let mut non_edges = Vec::with_capacity(available);
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if !target.has_edge(a, b) {
                    non_edges.push((a, b));
                }
            }
        }
        index::sample(&mut rng, non_edges.len(), wanted)
            .into_iter()
            .map(|k| non_edges[k])
            .collect()
    } else {
        let mut seen = HashSet::with_capacity(wanted);
        let mut out = Vec::with_capacity(wanted);
        while out.len() < wanted {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            if i == j {
                continue;
            }
            let (a, b) = (members[i.min(j)], members[i.max(j)]);
            if target.has_edge(a, b) || !seen.insert((a, b)) {
                continue;
            }
            out.push((a, b));
        }
        out
    };

    let pairs = positives
        .into_iter()
        .map(|(u, v)| LabeledPair {
            u,
            v,
            label: Label::Positive,
        })
        .chain(negatives.into_iter().map(|(u, v)| LabeledPair {
            u,
            v,
            label: Label::Negative,
        }))
        .collect();
    Ok(LabeledPairSet {
        pairs,
        timestep: target.index(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(t: f64, u: &str, v: &str) -> EdgeEvent {
        EdgeEvent {
            time: t,
            u: u.into(),
            v: v.into(),
        }
    }

    #[test]
    fn triple_line_maps_fields() {
        let events = parse_edge_events("# comment\n20 5 9\n".as_bytes(), EventFormat::Triple).unwrap();
        assert_eq!(events, vec![ev(20.0, "5", "9")]);
    }

    #[test]
    fn malformed_triple_reports_line() {
        let err = parse_edge_events("1 a b\n2 a\n".as_bytes(), EventFormat::Triple).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_edge_events("x a b\n".as_bytes(), EventFormat::Triple).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn empty_input_is_no_events() {
        assert!(matches!(
            parse_edge_events("# nothing\n\n".as_bytes(), EventFormat::Triple),
            Err(Error::NoEvents)
        ));
    }

    #[test]
    fn coauthorship_row_expands_to_pairs() {
        let csv = "paper_id,year,authors\np1,2015,A;B;C\n";
        let events = parse_edge_events(csv.as_bytes(), EventFormat::CoauthorshipCsv).unwrap();
        assert_eq!(
            events,
            vec![ev(2015.0, "A", "B"), ev(2015.0, "A", "C"), ev(2015.0, "B", "C")]
        );
    }

    #[test]
    fn four_authors_give_six_events() {
        let csv = "paper_id,year,authors\n\"p,1\",2010,\"W;X;Y;Z\"\n";
        let events = parse_edge_events(csv.as_bytes(), EventFormat::CoauthorshipCsv).unwrap();
        assert_eq!(events.len(), 4 * 3 / 2);
    }

    #[test]
    fn coauthorship_bad_header() {
        let err = parse_edge_events("id,year,names\n".as_bytes(), EventFormat::CoauthorshipCsv).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn halves_split_at_midpoint() {
        let events: Vec<_> = (0..10).map(|t| ev(t as f64, &format!("a{t}"), "hub")).collect();
        let g = bin_snapshots(&events, 2, 0.0).unwrap();
        assert_eq!(g.edge_counts(), vec![5, 5]);
        let hub = g.registry().id("hub").unwrap();
        let a4 = g.registry().id("a4").unwrap();
        let a5 = g.registry().id("a5").unwrap();
        assert!(g.snapshot(0).unwrap().has_edge(a4, hub));
        assert!(g.snapshot(1).unwrap().has_edge(a5, hub));
    }

    #[test]
    fn one_bin_per_year() {
        let events: Vec<_> = (2005..=2021).map(|y| ev(y as f64, &format!("y{y}"), "x")).collect();
        let g = bin_snapshots(&events, 17, 0.0).unwrap();
        assert_eq!(g.edge_counts(), vec![1; 17]);
        for (k, y) in (2005..=2021).enumerate() {
            let p = g.registry().id(&format!("y{y}")).unwrap();
            assert_eq!(g.snapshot(k).unwrap().degree(p).unwrap(), 1);
        }
    }

    #[test]
    fn binning_errors() {
        assert!(bin_snapshots(&[ev(1.0, "a", "b"), ev(1.0, "b", "c")], 3, 0.0).is_err());
        assert!(bin_snapshots(&[ev(1.0, "a", "b"), ev(2.0, "b", "c")], 1, 0.0).is_err());
        assert!(matches!(bin_snapshots(&[], 3, 0.0), Err(Error::NoEvents)));
    }

    #[test]
    fn overlap_duplicates_boundary_events() {
        let events: Vec<_> = (0..=10).map(|t| ev(t as f64, &format!("a{t}"), "hub")).collect();
        // width 5; bin 0 extended to [0, 7.5)
        let g = bin_snapshots(&events, 2, 0.5).unwrap();
        assert_eq!(g.edge_counts(), vec![8, 6]);
    }

    #[test]
    fn split_examples() {
        let ratio = SplitSpec::RatioByTime { train_fraction: 0.75 };
        assert_eq!(ratio.target_index(8).unwrap(), 6);
        let half = SplitSpec::RatioByTime { train_fraction: 0.5 };
        assert_eq!(half.target_index(12).unwrap(), 6);
        let holdout = SplitSpec::PerYearHoldout { test_timestep: 16 };
        assert_eq!(holdout.target_index(17).unwrap(), 16);
        assert!(SplitSpec::RatioByTime { train_fraction: 0.1 }.target_index(8).is_err());
        assert!(SplitSpec::RatioByTime { train_fraction: 0.99 }.target_index(8).is_err());
        assert!(SplitSpec::PerYearHoldout { test_timestep: 1 }.target_index(8).is_err());
        assert!(ratio.target_index(2).is_err());
    }

    #[test]
    fn small_cohort_single_positive() {
        let reg = NodeRegistry::from_labels(["a", "b", "c", "d"]).unwrap();
        let g = TemporalGraph::new(reg, [vec![(NodeId(0), NodeId(1))]]).unwrap();
        let cohort = g.registry().ids().collect();
        let s = sample_labeled_pairs(&g, g.snapshot(0).unwrap(), &cohort, 7).unwrap();
        assert_eq!(s.positives().count(), 1);
        assert_eq!(s.negatives().count(), 1);
        let neg = s.negatives().next().unwrap();
        assert!((neg.u, neg.v) != (NodeId(0), NodeId(1)));
    }

    #[test]
    fn complete_target_has_no_negatives() {
        let reg = NodeRegistry::from_labels(["a", "b", "c"]).unwrap();
        let g = TemporalGraph::new(
            reg,
            [vec![
                (NodeId(0), NodeId(1)),
                (NodeId(1), NodeId(2)),
                (NodeId(0), NodeId(2)),
            ]],
        )
        .unwrap();
        let cohort = g.registry().ids().collect();
        assert!(sample_labeled_pairs(&g, g.snapshot(0).unwrap(), &cohort, 1).is_err());
    }
}
