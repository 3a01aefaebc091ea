//! Text embedding format:
//!
//! ```text
//! KINEMB v1 T=<timesteps> N=<nodes> D=<dim>
//! <timestep> <label> <f_1> ... <f_D>
//! ```
//!
//! One line per (timestep, node). Floats are written in shortest
//! round-trip form so a write/read cycle is bit-exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::EmbeddingSequence;
use crate::error::{Error, Result};
use crate::graph::TemporalGraph;

const MAGIC: &str = "KINEMB";
const VERSION: &str = "v1";

pub fn write_embeddings<W: Write>(e: &EmbeddingSequence, g: &TemporalGraph, out: W) -> Result<()> {
    if e.num_nodes() != g.num_nodes() {
        return Err(Error::ShapeMismatch {
            expected: g.num_nodes(),
            actual: e.num_nodes(),
        });
    }
    let mut out = BufWriter::new(out);
    let io_err = |err| Error::io("<embedding output>", err);
    writeln!(
        out,
        "{MAGIC} {VERSION} T={} N={} D={}",
        e.num_timesteps(),
        e.num_nodes(),
        e.dim()
    )
    .map_err(io_err)?;
    for i in 0..e.num_timesteps() {
        for p in g.registry().ids() {
            let label = g.registry().label(p).unwrap_or_default();
            write!(out, "{i} {label}").map_err(io_err)?;
            for v in e.position(i, p) {
                write!(out, " {v}").map_err(io_err)?;
            }
            writeln!(out).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}

pub fn write_embeddings_file(e: &EmbeddingSequence, g: &TemporalGraph, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(|err| Error::io(path, err))?;
    write_embeddings(e, g, f)
}

fn header_field(tok: Option<&str>, key: &str) -> Result<usize> {
    tok.and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(1, format!("malformed header field {key}")))
}

/// Read an embedding file for the nodes and snapshots of `g`.
pub fn load_embeddings<R: Read>(input: R, g: &TemporalGraph) -> Result<EmbeddingSequence> {
    let mut lines = BufReader::new(input).lines();
    let header = match lines.next() {
        Some(line) => line.map_err(|e| Error::parse(1, e.to_string()))?,
        None => return Err(Error::parse(1, "empty embedding file")),
    };
    let mut toks = header.split_whitespace();
    if toks.next() != Some(MAGIC) || toks.next() != Some(VERSION) {
        return Err(Error::parse(1, format!("expected `{MAGIC} {VERSION}` header")));
    }
    let t = header_field(toks.next(), "T")?;
    let n = header_field(toks.next(), "N")?;
    let d = header_field(toks.next(), "D")?;
    if t != g.num_snapshots() {
        return Err(Error::Format(format!(
            "embedding has {t} timesteps, graph has {}",
            g.num_snapshots()
        )));
    }
    if n != g.num_nodes() {
        return Err(Error::Format(format!(
            "embedding has {n} nodes, graph has {}",
            g.num_nodes()
        )));
    }
    if d == 0 {
        return Err(Error::parse(1, "dimension must be at least 1"));
    }

    let mut data = vec![0.0; t * n * d];
    let mut seen = vec![false; t * n];
    for (k, line) in lines.enumerate() {
        let lineno = k + 2;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < d + 2 {
            return Err(Error::parse(
                lineno,
                format!(
                    "dim mismatch: expected {d} coordinates, found {}",
                    toks.len().saturating_sub(2)
                ),
            ));
        }
        let i: usize = toks[0]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("invalid timestep {:?}", toks[0])))?;
        if i >= t {
            return Err(Error::parse(lineno, format!("timestep {i} out of range")));
        }
        let label = toks[1..toks.len() - d].join(" ");
        let p = g
            .registry()
            .id(&label)
            .ok_or_else(|| Error::parse(lineno, format!("unknown node label {label:?}")))?;
        let slot = i * n + p.index();
        if std::mem::replace(&mut seen[slot], true) {
            return Err(Error::parse(lineno, format!("duplicate entry ({i},{})", p.index())));
        }
        for (c, tok) in toks[toks.len() - d..].iter().enumerate() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("invalid coordinate {tok:?}")))?;
            if !v.is_finite() {
                return Err(Error::NonFinite(format!(
                    "line {lineno}: coordinate {c} of ({i},{}) is {v}",
                    p.index()
                )));
            }
            data[slot * d + c] = v;
        }
    }
    if let Some(slot) = seen.iter().position(|s| !s) {
        return Err(Error::MissingEntry {
            timestep: slot / n,
            node: slot % n,
        });
    }
    EmbeddingSequence::from_vec(t, n, d, data)
}

pub fn read_embeddings_file(path: &Path, g: &TemporalGraph) -> Result<EmbeddingSequence> {
    let f = File::open(path).map_err(|err| Error::io(path, err))?;
    load_embeddings(f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{NodeId, NodeRegistry};

    fn graph() -> TemporalGraph {
        let reg = NodeRegistry::from_labels(["a", "b", "c"]).unwrap();
        TemporalGraph::new(reg, [vec![(NodeId(0), NodeId(1))], vec![(NodeId(1), NodeId(2))]]).unwrap()
    }

    #[test]
    fn all_zero_file() {
        let text = "KINEMB v1 T=2 N=3 D=2\n0 a 0 0\n0 b 0 0\n0 c 0 0\n1 a 0 0\n1 b 0 0\n1 c 0 0\n";
        let e = load_embeddings(text.as_bytes(), &graph()).unwrap();
        assert_eq!(e.dim(), 2);
        assert!(e.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn missing_entry_is_named() {
        let text = "KINEMB v1 T=2 N=3 D=2\n0 a 0 0\n0 b 0 0\n0 c 0 0\n1 a 0 0\n1 b 0 0\n";
        let err = load_embeddings(text.as_bytes(), &graph()).unwrap_err();
        assert_eq!(err.to_string(), "missing (1,2)");
    }

    #[test]
    fn rejects_nan_and_bad_dims() {
        let text = "KINEMB v1 T=2 N=3 D=2\n0 a NaN 0\n";
        assert!(matches!(
            load_embeddings(text.as_bytes(), &graph()),
            Err(Error::NonFinite(_))
        ));
        let text = "KINEMB v1 T=2 N=3 D=2\n0 a 1\n";
        assert!(matches!(
            load_embeddings(text.as_bytes(), &graph()),
            Err(Error::Parse { line: 2, .. })
        ));
        let text = "KINEMB v1 T=3 N=3 D=2\n";
        assert!(load_embeddings(text.as_bytes(), &graph()).is_err());
    }
}
