//! Plain-text model checkpoints.
//!
//! ```text
//! KINEMB-MODEL v1
//! seed <u64>
//! input_window <w>
//! layers <input_dim> <h_1> ... <h_k>
//! mean <d floats>
//! std <d floats>
//! params <count>
//! <floats, whitespace separated, row-major per layer>
//! ```

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::lstm::RecurrentModel;
use super::train::Standardizer;
use super::TrainedRecurrent;
use crate::error::{Error, Result};

const HEADER: &str = "KINEMB-MODEL v1";
const PER_LINE: usize = 16;

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

pub fn save_checkpoint<W: Write>(model: &TrainedRecurrent, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    let io_err = |e| Error::io("<checkpoint>", e);
    let mut layers = vec![model.model.input_dim()];
    layers.extend(model.model.layer_sizes());
    let params = model.model.params();
    writeln!(w, "{HEADER}").map_err(io_err)?;
    writeln!(w, "seed {}", model.seed).map_err(io_err)?;
    writeln!(w, "input_window {}", model.input_window).map_err(io_err)?;
    writeln!(
        w,
        "layers {}",
        layers.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
    )
    .map_err(io_err)?;
    writeln!(w, "mean {}", join(&model.standardizer.mean)).map_err(io_err)?;
    writeln!(w, "std {}", join(&model.standardizer.std)).map_err(io_err)?;
    writeln!(w, "params {}", params.len()).map_err(io_err)?;
    for chunk in params.chunks(PER_LINE) {
        writeln!(w, "{}", join(chunk)).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_checkpoint_file(model: &TrainedRecurrent, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    save_checkpoint(model, f)
}

fn keyed<'a>(line: Option<(usize, &'a str)>, key: &str) -> Result<(usize, Vec<&'a str>)> {
    let (lineno, text) = line.ok_or_else(|| Error::Format(format!("checkpoint truncated before `{key}`")))?;
    let mut toks = text.split_whitespace();
    if toks.next() != Some(key) {
        return Err(Error::parse(lineno + 1, format!("expected `{key}`")));
    }
    Ok((lineno + 1, toks.collect()))
}

fn parse_all<T: std::str::FromStr>(toks: &[&str], line: usize) -> Result<Vec<T>> {
    toks.iter()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::parse(line, format!("invalid number {t:?}")))
        })
        .collect()
}

/// Read a checkpoint written by [`save_checkpoint`]. The loss trace is not
/// stored and comes back empty.
pub fn load_checkpoint<R: Read>(mut input: R) -> Result<TrainedRecurrent> {
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .map_err(|e| Error::io("<checkpoint>", e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => return Err(Error::parse(1, format!("expected `{HEADER}` header"))),
    }
    let (ln, seed) = keyed(lines.next(), "seed")?;
    let seed: u64 = *parse_all(&seed, ln)?
        .first()
        .ok_or_else(|| Error::parse(ln, "missing seed"))?;
    let (ln, window) = keyed(lines.next(), "input_window")?;
    let input_window: usize = *parse_all(&window, ln)?
        .first()
        .ok_or_else(|| Error::parse(ln, "missing input window"))?;
    let (ln, layers) = keyed(lines.next(), "layers")?;
    let layers: Vec<usize> = parse_all(&layers, ln)?;
    if layers.len() < 2 {
        return Err(Error::parse(ln, "need an input width and at least one layer"));
    }
    let (ln, mean) = keyed(lines.next(), "mean")?;
    let mean: Vec<f64> = parse_all(&mean, ln)?;
    let (ln, std) = keyed(lines.next(), "std")?;
    let std: Vec<f64> = parse_all(&std, ln)?;
    let (ln, count) = keyed(lines.next(), "params")?;
    let count: usize = *parse_all(&count, ln)?
        .first()
        .ok_or_else(|| Error::parse(ln, "missing count"))?;
    let mut params = Vec::with_capacity(count);
    for (lineno, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        params.extend(parse_all::<f64>(&toks, lineno + 1)?);
    }
    if params.len() != count {
        return Err(Error::Format(format!(
            "checkpoint declares {count} parameters, found {}",
            params.len()
        )));
    }
    let d = layers[0];
    if mean.len() != d || std.len() != d {
        return Err(Error::Format(
            "standardization statistics do not match input width".into(),
        ));
    }
    let model = RecurrentModel::from_params(d, &layers[1..], params)?;
    Ok(TrainedRecurrent {
        model,
        standardizer: Standardizer { mean, std },
        input_window,
        seed,
        loss_trace: Vec::new(),
    })
}

pub fn read_checkpoint_file(path: &Path) -> Result<TrainedRecurrent> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    load_checkpoint(f)
}
