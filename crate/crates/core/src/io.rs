//! CSV files: signals as `x,y`, tabulated index functions as `lambda,value`.

use std::fs::File;
use std::path::Path;

use crate::index_fn::TabulatedFunction;
use crate::spectral::GridSignal;
use crate::{Error, Result};

const SPACING_TOL: f64 = 1e-9;

fn parse_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), msg: msg.into() }
}

fn read_pairs(path: &Path, header: [&str; 2]) -> Result<(Vec<f64>, Vec<f64>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);
    let head = rdr.headers().map_err(|e| parse_err(path, e.to_string()))?.clone();
    if head.len() != 2 || head.get(0) != Some(header[0]) || head.get(1) != Some(header[1]) {
        return Err(parse_err(path, format!("expected header `{},{}`", header[0], header[1])));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| parse_err(path, e.to_string()))?;
        let row = i + 2;
        if rec.len() != 2 {
            return Err(parse_err(path, format!("line {row}: expected 2 fields, got {}", rec.len())));
        }
        let num = |j: usize| -> Result<f64> {
            let v: f64 = rec[j].parse().map_err(|_| parse_err(path, format!("line {row}: `{}` is not a number", &rec[j])))?;
            if !v.is_finite() {
                return Err(parse_err(path, format!("line {row}: non-finite value")));
            }
            Ok(v)
        };
        xs.push(num(0)?);
        ys.push(num(1)?);
    }
    Ok((xs, ys))
}

fn write_pairs(path: &Path, header: [&str; 2], rows: impl Iterator<Item = (f64, f64)>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let wrap = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => parse_err(path, format!("{other:?}")),
    };
    w.write_record(header).map_err(wrap)?;
    for (x, y) in rows {
        w.write_record([format!("{x:?}"), format!("{y:?}")]).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads an `x,y` signal; `x` must be strictly ascending with uniform
/// spacing (to 1e-9 relative).
pub fn read_signal(path: &Path) -> Result<GridSignal> {
    let (xs, ys) = read_pairs(path, ["x", "y"])?;
    if xs.len() < 2 {
        return Err(parse_err(path, "a signal needs at least two samples"));
    }
    let n = xs.len();
    let dx = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    if !(dx > 0.0) {
        return Err(parse_err(path, "x must be strictly ascending"));
    }
    for (j, p) in xs.windows(2).enumerate() {
        if ((p[1] - p[0]) - dx).abs() > SPACING_TOL * dx {
            return Err(parse_err(path, format!("line {}: x spacing is not uniform", j + 3)));
        }
    }
    GridSignal::new(ys, dx, xs[0]).map_err(|e| parse_err(path, e.to_string()))
}

pub fn write_signal(f: &GridSignal, path: &Path) -> Result<()> {
    write_pairs(path, ["x", "y"], f.samples().iter().enumerate().map(|(j, &y)| (f.x(j), y)))
}

/// Reads a `lambda,value` table; monotonicity is validated on construction.
pub fn read_table(path: &Path) -> Result<TabulatedFunction> {
    let (l, v) = read_pairs(path, ["lambda", "value"])?;
    TabulatedFunction::new(l, v).map_err(|e| parse_err(path, e.to_string()))
}

pub fn write_table(t: &TabulatedFunction, path: &Path) -> Result<()> {
    write_pairs(path, ["lambda", "value"], t.lambdas().iter().cloned().zip(t.values().iter().cloned()))
}
