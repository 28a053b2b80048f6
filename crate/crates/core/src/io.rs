//! Field, symbol, weight and frame files.
//!
//! Field CSV: `i0[,i1,...],re,im`, one row per grid point in storage order.
//! Field binary: little-endian `n: u64`, `N: u64`, `L: f64`, then `re, im`
//! as `f64` pairs. Symbol CSV: `x_index,xi_index,re,im` with flat indices.
//! Weight CSV: `i0[,i1,...],value`. Frames: JSON `{h, dim, J, centers}`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::decompose::ConeFrame;
use crate::error::{Error, Result};
use crate::field::{SampledField, Side};
use crate::grid::Grid;
use crate::symbol::TabulatedSymbol;
use crate::weights::Weight;

fn index_header(n: usize) -> Vec<String> {
    (0..n).map(|d| format!("i{d}")).collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn parse<T: std::str::FromStr>(s: &str, what: &str, row: usize) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("row {row}: cannot parse {what} from {s:?}")))
}

/// Physical-side field as CSV.
pub fn write_field_csv(u: &SampledField, path: &Path) -> Result<()> {
    let g = u.grid();
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = index_header(g.dim());
    header.extend(["re".to_string(), "im".to_string()]);
    w.write_record(&header).map_err(csv_err)?;
    let mut m = vec![0usize; g.dim()];
    for (k, v) in u.values().iter().enumerate() {
        g.unravel(k, &mut m);
        let mut rec: Vec<String> = m.iter().map(|i| i.to_string()).collect();
        rec.push(v.re.to_string());
        rec.push(v.im.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field_csv(path: &Path, grid: &Grid) -> Result<SampledField> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let n = grid.dim();
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut seen = vec![false; grid.len()];
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != n + 2 {
            return Err(Error::Parse(format!("row {row}: expected {} columns, got {}", n + 2, rec.len())));
        }
        let m: Vec<usize> = (0..n).map(|d| parse(&rec[d], "index", row)).collect::<Result<_>>()?;
        if m.iter().any(|&i| i >= grid.points_per_axis()) {
            return Err(Error::Parse(format!("row {row}: index {m:?} outside the grid")));
        }
        let k = grid.ravel(&m);
        values[k] = Complex64::new(parse(&rec[n], "re", row)?, parse(&rec[n + 1], "im", row)?);
        seen[k] = true;
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(Error::Parse(format!("grid point {k} missing from {}", path.display())));
    }
    SampledField::new(*grid, values, Side::Physical)
}

pub fn write_field_binary(u: &SampledField, path: &Path) -> Result<()> {
    let g = u.grid();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&(g.dim() as u64).to_le_bytes())?;
    w.write_all(&(g.points_per_axis() as u64).to_le_bytes())?;
    w.write_all(&g.half_width().to_le_bytes())?;
    for v in u.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a binary dump; the grid comes from its header.
pub fn read_field_binary(path: &Path) -> Result<SampledField> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    let word = |i: usize| -> Result<[u8; 8]> {
        bytes
            .get(8 * i..8 * i + 8)
            .map(|s| s.try_into().expect("8 bytes"))
            .ok_or_else(|| Error::Parse(format!("{} is truncated", path.display())))
    };
    let n = u64::from_le_bytes(word(0)?) as usize;
    let big = u64::from_le_bytes(word(1)?) as usize;
    let half = f64::from_le_bytes(word(2)?);
    let grid = Grid::new(n, big, half)?;
    if bytes.len() != 24 + 16 * grid.len() {
        return Err(Error::Parse(format!("{} has {} bytes, expected {}", path.display(), bytes.len(), 24 + 16 * grid.len())));
    }
    let values = (0..grid.len())
        .map(|k| Ok(Complex64::new(f64::from_le_bytes(word(3 + 2 * k)?), f64::from_le_bytes(word(4 + 2 * k)?))))
        .collect::<Result<_>>()?;
    SampledField::new(grid, values, Side::Physical)
}

pub fn read_symbol_csv(path: &Path, grid: &Grid) -> Result<TabulatedSymbol> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut entries = BTreeMap::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != 4 {
            return Err(Error::Parse(format!("row {row}: expected x_index,xi_index,re,im")));
        }
        let (i, k): (usize, usize) = (parse(&rec[0], "x_index", row)?, parse(&rec[1], "xi_index", row)?);
        if i >= grid.len() || k >= grid.len() {
            return Err(Error::Parse(format!("row {row}: index ({i}, {k}) outside the grid")));
        }
        entries.insert((i, k), Complex64::new(parse(&rec[2], "re", row)?, parse(&rec[3], "im", row)?));
    }
    Ok(TabulatedSymbol { grid: *grid, entries })
}

pub fn write_symbol_csv(table: &TabulatedSymbol, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["x_index", "xi_index", "re", "im"]).map_err(csv_err)?;
    for (&(i, k), v) in &table.entries {
        w.write_record([i.to_string(), k.to_string(), v.re.to_string(), v.im.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Tabulated weight, one value per grid cell.
pub fn read_weight_csv(path: &Path, grid: &Grid) -> Result<Weight> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let n = grid.dim();
    let mut values = vec![f64::NAN; grid.len()];
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != n + 1 {
            return Err(Error::Parse(format!("row {row}: expected {} columns, got {}", n + 1, rec.len())));
        }
        let m: Vec<usize> = (0..n).map(|d| parse(&rec[d], "index", row)).collect::<Result<_>>()?;
        if m.iter().any(|&i| i >= grid.points_per_axis()) {
            return Err(Error::Parse(format!("row {row}: index {m:?} outside the grid")));
        }
        values[grid.ravel(&m)] = parse(&rec[n], "value", row)?;
    }
    if let Some(k) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::Parse(format!("weight value missing for grid point {k}")));
    }
    Weight::tabulated(*grid, values)
}

pub fn write_weight_csv(w: &Weight, grid: &Grid, path: &Path) -> Result<()> {
    let mut out = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = index_header(grid.dim());
    header.push("value".into());
    out.write_record(&header).map_err(csv_err)?;
    let mut m = vec![0usize; grid.dim()];
    for k in 0..grid.len() {
        grid.unravel(k, &mut m);
        let mut rec: Vec<String> = m.iter().map(|i| i.to_string()).collect();
        rec.push(w.eval(&grid.point(k)).to_string());
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_frame_json(frame: &ConeFrame, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&frame.to_json()).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_frame_json(path: &Path) -> Result<ConeFrame> {
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path)?).map_err(|e| Error::Parse(e.to_string()))?;
    let h = v["h"].as_f64().ok_or_else(|| Error::Parse("frame JSON lacks h".into()))?;
    let dim = v["dim"].as_u64().ok_or_else(|| Error::Parse("frame JSON lacks dim".into()))? as usize;
    let centers: Vec<Vec<f64>> =
        serde_json::from_value(v["centers"].clone()).map_err(|e| Error::Parse(format!("frame centers: {e}")))?;
    if v["J"].as_u64() != Some(centers.len() as u64) || centers.iter().any(|c| c.len() != dim) {
        return Err(Error::Parse("frame JSON: J or centre dimensions inconsistent".into()));
    }
    Ok(ConeFrame { h, dim, centers })
}
