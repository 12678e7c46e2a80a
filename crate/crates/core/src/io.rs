//! CSV, JSON and binary output of grids, fields and series.

use crate::error::{Error, Result};
use crate::spaces::{FieldKind, Grid, Regime, SpaceField, SpaceTimeField, TimeSeries};
use serde::Serialize;
use std::io::{Read, Write};
use std::sync::Arc;

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_pairs<W: Write>(w: W, header: [&str; 2], xs: &[f64], ys: &[f64]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(csv_err)?;
    for (x, y) in xs.iter().zip(ys) {
        out.write_record([x.to_string(), y.to_string()])
            .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Columns `x,value`.
pub fn write_field_csv<W: Write>(field: &SpaceField, w: W) -> Result<()> {
    write_pairs(w, ["x", "value"], field.grid().nodes(), field.values())
}

/// Columns `t,value`.
pub fn write_series_csv<W: Write>(series: &TimeSeries, w: W) -> Result<()> {
    write_pairs(w, ["t", "value"], &series.times, &series.values)
}

/// Reads a two-column CSV written by [`write_field_csv`] or [`write_series_csv`].
pub fn read_pairs_csv<R: Read>(r: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::Reader::from_reader(r);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_err)?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Io(format!("bad number in column {i} of {rec:?}")))
        };
        xs.push(parse(0)?);
        ys.push(parse(1)?);
    }
    Ok((xs, ys))
}

/// JSON experiment record of a field and its grid.
#[derive(Debug, Clone, Serialize)]
pub struct FieldRecord<'a> {
    pub alpha: f64,
    pub regime: Regime,
    pub kind: FieldKind,
    pub nodes: &'a [f64],
    pub values: &'a [f64],
}

pub fn field_record(field: &SpaceField) -> FieldRecord<'_> {
    FieldRecord {
        alpha: field.grid().alpha(),
        regime: field.grid().param().regime(),
        kind: field.kind(),
        nodes: field.grid().nodes(),
        values: field.values(),
    }
}

pub fn write_field_json<W: Write>(field: &SpaceField, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, &field_record(field)).map_err(|e| Error::Io(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SnapshotFormat {
    #[default]
    Csv,
    Binary,
}

const MAGIC: &[u8; 4] = b"DWS1";

/// Writes every `stride`-th time level (and always the last one).
///
/// CSV has columns `t,x,value`. The binary layout is little-endian: magic
/// `DWS1`, `u64` node count, `u64` level count, the nodes, then per level `t`
/// followed by the nodal values.
pub fn write_snapshots<W: Write>(
    field: &SpaceTimeField,
    stride: usize,
    format: SnapshotFormat,
    mut w: W,
) -> Result<()> {
    if stride == 0 {
        return Err(Error::Config("snapshot stride must be positive".into()));
    }
    let last = field.n_levels().saturating_sub(1);
    let levels: Vec<usize> = (0..field.n_levels())
        .filter(|k| k % stride == 0 || *k == last)
        .collect();
    let nodes = field.grid().nodes();
    match format {
        SnapshotFormat::Csv => {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(["t", "x", "value"]).map_err(csv_err)?;
            for &k in &levels {
                let t = field.times()[k].to_string();
                for (x, v) in nodes.iter().zip(field.level(k)) {
                    out.write_record([t.as_str(), &x.to_string(), &v.to_string()])
                        .map_err(csv_err)?;
                }
            }
            out.flush()?;
        }
        SnapshotFormat::Binary => {
            w.write_all(MAGIC)?;
            w.write_all(&(nodes.len() as u64).to_le_bytes())?;
            w.write_all(&(levels.len() as u64).to_le_bytes())?;
            for x in nodes {
                w.write_all(&x.to_le_bytes())?;
            }
            for &k in &levels {
                w.write_all(&field.times()[k].to_le_bytes())?;
                for v in field.level(k) {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// `(nodes, times, levels)` read back from a binary stream.
pub type Snapshots = (Vec<f64>, Vec<f64>, Vec<Vec<f64>>);

pub fn read_binary_snapshots<R: Read>(mut r: R) -> Result<Snapshots> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Io("not a snapshot stream".into()));
    }
    let mut word = [0u8; 8];
    let mut next_u64 = |r: &mut R| -> Result<u64> {
        r.read_exact(&mut word)?;
        Ok(u64::from_le_bytes(word))
    };
    let n_nodes = next_u64(&mut r)? as usize;
    let n_levels = next_u64(&mut r)? as usize;
    let read_f64s = |r: &mut R, n: usize| -> Result<Vec<f64>> {
        let mut buf = vec![0u8; 8 * n];
        r.read_exact(&mut buf)?;
        Ok(buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    };
    let nodes = read_f64s(&mut r, n_nodes)?;
    let mut times = Vec::with_capacity(n_levels);
    let mut levels = Vec::with_capacity(n_levels);
    for _ in 0..n_levels {
        times.push(read_f64s(&mut r, 1)?[0]);
        levels.push(read_f64s(&mut r, n_nodes)?);
    }
    Ok((nodes, times, levels))
}

/// Rebuilds a field from CSV written by [`write_field_csv`] on the given grid.
pub fn read_field_csv<R: Read>(grid: &Arc<Grid>, kind: FieldKind, r: R) -> Result<SpaceField> {
    let (xs, ys) = read_pairs_csv(r)?;
    if xs.len() != grid.n_nodes() || xs.iter().zip(grid.nodes()).any(|(a, b)| a != b) {
        return Err(Error::Io("CSV abscissae do not match the grid".into()));
    }
    SpaceField::new(grid.clone(), ys, kind)
}
