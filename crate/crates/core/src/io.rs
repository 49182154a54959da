//! CSV and JSON exchange formats for samples, paths and estimation results.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::contrast::EstimationResult;
use crate::error::{Error, Result};
use crate::fbm::{FgnSample, HurstIndex};
use crate::scalar::Real;
use crate::simulate::{ObservedPath, SamplingScheme};

/// Relative tolerance for the uniform-grid check on imported time stamps.
pub const GRID_TOLERANCE: f64 = 1e-9;

pub fn to_json<V: Serialize, W: Write>(value: &V, writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, value)?;
    Ok(())
}

pub fn from_json<V: DeserializeOwned, R: Read>(reader: R) -> Result<V> {
    Ok(serde_json::from_reader(reader)?)
}

/// `index,increment`, one row per increment.
pub fn write_fgn_csv<T: Real, W: Write>(sample: &FgnSample<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["index", "increment"])?;
    for (i, x) in sample.increments.iter().enumerate() {
        w.write_record([i.to_string(), x.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_field(record: &csv::StringRecord, idx: usize, row: usize, name: &str) -> Result<f64> {
    let raw = record.get(idx).ok_or_else(|| Error::Parse {
        row,
        message: format!("missing column '{name}'"),
    })?;
    let v: f64 = raw.trim().parse().map_err(|_| Error::Parse {
        row,
        message: format!("column '{name}': '{raw}' is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            row,
            message: format!("column '{name}' is not finite"),
        });
    }
    Ok(v)
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name))
}

pub fn read_fgn_csv<T: Real, R: Read>(reader: R, spacing: T, hurst: HurstIndex<T>, seed: u64) -> Result<FgnSample<T>> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    let col = column(&headers, "increment").ok_or_else(|| Error::Parse {
        row: 0,
        message: "header has no 'increment' column".into(),
    })?;
    let mut increments = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        increments.push(T::lit(parse_field(&rec, col, i + 1, "increment")?));
    }
    FgnSample::new(increments, spacing, hurst, seed)
}

/// `k,t,X` and, when present, `dB`.
pub fn write_path_csv<T: Real, W: Write>(path: &ObservedPath<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let with_db = path.driving_increments.is_some();
    if with_db {
        w.write_record(["k", "t", "X", "dB"])?;
    } else {
        w.write_record(["k", "t", "X"])?;
    }
    for (k, x) in path.values.iter().enumerate() {
        let mut row = vec![k.to_string(), path.scheme.time(k).to_string(), x.to_string()];
        if let Some(db) = &path.driving_increments {
            // dB_k = B_{t_k} − B_{t_{k−1}}; empty on the first row
            row.push(if k == 0 { String::new() } else { db[k - 1].to_string() });
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an observed path. The step is inferred from the `t` column, which
/// must be uniformly spaced; `dB` is kept when the column is present.
pub fn read_path_csv<T: Real, R: Read>(reader: R, sigma: T, hurst: HurstIndex<T>) -> Result<ObservedPath<T>> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    let missing = |name: &str| Error::Parse {
        row: 0,
        message: format!("header has no '{name}' column"),
    };
    let t_col = column(&headers, "t").ok_or_else(|| missing("t"))?;
    let x_col = column(&headers, "X").ok_or_else(|| missing("X"))?;
    let db_col = column(&headers, "dB");
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut db = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        times.push(parse_field(&rec, t_col, row, "t")?);
        values.push(T::lit(parse_field(&rec, x_col, row, "X")?));
        if let Some(c) = db_col {
            if row > 1 {
                db.push(T::lit(parse_field(&rec, c, row, "dB")?));
            }
        }
    }
    if values.len() < 2 {
        return Err(Error::Parse {
            row: values.len(),
            message: "a path needs at least two observations".into(),
        });
    }
    let n = values.len() - 1;
    let h = (times[n] - times[0]) / n as f64;
    if !(h > 0.0) {
        return Err(Error::Parse {
            row: n + 1,
            message: "time stamps must be increasing".into(),
        });
    }
    for k in 1..=n {
        let step = times[k] - times[k - 1];
        if (step - h).abs() > GRID_TOLERANCE * h.max(1.0) * 1e3 {
            return Err(Error::Parse {
                row: k + 1,
                message: format!("non-uniform grid: step {step} differs from mean step {h}"),
            });
        }
    }
    let path = ObservedPath {
        scheme: SamplingScheme::with_step(n, T::lit(h), 1)?,
        values,
        driving_increments: db_col.map(|_| db),
        sigma,
        theta_true: None,
        hurst,
    };
    path.validate()?;
    Ok(path)
}

/// Header matching [`estimation_csv_row`] for a `d`-dimensional parameter.
pub fn estimation_csv_header(d: usize) -> Vec<String> {
    let mut h: Vec<String> = (0..d).map(|i| format!("theta_hat_{i}")).collect();
    h.push("abs_qn_at_opt".into());
    h.push("boundary".into());
    h
}

pub fn estimation_csv_row<T: Real>(result: &EstimationResult<T>) -> Vec<String> {
    let mut row: Vec<String> = result.theta_hat.iter().map(|t| t.to_string()).collect();
    row.push(result.abs_qn_at_opt.to_string());
    row.push(result.boundary.to_string());
    row
}

/// Header plus one summary line.
pub fn write_estimation_csv<T: Real, W: Write>(result: &EstimationResult<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(estimation_csv_header(result.theta_hat.len()))?;
    w.write_record(estimation_csv_row(result))?;
    w.flush()?;
    Ok(())
}
