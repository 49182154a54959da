//! Deterministic CSV/JSON emitters for study results.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::stats;
use crate::study::StudyResult;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn dim(result: &StudyResult) -> usize {
    result
        .records
        .iter()
        .map(|r| r.zeta.len().max(r.weighted_sum.len()))
        .max()
        .unwrap_or(0)
}

/// One row per completed replicate.
pub fn write_records_csv<W: Write>(result: &StudyResult, writer: W) -> Result<()> {
    let d = dim(result);
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = vec!["n".into(), "replicate".into(), "seed".into()];
    header.extend((0..d).map(|i| format!("theta_hat_{i}")));
    header.extend((0..d).map(|i| format!("zeta_{i}")));
    header.extend(["abs_qn", "boundary", "remainder", "statistic"].map(String::from));
    header.extend((0..d).map(|i| format!("weighted_sum_{i}")));
    header.extend((0..d).map(|i| format!("drift_moment_{i}")));
    header.push("second_moment".into());
    w.write_record(&header)?;
    let cell = |v: &[f64], i: usize| v.get(i).map(|x| x.to_string()).unwrap_or_default();
    for r in &result.records {
        let mut row = vec![r.n.to_string(), r.replicate.to_string(), r.seed.to_string()];
        row.extend((0..d).map(|i| cell(&r.theta_hat, i)));
        row.extend((0..d).map(|i| cell(&r.zeta, i)));
        row.push(opt(r.abs_qn));
        row.push(r.boundary.to_string());
        row.push(opt(r.remainder));
        row.push(opt(r.statistic));
        row.extend((0..d).map(|i| cell(&r.weighted_sum, i)));
        row.extend((0..d).map(|i| cell(&r.drift_moment, i)));
        row.push(opt(r.second_moment));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Median absolute error per `n` and component.
pub fn write_median_error_csv<W: Write>(result: &StudyResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["n", "h", "tau", "component", "median_abs_error", "median_abs_remainder"])?;
    for s in &result.per_n {
        for (i, m) in s.median_abs_error.iter().enumerate() {
            w.write_record([
                s.n.to_string(),
                s.h.to_string(),
                s.tau.to_string(),
                i.to_string(),
                m.to_string(),
                opt(s.median_abs_remainder),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// KS verdicts, one row per test.
pub fn write_normality_csv<W: Write>(result: &StudyResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "n",
        "convention",
        "info_reading",
        "component",
        "target_variance",
        "empirical_variance",
        "variance_ratio",
        "ks_statistic",
        "p_value",
    ])?;
    for t in &result.normality {
        w.write_record([
            t.n.to_string(),
            t.convention.as_str().to_string(),
            t.info_reading.map(|r| r.as_str().to_string()).unwrap_or_default(),
            t.component.to_string(),
            t.target_variance.to_string(),
            t.empirical_variance.to_string(),
            t.variance_ratio.to_string(),
            t.ks.statistic.to_string(),
            t.ks.p_value.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Empirical CDF of `ζ` (or of the fGn statistic) against each target CDF.
pub fn write_ecdf_csv<W: Write>(result: &StudyResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "n",
        "convention",
        "info_reading",
        "component",
        "x",
        "empirical_cdf",
        "target_cdf",
    ])?;
    for t in &result.normality {
        let sample: Vec<f64> = match t.info_reading {
            Some(_) => result.records_for(t.n).map(|r| r.zeta[t.component]).collect(),
            None => result.records_for(t.n).filter_map(|r| r.statistic).collect(),
        };
        for (x, e, f) in stats::ecdf_against_normal(&sample, 0.0, t.target_variance)? {
            w.write_record([
                t.n.to_string(),
                t.convention.as_str().to_string(),
                t.info_reading.map(|r| r.as_str().to_string()).unwrap_or_default(),
                t.component.to_string(),
                x.to_string(),
                e.to_string(),
                f.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(result: &StudyResult, writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, result)?;
    Ok(())
}

/// Writes every artifact of a study into `dir` and returns the paths in a fixed order.
pub fn write_study(result: &StudyResult, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    let mut emit = |name: &str, f: &dyn Fn(&mut BufWriter<File>) -> Result<()>| -> Result<()> {
        let p = dir.join(name);
        let mut w = BufWriter::new(File::create(&p)?);
        f(&mut w)?;
        w.flush()?;
        paths.push(p);
        Ok(())
    };
    emit("records.csv", &|w| write_records_csv(result, w))?;
    emit("median_error.csv", &|w| write_median_error_csv(result, w))?;
    if !result.normality.is_empty() {
        emit("normality.csv", &|w| write_normality_csv(result, w))?;
        emit("ecdf.csv", &|w| write_ecdf_csv(result, w))?;
    }
    emit("result.json", &|w| write_json(result, w))?;
    Ok(paths)
}
