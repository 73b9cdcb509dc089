//! Append-only JSONL log plus a derived CSV summary.
//!
//! The JSONL file is the artifact of record; the CSV is regenerated from it
//! after every append, one row per distinct parameter cell.

use crate::records::ExperimentRecord;
use anyhow::{Context, Result};
use glasscut_core::math::mean_se;
use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

pub fn append_jsonl(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("open {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let file = File::open(path).with_context(|| format!("open {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ExperimentRecord =
            serde_json::from_str(&line).with_context(|| format!("line {}", i + 1))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn summary_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".summary.csv");
    PathBuf::from(s)
}

fn opt_num<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

/// Rebuild the CSV summary from the full JSONL contents: one row per
/// distinct (experiment, parameters, labels) cell with count, mean and
/// standard error.
pub fn write_summary(jsonl: &Path) -> Result<PathBuf> {
    let records = read_jsonl(jsonl)?;
    let mut cells: BTreeMap<Vec<String>, Vec<(f64, Option<f64>)>> = BTreeMap::new();
    for r in &records {
        let key = vec![
            r.experiment.clone(),
            r.ensemble.clone().unwrap_or_default(),
            opt_num(&r.n),
            opt_num(&r.gamma),
            opt_num(&r.a),
            opt_num(&r.b),
            opt_num(&r.beta),
            opt_num(&r.t),
            r.objective.clone().unwrap_or_default(),
            r.constraint.clone().unwrap_or_default(),
            r.solver.clone().unwrap_or_default(),
        ];
        cells.entry(key).or_default().push((r.value, r.normalized));
    }
    let out = summary_path(jsonl);
    let mut w = BufWriter::new(File::create(&out)?);
    writeln!(
        w,
        "experiment,ensemble,n,gamma,a,b,beta,t,objective,constraint,solver,\
         count,mean_value,mean_normalized,stderr"
    )?;
    for (key, vals) in &cells {
        let values: Vec<f64> = vals.iter().map(|v| v.0).collect();
        let (mean, se) = if values.len() >= 2 {
            let (m, s) = mean_se(&values);
            (m, s.to_string())
        } else {
            (values[0], String::new())
        };
        let norms: Vec<f64> = vals.iter().filter_map(|v| v.1).collect();
        let mean_norm = if norms.is_empty() {
            String::new()
        } else {
            (norms.iter().sum::<f64>() / norms.len() as f64).to_string()
        };
        writeln!(w, "{},{},{mean},{mean_norm},{se}", key.join(","), values.len())?;
    }
    w.flush()?;
    Ok(out)
}
