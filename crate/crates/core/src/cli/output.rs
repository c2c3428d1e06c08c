//! Artifact writers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::EstimatePoint;
use crate::looperase::SelfAvoidingPath;
use crate::stats::MeanEstimate;

/// One line of a per-point CSV file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub experiment: String,
    pub n: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl CsvRow {
    pub fn from_point(experiment: &str, p: &EstimatePoint) -> Self {
        CsvRow { experiment: experiment.into(), n: p.n, estimate: p.estimate, stderr: p.stderr, samples: p.samples }
    }

    pub fn from_mean(experiment: &str, n: f64, e: MeanEstimate) -> Self {
        CsvRow { experiment: experiment.into(), n, estimate: e.mean, stderr: e.stderr, samples: e.samples }
    }
}

pub fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(["experiment", "n", "estimate", "stderr", "samples"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// One JSON array of `[x, y]` pairs per line.
pub fn write_paths(path: &Path, paths: &[SelfAvoidingPath]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for p in paths {
        let pairs: Vec<[i32; 2]> = p.points().iter().map(|q| [q.x, q.y]).collect();
        serde_json::to_writer(&mut w, &pairs)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
