//! Command-line front end: runs experiments, writes CSV/JSON artifacts and a
//! run manifest from which every numeric output can be regenerated.
//!
//! Per-point data go to `<name>.csv` with the header
//! `experiment,n,estimate,stderr,samples`; fits and reports go to
//! `<name>_fit.json`; every run writes `manifest.json`. Exit codes: 0 on
//! success, 2 on invalid input (including usage errors), 3 on numeric
//! failure, 1 on I/O failure.

mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::coupling::{crossing_increments, deviation_scaling};
use crate::crookedness::{straight_counts, tail_fraction};
use crate::error::{Error, Result};
use crate::extremal::{build_domain, extremal_length, pfluger_check, random_slits, serial_rule_check, Shape};
use crate::harness::{
    beurling_experiment, growth_exponent_experiment, moment_samples, nonerasure_experiment, radius_stream,
    tail_fraction as x_tail_fraction, xn_scaling_experiment, ExperimentRecord,
};
use crate::looperase::{sample_lerw, LerwSampleConfig};
use crate::stats::MeanEstimate;
use crate::walk::RandomStream;
use output::{write_csv, write_json, write_paths};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Parser, Debug, Clone, Serialize, Deserialize)]
#[command(name = "lerwlab", version, about = "Loop-erased random walk experiments")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CommonArgs {
    /// 64-bit master seed.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "LERWLAB_WORKERS")]
    pub workers: Option<usize>,
    /// Output directory (default: runs/<subcommand>).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

fn radii_arg(s: &str) -> std::result::Result<f64, String> {
    s.trim().parse::<f64>().map_err(|e| format!("{s}: {e}"))
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
pub enum Command {
    /// Sample LERW paths and write them as JSON lines.
    LerwSample {
        #[arg(long, default_value_t = 16.0)]
        radius: f64,
        /// Outer radius of the walk (default: twice the radius).
        #[arg(long)]
        outer: Option<f64>,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Growth exponent: mean LERW length against radius.
    Growth {
        #[arg(long, value_delimiter = ',', value_parser = radii_arg, default_value = "8,16,32,64,128,256")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Exact escape probability of the half-line.
    Beurling {
        #[arg(long, value_delimiter = ',', value_parser = radii_arg, default_value = "8,16,32,64,128,256")]
        radii: Vec<f64>,
    },
    /// Moments of the LERW escape probability X_n.
    Moments {
        #[arg(long, value_delimiter = ',', default_value = "1,3")]
        power: Vec<u32>,
        #[arg(long, value_delimiter = ',', value_parser = radii_arg, default_value = "8,16,32,64")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Tail probability P{X_n ≥ c n^(-1/2-δ)}.
    Tail {
        #[arg(long, value_delimiter = ',', value_parser = radii_arg, default_value = "16,32,64")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Non-erasure probability V(j, n) at j = factor · n².
    Nonerasure {
        #[arg(long, value_delimiter = ',', value_parser = radii_arg, default_value = "8,16,32")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        j_factor: f64,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Straightness tail and escape probability against crookedness.
    Crookedness {
        #[arg(long, value_delimiter = ',', default_value = "3,4,5,6")]
        scales: Vec<u32>,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        escape_scales: Vec<u32>,
        #[arg(long, default_value_t = 1500)]
        walkers: usize,
    },
    /// Extremal length golden values, serial rule and Pfluger comparison.
    Extremal {
        #[arg(long, default_value_t = 1.0 / 64.0)]
        mesh: f64,
        #[arg(long, default_value_t = 100)]
        instances: usize,
    },
    /// Skorohod coupling: crossing times and deviation scaling.
    Coupling {
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        /// Number of unit crossings for the crossing-time mean.
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_value = "256,1024,4096,16384")]
        horizons: Vec<usize>,
        #[arg(long, default_value_t = 128)]
        replications: usize,
        #[arg(long, default_value_t = 1e-6)]
        deviation_dt: f64,
    },
    /// Every experiment with its defaults, each in its own subdirectory.
    All,
    /// Re-run the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::LerwSample { .. } => "lerw-sample",
            Command::Growth { .. } => "growth",
            Command::Beurling { .. } => "beurling",
            Command::Moments { .. } => "moments",
            Command::Tail { .. } => "tail",
            Command::Nonerasure { .. } => "nonerasure",
            Command::Crookedness { .. } => "crookedness",
            Command::Extremal { .. } => "extremal",
            Command::Coupling { .. } => "coupling",
            Command::All => "all",
            Command::Replay { .. } => "replay",
        }
    }
}

/// Everything needed to re-run a command bit-identically.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command_line: Vec<String>,
    pub config: Cli,
    pub seed: u64,
    pub workers: usize,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<String>,
    pub notes: Vec<String>,
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Validation(_) | Error::Refused(_) => 2,
        Error::Numeric(_) | Error::Enclosed(_) => 3,
        Error::Internal(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => 1,
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let command_line = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(cli, command_line) {
        Ok(manifest) => {
            for o in &manifest.outputs {
                println!("{o}");
            }
            0
        }
        Err(e) => {
            eprintln!("lerwlab: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a parsed command and returns its manifest (already written to disk).
pub fn execute(cli: Cli, command_line: Vec<String>) -> Result<RunManifest> {
    if let Command::Replay { manifest } = &cli.command {
        let text = std::fs::read_to_string(manifest)?;
        let recorded: RunManifest = serde_json::from_str(&text)?;
        let mut again = Cli::try_parse_from(&recorded.command_line)
            .map_err(|e| Error::Validation(format!("manifest command line does not parse: {e}")))?;
        again.common.out = Some(cli.common.out.clone().unwrap_or_else(|| manifest.with_file_name("replay")));
        if cli.common.workers.is_some() {
            again.common.workers = cli.common.workers;
        }
        let mut line = recorded.command_line.clone();
        strip_flag(&mut line, "--out");
        line.push("--out".into());
        line.push(again.common.out.as_ref().unwrap().display().to_string());
        return execute(again, line);
    }
    let workers = cli.common.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(Error::Validation("workers must be positive".into()));
    }
    let out = cli.common.out.clone().unwrap_or_else(|| Path::new("runs").join(cli.command.name()));
    std::fs::create_dir_all(&out)?;
    let started = now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let stream = RandomStream::new(cli.common.seed, 0);
    let (outputs, notes) = pool.install(|| dispatch(&cli.command, stream, &out))?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command_line,
        config: cli.clone(),
        seed: cli.common.seed,
        workers,
        started_unix: started,
        finished_unix: now(),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        notes,
    };
    write_json(&out.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

fn strip_flag(line: &mut Vec<String>, flag: &str) {
    let mut i = 0;
    while i < line.len() {
        if line[i] == flag {
            line.drain(i..(i + 2).min(line.len()));
        } else if line[i].starts_with(&format!("{flag}=")) {
            line.remove(i);
        } else {
            i += 1;
        }
    }
}

type Produced = (Vec<PathBuf>, Vec<String>);

fn record_rows(rec: &ExperimentRecord) -> Vec<CsvRow> {
    rec.points.iter().map(|p| CsvRow::from_point(&rec.name, p)).collect()
}

fn save_record(out: &Path, stem: &str, recs: &[ExperimentRecord]) -> Result<Vec<PathBuf>> {
    let csv = out.join(format!("{stem}.csv"));
    write_csv(&csv, &recs.iter().flat_map(record_rows).collect::<Vec<_>>())?;
    let fits: Vec<_> = recs.iter().map(|r| (&r.name, &r.fit, &r.parameters)).collect();
    let json = out.join(format!("{stem}_fit.json"));
    write_json(&json, &fits)?;
    Ok(vec![csv, json])
}

fn dispatch(cmd: &Command, stream: RandomStream, out: &Path) -> Result<Produced> {
    let measure_note = "LERW lengths and escape probabilities use the walk run to radius 2n and truncated at radius n".to_string();
    match cmd {
        Command::LerwSample { radius, outer, samples } => {
            let cfg = LerwSampleConfig::new(*radius, outer.unwrap_or(2.0 * radius))?;
            let s = radius_stream(stream, "lerw-sample", *radius);
            let paths = (0..*samples as u64).map(|i| sample_lerw(&cfg, s.derive(i))).collect::<Result<Vec<_>>>()?;
            let file = out.join("paths.jsonl");
            write_paths(&file, &paths)?;
            Ok((vec![file], vec![]))
        }
        Command::Growth { radii, samples } => {
            let rec = growth_exponent_experiment(radii, *samples, stream)?;
            Ok((save_record(out, "growth", &[rec])?, vec![measure_note]))
        }
        Command::Beurling { radii } => {
            let rec = beurling_experiment(radii)?;
            Ok((save_record(out, "beurling", &[rec])?, vec![]))
        }
        Command::Moments { power, radii, samples } => {
            let recs = xn_scaling_experiment(radii, *samples, power, stream)?;
            Ok((save_record(out, "moments", &recs)?, vec![measure_note]))
        }
        Command::Tail { radii, c, delta, samples } => {
            let mut rows = Vec::new();
            for &n in radii {
                let xs = moment_samples(n, *samples, stream)?;
                rows.push(CsvRow::from_mean("tail", n, x_tail_fraction(&xs, n, *c, *delta)));
            }
            let csv = out.join("tail.csv");
            write_csv(&csv, &rows)?;
            Ok((vec![csv], vec![measure_note, format!("threshold c·n^(-1/2-δ) with c = {c}, δ = {delta}")]))
        }
        Command::Nonerasure { radii, j_factor, samples } => {
            let mut rows = Vec::new();
            for &n in radii {
                let j = (j_factor * n * n).round() as usize;
                rows.push(CsvRow::from_mean("nonerasure", n, nonerasure_experiment(n, j, *samples, stream)?));
            }
            let csv = out.join("nonerasure.csv");
            write_csv(&csv, &rows)?;
            Ok((vec![csv], vec![format!("time index j = round({j_factor} · n²)")]))
        }
        Command::Crookedness { scales, delta, epsilon, samples, escape_scales, walkers } => {
            let mut rows = Vec::new();
            for &n in scales {
                let counts = straight_counts(n, *delta, *samples, 2.0, stream.derive_named("straightness").derive(n as u64))?;
                rows.push(CsvRow::from_mean("straightness_tail", n as f64, tail_fraction(&counts, n, *epsilon)));
            }
            let reg = crate::extremal::escape_vs_crookedness(escape_scales, *delta, *walkers, stream.derive_named("escape"))?;
            for b in &reg.buckets {
                rows.push(CsvRow::from_mean(&format!("escape_m{}", b.m), b.crooked as f64, b.escape));
            }
            let csv = out.join("crookedness.csv");
            write_csv(&csv, &rows)?;
            let json = out.join("crookedness_fit.json");
            write_json(&json, &reg)?;
            Ok((vec![csv, json], vec![format!("δ = {delta}, ε = {epsilon}"), measure_note]))
        }
        Command::Extremal { mesh, instances } => extremal_run(*mesh, *instances, stream, out),
        Command::Coupling { dt, samples, horizons, replications, deviation_dt } => {
            let etas = crossing_increments(*dt, *samples, stream.derive_named("crossings"))?;
            let mut rows = vec![CsvRow::from_mean("eta_mean", *samples as f64, MeanEstimate::from_values(&etas))];
            let fit = deviation_scaling(horizons, *replications, *deviation_dt, stream.derive_named("deviation"))?;
            for &(ln_n, ln_d) in &fit.points {
                rows.push(CsvRow { experiment: "deviation_median".into(), n: ln_n.exp().round(), estimate: ln_d.exp(), stderr: 0.0, samples: *replications });
            }
            let csv = out.join("coupling.csv");
            write_csv(&csv, &rows)?;
            let json = out.join("coupling_fit.json");
            write_json(&json, &fit)?;
            Ok((vec![csv, json], vec!["crossing times on the clock u = t/2 of the standard Brownian motion".into()]))
        }
        Command::All => {
            let mut outputs = Vec::new();
            let mut notes = Vec::new();
            for sub in all_commands() {
                let dir = out.join(sub.name());
                std::fs::create_dir_all(&dir)?;
                let (o, n) = dispatch(&sub, stream, &dir)?;
                outputs.extend(o);
                notes.extend(n);
            }
            Ok((outputs, notes))
        }
        Command::Replay { .. } => Err(Error::Internal("nested replay".into())),
    }
}

fn all_commands() -> Vec<Command> {
    ["growth", "beurling", "moments", "tail", "nonerasure", "crookedness", "extremal", "coupling"]
        .iter()
        .map(|name| Cli::try_parse_from(["lerwlab", name]).expect("default arguments parse").command)
        .collect()
}

#[derive(Serialize)]
struct ExtremalReport {
    rectangles: Vec<(f64, f64, f64)>,
    split_annulus: Vec<(f64, f64)>,
    serial_relative_slack: Vec<f64>,
    pfluger: Vec<crate::extremal::PflugerReport>,
}

fn extremal_run(mesh: f64, instances: usize, stream: RandomStream, out: &Path) -> Result<Produced> {
    use rayon::prelude::*;
    let mut rows = Vec::new();
    let mut report = ExtremalReport { rectangles: vec![], split_annulus: vec![], serial_relative_slack: vec![], pfluger: vec![] };
    for (a, b) in [(1.0, 1.0), (2.0, 1.0)] {
        let m = extremal_length(&build_domain(&Shape::Rectangle { a, b }, mesh)?)?;
        rows.push(CsvRow { experiment: "rectangle".into(), n: a / b, estimate: m.extremal_length, stderr: 0.0, samples: 0 });
        report.rectangles.push((a, b, m.extremal_length));
    }
    for n in [1.0, 2.0] {
        let m = extremal_length(&build_domain(&Shape::SplitAnnulus { n }, mesh / 2.0)?)?;
        rows.push(CsvRow { experiment: "split_annulus".into(), n, estimate: m.extremal_length, stderr: 0.0, samples: 0 });
        report.split_annulus.push((n, m.extremal_length));
    }
    let radii = serial_radii();
    let slacks: Vec<f64> = (0..instances as u64)
        .into_par_iter()
        .map(|i| Ok(serial_rule_check(&random_slits(radii[0], stream.derive_named("slits").derive(i)), &radii, mesh)?.relative_slack))
        .collect::<Result<_>>()?;
    let worst = slacks.iter().copied().fold(f64::INFINITY, f64::min);
    rows.push(CsvRow { experiment: "serial_min_relative_slack".into(), n: radii.len() as f64 - 1.0, estimate: worst, stderr: 0.0, samples: instances });
    report.serial_relative_slack = slacks;
    for l in [std::f64::consts::PI / 8.0, std::f64::consts::PI / 4.0, std::f64::consts::PI / 2.0, std::f64::consts::PI] {
        let p = pfluger_check(l, 2, mesh)?;
        rows.push(CsvRow { experiment: "pfluger_r2".into(), n: l, estimate: p.value, stderr: 0.0, samples: 0 });
        report.pfluger.push(p);
    }
    let csv = out.join("extremal.csv");
    write_csv(&csv, &rows)?;
    let json = out.join("extremal_fit.json");
    write_json(&json, &report)?;
    Ok((vec![csv, json], vec![format!("mesh {mesh}; split annulus at mesh {}", mesh / 2.0)]))
}

/// Shell radii `e^{-1.5}, e^{-1}, e^{-0.5}, 1` for the serial-rule instances.
pub fn serial_radii() -> Vec<f64> {
    (0..4).map(|j| (-0.5 * (3 - j) as f64).exp()).collect()
}

pub use output::CsvRow;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_defaults_parse() {
        assert_eq!(all_commands().len(), 8);
    }

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(exit_code(&Error::Validation("x".into())), 2);
        assert_eq!(exit_code(&Error::Refused("x".into())), 2);
        assert_eq!(exit_code(&Error::Numeric("x".into())), 3);
        assert_eq!(exit_code(&Error::Internal("x".into())), 1);
    }

    #[test]
    fn strip_flag_removes_both_forms() {
        let mut line: Vec<String> = ["lerwlab", "--out", "a", "growth", "--out=b"].map(String::from).to_vec();
        strip_flag(&mut line, "--out");
        assert_eq!(line, ["lerwlab", "growth"]);
    }
}
