//! Scaling experiments. Each is a pure function of its parameters and the
//! stream; sample `i` at radius `n` of experiment `name` draws from
//! `stream.derive_named(name).derive(n.to_bits()).derive(i)`.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{loglog_fit, FitResult};
use crate::error::{validation, Result};
use crate::harmonic::{escape_probability_of, x_n_samples, MomentEstimate};
use crate::lattice::{BallSpec, LatticePoint};
use crate::looperase::{erase_into, with_lerw_sample, LerwSampleConfig};
use crate::stats::MeanEstimate;
use crate::walk::{extend_until_exit, RandomStream, StepSource};

/// One estimated point of a scaling curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatePoint {
    pub n: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl EstimatePoint {
    fn from_mean(n: f64, e: MeanEstimate) -> Self {
        EstimatePoint { n, estimate: e.mean, stderr: e.stderr, samples: e.samples }
    }
}

/// Inputs that, with the seed, determine an experiment's output.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParameters {
    pub radii: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub stream_id: u64,
    pub deltas: Vec<f64>,
    /// Other scalar settings by name (threshold constants, time index, …).
    pub extra: Vec<(String, f64)>,
    /// The LERW measure used, when one is.
    pub measure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub name: String,
    pub parameters: ExperimentParameters,
    pub points: Vec<EstimatePoint>,
    pub fit: Option<FitResult>,
    pub runtime_seconds: f64,
}

impl ExperimentRecord {
    /// Equality of everything except the wall-clock runtime.
    pub fn same_results(&self, other: &ExperimentRecord) -> bool {
        self.name == other.name && self.parameters == other.parameters && self.points == other.points && self.fit == other.fit
    }
}

const DOUBLED_MEASURE: &str = "LERW of a walk run to the circle of radius 2n, truncated at its first visit to the circle of radius n";

fn check_radii(radii: &[f64], min: usize) -> Result<()> {
    if radii.len() < min {
        return Err(validation(format!("at least {min} radii are required")));
    }
    if let Some(r) = radii.iter().find(|r| !(**r >= 1.0 && r.is_finite())) {
        return Err(validation(format!("radii must be finite and at least 1, got {r}")));
    }
    Ok(())
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(validation("at least two samples are required"));
    }
    Ok(())
}

fn params(radii: &[f64], samples: usize, stream: RandomStream) -> ExperimentParameters {
    ExperimentParameters {
        radii: radii.to_vec(),
        samples,
        seed: stream.seed,
        stream_id: stream.stream_id,
        ..Default::default()
    }
}

fn fit_points(points: &[EstimatePoint]) -> Result<FitResult> {
    loglog_fit(&points.iter().map(|p| (p.n, p.estimate)).collect::<Vec<_>>())
}

/// Stream for radius `n` of experiment `name`.
pub fn radius_stream(stream: RandomStream, name: &str, n: f64) -> RandomStream {
    stream.derive_named(name).derive(n.to_bits())
}

/// Mean number of steps `σ̂_n` of the LERW truncated at `∂C_n`, per radius,
/// and the log-log fit giving the growth exponent.
pub fn growth_exponent_experiment(radii: &[f64], samples: usize, stream: RandomStream) -> Result<ExperimentRecord> {
    check_radii(radii, 3)?;
    check_samples(samples)?;
    let start = Instant::now();
    let mut points = Vec::new();
    for &n in radii {
        let cfg = LerwSampleConfig::doubled(n)?;
        let s = radius_stream(stream, "growth", n);
        let lengths: Vec<f64> = (0..samples as u64)
            .into_par_iter()
            .map(|i| with_lerw_sample(&cfg, s.derive(i), |pts| (pts.len() - 1) as f64))
            .collect::<Result<_>>()?;
        points.push(EstimatePoint::from_mean(n, MeanEstimate::from_values(&lengths)));
    }
    let fit = fit_points(&points)?;
    let mut parameters = params(radii, samples, stream);
    parameters.measure = Some(DOUBLED_MEASURE.into());
    Ok(ExperimentRecord { name: "growth".into(), parameters, points, fit: Some(fit), runtime_seconds: start.elapsed().as_secs_f64() })
}

/// The half-line `{(k, 0) : 0 ≤ k ≤ ⌊n⌋ + 1}`, which reaches `∂C_n`.
pub fn half_line(n: f64) -> Vec<LatticePoint> {
    (0..=n.floor() as i32 + 1).map(|k| LatticePoint::new(k, 0)).collect()
}

/// Exact `Es_n` of the half-line obstacle per radius and its log-log fit.
pub fn beurling_experiment(radii: &[f64]) -> Result<ExperimentRecord> {
    check_radii(radii, 3)?;
    let start = Instant::now();
    let values: Vec<f64> = radii.par_iter().map(|&n| escape_probability_of(&half_line(n), n)).collect::<Result<_>>()?;
    let points: Vec<EstimatePoint> =
        radii.iter().zip(values).map(|(&n, es)| EstimatePoint { n, estimate: es, stderr: 0.0, samples: 0 }).collect();
    let fit = fit_points(&points)?;
    Ok(ExperimentRecord {
        name: "beurling".into(),
        parameters: ExperimentParameters { radii: radii.to_vec(), ..Default::default() },
        points,
        fit: Some(fit),
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Samples of `X_n` under `μ_{n,2n}` drawn from the stream of radius `n` of
/// the moments experiment.
pub fn moment_samples(n: f64, samples: usize, stream: RandomStream) -> Result<Vec<f64>> {
    x_n_samples(&LerwSampleConfig::doubled(n)?, samples, radius_stream(stream, "moments", n), false)
}

/// `E[X_n^k]` for each power `k` in `powers` (one record per power, sharing
/// the same sampled paths) with log-log fits.
pub fn xn_scaling_experiment(radii: &[f64], samples: usize, powers: &[u32], stream: RandomStream) -> Result<Vec<ExperimentRecord>> {
    check_radii(radii, 3)?;
    check_samples(samples)?;
    if powers.is_empty() || powers.iter().any(|k| !(1..=3).contains(k)) {
        return Err(validation("powers must be a non-empty subset of {1, 2, 3}"));
    }
    let start = Instant::now();
    let mut per_power: Vec<Vec<EstimatePoint>> = vec![Vec::new(); powers.len()];
    for &n in radii {
        let xs = moment_samples(n, samples, stream)?;
        for (slot, &k) in per_power.iter_mut().zip(powers) {
            let m = MomentEstimate::from_samples(&xs, n, k);
            slot.push(EstimatePoint { n, estimate: m.value, stderr: m.stderr, samples: m.samples });
        }
    }
    let runtime = start.elapsed().as_secs_f64();
    powers
        .iter()
        .zip(per_power)
        .map(|(&k, points)| {
            let mut parameters = params(radii, samples, stream);
            parameters.extra.push(("power".into(), k as f64));
            parameters.measure = Some(DOUBLED_MEASURE.into());
            Ok(ExperimentRecord { name: format!("moments_k{k}"), parameters, fit: Some(fit_points(&points)?), points, runtime_seconds: runtime })
        })
        .collect()
}

/// Fraction of `xs` at or above `c · n^{−1/2−δ}`.
pub fn tail_fraction(xs: &[f64], n: f64, c: f64, delta: f64) -> MeanEstimate {
    let threshold = c * n.powf(-0.5 - delta);
    MeanEstimate::from_indicators(xs.iter().map(|&x| x >= threshold))
}

/// `P{X_n ≥ c n^{−1/2−δ}}` from `samples` LERW paths under `μ_{n,2n}`.
pub fn tail_experiment(n: f64, c: f64, delta: f64, samples: usize, stream: RandomStream) -> Result<MeanEstimate> {
    check_samples(samples)?;
    if !(c > 0.0) || !delta.is_finite() {
        return Err(validation("tail threshold needs c > 0 and finite δ"));
    }
    let xs = x_n_samples(&LerwSampleConfig::doubled(n)?, samples, radius_stream(stream, "tail", n), false)?;
    Ok(tail_fraction(&xs, n, c, delta))
}

thread_local! {
    static NONERASURE_BUFFERS: std::cell::RefCell<(Vec<LatticePoint>, Vec<LatticePoint>)> =
        const { std::cell::RefCell::new((Vec::new(), Vec::new())) };
}

/// Whether `V(j, n) = {j ≤ σ_n; L(S[0, j]) ∩ S[j+1, σ_{2n}] = ∅}` occurs for
/// the walk driven by `stream`.
pub fn nonerasure_event(n: f64, j: usize, stream: RandomStream) -> Result<bool> {
    let inner = BallSpec::new(n)?;
    let outer = BallSpec::new(2.0 * n)?;
    NONERASURE_BUFFERS.with(|cell| {
        let (walk, erased) = &mut *cell.borrow_mut();
        walk.clear();
        walk.push(LatticePoint::ORIGIN);
        let mut steps = StepSource::new(stream);
        extend_until_exit(&outer, &mut steps, walk)?;
        let sigma_n = walk.iter().position(|&p| !inner.contains(p)).expect("walk leaves C_n before C_2n");
        if j > sigma_n {
            return Ok(false);
        }
        erased.clear();
        erase_into(&walk[..=j], erased);
        let prefix: std::collections::HashSet<LatticePoint> = erased.iter().copied().collect();
        Ok(!walk[j + 1..].iter().any(|p| prefix.contains(p)))
    })
}

/// Monte Carlo frequency of `V(j, n)` for `n² ≤ j ≤ 2n²`.
pub fn nonerasure_experiment(n: f64, j: usize, samples: usize, stream: RandomStream) -> Result<MeanEstimate> {
    check_samples(samples)?;
    let (lo, hi) = (n * n, 2.0 * n * n);
    if !((j as f64) >= lo - 1e-9 && (j as f64) <= hi + 1e-9) {
        return Err(validation(format!("time index {j} outside [n², 2n²] = [{lo}, {hi}]")));
    }
    let s = radius_stream(stream, "nonerasure", n).derive(j as u64);
    let hits: Vec<bool> = (0..samples as u64).into_par_iter().map(|i| nonerasure_event(n, j, s.derive(i))).collect::<Result<_>>()?;
    Ok(MeanEstimate::from_indicators(hits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_at_radius_one_is_one() {
        let rec = growth_exponent_experiment(&[1.0, 2.0, 3.0], 50, RandomStream::new(1, 0)).unwrap();
        assert_eq!(rec.points[0].estimate, 1.0);
        assert_eq!(rec.points[0].stderr, 0.0);
    }

    #[test]
    fn radius_one_moments() {
        let recs = xn_scaling_experiment(&[1.0, 2.0, 3.0], 20, &[1, 3], RandomStream::new(1, 0)).unwrap();
        assert_eq!(recs[0].points[0].estimate, 0.75);
        assert_eq!(recs[1].points[0].estimate, 27.0 / 64.0);
        assert_eq!(recs[0].name, "moments_k1");
    }

    #[test]
    fn beurling_values_decrease() {
        let rec = beurling_experiment(&[4.0, 8.0, 16.0]).unwrap();
        assert!(rec.points.windows(2).all(|w| w[1].estimate < w[0].estimate));
        assert!(beurling_experiment(&[4.0, 8.0]).is_err());
    }

    #[test]
    fn tail_threshold_above_one_is_zero() {
        let est = tail_experiment(4.0, 1e6, 0.1, 20, RandomStream::new(1, 0)).unwrap();
        assert_eq!(est.mean, 0.0);
        let xs = [0.1, 0.2, 0.3, 0.4];
        assert!(tail_fraction(&xs, 4.0, 0.5, 0.0).mean >= tail_fraction(&xs, 4.0, 0.7, 0.0).mean);
    }

    #[test]
    fn nonerasure_is_deterministic_and_checks_range() {
        let a = nonerasure_experiment(4.0, 16, 200, RandomStream::new(2, 0)).unwrap();
        let b = nonerasure_experiment(4.0, 16, 200, RandomStream::new(2, 0)).unwrap();
        assert_eq!(a, b);
        assert!(a.mean > 0.0 && a.mean < 1.0);
        assert!(nonerasure_experiment(4.0, 40, 10, RandomStream::new(2, 0)).is_err());
        assert!(nonerasure_experiment(4.0, 15, 10, RandomStream::new(2, 0)).is_err());
    }
}
