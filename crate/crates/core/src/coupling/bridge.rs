//! Unit crossings of a standard one-dimensional Brownian motion observed on
//! a fine grid, generated lazily by Brownian-bridge refinement.
//!
//! The path is produced on a coarse *root* grid of spacing `2^L · du`. A root
//! interval is bisected (the midpoint drawn from the exact bridge law) only
//! when the path could come within reach of a crossing inside it; an interval
//! whose endpoints stay more than `4.5` bridge standard deviations inside the
//! band `|B − ref| < 1` is passed over. Every value that is drawn has exactly
//! the law of the fine-grid walk; the pruning threshold only affects
//! crossings whose probability is below `e^{−40}`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Bridge standard deviations kept between an interval and a crossing.
const PRUNE_SIGMAS: f64 = 4.5;
/// Largest root spacing.
const MAX_ROOT_SPACING: f64 = 1.0 / 64.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Event {
    /// The path at a root-grid time.
    Root { index: u64, value: f64 },
    /// First fine-grid time with `|B − ref| ≥ 1`; the reference moves to
    /// `value`.
    Crossing { time: f64, value: f64, sign: i8 },
}

#[derive(Clone, Copy, Debug)]
enum Task {
    Interval { t0: u64, t1: u64, a: f64, b: f64 },
    RootEnd { t: u64, value: f64 },
}

pub(crate) struct CrossingGenerator {
    du: f64,
    /// Fine steps per root interval.
    root_steps: u64,
    rng: ChaCha8Rng,
    stack: Vec<Task>,
    end_t: u64,
    end_value: f64,
    reference: f64,
    started: bool,
}

impl CrossingGenerator {
    pub(crate) fn new(du: f64, rng: ChaCha8Rng) -> Self {
        let levels = if du >= MAX_ROOT_SPACING { 0 } else { (MAX_ROOT_SPACING / du).log2().floor() as u32 };
        CrossingGenerator {
            du,
            root_steps: 1u64 << levels,
            rng,
            stack: Vec::with_capacity(64),
            end_t: 0,
            end_value: 0.0,
            reference: 0.0,
            started: false,
        }
    }

    pub(crate) fn root_spacing(&self) -> f64 {
        self.root_steps as f64 * self.du
    }

    fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Next event in time order; the first event is the root point at 0.
    pub(crate) fn next_event(&mut self) -> Event {
        if !self.started {
            self.started = true;
            return Event::Root { index: 0, value: 0.0 };
        }
        loop {
            let task = match self.stack.pop() {
                Some(t) => t,
                None => {
                    let (t0, a) = (self.end_t, self.end_value);
                    let t1 = t0 + self.root_steps;
                    let b = a + self.normal() * (self.root_steps as f64 * self.du).sqrt();
                    self.end_t = t1;
                    self.end_value = b;
                    self.stack.push(Task::RootEnd { t: t1, value: b });
                    Task::Interval { t0, t1, a, b }
                }
            };
            match task {
                Task::RootEnd { t, value } => return Event::Root { index: t / self.root_steps, value },
                Task::Interval { t0, t1, a, b } => {
                    let len = t1 - t0;
                    if len == 1 {
                        let d = b - self.reference;
                        if d.abs() >= 1.0 {
                            self.reference = b;
                            return Event::Crossing { time: t1 as f64 * self.du, value: b, sign: if d > 0.0 { 1 } else { -1 } };
                        }
                        continue;
                    }
                    let reach = (a - self.reference).abs().max((b - self.reference).abs());
                    if reach + PRUNE_SIGMAS * (len as f64 * self.du).sqrt() < 1.0 {
                        continue;
                    }
                    let tm = t0 + len / 2;
                    let m = 0.5 * (a + b) + self.normal() * (0.25 * len as f64 * self.du).sqrt();
                    self.stack.push(Task::Interval { t0: tm, t1, a: m, b });
                    self.stack.push(Task::Interval { t0, t1: tm, a, b: m });
                }
            }
        }
    }
}
