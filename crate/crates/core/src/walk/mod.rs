//! Simple random walk on Z² driven by [`RandomStream`]s.

mod stream;

pub use stream::{RandomStream, StepSource};

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::lattice::{BallSpec, LatticePath, LatticePoint, UNIT_STEPS};

/// Guard against a broken generator; recurrence makes real walks finish long before.
pub const STEP_CAP: u64 = 10_000_000_000;

/// A walk stopped on its first visit to `∂C_r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkSample {
    pub path: LatticePath,
    pub exit_index: usize,
    pub target_radius: f64,
}

/// Appends steps to `buf` (which must end at a point of `ball`) until the walk
/// leaves the ball. Returns the index of the exit point.
pub(crate) fn extend_until_exit(
    ball: &BallSpec,
    steps: &mut StepSource,
    buf: &mut Vec<LatticePoint>,
) -> Result<usize> {
    let mut cur = *buf.last().expect("walk buffer holds the start point");
    let mut taken: u64 = 0;
    while ball.contains(cur) {
        if taken >= STEP_CAP {
            return Err(Error::Internal(format!("walk exceeded {STEP_CAP} steps")));
        }
        cur = cur + UNIT_STEPS[steps.next_direction()];
        buf.push(cur);
        taken += 1;
    }
    Ok(buf.len() - 1)
}

/// Runs a simple random walk from `start` until its first visit to `∂C_radius`.
pub fn srw_until_exit(radius: f64, start: LatticePoint, stream: RandomStream) -> Result<WalkSample> {
    let ball = BallSpec::new(radius)?;
    if !ball.contains(start) {
        return Err(validation(format!("start {start} is not inside C_{radius}")));
    }
    let mut steps = StepSource::new(stream);
    let mut buf = vec![start];
    let exit_index = extend_until_exit(&ball, &mut steps, &mut buf)?;
    Ok(WalkSample {
        path: LatticePath::from_trusted(buf),
        exit_index,
        target_radius: radius,
    })
}

/// A simple random walk of exactly `t` steps.
pub fn srw_fixed_steps(t: usize, start: LatticePoint, stream: RandomStream) -> LatticePath {
    let mut steps = StepSource::new(stream);
    let mut points = Vec::with_capacity(t + 1);
    let mut cur = start;
    points.push(cur);
    for _ in 0..t {
        cur = cur + UNIT_STEPS[steps.next_direction()];
        points.push(cur);
    }
    LatticePath::from_trusted(points)
}
