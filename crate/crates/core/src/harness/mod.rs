//! Exponent-estimation experiments and their regressions.

mod experiments;
mod fit;

pub use experiments::{
    beurling_experiment, growth_exponent_experiment, half_line, moment_samples, nonerasure_event, nonerasure_experiment,
    radius_stream, tail_experiment, tail_fraction, xn_scaling_experiment, EstimatePoint, ExperimentParameters,
    ExperimentRecord,
};
pub use fit::{loglog_fit, FitResult};
