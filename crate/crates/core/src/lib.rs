//! Loop-erased random walk on Z², its escape probabilities, and the tools
//! used to measure its scaling: exact harmonic solves, crossing statistics,
//! discrete extremal length, and a Skorohod coupling of the walk to Brownian
//! motion.
//!
//! Every random quantity is driven by a [`walk::RandomStream`], so each
//! experiment is a pure function of its parameters and seed.

pub mod coupling;
pub mod crookedness;
pub mod error;
pub mod extremal;
pub mod harmonic;
pub mod cli;
pub mod harness;
pub mod lattice;
pub mod looperase;
pub mod solver;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use lattice::{BallSpec, LatticePath, LatticePoint};
pub use looperase::{loop_erase, sample_lerw, LerwSampleConfig, SelfAvoidingPath};
pub use walk::RandomStream;
