//! Fitness-landscape statistics for comparing neighbourhood search with
//! random sampling.
//!
//! Landscapes are reduced to a fitness histogram plus a level-to-level
//! neighbour matrix. Every statistic is an exact rational, every property
//! check returns a verdict with the first violated comparison, and the
//! built-in problems can be enumerated exhaustively in parallel with
//! results that do not depend on the worker count.

pub mod aggregate;
pub mod error;
pub mod grid;
pub mod histogram;
pub mod io;
pub mod problem;
pub mod problems;
pub mod properties;
pub mod rational;
pub mod report;
pub mod search;
pub mod synth;

pub use aggregate::{AggregateLandscape, DeltaEntry, DeltaProfile};
pub use error::{Error, Result};
pub use grid::{Binning, FitnessGrid, FitnessScale, Sense};
pub use histogram::FitnessHistogram;
pub use problem::{
    build_aggregate, build_histogram, index_levels, EnumerationConfig, ExplicitProblem, LevelIndex,
};
pub use rational::Rational;
pub use report::{Property, PropertyReport, Verdict, Witness};
