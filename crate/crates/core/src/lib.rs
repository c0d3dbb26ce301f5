//! Reservoir computing with elementary cellular automata.
//!
//! A binary input stream is scattered onto a ring of cells by fixed random
//! mappings, the automaton is evolved for a few iterations per time step and
//! the visited states feed a linear readout. Two such systems can be stacked,
//! the second consuming the binarized predictions of the first.

pub mod bits;
pub mod ca;
pub mod encoder;
pub mod error;
pub mod linalg;
pub mod pipeline;
pub mod readout;
pub mod render;
pub mod reservoir;
pub mod sweep;
pub mod task;

pub use ca::{CaState, Rule};
pub use encoder::{EncoderConfig, MappingSet};
pub use error::{Error, Result};
pub use pipeline::{run, run_batch, run_layered, run_single, BatchResult, RunConfig, RunResult};
pub use readout::{binarize, ReadoutModel, TrainingBatch};
pub use reservoir::{FeatureVector, Reservoir, ReservoirParams};
pub use task::{all_patterns, evaluate, EvaluationResult, TaskSequence};
pub use sweep::{run_sweep, SweepSpec, SweepTables};
