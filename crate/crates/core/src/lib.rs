//! Aircraft maintenance staff scheduling.
//!
//! The crate generates synthetic maintenance instances, solves them with a
//! steady-state evolutionary algorithm whose chromosomes are decoded into
//! timetables, and ships an exact solver for tiny instances plus a batch
//! benchmark harness.

pub mod check;
pub mod decoder;
pub mod domain;
pub mod ea;
pub mod error;
pub mod export;
pub mod fitness;
pub mod generator;
pub mod harness;
pub mod io;
pub mod oracle;
pub mod rng;

pub use check::{check_schedule, ScheduleViolation};
pub use decoder::{decode, Decoder, Schedule};
pub use domain::*;
pub use ea::{run_ea, Chromosome, EaParams, Individual, RunResult};
pub use error::{Error, Result};
pub use fitness::{evaluate, FitnessReport, Penalties};
