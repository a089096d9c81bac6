use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("work package {0} is not in the catalog")]
    UnknownWorkPackage(u16),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("generation exhausted after {attempts} attempts: {last_failure}")]
    Exhausted { attempts: usize, last_failure: String },

    #[error("work package {wp} work order {wo} slot {slot} has no qualified technician")]
    Unsolvable { wp: u16, wo: usize, slot: usize },

    #[error("crossover parents are not permutations of the same genes")]
    MismatchedParents,

    #[error("oracle refuses instance: {0}")]
    OracleRefused(String),

    #[error("empty batch")]
    EmptyBatch,

    #[error("unknown export format `{0}`")]
    UnknownFormat(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
