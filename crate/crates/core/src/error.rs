use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("cycle in parent image through pixel {pixel}")]
    Cycle { pixel: usize },

    #[error("invalid tree: {0}")]
    InvalidTree(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
