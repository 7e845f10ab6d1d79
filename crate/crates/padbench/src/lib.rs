//! File formats, image codecs and the `padbench` command line on top of
//! [`padbench_core`].

pub mod cli;
pub mod det_export;
pub mod embeddings;
pub mod error;
pub mod formats;
pub mod fsutil;
pub mod image_io;
pub mod rules;
pub mod scores;

pub use error::{Error, Result};
