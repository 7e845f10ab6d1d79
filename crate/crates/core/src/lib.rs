//! Algorithms for benchmarking ID-card presentation attack detection.
//!
//! Everything in this crate is pure computation over in-memory values: raster
//! geometry, binary features, projective estimation, split protocols,
//! ISO/IEC 30107-3 error rates and the Frechet distance between embedding
//! sets. File formats, image codecs and the command line live in the
//! `padbench` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod dataset;
pub mod features;
pub mod fid;
pub mod geometry;
pub mod imaging;
pub mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod rng;

pub use geometry::{Homography, Point, PointPair};
pub use imaging::{ImageBuffer, Quad};
