//! Stochastic context models: image ensembles with exactly known per-image
//! constraints, and analyzers that recover those constraints from pixels.

// Negated float comparisons reject NaN on purpose; grids are indexed by position.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod alphabet;
pub mod error;
pub mod eval;
pub mod image;
pub mod io;
pub mod manifest;
pub mod report;
pub mod rng;
pub mod stats;
pub mod voronoi;

pub use error::{Error, Result};
pub use image::GrayImage;
pub use rng::{split_rng, RngStream};
pub mod config;
pub mod features;
pub mod flag;
pub mod imgproc;
pub mod pipeline;
pub mod plot;

pub use features::FeatureVector;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    struct Overview;
    #[doc = include_str!("../../../book/src/generate.md")]
    struct Generate;
    #[doc = include_str!("../../../book/src/analyze.md")]
    struct Analyze;
    #[doc = include_str!("../../../book/src/compare.md")]
    struct Compare;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
