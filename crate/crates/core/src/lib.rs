//! Lowest temporal-conductance community search in edge-weighted dynamic graphs.

pub mod calibrate;
pub mod driver;
pub mod error;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod pruning;
pub mod refine;
pub mod spectral;
pub mod synth;
pub mod tlsh;

pub use error::{Error, Result};
pub use graph::{
    conductance, eta, AggregatedGraph, GraphBuilder, Interval, NormalizationConfig, TemporalCommunity,
    TemporalGraph,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/conductance.md")]
    mod conductance {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/pruning.md")]
    mod pruning {}
    #[doc = include_str!("../../../book/src/hashing.md")]
    mod hashing {}
    #[doc = include_str!("../../../book/src/refinement.md")]
    mod refinement {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
