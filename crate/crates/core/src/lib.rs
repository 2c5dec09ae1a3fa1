//! Network indicators for auditing the composition of evaluation panels.
//!
//! The crate builds three families of networks around the members of a
//! panel (co-authorship ego networks, journal-based networks, affiliation
//! based "affinity" networks), computes structural indicators on them and
//! compares panels against a control panel and against random panels drawn
//! from a candidate pool.
//!
//! Pipeline: [`ingest`] → [`builders`] → [`metrics`] / [`islands`] →
//! [`stats`] → [`report`]. [`io_pajek`] exports networks for external
//! drawing tools, and [`cli`] drives the whole thing from a config file.

pub mod builders;
pub mod cli;
pub mod config;
pub mod error;
pub mod ingest;
pub mod io_pajek;
pub mod islands;
pub mod metrics;
pub mod model;
pub mod report;
pub mod stats;
pub mod unionfind;

pub use error::{Error, Result};
pub use model::{BipartiteGraph, NodeAttrs, Partition, ScholarId, Side, WeightedGraph};
