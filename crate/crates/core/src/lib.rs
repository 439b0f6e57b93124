//! Community search with outliers.
//!
//! Given query vertices `Q` and an outlier budget `k`, find a connected
//! induced subgraph keeping at least `|Q| - k` query vertices that
//! optimises diameter or minimum degree. See [`algorithms`] for the three
//! problem variants, [`oracle`] for the brute-force reference solver and
//! [`workload`] for query generation, metrics and parameter sweeps.

pub mod algorithms;
pub mod cli;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod workload;

pub use error::{Error, Result};
