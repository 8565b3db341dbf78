//! Spectral distribution estimates for graph Laplacians from random spanning forests.

pub mod alias;
pub mod embed;
pub mod error;
pub mod estimator;
pub mod exec;
pub mod forest;
pub mod generate;
pub mod graph;
pub mod io;
pub mod maxent;
pub mod moments;
pub mod oracle;
pub mod pipeline;
pub mod seed;

pub use error::{Error, Result};
pub use exec::Execution;
pub use graph::{GraphScalars, WeightedGraph};
