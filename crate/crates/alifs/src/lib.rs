//! Configuration files, sharded parallel execution, output formats and the
//! command pipeline around `alifs-core`.

#![warn(missing_docs)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod io;
pub mod parallel;
pub mod pipeline;
pub mod report;

pub use config::RunConfig;
pub use pipeline::{run, Command};
pub use report::Report;
