//! Dataset generation, CSV ingestion, index persistence and workload
//! benchmarking around `rankaccess-core`.

mod error;
pub mod gen;
pub mod ingest;
pub mod persist;
pub mod report;
pub mod workload;

pub use error::{BenchError, Result};
