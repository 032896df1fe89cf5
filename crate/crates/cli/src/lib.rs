//! Building, querying and checking LZ77 longest-common-substring indexes
//! from the command line.

pub mod container;
pub mod report;
pub mod stats;
pub mod verify;

pub use container::{ContainerError, IndexContainer};
pub use report::{run_query, QueryReport};
pub use stats::IndexStats;
