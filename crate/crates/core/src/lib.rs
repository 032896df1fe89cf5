//! Heaviest induced ancestor queries over pairs of weighted trees, and an
//! LZ77-compressed text index answering longest common substring queries
//! with them.

pub mod counters;
pub mod gen;
pub mod grid;
pub mod hia;
pub mod lcs;
pub mod lz;
pub mod rmq;
pub mod tree;

pub use counters::Counters;
