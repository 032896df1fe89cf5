//! LZ77 parsing and the boundary tries built over the parse.

mod index;
mod parse;
pub mod suffix;
mod trie;

pub use index::{LzIndex, SplitLocus, SplitLoci};
pub use parse::{decompress, naive_lpf, parse, Lz77Parse, Phrase};
pub use trie::{build_tries, BoundaryTrie, TrieKind};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LzError {
    #[error("input text is empty")]
    Empty,
    #[error("invalid parse: {0}")]
    BadParse(String),
    #[error("invalid trie: {0}")]
    BadTrie(String),
}
