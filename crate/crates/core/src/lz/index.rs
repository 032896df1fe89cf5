use crate::hia::TreePair;
use crate::tree::NodeId;

use super::parse::{parse_with, Lz77Parse};
use super::suffix::SuffixData;
use super::trie::{build_tries_with, BoundaryTrie};
use super::LzError;

/// Trie loci of both halves of a pattern split after `i` symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitLocus {
    pub v1: NodeId,
    pub lcp_left: usize,
    pub v2: NodeId,
    pub lcp_right: usize,
}

/// Entry `i` describes the split `P[..i] | P[i..]`, for `i` in `0..=m`.
pub type SplitLoci = Vec<SplitLocus>;

/// The text, its LZ77 parse, and the two boundary tries paired on their
/// shared boundary labels.
#[derive(Debug, Clone)]
pub struct LzIndex {
    text: Vec<u8>,
    parse: Lz77Parse,
    rev: BoundaryTrie,
    suf: BoundaryTrie,
    pair: TreePair,
}

impl LzIndex {
    pub fn build(text: Vec<u8>) -> Result<Self, LzError> {
        if text.is_empty() {
            return Err(LzError::Empty);
        }
        let sd = SuffixData::new(&text);
        let parse = parse_with(&text, &sd);
        let (rev, suf) = build_tries_with(&text, &parse, &sd);
        Self::from_parts(text, parse, rev, suf)
    }

    pub fn from_parts(
        text: Vec<u8>,
        parse: Lz77Parse,
        rev: BoundaryTrie,
        suf: BoundaryTrie,
    ) -> Result<Self, LzError> {
        if parse.text_len() != text.len() {
            return Err(LzError::BadParse("parse length differs from the text".into()));
        }
        let pair = TreePair::new(rev.tree().clone(), suf.tree().clone())
            .map_err(|e| LzError::BadTrie(e.to_string()))?;
        Ok(LzIndex { text, parse, rev, suf, pair })
    }

    pub fn text(&self) -> &[u8] {
        &self.text
    }

    pub fn parse(&self) -> &Lz77Parse {
        &self.parse
    }

    pub fn reversed_trie(&self) -> &BoundaryTrie {
        &self.rev
    }

    pub fn suffix_trie(&self) -> &BoundaryTrie {
        &self.suf
    }

    /// The reversed-phrase trie as `T1` and the suffix trie as `T2`.
    pub fn pair(&self) -> &TreePair {
        &self.pair
    }

    /// Last text position of phrase `k`.
    pub fn boundary(&self, k: usize) -> usize {
        self.parse.phrases()[k].end()
    }

    /// Loci of `reverse(P[..i])` in the reversed-phrase trie and of `P[i..]`
    /// in the suffix trie, for every split `i`.
    pub fn split_loci(&self, p: &[u8]) -> SplitLoci {
        let m = p.len();
        (0..=m)
            .map(|i| {
                let (v1, lcp_left) = self.rev.locus(&self.text, i, |d| p[i - 1 - d]);
                let (v2, lcp_right) = self.suf.locus(&self.text, m - i, |d| p[i + d]);
                SplitLocus { v1, lcp_left, v2, lcp_right }
            })
            .collect()
    }
}
