//! Heaviest-induced-ancestor queries over two trees on a shared leaf set.
//!
//! Two nodes `u1 ∈ T1`, `u2 ∈ T2` are *induced* together when they have a
//! common leaf descendant. Given `v1` and `v2`, a query returns an induced
//! pair of their ancestors maximizing `weight(u1) + weight(u2)`, where the
//! weights of `v1`/`v2` themselves may be overridden by smaller values.

mod baseline;
mod lists;
mod sampled;
mod skyline;

pub use baseline::{naive_hia, BaselineEngine, NaiveOracle};
pub use lists::{extended_lists, ExtPair, PathPair};
pub use sampled::{recover_between, SampleRate, SampledEngine};
pub use skyline::{query_path_pair, SkylineEngine, SkylineList, SkylinePair};

use thiserror::Error;

use crate::counters::Counters;
use crate::grid::{GridIndex, LeafPermutation, Rect};
use crate::tree::{
    HeavyPathDecomposition, NodeId, Orientation, TreeError, Weight, WeightedTree,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HiaError {
    #[error("node {node} is not in tree {tree}")]
    UnknownNode { tree: u8, node: NodeId },
    #[error("override {value} for node {node} of tree {tree} must lie in ({lo}, {hi}]")]
    BadOverride {
        tree: u8,
        node: NodeId,
        value: Weight,
        lo: i128,
        hi: Weight,
    },
    #[error("trees have {0} and {1} leaves")]
    LeafCountMismatch(usize, usize),
    #[error("samples are out of order")]
    MisorderedSamples,
    #[error("block {block} does not exist (list has {blocks} blocks)")]
    NoSuchBlock { block: usize, blocks: usize },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Two decomposed trees and the grid of their leaf correspondence.
///
/// `T1` is decomposed heavy-leftmost and `T2` heavy-rightmost, so the leaves
/// below a heavy-path node but not below its path child form one contiguous
/// rank interval in each tree.
#[derive(Debug, Clone)]
pub struct TreePair {
    t1: WeightedTree,
    t2: WeightedTree,
    d1: HeavyPathDecomposition,
    d2: HeavyPathDecomposition,
    grid: GridIndex,
}

impl TreePair {
    pub fn new(t1: WeightedTree, t2: WeightedTree) -> Result<Self, HiaError> {
        if t1.leaf_count() != t2.leaf_count() {
            return Err(HiaError::LeafCountMismatch(t1.leaf_count(), t2.leaf_count()));
        }
        let d1 = HeavyPathDecomposition::new(&t1, Orientation::HeavyLeftmost)?;
        let d2 = HeavyPathDecomposition::new(&t2, Orientation::HeavyRightmost)?;
        let pi = leaf_permutation(&t1, &d1, &d2);
        let grid = GridIndex::build(pi);
        Ok(TreePair { t1, t2, d1, d2, grid })
    }

    pub fn t1(&self) -> &WeightedTree {
        &self.t1
    }

    pub fn t2(&self) -> &WeightedTree {
        &self.t2
    }

    pub fn d1(&self) -> &HeavyPathDecomposition {
        &self.d1
    }

    pub fn d2(&self) -> &HeavyPathDecomposition {
        &self.d2
    }

    pub fn grid(&self) -> &GridIndex {
        &self.grid
    }

    pub fn leaf_count(&self) -> usize {
        self.t1.leaf_count()
    }

    pub fn induced_with(&self, u1: NodeId, u2: NodeId, c: &mut Counters) -> bool {
        let r = Rect::from_intervals(self.d1.interval(u1), self.d2.interval(u2));
        self.grid.is_nonempty_with(&r, c)
    }

    /// True iff `u1` and `u2` share a leaf descendant.
    pub fn induced(&self, u1: NodeId, u2: NodeId) -> bool {
        self.induced_with(u1, u2, &mut Counters::default())
    }

    /// Label of some leaf below both `u1` and `u2`.
    pub fn common_leaf(&self, u1: NodeId, u2: NodeId, c: &mut Counters) -> Option<usize> {
        let r = Rect::from_intervals(self.d1.interval(u1), self.d2.interval(u2));
        let (x, _) = *self.grid.report_limit_with(&r, 1, c).first()?;
        self.t1.leaf_label(self.d1.leaf_at_rank(x))
    }

    pub(crate) fn check(&self, q: &HiaQuery) -> Result<(), HiaError> {
        check_side(&self.t1, 1, q.v1, q.w1)?;
        check_side(&self.t2, 2, q.v2, q.w2)
    }
}

fn leaf_permutation(
    t1: &WeightedTree,
    d1: &HeavyPathDecomposition,
    d2: &HeavyPathDecomposition,
) -> LeafPermutation {
    let pi = (0..t1.leaf_count())
        .map(|x| d2.leaf_rank(t1.leaf_label(d1.leaf_at_rank(x)).unwrap()))
        .collect();
    LeafPermutation::new(pi).expect("labels are a bijection")
}

fn check_side(t: &WeightedTree, tree: u8, v: NodeId, w: Option<Weight>) -> Result<(), HiaError> {
    if !t.contains(v) {
        return Err(HiaError::UnknownNode { tree, node: v });
    }
    if let Some(value) = w {
        let lo = t.parent(v).map_or(-1, |p| t.weight(p) as i128);
        let hi = t.weight(v);
        if (value as i128) <= lo || value > hi {
            return Err(HiaError::BadOverride {
                tree,
                node: v,
                value,
                lo,
                hi,
            });
        }
    }
    Ok(())
}

/// A query node in each tree, with optional replacement weights for them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HiaQuery {
    pub v1: NodeId,
    pub v2: NodeId,
    pub w1: Option<Weight>,
    pub w2: Option<Weight>,
}

impl HiaQuery {
    pub fn new(v1: NodeId, v2: NodeId) -> Self {
        HiaQuery { v1, v2, w1: None, w2: None }
    }

    pub fn with_weights(v1: NodeId, v2: NodeId, w1: Weight, w2: Weight) -> Self {
        HiaQuery { v1, v2, w1: Some(w1), w2: Some(w2) }
    }

    pub(crate) fn eff1(&self, t: &WeightedTree, u: NodeId) -> Weight {
        match self.w1 {
            Some(w) if u == self.v1 => w,
            _ => t.weight(u),
        }
    }

    pub(crate) fn eff2(&self, t: &WeightedTree, u: NodeId) -> Weight {
        match self.w2 {
            Some(w) if u == self.v2 => w,
            _ => t.weight(u),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HiaAnswer {
    pub u1: NodeId,
    pub u2: NodeId,
    pub combined: Weight,
}

impl HiaAnswer {
    pub(crate) fn keep_max(best: &mut Option<HiaAnswer>, cand: HiaAnswer) {
        if best.is_none_or(|b| cand.combined > b.combined) {
            *best = Some(cand);
        }
    }
}

/// Common query surface of the three engines.
pub trait HiaEngine {
    fn query_with(
        &self,
        pair: &TreePair,
        q: &HiaQuery,
        c: &mut Counters,
    ) -> Result<Option<HiaAnswer>, HiaError>;

    fn query(&self, pair: &TreePair, q: &HiaQuery) -> Result<Option<HiaAnswer>, HiaError> {
        self.query_with(pair, q, &mut Counters::default())
    }

    fn name(&self) -> &'static str;
}
