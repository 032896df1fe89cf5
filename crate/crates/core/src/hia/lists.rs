use std::cmp::Reverse;
use std::collections::HashMap;

use crate::tree::{NodeId, PathId};

use super::TreePair;

/// A pair of lowest-on-path ancestors of some leaf, one per tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtPair {
    pub a: u32,
    pub b: u32,
    pub depth_a: u32,
    pub depth_b: u32,
}

impl ExtPair {
    /// Extended-list order: deeper `a` first, then shallower `b`.
    pub fn key(&self) -> (Reverse<u32>, u32) {
        (Reverse(self.depth_a), self.depth_b)
    }

    pub fn a(&self) -> NodeId {
        self.a as NodeId
    }

    pub fn b(&self) -> NodeId {
        self.b as NodeId
    }
}

pub type PathPair = (PathId, PathId);

/// All extended lists, keyed by path pair, deduplicated and in list order.
pub fn extended_lists(pair: &TreePair) -> HashMap<PathPair, Vec<ExtPair>> {
    let (t1, t2, d1, d2) = (pair.t1(), pair.t2(), pair.d1(), pair.d2());
    let mut lists: HashMap<PathPair, Vec<ExtPair>> = HashMap::new();
    for label in 0..pair.leaf_count() {
        for &(p1, a) in d1.ancestor_table(label) {
            for &(p2, b) in d2.ancestor_table(label) {
                lists.entry((p1, p2)).or_default().push(ExtPair {
                    a: a as u32,
                    b: b as u32,
                    depth_a: t1.depth(a),
                    depth_b: t2.depth(b),
                });
            }
        }
    }
    for list in lists.values_mut() {
        sort_dedup(list);
    }
    lists
}

pub(crate) fn sort_dedup(list: &mut Vec<ExtPair>) {
    list.sort_unstable_by_key(ExtPair::key);
    list.dedup();
}

/// Positions in a sorted extended list of its skyline pairs: per distinct
/// `a` the deepest `b`, kept only while `b` gets strictly deeper.
pub(crate) fn skyline_positions(ext: &[ExtPair]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut deepest_b: Option<u32> = None;
    let mut i = 0;
    while i < ext.len() {
        let mut j = i + 1;
        while j < ext.len() && ext[j].depth_a == ext[i].depth_a {
            j += 1;
        }
        let last = ext[j - 1];
        if deepest_b.is_none_or(|d| last.depth_b > d) {
            out.push(j - 1);
            deepest_b = Some(last.depth_b);
        }
        i = j;
    }
    out
}
