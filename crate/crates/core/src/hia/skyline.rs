use std::collections::HashMap;
use std::mem::size_of;

use crate::counters::Counters;
use crate::rmq::SparseMax;
use crate::tree::{NodeId, Weight, WeightedTree};

use super::lists::{extended_lists, skyline_positions, PathPair};
use super::{HiaAnswer, HiaEngine, HiaError, HiaQuery, TreePair};

/// An induced pair `(a, b)` on two heavy paths such that neither `a`'s path
/// child is induced with `b` nor `b`'s path child with `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkylinePair {
    pub a: u32,
    pub b: u32,
    pub depth_a: u32,
    pub depth_b: u32,
    pub wsum: Weight,
}

/// Skyline pairs of one path pair, `a` getting shallower and `b` deeper.
#[derive(Debug, Clone)]
pub struct SkylineList {
    pairs: Vec<SkylinePair>,
    rmq: SparseMax,
}

impl SkylineList {
    pub(crate) fn new(pairs: Vec<SkylinePair>) -> Self {
        let rmq = SparseMax::new(pairs.len(), |i| pairs[i].wsum);
        SkylineList { pairs, rmq }
    }

    pub fn pairs(&self) -> &[SkylinePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub(crate) fn max_in(&self, lo: usize, hi: usize) -> Option<&SkylinePair> {
        self.rmq
            .argmax(lo, hi, |i| self.pairs[i].wsum)
            .map(|i| &self.pairs[i])
    }

    fn stored_bytes(&self) -> usize {
        self.pairs.len() * size_of::<SkylinePair>() + self.rmq.stored_bytes()
    }
}

/// Query side for one path pair: the deepest ancestor of the query node on
/// the path and its effective weight.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Side {
    pub node: NodeId,
    pub depth: u32,
    pub weight: Weight,
}

/// Best value reachable from a generator pair `(a, b)`: each side is cut
/// back to the query node when the generator lies at or below it.
pub(crate) fn clip(
    t1: &WeightedTree,
    t2: &WeightedTree,
    s1: &Side,
    s2: &Side,
    a: u32,
    da: u32,
    b: u32,
    db: u32,
) -> HiaAnswer {
    let (u1, w1) = if da >= s1.depth {
        (s1.node, s1.weight)
    } else {
        (a as NodeId, t1.weight(a as NodeId))
    };
    let (u2, w2) = if db >= s2.depth {
        (s2.node, s2.weight)
    } else {
        (b as NodeId, t2.weight(b as NodeId))
    };
    HiaAnswer { u1, u2, combined: w1 + w2 }
}

/// Best induced pair of ancestors of `v1`, `v2` within one path pair, where
/// `v1`/`v2` lie on the list's paths and carry effective weights `w1`/`w2`.
pub fn query_path_pair(
    pair: &TreePair,
    list: &SkylineList,
    v1: NodeId,
    w1: Weight,
    v2: NodeId,
    w2: Weight,
) -> Option<HiaAnswer> {
    let (t1, t2) = (pair.t1(), pair.t2());
    let s1 = Side { node: v1, depth: t1.depth(v1), weight: w1 };
    let s2 = Side { node: v2, depth: t2.depth(v2), weight: w2 };
    query_list(t1, t2, list, &s1, &s2, 0)
}

fn query_list(
    t1: &WeightedTree,
    t2: &WeightedTree,
    list: &SkylineList,
    s1: &Side,
    s2: &Side,
    fault: usize,
) -> Option<HiaAnswer> {
    let pairs = &list.pairs;
    // [0, i): a at or below v1; [0, j): b strictly above v2
    let i = (pairs.partition_point(|p| p.depth_a >= s1.depth) + fault).min(pairs.len());
    let j = pairs.partition_point(|p| p.depth_b < s2.depth);
    let mut best = None;
    if let Some(p) = list.max_in(i, j) {
        HiaAnswer::keep_max(
            &mut best,
            HiaAnswer { u1: p.a as NodeId, u2: p.b as NodeId, combined: p.wsum },
        );
    }
    let edge = [i.checked_sub(1), Some(j)];
    for k in edge.into_iter().flatten() {
        if let Some(p) = pairs.get(k) {
            let cand = clip(t1, t2, s1, s2, p.a, p.depth_a, p.b, p.depth_b);
            HiaAnswer::keep_max(&mut best, cand);
        }
    }
    best
}

/// Heavy-path engine storing the full skyline list of every path pair.
#[derive(Debug, Clone, Default)]
pub struct SkylineEngine {
    lists: HashMap<PathPair, SkylineList>,
    fault: usize,
}

impl SkylineEngine {
    pub fn build(pair: &TreePair) -> Self {
        let (t1, t2) = (pair.t1(), pair.t2());
        let lists = extended_lists(pair)
            .into_iter()
            .map(|(key, ext)| {
                let pairs = skyline_positions(&ext)
                    .into_iter()
                    .map(|i| {
                        let e = ext[i];
                        SkylinePair {
                            a: e.a,
                            b: e.b,
                            depth_a: e.depth_a,
                            depth_b: e.depth_b,
                            wsum: t1.weight(e.a()) + t2.weight(e.b()),
                        }
                    })
                    .collect();
                (key, SkylineList::new(pairs))
            })
            .collect();
        SkylineEngine { lists, fault: 0 }
    }

    /// Rebuilds an engine from stored `(a, b)` lists.
    pub fn from_lists(
        pair: &TreePair,
        lists: impl IntoIterator<Item = (PathPair, Vec<(NodeId, NodeId)>)>,
    ) -> Self {
        let (t1, t2) = (pair.t1(), pair.t2());
        let lists = lists
            .into_iter()
            .map(|(key, raw)| {
                let pairs = raw
                    .into_iter()
                    .map(|(a, b)| SkylinePair {
                        a: a as u32,
                        b: b as u32,
                        depth_a: t1.depth(a),
                        depth_b: t2.depth(b),
                        wsum: t1.weight(a) + t2.weight(b),
                    })
                    .collect();
                (key, SkylineList::new(pairs))
            })
            .collect();
        SkylineEngine { lists, fault: 0 }
    }

    /// Shifts every predecessor search by one position. Only for checking
    /// that the verification suites notice a broken engine.
    #[doc(hidden)]
    pub fn inject_predecessor_fault(&mut self) {
        self.fault = 1;
    }

    pub fn list(&self, p1: usize, p2: usize) -> Option<&SkylineList> {
        self.lists.get(&(p1, p2))
    }

    pub fn lists(&self) -> impl Iterator<Item = (&PathPair, &SkylineList)> {
        self.lists.iter()
    }

    pub fn list_count(&self) -> usize {
        self.lists.len()
    }

    pub fn total_pairs(&self) -> usize {
        self.lists.values().map(SkylineList::len).sum()
    }

    pub fn stored_bytes(&self) -> usize {
        self.lists
            .values()
            .map(|l| size_of::<PathPair>() + l.stored_bytes())
            .sum()
    }
}

impl HiaEngine for SkylineEngine {
    fn query_with(
        &self,
        pair: &TreePair,
        q: &HiaQuery,
        c: &mut Counters,
    ) -> Result<Option<HiaAnswer>, HiaError> {
        pair.check(q)?;
        let (t1, t2) = (pair.t1(), pair.t2());
        let up = pair.d1().path_ancestors(t1, q.v1);
        let down = pair.d2().path_ancestors(t2, q.v2);
        let mut best = None;
        let mut pi = up.len() - 1;
        let mut qi = 0;
        loop {
            let (p1, x1) = up[pi];
            let (p2, x2) = down[qi];
            c.path_pair_visits += 1;
            let list = self.lists.get(&(p1, p2));
            let depth2 = t2.depth(x2);
            if let Some(list) = list {
                let s1 = Side { node: x1, depth: t1.depth(x1), weight: q.eff1(t1, x1) };
                let s2 = Side { node: x2, depth: depth2, weight: q.eff2(t2, x2) };
                if let Some(a) = query_list(t1, t2, list, &s1, &s2, self.fault) {
                    HiaAnswer::keep_max(&mut best, a);
                }
            }
            // q descends iff the head of p1's path is induced with x2
            let descend = list
                .and_then(|l| l.pairs.last())
                .is_some_and(|p| p.depth_b >= depth2);
            if descend {
                qi += 1;
                if qi == down.len() {
                    break;
                }
            } else if pi == 0 {
                break;
            } else {
                pi -= 1;
            }
        }
        Ok(best)
    }

    fn name(&self) -> &'static str {
        "skyline"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_pair, random_query};
    use crate::hia::baseline::NaiveOracle;
    use crate::hia::fixtures::*;
    use crate::hia::BaselineEngine;
    use crate::tree::ceil_log2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_leaf_list() {
        let p = one_leaf();
        let e = SkylineEngine::build(&p);
        assert_eq!(e.list_count(), 1);
        let l = e.list(0, 0).unwrap();
        assert_eq!((l.pairs()[0].a, l.pairs()[0].b), (0, 0));
        let a = e.query(&p, &HiaQuery::new(0, 0)).unwrap().unwrap();
        assert_eq!((a.u1, a.u2, a.combined), (0, 0, 7));
    }

    #[test]
    fn two_star_agrees_with_baseline() {
        let p = two_stars();
        let e = SkylineEngine::build(&p);
        for (_, l) in e.lists() {
            for s in l.pairs() {
                check_skyline_pair(&p, s);
            }
        }
        for v1 in 0..3 {
            for v2 in 0..3 {
                let q = HiaQuery::new(v1, v2);
                assert_eq!(
                    e.query(&p, &q).unwrap().map(|a| a.combined),
                    BaselineEngine.query(&p, &q).unwrap().map(|a| a.combined)
                );
            }
        }
    }

    fn check_skyline_pair(p: &TreePair, s: &SkylinePair) {
        let (a, b) = (s.a as usize, s.b as usize);
        assert!(p.induced(a, b));
        if let Some(ca) = p.d1().path_child(a) {
            assert!(!p.induced(ca, b));
        }
        if let Some(cb) = p.d2().path_child(b) {
            assert!(!p.induced(a, cb));
        }
    }

    #[test]
    fn lists_equal_brute_force_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..6 {
            let p = random_pair(128, &mut rng);
            let oracle = NaiveOracle::new(&p);
            let e = SkylineEngine::build(&p);
            let (d1, d2) = (p.d1(), p.d2());
            let n = 128usize;
            let bound = n * (ceil_log2(n) as usize + 1).pow(2);
            assert!(e.total_pairs() <= bound);
            for p1 in 0..d1.path_count() {
                for p2 in 0..d2.path_count() {
                    let mut want = Vec::new();
                    for &a in d1.path_nodes(p1) {
                        for &b in d2.path_nodes(p2) {
                            let ok = oracle.induced(a, b)
                                && d1.path_child(a).is_none_or(|c| !oracle.induced(c, b))
                                && d2.path_child(b).is_none_or(|c| !oracle.induced(a, c));
                            if ok {
                                want.push((a as u32, b as u32));
                            }
                        }
                    }
                    want.sort_by_key(|&(a, _)| std::cmp::Reverse(p.t1().depth(a as usize)));
                    let got: Vec<_> = e
                        .list(p1, p2)
                        .map(|l| l.pairs().iter().map(|s| (s.a, s.b)).collect())
                        .unwrap_or_default();
                    assert_eq!(got, want, "path pair ({p1}, {p2})");
                    if let Some(l) = e.list(p1, p2) {
                        for w in l.pairs().windows(2) {
                            assert!(w[0].depth_a > w[1].depth_a && w[0].depth_b < w[1].depth_b);
                            let (a0, a1) = (p.t1().weight(w[0].a as usize), p.t1().weight(w[1].a as usize));
                            let (b0, b1) = (p.t2().weight(w[0].b as usize), p.t2().weight(w[1].b as usize));
                            assert!(a0 > a1 && b0 < b1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn path_pair_query_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let p = random_pair(96, &mut rng);
            let oracle = NaiveOracle::new(&p);
            let e = SkylineEngine::build(&p);
            let keys: Vec<_> = e.lists().map(|(k, _)| *k).collect();
            for _ in 0..300 {
                let (p1, p2) = keys[rng.gen_range(0..keys.len())];
                let n1 = p.d1().path_nodes(p1);
                let n2 = p.d2().path_nodes(p2);
                let v1 = n1[rng.gen_range(0..n1.len())];
                let v2 = n2[rng.gen_range(0..n2.len())];
                let lo1 = p.t1().parent(v1).map_or(0, |x| p.t1().weight(x) + 1);
                let lo2 = p.t2().parent(v2).map_or(0, |x| p.t2().weight(x) + 1);
                let w1 = rng.gen_range(lo1..=p.t1().weight(v1));
                let w2 = rng.gen_range(lo2..=p.t2().weight(v2));
                let got = query_path_pair(&p, e.list(p1, p2).unwrap(), v1, w1, v2, w2);
                let mut want: Option<Weight> = None;
                for &a in n1.iter().filter(|&&a| p.t1().depth(a) <= p.t1().depth(v1)) {
                    for &b in n2.iter().filter(|&&b| p.t2().depth(b) <= p.t2().depth(v2)) {
                        if oracle.induced(a, b) {
                            let wa = if a == v1 { w1 } else { p.t1().weight(a) };
                            let wb = if b == v2 { w2 } else { p.t2().weight(b) };
                            want = want.max(Some(wa + wb));
                        }
                    }
                }
                assert_eq!(got.map(|a| a.combined), want);
            }
        }
    }

    #[test]
    fn deepest_both_uses_whole_list() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_pair(64, &mut rng);
        let e = SkylineEngine::build(&p);
        for (_, l) in e.lists() {
            let first = l.pairs()[0];
            let last = *l.pairs().last().unwrap();
            let (v1, v2) = (first.a as usize, last.b as usize);
            let got = query_path_pair(&p, l, v1, p.t1().weight(v1), v2, p.t2().weight(v2));
            let max = l.pairs().iter().map(|s| s.wsum).max();
            assert_eq!(got.map(|a| a.combined), max);
        }
    }

    #[test]
    fn heads_collapse_to_the_head_pair() {
        // at or above every skyline pair on both sides only (v1, v2) remains
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = random_pair(64, &mut rng);
        let e = SkylineEngine::build(&p);
        for (&(p1, p2), l) in e.lists() {
            let (h1, h2) = (p.d1().path_head(p1), p.d2().path_head(p2));
            let a = query_path_pair(&p, l, h1, p.t1().weight(h1), h2, p.t2().weight(h2)).unwrap();
            assert_eq!((a.u1, a.u2), (h1, h2));
        }
    }

    #[test]
    fn engine_matches_naive_with_bounded_walk() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..500 {
            let n = 1 + trial % 256;
            let p = random_pair(n, &mut rng);
            let e = SkylineEngine::build(&p);
            let oracle = NaiveOracle::new(&p);
            let q = random_query(&p, &mut rng);
            let mut c = Counters::default();
            let got = e.query_with(&p, &q, &mut c).unwrap();
            let want = oracle.query(&p, &q).unwrap();
            assert_eq!(got.map(|a| a.combined), want.map(|a| a.combined), "n={n} {q:?}");
            let h = p.d1().path_tree_height() + p.d2().path_tree_height() + 1;
            assert!(c.path_pair_visits <= h as u64);
            assert!(c.path_pair_visits <= 2 * (ceil_log2(n) as u64 + 1));
        }
    }
}
