use crate::counters::Counters;
use crate::tree::{NodeId, WeightedTree};

use super::{HiaAnswer, HiaEngine, HiaError, HiaQuery, TreePair};

/// The staircase walk over raw ancestors: `p` climbs from `v1`, `q` descends
/// from the root of `T2` toward `v2`, one emptiness probe per step.
#[derive(Debug, Clone, Copy, Default)]
pub struct BaselineEngine;

impl BaselineEngine {
    /// Like [`HiaEngine::query_with`], also returning every recorded candidate
    /// in walk order.
    pub fn query_traced(
        &self,
        pair: &TreePair,
        q: &HiaQuery,
        c: &mut Counters,
    ) -> Result<(Option<HiaAnswer>, Vec<HiaAnswer>), HiaError> {
        pair.check(q)?;
        let (t1, t2) = (pair.t1(), pair.t2());
        let down = t2.root_path(q.v2);
        let mut trace = Vec::new();
        let mut best = None;
        let mut p = q.v1;
        let mut qi = 0;
        loop {
            let u2 = down[qi];
            if pair.induced_with(p, u2, c) {
                let cand = HiaAnswer {
                    u1: p,
                    u2,
                    combined: q.eff1(t1, p) + q.eff2(t2, u2),
                };
                trace.push(cand);
                HiaAnswer::keep_max(&mut best, cand);
                qi += 1;
                if qi == down.len() {
                    break;
                }
            } else {
                match t1.parent(p) {
                    Some(up) => p = up,
                    None => break,
                }
            }
        }
        Ok((best, trace))
    }
}

impl HiaEngine for BaselineEngine {
    fn query_with(
        &self,
        pair: &TreePair,
        q: &HiaQuery,
        c: &mut Counters,
    ) -> Result<Option<HiaAnswer>, HiaError> {
        self.query_traced(pair, q, c).map(|r| r.0)
    }

    fn name(&self) -> &'static str {
        "baseline"
    }
}

/// Exhaustive reference: every ancestor pair, inducedness by explicit
/// leaf-set intersection. Leaf sets are precomputed once per tree pair.
#[derive(Debug, Clone)]
pub struct NaiveOracle {
    words: usize,
    sets1: Vec<Vec<u64>>,
    sets2: Vec<Vec<u64>>,
}

fn leaf_sets(t: &WeightedTree, words: usize) -> Vec<Vec<u64>> {
    let mut sets = vec![vec![0u64; words]; t.node_count()];
    // children before parents
    let mut order = vec![t.root()];
    let mut i = 0;
    while i < order.len() {
        order.extend_from_slice(t.children(order[i]));
        i += 1;
    }
    for &v in order.iter().rev() {
        if let Some(l) = t.leaf_label(v) {
            sets[v][l / 64] |= 1 << (l % 64);
        }
        if let Some(p) = t.parent(v) {
            for w in 0..words {
                let bits = sets[v][w];
                sets[p][w] |= bits;
            }
        }
    }
    sets
}

impl NaiveOracle {
    pub fn new(pair: &TreePair) -> Self {
        let words = pair.leaf_count().div_ceil(64);
        NaiveOracle {
            words,
            sets1: leaf_sets(pair.t1(), words),
            sets2: leaf_sets(pair.t2(), words),
        }
    }

    pub fn query(&self, pair: &TreePair, q: &HiaQuery) -> Result<Option<HiaAnswer>, HiaError> {
        pair.check(q)?;
        let (t1, t2) = (pair.t1(), pair.t2());
        let mut best = None;
        for u1 in t1.root_path(q.v1) {
            for u2 in t2.root_path(q.v2) {
                let shared = (0..self.words).any(|w| self.sets1[u1][w] & self.sets2[u2][w] != 0);
                if shared {
                    HiaAnswer::keep_max(
                        &mut best,
                        HiaAnswer {
                            u1,
                            u2,
                            combined: q.eff1(t1, u1) + q.eff2(t2, u2),
                        },
                    );
                }
            }
        }
        Ok(best)
    }

    /// Whether `u1` and `u2` share a leaf, by leaf-set intersection.
    pub fn induced(&self, u1: NodeId, u2: NodeId) -> bool {
        (0..self.words).any(|w| self.sets1[u1][w] & self.sets2[u2][w] != 0)
    }
}

pub fn naive_hia(pair: &TreePair, q: &HiaQuery) -> Result<Option<HiaAnswer>, HiaError> {
    NaiveOracle::new(pair).query(pair, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_pair, random_query};
    use crate::hia::fixtures::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_star_queries() {
        let p = two_stars();
        let a = BaselineEngine.query(&p, &HiaQuery::new(1, 2)).unwrap().unwrap();
        assert_eq!(a.combined, 1);
        assert!(matches!((a.u1, a.u2), (1, 0) | (0, 2)));
        let b = BaselineEngine.query(&p, &HiaQuery::new(1, 1)).unwrap().unwrap();
        assert_eq!((b.u1, b.u2, b.combined), (1, 1, 2));
        assert_eq!(naive_hia(&p, &HiaQuery::new(1, 2)).unwrap().unwrap().combined, 1);
        assert_eq!(naive_hia(&p, &HiaQuery::new(1, 1)).unwrap().unwrap().combined, 2);
    }

    #[test]
    fn one_leaf_trees() {
        let p = one_leaf();
        let a = naive_hia(&p, &HiaQuery::new(0, 0)).unwrap().unwrap();
        assert_eq!((a.u1, a.u2, a.combined), (0, 0, 7));
        assert_eq!(BaselineEngine.query(&p, &HiaQuery::new(0, 0)).unwrap(), Some(a));
    }

    #[test]
    fn wrong_tree_node_rejected() {
        let p = two_stars();
        assert!(BaselineEngine.query(&p, &HiaQuery::new(3, 0)).is_err());
    }

    #[test]
    fn matches_naive_and_walks_monotonically() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..500 {
            let n = 1 + trial % 128;
            let p = random_pair(n, &mut rng);
            let oracle = NaiveOracle::new(&p);
            let q = random_query(&p, &mut rng);
            let mut c = Counters::default();
            let (got, trace) = BaselineEngine.query_traced(&p, &q, &mut c).unwrap();
            let want = oracle.query(&p, &q).unwrap();
            assert_eq!(got.map(|a| a.combined), want.map(|a| a.combined), "{q:?}");
            let bound = p.t1().depth(q.v1) + p.t2().depth(q.v2) + 1;
            assert!(c.emptiness_probes <= bound as u64);
            for w in trace.windows(2) {
                assert!(p.t2().depth(w[0].u2) < p.t2().depth(w[1].u2));
                assert!(p.t1().depth(w[0].u1) >= p.t1().depth(w[1].u1));
            }
            let plain = HiaQuery { w1: None, w2: None, ..q };
            let unforced = oracle.query(&p, &plain).unwrap().unwrap().combined;
            let slack = q.w1.map_or(0, |w| p.t1().weight(q.v1) - w)
                + q.w2.map_or(0, |w| p.t2().weight(q.v2) - w);
            assert!(got.unwrap().combined + slack >= unforced);
        }
    }
}
