use std::collections::HashMap;
use std::mem::size_of;

use crate::counters::Counters;
use crate::grid::Rect;
use crate::rmq::SparseMax;
use crate::tree::{ceil_log2, NodeId, PathId, WeightedTree};

use super::lists::{extended_lists, skyline_positions, sort_dedup, PathPair};
use super::skyline::{clip, Side};
use super::{ExtPair, HiaAnswer, HiaEngine, HiaError, HiaQuery, TreePair};

/// Every `B`-th pair of an extended list is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SampleRate(usize);

impl SampleRate {
    pub fn new(b: usize) -> Option<Self> {
        (b >= 1).then_some(SampleRate(b))
    }

    /// `⌈log₂ n⌉`, at least 1.
    pub fn log(n: usize) -> Self {
        SampleRate((ceil_log2(n) as usize).max(1))
    }

    /// `⌈log₂ n⌉²`, at least 1.
    pub fn log_squared(n: usize) -> Self {
        SampleRate((ceil_log2(n) as usize).pow(2).max(1))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// A skyline pair kept because it neighbours a sample or is the heaviest
/// skyline pair of its block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Kept {
    a: u32,
    b: u32,
    // index in the full skyline list
    rank: u32,
    // index in the full extended list
    pos: u32,
}

/// Sampled form of one extended list. Samples sit at positions `B-1, 2B-1,
/// …`; block `j` covers positions `[jB, (j+1)B)`, so block `j` ends at
/// sample `j` and the last block is closed by the list end.
#[derive(Debug, Clone)]
struct SampledList {
    samples: Vec<(u32, u32)>,
    kept: Vec<Kept>,
    rmq: SparseMax,
    skyline_len: u32,
}

impl SampledList {
    fn stored_bytes(&self) -> usize {
        self.samples.len() * size_of::<(u32, u32)>()
            + self.kept.len() * size_of::<Kept>()
            + self.rmq.stored_bytes()
            + size_of::<u32>()
    }
}

/// Heavy-path engine over sampled extended lists. Pairs between samples are
/// rebuilt on demand with one range-reporting query per block.
#[derive(Debug, Clone)]
pub struct SampledEngine {
    rate: usize,
    lists: HashMap<PathPair, SampledList>,
}

fn wsum(t1: &WeightedTree, t2: &WeightedTree, a: u32, b: u32) -> u64 {
    t1.weight(a as NodeId) + t2.weight(b as NodeId)
}

fn ext_pair(pair: &TreePair, a: NodeId, b: NodeId) -> ExtPair {
    ExtPair {
        a: a as u32,
        b: b as u32,
        depth_a: pair.t1().depth(a),
        depth_b: pair.t2().depth(b),
    }
}

impl SampledEngine {
    pub fn build(pair: &TreePair, rate: SampleRate) -> Self {
        let b = rate.get();
        let (t1, t2) = (pair.t1(), pair.t2());
        let mut lists = HashMap::new();
        for (key, ext) in extended_lists(pair) {
            let blocks = ext.len() / b;
            if blocks == 0 {
                continue;
            }
            let sky = skyline_positions(&ext);
            let mut ranks = Vec::new();
            let samples: Vec<usize> = (0..blocks).map(|j| (j + 1) * b - 1).collect();
            for &s in &samples {
                let after = sky.partition_point(|&p| p <= s);
                if after > 0 {
                    ranks.push(after - 1);
                }
                let at = sky.partition_point(|&p| p < s);
                if at < sky.len() {
                    ranks.push(at);
                }
            }
            for j in 0..=blocks {
                let lo = sky.partition_point(|&p| p < j * b);
                let hi = sky.partition_point(|&p| p < (j + 1) * b);
                let heaviest = (lo..hi).max_by(|&x, &y| {
                    let (ex, ey) = (ext[sky[x]], ext[sky[y]]);
                    // earliest wins ties
                    wsum(t1, t2, ex.a, ex.b)
                        .cmp(&wsum(t1, t2, ey.a, ey.b))
                        .then(y.cmp(&x))
                });
                ranks.extend(heaviest);
            }
            ranks.sort_unstable();
            ranks.dedup();
            let kept = ranks
                .into_iter()
                .map(|r| {
                    let e = ext[sky[r]];
                    Kept { a: e.a, b: e.b, rank: r as u32, pos: sky[r] as u32 }
                })
                .collect();
            let samples = samples.iter().map(|&s| (ext[s].a, ext[s].b)).collect();
            lists.insert(key, SampledList::finish(t1, t2, samples, kept, sky.len()));
        }
        SampledEngine { rate: b, lists }
    }

    pub fn rate(&self) -> usize {
        self.rate
    }

    /// Whether the path pair has a non-empty extended list, asked of the grid.
    pub fn is_pair_active(&self, pair: &TreePair, p1: PathId, p2: PathId) -> bool {
        self.is_pair_active_with(pair, p1, p2, &mut Counters::default())
    }

    fn is_pair_active_with(&self, pair: &TreePair, p1: PathId, p2: PathId, c: &mut Counters) -> bool {
        pair.induced_with(pair.d1().path_head(p1), pair.d2().path_head(p2), c)
    }

    /// Number of blocks of a stored list, or `None` when the list was too
    /// short to keep any sample.
    pub fn block_count(&self, p1: PathId, p2: PathId) -> Option<usize> {
        self.lists.get(&(p1, p2)).map(|l| l.samples.len() + 1)
    }

    /// Rebuilds block `block` of the extended list of `(p1, p2)`.
    pub fn recover_block(
        &self,
        pair: &TreePair,
        p1: PathId,
        p2: PathId,
        block: usize,
    ) -> Result<Vec<ExtPair>, HiaError> {
        self.recover_block_with(pair, p1, p2, block, &mut Counters::default())
    }

    fn recover_block_with(
        &self,
        pair: &TreePair,
        p1: PathId,
        p2: PathId,
        block: usize,
        c: &mut Counters,
    ) -> Result<Vec<ExtPair>, HiaError> {
        let (lo, hi) = match self.lists.get(&(p1, p2)) {
            None if block == 0 => (None, None),
            None => return Err(HiaError::NoSuchBlock { block, blocks: 1 }),
            Some(l) if block > l.samples.len() => {
                return Err(HiaError::NoSuchBlock { block, blocks: l.samples.len() + 1 })
            }
            Some(l) => {
                let at = |j: usize| l.samples.get(j).map(|&(a, b)| ext_pair(pair, a as NodeId, b as NodeId));
                (block.checked_sub(1).and_then(at), at(block))
            }
        };
        recover_between(pair, p1, p2, lo, hi, c)
    }

    pub fn list_count(&self) -> usize {
        self.lists.len()
    }

    /// Samples plus kept skyline pairs over all stored lists.
    pub fn stored_pairs(&self) -> usize {
        self.lists.values().map(|l| l.samples.len() + l.kept.len()).sum()
    }

    pub fn stored_bytes(&self) -> usize {
        self.lists
            .values()
            .map(|l| size_of::<PathPair>() + l.stored_bytes())
            .sum()
    }

    /// The stored content: per path pair, the ext-list samples and the kept
    /// skyline pairs as `(a, b, skyline rank, ext position)`.
    #[allow(clippy::type_complexity)]
    pub fn export(&self) -> Vec<(PathPair, Vec<(NodeId, NodeId)>, Vec<[usize; 4]>, usize)> {
        let mut out: Vec<_> = self
            .lists
            .iter()
            .map(|(&k, l)| {
                let samples = l.samples.iter().map(|&(a, b)| (a as NodeId, b as NodeId)).collect();
                let kept = l
                    .kept
                    .iter()
                    .map(|k| [k.a as usize, k.b as usize, k.rank as usize, k.pos as usize])
                    .collect();
                (k, samples, kept, l.skyline_len as usize)
            })
            .collect();
        out.sort_by_key(|e| e.0);
        out
    }

    /// Inverse of [`SampledEngine::export`].
    #[allow(clippy::type_complexity)]
    pub fn import(
        pair: &TreePair,
        rate: SampleRate,
        lists: Vec<(PathPair, Vec<(NodeId, NodeId)>, Vec<[usize; 4]>, usize)>,
    ) -> Self {
        let (t1, t2) = (pair.t1(), pair.t2());
        let lists = lists
            .into_iter()
            .map(|(key, samples, kept, skyline_len)| {
                let samples = samples.into_iter().map(|(a, b)| (a as u32, b as u32)).collect();
                let kept = kept
                    .into_iter()
                    .map(|[a, b, rank, pos]| Kept {
                        a: a as u32,
                        b: b as u32,
                        rank: rank as u32,
                        pos: pos as u32,
                    })
                    .collect();
                (key, SampledList::finish(t1, t2, samples, kept, skyline_len))
            })
            .collect();
        SampledEngine { rate: rate.get(), lists }
    }

    fn query_pair(
        &self,
        pair: &TreePair,
        key: PathPair,
        s1: &Side,
        s2: &Side,
        c: &mut Counters,
    ) -> Result<Option<HiaAnswer>, HiaError> {
        let (t1, t2) = (pair.t1(), pair.t2());
        let mut best = None;
        let scan = |ext: &[ExtPair], best: &mut Option<HiaAnswer>| {
            for e in ext {
                let cand = clip(t1, t2, s1, s2, e.a, e.depth_a, e.b, e.depth_b);
                HiaAnswer::keep_max(best, cand);
            }
        };
        let Some(list) = self.lists.get(&key) else {
            let all = self.recover_block_with(pair, key.0, key.1, 0, c)?;
            scan(&all, &mut best);
            return Ok(best);
        };
        let kept = &list.kept;
        let c1 = kept.partition_point(|k| t1.depth(k.a as NodeId) >= s1.depth);
        let c2 = kept.partition_point(|k| t2.depth(k.b as NodeId) < s2.depth);
        if let Some(i) = list.rmq.argmax(c1, c2, |i| wsum(t1, t2, kept[i].a, kept[i].b)) {
            let k = kept[i];
            HiaAnswer::keep_max(
                &mut best,
                HiaAnswer { u1: k.a as NodeId, u2: k.b as NodeId, combined: wsum(t1, t2, k.a, k.b) },
            );
        }
        let mut blocks = Vec::with_capacity(2);
        for cut in [c1, c2] {
            for k in [cut.checked_sub(1), Some(cut)].into_iter().flatten() {
                if let Some(k) = kept.get(k) {
                    let (da, db) = (t1.depth(k.a as NodeId), t2.depth(k.b as NodeId));
                    HiaAnswer::keep_max(&mut best, clip(t1, t2, s1, s2, k.a, da, k.b, db));
                }
            }
            if let Some(blk) = self.straddling_block(list, cut) {
                if !blocks.contains(&blk) {
                    blocks.push(blk);
                }
            }
        }
        for blk in blocks {
            let ext = self.recover_block_with(pair, key.0, key.1, blk, c)?;
            scan(&ext, &mut best);
        }
        Ok(best)
    }

    /// The block holding skyline pairs on both sides of the cut between kept
    /// entries `cut - 1` and `cut`, if its contents are not fully covered by
    /// the kept entries.
    fn straddling_block(&self, list: &SampledList, cut: usize) -> Option<usize> {
        let b = self.rate;
        let lo = cut.checked_sub(1).and_then(|i| list.kept.get(i));
        let hi = list.kept.get(cut);
        let blk = |pos: u32| pos as usize / b;
        match (lo, hi) {
            (None, Some(h)) => (h.rank > 0).then(|| blk(h.pos)),
            (Some(l), None) => (l.rank + 1 < list.skyline_len).then(|| blk(l.pos + 1)),
            (Some(l), Some(h)) if h.rank > l.rank + 1 => Some(blk(l.pos + 1)),
            (Some(l), Some(h)) => (blk(l.pos) == blk(h.pos)).then(|| blk(l.pos)),
            (None, None) => None,
        }
    }
}

impl SampledList {
    fn finish(
        t1: &WeightedTree,
        t2: &WeightedTree,
        samples: Vec<(u32, u32)>,
        kept: Vec<Kept>,
        skyline_len: usize,
    ) -> Self {
        let rmq = SparseMax::new(kept.len(), |i| wsum(t1, t2, kept[i].a, kept[i].b));
        SampledList { samples, kept, rmq, skyline_len: skyline_len as u32 }
    }
}

/// Extended-list pairs of `(p1, p2)` strictly after `lo` and up to and
/// including `hi`; `None` stands for the list start or end.
///
/// One reporting query over the leaves whose lowest `p1` ancestor lies
/// between the two samples' `a` nodes, mapped back through the per-leaf
/// ancestor tables.
pub fn recover_between(
    pair: &TreePair,
    p1: PathId,
    p2: PathId,
    lo: Option<ExtPair>,
    hi: Option<ExtPair>,
    c: &mut Counters,
) -> Result<Vec<ExtPair>, HiaError> {
    if let (Some(l), Some(h)) = (lo, hi) {
        if l.key() >= h.key() {
            return Err(HiaError::MisorderedSamples);
        }
    }
    c.blocks_recovered += 1;
    let (t1, d1, d2) = (pair.t1(), pair.d1(), pair.d2());
    let nodes = d1.path_nodes(p1);
    let top = t1.depth(nodes[0]);
    let deep = lo.map_or(t1.depth(*nodes.last().unwrap()), |e| e.depth_a);
    let shallow = hi.map_or(top, |e| e.depth_a);
    let upper = nodes[(shallow - top) as usize];
    let lower = nodes[(deep - top) as usize];
    let (mut x1, x2) = d1.interval(upper);
    // heavy-leftmost: a path child's leaves are a prefix of its parent's
    if let Some(child) = d1.path_child(lower) {
        x1 = d1.interval(child).1 + 1;
    }
    let rect = Rect::from_intervals((x1, x2), d2.interval(d2.path_head(p2)));
    let mut out: Vec<ExtPair> = pair
        .grid()
        .report_with(&rect, c)
        .into_iter()
        .map(|(x, _)| {
            let label = t1.leaf_label(d1.leaf_at_rank(x)).unwrap();
            let a = d1.lowest_ancestor_on_path(label, p1).unwrap();
            let b = d2.lowest_ancestor_on_path(label, p2).unwrap();
            ext_pair(pair, a, b)
        })
        .filter(|e| lo.is_none_or(|l| e.key() > l.key()) && hi.is_none_or(|h| e.key() <= h.key()))
        .collect();
    sort_dedup(&mut out);
    Ok(out)
}

impl HiaEngine for SampledEngine {
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
            let active = self.is_pair_active_with(pair, p1, p2, c);
            let mut descend = false;
            if active {
                let s1 = Side { node: x1, depth: t1.depth(x1), weight: q.eff1(t1, x1) };
                let s2 = Side { node: x2, depth: t2.depth(x2), weight: q.eff2(t2, x2) };
                if let Some(a) = self.query_pair(pair, (p1, p2), &s1, &s2, c)? {
                    HiaAnswer::keep_max(&mut best, a);
                }
                descend = pair.induced_with(pair.d1().path_head(p1), x2, c);
            }
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
        "sampled"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_pair, random_query};
    use crate::hia::baseline::NaiveOracle;
    use crate::hia::fixtures::*;
    use crate::hia::{BaselineEngine, SkylineEngine};
    use crate::tree::{ceil_log2, Weight};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // independent full-list oracle: upward walks from every common leaf
    fn oracle_list(pair: &TreePair, p1: PathId, p2: PathId) -> Vec<ExtPair> {
        let lowest = |t: &WeightedTree, d: &crate::tree::HeavyPathDecomposition, leaf: NodeId, p: PathId| {
            let mut cur = Some(leaf);
            while let Some(u) = cur {
                if d.path_of(u) == p {
                    return Some(u);
                }
                cur = t.parent(u);
            }
            None
        };
        let mut out = Vec::new();
        for label in 0..pair.leaf_count() {
            let a = lowest(pair.t1(), pair.d1(), pair.d1().leaf_node(label), p1);
            let b = lowest(pair.t2(), pair.d2(), pair.d2().leaf_node(label), p2);
            if let (Some(a), Some(b)) = (a, b) {
                out.push(ext_pair(pair, a, b));
            }
        }
        sort_dedup(&mut out);
        out
    }

    fn combined(r: Result<Option<HiaAnswer>, HiaError>) -> Option<Weight> {
        r.unwrap().map(|a| a.combined)
    }

    #[test]
    fn rate_constructors() {
        assert_eq!(SampleRate::new(0), None);
        assert_eq!(SampleRate::log(1).get(), 1);
        assert_eq!(SampleRate::log(256).get(), 8);
        assert_eq!(SampleRate::log_squared(256).get(), 64);
    }

    #[test]
    fn rate_one_matches_skyline_on_fixtures() {
        for p in [two_stars(), one_leaf()] {
            let s = SkylineEngine::build(&p);
            let e = SampledEngine::build(&p, SampleRate::new(1).unwrap());
            for v1 in 0..p.t1().node_count() {
                for v2 in 0..p.t2().node_count() {
                    let q = HiaQuery::new(v1, v2);
                    assert_eq!(combined(e.query(&p, &q)), combined(s.query(&p, &q)));
                    assert_eq!(combined(e.query(&p, &q)), combined(BaselineEngine.query(&p, &q)));
                }
            }
        }
    }

    #[test]
    fn one_leaf_sampling() {
        let p = one_leaf();
        let e = SampledEngine::build(&p, SampleRate::new(1).unwrap());
        assert_eq!(e.block_count(0, 0), Some(2));
        assert_eq!(e.export()[0].1, vec![(0, 0)]);
        // longer rates keep nothing; the single pair is recovered from the grid
        let e = SampledEngine::build(&p, SampleRate::new(4).unwrap());
        assert_eq!(e.list_count(), 0);
        assert!(e.is_pair_active(&p, 0, 0));
        let got = e.recover_block(&p, 0, 0, 0).unwrap();
        assert_eq!(got, vec![ext_pair(&p, 0, 0)]);
        let a = e.query(&p, &HiaQuery::new(0, 0)).unwrap().unwrap();
        assert_eq!(a.combined, 7);
    }

    #[test]
    fn misordered_samples_rejected() {
        let p = two_stars();
        let root_path = p.d1().path_of(0);
        let e1 = ext_pair(&p, 0, 0);
        let e2 = ext_pair(&p, p.d1().path_tail(root_path), 0);
        let mut c = Counters::default();
        assert_eq!(
            recover_between(&p, root_path, p.d2().path_of(0), Some(e1), Some(e2), &mut c),
            Err(HiaError::MisorderedSamples)
        );
        let e = SampledEngine::build(&p, SampleRate::new(1).unwrap());
        assert!(matches!(
            e.recover_block(&p, root_path, p.d2().path_of(0), 99),
            Err(HiaError::NoSuchBlock { .. })
        ));
    }

    #[test]
    fn active_pairs_and_blocks_match_full_lists() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..8 {
            let n = [8, 40, 128, 128][trial % 4];
            let p = random_pair(n, &mut rng);
            let full = extended_lists(&p);
            for rate in [1, 2, ceil_log2(n) as usize] {
                let e = SampledEngine::build(&p, SampleRate::new(rate).unwrap());
                for p1 in 0..p.d1().path_count() {
                    for p2 in 0..p.d2().path_count() {
                        let want = oracle_list(&p, p1, p2);
                        assert_eq!(e.is_pair_active(&p, p1, p2), !want.is_empty());
                        if want.is_empty() {
                            continue;
                        }
                        assert_eq!(full.get(&(p1, p2)), Some(&want));
                        let blocks = e.block_count(p1, p2).unwrap_or(1);
                        let mut glued = Vec::new();
                        for blk in 0..blocks {
                            let got = e.recover_block(&p, p1, p2, blk).unwrap();
                            let stored = e.lists.contains_key(&(p1, p2));
                            let (lo, hi) = if stored {
                                (blk * rate, ((blk + 1) * rate).min(want.len()))
                            } else {
                                (0, want.len())
                            };
                            assert_eq!(got, want[lo..hi], "({p1},{p2}) block {blk} rate {rate}");
                            assert!(got.len() <= rate.max(want.len().min(rate)));
                            glued.extend(got);
                        }
                        assert_eq!(glued, want);
                    }
                }
            }
        }
    }

    #[test]
    fn stored_size_tracks_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_pair(128, &mut rng);
        let full: usize = extended_lists(&p).values().map(Vec::len).sum();
        let b = SampleRate::log(128);
        let e = SampledEngine::build(&p, b);
        let samples: usize = e.lists.values().map(|l| l.samples.len()).sum();
        assert!(samples <= full / b.get());
        // each sample keeps at most two neighbours, each block one maximum
        assert!(e.stored_pairs() <= samples + 2 * samples + (samples + e.list_count()));
    }

    #[test]
    fn engine_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..500 {
            let n = 1 + trial % 256;
            let p = random_pair(n, &mut rng);
            let oracle = NaiveOracle::new(&p);
            let lg = ceil_log2(n) as usize;
            let rates = [1, 2, lg.max(1), (lg * lg).max(1), 10_000];
            let rate = rates[rng.gen_range(0..rates.len())];
            let e = SampledEngine::build(&p, SampleRate::new(rate).unwrap());
            for _ in 0..4 {
                let q = random_query(&p, &mut rng);
                let want = combined(oracle.query(&p, &q));
                assert_eq!(combined(e.query(&p, &q)), want, "n={n} rate={rate} {q:?}");
            }
        }
    }
}
