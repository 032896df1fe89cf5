//! Static point set on the `n × n` leaf-rank grid.
//!
//! The structure is a wavelet matrix over the permutation `pi`: one rank
//! bitvector per bit of `y`, so counting is `O(log n)` rank operations and
//! reporting costs `O(log n)` per point.

use std::ops::Range;

use thiserror::Error;

use crate::counters::Counters;
use crate::tree::ceil_log2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("value {value} at position {pos} is out of range for n = {n}")]
    OutOfRange { pos: usize, value: usize, n: usize },
    #[error("value {value} appears twice")]
    Duplicate { value: usize },
}

/// `pi[x]` is the rank in the second tree of the leaf at rank `x` in the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafPermutation(Vec<u32>);

impl LeafPermutation {
    pub fn new(pi: Vec<usize>) -> Result<Self, GridError> {
        let n = pi.len();
        let mut seen = vec![false; n];
        for (pos, &value) in pi.iter().enumerate() {
            if value >= n {
                return Err(GridError::OutOfRange { pos, value, n });
            }
            if std::mem::replace(&mut seen[value], true) {
                return Err(GridError::Duplicate { value });
            }
        }
        Ok(LeafPermutation(pi.into_iter().map(|v| v as u32).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.iter().map(|&v| v as usize).collect()
    }
}

/// Axis-aligned query rectangle, half-open on both axes. Inverted or
/// out-of-range bounds are legal and simply select fewer points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rect {
    pub xs: Range<usize>,
    pub ys: Range<usize>,
}

impl Rect {
    /// Inclusive bounds `[x1..x2] × [y1..y2]`; `x1 > x2` or `y1 > y2` is empty.
    pub fn inclusive(x1: usize, x2: usize, y1: usize, y2: usize) -> Self {
        Rect {
            xs: x1..x2.saturating_add(1),
            ys: y1..y2.saturating_add(1),
        }
    }

    pub fn from_intervals(x: (usize, usize), y: (usize, usize)) -> Self {
        Rect::inclusive(x.0, x.1, y.0, y.1)
    }
}

#[derive(Debug, Clone)]
struct RankBits {
    words: Vec<u64>,
    // ones before each word
    before: Vec<u32>,
}

impl RankBits {
    fn new(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len() / 64 + 1];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        let mut before = Vec::with_capacity(words.len());
        let mut acc = 0u32;
        for w in &words {
            before.push(acc);
            acc += w.count_ones();
        }
        RankBits { words, before }
    }

    /// Ones in `[0, i)`.
    #[inline]
    fn rank1(&self, i: usize) -> usize {
        let (w, b) = (i / 64, i % 64);
        let mask = (1u64 << b).wrapping_sub(1);
        self.before[w] as usize + (self.words[w] & mask).count_ones() as usize
    }

    #[inline]
    fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    fn bytes(&self) -> usize {
        self.words.len() * 8 + self.before.len() * 4
    }
}

#[derive(Debug, Clone)]
pub struct GridIndex {
    n: usize,
    bits: u32,
    levels: Vec<RankBits>,
    zeros: Vec<usize>,
    // x of each y
    inverse: Vec<u32>,
    pi: LeafPermutation,
}

impl GridIndex {
    pub fn build(pi: LeafPermutation) -> Self {
        let n = pi.len();
        let bits = ceil_log2(n);
        let mut cur: Vec<u32> = pi.0.clone();
        let mut levels = Vec::with_capacity(bits as usize);
        let mut zeros = Vec::with_capacity(bits as usize);
        for l in (0..bits).rev() {
            let flags: Vec<bool> = cur.iter().map(|&v| (v >> l) & 1 == 1).collect();
            let (mut lo, hi): (Vec<u32>, Vec<u32>) = cur.iter().partition(|&&v| (v >> l) & 1 == 0);
            zeros.push(lo.len());
            levels.push(RankBits::new(&flags));
            lo.extend(hi);
            cur = lo;
        }
        let mut inverse = vec![0u32; n];
        for (x, &y) in pi.0.iter().enumerate() {
            inverse[y as usize] = x as u32;
        }
        GridIndex {
            n,
            bits,
            levels,
            zeros,
            inverse,
            pi,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn permutation(&self) -> &LeafPermutation {
        &self.pi
    }

    fn clip(&self, r: &Range<usize>) -> Range<usize> {
        let end = r.end.min(self.n);
        r.start.min(end)..end
    }

    // values < upper among positions [lo, hi)
    fn count_less(&self, mut lo: usize, mut hi: usize, upper: usize, c: &mut Counters) -> usize {
        if upper >= 1usize << self.bits {
            return hi - lo;
        }
        let mut res = 0;
        for (l, level) in self.levels.iter().enumerate() {
            let bit = (upper >> (self.bits as usize - 1 - l)) & 1;
            let (r0lo, r0hi) = (level.rank0(lo), level.rank0(hi));
            c.rank_probes += 2;
            if bit == 1 {
                res += r0hi - r0lo;
                lo = self.zeros[l] + (lo - r0lo);
                hi = self.zeros[l] + (hi - r0hi);
            } else {
                lo = r0lo;
                hi = r0hi;
            }
            if lo == hi {
                break;
            }
        }
        res
    }

    fn count_inner(&self, r: &Rect, c: &mut Counters) -> usize {
        let xs = self.clip(&r.xs);
        let ys = self.clip(&r.ys);
        if xs.is_empty() || ys.is_empty() {
            return 0;
        }
        self.count_less(xs.start, xs.end, ys.end, c) - self.count_less(xs.start, xs.end, ys.start, c)
    }

    pub fn count_with(&self, r: &Rect, c: &mut Counters) -> usize {
        c.count_queries += 1;
        self.count_inner(r, c)
    }

    pub fn count(&self, r: &Rect) -> usize {
        self.count_with(r, &mut Counters::default())
    }

    pub fn is_nonempty_with(&self, r: &Rect, c: &mut Counters) -> bool {
        c.emptiness_probes += 1;
        self.count_inner(r, c) > 0
    }

    pub fn is_nonempty(&self, r: &Rect) -> bool {
        self.is_nonempty_with(r, &mut Counters::default())
    }

    /// Reports up to `limit` points of the rectangle, in increasing `y`.
    pub fn report_limit_with(
        &self,
        r: &Rect,
        limit: usize,
        c: &mut Counters,
    ) -> Vec<(usize, usize)> {
        c.report_queries += 1;
        let xs = self.clip(&r.xs);
        let ys = self.clip(&r.ys);
        let mut out = Vec::new();
        if xs.is_empty() || ys.is_empty() || limit == 0 {
            return out;
        }
        // (level, value prefix, lo, hi)
        let mut stack = vec![(0usize, 0usize, xs.start, xs.end)];
        while let Some((l, prefix, lo, hi)) = stack.pop() {
            if lo == hi {
                continue;
            }
            let rem = self.bits as usize - l;
            let min = prefix << rem;
            let max = min + (1usize << rem) - 1;
            if max < ys.start || min >= ys.end {
                continue;
            }
            if l == self.bits as usize {
                let y = prefix;
                out.push((self.inverse[y] as usize, y));
                if out.len() == limit {
                    break;
                }
                continue;
            }
            let level = &self.levels[l];
            let (r0lo, r0hi) = (level.rank0(lo), level.rank0(hi));
            c.rank_probes += 2;
            let z = self.zeros[l];
            // ones pushed first so zeros come out first
            stack.push((l + 1, prefix << 1 | 1, z + (lo - r0lo), z + (hi - r0hi)));
            stack.push((l + 1, prefix << 1, r0lo, r0hi));
        }
        c.reported_points += out.len() as u64;
        out
    }

    pub fn report_with(&self, r: &Rect, c: &mut Counters) -> Vec<(usize, usize)> {
        self.report_limit_with(r, usize::MAX, c)
    }

    pub fn report(&self, r: &Rect) -> Vec<(usize, usize)> {
        self.report_with(r, &mut Counters::default())
    }

    pub fn stored_bytes(&self) -> usize {
        self.levels.iter().map(RankBits::bytes).sum::<usize>()
            + self.inverse.len() * 4
            + self.pi.len() * 4
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute(pi: &[usize], r: &Rect) -> Vec<(usize, usize)> {
        pi.iter()
            .enumerate()
            .filter(|&(x, &y)| r.xs.contains(&x) && r.ys.contains(&y))
            .map(|(x, &y)| (x, y))
            .collect()
    }

    fn random_rect(n: usize, rng: &mut impl Rng) -> Rect {
        let x1 = rng.gen_range(0..n);
        let x2 = rng.gen_range(0..n);
        let y1 = rng.gen_range(0..n);
        let y2 = rng.gen_range(0..n);
        // inverted about a quarter of the time
        if rng.gen_bool(0.75) {
            Rect::inclusive(x1.min(x2), x1.max(x2), y1.min(y2), y1.max(y2))
        } else {
            Rect::inclusive(x1, x2, y1, y2)
        }
    }

    #[test]
    fn rejects_non_permutations() {
        assert_eq!(
            LeafPermutation::new(vec![0, 0]),
            Err(GridError::Duplicate { value: 0 })
        );
        assert_eq!(
            LeafPermutation::new(vec![0, 2]),
            Err(GridError::OutOfRange { pos: 1, value: 2, n: 2 })
        );
    }

    #[test]
    fn identity_two() {
        let g = GridIndex::build(LeafPermutation::new(vec![0, 1]).unwrap());
        assert!(!g.is_nonempty(&Rect::inclusive(0, 0, 1, 1)));
        assert!(g.is_nonempty(&Rect::inclusive(0, 1, 0, 0)));
        let mut all = g.report(&Rect::inclusive(0, 1, 0, 1));
        all.sort();
        assert_eq!(all, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn reversal_four() {
        let g = GridIndex::build(LeafPermutation::new(vec![3, 2, 1, 0]).unwrap());
        let mut all = g.report(&Rect::inclusive(0, 3, 0, 3));
        all.sort();
        assert_eq!(all, vec![(0, 3), (1, 2), (2, 1), (3, 0)]);
        assert_eq!(g.count(&Rect::inclusive(0, 1, 0, 1)), 0);
        assert_eq!(g.count(&Rect::inclusive(1, 2, 1, 2)), 2);
    }

    #[test]
    fn empty_and_full() {
        let g = GridIndex::build(LeafPermutation::new(vec![2, 0, 1]).unwrap());
        assert!(g.report(&Rect::inclusive(2, 1, 0, 2)).is_empty());
        assert_eq!(g.count(&Rect::inclusive(2, 1, 0, 2)), 0);
        assert_eq!(g.report(&Rect::inclusive(0, 2, 0, 2)).len(), 3);
        assert_eq!(g.count(&Rect::inclusive(0, 2, 0, 2)), 3);
        let one = GridIndex::build(LeafPermutation::new(vec![0]).unwrap());
        assert_eq!(one.report(&Rect::inclusive(0, 0, 0, 0)), vec![(0, 0)]);
    }

    #[test]
    fn random_rectangles_match_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 256;
        let mut pi: Vec<usize> = (0..n).collect();
        pi.shuffle(&mut rng);
        let g = GridIndex::build(LeafPermutation::new(pi.clone()).unwrap());
        let bound = (ceil_log2(n) as u64 + 1).pow(2);
        for _ in 0..10_000 {
            let r = random_rect(n, &mut rng);
            let want = brute(&pi, &r);
            let mut c = Counters::default();
            assert_eq!(g.is_nonempty_with(&r, &mut c), !want.is_empty());
            assert!(c.rank_probes <= 4 * bound);
            assert_eq!(g.count(&r), want.len());
            let mut got = g.report(&r);
            got.sort();
            assert_eq!(got, want);
        }
    }

    proptest::proptest! {
        #[test]
        fn full_report_is_the_permutation(seed in 0u64..1000, n in 1usize..300) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pi: Vec<usize> = (0..n).collect();
            pi.shuffle(&mut rng);
            let g = GridIndex::build(LeafPermutation::new(pi.clone()).unwrap());
            let mut all = g.report(&Rect::inclusive(0, n - 1, 0, n - 1));
            all.sort();
            proptest::prop_assert_eq!(all, pi.iter().copied().enumerate().collect::<Vec<_>>());
            let r = random_rect(n, &mut rng);
            let k = g.count(&r);
            proptest::prop_assert_eq!(k > 0, g.is_nonempty(&r));
            proptest::prop_assert_eq!(k, g.report(&r).len());
        }
    }
}
