/// Sparse table answering range-argmax queries in O(1).
///
/// Only indices are stored; callers supply the key function at query time.
#[derive(Debug, Clone, Default)]
pub struct SparseMax {
    levels: Vec<Vec<u32>>,
}

impl SparseMax {
    pub fn new<K: Ord>(n: usize, key: impl Fn(usize) -> K) -> Self {
        if n == 0 {
            return SparseMax::default();
        }
        let pick = |a: u32, b: u32| if key(b as usize) > key(a as usize) { b } else { a };
        let mut levels = vec![(0..n as u32).collect::<Vec<_>>()];
        let mut span = 1;
        while 2 * span <= n {
            let prev = levels.last().unwrap();
            let next = (0..=n - 2 * span).map(|i| pick(prev[i], prev[i + span])).collect();
            levels.push(next);
            span *= 2;
        }
        SparseMax { levels }
    }

    /// Index of a maximum key in `[lo, hi)`, leftmost on ties; `None` when empty.
    pub fn argmax<K: Ord>(&self, lo: usize, hi: usize, key: impl Fn(usize) -> K) -> Option<usize> {
        if lo >= hi {
            return None;
        }
        let k = (usize::BITS - 1 - (hi - lo).leading_zeros()) as usize;
        let level = &self.levels[k];
        let (a, b) = (level[lo] as usize, level[hi - (1 << k)] as usize);
        Some(if key(b) > key(a) { b } else { a })
    }

    pub fn stored_bytes(&self) -> usize {
        self.levels.iter().map(|l| l.len() * 4).sum()
    }
}
