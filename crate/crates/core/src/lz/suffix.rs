//! Suffix array, LCP array and longest-previous-factor table.

/// Suffix array, its inverse and the LCP array of a byte string.
///
/// `lcp[r]` is the longest common prefix of the suffixes at ranks `r - 1`
/// and `r`; `lcp[0] = 0`.
#[derive(Debug, Clone)]
pub struct SuffixData {
    pub sa: Vec<usize>,
    pub rank: Vec<usize>,
    pub lcp: Vec<usize>,
}

impl SuffixData {
    pub fn new(s: &[u8]) -> Self {
        let sa = suffix_array(s);
        let mut rank = vec![0; s.len()];
        for (r, &i) in sa.iter().enumerate() {
            rank[i] = r;
        }
        let lcp = lcp_array(s, &sa, &rank);
        SuffixData { sa, rank, lcp }
    }

    /// For every position, the longest factor starting there that also
    /// starts at an earlier position, with one such earlier position.
    /// Occurrences may overlap the position itself.
    pub fn longest_previous_factors(&self) -> Vec<(usize, Option<usize>)> {
        let n = self.sa.len();
        let mut out = vec![(0, None); n];
        let mut take = |pos: usize, len: usize, src: usize| {
            let cur = &mut out[pos];
            if len > cur.0 || (len == cur.0 && len > 0 && cur.1.is_none_or(|s| src < s)) {
                *cur = (len, Some(src));
            }
        };
        // nearest smaller position on each side in suffix order; each stack
        // entry keeps the LCP with the entry below it
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for r in 0..n {
            let mut h = self.lcp[r];
            while let Some(&(p, below)) = stack.last() {
                if p < self.sa[r] {
                    break;
                }
                stack.pop();
                h = h.min(below);
            }
            if let Some(&(p, _)) = stack.last() {
                take(self.sa[r], h, p);
            }
            stack.push((self.sa[r], if stack.is_empty() { 0 } else { h }));
        }
        stack.clear();
        for r in (0..n).rev() {
            let mut h = if r + 1 < n { self.lcp[r + 1] } else { 0 };
            while let Some(&(p, below)) = stack.last() {
                if p < self.sa[r] {
                    break;
                }
                stack.pop();
                h = h.min(below);
            }
            if let Some(&(p, _)) = stack.last() {
                take(self.sa[r], h, p);
            }
            stack.push((self.sa[r], if stack.is_empty() { 0 } else { h }));
        }
        for (i, e) in out.iter_mut().enumerate() {
            if e.0 == 0 {
                *e = (0, None);
            } else {
                debug_assert!(e.1.unwrap() < i);
            }
        }
        out
    }
}

/// Prefix doubling with counting sorts, `O(N log N)`.
pub fn suffix_array(s: &[u8]) -> Vec<usize> {
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    let mut sa: Vec<usize> = (0..n).collect();
    sa.sort_by_key(|&i| s[i]);
    let mut rank = vec![0usize; n];
    for r in 1..n {
        rank[sa[r]] = rank[sa[r - 1]] + usize::from(s[sa[r]] != s[sa[r - 1]]);
    }
    let mut classes = rank[sa[n - 1]] + 1;
    let mut next = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    let mut k = 1;
    while classes < n {
        // order by second key: suffixes without one come first
        order.clear();
        order.extend(n - k..n);
        order.extend(sa.iter().filter(|&&j| j >= k).map(|&j| j - k));
        let mut start = vec![0usize; classes + 1];
        for &i in &order {
            start[rank[i] + 1] += 1;
        }
        for c in 1..=classes {
            start[c] += start[c - 1];
        }
        for &i in &order {
            sa[start[rank[i]]] = i;
            start[rank[i]] += 1;
        }
        next[sa[0]] = 0;
        for r in 1..n {
            let (a, b) = (sa[r - 1], sa[r]);
            let same = rank[a] == rank[b] && a + k < n && b + k < n && rank[a + k] == rank[b + k];
            next[b] = next[a] + usize::from(!same);
        }
        std::mem::swap(&mut rank, &mut next);
        classes = rank[sa[n - 1]] + 1;
        k *= 2;
    }
    sa
}

/// Kasai's algorithm.
pub fn lcp_array(s: &[u8], sa: &[usize], rank: &[usize]) -> Vec<usize> {
    let n = s.len();
    let mut lcp = vec![0; n];
    let mut h = 0usize;
    for i in 0..n {
        if rank[i] == 0 {
            h = 0;
            continue;
        }
        let j = sa[rank[i] - 1];
        while i + h < n && j + h < n && s[i + h] == s[j + h] {
            h += 1;
        }
        lcp[rank[i]] = h;
        h = h.saturating_sub(1);
    }
    lcp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_text;
    use crate::lz::naive_lpf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn naive_sa(s: &[u8]) -> Vec<usize> {
        let mut sa: Vec<usize> = (0..s.len()).collect();
        sa.sort_by(|&a, &b| s[a..].cmp(&s[b..]));
        sa
    }

    #[test]
    fn small_cases() {
        assert_eq!(suffix_array(b""), Vec::<usize>::new());
        assert_eq!(suffix_array(b"a"), vec![0]);
        assert_eq!(suffix_array(b"banana"), vec![5, 3, 1, 0, 4, 2]);
        let d = SuffixData::new(b"banana");
        assert_eq!(d.lcp, vec![0, 1, 3, 0, 0, 2]);
    }

    #[test]
    fn random_texts_match_sorting() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for t in 0..200 {
            let s = random_text(1 + t * 3, [1, 2, 4, 26][t % 4], &mut rng);
            let d = SuffixData::new(&s);
            assert_eq!(d.sa, naive_sa(&s));
            for r in 1..s.len() {
                let (a, b) = (&s[d.sa[r - 1]..], &s[d.sa[r]..]);
                let l = a.iter().zip(b).take_while(|(x, y)| x == y).count();
                assert_eq!(d.lcp[r], l);
            }
            let lpf = d.longest_previous_factors();
            for (i, &(len, src)) in lpf.iter().enumerate() {
                let (want, _) = naive_lpf(&s, i);
                assert_eq!(len, want, "pos {i} of {s:?}");
                if let Some(j) = src {
                    assert!(j < i);
                    assert_eq!(s[j..j + len], s[i..i + len]);
                }
            }
        }
    }
}
