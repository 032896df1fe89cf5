//! Longest common substring of a pattern and an indexed text.
//!
//! Every occurrence of a common substring that appears first in the text
//! contains the end of some LZ77 phrase. Splitting the pattern at each
//! position `i` and asking the tries for the longest phrase suffix ending
//! with `P[..i]` and the longest boundary suffix starting with `P[i..]`
//! turns the problem into one weight-overridden HIA query per split.

use thiserror::Error;

use crate::counters::Counters;
use crate::hia::{
    BaselineEngine, HiaAnswer, HiaEngine, HiaError, HiaQuery, SampleRate, SampledEngine,
    SkylineEngine, TreePair,
};
use crate::lz::LzIndex;
use crate::tree::Weight;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LcsError {
    #[error("pattern is empty")]
    EmptyPattern,
    #[error("engine was built for a different index")]
    EngineMismatch,
    #[error("witness at pattern {p_start} / text {s_start} does not match (length {length})")]
    BadWitness { length: usize, p_start: usize, s_start: usize },
    #[error(transparent)]
    Hia(#[from] HiaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Baseline,
    Skyline,
    Sampled(SampleRate),
}

impl EngineChoice {
    pub fn name(&self) -> &'static str {
        match self {
            EngineChoice::Baseline => "baseline",
            EngineChoice::Skyline => "skyline",
            EngineChoice::Sampled(_) => "sampled",
        }
    }
}

#[derive(Debug, Clone)]
enum Inner {
    Baseline(BaselineEngine),
    Skyline(SkylineEngine),
    Sampled(SampledEngine),
}

/// An HIA engine tied to the tree pair it was built for.
#[derive(Debug, Clone)]
pub struct Engine {
    inner: Inner,
    shape: [usize; 3],
}

fn shape(pair: &TreePair) -> [usize; 3] {
    [pair.leaf_count(), pair.t1().node_count(), pair.t2().node_count()]
}

impl Engine {
    pub fn build(pair: &TreePair, choice: EngineChoice) -> Self {
        let inner = match choice {
            EngineChoice::Baseline => Inner::Baseline(BaselineEngine),
            EngineChoice::Skyline => Inner::Skyline(SkylineEngine::build(pair)),
            EngineChoice::Sampled(b) => Inner::Sampled(SampledEngine::build(pair, b)),
        };
        Engine { inner, shape: shape(pair) }
    }

    pub fn from_skyline(pair: &TreePair, e: SkylineEngine) -> Self {
        Engine { inner: Inner::Skyline(e), shape: shape(pair) }
    }

    pub fn from_sampled(pair: &TreePair, e: SampledEngine) -> Self {
        Engine { inner: Inner::Sampled(e), shape: shape(pair) }
    }

    pub fn choice(&self) -> EngineChoice {
        match &self.inner {
            Inner::Baseline(_) => EngineChoice::Baseline,
            Inner::Skyline(_) => EngineChoice::Skyline,
            Inner::Sampled(e) => EngineChoice::Sampled(SampleRate::new(e.rate()).unwrap()),
        }
    }

    pub fn as_skyline(&self) -> Option<&SkylineEngine> {
        match &self.inner {
            Inner::Skyline(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_sampled(&self) -> Option<&SampledEngine> {
        match &self.inner {
            Inner::Sampled(e) => Some(e),
            _ => None,
        }
    }

    pub fn fits(&self, pair: &TreePair) -> bool {
        self.shape == shape(pair)
    }
}

impl HiaEngine for Engine {
    fn query_with(
        &self,
        pair: &TreePair,
        q: &HiaQuery,
        c: &mut Counters,
    ) -> Result<Option<HiaAnswer>, HiaError> {
        match &self.inner {
            Inner::Baseline(e) => e.query_with(pair, q, c),
            Inner::Skyline(e) => e.query_with(pair, q, c),
            Inner::Sampled(e) => e.query_with(pair, q, c),
        }
    }

    fn name(&self) -> &'static str {
        self.choice().name()
    }
}

/// A longest common substring with one occurrence in each string. Positions
/// are 0-based and absent when the length is 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LcsResult {
    pub length: usize,
    pub p_start: Option<usize>,
    pub s_start: Option<usize>,
    /// Split of the pattern the witness was found at.
    pub split_i: Option<usize>,
    /// Phrase whose end the witness contains.
    pub boundary_k: Option<usize>,
}

impl LcsResult {
    fn empty() -> Self {
        LcsResult { length: 0, p_start: None, s_start: None, split_i: None, boundary_k: None }
    }
}

fn split_answers(
    index: &LzIndex,
    p: &[u8],
    engine: &dyn HiaEngine,
    c: &mut Counters,
) -> Result<Vec<(HiaQuery, HiaAnswer)>, LcsError> {
    if p.is_empty() {
        return Err(LcsError::EmptyPattern);
    }
    let pair = index.pair();
    index
        .split_loci(p)
        .into_iter()
        .map(|l| {
            let q = HiaQuery::with_weights(l.v1, l.v2, l.lcp_left as Weight, l.lcp_right as Weight);
            let a = engine.query_with(pair, &q, c)?.expect("the roots are always induced");
            Ok((q, a))
        })
        .collect()
}

/// Best combined weight per split `i` in `0..=m`.
pub fn lcs_all_splits(
    index: &LzIndex,
    p: &[u8],
    engine: &Engine,
) -> Result<Vec<(usize, usize)>, LcsError> {
    if !engine.fits(index.pair()) {
        return Err(LcsError::EngineMismatch);
    }
    let answers = split_answers(index, p, engine, &mut Counters::default())?;
    Ok(answers.iter().enumerate().map(|(i, (_, a))| (i, a.combined as usize)).collect())
}

pub fn lcs(index: &LzIndex, p: &[u8], engine: &Engine) -> Result<LcsResult, LcsError> {
    lcs_with(index, p, engine, &mut Counters::default())
}

/// Like [`lcs`], accumulating operation counts into `c`. Among equally long
/// answers the smallest split wins.
pub fn lcs_with(
    index: &LzIndex,
    p: &[u8],
    engine: &Engine,
    c: &mut Counters,
) -> Result<LcsResult, LcsError> {
    if !engine.fits(index.pair()) {
        return Err(LcsError::EngineMismatch);
    }
    let answers = split_answers(index, p, engine, c)?;
    let mut best: Option<(usize, &HiaQuery, &HiaAnswer)> = None;
    for (i, (q, a)) in answers.iter().enumerate() {
        if best.is_none_or(|b| a.combined > b.2.combined) {
            best = Some((i, q, a));
        }
    }
    let (i, q, a) = best.unwrap();
    if a.combined == 0 {
        return Ok(LcsResult::empty());
    }
    let pair = index.pair();
    let w1 = q.eff1(pair.t1(), a.u1) as usize;
    let length = a.combined as usize;
    let k = pair.common_leaf(a.u1, a.u2, c).expect("answers are induced pairs");
    let s_start = index.boundary(k) + 1 - w1;
    let p_start = i - w1;
    let text = index.text();
    let ok = s_start + length <= text.len()
        && p_start + length <= p.len()
        && text[s_start..s_start + length] == p[p_start..p_start + length];
    if !ok {
        return Err(LcsError::BadWitness { length, p_start, s_start });
    }
    Ok(LcsResult {
        length,
        p_start: Some(p_start),
        s_start: Some(s_start),
        split_i: Some(i),
        boundary_k: Some(k),
    })
}

/// Dynamic-programming reference: length and the first `(p_start, s_start)`
/// found in row-major order over the text.
pub fn naive_lcs(s: &[u8], p: &[u8]) -> (usize, Option<(usize, usize)>) {
    let mut prev = vec![0usize; p.len() + 1];
    let mut cur = vec![0usize; p.len() + 1];
    let mut best = (0, None);
    for (i, &x) in s.iter().enumerate() {
        for (j, &y) in p.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { 0 };
            let l = cur[j + 1];
            if l > best.0 {
                best = (l, Some((j + 1 - l, i + 1 - l)));
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_text;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_engines(idx: &LzIndex) -> Vec<Engine> {
        let n = idx.pair().leaf_count();
        [
            EngineChoice::Baseline,
            EngineChoice::Skyline,
            EngineChoice::Sampled(SampleRate::log(n)),
            EngineChoice::Sampled(SampleRate::new(1).unwrap()),
        ]
        .into_iter()
        .map(|ch| Engine::build(idx.pair(), ch))
        .collect()
    }

    fn check(s: &[u8], p: &[u8], want: usize) {
        let idx = LzIndex::build(s.to_vec()).unwrap();
        for e in all_engines(&idx) {
            let r = lcs(&idx, p, &e).unwrap();
            assert_eq!(r.length, want, "{} on {s:?} / {p:?}", e.name());
            if let (Some(a), Some(b)) = (r.p_start, r.s_start) {
                assert_eq!(p[a..a + r.length], s[b..b + r.length]);
            }
        }
    }

    #[test]
    fn small_examples() {
        check(b"banana", b"ananas", 5);
        check(b"abc", b"xyz", 0);
        check(b"a", b"a", 1);
        check(b"aaaa", b"aa", 2);
        check(b"abcabc", b"abcabc", 6);
        let idx = LzIndex::build(b"banana".to_vec()).unwrap();
        let e = Engine::build(idx.pair(), EngineChoice::Skyline);
        let r = lcs(&idx, b"ananas", &e).unwrap();
        assert_eq!(&b"ananas"[r.p_start.unwrap()..][..5], b"anana");
    }

    #[test]
    fn naive_examples() {
        assert_eq!(naive_lcs(b"abcd", b"abcd"), (4, Some((0, 0))));
        assert_eq!(naive_lcs(b"abc", b"xyz"), (0, None));
        assert_eq!(naive_lcs(b"banana", b"ananas").0, 5);
    }

    #[test]
    fn split_tables() {
        let idx = LzIndex::build(b"aaaa".to_vec()).unwrap();
        let e = Engine::build(idx.pair(), EngineChoice::Baseline);
        let t = lcs_all_splits(&idx, b"aa", &e).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.iter().map(|x| x.1).max(), Some(2));
        let idx = LzIndex::build(b"abc".to_vec()).unwrap();
        let e = Engine::build(idx.pair(), EngineChoice::Skyline);
        assert!(lcs_all_splits(&idx, b"xyz", &e).unwrap().iter().all(|x| x.1 == 0));
    }

    #[test]
    fn errors() {
        let idx = LzIndex::build(b"abc".to_vec()).unwrap();
        let e = Engine::build(idx.pair(), EngineChoice::Baseline);
        assert_eq!(lcs(&idx, b"", &e), Err(LcsError::EmptyPattern));
        let other = LzIndex::build(b"abcdefgh".to_vec()).unwrap();
        let e = Engine::build(other.pair(), EngineChoice::Skyline);
        assert_eq!(lcs(&idx, b"ab", &e), Err(LcsError::EngineMismatch));
    }

    #[test]
    fn random_against_dp() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for t in 0..90 {
            let sigma = [2, 4, 26][t % 3];
            let s = random_text(rng.gen_range(1..=600), sigma, &mut rng);
            let p = if rng.gen_bool(0.5) {
                let a = rng.gen_range(0..s.len());
                let b = rng.gen_range(a..s.len().min(a + 40)) + 1;
                let mut p = s[a..b].to_vec();
                p.extend(random_text(rng.gen_range(0..10), sigma, &mut rng));
                p
            } else {
                random_text(rng.gen_range(1..=40), sigma, &mut rng)
            };
            let want = naive_lcs(&s, &p).0;
            check(&s, &p, want);
            let idx = LzIndex::build(s.clone()).unwrap();
            let e = Engine::build(idx.pair(), EngineChoice::Baseline);
            let table = lcs_all_splits(&idx, &p, &e).unwrap();
            assert_eq!(table.iter().map(|x| x.1).max(), Some(want));
        }
    }
}
