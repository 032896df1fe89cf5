//! Seeded oracle suites: HIA engine equivalence and LCS against the DP.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hialcs::gen::{random_pair, random_query, random_text};
use hialcs::hia::{
    BaselineEngine, HiaAnswer, HiaEngine, HiaQuery, NaiveOracle, SampleRate, SampledEngine,
    SkylineEngine, TreePair,
};
use hialcs::lcs::{lcs, naive_lcs, Engine, EngineChoice};
use hialcs::lz::LzIndex;
use hialcs::tree::ceil_log2;
use hialcs::Counters;

/// Per-trial generator: every `(stream, trial)` gets its own ChaCha stream,
/// so single trials can be rerun in isolation.
pub fn trial_rng(seed: u64, stream: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(trial);
    rng
}

/// The sample rates checked for `n` leaves: `1, 2, ⌈log₂ n⌉, ⌈log₂ n⌉²`.
pub fn sample_rates(n: usize) -> Vec<SampleRate> {
    let mut r = vec![
        SampleRate::new(1).unwrap(),
        SampleRate::new(2).unwrap(),
        SampleRate::log(n),
        SampleRate::log_squared(n),
    ];
    r.dedup();
    r
}

#[derive(Debug, Clone, Default)]
pub struct HiaSuite {
    pub instances: usize,
    pub queries: usize,
    /// Reproducers for wrong answers, at most a handful.
    pub mismatches: Vec<String>,
    pub mismatch_count: usize,
    pub skyline_bound_violations: usize,
    /// Largest `Σ skyline lengths / (n (⌈log₂ n⌉ + 1)²)` seen.
    pub max_skyline_ratio: f64,
    pub probe_bound_violations: usize,
    pub visit_bound_violations: usize,
    pub max_visits: u64,
}

impl HiaSuite {
    fn merge(mut self, o: HiaSuite) -> HiaSuite {
        self.instances += o.instances;
        self.queries += o.queries;
        self.mismatch_count += o.mismatch_count;
        self.mismatches.extend(o.mismatches);
        self.mismatches.truncate(5);
        self.skyline_bound_violations += o.skyline_bound_violations;
        self.max_skyline_ratio = self.max_skyline_ratio.max(o.max_skyline_ratio);
        self.probe_bound_violations += o.probe_bound_violations;
        self.visit_bound_violations += o.visit_bound_violations;
        self.max_visits = self.max_visits.max(o.max_visits);
        self
    }

    pub fn passed(&self) -> bool {
        self.mismatch_count == 0
            && self.skyline_bound_violations == 0
            && self.probe_bound_violations == 0
            && self.visit_bound_violations == 0
    }
}

#[derive(Debug, Clone)]
pub struct HiaSuiteConfig {
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub queries: usize,
    /// Break the skyline engine's predecessor search, to check that the
    /// suite notices.
    pub inject_fault: bool,
}

fn check_answer(
    pair: &TreePair,
    oracle: &NaiveOracle,
    q: &HiaQuery,
    got: Option<HiaAnswer>,
) -> Result<(), String> {
    let want = oracle.query(pair, q).map_err(|e| e.to_string())?;
    let (Some(g), Some(w)) = (got, want) else {
        return if got.is_none() && want.is_none() { Ok(()) } else { Err(format!("{got:?} vs {want:?}")) };
    };
    if g.combined != w.combined {
        return Err(format!("combined {} vs {}", g.combined, w.combined));
    }
    let (t1, t2) = (pair.t1(), pair.t2());
    let eff = |t: &hialcs::tree::WeightedTree, v, u, w: Option<u64>| {
        if u == v { w.unwrap_or(t.weight(u)) } else { t.weight(u) }
    };
    let ok = t1.is_ancestor_or_self(g.u1, q.v1)
        && t2.is_ancestor_or_self(g.u2, q.v2)
        && oracle.induced(g.u1, g.u2)
        && eff(t1, q.v1, g.u1, q.w1) + eff(t2, q.v2, g.u2, q.w2) == g.combined;
    if ok {
        Ok(())
    } else {
        Err(format!("witness ({}, {}) does not realize {}", g.u1, g.u2, g.combined))
    }
}

fn hia_trial(cfg: &HiaSuiteConfig, n: usize, trial: usize) -> HiaSuite {
    let mut rng = trial_rng(cfg.seed, n as u64, trial as u64);
    let pair = random_pair(n, &mut rng);
    let oracle = NaiveOracle::new(&pair);
    let mut skyline = SkylineEngine::build(&pair);
    if cfg.inject_fault {
        skyline.inject_predecessor_fault();
    }
    let sampled: Vec<SampledEngine> =
        sample_rates(n).into_iter().map(|b| SampledEngine::build(&pair, b)).collect();

    let lg = ceil_log2(n) as usize;
    let bound = n * (lg + 1) * (lg + 1);
    let total = skyline.total_pairs();
    let mut out = HiaSuite {
        instances: 1,
        max_skyline_ratio: total as f64 / bound as f64,
        skyline_bound_violations: usize::from(total > bound),
        ..Default::default()
    };
    let visit_bound = 2 * (lg as u64 + 1);
    let fail = |what: &str, q: &HiaQuery, why: String, out: &mut HiaSuite| {
        out.mismatch_count += 1;
        if out.mismatches.len() < 5 {
            out.mismatches.push(format!(
                "{what}: {why}; seed={} n={n} trial={trial} query={q:?} \
                 (rerun: hialcs verify --seed {} --sizes {n} --trials {})",
                cfg.seed,
                cfg.seed,
                trial + 1
            ));
        }
    };
    for _ in 0..cfg.queries {
        let q = random_query(&pair, &mut rng);
        out.queries += 1;

        let mut c = Counters::default();
        let got = BaselineEngine.query_with(&pair, &q, &mut c).ok().flatten();
        if let Err(why) = check_answer(&pair, &oracle, &q, got) {
            fail("baseline", &q, why, &mut out);
        }
        let probe_bound = (pair.t1().depth(q.v1) + pair.t2().depth(q.v2) + 1) as u64;
        if c.emptiness_probes > probe_bound {
            out.probe_bound_violations += 1;
        }

        let mut c = Counters::default();
        let got = skyline.query_with(&pair, &q, &mut c).ok().flatten();
        if let Err(why) = check_answer(&pair, &oracle, &q, got) {
            fail("skyline", &q, why, &mut out);
        }
        out.max_visits = out.max_visits.max(c.path_pair_visits);
        if c.path_pair_visits > visit_bound {
            out.visit_bound_violations += 1;
        }

        for e in &sampled {
            let mut c = Counters::default();
            let got = e.query_with(&pair, &q, &mut c).ok().flatten();
            if let Err(why) = check_answer(&pair, &oracle, &q, got) {
                fail(&format!("sampled B={}", e.rate()), &q, why, &mut out);
            }
            if c.path_pair_visits > visit_bound {
                out.visit_bound_violations += 1;
            }
        }
    }
    out
}

pub fn hia_suite(cfg: &HiaSuiteConfig) -> HiaSuite {
    let jobs: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    jobs.par_iter()
        .map(|&(n, t)| hia_trial(cfg, n, t))
        .reduce(HiaSuite::default, HiaSuite::merge)
}

#[derive(Debug, Clone)]
pub struct LcsSuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_text: usize,
    pub max_pattern: usize,
    pub alphabets: Vec<u8>,
}

#[derive(Debug, Clone, Default)]
pub struct LcsSuite {
    pub instances: usize,
    pub mismatches: Vec<String>,
    pub mismatch_count: usize,
    /// Instances whose answer was not the full pattern length.
    pub nontrivial: usize,
}

impl LcsSuite {
    fn merge(mut self, o: LcsSuite) -> LcsSuite {
        self.instances += o.instances;
        self.mismatch_count += o.mismatch_count;
        self.mismatches.extend(o.mismatches);
        self.mismatches.truncate(5);
        self.nontrivial += o.nontrivial;
        self
    }

    pub fn passed(&self) -> bool {
        self.mismatch_count == 0
    }
}

/// A random pattern: half the time a piece of the text with a few edits,
/// otherwise uniform over the alphabet.
pub fn random_pattern<R: Rng>(s: &[u8], max_len: usize, sigma: u8, rng: &mut R) -> Vec<u8> {
    let m = rng.gen_range(1..=max_len);
    if rng.gen_bool(0.5) {
        let a = rng.gen_range(0..s.len());
        let mut p: Vec<u8> = s[a..].iter().copied().take(m).collect();
        for _ in 0..rng.gen_range(0..=3) {
            let i = rng.gen_range(0..p.len());
            p[i] = b'a' + rng.gen_range(0..sigma);
        }
        p
    } else {
        random_text(m, sigma, rng)
    }
}

fn lcs_trial(cfg: &LcsSuiteConfig, sigma: u8, trial: usize) -> LcsSuite {
    let mut rng = trial_rng(cfg.seed, 1 << 32 | sigma as u64, trial as u64);
    let s = random_text(rng.gen_range(1..=cfg.max_text), sigma, &mut rng);
    let p = random_pattern(&s, cfg.max_pattern, sigma, &mut rng);
    let (want, _) = naive_lcs(&s, &p);
    let idx = LzIndex::build(s.clone()).expect("text is nonempty");
    let n = idx.pair().leaf_count();
    let mut out = LcsSuite { instances: 1, nontrivial: usize::from(want < p.len()), ..Default::default() };
    for choice in [
        EngineChoice::Baseline,
        EngineChoice::Skyline,
        EngineChoice::Sampled(SampleRate::log(n)),
    ] {
        let e = Engine::build(idx.pair(), choice);
        let bad = match lcs(&idx, &p, &e) {
            Err(err) => Some(err.to_string()),
            Ok(r) if r.length != want => Some(format!("length {} vs {want}", r.length)),
            Ok(r) => match (r.p_start, r.s_start) {
                (Some(a), Some(b)) if p[a..a + r.length] != s[b..b + r.length] => {
                    Some("witness differs".to_string())
                }
                _ => None,
            },
        };
        if let Some(why) = bad {
            out.mismatch_count += 1;
            if out.mismatches.len() < 5 {
                out.mismatches.push(format!(
                    "lcs {}: {why}; seed={} sigma={sigma} trial={trial} text={:?} pattern={:?}",
                    choice.name(),
                    cfg.seed,
                    String::from_utf8_lossy(&s),
                    String::from_utf8_lossy(&p),
                ));
            }
        }
    }
    out
}

pub fn lcs_suite(cfg: &LcsSuiteConfig) -> LcsSuite {
    let jobs: Vec<(u8, usize)> = cfg
        .alphabets
        .iter()
        .flat_map(|&a| (0..cfg.trials).map(move |t| (a, t)))
        .collect();
    jobs.par_iter()
        .map(|&(a, t)| lcs_trial(cfg, a, t))
        .reduce(LcsSuite::default, LcsSuite::merge)
}
