use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hialcs::gen::{random_pair, random_query};
use hialcs::hia::{
    naive_hia, BaselineEngine, HiaEngine, SampleRate, SampledEngine, SkylineEngine,
};
use hialcs::lcs::{lcs, lcs_all_splits, naive_lcs, Engine, EngineChoice};
use hialcs::lz::{decompress, parse, LzIndex};
use hialcs::tree::{ceil_log2, validate_tree};

fn text(max: usize) -> impl Strategy<Value = Vec<u8>> {
    (1u8..=4).prop_flat_map(move |sigma| prop::collection::vec(0..sigma, 1..max))
        .prop_map(|v| v.into_iter().map(|c| b'a' + c).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_round_trips(s in text(400)) {
        let p = parse(&s).unwrap();
        prop_assert_eq!(decompress(&p), s.clone());
        let mut at = 0;
        for (k, ph) in p.phrases().iter().enumerate() {
            prop_assert_eq!(ph.start, at);
            prop_assert!(ph.literal.is_some() || k + 1 == p.len());
            at += ph.len();
        }
    }

    #[test]
    fn tries_are_valid(s in text(300)) {
        let idx = LzIndex::build(s).unwrap();
        prop_assert!(validate_tree(idx.pair().t1()).is_ok());
        prop_assert!(validate_tree(idx.pair().t2()).is_ok());
        prop_assert_eq!(idx.pair().leaf_count(), idx.parse().len());
    }

    #[test]
    fn split_loci_are_sandwiched(s in text(300), p in text(30)) {
        let idx = LzIndex::build(s).unwrap();
        let loci = idx.split_loci(&p);
        prop_assert_eq!(loci.len(), p.len() + 1);
        for (i, l) in loci.iter().enumerate() {
            prop_assert!(l.lcp_left <= i && l.lcp_right <= p.len() - i);
            for (t, v, lcp) in [(idx.pair().t1(), l.v1, l.lcp_left), (idx.pair().t2(), l.v2, l.lcp_right)] {
                prop_assert!(lcp as u64 <= t.weight(v));
                if let Some(u) = t.parent(v) {
                    prop_assert!(t.weight(u) < lcp as u64);
                }
            }
        }
    }

    #[test]
    fn lcs_matches_dp_for_every_engine(s in text(500), p in text(40)) {
        let want = naive_lcs(&s, &p).0;
        let idx = LzIndex::build(s.clone()).unwrap();
        let n = idx.pair().leaf_count();
        for choice in [
            EngineChoice::Baseline,
            EngineChoice::Skyline,
            EngineChoice::Sampled(SampleRate::new(2).unwrap()),
            EngineChoice::Sampled(SampleRate::log_squared(n)),
        ] {
            let e = Engine::build(idx.pair(), choice);
            let r = lcs(&idx, &p, &e).unwrap();
            prop_assert_eq!(r.length, want);
            if let (Some(a), Some(b)) = (r.p_start, r.s_start) {
                prop_assert_eq!(&p[a..a + want], &s[b..b + want]);
            }
            let table = lcs_all_splits(&idx, &p, &e).unwrap();
            prop_assert_eq!(table.iter().map(|x| x.1).max(), Some(want));
        }
    }

    #[test]
    fn engines_agree(seed in any::<u64>(), n in 1usize..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = random_pair(n, &mut rng);
        let sky = SkylineEngine::build(&pair);
        let smp = SampledEngine::build(&pair, SampleRate::log(n));
        for _ in 0..20 {
            let q = random_query(&pair, &mut rng);
            let want = naive_hia(&pair, &q).unwrap().map(|a| a.combined);
            prop_assert_eq!(BaselineEngine.query(&pair, &q).unwrap().map(|a| a.combined), want);
            prop_assert_eq!(sky.query(&pair, &q).unwrap().map(|a| a.combined), want);
            prop_assert_eq!(smp.query(&pair, &q).unwrap().map(|a| a.combined), want);
        }
    }
}

#[test]
fn sampled_tables_shrink_with_the_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for n in [1 << 8, 1 << 10, 1 << 12] {
        let pair = random_pair(n, &mut rng);
        let sky = SkylineEngine::build(&pair).stored_bytes();
        let log = SampledEngine::build(&pair, SampleRate::log(n)).stored_bytes();
        let log2 = SampledEngine::build(&pair, SampleRate::log_squared(n)).stored_bytes();
        assert!(log2 <= log && log <= sky, "n={n}: {log2} {log} {sky}");
    }
}

#[test]
fn skyline_total_within_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for n in [2, 16, 100, 512, 2048] {
        let pair = random_pair(n, &mut rng);
        let lg = ceil_log2(n) as usize;
        assert!(SkylineEngine::build(&pair).total_pairs() <= n * (lg + 1) * (lg + 1));
    }
}
