use std::fmt::Write;

use hialcs::hia::{SampleRate, SampledEngine, SkylineEngine};
use hialcs::tree::ceil_log2;

use crate::container::IndexContainer;

#[derive(Debug, Clone, PartialEq)]
pub struct IndexStats {
    pub text_len: usize,
    pub phrases: usize,
    pub alphabet: usize,
    pub rev_nodes: usize,
    pub suf_nodes: usize,
    pub skyline_lists: usize,
    pub skyline_pairs: usize,
    /// `n (⌈log₂ n⌉ + 1)²`
    pub skyline_bound: usize,
    pub skyline_bytes: usize,
    pub sample_rate: usize,
    pub sampled_pairs: usize,
    pub sampled_bytes: usize,
    pub grid_bytes: usize,
    pub container_bytes: usize,
    /// `n ⌈log₂ N⌉` machine words
    pub nlogn_words: usize,
}

impl IndexStats {
    pub fn of(c: &IndexContainer) -> Self {
        let idx = c.index();
        let pair = idx.pair();
        let n = idx.parse().len();
        let lg = ceil_log2(n) as usize;
        let built;
        let skyline = match c.stored_engines().iter().find_map(|e| e.as_skyline()) {
            Some(s) => s,
            None => {
                built = SkylineEngine::build(pair);
                &built
            }
        };
        let built_sampled;
        let sampled = match c.stored_engines().iter().find_map(|e| e.as_sampled()) {
            Some(s) => s,
            None => {
                built_sampled = SampledEngine::build(pair, SampleRate::log(n));
                &built_sampled
            }
        };
        IndexStats {
            text_len: idx.text().len(),
            phrases: n,
            alphabet: c.alphabet_size(),
            rev_nodes: pair.t1().node_count(),
            suf_nodes: pair.t2().node_count(),
            skyline_lists: skyline.list_count(),
            skyline_pairs: skyline.total_pairs(),
            skyline_bound: n * (lg + 1) * (lg + 1),
            skyline_bytes: skyline.stored_bytes(),
            sample_rate: sampled.rate(),
            sampled_pairs: sampled.stored_pairs(),
            sampled_bytes: sampled.stored_bytes(),
            grid_bytes: pair.grid().stored_bytes(),
            container_bytes: c.to_bytes().len(),
            nlogn_words: n * (ceil_log2(idx.text().len()) as usize).max(1),
        }
    }

    pub fn phrase_ratio(&self) -> f64 {
        self.phrases as f64 / self.text_len as f64
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| writeln!(s, "{k}: {v}").unwrap();
        line("text_len", self.text_len.to_string());
        line("phrases", self.phrases.to_string());
        line("phrase_ratio", format!("{:.5}", self.phrase_ratio()));
        line("alphabet", self.alphabet.to_string());
        line("rev_trie_nodes", self.rev_nodes.to_string());
        line("suf_trie_nodes", self.suf_nodes.to_string());
        line("skyline_lists", self.skyline_lists.to_string());
        line("skyline_pairs", self.skyline_pairs.to_string());
        line("skyline_bound", self.skyline_bound.to_string());
        line(
            "skyline_bound_ratio",
            format!("{:.4}", self.skyline_pairs as f64 / self.skyline_bound as f64),
        );
        line("skyline_bytes", self.skyline_bytes.to_string());
        line("sample_rate", self.sample_rate.to_string());
        line("sampled_pairs", self.sampled_pairs.to_string());
        line("sampled_bytes", self.sampled_bytes.to_string());
        line("grid_bytes", self.grid_bytes.to_string());
        line("container_bytes", self.container_bytes.to_string());
        line("n_log_N_words", self.nlogn_words.to_string());
        line(
            "container_words_per_n_log_N",
            format!("{:.3}", self.container_bytes as f64 / 8.0 / self.nlogn_words as f64),
        );
        s
    }
}
