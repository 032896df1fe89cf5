use serde_json::{json, Value};

use hialcs::hia::HiaEngine;
use hialcs::lcs::{lcs_all_splits, lcs_with, Engine, LcsError};
use hialcs::lz::LzIndex;
use hialcs::Counters;

/// Result of one pattern query as printed by `query`. Text positions and
/// phrase numbers are 1-based; `split_i` counts the pattern symbols left of
/// the split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryReport {
    pub pattern_len: usize,
    pub length: usize,
    pub p_start: Option<usize>,
    pub s_start: Option<usize>,
    pub split_i: Option<usize>,
    pub boundary_k: Option<usize>,
    pub engine: &'static str,
    pub counters: Counters,
    pub splits: Option<Vec<(usize, usize)>>,
}

pub fn run_query(
    index: &LzIndex,
    engine: &Engine,
    pattern: &[u8],
    verbose_splits: bool,
) -> Result<QueryReport, LcsError> {
    let mut c = Counters::default();
    let r = lcs_with(index, pattern, engine, &mut c)?;
    let splits = if verbose_splits {
        Some(lcs_all_splits(index, pattern, engine)?)
    } else {
        None
    };
    Ok(QueryReport {
        pattern_len: pattern.len(),
        length: r.length,
        p_start: r.p_start.map(|x| x + 1),
        s_start: r.s_start.map(|x| x + 1),
        split_i: r.split_i,
        boundary_k: r.boundary_k.map(|k| k + 1),
        engine: engine.name(),
        counters: c,
        splits,
    })
}

impl QueryReport {
    pub fn to_json(&self) -> Value {
        let c = &self.counters;
        let mut v = json!({
            "pattern_len": self.pattern_len,
            "length": self.length,
            "p_start": self.p_start,
            "s_start": self.s_start,
            "split_i": self.split_i,
            "boundary_k": self.boundary_k,
            "engine": self.engine,
            "emptiness_probes": c.emptiness_probes,
            "count_queries": c.count_queries,
            "report_queries": c.report_queries,
            "reported_points": c.reported_points,
            "rank_probes": c.rank_probes,
            "path_pair_visits": c.path_pair_visits,
            "blocks_recovered": c.blocks_recovered,
        });
        if let Some(s) = &self.splits {
            v["splits"] = json!(s.iter().map(|&(i, w)| [i, w]).collect::<Vec<_>>());
        }
        v
    }

    pub fn to_text(&self) -> String {
        let c = &self.counters;
        let show = |x: Option<usize>| x.map_or("-".to_string(), |x| x.to_string());
        let mut out = format!(
            "length: {}\np_start: {}\ns_start: {}\nsplit_i: {}\nboundary_k: {}\nengine: {}\n\
             emptiness_probes: {}\npath_pair_visits: {}\nreported_points: {}\nblocks_recovered: {}\n",
            self.length,
            show(self.p_start),
            show(self.s_start),
            show(self.split_i),
            show(self.boundary_k),
            self.engine,
            c.emptiness_probes,
            c.path_pair_visits,
            c.reported_points,
            c.blocks_recovered,
        );
        if let Some(s) = &self.splits {
            out.push_str("splits:\n");
            for (i, w) in s {
                out.push_str(&format!("  {i} {w}\n"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hialcs::lcs::EngineChoice;

    #[test]
    fn banana_report() {
        let idx = LzIndex::build(b"banana".to_vec()).unwrap();
        let e = Engine::build(idx.pair(), EngineChoice::Skyline);
        let r = run_query(&idx, &e, b"ananas", true).unwrap();
        assert_eq!(r.length, 5);
        assert_eq!(r.p_start, Some(1));
        let j = r.to_json();
        assert_eq!(j["length"], 5);
        assert_eq!(j["engine"], "skyline");
        assert_eq!(j["splits"].as_array().unwrap().len(), 7);
        assert!(r.to_text().contains("length: 5"));
    }

    #[test]
    fn no_match_has_no_positions() {
        let idx = LzIndex::build(b"banana".to_vec()).unwrap();
        let e = Engine::build(idx.pair(), EngineChoice::Baseline);
        let r = run_query(&idx, &e, b"q", false).unwrap();
        assert_eq!((r.length, r.p_start, r.s_start), (0, None, None));
        assert!(r.to_json()["p_start"].is_null());
        assert!(r.to_json().get("splits").is_none());
    }
}
