use std::ops::AddAssign;

/// Exact event counts gathered while answering a query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    /// Range-emptiness questions asked of the grid.
    pub emptiness_probes: u64,
    /// Counting queries on the grid.
    pub count_queries: u64,
    /// Reporting queries on the grid.
    pub report_queries: u64,
    /// Points returned by reporting queries.
    pub reported_points: u64,
    /// Rank operations inside the grid structure.
    pub rank_probes: u64,
    /// Path pairs examined by the heavy-path walk.
    pub path_pair_visits: u64,
    /// Extended-list blocks rebuilt by range reporting.
    pub blocks_recovered: u64,
}

impl AddAssign for Counters {
    fn add_assign(&mut self, o: Counters) {
        self.emptiness_probes += o.emptiness_probes;
        self.count_queries += o.count_queries;
        self.report_queries += o.report_queries;
        self.reported_points += o.reported_points;
        self.rank_probes += o.rank_probes;
        self.path_pair_visits += o.path_pair_visits;
        self.blocks_recovered += o.blocks_recovered;
    }
}
