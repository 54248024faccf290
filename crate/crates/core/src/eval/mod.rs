//! Downstream models, metrics, and the k-sweep pipeline.

mod forest;
mod metrics;
mod ranker;
mod sweep;

pub use forest::{train_forest, RandomForest, DEFAULT_TREES};
pub use metrics::{accuracy, ndcg_at_10, query_ndcg_at_10};
pub use ranker::{normal_equations, train_pointwise_ranker, LinearRanker, RIDGE};
pub use sweep::{run_sweep, EvalReport, Method, MetricName, SelectionResult, SweepConfig, Task, Timings, TraceRow};

/// Number of `k` values explored at most.
pub const MAX_GRID: usize = 50;

/// Target sizes to try: every `k` in `1..=F` below 50 features, otherwise 50
/// evenly spaced values starting at 1 and staying below `F`.
///
/// At exactly 50 features only 49 integers lie in `[1, F)`, so the grid is
/// `1..=49`.
pub fn k_grid(n_features: usize) -> Vec<usize> {
    if n_features < MAX_GRID {
        return (1..=n_features).collect();
    }
    // k_i = 1 + floor(i (F - 2) / 49) spans [1, F - 1]; distinct once F > 50
    let span = n_features - 2;
    let mut grid: Vec<usize> = (0..MAX_GRID)
        .map(|i| 1 + i * span / (MAX_GRID - 1))
        .collect();
    grid.dedup();
    grid
}
