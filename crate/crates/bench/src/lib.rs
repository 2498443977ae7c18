//! Inputs shared by the benchmarks.

use refent::states::random_bipartite;
use refent::BipartiteState;

/// Full-rank random state used across the benchmark groups.
pub fn workload(seed: u64, d_a: usize, d_b: usize) -> BipartiteState {
    random_bipartite(seed, d_a, d_b, d_a * d_b).expect("valid dimensions")
}

pub const DIMS: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 3)];
