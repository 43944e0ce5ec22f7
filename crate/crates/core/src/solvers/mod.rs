//! Tour construction: nearest-neighbor and greedy heuristics with selection
//! traces, exact solvers for small `n`, and a 2-opt baseline.

mod exact;
mod greedy;
mod nearest_neighbor;
mod tour;
mod two_opt;

pub use exact::{brute_force_tour, exact_tour_dp, BRUTE_FORCE_MAX_N, EXACT_DP_MAX_N};
pub use greedy::{greedy_tour, GreedyTieRule};
pub use nearest_neighbor::{nearest_neighbor_all_starts, nearest_neighbor_tour, NnTieRule};
pub use tour::{
    tour_length, SelectionTrace, SolverTag, Tour, TourRecord, TraceStep, LENGTH_RTOL,
};
pub use two_opt::two_opt_improve;
