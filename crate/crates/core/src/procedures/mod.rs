//! Basic flow procedures used as building blocks by the heuristics, together
//! with the graph algorithms behind them.

mod ops;
mod residual;
mod search;

pub(crate) use ops::extract_paths;
pub use ops::{
    augment, augment_limited, cancel_to_optimality, center, compose, cost_reduce, cost_reduce_with, decompose,
    find_flow, harmonize, max_flow_value, min_cost_flow, perturb, round_flow, sum_flows, ArcValues, CostReduction,
    CycleSearch, ProcedureError,
};
pub use residual::{Cycle, Direction, ResidualArc, ResidualNetwork};
pub use search::{bfs_path, negative_cycle, negative_cycle_floyd_warshall, random_cycle, shortest_path};
