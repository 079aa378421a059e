//! Ground-truth optima for small instances by exhaustive enumeration, and
//! export of the linearized robust models in LP format.

mod enumerate;
mod lp;

use thiserror::Error;

pub use enumerate::{
    enumerate, enumerate_optimum, enumerate_scenario_optima, EnumObjective, Enumeration, DEFAULT_NODE_BUDGET,
};
pub use lp::{export_lp, LinearizedModel, Row, Sense};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("node budget exceeded after {explored} nodes")]
    BudgetExceeded { explored: u64 },
    #[error("no feasible flow of the requested value")]
    Infeasible,
    #[error("deviation model needs one optimum per scenario, got {got} for {expected}")]
    MissingOptima { expected: usize, got: usize },
}
