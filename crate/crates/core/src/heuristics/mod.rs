//! Local search (variants LS-1..LS-4) and evolutionary computing (variants
//! EC-1..EC-9) for both robust criteria.

mod evolutionary;
mod local_search;
mod population;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::model::{Instance, SolutionRecord, SolverTag, Variant};
use crate::objectives::{compute_optima, Evaluator, RobustCriterion, ScenarioOptima};
use crate::procedures::ProcedureError;

pub use evolutionary::{evolutionary, Crossover, EcVariant, Mutation};
pub use local_search::{local_search, LsVariant};
pub use population::{insert_child, tournament_select, Insertion, Member, Population, TournamentMode};

/// Seeded generator used by every solver run.
pub type SolverRng = ChaCha8Rng;

pub fn solver_rng(seed: u64) -> SolverRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeuristicError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("`{0}` is not a heuristic")]
    NotAHeuristic(SolverTag),
    #[error(transparent)]
    Procedure(#[from] ProcedureError),
}

/// Parameters of both search frameworks. `None` limits are unbounded.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchParams {
    pub neighborhood_size: usize,
    pub iteration_limit: Option<u64>,
    pub population_size: usize,
    pub generation_limit: Option<u64>,
    pub no_improvement_limit: u64,
    /// Percent of the population's best robust cost.
    pub similarity_threshold: u32,
    /// Percent chance of a mutation per generation.
    pub mutation_threshold: u32,
    pub tournament_size: usize,
    /// Iteration cap of the local search used as a mutation operator.
    pub mutation_iteration_limit: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            neighborhood_size: 30,
            iteration_limit: None,
            population_size: 30,
            generation_limit: None,
            no_improvement_limit: 300,
            similarity_threshold: 5,
            mutation_threshold: 1,
            tournament_size: 3,
            mutation_iteration_limit: 50,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<(), HeuristicError> {
        let positive = [
            ("neighborhood_size", self.neighborhood_size as u64),
            ("population_size", self.population_size as u64),
            ("no_improvement_limit", self.no_improvement_limit),
            ("tournament_size", self.tournament_size as u64),
            ("mutation_iteration_limit", self.mutation_iteration_limit),
            ("iteration_limit", self.iteration_limit.unwrap_or(1)),
            ("generation_limit", self.generation_limit.unwrap_or(1)),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(HeuristicError::InvalidParams(format!("{name} must be positive")));
        }
        for (name, v) in
            [("similarity_threshold", self.similarity_threshold), ("mutation_threshold", self.mutation_threshold)]
        {
            if v > 100 {
                return Err(HeuristicError::InvalidParams(format!("{name} must be within 0..=100")));
            }
        }
        Ok(())
    }

    /// Sets one parameter by name; `inf`/`unbounded` clears a limit.
    pub fn set(&mut self, name: &str, value: &str) -> Result<(), HeuristicError> {
        let bad = || HeuristicError::InvalidParams(format!("bad value `{value}` for {name}"));
        let limit = |v: &str| -> Result<Option<u64>, HeuristicError> {
            match v {
                "inf" | "unbounded" | "none" => Ok(None),
                _ => v.parse().map(Some).map_err(|_| bad()),
            }
        };
        match name {
            "neighborhood_size" => self.neighborhood_size = value.parse().map_err(|_| bad())?,
            "iteration_limit" => self.iteration_limit = limit(value)?,
            "population_size" => self.population_size = value.parse().map_err(|_| bad())?,
            "generation_limit" => self.generation_limit = limit(value)?,
            "no_improvement_limit" => self.no_improvement_limit = value.parse().map_err(|_| bad())?,
            "similarity_threshold" => self.similarity_threshold = value.parse().map_err(|_| bad())?,
            "mutation_threshold" => self.mutation_threshold = value.parse().map_err(|_| bad())?,
            "tournament_size" => self.tournament_size = value.parse().map_err(|_| bad())?,
            "mutation_iteration_limit" => self.mutation_iteration_limit = value.parse().map_err(|_| bad())?,
            _ => return Err(HeuristicError::InvalidParams(format!("unknown parameter `{name}`"))),
        }
        Ok(())
    }
}

/// An instance with its per-scenario optima computed in advance.
#[derive(Debug, Clone)]
pub struct Problem {
    instance: Instance,
    optima: ScenarioOptima,
}

impl Problem {
    pub fn new(instance: Instance) -> Result<Self, ProcedureError> {
        let optima = compute_optima(&instance)?;
        Ok(Self { instance, optima })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn optima(&self) -> &ScenarioOptima {
        &self.optima
    }

    pub fn criterion(&self, variant: Variant) -> RobustCriterion {
        RobustCriterion::new(variant, &self.optima)
    }
}

/// Counters and cost traces of one run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    pub evaluations: u64,
    /// Accepted moves (local search) or generations (evolution).
    pub iterations: u64,
    /// Local search: the current cost after every accepted move, one trace
    /// per descent. Evolution: the best population cost after
    /// initialization and after every generation.
    pub traces: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub record: SolutionRecord,
    pub stats: RunStats,
}

/// Runs one heuristic with a fresh generator seeded by `seed`. The elapsed
/// time covers the heuristic only, not the precomputed optima.
pub fn solve(
    problem: &Problem,
    variant: Variant,
    solver: SolverTag,
    params: &SearchParams,
    seed: u64,
) -> Result<SolveOutcome, HeuristicError> {
    params.validate()?;
    let criterion = problem.criterion(variant);
    let evaluator = Evaluator::new(problem.instance(), &criterion);
    let mut rng = solver_rng(seed);
    let started = Instant::now();
    let (flow, robust_cost, mut stats) = if let Some(ls) = LsVariant::from_tag(solver) {
        local_search(problem, &evaluator, ls, params, &mut rng)?
    } else if let Some(ec) = EcVariant::from_tag(solver) {
        evolutionary(problem, &evaluator, ec, params, &mut rng)?
    } else {
        return Err(HeuristicError::NotAHeuristic(solver));
    };
    let elapsed_seconds = started.elapsed().as_secs_f64();
    stats.evaluations = evaluator.evaluations();
    Ok(SolveOutcome { record: SolutionRecord { variant, solver, robust_cost, flow, elapsed_seconds, seed }, stats })
}
