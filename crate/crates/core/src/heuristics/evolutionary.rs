use rand::Rng;

use super::local_search::descend;
use super::population::{insert_child, tournament_select, Member, Population, TournamentMode};
use super::{HeuristicError, Problem, RunStats, SearchParams, SolverRng};
use crate::model::{IntegerFlow, SolverTag};
use crate::objectives::Evaluator;
use crate::procedures::{center, compose, cost_reduce, extract_paths, harmonize, perturb, round_flow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossover {
    /// Mean of both parents, rounded back to an integral flow.
    CenterRound,
    /// First parent harmonized toward the second.
    Harmonize,
    /// Both parents split into unit flows and recombined.
    DecomposeCompose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    Perturb,
    /// Cost reduction under a uniformly drawn scenario.
    CostReduce,
    /// A full local search started from the member.
    LocalSearch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EcVariant {
    pub crossover: Crossover,
    pub mutation: Mutation,
}

impl EcVariant {
    pub fn from_tag(tag: SolverTag) -> Option<Self> {
        use Crossover::*;
        use Mutation::*;
        let (crossover, mutation) = match tag {
            SolverTag::Ec1 => (CenterRound, Perturb),
            SolverTag::Ec2 => (CenterRound, CostReduce),
            SolverTag::Ec3 => (CenterRound, LocalSearch),
            SolverTag::Ec4 => (Harmonize, Perturb),
            SolverTag::Ec5 => (Harmonize, CostReduce),
            SolverTag::Ec6 => (Harmonize, LocalSearch),
            SolverTag::Ec7 => (DecomposeCompose, Perturb),
            SolverTag::Ec8 => (DecomposeCompose, CostReduce),
            SolverTag::Ec9 => (DecomposeCompose, LocalSearch),
            _ => return None,
        };
        Some(Self { crossover, mutation })
    }
}

struct Operators<'a, 'e> {
    problem: &'a Problem,
    evaluator: &'a Evaluator<'e>,
    variant: EcVariant,
    params: &'a SearchParams,
}

impl Operators<'_, '_> {
    fn crossover(
        &self,
        first: &IntegerFlow,
        second: &IntegerFlow,
        rng: &mut SolverRng,
    ) -> Result<IntegerFlow, HeuristicError> {
        let instance = self.problem.instance();
        let net = instance.network();
        let child = match self.variant.crossover {
            Crossover::CenterRound => {
                let mean = center(net, &[first.clone(), second.clone()])?;
                round_flow(net, &mean)?
            }
            Crossover::Harmonize => harmonize(net, first, second, rng)?,
            Crossover::DecomposeCompose => {
                let f = instance.flow_value();
                if f == 0 {
                    return Ok(first.clone());
                }
                let a = extract_paths(net, &mut first.values().to_vec(), f);
                let b = extract_paths(net, &mut second.values().to_vec(), f);
                compose(net, &a, &b, rng)?
            }
        };
        Ok(child)
    }

    /// Mutates `member`. For local-search mutation, `harvest` receives every
    /// intermediate current flow of the descent.
    fn mutate(&self, member: &Member, rng: &mut SolverRng, mut harvest: impl FnMut(Member)) -> Member {
        let instance = self.problem.instance();
        let net = instance.network();
        match self.variant.mutation {
            Mutation::Perturb => {
                let flow = perturb(net, &member.flow, rng);
                let cost = self.evaluator.evaluate(&flow);
                Member { flow, cost }
            }
            Mutation::CostReduce => {
                let s = rng.gen_range(0..instance.scenario_count());
                let flow = cost_reduce(net, &member.flow, instance.scenarios().costs(s)).flow;
                let cost = self.evaluator.evaluate(&flow);
                Member { flow, cost }
            }
            Mutation::LocalSearch => {
                let limit = self
                    .params
                    .iteration_limit
                    .map_or(self.params.mutation_iteration_limit, |l| l.min(self.params.mutation_iteration_limit));
                let (flow, cost, _) = descend(
                    self.problem,
                    self.evaluator,
                    member.flow.clone(),
                    member.cost,
                    self.params.neighborhood_size,
                    Some(limit),
                    |f, c| harvest(Member { flow: f.clone(), cost: c }),
                );
                Member { flow, cost }
            }
        }
    }

    fn initial_population(&self, rng: &mut SolverRng) -> Population {
        let size = self.params.population_size;
        let mut seeds: Vec<(usize, Member)> = self
            .problem
            .optima()
            .flows()
            .iter()
            .map(|f| Member { flow: f.clone(), cost: self.evaluator.evaluate(f) })
            .enumerate()
            .collect();
        if seeds.len() > size {
            seeds.sort_by_key(|(s, m)| (m.cost, *s));
            seeds.truncate(size);
            seeds.sort_by_key(|(s, _)| *s);
        }
        let mut population = Population::new(seeds.into_iter().map(|(_, m)| m).collect());
        while population.len() < size {
            let parent = population.members()[rng.gen_range(0..population.len())].clone();
            let mut harvested = Vec::new();
            let mutant = self.mutate(&parent, rng, |m| harvested.push(m));
            // the last harvested flow is the mutant itself
            harvested.pop();
            for m in harvested.into_iter().chain([mutant]) {
                if population.len() < size {
                    population.push(m);
                }
            }
        }
        population
    }
}

pub fn evolutionary(
    problem: &Problem,
    evaluator: &Evaluator<'_>,
    variant: EcVariant,
    params: &SearchParams,
    rng: &mut SolverRng,
) -> Result<(IntegerFlow, i64, RunStats), HeuristicError> {
    let ops = Operators { problem, evaluator, variant, params };
    let mut population = ops.initial_population(rng);
    let mut best_cost = population.best().cost;
    let mut trace = vec![best_cost];
    let mut generations = 0u64;
    let mut stagnant = 0u64;
    while params.generation_limit.is_none_or(|limit| generations < limit) && stagnant < params.no_improvement_limit {
        let first = tournament_select(&population, TournamentMode::Best, params.tournament_size, None, rng)
            .expect("population is not empty");
        let second = tournament_select(&population, TournamentMode::Best, params.tournament_size, Some(first), rng)
            .unwrap_or(first);
        let flow = ops.crossover(&population.members()[first].flow, &population.members()[second].flow, rng)?;
        let cost = evaluator.evaluate(&flow);
        insert_child(&mut population, Member { flow, cost }, params.similarity_threshold, params.tournament_size, rng);

        let draw: u32 = rng.gen_range(1..=100);
        if draw <= params.mutation_threshold && population.len() > 1 {
            let best = population.best_index();
            let mut target = rng.gen_range(0..population.len() - 1);
            if target >= best {
                target += 1;
            }
            let mutant = ops.mutate(&population.members()[target], rng, |_| {});
            population.replace(target, mutant);
        }

        generations += 1;
        let now = population.best().cost;
        if now < best_cost {
            best_cost = now;
            stagnant = 0;
        } else {
            stagnant += 1;
        }
        trace.push(now);
    }
    let best = population.best().clone();
    let stats = RunStats { evaluations: 0, iterations: generations, traces: vec![trace] };
    Ok((best.flow, best.cost, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristics::{solve, Problem};
    use crate::model::fixtures::*;
    use crate::model::{Instance, ScenarioSet, Variant};

    const EC: [SolverTag; 9] = [
        SolverTag::Ec1,
        SolverTag::Ec2,
        SolverTag::Ec3,
        SolverTag::Ec4,
        SolverTag::Ec5,
        SolverTag::Ec6,
        SolverTag::Ec7,
        SolverTag::Ec8,
        SolverTag::Ec9,
    ];

    fn quick() -> SearchParams {
        SearchParams { no_improvement_limit: 40, population_size: 8, ..SearchParams::default() }
    }

    #[test]
    fn diamond_reaches_both_optima() {
        let p = Problem::new(diamond()).unwrap();
        for tag in EC {
            for seed in 0..3 {
                let abs = solve(&p, Variant::Absolute, tag, &quick(), seed).unwrap();
                assert_eq!(abs.record.robust_cost, 4, "{tag} seed {seed}");
                let dev = solve(&p, Variant::Deviation, tag, &quick(), seed).unwrap();
                assert_eq!(dev.record.robust_cost, 2, "{tag} seed {seed}");
            }
        }
    }

    #[test]
    fn single_scenario_optimum_from_initialization() {
        let d = diamond();
        let inst = Instance::new(d.network().clone(), ScenarioSet::new(vec![vec![4, 1, 1, 4]], 4).unwrap(), 1).unwrap();
        let p = Problem::new(inst).unwrap();
        for tag in EC {
            let out = solve(&p, Variant::Deviation, tag, &quick(), 11).unwrap();
            assert_eq!(out.record.robust_cost, 0);
            assert_eq!(out.stats.traces[0][0], 0);
        }
    }

    #[test]
    fn generation_limit_stops_the_loop() {
        let p = Problem::new(diamond()).unwrap();
        let params = SearchParams { generation_limit: Some(5), ..quick() };
        let out = solve(&p, Variant::Absolute, SolverTag::Ec1, &params, 0).unwrap();
        assert_eq!(out.stats.iterations, 5);
        assert_eq!(out.stats.traces[0].len(), 6);
    }

    #[test]
    fn more_scenarios_than_members() {
        let d = diamond();
        let costs = vec![vec![1, 2, 1, 2], vec![2, 1, 2, 1], vec![1, 1, 1, 1], vec![3, 1, 3, 1]];
        let inst = Instance::new(d.network().clone(), ScenarioSet::new(costs, 4).unwrap(), 1).unwrap();
        let p = Problem::new(inst).unwrap();
        let params = SearchParams { population_size: 2, ..quick() };
        let out = solve(&p, Variant::Absolute, SolverTag::Ec8, &params, 3).unwrap();
        assert_eq!(out.record.robust_cost, 4);
    }
}
