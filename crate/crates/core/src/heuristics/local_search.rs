use super::{HeuristicError, Problem, RunStats, SearchParams, SolverRng};
use crate::model::{IntegerFlow, SolverTag};
use crate::objectives::Evaluator;
use crate::procedures::{center, cost_reduce, find_flow, round_flow};

/// Local-search variants; they differ only in the initial flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsVariant {
    /// Arbitrary flow of value `F`.
    Arbitrary,
    /// Best-evaluated scenario-optimal flow.
    BestScenarioOptimum,
    /// Rounded mean of the scenario-optimal flows.
    RoundedCenter,
    /// One descent per scenario-optimal flow, best result kept.
    EveryScenarioOptimum,
}

impl LsVariant {
    pub fn from_tag(tag: SolverTag) -> Option<Self> {
        match tag {
            SolverTag::Ls1 => Some(LsVariant::Arbitrary),
            SolverTag::Ls2 => Some(LsVariant::BestScenarioOptimum),
            SolverTag::Ls3 => Some(LsVariant::RoundedCenter),
            SolverTag::Ls4 => Some(LsVariant::EveryScenarioOptimum),
            _ => None,
        }
    }
}

/// Iterated cost reduction, one step per scenario per round, every
/// intermediate flow recorded, until `size` flows are collected or every
/// scenario chain is cost-optimal.
pub(crate) fn neighborhood(problem: &Problem, current: &IntegerFlow, size: usize) -> Vec<IntegerFlow> {
    let instance = problem.instance();
    let net = instance.network();
    let k = instance.scenario_count();
    let mut chains = vec![current.clone(); k];
    let mut done = vec![false; k];
    let mut out = Vec::with_capacity(size);
    while out.len() < size && done.iter().any(|d| !d) {
        for s in 0..k {
            if out.len() == size {
                break;
            }
            if done[s] {
                continue;
            }
            let step = cost_reduce(net, &chains[s], instance.scenarios().costs(s));
            if step.optimal {
                done[s] = true;
            } else {
                out.push(step.flow.clone());
                chains[s] = step.flow;
            }
        }
    }
    out
}

/// Steepest descent: move to the best neighbor while it is strictly better.
/// `visit` sees every accepted flow. Returns the final flow, its cost and the
/// trace of current costs.
pub(crate) fn descend(
    problem: &Problem,
    evaluator: &Evaluator<'_>,
    start: IntegerFlow,
    start_cost: i64,
    neighborhood_size: usize,
    iteration_limit: Option<u64>,
    mut visit: impl FnMut(&IntegerFlow, i64),
) -> (IntegerFlow, i64, Vec<i64>) {
    let mut current = start;
    let mut cost = start_cost;
    let mut trace = vec![cost];
    let mut iterations = 0u64;
    while iteration_limit.is_none_or(|limit| iterations < limit) {
        let candidates = neighborhood(problem, &current, neighborhood_size);
        let best = candidates
            .into_iter()
            .map(|f| {
                let c = evaluator.evaluate(&f);
                (f, c)
            })
            .reduce(|best, next| if next.1 < best.1 { next } else { best });
        match best {
            Some((flow, c)) if c < cost => {
                current = flow;
                cost = c;
                trace.push(cost);
                visit(&current, cost);
            }
            _ => break,
        }
        iterations += 1;
    }
    (current, cost, trace)
}

pub fn local_search(
    problem: &Problem,
    evaluator: &Evaluator<'_>,
    variant: LsVariant,
    params: &SearchParams,
    _rng: &mut SolverRng,
) -> Result<(IntegerFlow, i64, RunStats), HeuristicError> {
    let instance = problem.instance();
    let net = instance.network();
    let optima = problem.optima();
    let mut stats = RunStats::default();
    let run = |start: IntegerFlow, stats: &mut RunStats| {
        let cost = evaluator.evaluate(&start);
        let (flow, cost, trace) =
            descend(problem, evaluator, start, cost, params.neighborhood_size, params.iteration_limit, |_, _| {});
        stats.iterations += trace.len() as u64 - 1;
        stats.traces.push(trace);
        (flow, cost)
    };
    let (flow, cost) = match variant {
        LsVariant::Arbitrary => run(find_flow(net, instance.flow_value())?, &mut stats),
        LsVariant::BestScenarioOptimum => {
            let start = optima
                .flows()
                .iter()
                .map(|f| (f, evaluator.evaluate(f)))
                .reduce(|best, next| if next.1 < best.1 { next } else { best })
                .map(|(f, _)| f.clone())
                .expect("at least one scenario");
            run(start, &mut stats)
        }
        LsVariant::RoundedCenter => {
            let centered = center(net, optima.flows())?;
            run(round_flow(net, &centered)?, &mut stats)
        }
        LsVariant::EveryScenarioOptimum => optima
            .flows()
            .iter()
            .map(|f| run(f.clone(), &mut stats))
            .reduce(|best, next| if next.1 < best.1 { next } else { best })
            .expect("at least one scenario"),
    };
    Ok((flow, cost, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristics::{solve, Problem};
    use crate::model::fixtures::*;
    use crate::model::Variant;

    const LS: [SolverTag; 4] = [SolverTag::Ls1, SolverTag::Ls2, SolverTag::Ls3, SolverTag::Ls4];

    #[test]
    fn diamond_ls2_absolute() {
        let p = Problem::new(diamond()).unwrap();
        let out = solve(&p, Variant::Absolute, SolverTag::Ls2, &SearchParams::default(), 0).unwrap();
        assert_eq!(out.record.robust_cost, 4);
        assert_eq!(out.stats.iterations, 0);
    }

    #[test]
    fn single_scenario_reaches_conventional_optimum() {
        // diamond with scenario 1 only: the optimum costs 2
        let d = diamond_with_flow(2);
        let inst = crate::model::Instance::new(
            d.network().clone(),
            crate::model::ScenarioSet::new(vec![vec![5, 1, 1, 5]], 4).unwrap(),
            1,
        )
        .unwrap();
        let p = Problem::new(inst).unwrap();
        for tag in LS {
            let abs = solve(&p, Variant::Absolute, tag, &SearchParams::default(), 1).unwrap();
            assert_eq!(abs.record.robust_cost, p.optima().costs()[0], "{tag}");
            let dev = solve(&p, Variant::Deviation, tag, &SearchParams::default(), 1).unwrap();
            assert_eq!(dev.record.robust_cost, 0, "{tag}");
        }
    }

    #[test]
    fn unique_feasible_flow() {
        let p = Problem::new(chain(4, 2, vec![vec![1, 2, 3], vec![3, 2, 1]], 2)).unwrap();
        for tag in LS {
            let out = solve(&p, Variant::Absolute, tag, &SearchParams::default(), 0).unwrap();
            assert_eq!(out.record.flow, flow(&[2, 2, 2]));
            assert_eq!(out.stats.iterations, 0);
        }
    }

    #[test]
    fn neighborhood_is_round_robin_and_bounded() {
        let p = Problem::new(diamond()).unwrap();
        // from (0,1,0,1) only scenario 1 can reduce cost, once
        let n = neighborhood(&p, &flow(&[0, 1, 0, 1]), 30);
        assert_eq!(n, vec![flow(&[1, 0, 1, 0])]);
        let n = neighborhood(&p, &flow(&[0, 1, 0, 1]), 0);
        assert!(n.is_empty());
    }
}
