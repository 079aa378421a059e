//! Robust objective functions.

use std::cell::Cell;

use crate::model::{dot, FlowError, Instance, IntegerFlow, Variant};
use crate::procedures::{min_cost_flow, ProcedureError};

/// Per-scenario minimum costs `z[s]` for value `F`, with one optimal flow per
/// scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioOptima {
    costs: Vec<i64>,
    flows: Vec<IntegerFlow>,
}

impl ScenarioOptima {
    pub fn costs(&self) -> &[i64] {
        &self.costs
    }

    /// A minimum-cost flow for scenario `s`.
    pub fn flow(&self, s: usize) -> &IntegerFlow {
        &self.flows[s]
    }

    pub fn flows(&self) -> &[IntegerFlow] {
        &self.flows
    }

    /// Builds optima from externally known costs; `flows` must be optimal.
    pub fn from_parts(costs: Vec<i64>, flows: Vec<IntegerFlow>) -> Self {
        assert_eq!(costs.len(), flows.len());
        Self { costs, flows }
    }
}

/// One `min_cost_flow` call per scenario.
pub fn compute_optima(instance: &Instance) -> Result<ScenarioOptima, ProcedureError> {
    let net = instance.network();
    let flows = instance
        .scenarios()
        .iter()
        .map(|costs| min_cost_flow(net, costs, instance.flow_value()))
        .collect::<Result<Vec<_>, _>>()?;
    let costs = flows.iter().zip(instance.scenarios().iter()).map(|(f, c)| dot(c, f.values())).collect();
    Ok(ScenarioOptima { costs, flows })
}

/// Worst scenario cost of a feasible flow of value `F`.
pub fn eval_absolute(instance: &Instance, flow: &IntegerFlow) -> Result<i64, FlowError> {
    instance.check_feasible(flow)?;
    Ok(absolute_unchecked(instance, flow))
}

/// Worst excess over the scenario optima of a feasible flow of value `F`.
pub fn eval_deviation(instance: &Instance, flow: &IntegerFlow, optima: &ScenarioOptima) -> Result<i64, FlowError> {
    instance.check_feasible(flow)?;
    Ok(deviation_unchecked(instance, flow, optima.costs()))
}

fn absolute_unchecked(instance: &Instance, flow: &IntegerFlow) -> i64 {
    instance.scenarios().iter().map(|c| dot(c, flow.values())).max().expect("at least one scenario")
}

fn deviation_unchecked(instance: &Instance, flow: &IntegerFlow, z: &[i64]) -> i64 {
    instance.scenarios().iter().zip(z).map(|(c, zs)| dot(c, flow.values()) - zs).max().expect("at least one scenario")
}

/// Criterion of robust optimality. Deviation always carries its optima.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RobustCriterion {
    Absolute,
    Deviation(ScenarioOptima),
}

impl RobustCriterion {
    pub fn new(variant: Variant, optima: &ScenarioOptima) -> Self {
        match variant {
            Variant::Absolute => RobustCriterion::Absolute,
            Variant::Deviation => RobustCriterion::Deviation(optima.clone()),
        }
    }

    pub fn variant(&self) -> Variant {
        match self {
            RobustCriterion::Absolute => Variant::Absolute,
            RobustCriterion::Deviation(_) => Variant::Deviation,
        }
    }

    pub fn evaluate(&self, instance: &Instance, flow: &IntegerFlow) -> Result<i64, FlowError> {
        match self {
            RobustCriterion::Absolute => eval_absolute(instance, flow),
            RobustCriterion::Deviation(optima) => eval_deviation(instance, flow, optima),
        }
    }
}

/// Evaluates flows for one solver run and counts the evaluations.
#[derive(Debug)]
pub struct Evaluator<'a> {
    instance: &'a Instance,
    criterion: &'a RobustCriterion,
    count: Cell<u64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(instance: &'a Instance, criterion: &'a RobustCriterion) -> Self {
        Self { instance, criterion, count: Cell::new(0) }
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn criterion(&self) -> &'a RobustCriterion {
        self.criterion
    }

    /// Robust cost of a flow produced by the solvers themselves. Feasibility
    /// is asserted in debug builds only.
    pub fn evaluate(&self, flow: &IntegerFlow) -> i64 {
        debug_assert_eq!(self.instance.check_feasible(flow), Ok(()), "infeasible flow {flow}");
        self.count.set(self.count.get() + 1);
        match self.criterion {
            RobustCriterion::Absolute => absolute_unchecked(self.instance, flow),
            RobustCriterion::Deviation(optima) => deviation_unchecked(self.instance, flow, optima.costs()),
        }
    }

    pub fn evaluations(&self) -> u64 {
        self.count.get()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::ScenarioSet;

    #[test]
    fn diamond_optima() {
        let inst = diamond();
        let optima = compute_optima(&inst).unwrap();
        assert_eq!(optima.costs(), &[2, 2]);
        assert_eq!(optima.flow(0), &flow(&[1, 0, 1, 0]));
        assert_eq!(optima.flow(1), &flow(&[0, 1, 0, 1]));
    }

    #[test]
    fn diamond_absolute() {
        let inst = diamond();
        assert_eq!(eval_absolute(&inst, &flow(&[1, 0, 1, 0])), Ok(4));
        assert_eq!(eval_absolute(&inst, &flow(&[0, 1, 0, 1])), Ok(4));
        assert!(eval_absolute(&inst, &flow(&[1, 0, 0, 1])).is_err());
        assert!(eval_absolute(&inst, &IntegerFlow::zero(4)).is_err());
    }

    #[test]
    fn diamond_deviation() {
        let inst = diamond();
        let optima = compute_optima(&inst).unwrap();
        assert_eq!(eval_deviation(&inst, &flow(&[1, 0, 1, 0]), &optima), Ok(2));
        assert_eq!(eval_deviation(&inst, &flow(&[0, 1, 0, 1]), &optima), Ok(2));
    }

    #[test]
    fn single_scenario_collapses() {
        let d = diamond();
        let one = Instance::new(d.network().clone(), ScenarioSet::new(vec![vec![1, 2, 1, 2]], 4).unwrap(), 1).unwrap();
        let optima = compute_optima(&one).unwrap();
        let f = flow(&[0, 1, 0, 1]);
        assert_eq!(eval_absolute(&one, &f), one.flow_cost(&f, 0));
        assert_eq!(eval_deviation(&one, optima.flow(0), &optima), Ok(0));
    }

    #[test]
    fn identical_scenarios_share_optimum() {
        let d = diamond();
        let costs = vec![vec![3, 1, 4, 1]; 3];
        let inst = Instance::new(d.network().clone(), ScenarioSet::new(costs, 4).unwrap(), 2).unwrap();
        let optima = compute_optima(&inst).unwrap();
        assert!(optima.costs().iter().all(|&z| z == 9));
    }

    #[test]
    fn chain_optima() {
        let inst = chain(4, 2, vec![vec![3, 3, 3], vec![1, 2, 3]], 2);
        let optima = compute_optima(&inst).unwrap();
        assert_eq!(optima.costs(), &[18, 12]);
    }

    #[test]
    fn evaluator_counts() {
        let inst = diamond();
        let optima = compute_optima(&inst).unwrap();
        let crit = RobustCriterion::new(Variant::Deviation, &optima);
        let ev = Evaluator::new(&inst, &crit);
        assert_eq!(ev.evaluate(&flow(&[1, 0, 1, 0])), 2);
        assert_eq!(ev.evaluate(&flow(&[0, 1, 0, 1])), 2);
        assert_eq!(ev.evaluations(), 2);
    }
}
