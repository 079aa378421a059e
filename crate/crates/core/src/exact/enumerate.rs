use crate::model::{Instance, IntegerFlow, Variant};

use super::ExactError;

/// Default cap on explored search nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

/// Objective minimized by [`enumerate`].
#[derive(Debug, Clone, Copy)]
pub enum EnumObjective<'a> {
    /// Cost under a single scenario.
    Scenario(usize),
    Absolute,
    /// Worst excess over the given per-scenario optima.
    Deviation(&'a [i64]),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub cost: i64,
    pub flow: IntegerFlow,
    pub nodes: u64,
}

struct Search<'a> {
    instance: &'a Instance,
    objective: EnumObjective<'a>,
    order: Vec<usize>,
    values: Vec<i64>,
    net: Vec<i64>,
    rem_out: Vec<i64>,
    rem_in: Vec<i64>,
    partial: Vec<i64>,
    best: Option<(i64, Vec<i64>)>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn bound(&self) -> i64 {
        match self.objective {
            EnumObjective::Scenario(s) => self.partial[s],
            EnumObjective::Absolute => *self.partial.iter().max().expect("at least one scenario"),
            EnumObjective::Deviation(z) => {
                self.partial.iter().zip(z).map(|(p, z)| p - z).max().expect("at least one scenario")
            }
        }
    }

    /// Whether `v` can still meet its balance with the unassigned arcs.
    fn balanced(&self, v: usize) -> bool {
        let need = self.instance.network().supply(v, self.instance.flow_value()) - self.net[v];
        -self.rem_in[v] <= need && need <= self.rem_out[v]
    }

    fn run(&mut self, position: usize) -> Result<(), ExactError> {
        if position == self.order.len() {
            let cost = self.bound();
            if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                self.best = Some((cost, self.values.clone()));
            }
            return Ok(());
        }
        let a = self.order[position];
        let arc = self.instance.network().arc(a);
        self.rem_out[arc.tail] -= arc.capacity;
        self.rem_in[arc.head] -= arc.capacity;
        for x in 0..=arc.capacity {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(ExactError::BudgetExceeded { explored: self.nodes });
            }
            self.values[a] = x;
            self.net[arc.tail] += x;
            self.net[arc.head] -= x;
            for (p, c) in self.partial.iter_mut().zip(self.instance.scenarios().iter()) {
                *p += c[a] * x;
            }
            let tail_ok = self.balanced(arc.tail);
            let head_ok = self.balanced(arc.head);
            let promising = self.best.as_ref().is_none_or(|(b, _)| self.bound() < *b);
            let result = if tail_ok && head_ok && promising { self.run(position + 1) } else { Ok(()) };
            self.net[arc.tail] -= x;
            self.net[arc.head] += x;
            for (p, c) in self.partial.iter_mut().zip(self.instance.scenarios().iter()) {
                *p -= c[a] * x;
            }
            result?;
            // more flow only pushes the tail further past its balance
            let need = self.instance.network().supply(arc.tail, self.instance.flow_value()) - self.net[arc.tail] - x;
            if need < -self.rem_in[arc.tail] || !promising {
                break;
            }
        }
        self.values[a] = 0;
        self.rem_out[arc.tail] += arc.capacity;
        self.rem_in[arc.head] += arc.capacity;
        Ok(())
    }
}

/// Arcs grouped by tail, tails in topological order (lowest index first),
/// so each vertex's balance is settled as early as possible.
fn arc_order(instance: &Instance) -> Vec<usize> {
    let net = instance.network();
    let n = net.vertex_count();
    let mut indegree: Vec<usize> = (0..n).map(|v| net.in_arcs(v).len()).collect();
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut placed = vec![false; n];
    let mut vertices = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        placed[v] = true;
        vertices.push(v);
        for &a in net.out_arcs(v) {
            let h = net.arc(a).head;
            indegree[h] -= 1;
            if indegree[h] == 0 {
                ready.insert(h);
            }
        }
    }
    // cyclic remainder, if any
    vertices.extend((0..n).filter(|&v| !placed[v]));
    vertices.iter().flat_map(|&v| net.out_arcs(v).iter().copied()).collect()
}

/// Exhaustive depth-first enumeration of integral flows of value `F` with
/// balance and bound pruning. Returns the optimum and the first optimal flow
/// found.
pub fn enumerate(instance: &Instance, objective: EnumObjective<'_>, budget: u64) -> Result<Enumeration, ExactError> {
    let net = instance.network();
    let n = net.vertex_count();
    let mut search = Search {
        instance,
        objective,
        order: arc_order(instance),
        values: vec![0; net.arc_count()],
        net: vec![0; n],
        rem_out: (0..n).map(|v| net.out_arcs(v).iter().map(|&a| net.arc(a).capacity).sum()).collect(),
        rem_in: (0..n).map(|v| net.in_arcs(v).iter().map(|&a| net.arc(a).capacity).sum()).collect(),
        partial: vec![0; instance.scenario_count()],
        best: None,
        nodes: 0,
        budget,
    };
    if (0..n).all(|v| search.balanced(v)) {
        search.run(0)?;
    }
    let (cost, values) = search.best.ok_or(ExactError::Infeasible)?;
    Ok(Enumeration { cost, flow: IntegerFlow::new(values), nodes: search.nodes })
}

/// Per-scenario minimum costs by enumeration.
pub fn enumerate_scenario_optima(instance: &Instance, budget: u64) -> Result<Vec<i64>, ExactError> {
    (0..instance.scenario_count())
        .map(|s| enumerate(instance, EnumObjective::Scenario(s), budget).map(|e| e.cost))
        .collect()
}

/// Robust optimum under `variant`. The deviation optima `z` are themselves
/// enumerated, so the result does not depend on any min-cost-flow routine.
pub fn enumerate_optimum(instance: &Instance, variant: Variant, budget: u64) -> Result<Enumeration, ExactError> {
    match variant {
        Variant::Absolute => enumerate(instance, EnumObjective::Absolute, budget),
        Variant::Deviation => {
            let z = enumerate_scenario_optima(instance, budget)?;
            enumerate(instance, EnumObjective::Deviation(&z), budget)
        }
    }
}
