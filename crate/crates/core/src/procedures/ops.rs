use std::collections::VecDeque;

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use super::residual::{push, Direction, ResidualNetwork};
use super::search::{bfs_path, negative_cycle, negative_cycle_floyd_warshall, random_cycle, shortest_path};
use crate::model::{validate_flow, ArcId, FlowError, FractionalFlow, IntegerFlow, Network, PseudoFlow, UnitFlow};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProcedureError {
    #[error("flow value cannot be increased since it is already maximal")]
    AlreadyMaximal,
    #[error("target flow value {target} unreachable, stopped at {reached}")]
    TargetUnreachable { target: i64, reached: i64 },
    #[error("flow support contains a circulation not covered by source-sink paths")]
    DegenerateCirculation,
    #[error("empty input list")]
    EmptyInput,
    #[error("input flows have different values")]
    UnequalValues,
    #[error("unit-flow lists differ in length: {0} vs {1}")]
    ListLengthMismatch(usize, usize),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// Arc values readable as exact rationals.
pub trait ArcValues {
    fn arc_values(&self) -> Vec<Rational64>;
}

impl ArcValues for IntegerFlow {
    fn arc_values(&self) -> Vec<Rational64> {
        self.values().iter().map(|&x| Rational64::from_integer(x)).collect()
    }
}

impl ArcValues for FractionalFlow {
    fn arc_values(&self) -> Vec<Rational64> {
        self.values().to_vec()
    }
}

impl ArcValues for PseudoFlow {
    fn arc_values(&self) -> Vec<Rational64> {
        self.values().to_vec()
    }
}

impl<T: ArcValues> ArcValues for &T {
    fn arc_values(&self) -> Vec<Rational64> {
        (*self).arc_values()
    }
}

/// Arc-wise sum of flows. Fails if any arc sum exceeds its capacity.
pub fn sum_flows<T: ArcValues>(network: &Network, flows: &[T]) -> Result<PseudoFlow, ProcedureError> {
    let m = network.arc_count();
    let mut total = vec![Rational64::from_integer(0); m];
    for f in flows {
        let values = f.arc_values();
        if values.len() != m {
            return Err(FlowError::LengthMismatch { expected: m, got: values.len() }.into());
        }
        for (t, v) in total.iter_mut().zip(values) {
            *t += v;
        }
    }
    let pseudo = PseudoFlow::new(total);
    pseudo.validate(network)?;
    Ok(pseudo)
}

/// Fewest-arc source-to-sink path over arcs with positive `values`.
fn support_path(network: &Network, values: &[i64]) -> Option<Vec<ArcId>> {
    let n = network.vertex_count();
    let (s, t) = (network.source(), network.sink());
    let mut pred: Vec<Option<ArcId>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        if v == t {
            break;
        }
        for &a in network.out_arcs(v) {
            let w = network.arc(a).head;
            if values[a] > 0 && !seen[w] {
                seen[w] = true;
                pred[w] = Some(a);
                queue.push_back(w);
            }
        }
    }
    if !seen[t] {
        return None;
    }
    let mut path = Vec::new();
    let mut at = t;
    while at != s {
        let a = pred[at]?;
        path.push(a);
        at = network.arc(a).tail;
    }
    path.reverse();
    Some(path)
}

/// Peels up to `limit` unit paths off `values`, stopping early once the
/// support disconnects the source from the sink.
pub(crate) fn extract_paths(network: &Network, values: &mut [i64], limit: i64) -> Vec<UnitFlow> {
    let mut paths = Vec::new();
    while (paths.len() as i64) < limit {
        let Some(path) = support_path(network, values) else { break };
        for &a in &path {
            values[a] -= 1;
        }
        paths.push(UnitFlow::from_path_unchecked(path));
    }
    paths
}

/// Splits an integral flow of value `F` into `F` unit flows whose sum is the
/// input, extracting fewest-arc paths first.
pub fn decompose(network: &Network, flow: &IntegerFlow) -> Result<Vec<UnitFlow>, ProcedureError> {
    let value = validate_flow(network, flow)?;
    let mut rest = flow.values().to_vec();
    let paths = extract_paths(network, &mut rest, value);
    if paths.len() as i64 != value || rest.iter().any(|&x| x != 0) {
        return Err(ProcedureError::DegenerateCirculation);
    }
    Ok(paths)
}

/// Arithmetic mean of flows sharing the same value.
pub fn center(network: &Network, flows: &[IntegerFlow]) -> Result<FractionalFlow, ProcedureError> {
    let first = flows.first().ok_or(ProcedureError::EmptyInput)?;
    let value = validate_flow(network, first)?;
    for f in &flows[1..] {
        if validate_flow(network, f)? != value {
            return Err(ProcedureError::UnequalValues);
        }
    }
    let r = flows.len() as i64;
    let values = (0..network.arc_count()).map(|a| Rational64::new(flows.iter().map(|f| f[a]).sum(), r)).collect();
    Ok(FractionalFlow::new(values))
}

/// Pushes the full bottleneck along a fewest-arc augmenting path.
pub fn augment(network: &Network, flow: &IntegerFlow) -> Result<IntegerFlow, ProcedureError> {
    augment_limited(network, flow, i64::MAX)
}

/// Like [`augment`] but pushes at most `limit` units.
pub fn augment_limited(network: &Network, flow: &IntegerFlow, limit: i64) -> Result<IntegerFlow, ProcedureError> {
    let residual = ResidualNetwork::new(network, flow);
    let path = bfs_path(&residual, network.source(), network.sink()).ok_or(ProcedureError::AlreadyMaximal)?;
    let arcs: Vec<_> = path.iter().map(|&r| *residual.arc(r)).collect();
    let amount = arcs.iter().map(|a| a.capacity).min().unwrap_or(0).min(limit);
    let mut out = flow.clone();
    push(&mut out, &arcs, amount);
    Ok(out)
}

/// Augments `flow` until its value reaches `target`, truncating the last push.
fn augment_to(network: &Network, mut flow: IntegerFlow, target: i64) -> Result<IntegerFlow, ProcedureError> {
    let mut value = flow.value(network);
    while value < target {
        flow = match augment_limited(network, &flow, target - value) {
            Ok(f) => f,
            Err(ProcedureError::AlreadyMaximal) => {
                return Err(ProcedureError::TargetUnreachable { target, reached: value })
            }
            Err(e) => return Err(e),
        };
        value = flow.value(network);
    }
    Ok(flow)
}

/// Maximum source-to-sink flow value (BFS augmenting paths).
pub fn max_flow_value(network: &Network) -> i64 {
    let mut flow = IntegerFlow::zero(network.arc_count());
    while let Ok(next) = augment(network, &flow) {
        flow = next;
    }
    flow.value(network)
}

/// Integral approximation of a fractional flow with value `⌊F + 1/2⌋`: round
/// arc values half-up, peel unit paths off the rounded support, then augment
/// the sum of those paths up to the target value.
pub fn round_flow(network: &Network, flow: &FractionalFlow) -> Result<IntegerFlow, ProcedureError> {
    let value = flow.validate(network)?;
    let half = Rational64::new(1, 2);
    let target = (value + half).floor().to_integer();
    let mut rounded: Vec<i64> = flow.values().iter().map(|&x| (x + half).floor().to_integer()).collect();
    let paths = extract_paths(network, &mut rounded, target);
    let mut g = IntegerFlow::zero(network.arc_count());
    for p in &paths {
        for &a in p.arcs() {
            g.values_mut()[a] += 1;
        }
    }
    augment_to(network, g, target)
}

/// Combines two unit-flow lists of equal length `F` into a flow of value `F`,
/// alternating random picks from `a` and `b` while the running sum stays
/// within capacities. A stalled construction is completed by augmentation.
pub fn compose<R: Rng + ?Sized>(
    network: &Network,
    a: &[UnitFlow],
    b: &[UnitFlow],
    rng: &mut R,
) -> Result<IntegerFlow, ProcedureError> {
    if a.len() != b.len() {
        return Err(ProcedureError::ListLengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(ProcedureError::EmptyInput);
    }
    let target = a.len();
    let lists = [a, b];
    let mut remaining: [Vec<usize>; 2] = [(0..a.len()).collect(), (0..b.len()).collect()];
    let mut stalled = [false, false];
    let mut load = IntegerFlow::zero(network.arc_count());
    let mut picked = 0;
    let mut active = 0;
    while picked < target && !(stalled[0] && stalled[1]) {
        if !stalled[active] {
            let mut candidates = remaining[active].clone();
            candidates.shuffle(rng);
            let fits = |i: usize| lists[active][i].arcs().iter().all(|&arc| load[arc] < network.arc(arc).capacity);
            match candidates.into_iter().find(|&i| fits(i)) {
                Some(i) => {
                    for &arc in lists[active][i].arcs() {
                        load.values_mut()[arc] += 1;
                    }
                    remaining[active].retain(|&j| j != i);
                    picked += 1;
                }
                // the load only grows, so a stalled list stays stalled
                None => stalled[active] = true,
            }
        }
        active = 1 - active;
    }
    augment_to(network, load, target as i64)
}

/// Negative-cycle search used by [`cost_reduce_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CycleSearch {
    #[default]
    BellmanFord,
    FloydWarshall,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostReduction {
    pub flow: IntegerFlow,
    /// No negative residual cycle exists; `flow` is the unchanged input.
    pub optimal: bool,
}

/// Cancels one negative-cost residual cycle under `costs`.
pub fn cost_reduce(network: &Network, flow: &IntegerFlow, costs: &[i64]) -> CostReduction {
    cost_reduce_with(network, flow, costs, CycleSearch::BellmanFord)
}

pub fn cost_reduce_with(network: &Network, flow: &IntegerFlow, costs: &[i64], search: CycleSearch) -> CostReduction {
    let residual = ResidualNetwork::new(network, flow);
    let cycle = match search {
        CycleSearch::BellmanFord => negative_cycle(&residual, costs),
        CycleSearch::FloydWarshall => negative_cycle_floyd_warshall(&residual, costs),
    };
    match cycle {
        Some(c) => {
            let mut out = flow.clone();
            push(&mut out, c.arcs(), c.bottleneck());
            CostReduction { flow: out, optimal: false }
        }
        None => CostReduction { flow: flow.clone(), optimal: true },
    }
}

/// Iterates [`cost_reduce`] until no negative cycle remains.
pub fn cancel_to_optimality(network: &Network, flow: &IntegerFlow, costs: &[i64]) -> IntegerFlow {
    let mut current = flow.clone();
    loop {
        let step = cost_reduce(network, &current, costs);
        if step.optimal {
            return current;
        }
        current = step.flow;
    }
}

/// Pushes the bottleneck around an arbitrary residual cycle; returns the
/// input when the displacement network is acyclic.
pub fn perturb<R: Rng + ?Sized>(network: &Network, flow: &IntegerFlow, rng: &mut R) -> IntegerFlow {
    let residual = ResidualNetwork::new(network, flow);
    push_random_cycle(&residual, flow, rng)
}

fn push_random_cycle<R: Rng + ?Sized>(residual: &ResidualNetwork, flow: &IntegerFlow, rng: &mut R) -> IntegerFlow {
    let mut out = flow.clone();
    if let Some(c) = random_cycle(residual, rng) {
        push(&mut out, c.arcs(), c.bottleneck());
    }
    out
}

/// Perturbs `f` within a displacement network restricted to forward arcs
/// used by `g` and backward arcs not used by `g`.
pub fn harmonize<R: Rng + ?Sized>(
    network: &Network,
    f: &IntegerFlow,
    g: &IntegerFlow,
    rng: &mut R,
) -> Result<IntegerFlow, ProcedureError> {
    if validate_flow(network, f)? != validate_flow(network, g)? {
        return Err(ProcedureError::UnequalValues);
    }
    let residual = ResidualNetwork::filtered(network, f, |a, dir| match dir {
        Direction::Forward => g[a] > 0,
        Direction::Backward => g[a] == 0,
    });
    Ok(push_random_cycle(&residual, f, rng))
}

/// Some integral flow of value `flow_value`, by repeated augmentation from
/// the zero flow.
pub fn find_flow(network: &Network, flow_value: i64) -> Result<IntegerFlow, ProcedureError> {
    augment_to(network, IntegerFlow::zero(network.arc_count()), flow_value)
}

/// Minimum-cost integral flow of value `flow_value` under `costs` by
/// successive shortest paths. Costs must be nonnegative.
pub fn min_cost_flow(network: &Network, costs: &[i64], flow_value: i64) -> Result<IntegerFlow, ProcedureError> {
    let mut flow = IntegerFlow::zero(network.arc_count());
    let mut value = 0;
    while value < flow_value {
        let residual = ResidualNetwork::new(network, &flow);
        let Some(path) = shortest_path(&residual, costs, network.source(), network.sink()) else {
            return Err(ProcedureError::TargetUnreachable { target: flow_value, reached: value });
        };
        let arcs: Vec<_> = path.iter().map(|&r| *residual.arc(r)).collect();
        let amount = arcs.iter().map(|a| a.capacity).min().unwrap_or(0).min(flow_value - value);
        push(&mut flow, &arcs, amount);
        value += amount;
    }
    Ok(flow)
}
