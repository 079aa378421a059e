//! Domain types shared by every solver: the network, its cost scenarios, the
//! problem instance and the flow representations.
//!
//! Vertices are stored 0-based. The source is vertex `0` and the sink is
//! vertex `n - 1`; files and error messages use the 1-based numbering.

use std::fmt;

use num_rational::Ratio;
use num_rational::Rational64;
use thiserror::Error;

use crate::procedures::max_flow_value;

/// Index of an arc in declaration order.
pub type ArcId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub capacity: i64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("network needs at least two vertices, got {0}")]
    TooFewVertices(usize),
    #[error("arc {arc}: vertex index {vertex} out of range 1..{n}")]
    VertexOutOfRange { arc: usize, vertex: usize, n: usize },
    #[error("arc {arc}: self-loop at vertex {vertex}")]
    SelfLoop { arc: usize, vertex: usize },
    #[error("arc {arc}: duplicate arc {tail} -> {head}")]
    DuplicateArc { arc: usize, tail: usize, head: usize },
    #[error("arc {arc}: negative capacity {capacity}")]
    NegativeCapacity { arc: usize, capacity: i64 },
    #[error("at least one scenario is required")]
    NoScenarios,
    #[error("scenario length mismatch: scenario {scenario} has {got} costs, expected {expected}")]
    ScenarioLength { scenario: usize, got: usize, expected: usize },
    #[error("scenario {scenario}: negative cost {cost} on arc {arc}")]
    NegativeCost { scenario: usize, arc: usize, cost: i64 },
    #[error("negative flow value {0}")]
    NegativeFlowValue(i64),
    #[error("F exceeds maximum flow: F = {flow_value}, maximum flow = {max_flow}")]
    FlowValueExceedsMaxFlow { flow_value: i64, max_flow: i64 },
}

/// Directed network with integral capacities. Arc order is the declaration
/// order and is what every arc-indexed vector refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    vertex_count: usize,
    arcs: Vec<Arc>,
    out_arcs: Vec<Vec<ArcId>>,
    in_arcs: Vec<Vec<ArcId>>,
}

impl Network {
    /// Builds a network from 0-based arcs.
    pub fn new(vertex_count: usize, arcs: Vec<Arc>) -> Result<Self, ModelError> {
        if vertex_count < 2 {
            return Err(ModelError::TooFewVertices(vertex_count));
        }
        let mut out_arcs = vec![Vec::new(); vertex_count];
        let mut in_arcs = vec![Vec::new(); vertex_count];
        let mut seen = std::collections::HashSet::with_capacity(arcs.len());
        for (id, arc) in arcs.iter().enumerate() {
            for v in [arc.tail, arc.head] {
                if v >= vertex_count {
                    return Err(ModelError::VertexOutOfRange { arc: id + 1, vertex: v + 1, n: vertex_count });
                }
            }
            if arc.tail == arc.head {
                return Err(ModelError::SelfLoop { arc: id + 1, vertex: arc.tail + 1 });
            }
            if arc.capacity < 0 {
                return Err(ModelError::NegativeCapacity { arc: id + 1, capacity: arc.capacity });
            }
            if !seen.insert((arc.tail, arc.head)) {
                return Err(ModelError::DuplicateArc { arc: id + 1, tail: arc.tail + 1, head: arc.head + 1 });
            }
            out_arcs[arc.tail].push(id);
            in_arcs[arc.head].push(id);
        }
        Ok(Self { vertex_count, arcs, out_arcs, in_arcs })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> Arc {
        self.arcs[id]
    }

    pub fn source(&self) -> usize {
        0
    }

    pub fn sink(&self) -> usize {
        self.vertex_count - 1
    }

    pub fn out_arcs(&self, v: usize) -> &[ArcId] {
        &self.out_arcs[v]
    }

    pub fn in_arcs(&self, v: usize) -> &[ArcId] {
        &self.in_arcs[v]
    }

    /// Required net outflow of `v` for a flow of value `flow_value`.
    pub fn supply(&self, v: usize, flow_value: i64) -> i64 {
        if v == self.source() {
            flow_value
        } else if v == self.sink() {
            -flow_value
        } else {
            0
        }
    }
}

/// One unit-cost vector per scenario, each indexed by arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioSet {
    costs: Vec<Vec<i64>>,
}

impl ScenarioSet {
    pub fn new(costs: Vec<Vec<i64>>, arc_count: usize) -> Result<Self, ModelError> {
        if costs.is_empty() {
            return Err(ModelError::NoScenarios);
        }
        for (s, row) in costs.iter().enumerate() {
            if row.len() != arc_count {
                return Err(ModelError::ScenarioLength { scenario: s + 1, got: row.len(), expected: arc_count });
            }
            if let Some((a, &c)) = row.iter().enumerate().find(|(_, c)| **c < 0) {
                return Err(ModelError::NegativeCost { scenario: s + 1, arc: a + 1, cost: c });
            }
        }
        Ok(Self { costs })
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    /// Cost vector of scenario `s` (0-based). Panics when out of range.
    pub fn costs(&self, s: usize) -> &[i64] {
        &self.costs[s]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> {
        self.costs.iter().map(Vec::as_slice)
    }
}

/// A robust min-cost integer flow instance: network, scenarios and the
/// required flow value `F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    network: Network,
    scenarios: ScenarioSet,
    flow_value: i64,
}

impl Instance {
    /// Validates `F` against the maximum flow of the network.
    pub fn new(network: Network, scenarios: ScenarioSet, flow_value: i64) -> Result<Self, ModelError> {
        if flow_value < 0 {
            return Err(ModelError::NegativeFlowValue(flow_value));
        }
        if scenarios.costs.iter().any(|c| c.len() != network.arc_count()) {
            let (s, row) = scenarios
                .costs
                .iter()
                .enumerate()
                .find(|(_, c)| c.len() != network.arc_count())
                .expect("mismatch found above");
            return Err(ModelError::ScenarioLength { scenario: s + 1, got: row.len(), expected: network.arc_count() });
        }
        let max_flow = max_flow_value(&network);
        if flow_value > max_flow {
            return Err(ModelError::FlowValueExceedsMaxFlow { flow_value, max_flow });
        }
        Ok(Self { network, scenarios, flow_value })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn scenarios(&self) -> &ScenarioSet {
        &self.scenarios
    }

    pub fn scenario_count(&self) -> usize {
        self.scenarios.len()
    }

    pub fn flow_value(&self) -> i64 {
        self.flow_value
    }

    /// Checks capacities and conservation; returns the flow value.
    pub fn validate_flow(&self, flow: &IntegerFlow) -> Result<i64, FlowError> {
        validate_flow(&self.network, flow)
    }

    /// Like [`Instance::validate_flow`] but also requires value `F`.
    pub fn check_feasible(&self, flow: &IntegerFlow) -> Result<(), FlowError> {
        let value = self.validate_flow(flow)?;
        if value != self.flow_value {
            return Err(FlowError::WrongValue { expected: self.flow_value, got: value });
        }
        Ok(())
    }

    /// Cost of `flow` under scenario `s` (0-based).
    pub fn flow_cost(&self, flow: &IntegerFlow, s: usize) -> Result<i64, FlowError> {
        if s >= self.scenarios.len() {
            return Err(FlowError::ScenarioOutOfRange { index: s + 1, count: self.scenarios.len() });
        }
        if flow.len() != self.network.arc_count() {
            return Err(FlowError::LengthMismatch { expected: self.network.arc_count(), got: flow.len() });
        }
        Ok(dot(self.scenarios.costs(s), flow.values()))
    }
}

pub(crate) fn dot(costs: &[i64], values: &[i64]) -> i64 {
    costs.iter().zip(values).map(|(c, x)| c * x).sum()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("flow has {got} arc values, network has {expected} arcs")]
    LengthMismatch { expected: usize, got: usize },
    /// 1-based arc index.
    #[error("capacity violation on arc {0}")]
    CapacityViolation(usize),
    /// 1-based vertex index.
    #[error("conservation violation at vertex v{0}")]
    ConservationViolation(usize),
    #[error("flow value {got}, expected {expected}")]
    WrongValue { expected: i64, got: i64 },
    #[error("scenario index {index} out of range 1..{count}")]
    ScenarioOutOfRange { index: usize, count: usize },
}

/// Integral arc values. Construction does not check feasibility; see
/// [`validate_flow`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegerFlow(Vec<i64>);

impl IntegerFlow {
    pub fn new(values: Vec<i64>) -> Self {
        Self(values)
    }

    pub fn zero(arc_count: usize) -> Self {
        Self(vec![0; arc_count])
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [i64] {
        &mut self.0
    }

    pub fn into_values(self) -> Vec<i64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Net outflow of the source.
    pub fn value(&self, network: &Network) -> i64 {
        net_outflow(network, &self.0, network.source())
    }

    pub fn to_fractional(&self) -> FractionalFlow {
        FractionalFlow(self.0.iter().map(|&x| Ratio::from_integer(x)).collect())
    }
}

impl std::ops::Index<ArcId> for IntegerFlow {
    type Output = i64;
    fn index(&self, a: ArcId) -> &i64 {
        &self.0[a]
    }
}

impl fmt::Display for IntegerFlow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

fn net_outflow<T>(network: &Network, values: &[T], v: usize) -> T
where
    T: Copy + std::iter::Sum<T> + std::ops::Sub<Output = T>,
{
    let out: T = network.out_arcs(v).iter().map(|&a| values[a]).sum();
    let inn: T = network.in_arcs(v).iter().map(|&a| values[a]).sum();
    out - inn
}

/// Checks `0 <= x <= u` on every arc and conservation at every vertex other
/// than source and sink. Returns the flow value.
pub fn validate_flow(network: &Network, flow: &IntegerFlow) -> Result<i64, FlowError> {
    check_arcwise(network, flow.values())?;
    check_conservation(network, flow.values())
}

fn check_arcwise<T>(network: &Network, values: &[T]) -> Result<(), FlowError>
where
    T: Copy + PartialOrd + From<i64>,
{
    if values.len() != network.arc_count() {
        return Err(FlowError::LengthMismatch { expected: network.arc_count(), got: values.len() });
    }
    for (a, (&x, arc)) in values.iter().zip(network.arcs()).enumerate() {
        if x < T::from(0) || x > T::from(arc.capacity) {
            return Err(FlowError::CapacityViolation(a + 1));
        }
    }
    Ok(())
}

fn check_conservation<T>(network: &Network, values: &[T]) -> Result<T, FlowError>
where
    T: Copy + PartialEq + From<i64> + std::iter::Sum<T> + std::ops::Sub<Output = T> + std::ops::Neg<Output = T>,
{
    for v in 0..network.vertex_count() {
        if v == network.source() || v == network.sink() {
            continue;
        }
        if net_outflow(network, values, v) != T::from(0) {
            return Err(FlowError::ConservationViolation(v + 1));
        }
    }
    let value = net_outflow(network, values, network.source());
    if net_outflow(network, values, network.sink()) != -value {
        return Err(FlowError::ConservationViolation(network.sink() + 1));
    }
    Ok(value)
}

/// Rational arc values that satisfy capacities and conservation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalFlow(Vec<Rational64>);

impl FractionalFlow {
    pub fn new(values: Vec<Rational64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[Rational64] {
        &self.0
    }

    pub fn value(&self, network: &Network) -> Rational64 {
        net_outflow(network, &self.0, network.source())
    }

    /// Exact feasibility check; returns the (rational) flow value.
    pub fn validate(&self, network: &Network) -> Result<Rational64, FlowError> {
        check_arcwise(network, &self.0)?;
        check_conservation(network, &self.0)
    }
}

/// Rational arc values within capacities; conservation is not required.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoFlow(Vec<Rational64>);

impl PseudoFlow {
    pub fn new(values: Vec<Rational64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[Rational64] {
        &self.0
    }

    pub fn validate(&self, network: &Network) -> Result<(), FlowError> {
        check_arcwise(network, &self.0)
    }

    /// The integral flow with the same values, if every value is integral.
    pub fn to_integer(&self) -> Option<IntegerFlow> {
        self.0.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect::<Option<Vec<_>>>().map(IntegerFlow)
    }
}

/// A value-1 integral flow along one simple source-to-sink path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnitFlow {
    path: Vec<ArcId>,
}

impl UnitFlow {
    /// Checks that `path` is a simple directed source-to-sink path.
    pub fn from_path(network: &Network, path: Vec<ArcId>) -> Option<Self> {
        let mut at = network.source();
        let mut visited = vec![false; network.vertex_count()];
        visited[at] = true;
        for &a in &path {
            let arc = network.arcs().get(a)?;
            if arc.tail != at || arc.capacity < 1 || visited[arc.head] {
                return None;
            }
            at = arc.head;
            visited[at] = true;
        }
        (at == network.sink() && !path.is_empty()).then_some(Self { path })
    }

    pub(crate) fn from_path_unchecked(path: Vec<ArcId>) -> Self {
        Self { path }
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.path
    }

    pub fn to_flow(&self, arc_count: usize) -> IntegerFlow {
        let mut values = vec![0; arc_count];
        for &a in &self.path {
            values[a] += 1;
        }
        IntegerFlow(values)
    }

    /// Vertex sequence, 0-based, source first.
    pub fn vertices(&self, network: &Network) -> Vec<usize> {
        let mut out = vec![network.source()];
        out.extend(self.path.iter().map(|&a| network.arc(a).head));
        out
    }
}

/// Robust criterion of optimality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Min-max of the scenario costs.
    Absolute,
    /// Min-max regret against per-scenario optima.
    Deviation,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Absolute, Variant::Deviation];

    pub fn tag(self) -> &'static str {
        match self {
            Variant::Absolute => "absolute",
            Variant::Deviation => "deviation",
        }
    }

    /// Accepts `abs`/`absolute` and `dev`/`deviation`.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "abs" | "absolute" => Some(Variant::Absolute),
            "dev" | "deviation" => Some(Variant::Deviation),
            _ => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Which algorithm produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverTag {
    Ls1,
    Ls2,
    Ls3,
    Ls4,
    Ec1,
    Ec2,
    Ec3,
    Ec4,
    Ec5,
    Ec6,
    Ec7,
    Ec8,
    Ec9,
    Exact,
}

impl SolverTag {
    /// The thirteen heuristics, local search first.
    pub const HEURISTICS: [SolverTag; 13] = [
        SolverTag::Ls1,
        SolverTag::Ls2,
        SolverTag::Ls3,
        SolverTag::Ls4,
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

    pub fn tag(self) -> &'static str {
        match self {
            SolverTag::Ls1 => "ls1",
            SolverTag::Ls2 => "ls2",
            SolverTag::Ls3 => "ls3",
            SolverTag::Ls4 => "ls4",
            SolverTag::Ec1 => "ec1",
            SolverTag::Ec2 => "ec2",
            SolverTag::Ec3 => "ec3",
            SolverTag::Ec4 => "ec4",
            SolverTag::Ec5 => "ec5",
            SolverTag::Ec6 => "ec6",
            SolverTag::Ec7 => "ec7",
            SolverTag::Ec8 => "ec8",
            SolverTag::Ec9 => "ec9",
            SolverTag::Exact => "exact",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        SolverTag::HEURISTICS.into_iter().chain([SolverTag::Exact]).find(|t| t.tag() == s)
    }
}

impl fmt::Display for SolverTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    pub variant: Variant,
    pub solver: SolverTag,
    pub robust_cost: i64,
    pub flow: IntegerFlow,
    pub elapsed_seconds: f64,
    pub seed: u64,
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// v1 -> v2 -> v4 and v1 -> v3 -> v4, unit capacities, two mirrored
    /// scenarios, F = 1.
    pub fn diamond() -> Instance {
        diamond_with_flow(1)
    }

    pub fn diamond_with_flow(flow_value: i64) -> Instance {
        let network = Network::new(
            4,
            vec![
                Arc { tail: 0, head: 1, capacity: 1 },
                Arc { tail: 0, head: 2, capacity: 1 },
                Arc { tail: 1, head: 3, capacity: 1 },
                Arc { tail: 2, head: 3, capacity: 1 },
            ],
        )
        .unwrap();
        let scenarios = ScenarioSet::new(vec![vec![1, 2, 1, 2], vec![2, 1, 2, 1]], 4).unwrap();
        Instance::new(network, scenarios, flow_value).unwrap()
    }

    /// Single chain v1 -> v2 -> ... -> vn with the given capacity.
    pub fn chain(n: usize, capacity: i64, costs: Vec<Vec<i64>>, flow_value: i64) -> Instance {
        let arcs = (0..n - 1).map(|i| Arc { tail: i, head: i + 1, capacity }).collect();
        let network = Network::new(n, arcs).unwrap();
        let scenarios = ScenarioSet::new(costs, n - 1).unwrap();
        Instance::new(network, scenarios, flow_value).unwrap()
    }

    pub fn flow(values: &[i64]) -> IntegerFlow {
        IntegerFlow::new(values.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn validate_single_path() {
        let inst = diamond();
        assert_eq!(inst.validate_flow(&flow(&[1, 0, 1, 0])), Ok(1));
    }

    #[test]
    fn validate_reports_conservation_vertex() {
        let inst = diamond();
        assert_eq!(inst.validate_flow(&flow(&[1, 0, 0, 1])), Err(FlowError::ConservationViolation(2)));
    }

    #[test]
    fn validate_reports_capacity_arc() {
        let inst = diamond();
        assert_eq!(inst.validate_flow(&flow(&[2, 0, 2, 0])), Err(FlowError::CapacityViolation(1)));
        assert_eq!(inst.validate_flow(&flow(&[-1, 0, 0, 0])), Err(FlowError::CapacityViolation(1)));
    }

    #[test]
    fn validate_rejects_wrong_length() {
        let inst = diamond();
        assert!(matches!(inst.validate_flow(&flow(&[1, 0, 1])), Err(FlowError::LengthMismatch { .. })));
    }

    #[test]
    fn flow_costs() {
        let inst = diamond_with_flow(2);
        assert_eq!(inst.flow_cost(&flow(&[1, 0, 1, 0]), 0), Ok(2));
        assert_eq!(inst.flow_cost(&IntegerFlow::zero(4), 1), Ok(0));
        assert_eq!(inst.flow_cost(&flow(&[1, 1, 1, 1]), 0), Ok(6));
        assert!(matches!(
            inst.flow_cost(&flow(&[1, 1, 1, 1]), 2),
            Err(FlowError::ScenarioOutOfRange { index: 3, count: 2 })
        ));
    }

    #[test]
    fn network_rejects_bad_arcs() {
        let a = |t, h, c| Arc { tail: t, head: h, capacity: c };
        assert!(matches!(Network::new(3, vec![a(0, 0, 1)]), Err(ModelError::SelfLoop { .. })));
        assert!(matches!(Network::new(3, vec![a(0, 1, 1), a(0, 1, 2)]), Err(ModelError::DuplicateArc { arc: 2, .. })));
        assert!(matches!(Network::new(3, vec![a(0, 3, 1)]), Err(ModelError::VertexOutOfRange { .. })));
        assert!(matches!(Network::new(3, vec![a(0, 1, -1)]), Err(ModelError::NegativeCapacity { .. })));
        // antiparallel arcs are distinct ordered pairs
        assert!(Network::new(3, vec![a(0, 1, 1), a(1, 0, 1)]).is_ok());
    }

    #[test]
    fn instance_rejects_excess_flow_value() {
        let inst = diamond();
        let err = Instance::new(inst.network().clone(), inst.scenarios().clone(), 3).unwrap_err();
        assert_eq!(err, ModelError::FlowValueExceedsMaxFlow { flow_value: 3, max_flow: 2 });
    }

    #[test]
    fn zero_flow_value_is_legal() {
        let inst = diamond_with_flow(0);
        assert!(inst.check_feasible(&IntegerFlow::zero(4)).is_ok());
    }

    #[test]
    fn fractional_validation_is_exact() {
        let inst = diamond();
        let half = Ratio::new(1, 2);
        let f = FractionalFlow::new(vec![half; 4]);
        assert_eq!(f.validate(inst.network()), Ok(Ratio::from_integer(1)));
        let third = Ratio::new(1, 3);
        let g = FractionalFlow::new(vec![third, Ratio::new(2, 3), Ratio::new(2, 3), Ratio::new(2, 3)]);
        assert_eq!(g.validate(inst.network()), Err(FlowError::ConservationViolation(2)));
    }

    #[test]
    fn unit_flow_path_checks() {
        let inst = diamond();
        let net = inst.network();
        let p = UnitFlow::from_path(net, vec![0, 2]).unwrap();
        assert_eq!(p.vertices(net), vec![0, 1, 3]);
        assert_eq!(p.to_flow(4), flow(&[1, 0, 1, 0]));
        assert!(UnitFlow::from_path(net, vec![0, 3]).is_none());
        assert!(UnitFlow::from_path(net, vec![0]).is_none());
    }
}
