use crate::model::{ArcId, IntegerFlow, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

/// One arc of the displacement network. `from`/`to` are 0-based vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidualArc {
    pub arc: ArcId,
    pub direction: Direction,
    pub from: usize,
    pub to: usize,
    pub capacity: i64,
}

impl ResidualArc {
    /// `+c` on forward arcs, `-c` on backward arcs.
    pub fn cost(&self, costs: &[i64]) -> i64 {
        match self.direction {
            Direction::Forward => costs[self.arc],
            Direction::Backward => -costs[self.arc],
        }
    }
}

/// Displacement network of a flow. Residual arcs are stored in arc declaration
/// order, forward before backward, and adjacency lists keep that order; every
/// search that walks them therefore breaks ties by the lowest arc index.
#[derive(Debug, Clone)]
pub struct ResidualNetwork {
    arcs: Vec<ResidualArc>,
    adjacency: Vec<Vec<usize>>,
}

impl ResidualNetwork {
    pub fn new(network: &Network, flow: &IntegerFlow) -> Self {
        Self::filtered(network, flow, |_, _| true)
    }

    /// Builds the displacement network keeping only residual arcs accepted by
    /// `keep(arc, direction)`.
    pub fn filtered(network: &Network, flow: &IntegerFlow, mut keep: impl FnMut(ArcId, Direction) -> bool) -> Self {
        let mut arcs = Vec::with_capacity(2 * network.arc_count());
        let mut adjacency = vec![Vec::new(); network.vertex_count()];
        for (a, arc) in network.arcs().iter().enumerate() {
            let x = flow[a];
            let forward = arc.capacity - x;
            if forward > 0 && keep(a, Direction::Forward) {
                adjacency[arc.tail].push(arcs.len());
                arcs.push(ResidualArc {
                    arc: a,
                    direction: Direction::Forward,
                    from: arc.tail,
                    to: arc.head,
                    capacity: forward,
                });
            }
            if x > 0 && keep(a, Direction::Backward) {
                adjacency[arc.head].push(arcs.len());
                arcs.push(ResidualArc {
                    arc: a,
                    direction: Direction::Backward,
                    from: arc.head,
                    to: arc.tail,
                    capacity: x,
                });
            }
        }
        Self { arcs, adjacency }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn arcs(&self) -> &[ResidualArc] {
        &self.arcs
    }

    pub fn arc(&self, r: usize) -> &ResidualArc {
        &self.arcs[r]
    }

    /// Residual arc indices leaving `v`.
    pub fn out(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }
}

/// Closed walk in a displacement network with distinct vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    arcs: Vec<ResidualArc>,
    bottleneck: i64,
}

impl Cycle {
    pub(crate) fn new(arcs: Vec<ResidualArc>) -> Self {
        debug_assert!(!arcs.is_empty());
        debug_assert!(arcs.windows(2).all(|w| w[0].to == w[1].from));
        debug_assert_eq!(arcs.last().map(|a| a.to), arcs.first().map(|a| a.from));
        let bottleneck = arcs.iter().map(|a| a.capacity).min().unwrap_or(0);
        Self { arcs, bottleneck }
    }

    pub fn arcs(&self) -> &[ResidualArc] {
        &self.arcs
    }

    pub fn bottleneck(&self) -> i64 {
        self.bottleneck
    }

    pub fn cost(&self, costs: &[i64]) -> i64 {
        self.arcs.iter().map(|a| a.cost(costs)).sum()
    }

    /// 0-based vertex sequence, starting vertex not repeated at the end.
    pub fn vertices(&self) -> Vec<usize> {
        self.arcs.iter().map(|a| a.from).collect()
    }
}

/// Adds `amount` on forward arcs and subtracts it on backward arcs.
pub(crate) fn push(flow: &mut IntegerFlow, arcs: &[ResidualArc], amount: i64) {
    let values = flow.values_mut();
    for r in arcs {
        match r.direction {
            Direction::Forward => values[r.arc] += amount,
            Direction::Backward => values[r.arc] -= amount,
        }
    }
}
