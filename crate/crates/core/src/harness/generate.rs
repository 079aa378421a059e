use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Arc, Instance, ModelError, Network, ScenarioSet};
use crate::procedures::max_flow_value;

/// How the required flow value is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowPolicy {
    Explicit(i64),
    /// `floor(fraction * max flow)`.
    Fraction(f64),
}

impl Default for FlowPolicy {
    fn default() -> Self {
        FlowPolicy::Fraction(0.5)
    }
}

/// A layered network: source, the layers in order, sink.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub layer_widths: Vec<usize>,
    pub scenario_count: usize,
    pub capacity: (i64, i64),
    pub cost: (i64, i64),
    /// Probability of keeping each arc between adjacent layers.
    pub density: f64,
    pub flow: FlowPolicy,
    pub seed: u64,
}

impl GeneratorSpec {
    /// `layers` layers of equal `width`.
    pub fn uniform(layers: usize, width: usize, scenario_count: usize, seed: u64) -> Self {
        Self {
            layer_widths: vec![width; layers],
            scenario_count,
            capacity: (0, 99),
            cost: (0, 99),
            density: 1.0,
            flow: FlowPolicy::default(),
            seed,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.layer_widths.iter().sum::<usize>() + 2
    }

    pub fn validate(&self) -> Result<(), GenerateError> {
        let bad = |m: &str| Err(GenerateError::InvalidSpec(m.to_string()));
        if self.layer_widths.is_empty() || self.layer_widths.contains(&0) {
            return bad("at least one layer, every width positive");
        }
        if self.scenario_count == 0 {
            return bad("at least one scenario");
        }
        for (name, (lo, hi)) in [("capacity", self.capacity), ("cost", self.cost)] {
            if lo < 0 || lo > hi {
                return Err(GenerateError::InvalidSpec(format!("{name} range must satisfy 0 <= lo <= hi")));
            }
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return bad("density must lie in (0, 1]");
        }
        match self.flow {
            FlowPolicy::Explicit(f) if f < 0 => bad("flow value must be nonnegative"),
            FlowPolicy::Fraction(x) if !(0.0..=1.0).contains(&x) => bad("flow fraction must lie in [0, 1]"),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("flow value {requested} exceeds the maximum flow in {attempts} attempts (last: {max_flow})")]
    FlowUnreachable { requested: i64, max_flow: i64, attempts: u32 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Regeneration attempts for an explicit flow value.
pub const MAX_ATTEMPTS: u32 = 100;

/// Arc endpoints of one layered topology; every vertex lies on a
/// source-sink path.
fn topology(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut starts = Vec::with_capacity(spec.layer_widths.len());
    let mut next = 1;
    for &w in &spec.layer_widths {
        starts.push(next);
        next += w;
    }
    let sink = next;
    let layer = |i: usize| starts[i]..starts[i] + spec.layer_widths[i];
    let last = spec.layer_widths.len() - 1;

    let mut arcs: Vec<(usize, usize)> = layer(0).map(|v| (0, v)).collect();
    for i in 0..last {
        let mut kept: Vec<(usize, usize)> = Vec::new();
        for t in layer(i) {
            for h in layer(i + 1) {
                if rng.gen_bool(spec.density) {
                    kept.push((t, h));
                }
            }
        }
        // every vertex needs an arc from the previous layer and one to the next
        for h in layer(i + 1) {
            if !kept.iter().any(|&(_, x)| x == h) {
                kept.push((rng.gen_range(layer(i)), h));
            }
        }
        for t in layer(i) {
            if !kept.iter().any(|&(x, _)| x == t) {
                kept.push((t, rng.gen_range(layer(i + 1))));
            }
        }
        kept.sort_unstable();
        arcs.extend(kept);
    }
    arcs.extend(layer(last).map(|v| (v, sink)));
    arcs
}

/// Generates a layered instance; the output depends only on `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<Instance, GenerateError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut last_max = 0;
    for _ in 0..MAX_ATTEMPTS {
        let endpoints = topology(spec, &mut rng);
        let arcs: Vec<Arc> = endpoints
            .iter()
            .map(|&(tail, head)| Arc { tail, head, capacity: rng.gen_range(spec.capacity.0..=spec.capacity.1) })
            .collect();
        let m = arcs.len();
        let costs: Vec<Vec<i64>> = (0..spec.scenario_count)
            .map(|_| (0..m).map(|_| rng.gen_range(spec.cost.0..=spec.cost.1)).collect())
            .collect();
        let network = Network::new(spec.vertex_count(), arcs)?;
        let max_flow = max_flow_value(&network);
        let flow_value = match spec.flow {
            FlowPolicy::Explicit(f) if f > max_flow => {
                last_max = max_flow;
                continue;
            }
            FlowPolicy::Explicit(f) => f,
            FlowPolicy::Fraction(x) => (x * max_flow as f64).floor() as i64,
        };
        return Ok(Instance::new(network, ScenarioSet::new(costs, m)?, flow_value)?);
    }
    match spec.flow {
        FlowPolicy::Explicit(requested) => {
            Err(GenerateError::FlowUnreachable { requested, max_flow: last_max, attempts: MAX_ATTEMPTS })
        }
        FlowPolicy::Fraction(_) => unreachable!("fractional flow values always fit"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::write_instance;

    #[test]
    fn two_wide_layers() {
        let inst = generate(&GeneratorSpec::uniform(2, 8, 30, 1)).unwrap();
        assert_eq!(inst.network().vertex_count(), 18);
        assert_eq!(inst.network().arc_count(), 80);
        assert_eq!(inst.scenario_count(), 30);
    }

    #[test]
    fn eight_narrow_layers() {
        let inst = generate(&GeneratorSpec::uniform(8, 2, 30, 1)).unwrap();
        assert_eq!(inst.network().vertex_count(), 18);
        assert_eq!(inst.network().arc_count(), 32);
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = GeneratorSpec { density: 0.4, ..GeneratorSpec::uniform(4, 3, 3, 9) };
        assert_eq!(write_instance(&generate(&spec).unwrap()), write_instance(&generate(&spec).unwrap()));
        let other = GeneratorSpec { seed: 10, ..spec.clone() };
        assert_ne!(write_instance(&generate(&spec).unwrap()), write_instance(&generate(&other).unwrap()));
    }

    #[test]
    fn sparse_networks_stay_connected() {
        for seed in 0..50 {
            let spec = GeneratorSpec { density: 0.05, capacity: (1, 5), ..GeneratorSpec::uniform(5, 4, 2, seed) };
            let inst = generate(&spec).unwrap();
            let net = inst.network();
            for v in 1..net.vertex_count() - 1 {
                assert!(!net.in_arcs(v).is_empty() && !net.out_arcs(v).is_empty(), "seed {seed} vertex {v}");
            }
        }
    }

    #[test]
    fn flow_policies() {
        let spec = GeneratorSpec { capacity: (2, 2), ..GeneratorSpec::uniform(2, 3, 1, 0) };
        // max flow 6 through three unit-wide columns of capacity 2
        assert_eq!(generate(&spec).unwrap().flow_value(), 3);
        let full = GeneratorSpec { flow: FlowPolicy::Fraction(1.0), ..spec.clone() };
        assert_eq!(generate(&full).unwrap().flow_value(), 6);
        let explicit = GeneratorSpec { flow: FlowPolicy::Explicit(5), ..spec.clone() };
        assert_eq!(generate(&explicit).unwrap().flow_value(), 5);
        let too_much = GeneratorSpec { flow: FlowPolicy::Explicit(7), ..spec };
        assert!(matches!(generate(&too_much), Err(GenerateError::FlowUnreachable { requested: 7, .. })));
    }

    #[test]
    fn rejects_bad_specs() {
        let ok = GeneratorSpec::uniform(2, 2, 1, 0);
        for bad in [
            GeneratorSpec { layer_widths: vec![], ..ok.clone() },
            GeneratorSpec { layer_widths: vec![2, 0], ..ok.clone() },
            GeneratorSpec { scenario_count: 0, ..ok.clone() },
            GeneratorSpec { capacity: (3, 1), ..ok.clone() },
            GeneratorSpec { cost: (-1, 1), ..ok.clone() },
            GeneratorSpec { density: 0.0, ..ok.clone() },
            GeneratorSpec { flow: FlowPolicy::Fraction(1.5), ..ok.clone() },
        ] {
            assert!(matches!(generate(&bad), Err(GenerateError::InvalidSpec(_))), "{bad:?}");
        }
    }
}
