#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rmcif::harness::{generate, FlowPolicy, GeneratorSpec};
use rmcif::model::{Arc, Instance, IntegerFlow, Network, ScenarioSet};
use rmcif::procedures::{find_flow, max_flow_value, perturb};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random split of `total` interior vertices into layers.
pub fn random_widths(rng: &mut ChaCha8Rng, total: usize) -> Vec<usize> {
    let mut widths = Vec::new();
    let mut left = total;
    while left > 0 {
        let w = rng.gen_range(1..=left.min(3));
        widths.push(w);
        left -= w;
    }
    widths
}

/// Small layered instance with at most `max_vertices` vertices.
pub fn small_layered(seed: u64, max_vertices: usize, cap_hi: i64, k_hi: usize, flow: FlowPolicy) -> Instance {
    let mut r = rng(seed);
    let interior = r.gen_range(1..=max_vertices - 2);
    let spec = GeneratorSpec {
        layer_widths: random_widths(&mut r, interior),
        scenario_count: r.gen_range(1..=k_hi),
        capacity: (1, cap_hi),
        cost: (0, 20),
        density: r.gen_range(0.3..=1.0),
        flow,
        seed,
    };
    generate(&spec).expect("small spec is valid")
}

/// Random digraph, cycles allowed, source 0 and sink n-1.
pub fn random_digraph(seed: u64, n: usize, arc_count: usize, cap_hi: i64, k: usize) -> Instance {
    let mut r = rng(seed);
    let mut pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|t| (0..n).map(move |h| (t, h))).filter(|(t, h)| t != h).collect();
    pairs.shuffle(&mut r);
    pairs.truncate(arc_count);
    let arcs: Vec<Arc> =
        pairs.iter().map(|&(tail, head)| Arc { tail, head, capacity: r.gen_range(0..=cap_hi) }).collect();
    let m = arcs.len();
    let network = Network::new(n, arcs).unwrap();
    let max = max_flow_value(&network);
    let f = if max == 0 { 0 } else { r.gen_range(0..=max) };
    let costs = (0..k).map(|_| (0..m).map(|_| r.gen_range(0..=15)).collect()).collect();
    Instance::new(network, ScenarioSet::new(costs, m).unwrap(), f).unwrap()
}

/// A feasible flow of value `F`, randomized by a few perturbations.
pub fn random_flow(instance: &Instance, rng: &mut ChaCha8Rng) -> IntegerFlow {
    let net = instance.network();
    let mut flow = find_flow(net, instance.flow_value()).unwrap();
    for _ in 0..rng.gen_range(0..6) {
        flow = perturb(net, &flow, rng);
    }
    flow
}

/// Prints the criterion line, bypassing output capture, and fails the test
/// unless it passed.
pub fn report(id: u32, passed: bool, detail: &str) {
    let line = format!("{} criterion {id}: {detail}\n", if passed { "PASS" } else { "FAIL" });
    let _ = std::io::Write::write_all(&mut std::io::stdout().lock(), line.as_bytes());
    assert!(passed, "criterion {id} failed: {detail}");
}

pub fn info(line: &str) {
    let _ = std::io::Write::write_all(&mut std::io::stdout().lock(), format!("{line}\n").as_bytes());
}
