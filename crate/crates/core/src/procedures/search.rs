//! Graph searches on displacement networks: fewest-arc paths, shortest paths,
//! negative cycles and arbitrary cycles.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;

use super::residual::{Cycle, ResidualArc, ResidualNetwork};

/// Moore's BFS: a source-to-target path with the fewest arcs, as residual arc
/// indices. Ties go to the lowest arc index.
pub fn bfs_path(residual: &ResidualNetwork, from: usize, to: usize) -> Option<Vec<usize>> {
    let n = residual.vertex_count();
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &r in residual.out(v) {
            let w = residual.arc(r).to;
            if !seen[w] {
                seen[w] = true;
                pred[w] = Some(r);
                queue.push_back(w);
            }
        }
    }
    if !seen[to] {
        return None;
    }
    Some(walk_back(residual, &pred, from, to))
}

fn walk_back(residual: &ResidualNetwork, pred: &[Option<usize>], from: usize, to: usize) -> Vec<usize> {
    let mut path = Vec::new();
    let mut at = to;
    while at != from {
        let r = pred[at].expect("predecessor chain reaches the start");
        path.push(r);
        at = residual.arc(r).from;
    }
    path.reverse();
    path
}

/// Bellman-Ford shortest path under `costs`. Assumes the residual network
/// has no negative cycle reachable from `from`.
pub fn shortest_path(residual: &ResidualNetwork, costs: &[i64], from: usize, to: usize) -> Option<Vec<usize>> {
    let n = residual.vertex_count();
    let mut dist: Vec<Option<i64>> = vec![None; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    dist[from] = Some(0);
    for _ in 0..n {
        let mut changed = false;
        for (r, arc) in residual.arcs().iter().enumerate() {
            let Some(d) = dist[arc.from] else { continue };
            let nd = d + arc.cost(costs);
            if dist[arc.to].is_none_or(|old| nd < old) {
                dist[arc.to] = Some(nd);
                pred[arc.to] = Some(r);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    dist[to]?;
    Some(walk_back(residual, &pred, from, to))
}

/// Negative-cost cycle by Bellman-Ford from a virtual super-source, extracted
/// by walking the predecessor chain of the last relaxed vertex.
pub fn negative_cycle(residual: &ResidualNetwork, costs: &[i64]) -> Option<Cycle> {
    let n = residual.vertex_count();
    let mut dist = vec![0i64; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut last = None;
    for _ in 0..n {
        last = None;
        for (r, arc) in residual.arcs().iter().enumerate() {
            let nd = dist[arc.from] + arc.cost(costs);
            if nd < dist[arc.to] {
                dist[arc.to] = nd;
                pred[arc.to] = Some(r);
                last = Some(arc.to);
            }
        }
        last?;
    }
    // Still relaxing after n rounds: some predecessor chain closes a cycle.
    let mut v = last?;
    for _ in 0..n {
        v = residual.arc(pred[v].expect("relaxed vertex has a predecessor")).from;
    }
    let start = v;
    let mut arcs = Vec::new();
    loop {
        let r = pred[v].expect("cycle vertices have predecessors");
        arcs.push(*residual.arc(r));
        v = residual.arc(r).from;
        if v == start {
            break;
        }
    }
    arcs.reverse();
    let cycle = Cycle::new(arcs);
    debug_assert!(cycle.cost(costs) < 0);
    Some(cycle)
}

/// Floyd-Warshall negative-cycle search. Slower than [`negative_cycle`]; kept
/// as an independent check.
pub fn negative_cycle_floyd_warshall(residual: &ResidualNetwork, costs: &[i64]) -> Option<Cycle> {
    let n = residual.vertex_count();
    // cheapest residual arc per ordered vertex pair
    let mut best: Vec<Option<usize>> = vec![None; n * n];
    for (r, arc) in residual.arcs().iter().enumerate() {
        let slot = &mut best[arc.from * n + arc.to];
        if slot.is_none_or(|old| arc.cost(costs) < residual.arc(old).cost(costs)) {
            *slot = Some(r);
        }
    }
    let mut dist: Vec<Option<i64>> = vec![None; n * n];
    let mut next: Vec<usize> = vec![usize::MAX; n * n];
    for i in 0..n {
        dist[i * n + i] = Some(0);
        next[i * n + i] = i;
    }
    for (idx, slot) in best.iter().enumerate() {
        if let Some(r) = slot {
            let c = residual.arc(*r).cost(costs);
            if dist[idx].is_none_or(|d| c < d) {
                dist[idx] = Some(c);
                next[idx] = idx % n;
            }
        }
    }
    for k in 0..n {
        // A negative i -> k -> i walk whose legs use only vertices below k;
        // both legs are simple because no negative cycle exists among those.
        let closing = (0..n).find(|&i| match (dist[i * n + k], dist[k * n + i]) {
            (Some(a), Some(b)) => i != k && a + b < 0,
            _ => false,
        });
        if let Some(i) = closing {
            let mut walk = vec![i];
            let mut at = i;
            while at != k {
                at = next[at * n + k];
                walk.push(at);
            }
            while at != i {
                at = next[at * n + i];
                walk.push(at);
            }
            return split_negative_cycle(residual, costs, &best, n, &walk);
        }
        for i in 0..n {
            let Some(dik) = dist[i * n + k] else { continue };
            for j in 0..n {
                let Some(dkj) = dist[k * n + j] else { continue };
                let through = dik + dkj;
                if dist[i * n + j].is_none_or(|d| through < d) {
                    dist[i * n + j] = Some(through);
                    next[i * n + j] = next[i * n + k];
                }
            }
        }
    }
    None
}

/// Splits a closed vertex walk into simple cycles and returns a negative one.
fn split_negative_cycle(
    residual: &ResidualNetwork,
    costs: &[i64],
    best: &[Option<usize>],
    n: usize,
    walk: &[usize],
) -> Option<Cycle> {
    let mut stack: Vec<usize> = Vec::new();
    let mut position = vec![usize::MAX; n];
    for &v in walk {
        if position[v] != usize::MAX {
            let start = position[v];
            let mut verts: Vec<usize> = stack[start..].to_vec();
            verts.push(v);
            let arcs: Vec<ResidualArc> = verts
                .windows(2)
                .map(|w| *residual.arc(best[w[0] * n + w[1]].expect("walk follows residual arcs")))
                .collect();
            for &u in &stack[start + 1..] {
                position[u] = usize::MAX;
            }
            stack.truncate(start + 1);
            if !arcs.is_empty() {
                let cycle = Cycle::new(arcs);
                if cycle.cost(costs) < 0 {
                    return Some(cycle);
                }
            }
        } else {
            position[v] = stack.len();
            stack.push(v);
        }
    }
    None
}

/// An arbitrary cycle found by randomized backtracking DFS. A residual arc
/// and its own reverse never form a cycle together, since pushing around
/// such a pair would not change the flow.
pub fn random_cycle<R: Rng + ?Sized>(residual: &ResidualNetwork, rng: &mut R) -> Option<Cycle> {
    let mut order: Vec<usize> = (0..residual.arcs().len()).collect();
    order.shuffle(rng);
    let n = residual.vertex_count();
    for e in order {
        let closing = *residual.arc(e);
        // find closing.to ~> closing.from avoiding the twin of `closing`
        let mut seen = vec![false; n];
        let mut pred: Vec<Option<usize>> = vec![None; n];
        let mut stack: Vec<(usize, Vec<usize>)> = Vec::new();
        let start = closing.to;
        let goal = closing.from;
        seen[start] = true;
        stack.push((start, shuffled(residual.out(start), rng)));
        let mut found = false;
        while let Some((_, pending)) = stack.last_mut() {
            let Some(r) = pending.pop() else {
                stack.pop();
                continue;
            };
            let arc = residual.arc(r);
            if arc.arc == closing.arc || seen[arc.to] {
                continue;
            }
            seen[arc.to] = true;
            pred[arc.to] = Some(r);
            if arc.to == goal {
                found = true;
                break;
            }
            let next = shuffled(residual.out(arc.to), rng);
            stack.push((arc.to, next));
        }
        if found {
            let mut arcs: Vec<ResidualArc> =
                walk_back(residual, &pred, start, goal).into_iter().map(|r| *residual.arc(r)).collect();
            arcs.push(closing);
            return Some(Cycle::new(arcs));
        }
    }
    None
}

fn shuffled<R: Rng + ?Sized>(items: &[usize], rng: &mut R) -> Vec<usize> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::{Arc, Network};
    use crate::procedures::residual::Direction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bfs_prefers_lowest_arc_index() {
        let inst = diamond();
        let res = ResidualNetwork::new(inst.network(), &IntegerFlow::zero(4));
        let path = bfs_path(&res, 0, 3).unwrap();
        let arcs: Vec<_> = path.iter().map(|&r| res.arc(r).arc).collect();
        assert_eq!(arcs, vec![0, 2]);
    }

    use crate::model::IntegerFlow;

    #[test]
    fn diamond_negative_cycle_under_scenario_one() {
        let inst = diamond();
        let costs = inst.scenarios().costs(0);
        let res = ResidualNetwork::new(inst.network(), &flow(&[0, 1, 0, 1]));
        let c = negative_cycle(&res, costs).unwrap();
        assert_eq!(c.cost(costs), -2);
        assert_eq!(c.bottleneck(), 1);
        let fw = negative_cycle_floyd_warshall(&res, costs).unwrap();
        assert_eq!(fw.cost(costs), -2);

        let res = ResidualNetwork::new(inst.network(), &flow(&[1, 0, 1, 0]));
        assert!(negative_cycle(&res, costs).is_none());
        assert!(negative_cycle_floyd_warshall(&res, costs).is_none());
    }

    #[test]
    fn random_cycle_skips_twin_pairs() {
        // a single arc with 0 < x < u has both residual directions
        let net = Network::new(2, vec![Arc { tail: 0, head: 1, capacity: 2 }]).unwrap();
        let res = ResidualNetwork::new(&net, &flow(&[1]));
        assert_eq!(res.arcs().len(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(random_cycle(&res, &mut rng).is_none());
    }

    #[test]
    fn random_cycle_accepts_antiparallel_arcs() {
        let net = Network::new(2, vec![Arc { tail: 0, head: 1, capacity: 1 }, Arc { tail: 1, head: 0, capacity: 1 }])
            .unwrap();
        let res = ResidualNetwork::new(&net, &IntegerFlow::zero(2));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = random_cycle(&res, &mut rng).unwrap();
        assert_eq!(c.arcs().len(), 2);
        assert!(c.arcs().iter().all(|a| a.direction == Direction::Forward));
    }

    #[test]
    fn random_cycle_finds_the_diamond_swap() {
        let inst = diamond();
        let res = ResidualNetwork::new(inst.network(), &flow(&[1, 0, 1, 0]));
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_cycle(&res, &mut rng).unwrap();
            assert_eq!(c.arcs().len(), 4);
        }
        let saturated = ResidualNetwork::new(inst.network(), &flow(&[1, 1, 1, 1]));
        assert!(random_cycle(&saturated, &mut ChaCha8Rng::seed_from_u64(0)).is_none());
    }
}
