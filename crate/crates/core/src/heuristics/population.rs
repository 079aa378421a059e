use rand::seq::index::sample;
use rand::Rng;

use crate::model::IntegerFlow;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub flow: IntegerFlow,
    pub cost: i64,
}

/// Fixed-size population of evaluated flows.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Population {
    members: Vec<Member>,
}

impl Population {
    pub fn new(members: Vec<Member>) -> Self {
        Self { members }
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn push(&mut self, member: Member) {
        self.members.push(member);
    }

    pub fn replace(&mut self, index: usize, member: Member) {
        self.members[index] = member;
    }

    /// Index of the lowest cost, lowest index on ties.
    pub fn best_index(&self) -> usize {
        self.members
            .iter()
            .enumerate()
            .min_by_key(|(i, m)| (m.cost, *i))
            .map(|(i, _)| i)
            .expect("population is not empty")
    }

    pub fn best(&self) -> &Member {
        &self.members[self.best_index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TournamentMode {
    Best,
    Worst,
}

/// Samples `sample_size` distinct members (other than `exclude`) uniformly
/// and returns the best or worst of them; ties go to the lower index.
/// Returns `None` only if no member is eligible.
pub fn tournament_select<R: Rng + ?Sized>(
    population: &Population,
    mode: TournamentMode,
    sample_size: usize,
    exclude: Option<usize>,
    rng: &mut R,
) -> Option<usize> {
    let eligible: Vec<usize> = (0..population.len()).filter(|&i| Some(i) != exclude).collect();
    if eligible.is_empty() {
        return None;
    }
    let amount = sample_size.clamp(1, eligible.len());
    let picked = sample(rng, eligible.len(), amount).into_iter().map(|j| eligible[j]);
    let cost = |i: usize| population.members[i].cost;
    match mode {
        TournamentMode::Best => picked.min_by_key(|&i| (cost(i), i)),
        TournamentMode::Worst => picked.max_by_key(|&i| (cost(i), std::cmp::Reverse(i))),
    }
}

/// What [`insert_child`] did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insertion {
    /// The child replaced its worse twin at this index.
    ReplacedTwin(usize),
    /// A twin at this index was at least as good; the child was dropped.
    Rejected(usize),
    /// No twin; the child replaced the tournament-worst member at this index.
    Admitted(usize),
}

/// Two costs are twins when their difference is at most `threshold` percent
/// of `best`. With `best == 0` only equal costs are twins.
fn similar(a: i64, b: i64, best: i64, threshold: u32) -> bool {
    (a - b).abs() as i128 * 100 <= threshold as i128 * best as i128
}

/// Inserts an evaluated child keeping the population size. The current best
/// member is never discarded in favor of a child that is not strictly
/// better.
pub fn insert_child<R: Rng + ?Sized>(
    population: &mut Population,
    child: Member,
    similarity_threshold: u32,
    tournament_size: usize,
    rng: &mut R,
) -> Insertion {
    let best_index = population.best_index();
    let best = population.members[best_index].cost;
    let twin = population
        .members
        .iter()
        .enumerate()
        .filter(|(_, m)| similar(m.cost, child.cost, best, similarity_threshold))
        .min_by_key(|(i, m)| ((m.cost - child.cost).abs(), *i))
        .map(|(i, _)| i);
    if let Some(i) = twin {
        if child.cost < population.members[i].cost {
            population.members[i] = child;
            return Insertion::ReplacedTwin(i);
        }
        return Insertion::Rejected(i);
    }
    match tournament_select(population, TournamentMode::Worst, tournament_size, Some(best_index), rng) {
        Some(i) => {
            population.members[i] = child;
            Insertion::Admitted(i)
        }
        // a single-member population only ever holds its best
        None if child.cost < best => {
            population.members[best_index] = child;
            Insertion::ReplacedTwin(best_index)
        }
        None => Insertion::Rejected(best_index),
    }
}
