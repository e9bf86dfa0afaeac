//! Exact solver by exhaustive enumeration of joint agent trajectories.
//!
//! Only usable on small instances: the number of joint trajectories is
//! bounded by `(max out-degree)^(T · Σ a_f)` and the solver refuses to run
//! when that bound exceeds [`SEARCH_LIMIT`].

use rayon::prelude::*;

use crate::error::OracleError;
use crate::model::{reward_breakdown, Assignment, Instance};
use crate::REWARD_TOLERANCE;

/// Largest admissible search-space bound.
pub const SEARCH_LIMIT: f64 = 1e7;

/// Vertices visited by one agent at steps `0..=T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub fleet: usize,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub assignment: Assignment,
    pub trajectories: Vec<Trajectory>,
    pub opt: f64,
    /// Shared part `S*` of `opt`.
    pub shared_part: f64,
    /// Private part `P*` of `opt`.
    pub private_part: f64,
}

/// `(max out-degree)^(T · Σ a_f)`, saturating to infinity.
pub fn search_space_bound(instance: &Instance) -> f64 {
    let exponent = (instance.horizon() as f64) * (instance.total_agents() as f64);
    (instance.graph().max_out_degree() as f64).powf(exponent)
}

/// Builds the assignment that follows `trajectories` and collects every
/// reward it can.
///
/// A shared reward goes to the lowest-index fleet present at its vertex and
/// step; a private reward goes to its fleet whenever one of that fleet's
/// agents is present. Consecutive vertices must be joined by an edge for
/// the result to be feasible.
pub fn assignment_from_trajectories(
    instance: &Instance,
    trajectories: &[Trajectory],
) -> Assignment {
    let n = instance.vertex_count();
    let horizon = instance.horizon();
    let fleets = instance.fleet_count();
    let mut present = vec![vec![vec![false; n]; horizon + 1]; fleets];
    let mut a = Assignment::for_instance(instance);
    for t in trajectories {
        for (step, &v) in t.vertices.iter().enumerate() {
            present[t.fleet][step][v] = true;
        }
        for (step, w) in t.vertices.windows(2).enumerate() {
            a.add_move(t.fleet, step, w[0], w[1], 1);
        }
    }
    let shared = instance.shared_rewards();
    for step in 0..=horizon {
        for j in 0..n {
            if shared.get(step, j) > 0.0 {
                if let Some(f) = (0..fleets).find(|&f| present[f][step][j]) {
                    a.set_shared_claim(f, step, j, true);
                }
            }
            for f in 0..fleets {
                if present[f][step][j] && instance.private_rewards(f).get(step, j) > 0.0 {
                    a.set_private_claim(f, step, j, true);
                }
            }
        }
    }
    a
}

/// Depth-first enumeration state. Depth `d` fixes the move of agent
/// `d / T` at step `d % T`.
struct Search<'a> {
    instance: &'a Instance,
    /// `(fleet, start vertex)` per agent, fleet-major.
    agents: &'a [(usize, usize)],
    out: &'a [Vec<usize>],
    horizon: usize,
    n: usize,
    total: Vec<u32>,
    per_fleet: Vec<u32>,
    choice: Vec<usize>,
    vertex: Vec<usize>,
    value: Vec<f64>,
}

impl<'a> Search<'a> {
    fn new(instance: &'a Instance, agents: &'a [(usize, usize)], out: &'a [Vec<usize>]) -> Self {
        let n = instance.vertex_count();
        let horizon = instance.horizon();
        let depth = agents.len() * horizon;
        let mut s = Self {
            instance,
            agents,
            out,
            horizon,
            n,
            total: vec![0; (horizon + 1) * n],
            per_fleet: vec![0; instance.fleet_count() * (horizon + 1) * n],
            choice: vec![0; depth],
            vertex: vec![0; depth],
            value: vec![0.0; depth + 1],
        };
        let mut base = 0.0;
        for &(f, v) in agents {
            base += s.enter(f, 0, v);
        }
        s.value[0] = base;
        s
    }

    fn enter(&mut self, fleet: usize, step: usize, v: usize) -> f64 {
        let cell = step * self.n + v;
        let fcell = fleet * (self.horizon + 1) * self.n + cell;
        let mut gain = 0.0;
        if self.total[cell] == 0 {
            gain += self.instance.shared_rewards().get(step, v);
        }
        if self.per_fleet[fcell] == 0 {
            gain += self.instance.private_rewards(fleet).get(step, v);
        }
        self.total[cell] += 1;
        self.per_fleet[fcell] += 1;
        gain
    }

    fn leave(&mut self, fleet: usize, step: usize, v: usize) {
        let cell = step * self.n + v;
        self.total[cell] -= 1;
        self.per_fleet[fleet * (self.horizon + 1) * self.n + cell] -= 1;
    }

    fn current(&self, d: usize) -> usize {
        if d % self.horizon == 0 {
            self.agents[d / self.horizon].1
        } else {
            self.vertex[d - 1]
        }
    }

    fn push(&mut self, d: usize) {
        let v = self.out[self.current(d)][self.choice[d]];
        self.vertex[d] = v;
        let fleet = self.agents[d / self.horizon].0;
        let gain = self.enter(fleet, d % self.horizon + 1, v);
        self.value[d + 1] = self.value[d] + gain;
    }

    fn pop(&mut self, d: usize) {
        let fleet = self.agents[d / self.horizon].0;
        self.leave(fleet, d % self.horizon + 1, self.vertex[d]);
    }

    /// Explores every completion of the moves fixed below depth `lo` and
    /// returns the first best leaf in lexicographic order.
    fn run(&mut self, lo: usize) -> (f64, Vec<usize>) {
        let depth = self.choice.len();
        let mut best = (f64::NEG_INFINITY, Vec::new());
        let mut d = lo;
        if d < depth {
            self.choice[d] = 0;
        }
        loop {
            if d == depth {
                if self.value[d] > best.0 + REWARD_TOLERANCE {
                    best = (self.value[d], self.vertex.clone());
                }
            } else if self.choice[d] < self.out[self.current(d)].len() {
                self.push(d);
                d += 1;
                if d < depth {
                    self.choice[d] = 0;
                }
                continue;
            }
            if d == lo {
                break;
            }
            d -= 1;
            self.pop(d);
            self.choice[d] += 1;
        }
        best
    }
}

/// Finds an optimal assignment by enumerating every joint trajectory.
///
/// Ties are broken towards the lexicographically smallest sequence of
/// per-agent move choices (agents in fleet order, each agent's moves in step
/// order, choices in the order of the graph's out-edges).
pub fn exact_solve(instance: &Instance) -> Result<OracleResult, OracleError> {
    let bound = search_space_bound(instance);
    if !(bound <= SEARCH_LIMIT) {
        return Err(OracleError::SearchSpaceTooLarge {
            bound,
            limit: SEARCH_LIMIT,
        });
    }
    let graph = instance.graph();
    let out: Vec<Vec<usize>> = (0..graph.vertex_count())
        .map(|v| graph.out_neighbors(v).collect())
        .collect();
    let mut agents = Vec::with_capacity(instance.total_agents());
    for f in 0..instance.fleet_count() {
        for (v, &count) in instance.initial_positions(f).iter().enumerate() {
            agents.extend(std::iter::repeat((f, v)).take(count));
        }
    }

    let first = out[agents[0].1].len();
    let subtrees: Vec<(f64, Vec<usize>)> = (0..first)
        .into_par_iter()
        .map(|c| {
            let mut search = Search::new(instance, &agents, &out);
            search.choice[0] = c;
            search.push(0);
            search.run(1)
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for sub in subtrees {
        if sub.0 > best.0 + REWARD_TOLERANCE {
            best = sub;
        }
    }

    let horizon = instance.horizon();
    let trajectories: Vec<Trajectory> = agents
        .iter()
        .enumerate()
        .map(|(k, &(fleet, start))| {
            let mut vertices = Vec::with_capacity(horizon + 1);
            vertices.push(start);
            vertices.extend_from_slice(&best.1[k * horizon..(k + 1) * horizon]);
            Trajectory { fleet, vertices }
        })
        .collect();
    let assignment = assignment_from_trajectories(instance, &trajectories);
    let parts =
        reward_breakdown(&assignment, instance).expect("assignment built for this instance");
    Ok(OracleResult {
        assignment,
        trajectories,
        opt: parts.total(),
        shared_part: parts.shared,
        private_part: parts.private,
    })
}
