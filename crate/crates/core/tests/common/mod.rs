#![allow(dead_code)]

use flowdec_core::{Instance, RewardTable, WorkspaceGraph};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const TOL: f64 = 1e-9;

/// Size limits for random instances.
#[derive(Clone, Copy)]
pub struct Limits {
    pub max_vertices: usize,
    pub max_horizon: usize,
    pub max_fleets: usize,
    pub max_fleet_size: usize,
    /// Cap on `T · Σ a_f` so brute force stays cheap.
    pub max_moves: usize,
}

pub const SMALL: Limits = Limits {
    max_vertices: 4,
    max_horizon: 3,
    max_fleets: 3,
    max_fleet_size: 2,
    max_moves: 7,
};

/// Random graph on `n` vertices where every vertex has an out-edge.
pub fn random_graph(rng: &mut StdRng, n: usize) -> WorkspaceGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(0.4) {
                edges.push((i, j));
            }
        }
        if !edges.iter().any(|&(a, _)| a == i) {
            edges.push((i, rng.gen_range(0..n)));
        }
    }
    WorkspaceGraph::new(n, edges).unwrap()
}

/// Sparse random rewards with a mix of integers and awkward fractions.
pub fn random_table(rng: &mut StdRng, horizon: usize, n: usize) -> RewardTable {
    let mut t = RewardTable::zeros(horizon, n);
    for step in 0..=horizon {
        for v in 0..n {
            if rng.gen_bool(0.45) {
                let r = match rng.gen_range(0..3) {
                    0 => rng.gen_range(1..4) as f64,
                    1 => rng.gen_range(1..7) as f64 / 3.0,
                    _ => rng.gen_range(0.01..5.0),
                };
                t.set(step, v, r);
            }
        }
    }
    t
}

pub fn random_positions(rng: &mut StdRng, n: usize, count: usize) -> Vec<usize> {
    let mut p = vec![0; n];
    for _ in 0..count {
        p[rng.gen_range(0..n)] += 1;
    }
    p
}

pub fn random_instance(seed: u64, limits: Limits) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.gen_range(1..=limits.max_vertices);
    let graph = random_graph(&mut rng, n);
    let horizon = rng.gen_range(1..=limits.max_horizon);
    let max_agents = (limits.max_moves / horizon).max(1);
    let fleets = rng.gen_range(1..=limits.max_fleets.min(max_agents));
    let mut sizes = vec![1; fleets];
    let mut spare = max_agents - fleets;
    for s in sizes.iter_mut() {
        let extra = rng.gen_range(0..=spare.min(limits.max_fleet_size - 1));
        *s += extra;
        spare -= extra;
    }
    let p0 = sizes
        .iter()
        .map(|&a| random_positions(&mut rng, n, a))
        .collect();
    let rewards = (0..=fleets)
        .map(|_| random_table(&mut rng, horizon, n))
        .collect();
    Instance::new(graph, horizon, sizes, p0, rewards).unwrap()
}

/// Every walk with `horizon` moves from `start`.
pub fn walks(graph: &WorkspaceGraph, start: usize, horizon: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![start]];
    for _ in 0..horizon {
        out = out
            .into_iter()
            .flat_map(|w| {
                let last = *w.last().unwrap();
                graph.out_neighbors(last).map(move |v| {
                    let mut next = w.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out
}

/// Reward of agents following `paths` (fleet, vertices): each shared reward
/// counts once if anyone is there, each private reward once if its fleet is.
pub fn joint_reward(instance: &Instance, paths: &[(usize, &Vec<usize>)]) -> (f64, f64) {
    let (mut shared, mut private) = (0.0, 0.0);
    for step in 0..=instance.horizon() {
        for v in 0..instance.vertex_count() {
            if paths.iter().any(|(_, p)| p[step] == v) {
                shared += instance.shared_rewards().get(step, v);
            }
            for f in 0..instance.fleet_count() {
                if paths.iter().any(|&(g, p)| g == f && p[step] == v) {
                    private += instance.private_rewards(f).get(step, v);
                }
            }
        }
    }
    (shared, private)
}

/// Optimum by enumerating the product of all agents' walks.
pub fn brute_force_opt(instance: &Instance) -> f64 {
    let mut agents = Vec::new();
    for f in 0..instance.fleet_count() {
        for (v, &c) in instance.initial_positions(f).iter().enumerate() {
            for _ in 0..c {
                agents.push((f, walks(instance.graph(), v, instance.horizon())));
            }
        }
    }
    fn rec<'a>(
        instance: &Instance,
        agents: &'a [(usize, Vec<Vec<usize>>)],
        chosen: &mut Vec<(usize, &'a Vec<usize>)>,
        best: &mut f64,
    ) {
        if chosen.len() == agents.len() {
            let (s, p) = joint_reward(instance, chosen);
            *best = best.max(s + p);
            return;
        }
        let (f, options) = &agents[chosen.len()];
        for w in options {
            chosen.push((*f, w));
            rec(instance, agents, chosen, best);
            chosen.pop();
        }
    }
    let mut best = f64::NEG_INFINITY;
    rec(instance, &agents, &mut Vec::new(), &mut best);
    best
}

/// Single-pool optimum by enumerating the walks of every agent.
pub fn brute_force_homogeneous(
    rewards: &RewardTable,
    start: &[usize],
    graph: &WorkspaceGraph,
    horizon: usize,
) -> f64 {
    let mut options = Vec::new();
    for (v, &c) in start.iter().enumerate() {
        for _ in 0..c {
            options.push(walks(graph, v, horizon));
        }
    }
    fn rec(
        rewards: &RewardTable,
        options: &[Vec<Vec<usize>>],
        chosen: &mut Vec<usize>,
        best: &mut f64,
    ) {
        if chosen.len() == options.len() {
            let mut seen = std::collections::BTreeSet::new();
            let mut value = 0.0;
            for (k, &w) in chosen.iter().enumerate() {
                for (step, &v) in options[k][w].iter().enumerate() {
                    if seen.insert((step, v)) {
                        value += rewards.get(step, v);
                    }
                }
            }
            *best = best.max(value);
            return;
        }
        for w in 0..options[chosen.len()].len() {
            chosen.push(w);
            rec(rewards, options, chosen, best);
            chosen.pop();
        }
    }
    let mut best = f64::NEG_INFINITY;
    rec(rewards, &options, &mut Vec::new(), &mut best);
    best
}
