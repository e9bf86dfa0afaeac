//! Exact solution of the single-pool reward collection problem through a
//! min-cost flow on the time-expanded graph.
//!
//! Every workspace vertex `i` at step `τ` is split into an entry node `v` and
//! an exit node `w`. Agents pass from `v` to `w` either over an idle arc
//! (cost 0, unbounded) or over a reward arc (cost `-R_τ[i]`, capacity 1), then
//! follow workspace edges to the entry node of the next step.

use std::collections::BTreeMap;

use crate::error::PlanError;
use crate::mcf::{self, Capacity, FlowNetwork};
use crate::model::{RewardTable, WorkspaceGraph};

/// What a network arc stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcRole {
    /// Source to the entry node of a start vertex.
    Start { vertex: usize },
    /// Exit node at the last step to the sink.
    Finish { vertex: usize },
    /// Passing a vertex without collecting.
    Idle { step: usize, vertex: usize },
    /// Collecting the reward at a vertex.
    Collect { step: usize, vertex: usize },
    /// Workspace edge between consecutive steps.
    Move { step: usize, from: usize, to: usize },
}

/// A time-expanded flow network together with the meaning of its arcs.
#[derive(Debug, Clone)]
pub struct HomogeneousNetwork {
    pub network: FlowNetwork,
    pub roles: Vec<ArcRole>,
    pub horizon: usize,
    pub vertex_count: usize,
}

impl HomogeneousNetwork {
    /// Node index of the entry copy of `vertex` at `step`.
    pub fn entry_node(&self, step: usize, vertex: usize) -> usize {
        2 * (step * self.vertex_count + vertex)
    }

    /// Node index of the exit copy of `vertex` at `step`.
    pub fn exit_node(&self, step: usize, vertex: usize) -> usize {
        2 * (step * self.vertex_count + vertex) + 1
    }

    pub fn count_roles(&self, pred: impl Fn(&ArcRole) -> bool) -> usize {
        self.roles.iter().filter(|r| pred(r)).count()
    }
}

/// Optimal single-pool plan.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousSolution {
    /// Agent counts per `(step, from, to)` transition, zero entries omitted.
    pub moves: BTreeMap<(usize, usize, usize), usize>,
    /// Claimed rewards, `claims[step][vertex]`.
    pub claims: Vec<Vec<bool>>,
    pub value: f64,
    /// Total cost of the underlying flow (equals `-value` up to round-off).
    pub flow_cost: f64,
}

impl HomogeneousSolution {
    /// Agent counts per vertex at `step` (`0..=T`).
    pub fn positions(&self, step: usize, vertex_count: usize, start: &[usize]) -> Vec<usize> {
        if step == 0 {
            return start.to_vec();
        }
        let mut counts = vec![0; vertex_count];
        for (&(tau, _, to), &c) in &self.moves {
            if tau + 1 == step {
                counts[to] += c;
            }
        }
        counts
    }
}

fn check_inputs(
    rewards: &RewardTable,
    start: &[usize],
    graph: &WorkspaceGraph,
    horizon: usize,
    pool_size: usize,
) -> Result<(), PlanError> {
    use crate::error::ModelError;
    let n = graph.vertex_count();
    if pool_size == 0 {
        return Err(PlanError::EmptyPool);
    }
    if start.len() != n {
        return Err(ModelError::DimensionMismatch(format!(
            "{} start counts for {n} vertices",
            start.len()
        ))
        .into());
    }
    if rewards.vertex_count() != n || rewards.horizon() != horizon {
        return Err(ModelError::DimensionMismatch(format!(
            "reward table is {}x{}, expected {}x{n}",
            rewards.horizon() + 1,
            rewards.vertex_count(),
            horizon + 1
        ))
        .into());
    }
    let placed: usize = start.iter().sum();
    if placed != pool_size {
        return Err(PlanError::PoolMismatch {
            expected: pool_size,
            found: placed,
        });
    }
    if horizon >= 1 {
        if let Some(v) = (0..n).find(|&v| start[v] > 0 && graph.out_degree(v) == 0) {
            return Err(PlanError::StrandedStart { vertex: v });
        }
    }
    if let Some((step, vertex)) = rewards.find_invalid() {
        return Err(PlanError::InvalidReward { step, vertex });
    }
    Ok(())
}

/// Builds the time-expanded min-cost flow network of a homogeneous problem.
///
/// Node `v` of vertex `i` at step `τ` is `2(τn + i)`, node `w` is one more,
/// the source is `2n(T+1)` and the sink follows it. Arcs are laid out as:
/// start arcs, then per step and vertex the idle arc followed by the reward
/// arc (only for positive rewards), then workspace moves per step in edge
/// order, then finish arcs.
pub fn build_network(
    rewards: &RewardTable,
    start: &[usize],
    graph: &WorkspaceGraph,
    horizon: usize,
    pool_size: usize,
) -> Result<HomogeneousNetwork, PlanError> {
    check_inputs(rewards, start, graph, horizon, pool_size)?;
    let n = graph.vertex_count();
    let source = 2 * n * (horizon + 1);
    let sink = source + 1;
    let mut net = FlowNetwork::new(source + 2, source, sink, pool_size as u64);
    let mut roles = Vec::new();
    let entry = |step: usize, vertex: usize| 2 * (step * n + vertex);
    let exit = |step: usize, vertex: usize| 2 * (step * n + vertex) + 1;

    for (vertex, &count) in start.iter().enumerate() {
        if count > 0 {
            net.add_arc(
                source,
                entry(0, vertex),
                Capacity::Finite(count as u64),
                0.0,
            );
            roles.push(ArcRole::Start { vertex });
        }
    }
    for step in 0..=horizon {
        for vertex in 0..n {
            net.add_arc(
                entry(step, vertex),
                exit(step, vertex),
                Capacity::Unbounded,
                0.0,
            );
            roles.push(ArcRole::Idle { step, vertex });
            let r = rewards.get(step, vertex);
            if r > 0.0 {
                net.add_arc(
                    entry(step, vertex),
                    exit(step, vertex),
                    Capacity::Finite(1),
                    -r,
                );
                roles.push(ArcRole::Collect { step, vertex });
            }
        }
    }
    for step in 0..horizon {
        for &(from, to) in graph.edges() {
            net.add_arc(
                exit(step, from),
                entry(step + 1, to),
                Capacity::Unbounded,
                0.0,
            );
            roles.push(ArcRole::Move { step, from, to });
        }
    }
    for vertex in 0..n {
        net.add_arc(exit(horizon, vertex), sink, Capacity::Unbounded, 0.0);
        roles.push(ArcRole::Finish { vertex });
    }

    Ok(HomogeneousNetwork {
        network: net,
        roles,
        horizon,
        vertex_count: n,
    })
}

/// Reads transitions and claims off an optimal flow.
pub fn decode_flow(
    built: &HomogeneousNetwork,
    rewards: &RewardTable,
    flow: &[u64],
    flow_cost: f64,
) -> HomogeneousSolution {
    let mut moves = BTreeMap::new();
    let mut claims = vec![vec![false; built.vertex_count]; built.horizon + 1];
    let mut value = 0.0;
    for (role, &h) in built.roles.iter().zip(flow) {
        if h == 0 {
            continue;
        }
        match *role {
            ArcRole::Move { step, from, to } => {
                moves.insert((step, from, to), h as usize);
            }
            ArcRole::Collect { step, vertex } => {
                claims[step][vertex] = true;
                value += rewards.get(step, vertex);
            }
            _ => {}
        }
    }
    HomogeneousSolution {
        moves,
        claims,
        value,
        flow_cost,
    }
}

/// Optimal plan for a pool of `pool_size` interchangeable agents starting at
/// `start` and collecting `rewards`.
pub fn solve_homogeneous(
    rewards: &RewardTable,
    start: &[usize],
    graph: &WorkspaceGraph,
    horizon: usize,
    pool_size: usize,
) -> Result<HomogeneousSolution, PlanError> {
    let built = build_network(rewards, start, graph, horizon, pool_size)?;
    let result = mcf::solve_mcf(&built.network)?;
    Ok(decode_flow(
        &built,
        rewards,
        &result.flow,
        result.total_cost,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcf::COST_TOLERANCE;

    fn two_vertex_graph() -> WorkspaceGraph {
        WorkspaceGraph::new(2, vec![(0, 1), (1, 0), (0, 0), (1, 1)]).unwrap()
    }

    #[test]
    fn network_counts_for_two_vertices() {
        let g = two_vertex_graph();
        let mut r = RewardTable::zeros(1, 2);
        r.set(1, 1, 5.0);
        let built = build_network(&r, &[1, 0], &g, 1, 1).unwrap();
        assert_eq!(built.network.node_count, 10);
        assert_eq!(built.count_roles(|r| matches!(r, ArcRole::Start { .. })), 1);
        assert_eq!(
            built.count_roles(|r| matches!(r, ArcRole::Finish { .. })),
            2
        );
        assert_eq!(built.count_roles(|r| matches!(r, ArcRole::Idle { .. })), 4);
        assert_eq!(
            built.count_roles(|r| matches!(r, ArcRole::Collect { .. })),
            1
        );
        assert_eq!(built.count_roles(|r| matches!(r, ArcRole::Move { .. })), 4);
        assert_eq!(built.network.source, 8);
        assert_eq!(built.network.sink, 9);
        assert_eq!(built.entry_node(1, 1), 6);
        assert_eq!(built.exit_node(1, 1), 7);
    }

    #[test]
    fn zero_rewards_give_no_reward_arcs() {
        let g = two_vertex_graph();
        let built = build_network(&RewardTable::zeros(2, 2), &[1, 1], &g, 2, 2).unwrap();
        assert_eq!(
            built.count_roles(|r| matches!(r, ArcRole::Collect { .. })),
            0
        );
    }

    #[test]
    fn single_agent_moves_to_reward() {
        let g = two_vertex_graph();
        let mut r = RewardTable::zeros(1, 2);
        r.set(1, 1, 5.0);
        let sol = solve_homogeneous(&r, &[1, 0], &g, 1, 1).unwrap();
        assert!((sol.value - 5.0).abs() < COST_TOLERANCE);
        assert!((sol.flow_cost + 5.0).abs() < COST_TOLERANCE);
        assert_eq!(sol.moves.get(&(0, 0, 1)), Some(&1));
        assert!(sol.claims[1][1]);
        assert_eq!(sol.positions(1, 2, &[1, 0]), vec![0, 1]);
    }

    #[test]
    fn zero_rewards_yield_zero_value() {
        let g = two_vertex_graph();
        let sol = solve_homogeneous(&RewardTable::zeros(2, 2), &[2, 0], &g, 2, 2).unwrap();
        assert_eq!(sol.value, 0.0);
        assert!(sol.claims.iter().flatten().all(|c| !c));
        let moved: usize = sol
            .moves
            .iter()
            .filter(|(k, _)| k.0 == 1)
            .map(|(_, c)| c)
            .sum();
        assert_eq!(moved, 2);
    }

    #[test]
    fn two_agents_split_between_rewards() {
        // 0 -> {1, 2}, both rewarded at step 1
        let g = WorkspaceGraph::new(3, vec![(0, 1), (0, 2), (1, 1), (2, 2)]).unwrap();
        let mut r = RewardTable::zeros(1, 3);
        r.set(1, 1, 1.0);
        r.set(1, 2, 1.0);
        let sol = solve_homogeneous(&r, &[2, 0, 0], &g, 1, 2).unwrap();
        assert!((sol.value - 2.0).abs() < COST_TOLERANCE);
        assert_eq!(sol.moves.get(&(0, 0, 1)), Some(&1));
        assert_eq!(sol.moves.get(&(0, 0, 2)), Some(&1));
    }

    #[test]
    fn input_errors() {
        let g = two_vertex_graph();
        let r = RewardTable::zeros(1, 2);
        assert_eq!(
            build_network(&r, &[0, 0], &g, 1, 0).unwrap_err(),
            PlanError::EmptyPool
        );
        assert!(matches!(
            build_network(&r, &[1, 0], &g, 1, 2),
            Err(PlanError::PoolMismatch { .. })
        ));
        let sink = WorkspaceGraph::new(2, vec![(0, 1), (1, 1)]).unwrap();
        let stranded = WorkspaceGraph::new(2, vec![(1, 1)]).unwrap();
        assert!(build_network(&r, &[1, 0], &sink, 1, 1).is_ok());
        assert_eq!(
            build_network(&r, &[1, 0], &stranded, 1, 1).unwrap_err(),
            PlanError::StrandedStart { vertex: 0 }
        );
        assert!(matches!(
            build_network(&RewardTable::zeros(2, 2), &[1, 0], &g, 1, 1),
            Err(PlanError::Model(_))
        ));
    }
}
