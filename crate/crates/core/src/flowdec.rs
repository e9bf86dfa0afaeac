//! Decomposition of the heterogeneous problem into homogeneous min-cost flow
//! subproblems.
//!
//! [`private_first`] solves every fleet on its private rewards plus an equal
//! share of the shared rewards, then keeps one claimant per shared reward.
//! [`shared_first`] solves the shared rewards for the pooled agents first,
//! credits each claimed shared reward to one fleet, and re-solves every fleet
//! on its private rewards plus the shared rewards it was credited with.
//! [`flowdec`] runs both and keeps the better plan, which is within
//! `F / (2F - 1)` of the optimum.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::error::PlanError;
use crate::homogeneous::{self, ArcRole, HomogeneousSolution};
use crate::mcf;
use crate::model::{total_reward, Assignment, Instance, RewardTable};
use crate::REWARD_TOLERANCE;

/// Which planner to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Planner {
    FlowDec,
    PrivateFirst,
    SharedFirst,
}

impl Planner {
    pub fn name(&self) -> &'static str {
        match self {
            Planner::FlowDec => "flowdec",
            Planner::PrivateFirst => "private-first",
            Planner::SharedFirst => "shared-first",
        }
    }

    pub fn plan(&self, instance: &Instance) -> Result<Assignment, PlanError> {
        match self {
            Planner::FlowDec => flowdec(instance),
            Planner::PrivateFirst => private_first(instance),
            Planner::SharedFirst => shared_first(instance),
        }
    }
}

impl std::str::FromStr for Planner {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "flowdec" => Ok(Planner::FlowDec),
            "private-first" | "private_first" => Ok(Planner::PrivateFirst),
            "shared-first" | "shared_first" => Ok(Planner::SharedFirst),
            other => Err(format!("unknown planner {other:?}")),
        }
    }
}

/// Credit for shared rewards collected in the pooled stage of
/// [`shared_first`]: `credited[f][τ][i]` is set for at most one fleet.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetAttribution {
    credited: Vec<Vec<Vec<bool>>>,
}

impl FleetAttribution {
    pub fn is_credited(&self, fleet: usize, step: usize, vertex: usize) -> bool {
        self.credited[fleet][step][vertex]
    }

    /// Number of shared rewards credited to `fleet`.
    pub fn credited_count(&self, fleet: usize) -> usize {
        self.credited[fleet]
            .iter()
            .flatten()
            .filter(|&&c| c)
            .count()
    }

    /// `R^f + R^0` restricted to the rewards credited to `fleet`.
    pub fn combined_rewards(&self, instance: &Instance, fleet: usize) -> RewardTable {
        let shared = instance.shared_rewards();
        let mut table = instance.private_rewards(fleet).clone();
        for (step, row) in self.credited[fleet].iter().enumerate() {
            for (vertex, _) in row.iter().enumerate().filter(|(_, &c)| c) {
                let v = table.get(step, vertex) + shared.get(step, vertex);
                table.set(step, vertex, v);
            }
        }
        table
    }
}

fn solve_fleets<F>(
    instance: &Instance,
    rewards_for: F,
) -> Result<Vec<HomogeneousSolution>, PlanError>
where
    F: Fn(usize) -> RewardTable + Sync,
{
    (0..instance.fleet_count())
        .into_par_iter()
        .map(|f| {
            homogeneous::solve_homogeneous(
                &rewards_for(f),
                instance.initial_positions(f),
                instance.graph(),
                instance.horizon(),
                instance.fleet_size(f),
            )
        })
        .collect()
}

/// Copies each fleet's transitions and claims into `z`.
fn assemble(instance: &Instance, solutions: &[HomogeneousSolution]) -> Assignment {
    let mut a = Assignment::for_instance(instance);
    for (f, sol) in solutions.iter().enumerate() {
        for (&(step, from, to), &count) in &sol.moves {
            a.add_move(f, step, from, to, count);
        }
        for (step, row) in sol.claims.iter().enumerate() {
            for (vertex, &claimed) in row.iter().enumerate() {
                if claimed {
                    a.set_private_claim(f, step, vertex, true);
                }
            }
        }
    }
    a
}

/// Plans every fleet against `R^f + R^0 / F` and resolves shared claims by
/// fleet order.
///
/// For every positive shared reward, the first fleet (by index) whose plan
/// claims that vertex and step is credited. Shared rewards no fleet claims
/// stay uncollected.
pub fn private_first(instance: &Instance) -> Result<Assignment, PlanError> {
    let share = 1.0 / instance.fleet_count() as f64;
    let shared = instance.shared_rewards();
    let solutions = solve_fleets(instance, |f| {
        instance.private_rewards(f).add_scaled(shared, share)
    })?;
    let mut a = assemble(instance, &solutions);
    for step in 0..=instance.horizon() {
        for vertex in 0..instance.vertex_count() {
            if shared.get(step, vertex) <= 0.0 {
                continue;
            }
            if let Some(f) = solutions.iter().position(|s| s.claims[step][vertex]) {
                a.set_shared_claim(f, step, vertex, true);
            }
        }
    }
    Ok(a)
}

/// Result of the pooled stage of [`shared_first`].
#[derive(Debug, Clone)]
pub struct PooledStage {
    pub solution: HomogeneousSolution,
    pub attribution: FleetAttribution,
}

/// Solves the shared rewards for all agents together and credits every
/// collected reward to the fleet of the agent that collected it.
///
/// The pooled flow forgets which fleet an agent belongs to, so it is split
/// into unit paths and the paths leaving each start vertex are handed to
/// fleets in ascending index, `p0[f][i]` paths per fleet.
pub fn pooled_shared_stage(instance: &Instance) -> Result<PooledStage, PlanError> {
    let pooled_start = instance.pooled_initial_positions();
    let built = homogeneous::build_network(
        instance.shared_rewards(),
        &pooled_start,
        instance.graph(),
        instance.horizon(),
        instance.total_agents(),
    )?;
    let result = mcf::solve_mcf(&built.network)?;
    let paths = mcf::decompose_paths(&built.network, &result)?;

    let mut owners: Vec<VecDeque<usize>> = (0..instance.vertex_count())
        .map(|v| {
            (0..instance.fleet_count())
                .flat_map(|f| std::iter::repeat(f).take(instance.initial_positions(f)[v]))
                .collect()
        })
        .collect();
    let mut credited = vec![
        vec![vec![false; instance.vertex_count()]; instance.horizon() + 1];
        instance.fleet_count()
    ];
    for path in &paths {
        let ArcRole::Start { vertex } = built.roles[path[0]] else {
            return Err(mcf_inconsistent(
                "pooled path does not begin at a start arc",
            ));
        };
        let Some(fleet) = owners[vertex].pop_front() else {
            return Err(mcf_inconsistent(
                "more pooled paths than agents at a start vertex",
            ));
        };
        for &k in path {
            if let ArcRole::Collect { step, vertex } = built.roles[k] {
                credited[fleet][step][vertex] = true;
            }
        }
    }

    let solution = homogeneous::decode_flow(
        &built,
        instance.shared_rewards(),
        &result.flow,
        result.total_cost,
    );
    Ok(PooledStage {
        solution,
        attribution: FleetAttribution { credited },
    })
}

fn mcf_inconsistent(msg: &str) -> PlanError {
    PlanError::Mcf(crate::error::McfError::InconsistentFlow(msg.to_string()))
}

/// Plans the shared rewards for the pooled agents, then re-plans every
/// fleet on its private rewards plus the shared rewards credited to it.
///
/// A shared reward is claimed by fleet `f` only when it was credited to `f`
/// and `f`'s final plan collects it, so no shared reward is counted twice.
pub fn shared_first(instance: &Instance) -> Result<Assignment, PlanError> {
    let stage = pooled_shared_stage(instance)?;
    let attribution = &stage.attribution;
    let solutions = solve_fleets(instance, |f| attribution.combined_rewards(instance, f))?;
    let mut a = assemble(instance, &solutions);
    for (f, sol) in solutions.iter().enumerate() {
        for (step, row) in sol.claims.iter().enumerate() {
            for (vertex, &claimed) in row.iter().enumerate() {
                if claimed && attribution.is_credited(f, step, vertex) {
                    a.set_shared_claim(f, step, vertex, true);
                }
            }
        }
    }
    Ok(a)
}

/// Which subroutine produced the plan returned by [`flowdec_detailed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selected {
    PrivateFirst,
    SharedFirst,
}

#[derive(Debug, Clone)]
pub struct FlowDecOutcome {
    pub assignment: Assignment,
    pub value: f64,
    pub private_first_value: f64,
    pub shared_first_value: f64,
    pub selected: Selected,
}

/// Runs both subroutines and keeps the one with the larger objective.
/// The shared-first plan wins unless the private-first plan is better by
/// more than [`REWARD_TOLERANCE`].
pub fn flowdec_detailed(instance: &Instance) -> Result<FlowDecOutcome, PlanError> {
    let (pf, sf) = rayon::join(|| private_first(instance), || shared_first(instance));
    let (pf, sf) = (pf?, sf?);
    let pf_value = total_reward(&pf, instance)?;
    let sf_value = total_reward(&sf, instance)?;
    let (assignment, value, selected) = if pf_value > sf_value + REWARD_TOLERANCE {
        (pf, pf_value, Selected::PrivateFirst)
    } else {
        (sf, sf_value, Selected::SharedFirst)
    };
    Ok(FlowDecOutcome {
        assignment,
        value,
        private_first_value: pf_value,
        shared_first_value: sf_value,
        selected,
    })
}

pub fn flowdec(instance: &Instance) -> Result<Assignment, PlanError> {
    flowdec_detailed(instance).map(|o| o.assignment)
}
