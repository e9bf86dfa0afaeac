use std::time::Instant;

use rand::Rng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use super::{draw_initial_state, expected_rewards, rng_for, ScenarioParams};
use crate::error::{ModelError, ScenarioError};
use crate::flowdec::Planner;
use crate::model::{total_reward, Instance, WorkspaceGraph};

/// True state of a running simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    /// Number of completed steps.
    pub step: usize,
    /// Vertex of every object, per reward type `0..=F`.
    pub objects: Vec<Vec<usize>>,
    /// Agent counts per vertex, per fleet.
    pub agents: Vec<Vec<usize>>,
    pub realized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRecord {
    pub step: usize,
    pub planned_value: f64,
    pub realized_reward: f64,
    pub plan_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub planner: String,
    pub records: Vec<SimRecord>,
    pub total_realized_reward: f64,
    pub total_plan_ms: f64,
}

pub(crate) fn build_instance(
    graph: &WorkspaceGraph,
    horizon: usize,
    objects: &[Vec<usize>],
    agents: &[Vec<usize>],
) -> Result<Instance, ModelError> {
    let rewards = objects
        .iter()
        .map(|positions| expected_rewards(graph, positions, horizon))
        .collect::<Result<Vec<_>, _>>()?;
    let sizes = agents.iter().map(|c| c.iter().sum()).collect();
    Instance::new(graph.clone(), horizon, sizes, agents.to_vec(), rewards)
}

/// Receding-horizon loop: plan over the expected rewards, execute the first
/// transition, let the objects walk, repeat.
pub struct Simulator {
    graph: WorkspaceGraph,
    horizon: usize,
    planner: Planner,
    rng: Xoshiro256PlusPlus,
    state: SimState,
}

impl Simulator {
    /// Starts from the same state [`super::generate`] builds its instance from.
    pub fn new(params: &ScenarioParams, planner: Planner) -> Result<Self, ScenarioError> {
        params.validate()?;
        let graph = WorkspaceGraph::grid(params.rows, params.cols)?;
        let mut rng = rng_for(params.seed);
        let (objects, agents) = draw_initial_state(params, &mut rng);
        Ok(Self::with_rng(
            graph,
            params.horizon,
            objects,
            agents,
            rng,
            planner,
        ))
    }

    /// Starts from explicit object and agent positions on any graph.
    pub fn from_state(
        graph: WorkspaceGraph,
        horizon: usize,
        objects: Vec<Vec<usize>>,
        agents: Vec<Vec<usize>>,
        seed: u64,
        planner: Planner,
    ) -> Result<Self, ScenarioError> {
        if objects.len() != agents.len() + 1 {
            return Err(ScenarioError::InvalidParam {
                name: "objects",
                reason: format!(
                    "{} object types for {} fleets, expected {}",
                    objects.len(),
                    agents.len(),
                    agents.len() + 1
                ),
            });
        }
        // validates dimensions, positions and the graph
        build_instance(&graph, horizon, &objects, &agents)?;
        Ok(Self::with_rng(
            graph,
            horizon,
            objects,
            agents,
            rng_for(seed),
            planner,
        ))
    }

    fn with_rng(
        graph: WorkspaceGraph,
        horizon: usize,
        objects: Vec<Vec<usize>>,
        agents: Vec<Vec<usize>>,
        rng: Xoshiro256PlusPlus,
        planner: Planner,
    ) -> Self {
        Self {
            graph,
            horizon,
            planner,
            rng,
            state: SimState {
                step: 0,
                objects,
                agents,
                realized: 0.0,
            },
        }
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    /// Instance the planner sees at the current state.
    pub fn current_instance(&self) -> Result<Instance, ModelError> {
        build_instance(
            &self.graph,
            self.horizon,
            &self.state.objects,
            &self.state.agents,
        )
    }

    pub fn step(&mut self) -> Result<SimRecord, ScenarioError> {
        let k = self.state.step;
        let instance = self.current_instance()?;
        let started = Instant::now();
        let plan = self
            .planner
            .plan(&instance)
            .map_err(|source| ScenarioError::Planner { step: k, source })?;
        let plan_ms = started.elapsed().as_secs_f64() * 1e3;
        let planned_value = total_reward(&plan, &instance)?;

        let n = self.graph.vertex_count();
        for (f, counts) in self.state.agents.iter_mut().enumerate() {
            let mut next = vec![0; n];
            for (key, c) in plan.moves_at(f, 0) {
                next[key.to] += c;
            }
            *counts = next;
        }
        for positions in self.state.objects.iter_mut() {
            for v in positions.iter_mut() {
                let out = self.graph.out_edges(*v);
                let (_, to) = self.graph.edge(out[self.rng.gen_range(0..out.len())]);
                *v = to;
            }
        }

        let realized_reward = realized(&self.state.objects, &self.state.agents, n);
        self.state.realized += realized_reward;
        self.state.step += 1;
        Ok(SimRecord {
            step: k,
            planned_value,
            realized_reward,
            plan_ms,
        })
    }
}

/// Objects collected at the current positions: each object counts once if
/// any eligible agent shares its vertex.
fn realized(objects: &[Vec<usize>], agents: &[Vec<usize>], n: usize) -> f64 {
    let mut any = vec![false; n];
    for counts in agents {
        for (v, &c) in counts.iter().enumerate() {
            any[v] |= c > 0;
        }
    }
    let shared = objects[0].iter().filter(|&&v| any[v]).count();
    let private: usize = agents
        .iter()
        .zip(&objects[1..])
        .map(|(counts, objs)| objs.iter().filter(|&&v| counts[v] > 0).count())
        .sum();
    (shared + private) as f64
}

/// Runs `steps` receding-horizon steps on the scenario described by `params`.
pub fn simulate(
    params: &ScenarioParams,
    steps: usize,
    planner: Planner,
) -> Result<SimReport, ScenarioError> {
    if steps == 0 {
        return Err(ScenarioError::InvalidParam {
            name: "steps",
            reason: "must be positive".into(),
        });
    }
    let mut sim = Simulator::new(params, planner)?;
    let records = (0..steps)
        .map(|_| sim.step())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SimReport {
        planner: planner.name().to_string(),
        total_realized_reward: records.iter().map(|r| r.realized_reward).sum(),
        total_plan_ms: records.iter().map(|r| r.plan_ms).sum(),
        records,
    })
}
