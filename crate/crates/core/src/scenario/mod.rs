//! Random grid scenarios and the receding-horizon simulator.
//!
//! Objects of every reward type are scattered uniformly over the grid and
//! perform uniform random walks; the expected number of objects at each
//! vertex and step is the reward table handed to the planners.
//!
//! Randomness comes from `Xoshiro256PlusPlus` seeded with `seed_from_u64`,
//! which expands the 64-bit seed with SplitMix64. Draws are made in a fixed
//! order: the `I` objects of type `0..=F` in turn, then every agent's start
//! vertex fleet by fleet.

mod sim;

use rand::Rng;
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{ModelError, ScenarioError};
use crate::model::{Instance, RewardTable, WorkspaceGraph};

pub use sim::{simulate, SimRecord, SimReport, SimState, Simulator};

/// Parameters of a random grid scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioParams {
    pub rows: usize,
    pub cols: usize,
    pub horizon: usize,
    pub fleets: usize,
    /// Agents per fleet.
    pub fleet_size: usize,
    /// Objects per reward type.
    pub objects: usize,
    pub seed: u64,
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fields = [
            ("rows", self.rows),
            ("cols", self.cols),
            ("horizon", self.horizon),
            ("fleets", self.fleets),
            ("fleet_size", self.fleet_size),
            ("objects", self.objects),
        ];
        for (name, value) in fields {
            if value == 0 {
                return Err(ScenarioError::InvalidParam {
                    name,
                    reason: "must be positive".into(),
                });
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.rows * self.cols
    }
}

pub(crate) fn rng_for(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Object positions per reward type and agent counts per fleet.
pub(crate) fn draw_initial_state(
    params: &ScenarioParams,
    rng: &mut Xoshiro256PlusPlus,
) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let n = params.vertex_count();
    let objects = (0..=params.fleets)
        .map(|_| (0..params.objects).map(|_| rng.gen_range(0..n)).collect())
        .collect();
    let agents = (0..params.fleets)
        .map(|_| {
            let mut counts = vec![0; n];
            for _ in 0..params.fleet_size {
                counts[rng.gen_range(0..n)] += 1;
            }
            counts
        })
        .collect();
    (objects, agents)
}

/// One step of a uniform random walk applied to expected counts:
/// `R'[j] = Σ_{(i, j) ∈ E} R[i] / outdeg(i)`.
pub fn propagate(row: &[f64], graph: &WorkspaceGraph) -> Result<Vec<f64>, ModelError> {
    if row.len() != graph.vertex_count() {
        return Err(ModelError::DimensionMismatch(format!(
            "reward row has {} entries for {} vertices",
            row.len(),
            graph.vertex_count()
        )));
    }
    if let Some(v) = graph.find_sink_vertex() {
        return Err(ModelError::InvalidGraph(format!(
            "vertex {v} has no outgoing edge"
        )));
    }
    let mut next = vec![0.0; row.len()];
    for &(i, j) in graph.edges() {
        next[j] += row[i] / graph.out_degree(i) as f64;
    }
    Ok(next)
}

/// Expected object counts over `0..=horizon` for objects starting at
/// `positions`.
pub fn expected_rewards(
    graph: &WorkspaceGraph,
    positions: &[usize],
    horizon: usize,
) -> Result<RewardTable, ModelError> {
    let mut table = RewardTable::zeros(horizon, graph.vertex_count());
    for &v in positions {
        if v >= graph.vertex_count() {
            return Err(ModelError::InvalidInstance(format!(
                "object at vertex {v} outside 0..{}",
                graph.vertex_count()
            )));
        }
        let cell = table.get(0, v);
        table.set(0, v, cell + 1.0);
    }
    for step in 0..horizon {
        let next = propagate(table.row(step), graph)?;
        table.row_mut(step + 1).copy_from_slice(&next);
    }
    Ok(table)
}

/// Random grid instance: `rows × cols` 4-neighbour grid with self-loops,
/// `objects` objects per reward type, `fleet_size` agents per fleet.
pub fn generate(params: &ScenarioParams) -> Result<Instance, ScenarioError> {
    params.validate()?;
    let graph = WorkspaceGraph::grid(params.rows, params.cols)?;
    let mut rng = rng_for(params.seed);
    let (objects, agents) = draw_initial_state(params, &mut rng);
    Ok(sim::build_instance(
        &graph,
        params.horizon,
        &objects,
        &agents,
    )?)
}
