use crate::error::ModelError;
use crate::model::graph::WorkspaceGraph;

/// Reward values over the time-expanded vertex set, `(horizon + 1) × n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardTable {
    vertex_count: usize,
    values: Vec<f64>,
}

impl RewardTable {
    pub fn zeros(horizon: usize, vertex_count: usize) -> Self {
        Self {
            vertex_count,
            values: vec![0.0; (horizon + 1) * vertex_count],
        }
    }

    /// Builds a table from one row per time step. All rows must have the
    /// same non-zero length.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let vertex_count = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || vertex_count == 0 {
            return Err(ModelError::DimensionMismatch(
                "reward table is empty".into(),
            ));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != vertex_count) {
            return Err(ModelError::DimensionMismatch(format!(
                "reward row {bad} has {} entries, expected {vertex_count}",
                rows[bad].len()
            )));
        }
        Ok(Self {
            vertex_count,
            values: rows.into_iter().flatten().collect(),
        })
    }

    /// Largest time step index (`T`).
    pub fn horizon(&self) -> usize {
        self.values.len() / self.vertex_count - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn get(&self, step: usize, vertex: usize) -> f64 {
        self.values[step * self.vertex_count + vertex]
    }

    pub fn set(&mut self, step: usize, vertex: usize, value: f64) {
        self.values[step * self.vertex_count + vertex] = value;
    }

    pub fn row(&self, step: usize) -> &[f64] {
        &self.values[step * self.vertex_count..(step + 1) * self.vertex_count]
    }

    pub fn row_mut(&mut self, step: usize) -> &mut [f64] {
        &mut self.values[step * self.vertex_count..(step + 1) * self.vertex_count]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.vertex_count)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// First `(step, vertex)` holding a negative or non-finite value.
    pub fn find_invalid(&self) -> Option<(usize, usize)> {
        self.values
            .iter()
            .position(|v| !v.is_finite() || *v < 0.0)
            .map(|k| (k / self.vertex_count, k % self.vertex_count))
    }

    /// Entry-wise `self + other * scale`.
    pub fn add_scaled(&self, other: &RewardTable, scale: f64) -> RewardTable {
        debug_assert_eq!(self.values.len(), other.values.len());
        RewardTable {
            vertex_count: self.vertex_count,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b * scale)
                .collect(),
        }
    }
}

/// A heterogeneous task-allocation instance.
///
/// Fleets are indexed `0..F` in the API. Reward type `0` is the shared set;
/// reward type `f + 1` is private to fleet `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    graph: WorkspaceGraph,
    horizon: usize,
    fleet_sizes: Vec<usize>,
    initial_positions: Vec<Vec<usize>>,
    rewards: Vec<RewardTable>,
}

impl Instance {
    pub fn new(
        graph: WorkspaceGraph,
        horizon: usize,
        fleet_sizes: Vec<usize>,
        initial_positions: Vec<Vec<usize>>,
        rewards: Vec<RewardTable>,
    ) -> Result<Self, ModelError> {
        let n = graph.vertex_count();
        let fleets = fleet_sizes.len();
        if horizon == 0 {
            return Err(ModelError::InvalidInstance(
                "horizon must be positive".into(),
            ));
        }
        if fleets == 0 {
            return Err(ModelError::InvalidInstance(
                "at least one fleet is required".into(),
            ));
        }
        if let Some(v) = graph.find_sink_vertex() {
            return Err(ModelError::InvalidGraph(format!(
                "vertex {v} has no outgoing edge"
            )));
        }
        if let Some(f) = fleet_sizes.iter().position(|&a| a == 0) {
            return Err(ModelError::InvalidInstance(format!(
                "fleet {} is empty",
                f + 1
            )));
        }
        if initial_positions.len() != fleets {
            return Err(ModelError::DimensionMismatch(format!(
                "{} initial position vectors for {fleets} fleets",
                initial_positions.len()
            )));
        }
        for (f, p0) in initial_positions.iter().enumerate() {
            if p0.len() != n {
                return Err(ModelError::DimensionMismatch(format!(
                    "initial positions of fleet {} have {} entries, expected {n}",
                    f + 1,
                    p0.len()
                )));
            }
            let total: usize = p0.iter().sum();
            if total != fleet_sizes[f] {
                return Err(ModelError::InvalidInstance(format!(
                    "fleet {} places {total} agents but has size {}",
                    f + 1,
                    fleet_sizes[f]
                )));
            }
        }
        if rewards.len() != fleets + 1 {
            return Err(ModelError::DimensionMismatch(format!(
                "{} reward sets for {fleets} fleets, expected {}",
                rewards.len(),
                fleets + 1
            )));
        }
        for (t, table) in rewards.iter().enumerate() {
            if table.vertex_count() != n || table.horizon() != horizon {
                return Err(ModelError::DimensionMismatch(format!(
                    "reward set {t} is {}x{}, expected {}x{n}",
                    table.horizon() + 1,
                    table.vertex_count(),
                    horizon + 1
                )));
            }
            if let Some((step, vertex)) = table.find_invalid() {
                return Err(ModelError::InvalidInstance(format!(
                    "reward set {t} at step {step}, vertex {vertex} is negative or not finite"
                )));
            }
        }
        Ok(Self {
            graph,
            horizon,
            fleet_sizes,
            initial_positions,
            rewards,
        })
    }

    pub fn graph(&self) -> &WorkspaceGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn fleet_count(&self) -> usize {
        self.fleet_sizes.len()
    }

    pub fn fleet_size(&self, fleet: usize) -> usize {
        self.fleet_sizes[fleet]
    }

    pub fn fleet_sizes(&self) -> &[usize] {
        &self.fleet_sizes
    }

    pub fn total_agents(&self) -> usize {
        self.fleet_sizes.iter().sum()
    }

    pub fn initial_positions(&self, fleet: usize) -> &[usize] {
        &self.initial_positions[fleet]
    }

    /// Per-vertex start counts summed over all fleets.
    pub fn pooled_initial_positions(&self) -> Vec<usize> {
        let mut pooled = vec![0; self.vertex_count()];
        for p0 in &self.initial_positions {
            for (acc, &c) in pooled.iter_mut().zip(p0) {
                *acc += c;
            }
        }
        pooled
    }

    /// Reward set of type `t` (`0` shared, `f + 1` private to fleet `f`).
    pub fn rewards(&self, reward_type: usize) -> &RewardTable {
        &self.rewards[reward_type]
    }

    pub fn shared_rewards(&self) -> &RewardTable {
        &self.rewards[0]
    }

    pub fn private_rewards(&self, fleet: usize) -> &RewardTable {
        &self.rewards[fleet + 1]
    }

    pub fn reward_sets(&self) -> &[RewardTable] {
        &self.rewards
    }
}
