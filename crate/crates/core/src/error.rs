use thiserror::Error;

/// Structural problems with graphs, instances and assignments.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("fleet {fleet} out of range (instance has {fleets} fleets)")]
    FleetOutOfRange { fleet: usize, fleets: usize },
    #[error("step {step} out of range 0..={horizon}")]
    StepOutOfRange { step: usize, horizon: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McfError {
    #[error("infeasible: required flow {required}, at most {achieved} can be routed (deficit {deficit})", deficit = .required - .achieved)]
    Infeasible { required: u64, achieved: u64 },
    #[error("arc {arc} references node outside 0..{node_count}")]
    InvalidArc { arc: usize, node_count: usize },
    #[error("source and sink must be distinct nodes inside 0..{node_count}")]
    InvalidTerminals { node_count: usize },
    #[error("network contains a directed cycle")]
    NotAcyclic,
    #[error("arc {arc} has non-finite cost")]
    NonFiniteCost { arc: usize },
    #[error("inconsistent flow: {0}")]
    InconsistentFlow(String),
}

/// Failures while reducing a homogeneous problem or running the decomposition
/// algorithms built on it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("agent pool is empty")]
    EmptyPool,
    #[error("initial positions hold {found} agents but the pool size is {expected}")]
    PoolMismatch { expected: usize, found: usize },
    #[error("agents start at vertex {vertex}, which has no outgoing edge")]
    StrandedStart { vertex: usize },
    #[error("reward at step {step}, vertex {vertex} is negative or not finite")]
    InvalidReward { step: usize, vertex: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Mcf(#[from] McfError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("search space bound {bound:.3e} exceeds the limit {limit:.0e}")]
    SearchSpaceTooLarge { bound: f64, limit: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("invalid scenario parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("planning failed at step {step}: {source}")]
    Planner { step: usize, source: PlanError },
}

/// Malformed instance or assignment documents.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
