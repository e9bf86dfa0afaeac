//! Heterogeneous multi-fleet task allocation on time-expanded graphs.
//!
//! Several fleets of agents move over a directed workspace graph for `T`
//! steps. Shared rewards can be collected by any fleet, private rewards only
//! by their own fleet, and every reward at most once. [`flowdec::flowdec`]
//! reduces the problem to per-fleet min-cost flows and returns a plan within
//! `F / (2F - 1)` of the optimum; [`oracle::exact_solve`] finds the optimum
//! by enumeration on small instances.
//!
//! ```
//! use flowdec_core::{flowdec, scenario, total_reward, validate};
//!
//! let params = scenario::ScenarioParams {
//!     rows: 3, cols: 3, horizon: 3, fleets: 2, fleet_size: 1, objects: 2, seed: 7,
//! };
//! let instance = scenario::generate(&params).unwrap();
//! let plan = flowdec::flowdec(&instance).unwrap();
//! assert!(validate(&plan, &instance).unwrap().is_feasible());
//! assert!(total_reward(&plan, &instance).unwrap() >= 0.0);
//! ```

pub mod error;
pub mod flowdec;
pub mod homogeneous;
pub mod io;
pub mod mcf;
pub mod model;
pub mod oracle;
pub mod scenario;

pub use error::{FormatError, McfError, ModelError, OracleError, PlanError, ScenarioError};
pub use model::{
    agent_positions, reward_breakdown, total_reward, validate, Assignment, Constraint, Instance,
    RewardTable, ValidationReport, Violation, WorkspaceGraph,
};

/// Absolute tolerance for reward comparisons.
pub const REWARD_TOLERANCE: f64 = 1e-9;
