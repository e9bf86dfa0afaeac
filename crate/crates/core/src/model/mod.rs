mod assignment;
mod eval;
mod graph;
mod instance;

pub use assignment::{Assignment, MoveKey};
pub use eval::{
    agent_positions, reward_breakdown, total_reward, validate, Constraint, RewardBreakdown,
    ValidationReport, Violation,
};
pub use graph::{EdgeId, WorkspaceGraph};
pub use instance::{Instance, RewardTable};
