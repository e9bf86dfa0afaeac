//! Objective evaluation and feasibility checking of assignments.

use std::fmt;

use crate::error::ModelError;
use crate::model::assignment::Assignment;
use crate::model::instance::Instance;

fn check_dimensions(assignment: &Assignment, instance: &Instance) -> Result<(), ModelError> {
    let got = (
        assignment.fleet_count(),
        assignment.horizon(),
        assignment.vertex_count(),
    );
    let want = (
        instance.fleet_count(),
        instance.horizon(),
        instance.vertex_count(),
    );
    if got != want {
        return Err(ModelError::DimensionMismatch(format!(
            "assignment has (fleets, horizon, vertices) = {got:?}, instance has {want:?}"
        )));
    }
    Ok(())
}

/// Shared and private portions of an assignment's objective.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RewardBreakdown {
    pub shared: f64,
    pub private: f64,
}

impl RewardBreakdown {
    pub fn total(&self) -> f64 {
        self.shared + self.private
    }
}

/// Sum of `R⁰·y + Rᶠ·z` over every fleet, step and vertex. Feasibility is
/// not checked.
pub fn total_reward(assignment: &Assignment, instance: &Instance) -> Result<f64, ModelError> {
    reward_breakdown(assignment, instance).map(|b| b.total())
}

pub fn reward_breakdown(
    assignment: &Assignment,
    instance: &Instance,
) -> Result<RewardBreakdown, ModelError> {
    check_dimensions(assignment, instance)?;
    let mut out = RewardBreakdown::default();
    let shared = instance.shared_rewards();
    for (_, tau, j) in assignment.shared_claims() {
        out.shared += shared.get(tau, j);
    }
    for (f, tau, j) in assignment.private_claims() {
        out.private += instance.private_rewards(f).get(tau, j);
    }
    Ok(out)
}

/// Constraint families of the heterogeneous allocation program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// A transition uses a pair that is not a graph edge, a step outside
    /// `0..T`, or a count above the fleet size.
    Domain,
    /// Outflow at step 0 equals the initial positions (1b).
    InitialPosition,
    /// Inflow equals outflow at every intermediate step (1c).
    FlowConservation,
    /// Shared claim needs an agent of the fleet leaving the vertex (1d).
    SharedPresence,
    /// Shared claim at the final step needs an agent arriving (1e).
    SharedFinalPresence,
    /// At most one fleet claims each shared reward (1f).
    SharedExclusive,
    /// Private claim needs an agent of the fleet leaving the vertex (1g).
    PrivatePresence,
    /// Private claim at the final step needs an agent arriving (1h).
    PrivateFinalPresence,
    /// Private claim is at most one (1i).
    PrivateExclusive,
}

impl Constraint {
    pub fn id(&self) -> &'static str {
        match self {
            Constraint::Domain => "domain",
            Constraint::InitialPosition => "1b",
            Constraint::FlowConservation => "1c",
            Constraint::SharedPresence => "1d",
            Constraint::SharedFinalPresence => "1e",
            Constraint::SharedExclusive => "1f",
            Constraint::PrivatePresence => "1g",
            Constraint::PrivateFinalPresence => "1h",
            Constraint::PrivateExclusive => "1i",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.id())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub constraint: Constraint,
    /// 0-based fleet index, absent for cross-fleet constraints.
    pub fleet: Option<usize>,
    pub step: usize,
    pub vertex: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constraint)?;
        if let Some(fleet) = self.fleet {
            write!(f, " fleet={}", fleet + 1)?;
        }
        write!(f, " tau={}", self.step)?;
        if let Some(v) = self.vertex {
            write!(f, " j={v}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, constraint: Constraint) -> bool {
        self.violations.iter().any(|v| v.constraint == constraint)
    }

    pub fn find(&self, constraint: Constraint, step: usize, vertex: usize) -> Option<&Violation> {
        self.violations
            .iter()
            .find(|v| v.constraint == constraint && v.step == step && v.vertex == Some(vertex))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Per-fleet outflow at each step `0..T` and arrivals at each step `1..=T`,
/// both `T × n`.
struct FleetFlows {
    outflow: Vec<Vec<usize>>,
    arrivals: Vec<Vec<usize>>,
}

/// Checks every constraint of the allocation program and lists violations.
///
/// Continuity (1c) is enforced for every intermediate step `1..=T-1`, so an
/// assignment that passes describes physical agent trajectories.
pub fn validate(
    assignment: &Assignment,
    instance: &Instance,
) -> Result<ValidationReport, ModelError> {
    check_dimensions(assignment, instance)?;
    let n = instance.vertex_count();
    let horizon = instance.horizon();
    let graph = instance.graph();
    let mut report = ValidationReport::default();

    let mut flows: Vec<FleetFlows> = (0..instance.fleet_count())
        .map(|_| FleetFlows {
            outflow: vec![vec![0; n]; horizon],
            arrivals: vec![vec![0; n]; horizon],
        })
        .collect();

    for (key, count) in assignment.moves() {
        let in_range =
            key.fleet < instance.fleet_count() && key.step < horizon && key.from < n && key.to < n;
        if !in_range || !graph.has_edge(key.from, key.to) {
            report.violations.push(Violation {
                constraint: Constraint::Domain,
                fleet: Some(key.fleet),
                step: key.step,
                vertex: Some(key.from),
                detail: format!("({}, {}) is not a usable transition", key.from, key.to),
            });
            continue;
        }
        let fleet_size = instance.fleet_size(key.fleet);
        if count > fleet_size {
            report.violations.push(Violation {
                constraint: Constraint::Domain,
                fleet: Some(key.fleet),
                step: key.step,
                vertex: Some(key.from),
                detail: format!(
                    "{count} agents on ({}, {}) exceed fleet size {fleet_size}",
                    key.from, key.to
                ),
            });
        }
        let ff = &mut flows[key.fleet];
        ff.outflow[key.step][key.from] += count;
        ff.arrivals[key.step][key.to] += count;
    }

    for (f, ff) in flows.iter().enumerate() {
        let p0 = instance.initial_positions(f);
        for j in 0..n {
            if ff.outflow[0][j] != p0[j] {
                report.violations.push(Violation {
                    constraint: Constraint::InitialPosition,
                    fleet: Some(f),
                    step: 0,
                    vertex: Some(j),
                    detail: format!(
                        "outflow {} but {} agents start here",
                        ff.outflow[0][j], p0[j]
                    ),
                });
            }
        }
        for tau in 1..horizon {
            for j in 0..n {
                let inflow = ff.arrivals[tau - 1][j];
                let outflow = ff.outflow[tau][j];
                if inflow != outflow {
                    report.violations.push(Violation {
                        constraint: Constraint::FlowConservation,
                        fleet: Some(f),
                        step: tau,
                        vertex: Some(j),
                        detail: format!("inflow {inflow} differs from outflow {outflow}"),
                    });
                }
            }
        }
        for tau in 0..=horizon {
            for j in 0..n {
                let present = if tau < horizon {
                    ff.outflow[tau][j]
                } else {
                    ff.arrivals[horizon - 1][j]
                };
                if present > 0 {
                    continue;
                }
                let (shared_c, private_c) = if tau < horizon {
                    (Constraint::SharedPresence, Constraint::PrivatePresence)
                } else {
                    (
                        Constraint::SharedFinalPresence,
                        Constraint::PrivateFinalPresence,
                    )
                };
                if assignment.shared_claim(f, tau, j) {
                    report.violations.push(Violation {
                        constraint: shared_c,
                        fleet: Some(f),
                        step: tau,
                        vertex: Some(j),
                        detail: "shared claim without an agent of this fleet".into(),
                    });
                }
                if assignment.private_claim(f, tau, j) {
                    report.violations.push(Violation {
                        constraint: private_c,
                        fleet: Some(f),
                        step: tau,
                        vertex: Some(j),
                        detail: "private claim without an agent of this fleet".into(),
                    });
                }
            }
        }
    }

    // Private claims are stored as booleans, so (1i) cannot be violated by
    // an in-memory assignment.
    for tau in 0..=horizon {
        for j in 0..n {
            let claimants: Vec<usize> = (0..instance.fleet_count())
                .filter(|&f| assignment.shared_claim(f, tau, j))
                .collect();
            if claimants.len() > 1 {
                report.violations.push(Violation {
                    constraint: Constraint::SharedExclusive,
                    fleet: None,
                    step: tau,
                    vertex: Some(j),
                    detail: format!(
                        "shared reward claimed by fleets {:?}",
                        claimants.iter().map(|f| f + 1).collect::<Vec<_>>()
                    ),
                });
            }
        }
    }

    Ok(report)
}

/// Agent counts of `fleet` per vertex at `step`, read off the transitions.
pub fn agent_positions(
    assignment: &Assignment,
    instance: &Instance,
    fleet: usize,
    step: usize,
) -> Result<Vec<usize>, ModelError> {
    check_dimensions(assignment, instance)?;
    if fleet >= instance.fleet_count() {
        return Err(ModelError::FleetOutOfRange {
            fleet,
            fleets: instance.fleet_count(),
        });
    }
    let horizon = instance.horizon();
    if step > horizon {
        return Err(ModelError::StepOutOfRange { step, horizon });
    }
    let mut counts = vec![0; instance.vertex_count()];
    if step < horizon {
        for (key, c) in assignment.moves_at(fleet, step) {
            counts[key.from] += c;
        }
    } else {
        for (key, c) in assignment.moves_at(fleet, horizon - 1) {
            counts[key.to] += c;
        }
    }
    Ok(counts)
}
