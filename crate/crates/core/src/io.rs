//! JSON documents for instances and assignments.
//!
//! Fleets are labelled `1..=F` in files and `0..F` in memory. Field order is
//! fixed so that serialized files are byte-stable.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{FormatError, ModelError};
use crate::model::{total_reward, Assignment, Instance, RewardTable, WorkspaceGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "F")]
    pub fleets: usize,
    pub fleet_sizes: Vec<usize>,
    pub p0: Vec<Vec<usize>>,
    /// `rewards[t][tau][i]`, `t = 0` shared.
    pub rewards: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveDoc {
    pub f: usize,
    pub tau: usize,
    pub i: usize,
    pub j: usize,
    pub v: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentDoc {
    pub x: Vec<MoveDoc>,
    /// `[f, tau, j]` shared claims.
    pub y: Vec<[usize; 3]>,
    /// `[f, tau, j]` private claims.
    pub z: Vec<[usize; 3]>,
    pub reward: f64,
}

impl InstanceDoc {
    pub fn from_instance(instance: &Instance) -> Self {
        let fleets = instance.fleet_count();
        Self {
            n: instance.vertex_count(),
            edges: instance
                .graph()
                .edges()
                .iter()
                .map(|&(i, j)| [i, j])
                .collect(),
            horizon: instance.horizon(),
            fleets,
            fleet_sizes: instance.fleet_sizes().to_vec(),
            p0: (0..fleets)
                .map(|f| instance.initial_positions(f).to_vec())
                .collect(),
            rewards: (0..=fleets)
                .map(|t| instance.rewards(t).rows().map(<[f64]>::to_vec).collect())
                .collect(),
        }
    }

    pub fn into_instance(self) -> Result<Instance, FormatError> {
        if self.fleet_sizes.len() != self.fleets {
            return Err(FormatError::Invalid(format!(
                "F is {} but fleet_sizes has {} entries",
                self.fleets,
                self.fleet_sizes.len()
            )));
        }
        let graph = WorkspaceGraph::new(
            self.n,
            self.edges.into_iter().map(|[i, j]| (i, j)).collect(),
        )?;
        let rewards = self
            .rewards
            .into_iter()
            .map(RewardTable::from_rows)
            .collect::<Result<Vec<_>, ModelError>>()?;
        Ok(Instance::new(
            graph,
            self.horizon,
            self.fleet_sizes,
            self.p0,
            rewards,
        )?)
    }
}

impl AssignmentDoc {
    pub fn from_assignment(
        assignment: &Assignment,
        instance: &Instance,
    ) -> Result<Self, ModelError> {
        let reward = total_reward(assignment, instance)?;
        let label = |(f, tau, j): (usize, usize, usize)| [f + 1, tau, j];
        Ok(Self {
            x: assignment
                .moves()
                .map(|(k, v)| MoveDoc {
                    f: k.fleet + 1,
                    tau: k.step,
                    i: k.from,
                    j: k.to,
                    v,
                })
                .collect(),
            y: assignment.shared_claims().into_iter().map(label).collect(),
            z: assignment.private_claims().into_iter().map(label).collect(),
            reward,
        })
    }

    /// Checks indices against `instance` and builds the assignment.
    ///
    /// Transitions along non-edges are accepted here and left for the
    /// validator to report.
    pub fn into_assignment(self, instance: &Instance) -> Result<Assignment, FormatError> {
        let fleets = instance.fleet_count();
        let horizon = instance.horizon();
        let n = instance.vertex_count();
        let fleet = |f: usize| {
            if (1..=fleets).contains(&f) {
                Ok(f - 1)
            } else {
                Err(FormatError::Invalid(format!(
                    "fleet label {f} outside 1..={fleets}"
                )))
            }
        };
        let vertex = |v: usize| {
            if v < n {
                Ok(v)
            } else {
                Err(FormatError::Invalid(format!("vertex {v} outside 0..{n}")))
            }
        };

        let mut a = Assignment::for_instance(instance);
        let mut seen = BTreeSet::new();
        for m in &self.x {
            let f = fleet(m.f)?;
            if m.tau >= horizon {
                return Err(FormatError::Invalid(format!(
                    "transition at tau {} outside 0..{horizon}",
                    m.tau
                )));
            }
            let (i, j) = (vertex(m.i)?, vertex(m.j)?);
            if !seen.insert((f, m.tau, i, j)) {
                return Err(FormatError::Invalid(format!(
                    "duplicate transition f={} tau={} ({i}, {j})",
                    m.f, m.tau
                )));
            }
            a.set_move(f, m.tau, i, j, m.v);
        }
        for (name, claims, shared) in [("y", &self.y, true), ("z", &self.z, false)] {
            let mut seen = BTreeSet::new();
            for &[f_label, tau, j] in claims {
                let f = fleet(f_label)?;
                if tau > horizon {
                    return Err(FormatError::Invalid(format!(
                        "{name} claim at tau {tau} outside 0..={horizon}"
                    )));
                }
                let j = vertex(j)?;
                if !seen.insert((f, tau, j)) {
                    return Err(FormatError::Invalid(format!(
                        "duplicate {name} claim [{f_label}, {tau}, {j}]"
                    )));
                }
                if shared {
                    a.set_shared_claim(f, tau, j, true);
                } else {
                    a.set_private_claim(f, tau, j, true);
                }
            }
        }
        Ok(a)
    }
}

fn json_error(e: serde_json::Error) -> FormatError {
    FormatError::Json(e.to_string())
}

pub fn instance_to_json(instance: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceDoc::from_instance(instance))
        .expect("instance documents always serialize")
}

pub fn instance_from_json(text: &str) -> Result<Instance, FormatError> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(json_error)?;
    doc.into_instance()
}

pub fn assignment_to_json(
    assignment: &Assignment,
    instance: &Instance,
) -> Result<String, ModelError> {
    let doc = AssignmentDoc::from_assignment(assignment, instance)?;
    Ok(serde_json::to_string_pretty(&doc).expect("assignment documents always serialize"))
}

/// Parses an assignment and returns it with the reward recorded in the file.
pub fn assignment_from_json(
    text: &str,
    instance: &Instance,
) -> Result<(Assignment, f64), FormatError> {
    let doc: AssignmentDoc = serde_json::from_str(text).map_err(json_error)?;
    let reward = doc.reward;
    Ok((doc.into_assignment(instance)?, reward))
}
