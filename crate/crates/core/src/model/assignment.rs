use std::collections::BTreeMap;
use std::ops::Bound;

use crate::model::instance::Instance;

/// Key of a transition variable: agents of `fleet` moving `from → to`
/// between `step` and `step + 1`. The field order gives the map its
/// (fleet, step, from, to) iteration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MoveKey {
    pub fleet: usize,
    pub step: usize,
    pub from: usize,
    pub to: usize,
}

/// Decision variables of a heterogeneous allocation.
///
/// Transitions `x` are stored sparsely; shared claims `y` and private claims
/// `z` are dense boolean grids of `(horizon + 1) × n` per fleet.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    fleets: usize,
    horizon: usize,
    vertex_count: usize,
    moves: BTreeMap<MoveKey, usize>,
    shared: Vec<Vec<bool>>,
    private: Vec<Vec<bool>>,
}

impl Assignment {
    pub fn empty(fleets: usize, horizon: usize, vertex_count: usize) -> Self {
        let grid = vec![false; (horizon + 1) * vertex_count];
        Self {
            fleets,
            horizon,
            vertex_count,
            moves: BTreeMap::new(),
            shared: vec![grid.clone(); fleets],
            private: vec![grid; fleets],
        }
    }

    pub fn for_instance(instance: &Instance) -> Self {
        Self::empty(
            instance.fleet_count(),
            instance.horizon(),
            instance.vertex_count(),
        )
    }

    pub fn fleet_count(&self) -> usize {
        self.fleets
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Adds `count` agents to the transition. Zero counts are not stored.
    pub fn add_move(&mut self, fleet: usize, step: usize, from: usize, to: usize, count: usize) {
        if count == 0 {
            return;
        }
        *self
            .moves
            .entry(MoveKey {
                fleet,
                step,
                from,
                to,
            })
            .or_insert(0) += count;
    }

    pub fn set_move(&mut self, fleet: usize, step: usize, from: usize, to: usize, count: usize) {
        let key = MoveKey {
            fleet,
            step,
            from,
            to,
        };
        if count == 0 {
            self.moves.remove(&key);
        } else {
            self.moves.insert(key, count);
        }
    }

    pub fn move_count(&self, fleet: usize, step: usize, from: usize, to: usize) -> usize {
        self.moves
            .get(&MoveKey {
                fleet,
                step,
                from,
                to,
            })
            .copied()
            .unwrap_or(0)
    }

    /// All non-zero transitions in (fleet, step, from, to) order.
    pub fn moves(&self) -> impl Iterator<Item = (MoveKey, usize)> + '_ {
        self.moves.iter().map(|(k, &v)| (*k, v))
    }

    /// Non-zero transitions of one fleet at one step.
    pub fn moves_at(
        &self,
        fleet: usize,
        step: usize,
    ) -> impl Iterator<Item = (MoveKey, usize)> + '_ {
        let lo = MoveKey {
            fleet,
            step,
            from: 0,
            to: 0,
        };
        let hi = MoveKey {
            fleet,
            step,
            from: usize::MAX,
            to: usize::MAX,
        };
        self.moves
            .range((Bound::Included(lo), Bound::Included(hi)))
            .map(|(k, &v)| (*k, v))
    }

    fn cell(&self, step: usize, vertex: usize) -> usize {
        step * self.vertex_count + vertex
    }

    pub fn shared_claim(&self, fleet: usize, step: usize, vertex: usize) -> bool {
        self.shared[fleet][self.cell(step, vertex)]
    }

    pub fn private_claim(&self, fleet: usize, step: usize, vertex: usize) -> bool {
        self.private[fleet][self.cell(step, vertex)]
    }

    pub fn set_shared_claim(&mut self, fleet: usize, step: usize, vertex: usize, claimed: bool) {
        let c = self.cell(step, vertex);
        self.shared[fleet][c] = claimed;
    }

    pub fn set_private_claim(&mut self, fleet: usize, step: usize, vertex: usize, claimed: bool) {
        let c = self.cell(step, vertex);
        self.private[fleet][c] = claimed;
    }

    /// `(fleet, step, vertex)` of every shared claim, in that order.
    pub fn shared_claims(&self) -> Vec<(usize, usize, usize)> {
        Self::list_claims(&self.shared, self.vertex_count)
    }

    /// `(fleet, step, vertex)` of every private claim, in that order.
    pub fn private_claims(&self) -> Vec<(usize, usize, usize)> {
        Self::list_claims(&self.private, self.vertex_count)
    }

    fn list_claims(grids: &[Vec<bool>], n: usize) -> Vec<(usize, usize, usize)> {
        grids
            .iter()
            .enumerate()
            .flat_map(|(f, grid)| {
                grid.iter()
                    .enumerate()
                    .filter(|(_, &c)| c)
                    .map(move |(k, _)| (f, k / n, k % n))
            })
            .collect()
    }

    /// Drops every claim and keeps the transitions.
    pub fn clear_claims(&mut self) {
        for grid in self.shared.iter_mut().chain(self.private.iter_mut()) {
            grid.iter_mut().for_each(|c| *c = false);
        }
    }
}
