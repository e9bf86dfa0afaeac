//! Integral min-cost flow on acyclic multigraphs with one source and one sink.
//!
//! Arcs are identified by their insertion index; parallel arcs between the
//! same pair of nodes are independent. Costs are real and may be negative.

mod decompose;
mod simplex;
mod ssp;

use std::fmt::Write as _;

use crate::error::McfError;

pub use decompose::decompose_paths;

/// Absolute tolerance for cost comparisons.
pub const COST_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacity {
    Finite(u64),
    Unbounded,
}

impl Capacity {
    /// Capacity usable by a flow of total value `required`.
    pub fn effective(self, required: u64) -> u64 {
        match self {
            Capacity::Finite(c) => c.min(required),
            Capacity::Unbounded => required,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub capacity: Capacity,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowNetwork {
    pub node_count: usize,
    pub arcs: Vec<Arc>,
    pub source: usize,
    pub sink: usize,
    pub required_flow: u64,
}

impl FlowNetwork {
    pub fn new(node_count: usize, source: usize, sink: usize, required_flow: u64) -> Self {
        Self {
            node_count,
            arcs: Vec::new(),
            source,
            sink,
            required_flow,
        }
    }

    /// Appends an arc and returns its index.
    pub fn add_arc(&mut self, from: usize, to: usize, capacity: Capacity, cost: f64) -> usize {
        self.arcs.push(Arc {
            from,
            to,
            capacity,
            cost,
        });
        self.arcs.len() - 1
    }

    /// Checks endpoints, costs and acyclicity. Returns a topological order
    /// of all nodes.
    pub fn check(&self) -> Result<Vec<usize>, McfError> {
        let n = self.node_count;
        if self.source >= n || self.sink >= n || self.source == self.sink {
            return Err(McfError::InvalidTerminals { node_count: n });
        }
        let mut indegree = vec![0usize; n];
        for (k, arc) in self.arcs.iter().enumerate() {
            if arc.from >= n || arc.to >= n {
                return Err(McfError::InvalidArc {
                    arc: k,
                    node_count: n,
                });
            }
            if !arc.cost.is_finite() {
                return Err(McfError::NonFiniteCost { arc: k });
            }
            indegree[arc.to] += 1;
        }
        let out = self.out_arcs();
        let mut order = Vec::with_capacity(n);
        let mut stack: Vec<usize> = (0..n).rev().filter(|&v| indegree[v] == 0).collect();
        while let Some(v) = stack.pop() {
            order.push(v);
            for &k in &out[v] {
                let w = self.arcs[k].to;
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    stack.push(w);
                }
            }
        }
        if order.len() != n {
            return Err(McfError::NotAcyclic);
        }
        Ok(order)
    }

    /// Outgoing arc indices per node, ascending.
    pub fn out_arcs(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.node_count];
        for (k, arc) in self.arcs.iter().enumerate() {
            out[arc.from].push(k);
        }
        out
    }

    /// Graphviz rendering; arcs are labelled `index: capacity / cost`.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph flow {\n  rankdir=LR;\n");
        let _ = writeln!(s, "  {} [label=\"s\", shape=box];", self.source);
        let _ = writeln!(s, "  {} [label=\"g\", shape=box];", self.sink);
        for (k, arc) in self.arcs.iter().enumerate() {
            let cap = match arc.capacity {
                Capacity::Finite(c) => c.to_string(),
                Capacity::Unbounded => "inf".to_string(),
            };
            let _ = writeln!(
                s,
                "  {} -> {} [label=\"{k}: {cap} / {}\"];",
                arc.from, arc.to, arc.cost
            );
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub flow: Vec<u64>,
    pub total_cost: f64,
}

/// Min-cost flow algorithm.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum McfAlgorithm {
    /// Primal network simplex with block-search pivoting. Its running time
    /// hardly depends on the flow value.
    #[default]
    NetworkSimplex,
    /// Successive shortest paths with Dijkstra on reduced costs. Initial
    /// potentials come from one relaxation pass in topological order, so
    /// negative costs need no Bellman–Ford phase.
    SuccessiveShortestPath,
}

/// Solves the network to optimality with the default algorithm.
pub fn solve_mcf(network: &FlowNetwork) -> Result<FlowResult, McfError> {
    solve_mcf_with(network, McfAlgorithm::default())
}

pub fn solve_mcf_with(
    network: &FlowNetwork,
    algorithm: McfAlgorithm,
) -> Result<FlowResult, McfError> {
    let order = network.check()?;
    match algorithm {
        McfAlgorithm::NetworkSimplex => simplex::solve(network, &order),
        McfAlgorithm::SuccessiveShortestPath => ssp::solve(network, &order),
    }
}

/// Verifies bounds, source/sink value and conservation of `result`.
pub fn check_flow(network: &FlowNetwork, result: &FlowResult) -> Result<(), McfError> {
    if result.flow.len() != network.arcs.len() {
        return Err(McfError::InconsistentFlow(format!(
            "{} flow values for {} arcs",
            result.flow.len(),
            network.arcs.len()
        )));
    }
    let mut balance = vec![0i128; network.node_count];
    for (k, (arc, &h)) in network.arcs.iter().zip(&result.flow).enumerate() {
        if let Capacity::Finite(c) = arc.capacity {
            if h > c {
                return Err(McfError::InconsistentFlow(format!(
                    "arc {k} carries {h} above capacity {c}"
                )));
            }
        }
        balance[arc.from] -= h as i128;
        balance[arc.to] += h as i128;
    }
    let required = network.required_flow as i128;
    for (v, &b) in balance.iter().enumerate() {
        let expected = if v == network.source {
            -required
        } else if v == network.sink {
            required
        } else {
            0
        };
        if b != expected {
            return Err(McfError::InconsistentFlow(format!(
                "node {v} has net inflow {b}, expected {expected}"
            )));
        }
    }
    Ok(())
}

/// `Σ flow · cost` over all arcs.
pub fn flow_cost(network: &FlowNetwork, flow: &[u64]) -> f64 {
    network
        .arcs
        .iter()
        .zip(flow)
        .map(|(a, &h)| a.cost * h as f64)
        .sum()
}
