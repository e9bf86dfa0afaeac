use std::collections::HashMap;

use crate::error::ModelError;

/// Index of an edge in [`WorkspaceGraph::edges`].
pub type EdgeId = usize;

/// Directed workspace graph. Agents and objects move along its edges once
/// per time step; self-loops model waiting in place.
#[derive(Debug, Clone)]
pub struct WorkspaceGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    outgoing: Vec<Vec<EdgeId>>,
    incoming: Vec<Vec<EdgeId>>,
    lookup: HashMap<(usize, usize), EdgeId>,
}

impl WorkspaceGraph {
    /// Builds a graph from an edge list. Duplicate pairs and out-of-range
    /// endpoints are rejected. Vertices without outgoing edges are accepted
    /// here; [`crate::Instance`] refuses them.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self, ModelError> {
        if vertex_count == 0 {
            return Err(ModelError::InvalidGraph("graph has no vertices".into()));
        }
        let mut outgoing = vec![Vec::new(); vertex_count];
        let mut incoming = vec![Vec::new(); vertex_count];
        let mut lookup = HashMap::with_capacity(edges.len());
        for (id, &(i, j)) in edges.iter().enumerate() {
            if i >= vertex_count || j >= vertex_count {
                return Err(ModelError::InvalidGraph(format!(
                    "edge ({i}, {j}) references a vertex outside 0..{vertex_count}"
                )));
            }
            if lookup.insert((i, j), id).is_some() {
                return Err(ModelError::InvalidGraph(format!(
                    "duplicate edge ({i}, {j})"
                )));
            }
            outgoing[i].push(id);
            incoming[j].push(id);
        }
        Ok(Self {
            vertex_count,
            edges,
            outgoing,
            incoming,
            lookup,
        })
    }

    /// `rows × cols` 4-neighbour grid with a self-loop at every vertex.
    /// Vertex `(r, c)` has index `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Result<Self, ModelError> {
        if rows == 0 || cols == 0 {
            return Err(ModelError::InvalidGraph(format!(
                "grid {rows}x{cols} is empty"
            )));
        }
        let mut edges = Vec::with_capacity(rows * cols * 5);
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                edges.push((v, v));
                if r > 0 {
                    edges.push((v, v - cols));
                }
                if c > 0 {
                    edges.push((v, v - 1));
                }
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        Self::new(rows * cols, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> (usize, usize) {
        self.edges[id]
    }

    pub fn edge_id(&self, from: usize, to: usize) -> Option<EdgeId> {
        self.lookup.get(&(from, to)).copied()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.lookup.contains_key(&(from, to))
    }

    /// Heads of the edges leaving `vertex`, in edge-list order.
    pub fn out_neighbors(&self, vertex: usize) -> impl Iterator<Item = usize> + '_ {
        self.outgoing[vertex].iter().map(move |&e| self.edges[e].1)
    }

    /// Tails of the edges entering `vertex`, in edge-list order.
    pub fn in_neighbors(&self, vertex: usize) -> impl Iterator<Item = usize> + '_ {
        self.incoming[vertex].iter().map(move |&e| self.edges[e].0)
    }

    pub fn out_edges(&self, vertex: usize) -> &[EdgeId] {
        &self.outgoing[vertex]
    }

    pub fn in_edges(&self, vertex: usize) -> &[EdgeId] {
        &self.incoming[vertex]
    }

    pub fn out_degree(&self, vertex: usize) -> usize {
        self.outgoing[vertex].len()
    }

    pub fn max_out_degree(&self) -> usize {
        self.outgoing.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// First vertex with no outgoing edge, if any.
    pub fn find_sink_vertex(&self) -> Option<usize> {
        self.outgoing.iter().position(Vec::is_empty)
    }
}

impl PartialEq for WorkspaceGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.edges == other.edges
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_out_of_range() {
        assert!(WorkspaceGraph::new(2, vec![(0, 1), (0, 1)]).is_err());
        assert!(WorkspaceGraph::new(2, vec![(0, 2)]).is_err());
        assert!(WorkspaceGraph::new(0, vec![]).is_err());
    }

    #[test]
    fn neighbor_lists_match_edges() {
        let g = WorkspaceGraph::new(3, vec![(0, 1), (1, 2), (2, 0), (0, 0)]).unwrap();
        assert_eq!(g.out_neighbors(0).collect::<Vec<_>>(), vec![1, 0]);
        assert_eq!(g.in_neighbors(0).collect::<Vec<_>>(), vec![2, 0]);
        assert_eq!(g.edge_id(2, 0), Some(2));
        assert_eq!(g.edge_id(1, 0), None);
        assert_eq!(g.find_sink_vertex(), None);
    }

    #[test]
    fn grid_has_self_loops_and_four_neighbours() {
        let g = WorkspaceGraph::grid(3, 3).unwrap();
        assert_eq!(g.vertex_count(), 9);
        // 9 loops + 2 * 12 undirected grid links
        assert_eq!(g.edge_count(), 9 + 24);
        assert_eq!(g.out_degree(4), 5);
        assert_eq!(g.out_degree(0), 3);
        assert_eq!(g.max_out_degree(), 5);
        for v in 0..9 {
            assert!(g.has_edge(v, v));
        }
        let single = WorkspaceGraph::grid(1, 1).unwrap();
        assert_eq!(single.edges(), &[(0, 0)]);
    }
}
