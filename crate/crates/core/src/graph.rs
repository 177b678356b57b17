//! Finite multigraph view shared by the forest samplers and the structural
//! reports. Balls convert into it; tests build small graphs directly.

use crate::ball::{CayleyBall, EdgeId, VertexId};
use crate::error::Error;
use crate::Result;

/// Undirected multigraph with a designated root vertex and, per vertex, a
/// fixed ordering of incident edge-ends. Parallel edges are distinct ends;
/// a doubled end (the same edge listed twice at one vertex) is how an
/// involutive Cayley generator is represented.
#[derive(Debug, Clone)]
pub struct WiredGraph {
    root: VertexId,
    endpoints: Vec<(VertexId, VertexId)>,
    ends: Vec<Vec<EdgeId>>,
}

impl WiredGraph {
    /// Build from an edge list; edge-end order at each vertex follows edge
    /// insertion order. Self-loops are rejected.
    pub fn new(vertex_count: usize, root: VertexId, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        if root as usize >= vertex_count {
            return Err(Error::VertexOutOfBounds { vertex: root as usize, vertices: vertex_count });
        }
        let mut ends = vec![Vec::new(); vertex_count];
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a as usize >= vertex_count || b as usize >= vertex_count {
                return Err(Error::VertexOutOfBounds {
                    vertex: a.max(b) as usize,
                    vertices: vertex_count,
                });
            }
            if a == b {
                return Err(Error::InvalidGroupSpec { reason: format!("self-loop at vertex {a}") });
            }
            ends[a as usize].push(i as EdgeId);
            ends[b as usize].push(i as EdgeId);
        }
        Ok(WiredGraph { root, endpoints: edges.to_vec(), ends })
    }

    /// Ball topology with the wired root: the first vertex at full radius,
    /// or the identity when the ball has no boundary.
    pub fn from_ball(ball: &CayleyBall) -> Self {
        let root = ball.first_boundary_vertex().unwrap_or(0);
        let endpoints = ball.edges().iter().map(|e| (e.tail, e.head)).collect();
        let ends = (0..ball.vertex_count())
            .map(|v| ball.ends_of(v as VertexId).to_vec())
            .collect();
        WiredGraph { root, endpoints, ends }
    }

    pub fn vertex_count(&self) -> usize {
        self.ends.len()
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.endpoints[e as usize]
    }

    pub fn other_endpoint(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.endpoints[e as usize];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Ordered incident edge-ends of `v`.
    pub fn ends_of(&self, v: VertexId) -> &[EdgeId] {
        &self.ends[v as usize]
    }

    /// Err listing a vertex that cannot reach the root (walk samplers would
    /// not terminate on such input).
    pub fn check_connected(&self) -> Result<()> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        seen[self.root as usize] = true;
        queue.push_back(self.root);
        while let Some(v) = queue.pop_front() {
            for &e in self.ends_of(v) {
                let w = self.other_endpoint(e, v);
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push_back(w);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            None => Ok(()),
            Some(v) => Err(Error::Disconnected { vertex: v }),
        }
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Union by size; returns false when already joined.
    pub fn unite(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }

    pub fn set_size(&mut self, x: u32) -> u32 {
        let r = self.find(x);
        self.size[r as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wired_graph_basics() {
        let g = WiredGraph::new(3, 0, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.ends_of(1), &[0, 1]);
        assert_eq!(g.other_endpoint(2, 0), 2);
        g.check_connected().unwrap();
        let h = WiredGraph::new(3, 0, &[(0, 1)]).unwrap();
        assert!(matches!(h.check_connected(), Err(Error::Disconnected { vertex: 2 })));
    }

    #[test]
    fn disjoint_set_unite_find() {
        let mut ds = DisjointSet::new(5);
        assert!(ds.unite(0, 1));
        assert!(ds.unite(3, 4));
        assert!(!ds.unite(1, 0));
        assert_eq!(ds.find(0), ds.find(1));
        assert_ne!(ds.find(0), ds.find(3));
        assert_eq!(ds.set_size(4), 2);
        ds.unite(1, 3);
        assert_eq!(ds.set_size(0), 4);
    }
}
