//! Random spanning forests: Wilson sampling, minimal spanning forests under
//! edge labels, and the percolation-plus-forest pipeline built from both.

pub mod msf;
pub mod pipeline;
pub mod wilson;

use serde::{Deserialize, Serialize};

use crate::ball::{EdgeId, VertexId};
use crate::graph::{DisjointSet, WiredGraph};

/// Which sampler realizes the wired spanning forest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ForestBuilder {
    #[default]
    Lerw,
    Stacks,
}

/// An edge subset forming a forest, with the parent structure toward the
/// root when a rooted sampler produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestConfig {
    edge_count: usize,
    in_forest: Vec<bool>,
    edges: Vec<EdgeId>,
    parent: Option<Vec<Option<(VertexId, EdgeId)>>>,
}

impl ForestConfig {
    pub fn from_parts(
        total_edges: usize,
        mut edges: Vec<EdgeId>,
        parent: Option<Vec<Option<(VertexId, EdgeId)>>>,
    ) -> Self {
        edges.sort_unstable();
        let mut in_forest = vec![false; total_edges];
        for &e in &edges {
            in_forest[e as usize] = true;
        }
        ForestConfig { edge_count: edges.len(), in_forest, edges, parent }
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.in_forest[e as usize]
    }

    /// Forest edges in ascending id order.
    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    /// The forest as a bond configuration over the same edge ids.
    pub fn to_bonds(&self) -> crate::percolation::BondConfig {
        crate::percolation::BondConfig::from_open(self.in_forest.clone())
    }

    /// Parent link of `v` toward the root, when the sampler rooted the
    /// forest.
    pub fn parent_of(&self, v: VertexId) -> Option<(VertexId, EdgeId)> {
        self.parent.as_ref().and_then(|p| p[v as usize])
    }

    pub fn has_parents(&self) -> bool {
        self.parent.is_some()
    }

    /// True when the edge subset is acyclic on the given topology.
    pub fn is_acyclic(&self, g: &WiredGraph) -> bool {
        let mut ds = DisjointSet::new(g.vertex_count());
        for &e in &self.edges {
            let (a, b) = g.endpoints(e);
            if !ds.unite(a, b) {
                return false;
            }
        }
        true
    }

    /// Vertex partition induced by the forest edges: canonical component id
    /// (minimum member) per vertex.
    pub fn component_ids(&self, g: &WiredGraph) -> Vec<VertexId> {
        component_ids_of_edges(g, self.edges.iter().copied())
    }

    /// Degree of `v` in the forest, counting incident edges once each.
    pub fn degree_of(&self, g: &WiredGraph, v: VertexId) -> usize {
        let ends = g.ends_of(v);
        let mut deg = 0;
        for (i, &e) in ends.iter().enumerate() {
            // An order-two generator lists its edge at two incidence slots.
            if self.contains(e) && !ends[..i].contains(&e) {
                deg += 1;
            }
        }
        deg
    }
}

/// Canonical component ids (minimum member per component) under an edge
/// subset of a topology.
pub fn component_ids_of_edges(
    g: &WiredGraph,
    edges: impl Iterator<Item = EdgeId>,
) -> Vec<VertexId> {
    let n = g.vertex_count();
    let mut ds = DisjointSet::new(n);
    for e in edges {
        let (a, b) = g.endpoints(e);
        ds.unite(a, b);
    }
    let mut min_of_root = vec![u32::MAX; n];
    for v in 0..n as u32 {
        let r = ds.find(v) as usize;
        if min_of_root[r] == u32::MAX {
            min_of_root[r] = v;
        }
    }
    (0..n as u32).map(|v| min_of_root[ds.find(v) as usize]).collect()
}
