//! Cluster decomposition of a bond configuration.

use crate::ball::{CayleyBall, EdgeId, VertexId};
use crate::graph::DisjointSet;
use crate::percolation::BondConfig;

/// One cluster's aggregate data. The canonical id of a cluster is its
/// minimum contained vertex index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterInfo {
    pub rep: VertexId,
    pub size: u32,
    pub open_edges: u32,
    pub touches_boundary: bool,
}

/// Partition of the vertex set into open-edge connected components.
#[derive(Debug, Clone)]
pub struct ClusterDecomposition {
    /// Dense cluster index per vertex.
    cluster_of: Vec<u32>,
    /// Clusters sorted by canonical id (minimum vertex index).
    clusters: Vec<ClusterInfo>,
}

impl ClusterDecomposition {
    /// Decompose an arbitrary edge list under an open mask. `is_boundary`
    /// flags the vertices whose clusters count as boundary-touching.
    pub fn from_edges(
        vertex_count: usize,
        edges: &[(VertexId, VertexId)],
        open: &BondConfig,
        is_boundary: impl Fn(VertexId) -> bool,
    ) -> Self {
        assert_eq!(edges.len(), open.len(), "mask must cover the edge list");
        let mut ds = DisjointSet::new(vertex_count);
        for e in open.open_edges() {
            let (a, b) = edges[e as usize];
            ds.unite(a, b);
        }
        // Canonical id: minimum vertex index per root, found by a first pass
        // in vertex order.
        let mut cluster_index = vec![u32::MAX; vertex_count];
        let mut cluster_of = vec![0u32; vertex_count];
        let mut clusters: Vec<ClusterInfo> = Vec::new();
        for v in 0..vertex_count as u32 {
            let r = ds.find(v);
            let idx = if cluster_index[r as usize] == u32::MAX {
                let idx = clusters.len() as u32;
                cluster_index[r as usize] = idx;
                clusters.push(ClusterInfo {
                    rep: v,
                    size: 0,
                    open_edges: 0,
                    touches_boundary: false,
                });
                idx
            } else {
                cluster_index[r as usize]
            };
            cluster_of[v as usize] = idx;
            clusters[idx as usize].size += 1;
            if is_boundary(v) {
                clusters[idx as usize].touches_boundary = true;
            }
        }
        for e in open.open_edges() {
            let (a, _) = edges[e as usize];
            let idx = cluster_of[a as usize];
            clusters[idx as usize].open_edges += 1;
        }
        ClusterDecomposition { cluster_of, clusters }
    }

    /// Decompose a ball's bond configuration; boundary means word length R.
    pub fn from_ball(ball: &CayleyBall, open: &BondConfig) -> Self {
        let edges: Vec<(VertexId, VertexId)> =
            ball.edges().iter().map(|e| (e.tail, e.head)).collect();
        Self::from_edges(ball.vertex_count(), &edges, open, |v| ball.is_boundary(v))
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn clusters(&self) -> &[ClusterInfo] {
        &self.clusters
    }

    /// Dense index of the cluster containing `v`.
    pub fn cluster_index_of(&self, v: VertexId) -> u32 {
        self.cluster_of[v as usize]
    }

    /// Canonical cluster id (minimum contained vertex index).
    pub fn cluster_id_of(&self, v: VertexId) -> VertexId {
        self.clusters[self.cluster_of[v as usize] as usize].rep
    }

    pub fn info_of(&self, v: VertexId) -> ClusterInfo {
        self.clusters[self.cluster_of[v as usize] as usize]
    }

    pub fn same_cluster(&self, a: VertexId, b: VertexId) -> bool {
        self.cluster_of[a as usize] == self.cluster_of[b as usize]
    }

    /// Vertex partition as a canonical-id vector, for equality tests between
    /// decompositions of different configurations.
    pub fn partition_ids(&self) -> Vec<VertexId> {
        self.cluster_of
            .iter()
            .map(|&i| self.clusters[i as usize].rep)
            .collect()
    }

    /// Materialized view of one cluster (vertex list ascending plus its open
    /// edges from the given configuration).
    pub fn cluster_view(
        &self,
        member: VertexId,
        edges: &[(VertexId, VertexId)],
        open: &BondConfig,
    ) -> ClusterView {
        let idx = self.cluster_of[member as usize];
        let vertices: Vec<VertexId> = (0..self.cluster_of.len() as u32)
            .filter(|&v| self.cluster_of[v as usize] == idx)
            .collect();
        let open_edges: Vec<EdgeId> = open
            .open_edges()
            .filter(|&e| {
                let (a, _) = edges[e as usize];
                self.cluster_of[a as usize] == idx
            })
            .collect();
        let info = self.clusters[idx as usize];
        ClusterView { info, vertices, open_edges }
    }
}

/// The cluster of the origin (vertex 0) of a ball configuration.
pub fn origin_cluster(
    decomp: &ClusterDecomposition,
    ball: &CayleyBall,
    open: &BondConfig,
) -> ClusterView {
    let edges: Vec<(VertexId, VertexId)> =
        ball.edges().iter().map(|e| (e.tail, e.head)).collect();
    decomp.cluster_view(0, &edges, open)
}

/// One cluster with its vertex set and open edge set materialized.
#[derive(Debug, Clone)]
pub struct ClusterView {
    pub info: ClusterInfo,
    pub vertices: Vec<VertexId>,
    pub open_edges: Vec<EdgeId>,
}
