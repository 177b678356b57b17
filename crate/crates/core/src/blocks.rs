//! Biconnected-component decomposition of a subgraph: blocks, cutvertices,
//! and block-size statistics. Blocks are edge-based — every edge lies in
//! exactly one block, and a cutvertex is a vertex lying in at least two.

use std::collections::HashMap;

use serde::Serialize;

use crate::ball::{EdgeId, VertexId};
use crate::stats;

/// A maximal subgraph with no cutvertex, given by its vertices and edges.
#[derive(Debug, Clone, Serialize)]
pub struct Block {
    /// Ascending global vertex ids.
    pub vertices: Vec<VertexId>,
    /// Ascending global edge ids.
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockReport {
    pub blocks: Vec<Block>,
    /// Vertices lying in two or more blocks, ascending.
    pub cut_vertices: Vec<VertexId>,
    /// Largest block vertex count (0 when the subgraph has no edges).
    pub max_block_size: usize,
    /// (block vertex count, number of blocks of that size), ascending.
    pub size_histogram: Vec<(usize, usize)>,
    /// Median block vertex count; mean of the two middles on even counts,
    /// 0 when there are no blocks.
    pub median_block_size: f64,
}

/// Decompose the subgraph spanned by `edges` (global edge id, endpoints)
/// into blocks. Vertices are taken from the edge list, so vertices with no
/// incident edge contribute nothing.
pub fn block_decomposition(edges: &[(EdgeId, VertexId, VertexId)]) -> BlockReport {
    // Local dense indexing of the vertices that occur.
    let mut local: HashMap<VertexId, u32> = HashMap::new();
    let mut global: Vec<VertexId> = Vec::new();
    for &(_, a, b) in edges {
        for v in [a, b] {
            local.entry(v).or_insert_with(|| {
                global.push(v);
                (global.len() - 1) as u32
            });
        }
    }
    let n = global.len();
    let mut adj: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n]; // (edge pos, other)
    for (pos, &(_, a, b)) in edges.iter().enumerate() {
        let (a, b) = (local[&a], local[&b]);
        adj[a as usize].push((pos as u32, b));
        adj[b as usize].push((pos as u32, a));
    }

    let mut disc = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut clock = 0u32;
    let mut edge_stack: Vec<u32> = Vec::new();
    let mut blocks_edges: Vec<Vec<u32>> = Vec::new();

    // Iterative lowpoint DFS; each frame remembers the edge it entered
    // through so a parallel edge still counts as a back edge.
    struct Frame {
        v: u32,
        entry_edge: u32, // position, u32::MAX at roots
        next: usize,
    }
    let mut visited_edge = vec![false; edges.len()];
    for root in 0..n as u32 {
        if disc[root as usize] != u32::MAX {
            continue;
        }
        disc[root as usize] = clock;
        low[root as usize] = clock;
        clock += 1;
        let mut stack = vec![Frame { v: root, entry_edge: u32::MAX, next: 0 }];
        while let Some(fr) = stack.last_mut() {
            let v = fr.v;
            if fr.next < adj[v as usize].len() {
                let (epos, w) = adj[v as usize][fr.next];
                fr.next += 1;
                if epos == fr.entry_edge || visited_edge[epos as usize] {
                    continue;
                }
                visited_edge[epos as usize] = true;
                edge_stack.push(epos);
                if disc[w as usize] == u32::MAX {
                    disc[w as usize] = clock;
                    low[w as usize] = clock;
                    clock += 1;
                    stack.push(Frame { v: w, entry_edge: epos, next: 0 });
                } else {
                    // Back edge: w is an ancestor (or a sibling branch is
                    // impossible in undirected DFS).
                    low[v as usize] = low[v as usize].min(disc[w as usize]);
                }
            } else {
                // Finished v: propagate lowpoint and cut blocks.
                let entry = fr.entry_edge;
                stack.pop();
                if let Some(parent) = stack.last() {
                    let p = parent.v;
                    low[p as usize] = low[p as usize].min(low[v as usize]);
                    if low[v as usize] >= disc[p as usize] {
                        // p separates v's subtree: pop one block.
                        let mut blk = Vec::new();
                        loop {
                            let e = edge_stack.pop().expect("block edges on stack");
                            blk.push(e);
                            if e == entry {
                                break;
                            }
                        }
                        blocks_edges.push(blk);
                    }
                }
            }
        }
        debug_assert!(edge_stack.is_empty());
    }

    let mut blocks = Vec::with_capacity(blocks_edges.len());
    let mut block_count_of_vertex: HashMap<VertexId, u32> = HashMap::new();
    for blk in blocks_edges {
        let mut vs: Vec<VertexId> = Vec::new();
        let mut es: Vec<EdgeId> = Vec::new();
        for &pos in &blk {
            let (id, a, b) = edges[pos as usize];
            es.push(id);
            vs.push(a);
            vs.push(b);
        }
        vs.sort_unstable();
        vs.dedup();
        es.sort_unstable();
        es.dedup();
        for &v in &vs {
            *block_count_of_vertex.entry(v).or_insert(0) += 1;
        }
        blocks.push(Block { vertices: vs, edges: es });
    }
    blocks.sort_by(|a, b| a.vertices.cmp(&b.vertices));

    let mut cut_vertices: Vec<VertexId> = block_count_of_vertex
        .iter()
        .filter(|&(_, &c)| c >= 2)
        .map(|(&v, _)| v)
        .collect();
    cut_vertices.sort_unstable();

    let sizes: Vec<usize> = blocks.iter().map(|b| b.vertices.len()).collect();
    let max_block_size = sizes.iter().copied().max().unwrap_or(0);
    let mut hist: std::collections::BTreeMap<usize, usize> = Default::default();
    for &s in &sizes {
        *hist.entry(s).or_insert(0) += 1;
    }
    let median_block_size = if sizes.is_empty() {
        0.0
    } else {
        stats::median(&sizes.iter().map(|&s| s as f64).collect::<Vec<_>>())
    };
    BlockReport {
        blocks,
        cut_vertices,
        max_block_size,
        size_histogram: hist.into_iter().collect(),
        median_block_size,
    }
}

/// Edge list of an open subgraph of a ball-shaped topology, ready for
/// decomposition.
pub fn open_subgraph_edges(
    g: &crate::graph::WiredGraph,
    open: &crate::percolation::BondConfig,
) -> Vec<(EdgeId, VertexId, VertexId)> {
    open.open_edges()
        .map(|e| {
            let (a, b) = g.endpoints(e);
            (e, a, b)
        })
        .collect()
}
