//! Wilson sampling of the uniform spanning tree of a wired ball, in two
//! interchangeable forms: loop-erased random walks, and per-vertex label
//! stacks consumed by cycle popping.

use rand::Rng;

use crate::ball::{CayleyBall, EdgeId, VertexId};
use crate::error::Error;
use crate::forest::ForestConfig;
use crate::graph::WiredGraph;
use crate::real::Real;
use crate::seed::SeedDomain;
use crate::Result;

pub const WILSON_CONTEXT: &str = "forest/wilson";
pub const STACKS_CONTEXT: &str = "forest/stacks";

/// Default ceiling on total stack pops in one cycle-popping run.
pub const DEFAULT_POP_CAP: u64 = 1_000_000_000;

/// Stack position selected by a label `t` at a vertex of degree `d`:
/// `ceil(d * t)` clamped so that `t = 0` selects position 1. The result is
/// 1-based in `1..=d`.
pub fn stack_index<R: Real>(t: R, d: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::OutOfRange {
            name: "degree",
            value: 0.0,
            expected: "at least 1",
        });
    }
    let t = t.to_f64_lossy();
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange {
            name: "stack label",
            value: t,
            expected: "within [0, 1]",
        });
    }
    let idx = (t * d as f64).ceil() as usize;
    Ok(idx.clamp(1, d))
}

/// Sample the uniform spanning tree of `g` by loop-erased random walks from
/// each vertex in index order toward the root.
pub fn wilson_wired_graph(g: &WiredGraph, rng: &mut impl Rng) -> Result<ForestConfig> {
    g.check_connected()?;
    let n = g.vertex_count();
    let root = g.root();
    let mut in_tree = vec![false; n];
    in_tree[root as usize] = true;
    // next_edge[v] is the most recent edge the walk left v through; loops
    // erase themselves because later visits overwrite it.
    let mut next_edge = vec![EdgeId::MAX; n];
    let mut parent: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));

    for start in 0..n as u32 {
        if in_tree[start as usize] {
            continue;
        }
        let mut u = start;
        while !in_tree[u as usize] {
            let ends = g.ends_of(u);
            let e = ends[rng.random_range(0..ends.len())];
            next_edge[u as usize] = e;
            u = g.other_endpoint(e, u);
        }
        let mut u = start;
        while !in_tree[u as usize] {
            let e = next_edge[u as usize];
            let w = g.other_endpoint(e, u);
            in_tree[u as usize] = true;
            parent[u as usize] = Some((w, e));
            edges.push(e);
            u = w;
        }
    }
    Ok(ForestConfig::from_parts(g.edge_count(), edges, Some(parent)))
}

/// Loop-erased Wilson sample on a wired ball, seeded deterministically.
pub fn wilson_wired(ball: &CayleyBall, seed: u64) -> Result<ForestConfig> {
    let g = WiredGraph::from_ball(ball);
    let mut rng = SeedDomain::derive(seed, WILSON_CONTEXT).rng();
    wilson_wired_graph(&g, &mut rng)
}

/// Source of the per-vertex stack labels: `label(v, k)` is the label at
/// depth `k` of the stack under `v`, a value in `[0, 1]`.
pub trait StackOracle {
    fn label(&self, vertex: VertexId, depth: u64) -> f64;
}

/// Stack labels derived from a seed, independent across (vertex, depth).
pub struct SeededStackOracle {
    dom: SeedDomain,
}

impl SeededStackOracle {
    pub fn new(seed: u64) -> Self {
        SeededStackOracle { dom: SeedDomain::derive(seed, STACKS_CONTEXT) }
    }
}

impl StackOracle for SeededStackOracle {
    fn label(&self, vertex: VertexId, depth: u64) -> f64 {
        self.dom.child(vertex as u64).child(depth).uniform01()
    }
}

/// Fixed finite stacks, for exercising cycle popping on known inputs. Reads
/// past the supplied depth repeat the last entry.
pub struct TableOracle {
    pub stacks: Vec<Vec<f64>>,
}

impl StackOracle for TableOracle {
    fn label(&self, vertex: VertexId, depth: u64) -> f64 {
        let s = &self.stacks[vertex as usize];
        let k = (depth as usize).min(s.len() - 1);
        s[k]
    }
}

#[derive(Debug, Clone)]
pub struct StacksRun {
    pub forest: ForestConfig,
    /// Total stack pops before the configuration became acyclic.
    pub pops: u64,
}

/// Cycle popping over label stacks: each vertex's current arrow is the
/// incidence slot its top label selects; cycles of arrows are popped (every
/// vertex on the cycle advances its stack) until the arrows form a tree
/// into the root.
pub fn wilson_stacks_graph(
    g: &WiredGraph,
    oracle: &impl StackOracle,
    pop_cap: u64,
) -> Result<StacksRun> {
    g.check_connected()?;
    let n = g.vertex_count();
    let root = g.root();
    let mut depth = vec![0u64; n];
    let mut settled = vec![false; n];
    settled[root as usize] = true;
    // pos_in_path[v] = index of v on the current walk path, or MAX.
    let mut pos_in_path = vec![u32::MAX; n];
    let mut path: Vec<VertexId> = Vec::new();
    let mut pops = 0u64;
    let mut parent: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));

    let top_arrow = |v: VertexId, depth: &[u64]| -> Result<EdgeId> {
        let ends = g.ends_of(v);
        let t = oracle.label(v, depth[v as usize]);
        let idx = stack_index(t, ends.len())?;
        Ok(ends[idx - 1])
    };

    for start in 0..n as u32 {
        if settled[start as usize] {
            continue;
        }
        path.clear();
        path.push(start);
        pos_in_path[start as usize] = 0;
        loop {
            let u = *path.last().expect("walk path is nonempty");
            if settled[u as usize] {
                path.pop();
                break;
            }
            let e = top_arrow(u, &depth)?;
            let w = g.other_endpoint(e, u);
            if settled[w as usize] {
                // The walk reached fixed territory: every arrow now on the
                // path is final.
                for &v in path.iter().rev() {
                    let e = top_arrow(v, &depth)?;
                    let w = g.other_endpoint(e, v);
                    settled[v as usize] = true;
                    parent[v as usize] = Some((w, e));
                    edges.push(e);
                    pos_in_path[v as usize] = u32::MAX;
                }
                path.clear();
                break;
            }
            let wpos = pos_in_path[w as usize];
            if wpos != u32::MAX {
                // Closed a cycle w -> ... -> u -> w: pop every vertex on it.
                for &v in &path[wpos as usize..] {
                    depth[v as usize] += 1;
                    pops += 1;
                }
                if pops > pop_cap {
                    return Err(Error::PopCapExceeded { cap: pop_cap });
                }
                for &v in &path[wpos as usize + 1..] {
                    pos_in_path[v as usize] = u32::MAX;
                }
                path.truncate(wpos as usize + 1);
            } else {
                pos_in_path[w as usize] = path.len() as u32;
                path.push(w);
            }
        }
    }
    let forest = ForestConfig::from_parts(g.edge_count(), edges, Some(parent));
    Ok(StacksRun { forest, pops })
}

/// Stack-form Wilson sample on a wired ball.
pub fn wilson_stacks(
    ball: &CayleyBall,
    oracle: &impl StackOracle,
    pop_cap: u64,
) -> Result<ForestConfig> {
    let g = WiredGraph::from_ball(ball);
    Ok(wilson_stacks_graph(&g, oracle, pop_cap)?.forest)
}
