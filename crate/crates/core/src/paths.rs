//! Counting simple paths between two vertices of a subgraph, exactly up to
//! a saturation cap.

use std::collections::HashMap;

use crate::ball::{EdgeId, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathCount {
    Exact(u64),
    /// At least this many; enumeration stopped at the cap.
    Saturated(u64),
}

impl PathCount {
    pub fn lower_bound(self) -> u64 {
        match self {
            PathCount::Exact(n) | PathCount::Saturated(n) => n,
        }
    }
}

/// Count simple paths from `a` to `b` using at most `max_len` edges,
/// stopping once `cap` paths are found. The empty path makes `a == b`
/// count 1; a vertex absent from the edge list has no incident paths.
pub fn count_simple_paths(
    edges: &[(EdgeId, VertexId, VertexId)],
    a: VertexId,
    b: VertexId,
    max_len: usize,
    cap: u64,
) -> PathCount {
    if a == b {
        return PathCount::Exact(1);
    }
    let cap = cap.max(1);
    let mut local: HashMap<VertexId, u32> = HashMap::new();
    let fresh = |v: VertexId, local: &mut HashMap<VertexId, u32>, next: &mut u32| -> u32 {
        *local.entry(v).or_insert_with(|| {
            let id = *next;
            *next += 1;
            id
        })
    };
    let mut next = 0u32;
    let mut adj: Vec<Vec<(u32, u32)>> = Vec::new();
    for (pos, &(_, x, y)) in edges.iter().enumerate() {
        let lx = fresh(x, &mut local, &mut next);
        let ly = fresh(y, &mut local, &mut next);
        while adj.len() < next as usize {
            adj.push(Vec::new());
        }
        adj[lx as usize].push((pos as u32, ly));
        adj[ly as usize].push((pos as u32, lx));
    }
    let (Some(&la), Some(&lb)) = (local.get(&a), local.get(&b)) else {
        return PathCount::Exact(0);
    };

    let mut visited = vec![false; adj.len()];
    visited[la as usize] = true;
    let mut count = 0u64;
    // Depth-first over vertex-simple edge paths.
    fn dfs(
        adj: &[Vec<(u32, u32)>],
        v: u32,
        target: u32,
        left: usize,
        visited: &mut [bool],
        count: &mut u64,
        cap: u64,
    ) -> bool {
        if left == 0 {
            return false;
        }
        for &(_, w) in &adj[v as usize] {
            if w == target {
                *count += 1;
                if *count >= cap {
                    return true;
                }
                continue;
            }
            if visited[w as usize] {
                continue;
            }
            visited[w as usize] = true;
            let full = dfs(adj, w, target, left - 1, visited, count, cap);
            visited[w as usize] = false;
            if full {
                return true;
            }
        }
        false
    }
    let saturated = dfs(&adj, la, lb, max_len, &mut visited, &mut count, cap);
    if saturated {
        PathCount::Saturated(count)
    } else {
        PathCount::Exact(count)
    }
}
