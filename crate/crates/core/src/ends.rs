//! Finite ends profiles: how many separate boundary-reaching branches a
//! cluster keeps after the word-metric ball around a center vertex is
//! removed.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::ball::{CayleyBall, VertexId};
use crate::cluster::ClusterView;
use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct EndsProfile {
    pub center: VertexId,
    pub radii: Vec<u32>,
    /// For each radius r: number of components of the cluster minus the
    /// open r-ball around the center (ambient word metric) that contain a
    /// sphere vertex of the ambient ball.
    pub branch_counts: Vec<usize>,
}

/// Profile a cluster's boundary-reaching branches at each listed radius.
/// Radii must stay below the ball radius; the center must lie in the
/// cluster.
pub fn ends_profile(
    ball: &CayleyBall,
    view: &ClusterView,
    center: VertexId,
    radii: &[u32],
) -> Result<EndsProfile> {
    for &r in radii {
        if r >= ball.radius() {
            return Err(Error::RadiusOutOfRange { radius: r, ball_radius: ball.radius() });
        }
    }
    let n = view.vertices.len();
    let mut local: HashMap<VertexId, u32> = HashMap::with_capacity(n);
    for (i, &v) in view.vertices.iter().enumerate() {
        local.insert(v, i as u32);
    }
    if !local.contains_key(&center) {
        return Err(Error::VertexOutOfBounds { vertex: center as usize, vertices: n });
    }
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &e in &view.open_edges {
        let be = ball.edge(e);
        let (a, b) = (local[&be.tail], local[&be.head]);
        adj[a as usize].push(b);
        adj[b as usize].push(a);
    }
    // Ambient word-metric distances from the center, restricted to the
    // cluster's vertices.
    let ambient = ball.distances_from(center);
    let dist: Vec<u32> =
        view.vertices.iter().map(|&v| ambient[v as usize]).collect();
    let is_sphere: Vec<bool> =
        view.vertices.iter().map(|&v| ball.is_boundary(v)).collect();

    let mut branch_counts = Vec::with_capacity(radii.len());
    let mut seen = vec![u32::MAX; n];
    for (round, &r) in radii.iter().enumerate() {
        let round = round as u32;
        let alive = |v: u32| dist[v as usize] >= r; // drop the open r-ball
        let mut count = 0usize;
        for start in 0..n as u32 {
            if !alive(start) || seen[start as usize] == round {
                continue;
            }
            let mut reaches = false;
            seen[start as usize] = round;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                reaches |= is_sphere[v as usize];
                for &w in &adj[v as usize] {
                    if alive(w) && seen[w as usize] != round {
                        seen[w as usize] = round;
                        queue.push_back(w);
                    }
                }
            }
            if reaches {
                count += 1;
            }
        }
        branch_counts.push(count);
    }
    Ok(EndsProfile { center, radii: radii.to_vec(), branch_counts })
}
