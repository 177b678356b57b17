//! Minimal spanning forest of the open subgraph under i.i.d. edge labels:
//! delete from every cycle its label-maximal edge. Ties are broken by edge
//! id, so the forest is well defined even on degenerate label sets.

use crate::error::Error;
use crate::forest::ForestConfig;
use crate::graph::{DisjointSet, WiredGraph};
use crate::percolation::{BondConfig, LabelConfig};
use crate::real::Real;
use crate::Result;

/// Order edges by (label, id); the id tiebreak makes max/min comparisons
/// strict.
fn label_key<R: Real>(labels: &LabelConfig<R>, e: u32) -> (R, u32) {
    (labels.value(e), e)
}

/// Minimal spanning forest of the open edges: within each open cluster,
/// the spanning tree whose cycles all lose their maximal edge. Computed as
/// lightest-first growth, which deletes exactly those edges.
pub fn minimal_spanning_forest<R: Real>(
    g: &WiredGraph,
    open: &BondConfig,
    labels: &LabelConfig<R>,
) -> Result<ForestConfig> {
    if open.len() != g.edge_count() {
        return Err(Error::SizeMismatch { left: open.len(), right: g.edge_count() });
    }
    if labels.len() != g.edge_count() {
        return Err(Error::SizeMismatch { left: labels.len(), right: g.edge_count() });
    }
    let mut order: Vec<u32> = open.open_edges().collect();
    order.sort_unstable_by(|&a, &b| {
        label_key(labels, a).partial_cmp(&label_key(labels, b)).expect("labels are ordered")
    });
    let mut ds = DisjointSet::new(g.vertex_count());
    let mut edges = Vec::new();
    for e in order {
        let (a, b) = g.endpoints(e);
        if ds.unite(a, b) {
            edges.push(e);
        }
    }
    Ok(ForestConfig::from_parts(g.edge_count(), edges, None))
}

/// Literal form of the cycle rule, usable only on small graphs: enumerate
/// every simple cycle of the open subgraph and delete each cycle's maximal
/// edge. Exists so the growth implementation has an independent check.
pub fn cycle_deletion_oracle<R: Real>(
    g: &WiredGraph,
    open: &BondConfig,
    labels: &LabelConfig<R>,
) -> Result<ForestConfig> {
    if open.len() != g.edge_count() || labels.len() != g.edge_count() {
        return Err(Error::SizeMismatch {
            left: open.len().max(labels.len()),
            right: g.edge_count(),
        });
    }
    let mut deleted = vec![false; g.edge_count()];
    // Walk simple cycles by DFS over open edges, anchored at each cycle's
    // minimal vertex to avoid re-finding rotations; parallel edges form
    // two-edge cycles and are found the same way.
    let n = g.vertex_count();
    let mut kept: Vec<u32> = Vec::new();
    for anchor in 0..n as u32 {
        loop {
            // Restart the search after each deletion: deleting one edge can
            // retire many cycles at once.
            let found = find_cycle_from(g, open, &deleted, anchor);
            match found {
                None => break,
                Some(cycle_edges) => {
                    let &worst = cycle_edges
                        .iter()
                        .max_by(|&&a, &&b| {
                            label_key(labels, a)
                                .partial_cmp(&label_key(labels, b))
                                .expect("labels are ordered")
                        })
                        .expect("cycles are nonempty");
                    deleted[worst as usize] = true;
                }
            }
        }
    }
    for e in open.open_edges() {
        if !deleted[e as usize] {
            kept.push(e);
        }
    }
    Ok(ForestConfig::from_parts(g.edge_count(), kept, None))
}

/// One simple cycle through `anchor` using only surviving open edges, as a
/// list of edge ids; `None` when `anchor` lies on no such cycle.
fn find_cycle_from(
    g: &WiredGraph,
    open: &BondConfig,
    deleted: &[bool],
    anchor: u32,
) -> Option<Vec<u32>> {
    // DFS over edge paths from the anchor that never revisit a vertex,
    // closing back at the anchor through a distinct final edge.
    let mut on_path = vec![false; g.vertex_count()];
    on_path[anchor as usize] = true;
    let mut path_edges: Vec<u32> = Vec::new();
    fn dfs(
        g: &WiredGraph,
        open: &BondConfig,
        deleted: &[bool],
        anchor: u32,
        v: u32,
        on_path: &mut [bool],
        path_edges: &mut Vec<u32>,
    ) -> bool {
        for &e in g.ends_of(v) {
            if !open.is_open(e) || deleted[e as usize] {
                continue;
            }
            if path_edges.last() == Some(&e) {
                continue; // came in through this edge
            }
            let w = g.other_endpoint(e, v);
            if w == anchor && !path_edges.is_empty() {
                path_edges.push(e);
                return true;
            }
            if on_path[w as usize] {
                continue;
            }
            on_path[w as usize] = true;
            path_edges.push(e);
            if dfs(g, open, deleted, anchor, w, on_path, path_edges) {
                return true;
            }
            path_edges.pop();
            on_path[w as usize] = false;
        }
        false
    }
    if dfs(g, open, deleted, anchor, anchor, &mut on_path, &mut path_edges) {
        Some(path_edges)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::CayleyBall;
    use crate::group::{GroupKind, GroupSpec};
    use crate::percolation::{sample_labels, threshold};
    use crate::seed::SeedDomain;

    fn triangle() -> WiredGraph {
        WiredGraph::new(3, 0, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn triangle_drops_its_heaviest_edge() {
        let g = triangle();
        let labels = LabelConfig::from_values(vec![0.2f64, 0.5, 0.9]).unwrap();
        let open = BondConfig::from_open(vec![true; 3]);
        let f = minimal_spanning_forest(&g, &open, &labels).unwrap();
        assert_eq!(f.edges(), &[0, 1]);
        let o = cycle_deletion_oracle(&g, &open, &labels).unwrap();
        assert_eq!(o.edges(), &[0, 1]);
    }

    #[test]
    fn closed_edges_stay_out() {
        let g = triangle();
        let labels = LabelConfig::from_values(vec![0.9f64, 0.5, 0.2]).unwrap();
        let open = BondConfig::from_open(vec![true, false, true]);
        let f = minimal_spanning_forest(&g, &open, &labels).unwrap();
        assert_eq!(f.edges(), &[0, 2]);
    }

    #[test]
    fn parallel_edges_form_two_cycles() {
        // Two vertices joined by three parallel edges: keep the lightest.
        let g = WiredGraph::new(2, 0, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        let labels = LabelConfig::from_values(vec![0.7f64, 0.1, 0.4]).unwrap();
        let open = BondConfig::from_open(vec![true; 3]);
        let f = minimal_spanning_forest(&g, &open, &labels).unwrap();
        assert_eq!(f.edges(), &[1]);
        let o = cycle_deletion_oracle(&g, &open, &labels).unwrap();
        assert_eq!(o.edges(), &[1]);
    }

    /// The two routes to the forest must agree on every labeled subgraph,
    /// not only on hand-picked ones.
    #[test]
    fn growth_matches_cycle_deletion_on_random_inputs() {
        let spec = GroupSpec::new(GroupKind::FreeAbelian { rank: 2 }, &["x", "y"]).unwrap();
        let ball = CayleyBall::build(&spec, 2, 1 << 16).unwrap();
        let g = WiredGraph::from_ball(&ball);
        for trial in 0..40u64 {
            let labels: LabelConfig<f64> = sample_labels(&ball, 5000 + trial);
            let p = 0.2 + 0.6 * SeedDomain::derive(trial, "msf-p").uniform01();
            let open = threshold(&labels, p).unwrap();
            let fast = minimal_spanning_forest(&g, &open, &labels).unwrap();
            let slow = cycle_deletion_oracle(&g, &open, &labels).unwrap();
            assert_eq!(fast.edges(), slow.edges(), "trial {trial} at p={p}");
            assert!(fast.is_acyclic(&g));
            // Same partition as the open subgraph: spanning within clusters.
            let open_ids = crate::forest::component_ids_of_edges(&g, open.open_edges());
            let forest_ids = fast.component_ids(&g);
            assert_eq!(open_ids, forest_ids);
        }
    }

    /// Degenerate equal labels still produce a well-defined forest through
    /// the id tiebreak, and both routes pick the same one.
    #[test]
    fn equal_labels_tiebreak_by_edge_id() {
        let g = triangle();
        let labels = LabelConfig::from_values(vec![0.5f64, 0.5, 0.5]).unwrap();
        let open = BondConfig::from_open(vec![true; 3]);
        let f = minimal_spanning_forest(&g, &open, &labels).unwrap();
        let o = cycle_deletion_oracle(&g, &open, &labels).unwrap();
        assert_eq!(f.edges(), &[0, 1]);
        assert_eq!(o.edges(), &[0, 1]);
    }
}
