//! The two-stage forest construction: sprinkle a low-density bond
//! configuration over a Wilson sample, then resolve the union's cycles with
//! a fresh-label minimal spanning forest.

use crate::ball::CayleyBall;
use crate::error::Error;
use crate::forest::msf::minimal_spanning_forest;
use crate::forest::wilson::{wilson_stacks_graph, wilson_wired_graph, SeededStackOracle};
use crate::forest::{component_ids_of_edges, ForestBuilder, ForestConfig};
use crate::graph::WiredGraph;
use crate::percolation::{sample_labels, threshold, BondConfig, LabelConfig};
use crate::seed::SeedDomain;
use crate::Result;

pub const OMEGA_CONTEXT: &str = "pipeline/omega";
pub const FOREST_CONTEXT: &str = "pipeline/forest";
pub const RESOLVE_CONTEXT: &str = "pipeline/resolve";

/// One run of the construction, with everything needed to audit it.
#[derive(Debug, Clone)]
pub struct PipelineSample {
    /// Sprinkled bonds at density `epsilon`.
    pub omega: BondConfig,
    /// Wilson sample on the wired ball.
    pub f1: ForestConfig,
    /// Union of `omega` and `f1`.
    pub pi: BondConfig,
    /// Fresh labels that resolved the union's cycles.
    pub resolve_labels: LabelConfig<f64>,
    /// Minimal spanning forest of `pi` under `resolve_labels`.
    pub f2: ForestConfig,
    pub checks: PipelineChecks,
}

/// Structural facts verified on every sample.
#[derive(Debug, Clone, Copy)]
pub struct PipelineChecks {
    /// `f2` has no cycle.
    pub f2_acyclic: bool,
    /// `f2` spans: it induces the same vertex partition as `pi`.
    pub partitions_agree: bool,
    /// Every `pi`-cluster reaches the boundary sphere (vacuous when the
    /// ball has no boundary).
    pub clusters_reach_boundary: bool,
    /// Number of `pi`-clusters.
    pub pi_cluster_count: usize,
}

impl PipelineChecks {
    pub fn all_hold(&self) -> bool {
        self.f2_acyclic && self.partitions_agree && self.clusters_reach_boundary
    }
}

/// Run the construction once on a ball: sample bonds at `epsilon`, overlay
/// a Wilson forest, and re-forest the union with fresh labels.
pub fn construct_f(
    ball: &CayleyBall,
    epsilon: f64,
    seed: u64,
    builder: ForestBuilder,
    pop_cap: u64,
) -> Result<PipelineSample> {
    let g = WiredGraph::from_ball(ball);
    construct_f_on(ball, &g, epsilon, seed, builder, pop_cap)
}

/// Same construction with the wired view prebuilt, for callers looping
/// over many seeds.
pub fn construct_f_on(
    ball: &CayleyBall,
    g: &WiredGraph,
    epsilon: f64,
    seed: u64,
    builder: ForestBuilder,
    pop_cap: u64,
) -> Result<PipelineSample> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            expected: "within [0, 1]",
        });
    }
    let omega_seed = SeedDomain::derive(seed, OMEGA_CONTEXT).state();
    let omega_labels: LabelConfig<f64> = sample_labels(ball, omega_seed);
    let omega = threshold(&omega_labels, epsilon)?;

    let forest_seed = SeedDomain::derive(seed, FOREST_CONTEXT).state();
    let f1 = match builder {
        ForestBuilder::Lerw => {
            let mut rng = SeedDomain::derive(forest_seed, "walk").rng();
            wilson_wired_graph(g, &mut rng)?
        }
        ForestBuilder::Stacks => {
            let oracle = SeededStackOracle::new(forest_seed);
            wilson_stacks_graph(g, &oracle, pop_cap)?.forest
        }
    };

    let mut pi = omega.clone();
    for &e in f1.edges() {
        pi.insert_edge(e)?;
    }

    let resolve_seed = SeedDomain::derive(seed, RESOLVE_CONTEXT).state();
    let resolve_labels: LabelConfig<f64> = sample_labels(ball, resolve_seed);
    let f2 = minimal_spanning_forest(g, &pi, &resolve_labels)?;

    let checks = audit(ball, g, &pi, &f2);
    Ok(PipelineSample { omega, f1, pi, resolve_labels, f2, checks })
}

fn audit(
    ball: &CayleyBall,
    g: &WiredGraph,
    pi: &BondConfig,
    f2: &ForestConfig,
) -> PipelineChecks {
    let f2_acyclic = f2.is_acyclic(g);
    let pi_ids = component_ids_of_edges(g, pi.open_edges());
    let f2_ids = f2.component_ids(g);
    let partitions_agree = pi_ids == f2_ids;

    let mut reach = std::collections::HashSet::new();
    for v in 0..g.vertex_count() as u32 {
        if ball.is_boundary(v) {
            reach.insert(pi_ids[v as usize]);
        }
    }
    let mut cluster_reps = std::collections::HashSet::new();
    for &id in &pi_ids {
        cluster_reps.insert(id);
    }
    let clusters_reach_boundary = ball.boundary_count() == 0
        || cluster_reps.iter().all(|id| reach.contains(id));
    PipelineChecks {
        f2_acyclic,
        partitions_agree,
        clusters_reach_boundary,
        pi_cluster_count: cluster_reps.len(),
    }
}
