//! Cost estimation for the cluster graphing: exact and sampled graphing
//! cost, the treeing-cost proxy from forest degrees at the origin, the
//! induction-formula algebra, and the first-return search.

use num_traits::Num;
use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{CayleyBall, VertexId};
use crate::cluster::ClusterDecomposition;
use crate::error::Error;
use crate::forest::pipeline::{construct_f_on, PipelineSample};
use crate::forest::ForestBuilder;
use crate::graph::WiredGraph;
use crate::group::Element;
use crate::percolation::label_of_edge;
use crate::seed::SeedDomain;
use crate::stats;
use crate::Result;

pub const GRAPHING_CONTEXT: &str = "cost/graphing";
pub const PIPELINE_CONTEXT: &str = "cost/pipeline";

/// Exact graphing cost: one generator per domain, each of measure p.
pub fn graphing_cost_exact(s_size: usize, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { name: "p", value: p, expected: "within [0, 1]" });
    }
    Ok(s_size as f64 * p)
}

/// Sampled graphing cost: mean over trials of the number of open origin
/// edges, one per generator slot.
pub fn graphing_cost_empirical(
    ball: &CayleyBall,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { name: "p", value: p, expected: "within [0, 1]" });
    }
    if trials == 0 {
        return Err(Error::OutOfRange { name: "trials", value: 0.0, expected: "at least 1" });
    }
    let slots = ball.spec().slot_count();
    let origin_edges: Vec<u32> = (0..slots)
        .map(|s| {
            ball.origin_edge(s).ok_or_else(|| Error::DegenerateBall {
                reason: format!("origin is missing its edge for generator slot {s}"),
            })
        })
        .collect::<Result<_>>()?;
    let dom = SeedDomain::derive(seed, GRAPHING_CONTEXT);
    let counts: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = dom.child(t).state();
            origin_edges
                .iter()
                .filter(|&&e| label_of_edge(trial_seed, e) <= p)
                .count() as f64
        })
        .collect();
    let mean = stats::mean(&counts);
    let se = stats::stderr_mean(&counts);
    Ok((mean, se))
}

/// What the treeing estimator needs from one pipeline run.
#[derive(Debug, Clone, Copy)]
pub struct TreeingSample {
    pub origin_degree_f2: usize,
    pub origin_touches_boundary: bool,
}

impl TreeingSample {
    pub fn from_pipeline(ball: &CayleyBall, g: &WiredGraph, s: &PipelineSample) -> Self {
        // The origin's π-cluster is boundary-touching iff some sphere
        // vertex shares its component.
        let ids = s.f2.component_ids(g);
        let origin_id = ids[0];
        let touches = (0..g.vertex_count() as u32)
            .any(|v| ball.is_boundary(v) && ids[v as usize] == origin_id);
        TreeingSample {
            origin_degree_f2: s.f2.degree_of(g, 0),
            origin_touches_boundary: touches,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TreeingCost {
    /// Fraction of samples whose origin cluster reaches the boundary.
    pub w: f64,
    pub w_se: f64,
    /// Half the conditional mean forest degree at the origin; `None` when
    /// no sample qualifies (w = 0 leaves the estimate undefined).
    pub c_hat: Option<f64>,
    pub c_se: Option<f64>,
    pub mean_origin_degree: Option<f64>,
    pub samples: usize,
    pub qualifying: usize,
}

/// Treeing-cost estimate over pipeline samples: ĉ = Ê[deg(o)/2 | origin
/// cluster boundary-touching], with w the qualifying fraction.
pub fn treeing_cost_estimate(samples: &[TreeingSample]) -> Result<TreeingCost> {
    if samples.is_empty() {
        return Err(Error::InsufficientData {
            reason: "treeing cost needs at least one sample".into(),
        });
    }
    let n = samples.len();
    let degs: Vec<f64> = samples
        .iter()
        .filter(|s| s.origin_touches_boundary)
        .map(|s| s.origin_degree_f2 as f64)
        .collect();
    let k = degs.len();
    let w = k as f64 / n as f64;
    let w_se = stats::stderr_proportion(w, n as u64);
    if k == 0 {
        return Ok(TreeingCost {
            w,
            w_se,
            c_hat: None,
            c_se: None,
            mean_origin_degree: None,
            samples: n,
            qualifying: 0,
        });
    }
    let halves: Vec<f64> = degs.iter().map(|d| d / 2.0).collect();
    Ok(TreeingCost {
        w,
        w_se,
        c_hat: Some(stats::mean(&halves)),
        c_se: Some(stats::stderr_mean(&halves)),
        mean_origin_degree: Some(stats::mean(&degs)),
        samples: n,
        qualifying: k,
    })
}

/// Normalized cost of the restriction: C|U − 1 = (C − 1)/w. Requires
/// w ∈ (0, 1] and C ≥ w.
pub fn induction_normalize<T>(c_ext: T, w: T) -> Result<T>
where
    T: Num + PartialOrd + Clone,
{
    check_weight(&w)?;
    if c_ext < w {
        return Err(Error::Undefined {
            reason: "extended cost below the restriction mass".into(),
        });
    }
    Ok(T::one() + (c_ext - T::one()) / w)
}

/// Inverse direction: extend a normalized restricted cost back to the full
/// space, C = 1 + w·(C|U − 1). Requires w ∈ (0, 1] and C|U ≥ 1.
pub fn extend_to_full<T>(c_restricted_norm: T, w: T) -> Result<T>
where
    T: Num + PartialOrd + Clone,
{
    check_weight(&w)?;
    if c_restricted_norm < T::one() {
        return Err(Error::Undefined {
            reason: "normalized restricted cost below 1".into(),
        });
    }
    Ok(T::one() + w * (c_restricted_norm - T::one()))
}

fn check_weight<T>(w: &T) -> Result<()>
where
    T: Num + PartialOrd + Clone,
{
    if *w <= T::zero() || *w > T::one() {
        return Err(Error::Undefined {
            reason: "restriction mass must lie in (0, 1]".into(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FirstReturn {
    /// The earliest enumerated element whose vertex sits in a
    /// boundary-touching cluster (identity when the origin's own cluster
    /// qualifies).
    Found { vertex: VertexId, element: Element },
    /// No enumerated element within word length R/2 qualifies; censored.
    NotFound,
}

/// Scan group elements in construction order (word length, then generator
/// order), restricted to word length ≤ R/2, for the first whose vertex
/// lies in a boundary-touching cluster.
pub fn first_return(ball: &CayleyBall, decomp: &ClusterDecomposition) -> FirstReturn {
    let max_len = ball.radius() / 2;
    for v in 0..ball.vertex_count() as u32 {
        if ball.word_len(v) > max_len {
            break; // construction order is sorted by word length
        }
        if decomp.info_of(v).touches_boundary {
            return FirstReturn::Found { vertex: v, element: ball.element(v).clone() };
        }
    }
    FirstReturn::NotFound
}

/// Full cost report for one (ball, ε): graphing cost at p = ε plus the
/// treeing estimate from pipeline samples.
#[derive(Debug, Clone, Serialize)]
pub struct CostReport {
    pub group: String,
    pub radius: u32,
    pub epsilon: f64,
    pub trials: u64,
    pub graphing_cost_exact: f64,
    pub graphing_cost_empirical: f64,
    pub graphing_cost_se: f64,
    pub w: f64,
    pub w_se: f64,
    pub mean_origin_degree: Option<f64>,
    pub treeing_cost_hat: Option<f64>,
    pub treeing_cost_se: Option<f64>,
    /// Treeing estimate carried back to the unrestricted space via the
    /// induction formula.
    pub extended_cost: Option<f64>,
}

pub fn cost_report(
    ball: &CayleyBall,
    epsilon: f64,
    trials: u64,
    seed: u64,
    builder: ForestBuilder,
    pop_cap: u64,
) -> Result<CostReport> {
    if trials == 0 {
        return Err(Error::OutOfRange { name: "trials", value: 0.0, expected: "at least 1" });
    }
    let g = WiredGraph::from_ball(ball);
    let dom = SeedDomain::derive(seed, PIPELINE_CONTEXT);
    let samples: Vec<TreeingSample> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = construct_f_on(ball, &g, epsilon, dom.child(t).state(), builder, pop_cap)?;
            Ok(TreeingSample::from_pipeline(ball, &g, &s))
        })
        .collect::<Result<_>>()?;
    let t = treeing_cost_estimate(&samples)?;
    let (emp, emp_se) = graphing_cost_empirical(ball, epsilon, trials, seed)?;
    let extended = match t.c_hat {
        Some(c) if t.w > 0.0 => Some(extend_to_full(c.max(1.0), t.w)?),
        _ => None,
    };
    Ok(CostReport {
        group: ball.spec().name(),
        radius: ball.radius(),
        epsilon,
        trials,
        graphing_cost_exact: graphing_cost_exact(ball.spec().slot_count(), epsilon)?,
        graphing_cost_empirical: emp,
        graphing_cost_se: emp_se,
        w: t.w,
        w_se: t.w_se,
        mean_origin_degree: t.mean_origin_degree,
        treeing_cost_hat: t.c_hat,
        treeing_cost_se: t.c_se,
        extended_cost: extended,
    })
}
