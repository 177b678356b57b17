//! Percolation phase scans over a p-grid: one-arm probability from the
//! origin, a two-reference uniqueness proxy, and counts of large
//! boundary-touching clusters, with threshold crossings reported per
//! radius.

use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{CayleyBall, VertexId};
use crate::error::Error;
use crate::group::GroupSpec;
use crate::percolation::{sample_labels, LabelConfig};
use crate::seed::SeedDomain;
use crate::stats;
use crate::Result;

pub const SCAN_CONTEXT: &str = "phase/scan";

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhasePoint {
    pub radius: u32,
    pub p: f64,
    pub trials: u64,
    /// Fraction of trials where the origin's cluster touches the sphere.
    pub theta_hat: f64,
    /// Fraction of trials where the two reference vertices share a cluster,
    /// among trials where both lie in boundary-touching clusters. NaN when
    /// no trial qualifies.
    pub u_hat: f64,
    /// Mean count of boundary-touching clusters with at least log₂|V|
    /// vertices.
    pub nbig_hat: f64,
    pub se_theta: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RadiusSummary {
    pub radius: u32,
    /// Smallest grid p with theta_hat ≥ δ_c.
    pub pc_hat: Option<f64>,
    /// Smallest grid p with u_hat ≥ 1 − δ_u (undefined points skipped).
    pub pu_hat: Option<f64>,
    /// The antipodal reference pair used for u_hat.
    pub reference_vertices: (VertexId, VertexId),
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseScanResult {
    pub group: String,
    pub delta_c: f64,
    pub delta_u: f64,
    pub points: Vec<PhasePoint>,
    pub summaries: Vec<RadiusSummary>,
}

#[derive(Debug, Clone, Copy)]
pub struct PhaseScanParams {
    pub trials: u64,
    pub seed: u64,
    pub delta_c: f64,
    pub delta_u: f64,
    pub vertex_cap: usize,
}

/// Antipodal reference pair for the uniqueness proxy: the first and last
/// vertices at word length R−1 in construction order. Rejected unless
/// their graph distance is at least R.
pub fn reference_pair(ball: &CayleyBall) -> Result<(VertexId, VertexId)> {
    let r = ball.radius();
    if r < 2 {
        return Err(Error::DegenerateBall {
            reason: format!("radius {r} leaves no room for an antipodal reference pair"),
        });
    }
    let level = r - 1;
    let mut first = None;
    let mut last = None;
    for v in 0..ball.vertex_count() as u32 {
        if ball.word_len(v) == level {
            if first.is_none() {
                first = Some(v);
            }
            last = Some(v);
        }
    }
    let (Some(a), Some(b)) = (first, last) else {
        return Err(Error::DegenerateBall {
            reason: format!("no vertices at word length {level}"),
        });
    };
    let dist = ball.distances_from(a)[b as usize];
    if a == b || dist < r {
        return Err(Error::DegenerateBall {
            reason: format!(
                "reference pair at distance {dist} is closer than the radius {r}"
            ),
        });
    }
    Ok((a, b))
}

/// Per-trial outcomes at each grid point, extracted by one sorted sweep.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct TrialPoint {
    pub origin_touches: bool,
    pub refs_touch: bool,
    pub refs_joined: bool,
    pub big_clusters: u32,
}

/// Sweep one label configuration across the ascending grid, maintaining an
/// incremental union-find instead of re-decomposing at each p.
pub(crate) fn sweep_trial(
    ball: &CayleyBall,
    labels: &LabelConfig<f64>,
    grid: &[f64],
    refs: (VertexId, VertexId),
    big_threshold: f64,
) -> Vec<TrialPoint> {
    let n = ball.vertex_count();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    let mut size = vec![1u32; n];
    let mut touches: Vec<bool> = (0..n as u32).map(|v| ball.is_boundary(v)).collect();
    let qualifies = |size: u32, touch: bool| touch && (size as f64) >= big_threshold;
    let mut big_count: i64 =
        (0..n).filter(|&v| qualifies(1, touches[v])).count() as i64;

    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }

    let mut order: Vec<u32> = (0..ball.edge_count() as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        (labels.value(a), a)
            .partial_cmp(&(labels.value(b), b))
            .expect("labels are ordered")
    });

    let mut out = Vec::with_capacity(grid.len());
    let mut cursor = 0usize;
    for &p in grid {
        while cursor < order.len() && labels.value(order[cursor]) <= p {
            let e = order[cursor];
            cursor += 1;
            let be = ball.edge(e);
            let (ra, rb) = (find(&mut parent, be.tail), find(&mut parent, be.head));
            if ra == rb {
                continue;
            }
            let before = qualifies(size[ra as usize], touches[ra as usize]) as i64
                + qualifies(size[rb as usize], touches[rb as usize]) as i64;
            let (big, small) = if size[ra as usize] >= size[rb as usize] {
                (ra, rb)
            } else {
                (rb, ra)
            };
            parent[small as usize] = big;
            size[big as usize] += size[small as usize];
            touches[big as usize] |= touches[small as usize];
            let after = qualifies(size[big as usize], touches[big as usize]) as i64;
            big_count += after - before;
        }
        let ro = find(&mut parent, 0);
        let (r1, r2) = (find(&mut parent, refs.0), find(&mut parent, refs.1));
        out.push(TrialPoint {
            origin_touches: touches[ro as usize],
            refs_touch: touches[r1 as usize] && touches[r2 as usize],
            refs_joined: r1 == r2,
            big_clusters: big_count as u32,
        });
    }
    out
}

/// Scan the grid at each radius. The grid must be strictly increasing
/// within [0, 1]; trials per grid point are independent and seeded per
/// (radius, trial).
pub fn phase_scan(
    spec: &GroupSpec,
    radii: &[u32],
    grid: &[f64],
    params: PhaseScanParams,
) -> Result<PhaseScanResult> {
    if radii.is_empty() || grid.is_empty() {
        return Err(Error::InsufficientData {
            reason: "phase scan needs at least one radius and one grid point".into(),
        });
    }
    if params.trials == 0 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: 0.0,
            expected: "at least 1",
        });
    }
    for w in grid.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::OutOfRange {
                name: "p grid",
                value: w[1],
                expected: "strictly increasing",
            });
        }
    }
    if !(0.0..=1.0).contains(&grid[0]) || !(0.0..=1.0).contains(grid.last().expect("nonempty")) {
        return Err(Error::OutOfRange {
            name: "p grid",
            value: grid[0].min(*grid.last().expect("nonempty")),
            expected: "within [0, 1]",
        });
    }

    let mut points = Vec::new();
    let mut summaries = Vec::new();
    for &radius in radii {
        let ball = CayleyBall::build(spec, radius, params.vertex_cap)?;
        let refs = reference_pair(&ball)?;
        let big_threshold = (ball.vertex_count() as f64).log2();
        let dom = SeedDomain::derive(params.seed, SCAN_CONTEXT).child(radius as u64);

        let per_trial: Vec<Vec<TrialPoint>> = (0..params.trials)
            .into_par_iter()
            .map(|t| {
                let labels: LabelConfig<f64> =
                    sample_labels(&ball, dom.child(t).state());
                sweep_trial(&ball, &labels, grid, refs, big_threshold)
            })
            .collect();

        let mut radius_points = Vec::with_capacity(grid.len());
        for (gi, &p) in grid.iter().enumerate() {
            let mut theta_n = 0u64;
            let mut u_den = 0u64;
            let mut u_num = 0u64;
            let mut big_sum = 0u64;
            for tp in per_trial.iter().map(|v| v[gi]) {
                theta_n += tp.origin_touches as u64;
                if tp.refs_touch {
                    u_den += 1;
                    u_num += tp.refs_joined as u64;
                }
                big_sum += tp.big_clusters as u64;
            }
            let trials = params.trials;
            let theta_hat = theta_n as f64 / trials as f64;
            let u_hat = if u_den == 0 { f64::NAN } else { u_num as f64 / u_den as f64 };
            radius_points.push(PhasePoint {
                radius,
                p,
                trials,
                theta_hat,
                u_hat,
                nbig_hat: big_sum as f64 / trials as f64,
                se_theta: stats::stderr_proportion(theta_hat, trials),
            });
        }
        let pc_hat = radius_points
            .iter()
            .find(|pt| pt.theta_hat >= params.delta_c)
            .map(|pt| pt.p);
        let pu_hat = radius_points
            .iter()
            .find(|pt| !pt.u_hat.is_nan() && pt.u_hat >= 1.0 - params.delta_u)
            .map(|pt| pt.p);
        summaries.push(RadiusSummary { radius, pc_hat, pu_hat, reference_vertices: refs });
        points.extend(radius_points);
    }
    Ok(PhaseScanResult {
        group: spec.name(),
        delta_c: params.delta_c,
        delta_u: params.delta_u,
        points,
        summaries,
    })
}
