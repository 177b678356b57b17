//! Statistical indistinguishability proxy: do two large clusters of the
//! same configuration look alike under a vertex-level observable? Within-
//! configuration two-sample distances are compared against a same-role
//! across-configuration baseline.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::{CayleyBall, VertexId};
use crate::cluster::ClusterDecomposition;
use crate::error::Error;
use crate::percolation::{sample_bonds, BondConfig};
use crate::seed::SeedDomain;
use crate::stats;
use crate::Result;

pub const TEST_CONTEXT: &str = "indist/test";
pub const PLANT_CONTEXT: &str = "indist/planted";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum IndistObservable {
    /// Open incidence fraction at a vertex: open edge-ends over edge-ends
    /// present in the ball.
    OpenEdgeDensity,
    /// Open edge-end count at a vertex.
    #[default]
    MeanDegree,
    /// Second-sphere over first-sphere size in the cluster metric.
    GrowthRatio,
}

impl IndistObservable {
    pub fn name(self) -> &'static str {
        match self {
            IndistObservable::OpenEdgeDensity => "open_edge_density",
            IndistObservable::MeanDegree => "mean_degree",
            IndistObservable::GrowthRatio => "growth_ratio",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IndistParams {
    pub p: f64,
    pub configs: u64,
    /// Vertices resampled (with replacement) per cluster.
    pub resample: usize,
    pub alpha: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndistReport {
    pub observable: String,
    pub p: f64,
    pub alpha: f64,
    pub resample: usize,
    pub configs_total: u64,
    /// Configurations with at least two boundary-touching clusters.
    pub configs_used: usize,
    pub within: Vec<f64>,
    pub baseline: Vec<f64>,
    pub baseline_quantile: f64,
    /// Fraction of used configurations whose within statistic exceeds the
    /// baseline (1−α) quantile.
    pub exceedance: f64,
}

/// Aggregation layer over per-configuration sample pairs. `pairs[i]` holds
/// the observable samples of the two clusters of configuration i; the
/// baseline pairs each cluster with its same-role successor.
pub fn indist_outcome(
    pairs: &[(Vec<f64>, Vec<f64>)],
    alpha: f64,
) -> Result<(Vec<f64>, Vec<f64>, f64, f64)> {
    if !(0.0..1.0).contains(&alpha) || alpha == 0.0 {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            expected: "within (0, 1)",
        });
    }
    let n = pairs.len();
    if n < 2 {
        return Err(Error::InsufficientData {
            reason: format!("need at least 2 qualifying configurations, have {n}"),
        });
    }
    let within: Vec<f64> = pairs
        .iter()
        .map(|(a, b)| stats::ks_distance(a, b))
        .collect();
    let mut baseline = Vec::with_capacity(2 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        baseline.push(stats::ks_distance(&pairs[i].0, &pairs[j].0));
        baseline.push(stats::ks_distance(&pairs[i].1, &pairs[j].1));
    }
    let mut ordered = baseline.clone();
    ordered.sort_by(|a, b| a.partial_cmp(b).expect("distances are finite"));
    let q = stats::quantile(&ordered, 1.0 - alpha);
    let exceed = within.iter().filter(|&&w| w > q).count() as f64 / n as f64;
    Ok((within, baseline, q, exceed))
}

/// Observable samples for two distinct large boundary-touching clusters of
/// a configuration, or `None` when fewer than two exist. Large means size
/// at least 2·log₂|V| — twice the bar the phase scan uses: touching
/// clusters near the scan bar are small enough that their observable
/// distributions are idiosyncratic, which fattens the baseline tail and
/// drowns real between-cluster differences. The pair is drawn
/// uniformly at random (seeded), so under a common edge density the two
/// roles are exchangeable — canonical order would bias the first role
/// toward the cluster holding the lowest vertex ids.
pub fn cluster_pair_samples(
    ball: &CayleyBall,
    open: &BondConfig,
    observable: IndistObservable,
    resample: usize,
    sample_dom: &SeedDomain,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let big = 2.0 * (ball.vertex_count() as f64).log2();
    let decomp = ClusterDecomposition::from_ball(ball, open);
    let reps: Vec<VertexId> = decomp
        .clusters()
        .iter()
        .filter(|c| c.touches_boundary && (c.size as f64) >= big)
        .map(|c| c.rep)
        .collect();
    if reps.len() < 2 {
        return None;
    }
    let mut pick = sample_dom.child(2).rng();
    let i = pick.random_range(0..reps.len());
    let mut j = pick.random_range(0..reps.len() - 1);
    if j >= i {
        j += 1;
    }
    Some((
        resample_cluster(ball, open, &decomp, reps[i], observable, resample, sample_dom.child(0)),
        resample_cluster(ball, open, &decomp, reps[j], observable, resample, sample_dom.child(1)),
    ))
}

/// Observable samples for one uniformly chosen large boundary-touching
/// cluster, or `None` when there is none. Single-cluster variant used to
/// build synthetic cross-density pairs.
pub fn cluster_role_sample(
    ball: &CayleyBall,
    open: &BondConfig,
    observable: IndistObservable,
    resample: usize,
    sample_dom: &SeedDomain,
) -> Option<Vec<f64>> {
    let big = 2.0 * (ball.vertex_count() as f64).log2();
    let decomp = ClusterDecomposition::from_ball(ball, open);
    let reps: Vec<VertexId> = decomp
        .clusters()
        .iter()
        .filter(|c| c.touches_boundary && (c.size as f64) >= big)
        .map(|c| c.rep)
        .collect();
    if reps.is_empty() {
        return None;
    }
    let mut pick = sample_dom.child(2).rng();
    let rep = reps[pick.random_range(0..reps.len())];
    Some(resample_cluster(ball, open, &decomp, rep, observable, resample, sample_dom.child(0)))
}

fn resample_cluster(
    ball: &CayleyBall,
    open: &BondConfig,
    decomp: &ClusterDecomposition,
    rep: VertexId,
    observable: IndistObservable,
    resample: usize,
    dom: SeedDomain,
) -> Vec<f64> {
    let members: Vec<VertexId> = (0..ball.vertex_count() as u32)
        .filter(|&v| decomp.cluster_id_of(v) == rep)
        .collect();
    let mut rng = dom.rng();
    (0..resample)
        .map(|_| {
            let v = members[rng.random_range(0..members.len())];
            observable_at(ball, open, v, observable)
        })
        .collect()
}

fn observable_at(
    ball: &CayleyBall,
    open: &BondConfig,
    v: VertexId,
    observable: IndistObservable,
) -> f64 {
    match observable {
        IndistObservable::OpenEdgeDensity => {
            let ends = ball.ends_of(v);
            let open_ends = ends.iter().filter(|&&e| open.is_open(e)).count();
            open_ends as f64 / ends.len() as f64
        }
        IndistObservable::MeanDegree => {
            ball.ends_of(v).iter().filter(|&&e| open.is_open(e)).count() as f64
        }
        IndistObservable::GrowthRatio => {
            let mut first: Vec<VertexId> = Vec::new();
            for &e in ball.ends_of(v) {
                if open.is_open(e) {
                    let w = ball.other_endpoint(e, v);
                    if w != v && !first.contains(&w) {
                        first.push(w);
                    }
                }
            }
            let mut second: Vec<VertexId> = Vec::new();
            for &u in &first {
                for &e in ball.ends_of(u) {
                    if open.is_open(e) {
                        let w = ball.other_endpoint(e, u);
                        if w != v && !first.contains(&w) && !second.contains(&w) {
                            second.push(w);
                        }
                    }
                }
            }
            second.len() as f64 / (first.len().max(1)) as f64
        }
    }
}

/// Full proxy test: sample `configs` configurations at `p`, measure the
/// observable on each one's first two boundary-touching clusters, and
/// compare within-configuration distances to the same-role baseline.
pub fn indistinguishability_test(
    ball: &CayleyBall,
    observable: IndistObservable,
    params: IndistParams,
) -> Result<IndistReport> {
    if !(0.0..=1.0).contains(&params.p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: params.p,
            expected: "within [0, 1]",
        });
    }
    if params.resample == 0 {
        return Err(Error::OutOfRange {
            name: "resample",
            value: 0.0,
            expected: "at least 1",
        });
    }
    let dom = SeedDomain::derive(params.seed, TEST_CONTEXT);
    let maybe_pairs: Vec<Option<(Vec<f64>, Vec<f64>)>> = (0..params.configs)
        .into_par_iter()
        .map(|t| {
            let cfg_dom = dom.child(t);
            let open = sample_bonds(ball, params.p, cfg_dom.child(0).state())
                .expect("p validated above");
            cluster_pair_samples(
                ball,
                &open,
                observable,
                params.resample,
                &cfg_dom.child(1),
            )
        })
        .collect();
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = maybe_pairs.into_iter().flatten().collect();
    if pairs.len() < 30 {
        return Err(Error::InsufficientData {
            reason: format!(
                "only {} of {} configurations had two boundary-touching clusters (need 30)",
                pairs.len(),
                params.configs
            ),
        });
    }
    let (within, baseline, q, exceed) = indist_outcome(&pairs, params.alpha)?;
    Ok(IndistReport {
        observable: observable.name().into(),
        p: params.p,
        alpha: params.alpha,
        resample: params.resample,
        configs_total: params.configs,
        configs_used: within.len(),
        within,
        baseline,
        baseline_quantile: q,
        exceedance: exceed,
    })
}

/// Planted-difference pairs: role A sampled at `p_a`, role B at `p_b`, so
/// within-configuration distances carry a real distributional gap while
/// the same-role baseline stays null. Used to verify the test's power.
pub fn planted_pairs(
    ball: &CayleyBall,
    observable: IndistObservable,
    p_a: f64,
    p_b: f64,
    configs: u64,
    resample: usize,
    seed: u64,
) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let dom = SeedDomain::derive(seed, PLANT_CONTEXT);
    let one_role = |t: u64, role: u64, p: f64| -> Result<Option<Vec<f64>>> {
        let cfg = dom.child(t).child(role);
        let open = sample_bonds(ball, p, cfg.child(0).state())?;
        Ok(cluster_role_sample(ball, &open, observable, resample, &cfg.child(1)))
    };
    let mut pairs = Vec::new();
    for t in 0..configs {
        let (Some(a), Some(b)) = (one_role(t, 0, p_a)?, one_role(t, 1, p_b)?) else {
            continue;
        };
        pairs.push((a, b));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupKind, GroupSpec};

    #[test]
    fn identical_clusters_give_zero_statistic() {
        let a = vec![0.1, 0.4, 0.4, 0.9];
        let pairs = vec![(a.clone(), a.clone()), (a.clone(), a.clone())];
        let (within, _, _, _) = indist_outcome(&pairs, 0.05).unwrap();
        assert_eq!(within, vec![0.0, 0.0]);
    }

    #[test]
    fn outcome_validates_inputs() {
        let a = vec![0.1];
        assert!(indist_outcome(&[(a.clone(), a.clone())], 0.05).is_err());
        assert!(indist_outcome(&[(a.clone(), a.clone()), (a.clone(), a)], 0.0).is_err());
    }

    #[test]
    fn planted_difference_is_detected() {
        let spec = GroupSpec::new(GroupKind::Free { rank: 2 }, &["a", "b"]).unwrap();
        let ball = CayleyBall::build(&spec, 7, 1 << 21).unwrap();
        let pairs = planted_pairs(
            &ball,
            IndistObservable::OpenEdgeDensity,
            0.45,
            0.95,
            60,
            300,
            77,
        )
        .unwrap();
        assert!(pairs.len() >= 50, "qualifying configs: {}", pairs.len());
        let (_, _, _, exceed) = indist_outcome(&pairs, 0.05).unwrap();
        assert!(exceed >= 0.9, "exceedance {exceed}");
    }

    #[test]
    fn exchangeable_null_stays_near_alpha() {
        let spec = GroupSpec::new(GroupKind::Free { rank: 2 }, &["a", "b"]).unwrap();
        let ball = CayleyBall::build(&spec, 7, 1 << 21).unwrap();
        let report = indistinguishability_test(
            &ball,
            IndistObservable::MeanDegree,
            IndistParams { p: 0.5, configs: 100, resample: 100, alpha: 0.05, seed: 3 },
        )
        .unwrap();
        assert!(report.configs_used >= 30);
        assert!(report.exceedance <= 0.10, "exceedance {}", report.exceedance);
    }

    #[test]
    fn insufficient_clusters_are_reported() {
        // At p=1 the whole ball is one cluster, so no configuration yields
        // the two distinct boundary-touching clusters the test pairs up.
        let spec = GroupSpec::new(GroupKind::Free { rank: 2 }, &["a", "b"]).unwrap();
        let ball = CayleyBall::build(&spec, 4, 1 << 20).unwrap();
        match indistinguishability_test(
            &ball,
            IndistObservable::OpenEdgeDensity,
            IndistParams { p: 1.0, configs: 40, resample: 10, alpha: 0.05, seed: 1 },
        ) {
            Err(Error::InsufficientData { reason }) => {
                assert!(reason.contains("0 of 40"), "{reason}");
            }
            other => panic!("expected insufficient data, got {other:?}"),
        }
    }

    #[test]
    fn observables_compute_sane_values() {
        let spec = GroupSpec::new(GroupKind::Free { rank: 2 }, &["a", "b"]).unwrap();
        let ball = CayleyBall::build(&spec, 3, 1 << 20).unwrap();
        let open = sample_bonds(&ball, 1.0, 9).unwrap();
        // Full config: interior density 1, origin degree 4, growth 3 on a
        // tree (12 second-sphere over 4 first-sphere).
        assert_eq!(
            observable_at(&ball, &open, 0, IndistObservable::OpenEdgeDensity),
            1.0
        );
        assert_eq!(
            observable_at(&ball, &open, 0, IndistObservable::MeanDegree),
            4.0
        );
        assert_eq!(
            observable_at(&ball, &open, 0, IndistObservable::GrowthRatio),
            3.0
        );
    }
}
