//! Acceptance gate. Each test covers one numbered criterion and prints a
//! single PASS/FAIL line with the measured quantities; tolerances are
//! pinned here, not configurable. Criterion 8 (byte-identical CLI reruns)
//! lives in the CLI crate's acceptance target.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use orbiforest::ball::CayleyBall;
use orbiforest::blocks::{block_decomposition, open_subgraph_edges};
use orbiforest::cluster::{origin_cluster, ClusterDecomposition};
use orbiforest::cost::{
    cost_report, extend_to_full, graphing_cost_empirical, graphing_cost_exact,
    induction_normalize,
};
use orbiforest::ends::ends_profile;
use orbiforest::forest::msf::{cycle_deletion_oracle, minimal_spanning_forest};
use orbiforest::forest::pipeline::construct_f_on;
use orbiforest::forest::wilson::{
    wilson_stacks_graph, wilson_wired_graph, SeededStackOracle, DEFAULT_POP_CAP,
};
use orbiforest::forest::ForestBuilder;
use orbiforest::graph::WiredGraph;
use orbiforest::group::{GroupKind, GroupSpec};
use orbiforest::indist::{
    indist_outcome, indistinguishability_test, planted_pairs, IndistObservable, IndistParams,
};
use orbiforest::percolation::{sample_labels, threshold, BondConfig, LabelConfig};
use orbiforest::phase::{phase_scan, PhaseScanParams};
use orbiforest::seed::SeedDomain;
use orbiforest::stats;

const VERTEX_CAP: usize = 2_000_000;

fn verdict(criterion: u32, label: &str, pass: bool, detail: &str) {
    let word = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion} ({label}): {word} — {detail}");
    assert!(pass, "criterion {criterion} ({label}) failed: {detail}");
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut g = Vec::new();
    let mut i = 0u32;
    loop {
        let p = lo + step * f64::from(i);
        if p > hi + 1e-9 {
            return g;
        }
        g.push((p * 1e9).round() / 1e9);
        i += 1;
    }
}

fn free2() -> GroupSpec {
    GroupSpec::new(GroupKind::Free { rank: 2 }, &["a", "b"]).unwrap()
}

// ---------------------------------------------------------------- 1

/// Integer determinant by fraction-free (Bareiss) elimination.
fn int_determinant(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Spanning tree count via the reduced combinatorial Laplacian.
fn matrix_tree_count(n: usize, edges: &[(u32, u32)]) -> i128 {
    let mut lap = vec![vec![0i128; n]; n];
    for &(a, b) in edges {
        let (a, b) = (a as usize, b as usize);
        lap[a][a] += 1;
        lap[b][b] += 1;
        lap[a][b] -= 1;
        lap[b][a] -= 1;
    }
    let reduced: Vec<Vec<i128>> =
        (1..n).map(|i| (1..n).map(|j| lap[i][j]).collect()).collect();
    int_determinant(reduced)
}

fn spanning_triples(edges: &[(u32, u32)]) -> Vec<[u32; 3]> {
    let m = edges.len() as u32;
    let mut out = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                let mut ds = orbiforest::graph::DisjointSet::new(4);
                let mut acyclic = true;
                for &e in &[a, b, c] {
                    let (x, y) = edges[e as usize];
                    acyclic &= ds.unite(x, y);
                }
                if acyclic {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

#[test]
fn criterion_1_wilson_uniformity() {
    let t0 = Instant::now();
    let k4_edges: [(u32, u32); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let g = WiredGraph::new(4, 0, &k4_edges).unwrap();

    let trees = spanning_triples(&k4_edges);
    let oracle = matrix_tree_count(4, &k4_edges);
    assert_eq!(oracle, 16);
    assert_eq!(trees.len(), 16);
    let index_of = |f: &orbiforest::forest::ForestConfig| -> usize {
        let mut key: Vec<u32> = f.edges().to_vec();
        key.sort_unstable();
        trees
            .iter()
            .position(|t| t[..] == key[..])
            .expect("sample is a spanning tree of K4")
    };

    let runs: u64 = 160_000;
    let dom = SeedDomain::derive(411, "acceptance/wilson");
    let mut lerw_counts = vec![0u64; 16];
    let mut rng = dom.child(0).rng();
    for _ in 0..runs {
        let f = wilson_wired_graph(&g, &mut rng).unwrap();
        lerw_counts[index_of(&f)] += 1;
    }
    let mut stack_counts = vec![0u64; 16];
    for t in 0..runs {
        let oracle = SeededStackOracle::new(dom.child(1).child(t).state());
        let f = wilson_stacks_graph(&g, &oracle, DEFAULT_POP_CAP).unwrap().forest;
        stack_counts[index_of(&f)] += 1;
    }

    let expect = runs as f64 / 16.0;
    let sigma = (runs as f64 * (1.0 / 16.0) * (15.0 / 16.0)).sqrt();
    let within_3sigma = |counts: &[u64]| {
        counts.iter().all(|&c| (c as f64 - expect).abs() <= 3.0 * sigma)
    };
    let expected = vec![expect; 16];
    let p_lerw = stats::chi2_goodness_of_fit(&lerw_counts, &expected);
    let p_stacks = stats::chi2_goodness_of_fit(&stack_counts, &expected);
    let p_between = stats::chi2_two_sample(&lerw_counts, &stack_counts);
    let elapsed = t0.elapsed().as_secs_f64();

    let pass = within_3sigma(&lerw_counts)
        && within_3sigma(&stack_counts)
        && p_lerw > 0.01
        && p_stacks > 0.01
        && p_between > 0.01
        && elapsed < 10.0;
    verdict(
        1,
        "wilson uniformity on K4",
        pass,
        &format!(
            "16 trees (matrix-tree det 16), {runs} runs/builder, chi2 p lerw={p_lerw:.3} \
             stacks={p_stacks:.3} between={p_between:.3}, {elapsed:.1}s"
        ),
    );
}

// ---------------------------------------------------------------- 2

#[test]
fn criterion_2_msf_equivalence() {
    let t0 = Instant::now();
    let dom = SeedDomain::derive(412, "acceptance/msf");
    let instances = 200;
    let mut agree = 0;
    for t in 0..instances {
        let mut rng = dom.child(t).rng();
        let n = rng.random_range(2..=10usize);
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for v in 1..n as u32 {
            edges.push((rng.random_range(0..v), v));
        }
        let extra = rng.random_range(0..=n.min(6));
        for _ in 0..extra {
            let a = rng.random_range(0..n as u32);
            let b = rng.random_range(0..n as u32);
            if a != b && !edges.contains(&(a.min(b), a.max(b))) {
                edges.push((a.min(b), a.max(b)));
            }
        }
        let g = WiredGraph::new(n, 0, &edges).unwrap();
        let labels =
            LabelConfig::from_values((0..edges.len()).map(|_| rng.random::<f64>()).collect())
                .unwrap();
        let open = BondConfig::from_open(vec![true; edges.len()]);
        let kruskal = minimal_spanning_forest(&g, &open, &labels).unwrap();
        let brute = cycle_deletion_oracle(&g, &open, &labels).unwrap();
        let mut a: Vec<u32> = kruskal.edges().to_vec();
        let mut b: Vec<u32> = brute.edges().to_vec();
        a.sort_unstable();
        b.sort_unstable();
        agree += (a == b) as u32;
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = agree == instances as u32 && elapsed < 5.0;
    verdict(
        2,
        "msf equals cycle deletion",
        pass,
        &format!("{agree}/{instances} random connected graphs agree, {elapsed:.1}s"),
    );
}

// ---------------------------------------------------------------- 3

#[test]
fn criterion_3_coupling_monotonicity() {
    let ball = CayleyBall::build(&free2(), 6, VERTEX_CAP).unwrap();
    let dom = SeedDomain::derive(413, "acceptance/coupling");
    let ps = grid(0.02, 0.98, 0.02);
    let configs = 1000u64;
    let mut violations = 0u64;
    for t in 0..configs {
        let labels: LabelConfig<f64> = sample_labels(&ball, dom.child(t).state());
        let opens: Vec<BondConfig> =
            ps.iter().map(|&p| threshold(&labels, p).unwrap()).collect();
        for i in 0..opens.len() {
            for j in i + 1..opens.len() {
                for e in 0..ball.edge_count() as u32 {
                    if opens[i].is_open(e) && !opens[j].is_open(e) {
                        violations += 1;
                    }
                }
            }
        }
    }
    let pairs = configs as usize * ps.len() * (ps.len() - 1) / 2;
    verdict(
        3,
        "threshold coupling monotone",
        violations == 0,
        &format!("{violations} edge violations over {pairs} ordered grid pairs"),
    );
}

// ---------------------------------------------------------------- 4

/// Reach probability of the sphere from the origin in the radius-R ball
/// of the 4-regular tree: branching recursion over the 3 outward children
/// per non-origin vertex, 4 at the origin.
fn tree_theta(p: f64, radius: u32) -> f64 {
    let mut f = 1.0;
    for _ in 1..radius {
        f = 1.0 - (1.0 - p * f).powi(3);
    }
    1.0 - (1.0 - p * f).powi(4)
}

#[test]
fn criterion_4_tree_critical_value() {
    let t0 = Instant::now();
    let ps = grid(0.02, 0.98, 0.02);
    let delta_c = 0.25;
    let scan = phase_scan(
        &free2(),
        &[10],
        &ps,
        PhaseScanParams {
            trials: 2000,
            seed: 20260822,
            delta_c,
            delta_u: 0.05,
            vertex_cap: VERTEX_CAP,
        },
    )
    .unwrap();
    let pc = scan.summaries[0].pc_hat;
    let oracle = ps.iter().copied().find(|&p| tree_theta(p, 10) >= delta_c);
    let u_ok = scan
        .points
        .iter()
        .all(|pt| pt.u_hat.is_nan() || pt.u_hat < 1.0 - 0.05);
    let max_u = scan
        .points
        .iter()
        .filter(|pt| !pt.u_hat.is_nan())
        .map(|pt| pt.u_hat)
        .fold(0.0, f64::max);
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = match (pc, oracle) {
        (Some(pc), Some(oracle)) => {
            (0.28..=0.38).contains(&pc) && (pc - oracle).abs() < 0.021 && u_ok && elapsed < 60.0
        }
        _ => false,
    };
    verdict(
        4,
        "tree critical value",
        pass,
        &format!(
            "pc_hat={pc:?} oracle_crossing={oracle:?} (exact value 1/3), max u_hat={max_u:.3}, \
             {elapsed:.1}s"
        ),
    );
}

// ---------------------------------------------------------------- 5

/// Left-right open-bond crossing probability of an (l+1)×(l+1) vertex box.
fn crossing_probability(l: usize, p: f64, trials: u64, dom: SeedDomain) -> f64 {
    let side = l + 1;
    let n = side * side;
    let (left, right) = (n as u32, n as u32 + 1);
    let mut hits = 0u64;
    for t in 0..trials {
        let mut rng = dom.child(t).rng();
        let mut ds = orbiforest::graph::DisjointSet::new(n + 2);
        for y in 0..side {
            for x in 0..side {
                let v = (y * side + x) as u32;
                if x + 1 < side && rng.random::<f64>() <= p {
                    ds.unite(v, v + 1);
                }
                if y + 1 < side && rng.random::<f64>() <= p {
                    ds.unite(v, v + side as u32);
                }
            }
        }
        for y in 0..side {
            ds.unite(left, (y * side) as u32);
            ds.unite(right, (y * side + side - 1) as u32);
        }
        hits += (ds.find(left) == ds.find(right)) as u64;
    }
    hits as f64 / trials as f64
}

#[test]
fn criterion_5_euclidean_control() {
    let t0 = Instant::now();
    let z2 = GroupSpec::new(GroupKind::FreeAbelian { rank: 2 }, &["x", "y"]).unwrap();
    let ps = grid(0.30, 0.70, 0.02);
    let scan = phase_scan(
        &z2,
        &[40],
        &ps,
        PhaseScanParams {
            trials: 500,
            seed: 20260823,
            delta_c: 0.25,
            delta_u: 0.05,
            vertex_cap: VERTEX_CAP,
        },
    )
    .unwrap();
    let pc = scan.summaries[0].pc_hat;

    // Independent oracle: where the 40×40 box crossing probability passes
    // one half, linearly interpolated between bracketing grid points.
    let dom = SeedDomain::derive(415, "acceptance/crossing");
    let cps: Vec<(f64, f64)> = grid(0.40, 0.60, 0.02)
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, crossing_probability(40, p, 500, dom.child(i as u64))))
        .collect();
    let oracle = cps.windows(2).find_map(|w| {
        let ((p0, c0), (p1, c1)) = (w[0], w[1]);
        (c0 < 0.5 && c1 >= 0.5).then(|| p0 + (p1 - p0) * (0.5 - c0) / (c1 - c0))
    });

    let elapsed = t0.elapsed().as_secs_f64();
    let pass = match (pc, oracle) {
        (Some(pc), Some(oracle)) => {
            (0.45..=0.55).contains(&pc) && (0.45..=0.55).contains(&oracle) && elapsed < 60.0
        }
        _ => false,
    };
    verdict(
        5,
        "euclidean control",
        pass,
        &format!(
            "pc_hat={pc:?}, crossing oracle root={}, {elapsed:.1}s",
            oracle.map_or_else(|| "none".into(), |o| format!("{o:.4}"))
        ),
    );
}

// ---------------------------------------------------------------- 6

fn product_f2_z() -> GroupSpec {
    GroupSpec::new(
        GroupKind::ProductWithZ { inner: Box::new(GroupKind::Free { rank: 2 }) },
        &["a", "b", "z"],
    )
    .unwrap()
}

#[test]
fn criterion_6_pipeline_guarantees() {
    let t0 = Instant::now();
    let ball = CayleyBall::build(&product_f2_z(), 6, VERTEX_CAP).unwrap();
    let g = WiredGraph::from_ball(&ball);
    let dom = SeedDomain::derive(416, "acceptance/pipeline");
    let samples = 100u64;
    let mut checks_hold = 0u64;
    let mut medians_ok = 0u64;
    let mut max_block = 0usize;
    let mut touching = 0u64;
    let mut branchy = 0u64;
    for t in 0..samples {
        let s = construct_f_on(
            &ball,
            &g,
            0.05,
            dom.child(t).state(),
            ForestBuilder::Lerw,
            DEFAULT_POP_CAP,
        )
        .unwrap();
        checks_hold += s.checks.all_hold() as u64;
        let report = block_decomposition(&open_subgraph_edges(&g, &s.pi));
        medians_ok += (report.median_block_size <= 3.0) as u64;
        max_block = max_block.max(report.max_block_size);
        let forest_bonds = s.f2.to_bonds();
        let decomp = ClusterDecomposition::from_ball(&ball, &forest_bonds);
        if decomp.info_of(0).touches_boundary {
            touching += 1;
            let view = origin_cluster(&decomp, &ball, &forest_bonds);
            let profile = ends_profile(&ball, &view, 0, &[2]).unwrap();
            branchy += (profile.branch_counts[0] >= 3) as u64;
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let branch_rate = branchy as f64 / touching.max(1) as f64;
    let pass = checks_hold == samples
        && medians_ok == samples
        && touching > 0
        && branch_rate >= 0.8
        && elapsed < 60.0;
    verdict(
        6,
        "pipeline guarantees",
        pass,
        &format!(
            "acyclic+partition checks {checks_hold}/{samples}, block median<=3 in \
             {medians_ok}/{samples} (max block {max_block}), >=3 branches at r=2 in \
             {branchy}/{touching} boundary-touching samples, {elapsed:.1}s"
        ),
    );
}

// ---------------------------------------------------------------- 7

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[test]
fn criterion_7_cost_algebra() {
    let t0 = Instant::now();

    // Sampled graphing cost tracks |S|·p over the grid.
    let ball = CayleyBall::build(&free2(), 6, VERTEX_CAP).unwrap();
    let mut worst_z = 0.0f64;
    for (i, &p) in grid(0.02, 0.98, 0.02).iter().enumerate() {
        let (emp, se) = graphing_cost_empirical(&ball, p, 10_000, 417 + i as u64).unwrap();
        let exact = graphing_cost_exact(2, p).unwrap();
        let z = if se > 0.0 {
            (emp - exact).abs() / se
        } else if emp == exact {
            0.0
        } else {
            f64::INFINITY
        };
        worst_z = worst_z.max(z);
    }
    let graphing_ok = worst_z <= 3.0;

    // Induction round trip is the identity in exact arithmetic.
    let mut rng = SeedDomain::derive(417, "acceptance/induction").rng();
    let mut roundtrip_ok = true;
    for _ in 0..1000 {
        let denom = rng.random_range(1..=1_000_000i64);
        let c = big(1) + big(rng.random_range(0..=3 * denom)) / big(denom);
        let w = big(rng.random_range(1..=denom)) / big(denom);
        let back =
            induction_normalize(extend_to_full(c.clone(), w.clone()).unwrap(), w).unwrap();
        roundtrip_ok &= back == c;
    }

    // Control groups: the line costs exactly 1, the 4-regular tree exactly 2.
    let z_ball = CayleyBall::build(
        &GroupSpec::new(GroupKind::FreeAbelian { rank: 1 }, &["x"]).unwrap(),
        8,
        VERTEX_CAP,
    )
    .unwrap();
    let z_report =
        cost_report(&z_ball, 0.05, 300, 418, ForestBuilder::Lerw, DEFAULT_POP_CAP).unwrap();
    let f_ball = CayleyBall::build(&free2(), 5, VERTEX_CAP).unwrap();
    let f_report =
        cost_report(&f_ball, 0.05, 300, 419, ForestBuilder::Lerw, DEFAULT_POP_CAP).unwrap();
    let controls_ok =
        z_report.treeing_cost_hat == Some(1.0) && f_report.treeing_cost_hat == Some(2.0);

    // The product group lands strictly between: ĉ > 1 by at least 3 se.
    let pz_ball = CayleyBall::build(&product_f2_z(), 6, VERTEX_CAP).unwrap();
    let pz =
        cost_report(&pz_ball, 0.05, 1500, 420, ForestBuilder::Lerw, DEFAULT_POP_CAP).unwrap();
    let (c_hat, c_se) = (pz.treeing_cost_hat.unwrap(), pz.treeing_cost_se.unwrap());
    let margin = (c_hat - 1.0) / c_se;
    let product_ok = margin >= 3.0;

    let elapsed = t0.elapsed().as_secs_f64();
    let pass = graphing_ok && roundtrip_ok && controls_ok && product_ok;
    verdict(
        7,
        "cost algebra",
        pass,
        &format!(
            "graphing worst |z|={worst_z:.2}, induction round-trip exact={roundtrip_ok}, \
             line c={:?} tree c={:?}, product c={c_hat:.3} (+{margin:.1} se), {elapsed:.1}s",
            z_report.treeing_cost_hat, f_report.treeing_cost_hat
        ),
    );
}

// ---------------------------------------------------------------- 9

#[test]
fn criterion_9_indistinguishability_proxy() {
    let t0 = Instant::now();
    let ball = CayleyBall::build(&free2(), 7, VERTEX_CAP).unwrap();

    let pairs = planted_pairs(&ball, IndistObservable::OpenEdgeDensity, 0.45, 0.95, 60, 300, 77)
        .unwrap();
    let (_, _, _, planted_exceed) = indist_outcome(&pairs, 0.05).unwrap();

    let null = indistinguishability_test(
        &ball,
        IndistObservable::MeanDegree,
        IndistParams { p: 0.5, configs: 100, resample: 100, alpha: 0.05, seed: 3 },
    )
    .unwrap();

    let elapsed = t0.elapsed().as_secs_f64();
    let pass = pairs.len() >= 50
        && planted_exceed >= 0.9
        && null.configs_used >= 30
        && null.exceedance <= 0.10;
    verdict(
        9,
        "indistinguishability proxy",
        pass,
        &format!(
            "planted exceedance={planted_exceed:.3} ({} pairs), null exceedance={:.3} \
             ({} configs), {elapsed:.1}s",
            pairs.len(),
            null.exceedance,
            null.configs_used
        ),
    );
}
