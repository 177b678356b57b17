//! Built-in oracle checks: `orbiforest selftest` runs a compact version
//! of the verification suite (closed-form counts, distributional checks
//! against exact references, exact algebraic round trips) without needing
//! a config file. One line per suite; nonzero exit if any suite fails.

use rand::Rng;

use orbiforest::ball::CayleyBall;
use orbiforest::cost::{cost_report, extend_to_full, induction_normalize};
use orbiforest::forest::msf::{cycle_deletion_oracle, minimal_spanning_forest};
use orbiforest::forest::pipeline::construct_f;
use orbiforest::forest::wilson::{
    wilson_stacks_graph, wilson_wired, wilson_wired_graph, SeededStackOracle, DEFAULT_POP_CAP,
};
use orbiforest::forest::ForestBuilder;
use orbiforest::graph::{DisjointSet, WiredGraph};
use orbiforest::group::{GroupKind, GroupSpec};
use orbiforest::percolation::{sample_bonds, sample_labels, threshold, BondConfig, LabelConfig};
use orbiforest::seed::SeedDomain;
use orbiforest::stats;

use crate::CliError;

const VERTEX_CAP: usize = 2_000_000;

type Suite = fn() -> Result<(), String>;

pub fn run() -> Result<(), CliError> {
    let suites: [(&str, Suite); 9] = [
        ("seed-streams", seed_streams),
        ("ball-counts", ball_counts),
        ("wilson-uniformity", wilson_uniformity),
        ("msf-equivalence", msf_equivalence),
        ("coupling-monotonicity", coupling_monotonicity),
        ("induction-round-trip", induction_round_trip),
        ("pipeline-checks", pipeline_checks),
        ("cost-controls", cost_controls),
        ("determinism", determinism),
    ];
    let mut failures = 0u32;
    for (name, suite) in suites {
        match suite() {
            Ok(()) => println!("selftest {name}: PASS"),
            Err(detail) => {
                println!("selftest {name}: FAIL — {detail}");
                failures += 1;
            }
        }
    }
    if failures == 0 {
        println!("selftest: all {} suites passed", suites.len());
        Ok(())
    } else {
        Err(CliError::Selftest(format!("{failures} of {} suites failed", suites.len())))
    }
}

fn fail(detail: String) -> Result<(), String> {
    Err(detail)
}

fn seed_streams() -> Result<(), String> {
    let a = SeedDomain::derive(1, "selftest").child(0).state();
    let b = SeedDomain::derive(1, "selftest").child(0).state();
    let c = SeedDomain::derive(1, "selftest").child(1).state();
    let d = SeedDomain::derive(2, "selftest").child(0).state();
    if a != b {
        return fail("derivation is not repeatable".into());
    }
    if a == c || a == d {
        return fail("sibling or foreign streams collide".into());
    }
    let x: u64 = SeedDomain::derive(1, "selftest").rng().random();
    let y: u64 = SeedDomain::derive(1, "selftest").rng().random();
    if x != y {
        return fail("rng construction is not repeatable".into());
    }
    Ok(())
}

fn ball_counts() -> Result<(), String> {
    // Free rank 2, R=3: spheres 1,4,12,36 → 53 vertices; the ball is a
    // tree, so 52 edges.
    let f2 = GroupSpec::new(GroupKind::Free { rank: 2 }, &["a", "b"])
        .map_err(|e| e.to_string())?;
    let ball = CayleyBall::build(&f2, 3, VERTEX_CAP).map_err(|e| e.to_string())?;
    if (ball.vertex_count(), ball.edge_count(), ball.boundary_count()) != (53, 52, 36) {
        return fail(format!(
            "free rank 2 R=3: got ({}, {}, {}), want (53, 52, 36)",
            ball.vertex_count(),
            ball.edge_count(),
            ball.boundary_count()
        ));
    }
    // Z^2, R=3: 2R^2+2R+1 = 25 vertices, 4R^2 = 36 edges, 4R = 12 on the
    // sphere.
    let z2 = GroupSpec::new(GroupKind::FreeAbelian { rank: 2 }, &["x", "y"])
        .map_err(|e| e.to_string())?;
    let ball = CayleyBall::build(&z2, 3, VERTEX_CAP).map_err(|e| e.to_string())?;
    if (ball.vertex_count(), ball.edge_count(), ball.boundary_count()) != (25, 36, 12) {
        return fail(format!(
            "Z^2 R=3: got ({}, {}, {}), want (25, 36, 12)",
            ball.vertex_count(),
            ball.edge_count(),
            ball.boundary_count()
        ));
    }
    // Z, R=5: a path of 11 vertices.
    let z = GroupSpec::new(GroupKind::FreeAbelian { rank: 1 }, &["x"])
        .map_err(|e| e.to_string())?;
    let ball = CayleyBall::build(&z, 5, VERTEX_CAP).map_err(|e| e.to_string())?;
    if (ball.vertex_count(), ball.edge_count(), ball.boundary_count()) != (11, 10, 2) {
        return fail(format!(
            "Z R=5: got ({}, {}, {}), want (11, 10, 2)",
            ball.vertex_count(),
            ball.edge_count(),
            ball.boundary_count()
        ));
    }
    Ok(())
}

fn wilson_uniformity() -> Result<(), String> {
    // The complete graph on four vertices has 16 spanning trees; both
    // builders must hit each with frequency 1/16.
    let edges: [(u32, u32); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let g = WiredGraph::new(4, 0, &edges).map_err(|e| e.to_string())?;
    let mut trees: Vec<[u32; 3]> = Vec::new();
    for a in 0..6u32 {
        for b in a + 1..6 {
            for c in b + 1..6 {
                let mut ds = DisjointSet::new(4);
                let mut acyclic = true;
                for &e in &[a, b, c] {
                    let (x, y) = edges[e as usize];
                    acyclic &= ds.unite(x, y);
                }
                if acyclic {
                    trees.push([a, b, c]);
                }
            }
        }
    }
    if trees.len() != 16 {
        return fail(format!("enumerated {} spanning trees of K4, want 16", trees.len()));
    }
    let index_of = |f: &orbiforest::forest::ForestConfig| -> Option<usize> {
        let key: Vec<u32> = f.edges().to_vec();
        trees.iter().position(|t| t[..] == key[..])
    };

    let runs: u64 = 16_000;
    let dom = SeedDomain::derive(31, "selftest/wilson");
    let mut lerw = vec![0u64; 16];
    let mut rng = dom.child(0).rng();
    for _ in 0..runs {
        let f = wilson_wired_graph(&g, &mut rng).map_err(|e| e.to_string())?;
        let i = index_of(&f).ok_or("walk sample is not a spanning tree")?;
        lerw[i] += 1;
    }
    let mut stacks = vec![0u64; 16];
    for t in 0..runs {
        let oracle = SeededStackOracle::new(dom.child(1).child(t).state());
        let f = wilson_stacks_graph(&g, &oracle, DEFAULT_POP_CAP)
            .map_err(|e| e.to_string())?
            .forest;
        let i = index_of(&f).ok_or("stack sample is not a spanning tree")?;
        stacks[i] += 1;
    }
    let expected = vec![runs as f64 / 16.0; 16];
    let p_lerw = stats::chi2_goodness_of_fit(&lerw, &expected);
    let p_stacks = stats::chi2_goodness_of_fit(&stacks, &expected);
    if p_lerw < 1e-3 || p_stacks < 1e-3 {
        return fail(format!("chi2 p-values {p_lerw:.4} (walk), {p_stacks:.4} (stacks)"));
    }
    Ok(())
}

fn msf_equivalence() -> Result<(), String> {
    let dom = SeedDomain::derive(32, "selftest/msf");
    let instances = 50u64;
    for t in 0..instances {
        let mut rng = dom.child(t).rng();
        let n = rng.random_range(2..=8usize);
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for v in 1..n as u32 {
            edges.push((rng.random_range(0..v), v));
        }
        for _ in 0..rng.random_range(0..=n.min(5)) {
            let a = rng.random_range(0..n as u32);
            let b = rng.random_range(0..n as u32);
            if a != b && !edges.contains(&(a.min(b), a.max(b))) {
                edges.push((a.min(b), a.max(b)));
            }
        }
        let g = WiredGraph::new(n, 0, &edges).map_err(|e| e.to_string())?;
        let labels =
            LabelConfig::from_values((0..edges.len()).map(|_| rng.random::<f64>()).collect())
                .map_err(|e| e.to_string())?;
        let open = BondConfig::from_open(vec![true; edges.len()]);
        let kruskal = minimal_spanning_forest(&g, &open, &labels).map_err(|e| e.to_string())?;
        let brute = cycle_deletion_oracle(&g, &open, &labels).map_err(|e| e.to_string())?;
        if kruskal.edges() != brute.edges() {
            return fail(format!("forest mismatch on random graph {t} ({n} vertices)"));
        }
    }
    Ok(())
}

fn coupling_monotonicity() -> Result<(), String> {
    let spec = GroupSpec::new(GroupKind::Free { rank: 2 }, &["a", "b"])
        .map_err(|e| e.to_string())?;
    let ball = CayleyBall::build(&spec, 3, VERTEX_CAP).map_err(|e| e.to_string())?;
    let dom = SeedDomain::derive(33, "selftest/coupling");
    let grid = [0.2, 0.4, 0.6, 0.8];
    for t in 0..50u64 {
        let labels: orbiforest::Labels = sample_labels(&ball, dom.child(t).state());
        let opens: Vec<BondConfig> = grid
            .iter()
            .map(|&p| threshold(&labels, p).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        for i in 0..opens.len() {
            for j in i + 1..opens.len() {
                for e in 0..ball.edge_count() as u32 {
                    if opens[i].is_open(e) && !opens[j].is_open(e) {
                        return fail(format!(
                            "edge {e} open at p={} but closed at p={}",
                            grid[i], grid[j]
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

fn induction_round_trip() -> Result<(), String> {
    // Dyadic rationals stay exact in binary floating point, so the
    // normalize/extend round trip must return the input bit-for-bit.
    for k in (0..=192u32).step_by(7) {
        for j in (1..=64u32).step_by(5) {
            let c = 1.0 + f64::from(k) / 64.0;
            let w = f64::from(j) / 64.0;
            let ext = extend_to_full(c, w).map_err(|e| e.to_string())?;
            let back = induction_normalize(ext, w).map_err(|e| e.to_string())?;
            if back != c {
                return fail(format!("round trip c={c} w={w} came back as {back}"));
            }
        }
    }
    Ok(())
}

fn pipeline_checks() -> Result<(), String> {
    let spec = GroupSpec::new(
        GroupKind::ProductWithZ { inner: Box::new(GroupKind::Free { rank: 2 }) },
        &["a", "b", "z"],
    )
    .map_err(|e| e.to_string())?;
    let ball = CayleyBall::build(&spec, 4, VERTEX_CAP).map_err(|e| e.to_string())?;
    let dom = SeedDomain::derive(34, "selftest/pipeline");
    for t in 0..10u64 {
        let builder = if t < 8 { ForestBuilder::Lerw } else { ForestBuilder::Stacks };
        let s = construct_f(&ball, 0.1, dom.child(t).state(), builder, 1_000_000_000)
            .map_err(|e| e.to_string())?;
        if !s.checks.all_hold() {
            return fail(format!("structural checks failed on sample {t}: {:?}", s.checks));
        }
    }
    Ok(())
}

fn cost_controls() -> Result<(), String> {
    // On the line every cluster is an interval: normalized cost exactly 1.
    let z = GroupSpec::new(GroupKind::FreeAbelian { rank: 1 }, &["x"])
        .map_err(|e| e.to_string())?;
    let ball = CayleyBall::build(&z, 6, VERTEX_CAP).map_err(|e| e.to_string())?;
    let r = cost_report(&ball, 0.3, 50, 35, ForestBuilder::Lerw, 1_000_000_000)
        .map_err(|e| e.to_string())?;
    if r.treeing_cost_hat != Some(1.0) {
        return fail(format!("line treeing cost {:?}, want exactly 1", r.treeing_cost_hat));
    }
    // On the rank-2 tree the sample is the whole ball every time:
    // normalized cost exactly 2.
    let f2 = GroupSpec::new(GroupKind::Free { rank: 2 }, &["a", "b"])
        .map_err(|e| e.to_string())?;
    let ball = CayleyBall::build(&f2, 4, VERTEX_CAP).map_err(|e| e.to_string())?;
    let r = cost_report(&ball, 0.3, 50, 36, ForestBuilder::Lerw, 1_000_000_000)
        .map_err(|e| e.to_string())?;
    if r.treeing_cost_hat != Some(2.0) {
        return fail(format!("tree treeing cost {:?}, want exactly 2", r.treeing_cost_hat));
    }
    Ok(())
}

fn determinism() -> Result<(), String> {
    let spec = GroupSpec::new(GroupKind::Free { rank: 2 }, &["a", "b"])
        .map_err(|e| e.to_string())?;
    let ball = CayleyBall::build(&spec, 4, VERTEX_CAP).map_err(|e| e.to_string())?;
    let a = sample_bonds(&ball, 0.4, 99).map_err(|e| e.to_string())?;
    let b = sample_bonds(&ball, 0.4, 99).map_err(|e| e.to_string())?;
    if a.open_edges().collect::<Vec<_>>() != b.open_edges().collect::<Vec<_>>() {
        return fail("bond sampling differs between identical runs".into());
    }
    let fa = wilson_wired(&ball, 99).map_err(|e| e.to_string())?;
    let fb = wilson_wired(&ball, 99).map_err(|e| e.to_string())?;
    if fa.edges() != fb.edges() {
        return fail("walk forest differs between identical runs".into());
    }
    let sa = construct_f(&ball, 0.2, 99, ForestBuilder::Stacks, 1_000_000_000)
        .map_err(|e| e.to_string())?;
    let sb = construct_f(&ball, 0.2, 99, ForestBuilder::Stacks, 1_000_000_000)
        .map_err(|e| e.to_string())?;
    if sa.f2.edges() != sb.f2.edges() || sa.omega.open_count() != sb.omega.open_count() {
        return fail("construction differs between identical runs".into());
    }
    Ok(())
}
