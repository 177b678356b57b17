//! orbiforest: percolation, random spanning forests, and cluster
//! statistics on finite Cayley balls.
//!
//! Grammar: `orbiforest <subcommand> --config path [overrides…] [--seed N]
//! [--out dir]`. Overrides are dotted paths into the config JSON, e.g.
//! `--group.rank=3` or `--p=0.4`. Results land in the output directory as
//! CSV (each with a metadata sidecar), JSON, and small SVG renderings;
//! errors leave as JSON on stderr with a nonzero exit.

mod config;
mod emit;
mod selftest;

use std::fmt;
use std::path::PathBuf;

use serde_json::json;

use orbiforest::ball::CayleyBall;
use orbiforest::blocks::{block_decomposition, open_subgraph_edges};
use orbiforest::cluster::{origin_cluster, ClusterDecomposition};
use orbiforest::cost::cost_report;
use orbiforest::ends::ends_profile;
use orbiforest::forest::pipeline::construct_f;
use orbiforest::forest::wilson::{wilson_stacks_graph, SeededStackOracle};
use orbiforest::forest::{msf::minimal_spanning_forest, wilson::wilson_wired, ForestBuilder, ForestConfig};
use orbiforest::graph::WiredGraph;
use orbiforest::indist::{indistinguishability_test, IndistParams};
use orbiforest::percolation::{sample_labels, threshold, BondConfig};
use orbiforest::phase::{phase_scan, PhaseScanParams};
use orbiforest::SeedDomain;

use config::{builder_name, ExperimentConfig};
use emit::{fmt_f64, render_layers, Emitter};

/// Largest radius that still gets an SVG rendering.
const SVG_RADIUS_CAP: u32 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Io(String),
    Selftest(String),
    Core(orbiforest::Error),
}

impl CliError {
    fn config(msg: &str) -> Self {
        CliError::Config(msg.to_string())
    }

    fn io(msg: &str) -> Self {
        CliError::Io(msg.to_string())
    }

    fn kind(&self) -> String {
        match self {
            CliError::Usage(_) => "usage".into(),
            CliError::Config(_) => "config".into(),
            CliError::Io(_) => "io".into(),
            CliError::Selftest(_) => "selftest".into(),
            CliError::Core(e) => {
                let debug = format!("{e:?}");
                let head: String = debug
                    .chars()
                    .take_while(|c| c.is_ascii_alphanumeric())
                    .collect();
                let mut snake = String::new();
                for (i, c) in head.chars().enumerate() {
                    if c.is_ascii_uppercase() {
                        if i > 0 {
                            snake.push('_');
                        }
                        snake.push(c.to_ascii_lowercase());
                    } else {
                        snake.push(c);
                    }
                }
                snake
            }
        }
    }

    fn to_json(&self) -> String {
        json!({"error": {"kind": self.kind(), "message": format!("{self}")}}).to_string()
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m)
            | CliError::Config(m)
            | CliError::Io(m)
            | CliError::Selftest(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<orbiforest::Error> for CliError {
    fn from(e: orbiforest::Error) -> Self {
        CliError::Core(e)
    }
}

const USAGE: &str = "usage: orbiforest <subcommand> --config path [overrides…] [--seed N] [--out dir]
subcommands: ball percolate phase-scan wilson msf pipeline blocks ends cost indist selftest
overrides:   --<dotted.path>=<json value>, e.g. --p=0.4 --group.rank=3 --generators='[\"x\"]'";

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{}", e.to_json());
            if matches!(e, CliError::Usage(_)) {
                eprintln!("{USAGE}");
            }
            std::process::exit(e.exit_code());
        }
    }
}

struct Cli {
    subcommand: String,
    config_path: Option<PathBuf>,
    out: Option<PathBuf>,
    overrides: Vec<(String, String)>,
}

fn parse_args(args: &[String]) -> Result<Cli, CliError> {
    let mut it = args.iter().peekable();
    let subcommand = it
        .next()
        .ok_or_else(|| CliError::Usage("missing subcommand".into()))?
        .clone();
    if subcommand.starts_with('-') {
        return Err(CliError::Usage(format!("expected a subcommand, got {subcommand:?}")));
    }
    let mut cli = Cli {
        subcommand,
        config_path: None,
        out: None,
        overrides: Vec::new(),
    };
    while let Some(arg) = it.next() {
        let Some(body) = arg.strip_prefix("--") else {
            return Err(CliError::Usage(format!("unexpected argument {arg:?}")));
        };
        let (key, inline) = match body.split_once('=') {
            Some((k, v)) => (k, Some(v.to_string())),
            None => (body, None),
        };
        let mut value = || -> Result<String, CliError> {
            match inline.clone() {
                Some(v) => Ok(v),
                None => it
                    .next()
                    .cloned()
                    .ok_or_else(|| CliError::Usage(format!("--{key} needs a value"))),
            }
        };
        match key {
            "config" => cli.config_path = Some(PathBuf::from(value()?)),
            "out" => cli.out = Some(PathBuf::from(value()?)),
            "seed" => cli.overrides.push(("seed".into(), value()?)),
            "help" => return Err(CliError::Usage("help requested".into())),
            _ => cli.overrides.push((key.to_string(), value()?)),
        }
    }
    Ok(cli)
}

fn run(args: &[String]) -> Result<(), CliError> {
    let cli = parse_args(args)?;
    if cli.subcommand == "selftest" {
        if cli.config_path.is_some() || !cli.overrides.is_empty() {
            return Err(CliError::Usage("selftest takes no flags".into()));
        }
        return selftest::run();
    }
    let path = cli
        .config_path
        .as_deref()
        .ok_or_else(|| CliError::Usage("missing --config".into()))?;
    let loaded = config::load(path, &cli.overrides)?;
    let cfg = &loaded.config;

    // The output directory: flag, then config, then the environment
    // default, then ./orbiforest-out.
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .or_else(|| std::env::var_os("ORBIFOREST_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("orbiforest-out"));
    let mut em = Emitter::new(&out_dir, &loaded.sha256, cfg.seed)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::io(&format!("cannot build worker pool: {e}")))?;
    pool.install(|| dispatch(&cli.subcommand, cfg, &mut em))?;

    for p in em.written() {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn dispatch(sub: &str, cfg: &ExperimentConfig, em: &mut Emitter) -> Result<(), CliError> {
    match sub {
        "ball" => cmd_ball(cfg, em),
        "percolate" => cmd_percolate(cfg, em),
        "phase-scan" => cmd_phase_scan(cfg, em),
        "wilson" => cmd_wilson(cfg, em),
        "msf" => cmd_msf(cfg, em),
        "pipeline" => cmd_pipeline(cfg, em),
        "blocks" => cmd_blocks(cfg, em),
        "ends" => cmd_ends(cfg, em),
        "cost" => cmd_cost(cfg, em),
        "indist" => cmd_indist(cfg, em),
        other => Err(CliError::Usage(format!("unknown subcommand {other:?}"))),
    }
}

fn build_ball(cfg: &ExperimentConfig, radius: u32) -> Result<CayleyBall, CliError> {
    let spec = cfg.spec()?;
    CayleyBall::build(&spec, radius, cfg.vertex_cap).map_err(CliError::Core)
}

fn sub_seed(cfg: &ExperimentConfig, sub: &str) -> SeedDomain {
    SeedDomain::derive(cfg.seed, "cli").child(orbiforest::seed::fnv1a64(sub.as_bytes()))
}

fn cmd_ball(cfg: &ExperimentConfig, em: &mut Emitter) -> Result<(), CliError> {
    let spec = cfg.spec()?;
    let mut balls = Vec::new();
    for r in cfg.all_radii()? {
        let ball = build_ball(cfg, r)?;
        balls.push(json!({
            "radius": r,
            "vertices": ball.vertex_count(),
            "edges": ball.edge_count(),
            "boundary_vertices": ball.boundary_count(),
        }));
    }
    em.json(
        "ball",
        &json!({
            "group": spec.name(),
            "generators": cfg.generators,
            "degree": spec.slot_count() * 2,
            "balls": balls,
        }),
    )?;
    Ok(())
}

fn cmd_percolate(cfg: &ExperimentConfig, em: &mut Emitter) -> Result<(), CliError> {
    let radius = cfg.one_radius()?;
    let p = cfg.need_p()?;
    let ball = build_ball(cfg, radius)?;
    let seed = sub_seed(cfg, "percolate").state();
    let open = orbiforest::percolation::sample_bonds(&ball, p, seed)?;
    let decomp = ClusterDecomposition::from_ball(&ball, &open);

    let mut rows = Vec::new();
    for (i, c) in decomp.clusters().iter().enumerate() {
        rows.push(vec![
            i.to_string(),
            c.rep.to_string(),
            c.size.to_string(),
            c.open_edges.to_string(),
            c.touches_boundary.to_string(),
        ]);
    }
    em.csv(
        "clusters",
        &["cluster_id", "rep", "size", "open_edges", "touches_boundary"],
        &rows,
    )?;

    let origin = decomp.info_of(0);
    let largest = decomp.clusters().iter().map(|c| c.size).max().unwrap_or(0);
    em.json(
        "percolate",
        &json!({
            "group": cfg.spec()?.name(),
            "radius": radius,
            "p": p,
            "vertices": ball.vertex_count(),
            "edges": ball.edge_count(),
            "open_edges": open.open_count(),
            "clusters": decomp.cluster_count(),
            "largest_cluster": largest,
            "origin_cluster_size": origin.size,
            "origin_touches_boundary": origin.touches_boundary,
        }),
    )?;
    Ok(())
}

fn cmd_phase_scan(cfg: &ExperimentConfig, em: &mut Emitter) -> Result<(), CliError> {
    let spec = cfg.spec()?;
    let radii = cfg.all_radii()?;
    let grid = cfg
        .p_grid
        .as_ref()
        .ok_or_else(|| CliError::config("missing \"p_grid\""))?
        .points()?;
    let result = phase_scan(
        &spec,
        &radii,
        &grid,
        PhaseScanParams {
            trials: cfg.trials,
            seed: sub_seed(cfg, "phase-scan").state(),
            delta_c: cfg.delta_c,
            delta_u: cfg.delta_u,
            vertex_cap: cfg.vertex_cap,
        },
    )?;

    let rows: Vec<Vec<String>> = result
        .points
        .iter()
        .map(|pt| {
            vec![
                result.group.clone(),
                pt.radius.to_string(),
                fmt_f64(pt.p),
                pt.trials.to_string(),
                fmt_f64(pt.theta_hat),
                fmt_f64(pt.u_hat),
                fmt_f64(pt.nbig_hat),
                fmt_f64(pt.se_theta),
            ]
        })
        .collect();
    em.csv(
        "phase",
        &["group", "R", "p", "trials", "theta_hat", "u_hat", "nbig_hat", "se_theta"],
        &rows,
    )?;

    let summaries = serde_json::to_value(&result.summaries)
        .map_err(|e| CliError::io(&e.to_string()))?;
    em.json(
        "phase_summary",
        &json!({
            "group": result.group,
            "delta_c": result.delta_c,
            "delta_u": result.delta_u,
            "trials": cfg.trials,
            "grid": grid,
            "summaries": summaries,
        }),
    )?;
    Ok(())
}

/// Rows of the forest CSV: every ball edge with its generator label and
/// the layers it belongs to.
fn forest_rows(
    ball: &CayleyBall,
    f1: Option<&ForestConfig>,
    f2: Option<&ForestConfig>,
) -> Vec<Vec<String>> {
    let spec = ball.spec();
    (0..ball.edge_count() as u32)
        .map(|e| {
            let edge = ball.edge(e);
            let member = |f: Option<&ForestConfig>| {
                u8::from(f.is_some_and(|f| f.contains(e))).to_string()
            };
            vec![
                e.to_string(),
                edge.tail.to_string(),
                edge.head.to_string(),
                spec.slot_label(edge.slot as usize).to_string(),
                member(f1),
                member(f2),
            ]
        })
        .collect()
}

const FOREST_COLUMNS: [&str; 6] = ["edge_id", "tail", "head", "label", "in_F1", "in_F2"];

fn membership(ball: &CayleyBall, f: &ForestConfig) -> Vec<bool> {
    (0..ball.edge_count() as u32).map(|e| f.contains(e)).collect()
}

fn cmd_wilson(cfg: &ExperimentConfig, em: &mut Emitter) -> Result<(), CliError> {
    let radius = cfg.one_radius()?;
    let ball = build_ball(cfg, radius)?;
    let seed = sub_seed(cfg, "wilson").state();
    let (forest, pops) = match cfg.builder {
        ForestBuilder::Lerw => (wilson_wired(&ball, seed)?, None),
        ForestBuilder::Stacks => {
            let g = WiredGraph::from_ball(&ball);
            let oracle = SeededStackOracle::new(seed);
            let run = wilson_stacks_graph(&g, &oracle, cfg.pop_cap)?;
            (run.forest, Some(run.pops))
        }
    };
    em.csv("forest", &FOREST_COLUMNS, &forest_rows(&ball, Some(&forest), None))?;
    em.json(
        "wilson",
        &json!({
            "group": cfg.spec()?.name(),
            "radius": radius,
            "builder": builder_name(cfg.builder),
            "forest_edges": forest.edge_count(),
            "pops": pops,
        }),
    )?;
    if radius <= SVG_RADIUS_CAP {
        let f1 = membership(&ball, &forest);
        em.svg("forest", &render_layers(&ball, None, Some(&f1), None))?;
    }
    Ok(())
}

fn cmd_msf(cfg: &ExperimentConfig, em: &mut Emitter) -> Result<(), CliError> {
    let radius = cfg.one_radius()?;
    let ball = build_ball(cfg, radius)?;
    let seed = sub_seed(cfg, "msf").state();
    let labels: orbiforest::Labels = sample_labels(&ball, seed);
    // With p the forest lives on the open subgraph at that level;
    // without it every bond participates.
    let open = match cfg.p {
        Some(p) => threshold(&labels, p)?,
        None => BondConfig::from_open(vec![true; ball.edge_count()]),
    };
    let g = WiredGraph::from_ball(&ball);
    let forest = minimal_spanning_forest(&g, &open, &labels)?;
    em.csv("forest", &FOREST_COLUMNS, &forest_rows(&ball, None, Some(&forest)))?;
    em.json(
        "msf",
        &json!({
            "group": cfg.spec()?.name(),
            "radius": radius,
            "p": cfg.p,
            "open_edges": open.open_count(),
            "forest_edges": forest.edge_count(),
        }),
    )?;
    if radius <= SVG_RADIUS_CAP {
        let f2 = membership(&ball, &forest);
        em.svg("forest", &render_layers(&ball, Some(&open), None, Some(&f2)))?;
    }
    Ok(())
}

fn cmd_pipeline(cfg: &ExperimentConfig, em: &mut Emitter) -> Result<(), CliError> {
    let radius = cfg.one_radius()?;
    let epsilon = cfg.need_epsilon()?;
    let ball = build_ball(cfg, radius)?;
    let dom = sub_seed(cfg, "pipeline");

    let mut checks_passed = 0u64;
    let mut omega_open = Vec::new();
    let mut f2_edges = Vec::new();
    let mut first = None;
    for t in 0..cfg.trials {
        let s = construct_f(&ball, epsilon, dom.child(t).state(), cfg.builder, cfg.pop_cap)?;
        if s.checks.all_hold() {
            checks_passed += 1;
        }
        omega_open.push(s.omega.open_count() as f64);
        f2_edges.push(s.f2.edge_count() as f64);
        if t == 0 {
            first = Some(s);
        }
    }
    let first = first.expect("trials is at least 1");

    em.csv(
        "forest",
        &FOREST_COLUMNS,
        &forest_rows(&ball, Some(&first.f1), Some(&first.f2)),
    )?;
    em.json(
        "pipeline",
        &json!({
            "group": cfg.spec()?.name(),
            "radius": radius,
            "epsilon": epsilon,
            "builder": builder_name(cfg.builder),
            "trials": cfg.trials,
            "checks_passed": checks_passed,
            "mean_omega_open": orbiforest::stats::mean(&omega_open),
            "mean_f2_edges": orbiforest::stats::mean(&f2_edges),
            "first_trial_pi_clusters": first.checks.pi_cluster_count,
        }),
    )?;
    if radius <= SVG_RADIUS_CAP {
        let f1 = membership(&ball, &first.f1);
        let f2 = membership(&ball, &first.f2);
        em.svg(
            "pipeline",
            &render_layers(&ball, Some(&first.omega), Some(&f1), Some(&f2)),
        )?;
    }
    Ok(())
}

/// The bond configuration a structural subcommand inspects: the union π
/// of sprinkled bonds and a wired forest when ε is given, otherwise plain
/// percolation at p.
fn structural_bonds(
    cfg: &ExperimentConfig,
    ball: &CayleyBall,
    dom: SeedDomain,
) -> Result<(BondConfig, serde_json::Value), CliError> {
    match (cfg.epsilon, cfg.p) {
        (Some(eps), None) => {
            let s = construct_f(ball, eps, dom.child(0).state(), cfg.builder, cfg.pop_cap)?;
            Ok((s.pi, json!({"epsilon": eps, "layer": "pi"})))
        }
        (None, Some(p)) => {
            let open = orbiforest::percolation::sample_bonds(ball, p, dom.child(0).state())?;
            Ok((open, json!({"p": p, "layer": "omega"})))
        }
        (Some(_), Some(_)) => {
            Err(CliError::config("give either \"p\" or \"epsilon\", not both"))
        }
        (None, None) => Err(CliError::config("missing \"p\" or \"epsilon\"")),
    }
}

fn cmd_blocks(cfg: &ExperimentConfig, em: &mut Emitter) -> Result<(), CliError> {
    let radius = cfg.one_radius()?;
    let ball = build_ball(cfg, radius)?;
    let g = WiredGraph::from_ball(&ball);
    let (open, source) = structural_bonds(cfg, &ball, sub_seed(cfg, "blocks"))?;
    let report = block_decomposition(&open_subgraph_edges(&g, &open));
    let report = serde_json::to_value(&report).map_err(|e| CliError::io(&e.to_string()))?;
    em.json(
        "blocks",
        &json!({
            "group": cfg.spec()?.name(),
            "radius": radius,
            "source": source,
            "report": report,
        }),
    )?;
    Ok(())
}

fn cmd_ends(cfg: &ExperimentConfig, em: &mut Emitter) -> Result<(), CliError> {
    let radius = cfg.one_radius()?;
    let ball = build_ball(cfg, radius)?;
    let dom = sub_seed(cfg, "ends");
    // With ε the profiled cluster is the origin's tree in the final
    // forest; with p it is the origin's percolation cluster.
    let (open, source) = match (cfg.epsilon, cfg.p) {
        (Some(eps), None) => {
            let s = construct_f(&ball, eps, dom.child(0).state(), cfg.builder, cfg.pop_cap)?;
            (s.f2.to_bonds(), json!({"epsilon": eps, "layer": "f2"}))
        }
        (None, Some(p)) => {
            let open = orbiforest::percolation::sample_bonds(&ball, p, dom.child(0).state())?;
            (open, json!({"p": p, "layer": "omega"}))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::config("give either \"p\" or \"epsilon\", not both"))
        }
        (None, None) => return Err(CliError::config("missing \"p\" or \"epsilon\"")),
    };
    let radii: Vec<u32> = match &cfg.ends_radii {
        Some(rs) if !rs.is_empty() => rs.clone(),
        _ if radius >= 2 => (1..radius).collect(),
        _ => vec![0],
    };
    let decomp = ClusterDecomposition::from_ball(&ball, &open);
    let view = origin_cluster(&decomp, &ball, &open);
    let profile = ends_profile(&ball, &view, 0, &radii)?;
    let profile = serde_json::to_value(&profile).map_err(|e| CliError::io(&e.to_string()))?;
    em.json(
        "ends",
        &json!({
            "group": cfg.spec()?.name(),
            "radius": radius,
            "source": source,
            "cluster_size": view.info.size,
            "cluster_touches_boundary": view.info.touches_boundary,
            "profile": profile,
        }),
    )?;
    Ok(())
}

fn cmd_cost(cfg: &ExperimentConfig, em: &mut Emitter) -> Result<(), CliError> {
    let radius = cfg.one_radius()?;
    let ball = build_ball(cfg, radius)?;
    let dom = sub_seed(cfg, "cost");
    // Sweep ε over the grid when one is given; the graphing cost inside
    // each report is evaluated at p = ε.
    let epsilons: Vec<f64> = match &cfg.p_grid {
        Some(g) => g.points()?,
        None => vec![cfg.need_epsilon()?],
    };
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (i, &eps) in epsilons.iter().enumerate() {
        let r = cost_report(
            &ball,
            eps,
            cfg.trials,
            dom.child(i as u64).state(),
            cfg.builder,
            cfg.pop_cap,
        )?;
        rows.push(vec![
            r.group.clone(),
            r.radius.to_string(),
            fmt_f64(r.epsilon),
            fmt_f64(r.epsilon),
            r.trials.to_string(),
            fmt_f64(r.w),
            fmt_f64(r.w_se),
            fmt_f64(r.treeing_cost_hat.unwrap_or(f64::NAN)),
            fmt_f64(r.treeing_cost_se.unwrap_or(f64::NAN)),
        ]);
        reports.push(serde_json::to_value(&r).map_err(|e| CliError::io(&e.to_string()))?);
    }
    em.csv(
        "cost",
        &["group", "R", "p", "epsilon", "trials", "w", "w_se", "cost_hat", "cost_se"],
        &rows,
    )?;
    em.json(
        "cost",
        &json!({
            "group": cfg.spec()?.name(),
            "radius": radius,
            "builder": builder_name(cfg.builder),
            "trials": cfg.trials,
            "reports": reports,
        }),
    )?;
    Ok(())
}

fn cmd_indist(cfg: &ExperimentConfig, em: &mut Emitter) -> Result<(), CliError> {
    let radius = cfg.one_radius()?;
    let p = cfg.need_p()?;
    let ball = build_ball(cfg, radius)?;
    let report = indistinguishability_test(
        &ball,
        cfg.observable,
        IndistParams {
            p,
            configs: cfg.trials,
            resample: cfg.resample,
            alpha: cfg.alpha,
            seed: sub_seed(cfg, "indist").state(),
        },
    )?;
    let report = serde_json::to_value(&report).map_err(|e| CliError::io(&e.to_string()))?;
    em.json(
        "indist",
        &json!({
            "group": cfg.spec()?.name(),
            "radius": radius,
            "report": report,
        }),
    )?;
    Ok(())
}
