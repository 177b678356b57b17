//! Output emission: CSV files with metadata sidecars, JSON summaries, and
//! SVG renderings of small balls with bond/forest layers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use orbiforest::ball::CayleyBall;
use orbiforest::percolation::BondConfig;

use crate::CliError;

/// Version stamps for the statistic definitions behind emitted columns.
/// Bumped whenever the definition of a statistic changes, so downstream
/// readers can tell recomputed numbers from redefined ones.
const ESTIMATOR_VERSIONS: &[(&str, u32)] = &[
    ("theta_hat", 1),
    ("u_hat", 1),
    ("nbig_hat", 1),
    ("se_theta", 1),
    ("pc_hat", 1),
    ("pu_hat", 1),
    ("w", 1),
    ("w_se", 1),
    ("cost_hat", 1),
    ("cost_se", 1),
    ("treeing_cost_hat", 1),
    ("treeing_cost_se", 1),
    ("exceedance", 1),
    ("baseline_quantile", 1),
];

pub struct Emitter {
    out_dir: PathBuf,
    config_sha256: String,
    seed: u64,
    written: Vec<PathBuf>,
}

impl Emitter {
    pub fn new(out_dir: &Path, config_sha256: &str, seed: u64) -> Result<Self, CliError> {
        fs::create_dir_all(out_dir).map_err(|e| {
            CliError::io(&format!("cannot create {}: {e}", out_dir.display()))
        })?;
        Ok(Emitter {
            out_dir: out_dir.to_path_buf(),
            config_sha256: config_sha256.to_string(),
            seed,
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        fs::write(&path, bytes)
            .map_err(|e| CliError::io(&format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// Write `name`.csv plus its `name`.meta.json sidecar. Each row must
    /// have exactly one cell per column.
    pub fn csv(
        &mut self,
        name: &str,
        columns: &[&str],
        rows: &[Vec<String>],
    ) -> Result<PathBuf, CliError> {
        let mut body = String::new();
        body.push_str(&columns.join(","));
        body.push('\n');
        for row in rows {
            assert_eq!(row.len(), columns.len(), "row width mismatch in {name}.csv");
            body.push_str(&row.join(","));
            body.push('\n');
        }
        let csv_name = format!("{name}.csv");
        let path = self.put(&csv_name, body.as_bytes())?;

        let mut estimators = serde_json::Map::new();
        for (est, version) in ESTIMATOR_VERSIONS {
            if columns.contains(est) {
                estimators.insert((*est).to_string(), serde_json::json!(version));
            }
        }
        let sidecar = serde_json::json!({
            "file": csv_name,
            "config_sha256": self.config_sha256,
            "seed": self.seed,
            "columns": columns,
            "rows": rows.len(),
            "estimator_versions": estimators,
        });
        self.json(&format!("{name}.meta"), &sidecar)?;
        Ok(path)
    }

    /// Write `name`.json, pretty-printed with a trailing newline. The
    /// config hash and seed are stamped in unless the value already
    /// carries them (sidecars do).
    pub fn json(
        &mut self,
        name: &str,
        value: &serde_json::Value,
    ) -> Result<PathBuf, CliError> {
        let mut value = value.clone();
        if let Some(map) = value.as_object_mut() {
            if !map.contains_key("config_sha256") {
                map.insert("config_sha256".into(), serde_json::json!(self.config_sha256));
                map.insert("seed".into(), serde_json::json!(self.seed));
            }
        }
        let mut text = serde_json::to_string_pretty(&value)
            .map_err(|e| CliError::io(&e.to_string()))?;
        text.push('\n');
        self.put(&format!("{name}.json"), text.as_bytes())
    }

    pub fn svg(&mut self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        self.put(&format!("{name}.svg"), body.as_bytes())
    }
}

/// Radial layout for a ball: the origin at the center, sphere of radius r
/// on the r-th ring, each ring ordered by the angle of a parent on the
/// ring below so trees stay mostly untangled.
fn radial_positions(ball: &CayleyBall) -> Vec<(f64, f64)> {
    let n = ball.vertex_count();
    let radius = ball.radius();
    let mut rings: Vec<Vec<u32>> = vec![Vec::new(); radius as usize + 1];
    for v in 0..n as u32 {
        rings[ball.word_len(v) as usize].push(v);
    }
    let mut angle = vec![0.0f64; n];
    let mut pos = vec![(0.0f64, 0.0f64); n];
    let (cx, cy) = (400.0, 400.0);
    let ring_gap = 360.0 / f64::from(radius.max(1));
    pos[0] = (cx, cy);
    for (r, ring) in rings.iter().enumerate().skip(1) {
        let mut order: Vec<(f64, u32)> = ring
            .iter()
            .map(|&v| {
                let parent = ball
                    .ends_of(v)
                    .iter()
                    .map(|&e| {
                        let ed = ball.edge(e);
                        if ed.tail == v {
                            ed.head
                        } else {
                            ed.tail
                        }
                    })
                    .filter(|&u| ball.word_len(u) < r as u32)
                    .min()
                    .unwrap_or(0);
                (angle[parent as usize], v)
            })
            .collect();
        order.sort_by(|a, b| a.partial_cmp(b).expect("angles are finite"));
        let count = order.len();
        for (k, &(_, v)) in order.iter().enumerate() {
            let a = std::f64::consts::TAU * (k as f64 + 0.5) / count as f64;
            angle[v as usize] = a;
            let rr = ring_gap * r as f64;
            pos[v as usize] = (cx + rr * a.cos(), cy + rr * a.sin());
        }
    }
    pos
}

/// Render the ball with up to three bond layers: the open bonds ω, then
/// the forests F₁ and F₂ drawn over them. Layers may be empty.
pub fn render_layers(
    ball: &CayleyBall,
    omega: Option<&BondConfig>,
    f1: Option<&[bool]>,
    f2: Option<&[bool]>,
) -> String {
    let pos = radial_positions(ball);
    let mut s = String::new();
    s.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" \
         viewBox=\"0 0 800 800\">\n",
    );
    s.push_str("<rect width=\"800\" height=\"800\" fill=\"white\"/>\n");
    let layer = |id: &str, stroke: &str, width: &str, dash: Option<&str>, keep: &dyn Fn(u32) -> bool| {
        let mut g = format!("<g id=\"{id}\" stroke=\"{stroke}\" stroke-width=\"{width}\" fill=\"none\"");
        if let Some(d) = dash {
            let _ = write!(g, " stroke-dasharray=\"{d}\"");
        }
        g.push_str(">\n");
        for e in 0..ball.edge_count() as u32 {
            if !keep(e) {
                continue;
            }
            let edge = ball.edge(e);
            let (x1, y1) = pos[edge.tail as usize];
            let (x2, y2) = pos[edge.head as usize];
            let _ = writeln!(
                g,
                "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\"/>"
            );
        }
        g.push_str("</g>\n");
        g
    };
    s.push_str(&layer("ball", "#e0e0e0", "0.5", None, &|_| true));
    if let Some(open) = omega {
        s.push_str(&layer("omega", "#888888", "1.5", None, &|e| open.is_open(e)));
    }
    if let Some(in_f1) = f1 {
        s.push_str(&layer("f1", "#1f6fd0", "2.5", None, &|e| in_f1[e as usize]));
    }
    if let Some(in_f2) = f2 {
        s.push_str(&layer("f2", "#d03020", "1.2", Some("4 2"), &|e| {
            in_f2[e as usize]
        }));
    }
    s.push_str("<g id=\"vertices\" fill=\"#404040\">\n");
    for (v, &(x, y)) in pos.iter().enumerate() {
        let r = if v == 0 { 5.0 } else { 2.0 };
        let fill = if v == 0 { " fill=\"#d09020\"" } else { "" };
        let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r}\"{fill}/>");
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// Float formatting for CSV cells: full round-trip precision, stable
/// across runs because it never depends on locale or platform.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x}")
    }
}
