//! Bernoulli bond percolation through uniform edge labels.
//!
//! A label configuration u assigns every ball edge an independent uniform
//! value in [0, 1]; thresholding at p keeps the edges with u(e) <= p. This is
//! the monotone coupling: one label sample drives every p at once, and
//! `sample_bonds` is literally `threshold(sample_labels(..), p)`.
//!
//! Label values are a pure function of (seed, edge id): edge e draws from the
//! derivation chain `derive(seed, "percolation/labels").child(e)`, so any
//! sub-range of edges can be generated independently and in parallel.

use crate::ball::{CayleyBall, EdgeId};
use crate::error::Error;
use crate::real::Real;
use crate::seed::SeedDomain;
use crate::Result;

pub const LABEL_CONTEXT: &str = "percolation/labels";

/// Uniform [0, 1] edge labels at scalar precision `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelConfig<R: Real> {
    values: Vec<R>,
}

impl<R: Real> LabelConfig<R> {
    /// Wrap explicit label values; all must lie in [0, 1].
    pub fn from_values(values: Vec<R>) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            let x = v.to_f64_lossy();
            if !(0.0..=1.0).contains(&x) || x.is_nan() {
                return Err(Error::OutOfRange {
                    name: "label",
                    value: x,
                    expected: "[0, 1]",
                });
            }
            let _ = i;
        }
        Ok(LabelConfig { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, e: EdgeId) -> R {
        self.values[e as usize]
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }
}

/// The label of a single edge under a given seed, without materializing the
/// whole configuration.
pub fn label_of_edge(seed: u64, edge: EdgeId) -> f64 {
    SeedDomain::derive(seed, LABEL_CONTEXT).child(edge as u64).uniform01()
}

/// Sample i.i.d. uniform labels for every ball edge.
pub fn sample_labels<R: Real>(ball: &CayleyBall, seed: u64) -> LabelConfig<R> {
    let dom = SeedDomain::derive(seed, LABEL_CONTEXT);
    let values = (0..ball.edge_count() as u64)
        .map(|e| R::from_f64_lossy(dom.child(e).uniform01()))
        .collect();
    LabelConfig { values }
}

/// Open/closed state per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BondConfig {
    open: Vec<bool>,
    open_count: usize,
}

impl BondConfig {
    pub fn closed(edge_count: usize) -> Self {
        BondConfig { open: vec![false; edge_count], open_count: 0 }
    }

    pub fn from_open(open: Vec<bool>) -> Self {
        let open_count = open.iter().filter(|&&b| b).count();
        BondConfig { open, open_count }
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }

    pub fn is_open(&self, e: EdgeId) -> bool {
        self.open[e as usize]
    }

    pub fn open_count(&self) -> usize {
        self.open_count
    }

    pub fn open_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.open
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as EdgeId)
    }

    /// Open one edge in place (monotone insertion).
    pub fn insert_edge(&mut self, e: EdgeId) -> Result<()> {
        let i = e as usize;
        if i >= self.open.len() {
            return Err(Error::EdgeOutOfBounds { edge: i, edges: self.open.len() });
        }
        if !self.open[i] {
            self.open[i] = true;
            self.open_count += 1;
        }
        Ok(())
    }
}

/// Keep edges with label <= p.
pub fn threshold<R: Real>(labels: &LabelConfig<R>, p: R) -> Result<BondConfig> {
    let pf = p.to_f64_lossy();
    if !(0.0..=1.0).contains(&pf) || pf.is_nan() {
        return Err(Error::OutOfRange { name: "p", value: pf, expected: "[0, 1]" });
    }
    let open: Vec<bool> = labels.values.iter().map(|&u| u <= p).collect();
    Ok(BondConfig::from_open(open))
}

/// Bernoulli(p) bond sample: exactly `threshold(sample_labels(ball, seed), p)`.
pub fn sample_bonds(ball: &CayleyBall, p: f64, seed: u64) -> Result<BondConfig> {
    let labels: LabelConfig<f64> = sample_labels(ball, seed);
    threshold(&labels, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupKind, GroupSpec};

    fn small_ball() -> CayleyBall {
        let spec = GroupSpec::new(GroupKind::Free { rank: 2 }, &["a", "b"]).unwrap();
        CayleyBall::build(&spec, 3, 1 << 20).unwrap()
    }

    #[test]
    fn labels_deterministic_and_per_edge() {
        let ball = small_ball();
        let l1: LabelConfig<f64> = sample_labels(&ball, 11);
        let l2: LabelConfig<f64> = sample_labels(&ball, 11);
        assert_eq!(l1, l2);
        let l3: LabelConfig<f64> = sample_labels(&ball, 12);
        assert_ne!(l1, l3);
        for e in 0..ball.edge_count() as EdgeId {
            assert_eq!(l1.value(e), label_of_edge(11, e));
        }
    }

    #[test]
    fn threshold_composition_is_sample_bonds() {
        let ball = small_ball();
        let labels: LabelConfig<f64> = sample_labels(&ball, 5);
        for &p in &[0.0, 0.25, 0.5, 1.0] {
            let direct = sample_bonds(&ball, p, 5).unwrap();
            let composed = threshold(&labels, p).unwrap();
            assert_eq!(direct, composed);
        }
        assert!(threshold(&labels, -0.1).is_err());
        assert!(threshold(&labels, 1.5).is_err());
    }

    #[test]
    fn monotone_coupling_per_edge() {
        let ball = small_ball();
        let labels: LabelConfig<f64> = sample_labels(&ball, 7);
        let mut prev = threshold(&labels, 0.0).unwrap();
        for k in 1..=20 {
            let cur = threshold(&labels, k as f64 / 20.0).unwrap();
            for e in 0..labels.len() as EdgeId {
                assert!(!prev.is_open(e) || cur.is_open(e), "coupling must be monotone");
            }
            prev = cur;
        }
    }

    #[test]
    fn insert_edge_saturates_to_full() {
        let ball = small_ball();
        let mut cfg = BondConfig::closed(ball.edge_count());
        assert_eq!(cfg.open_count(), 0);
        for e in 0..ball.edge_count() as EdgeId {
            cfg.insert_edge(e).unwrap();
        }
        assert_eq!(cfg.open_count(), ball.edge_count());
        // Idempotent.
        cfg.insert_edge(0).unwrap();
        assert_eq!(cfg.open_count(), ball.edge_count());
        assert!(cfg.insert_edge(ball.edge_count() as EdgeId).is_err());
    }

    #[test]
    fn f32_lane_threshold_agrees_with_f64_on_safe_gaps() {
        let ball = small_ball();
        let l64: LabelConfig<f64> = sample_labels(&ball, 3);
        let l32: LabelConfig<f32> = sample_labels(&ball, 3);
        // Away from the rounding boundary the two lanes agree.
        let mut checked = 0;
        for e in 0..ball.edge_count() as EdgeId {
            let u = l64.value(e);
            if (u - 0.4).abs() > 1e-3 {
                let a = u <= 0.4;
                let b = l32.value(e) <= 0.4f32;
                assert_eq!(a, b);
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}
