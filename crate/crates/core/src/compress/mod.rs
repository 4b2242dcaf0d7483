//! Douglas-Peucker trajectory compression.
//!
//! [`dp_compress`] is the classic recursive formulation and serves as the
//! correctness reference. [`dp_compress_parallel`] restructures the same
//! algorithm so that every curve segment of every iteration is processed at
//! once over the flat merged store; its output index sets are required to be
//! identical to the serial ones.

mod parallel;
mod serial;

use std::time::{Duration, Instant};

pub use parallel::{
    dp_compress_parallel, dp_compress_parallel_with, init_state, iterate, CompressionState,
    ParallelConfig, Positioned,
};
pub use serial::{dp_compress, dp_compress_indices};

use crate::error::{Error, Result};
use crate::geo::CartesianPoint;
use crate::model::{flatten, FlatTrajectoryStore, TimestampedPoint, TrajectorySet};
use crate::pool::WorkerPool;

/// Distance threshold `ε` in meters.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CompressionThreshold(f64);

impl CompressionThreshold {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "compression threshold must be a finite non-negative distance, got {epsilon}"
            )));
        }
        Ok(CompressionThreshold(epsilon))
    }

    pub fn meters(&self) -> f64 {
        self.0
    }
}

/// Vertical Euclidean distance from `p` to the line through `s` and `e`.
///
/// Degenerate chords (`s == e`, e.g. closed loops) fall back to the plain
/// distance from `p` to `s`.
#[inline]
pub fn ved(p: &CartesianPoint, s: &CartesianPoint, e: &CartesianPoint) -> f64 {
    let (ex, ey) = (e.x - s.x, e.y - s.y);
    let (px, py) = (p.x - s.x, p.y - s.y);
    let base = ex.hypot(ey);
    if base == 0.0 {
        px.hypot(py)
    } else {
        (px * ey - py * ex).abs() / base
    }
}

/// Per-trajectory outcome of a batch compression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryReport {
    pub original_len: usize,
    pub compressed_len: usize,
    pub iterations: usize,
}

/// Wall-clock breakdown of a batch run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub total: Duration,
    /// Building the merged input layout and copying retained points out.
    pub staging: Duration,
    pub compute: Duration,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchCompressionReport {
    pub trajectories: Vec<TrajectoryReport>,
    pub timings: StageTimings,
    /// Number of auxiliary workspaces allocated for the whole batch.
    pub workspace_allocations: usize,
}

impl BatchCompressionReport {
    pub fn original_points(&self) -> usize {
        self.trajectories.iter().map(|t| t.original_len).sum()
    }

    pub fn compressed_points(&self) -> usize {
        self.trajectories.iter().map(|t| t.compressed_len).sum()
    }

    pub fn max_iterations(&self) -> usize {
        self.trajectories.iter().map(|t| t.iterations).max().unwrap_or(0)
    }

    /// `1 − N_c / N_o` over the whole batch; zero for an empty batch.
    pub fn compression_ratio(&self) -> f64 {
        let n_o = self.original_points();
        if n_o == 0 {
            0.0
        } else {
            1.0 - self.compressed_points() as f64 / n_o as f64
        }
    }
}

/// Builds the output store from per-trajectory kept indices.
pub(crate) fn gather(store: &FlatTrajectoryStore, kept: &[Vec<u32>]) -> FlatTrajectoryStore {
    let total = kept.iter().map(Vec::len).sum();
    let mut out = FlatTrajectoryStore {
        points: Vec::with_capacity(total),
        t_len: Vec::with_capacity(kept.len()),
        offsets: Vec::with_capacity(kept.len()),
        mmsi_index: store.mmsi_index.clone(),
    };
    for (k, idx) in kept.iter().enumerate() {
        let src: &[TimestampedPoint] = store.trajectory(k);
        out.offsets.push(out.points.len());
        out.t_len.push(idx.len());
        out.points.extend(idx.iter().map(|&i| src[i as usize]));
    }
    out
}

/// Serial baseline over a whole store: one trajectory after another on the
/// calling thread.
pub fn dp_compress_serial_batch(
    store: &FlatTrajectoryStore,
    eps: CompressionThreshold,
) -> (FlatTrajectoryStore, BatchCompressionReport) {
    let start = std::time::Instant::now();
    let mut kept = Vec::with_capacity(store.len());
    let mut report = BatchCompressionReport {
        workspace_allocations: 0,
        ..Default::default()
    };
    let mut positions = Vec::with_capacity(store.max_len());
    for k in 0..store.len() {
        positions.clear();
        positions.extend(store.trajectory(k).iter().map(|p| p.pos));
        let idx = dp_compress_indices(&positions, eps);
        report.trajectories.push(TrajectoryReport {
            original_len: positions.len(),
            compressed_len: idx.len(),
            iterations: 0,
        });
        kept.push(idx.into_iter().map(|i| i as u32).collect::<Vec<u32>>());
    }
    let compute = start.elapsed();
    let out = gather(store, &kept);
    report.timings = StageTimings {
        total: start.elapsed(),
        staging: start.elapsed() - compute,
        compute,
    };
    (out, report)
}

/// Which compressor [`compress_set`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// One trajectory after another with [`dp_compress_indices`].
    Serial,
    /// [`dp_compress_parallel_with`] over a merged store.
    #[default]
    Parallel,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "serial" => Ok(Backend::Serial),
            "parallel" => Ok(Backend::Parallel),
            _ => Err(Error::InvalidArgument(format!(
                "unknown backend {s:?}, expected serial or parallel"
            ))),
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Serial => "serial",
            Backend::Parallel => "parallel",
        })
    }
}

/// Compresses every trajectory of `set` with the chosen backend.
///
/// Timings start from the trajectory set. For the parallel backend that
/// includes merging the set into a flat store and copying the retained
/// points back out, both reported under `staging`. Both backends return
/// the same store for the same input.
pub fn compress_set(
    set: &TrajectorySet,
    eps: CompressionThreshold,
    backend: Backend,
    pool: &WorkerPool,
    config: &ParallelConfig,
) -> (FlatTrajectoryStore, BatchCompressionReport) {
    let start = Instant::now();
    match backend {
        Backend::Serial => {
            let mut kept = Vec::with_capacity(set.len());
            let mut positions = Vec::new();
            let mut report = BatchCompressionReport::default();
            for t in set.trajectories() {
                positions.clear();
                positions.extend(t.positions());
                let idx = dp_compress_indices(&positions, eps);
                report.trajectories.push(TrajectoryReport {
                    original_len: t.len(),
                    compressed_len: idx.len(),
                    iterations: 0,
                });
                kept.push(idx);
            }
            let compute = start.elapsed();
            let mut out = FlatTrajectoryStore::default();
            for (t, idx) in set.trajectories().iter().zip(&kept) {
                out.offsets.push(out.points.len());
                out.t_len.push(idx.len());
                out.mmsi_index.push(t.mmsi);
                out.points.extend(idx.iter().map(|&i| t.points()[i]));
            }
            let total = start.elapsed();
            report.timings = StageTimings {
                total,
                staging: total - compute,
                compute,
            };
            (out, report)
        }
        Backend::Parallel => {
            let store = flatten(set);
            let flat = start.elapsed();
            let (out, mut report) = dp_compress_parallel_with(&store, eps, pool, config);
            report.timings.staging += flat;
            report.timings.total = start.elapsed();
            (out, report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ved_examples() {
        let s = CartesianPoint::new(0.0, 0.0);
        let e = CartesianPoint::new(2.0, 0.0);
        assert_eq!(ved(&CartesianPoint::new(0.0, 1.0), &s, &e), 1.0);
        assert_eq!(ved(&CartesianPoint::new(5.0, 0.0), &s, &e), 0.0);
        assert_eq!(ved(&CartesianPoint::new(3.0, 4.0), &s, &s), 5.0);
    }

    #[test]
    fn threshold_validation() {
        assert!(CompressionThreshold::new(-1.0).is_err());
        assert!(CompressionThreshold::new(f64::NAN).is_err());
        assert_eq!(CompressionThreshold::new(0.0).unwrap().meters(), 0.0);
    }

    #[test]
    fn backends_agree() {
        let set = crate::synth::generate(
            &crate::synth::SynthConfig {
                min_len: 2,
                max_len: 300,
                ..crate::synth::SynthConfig::new(5_000, 4)
            },
            &crate::geo::Projector::default(),
        )
        .unwrap();
        let eps = CompressionThreshold::new(5.0).unwrap();
        let pool = WorkerPool::new(3).unwrap();
        let cfg = ParallelConfig::default();
        let (a, ra) = compress_set(&set, eps, Backend::Serial, &pool, &cfg);
        let (b, rb) = compress_set(&set, eps, Backend::Parallel, &pool, &cfg);
        assert_eq!(a, b);
        assert_eq!(ra.compressed_points(), rb.compressed_points());
        assert!(rb.timings.staging <= rb.timings.total);
        assert_eq!("Serial".parse::<Backend>().unwrap(), Backend::Serial);
    }

    proptest! {
        // Height over the base from the shoelace area.
        #[test]
        fn ved_matches_shoelace(
            ax in -1e3f64..1e3, ay in -1e3f64..1e3,
            bx in -1e3f64..1e3, by in -1e3f64..1e3,
            cx in -1e3f64..1e3, cy in -1e3f64..1e3,
        ) {
            let base = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
            let area2 = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)).abs();
            let scale = [ax, ay, bx, by, cx, cy].iter().fold(1.0f64, |m, v| m.max(v.abs()));
            // Well-conditioned triangles only; slivers lose digits in both formulas.
            prop_assume!(area2 > 1e-2 * scale * scale);
            let oracle = area2 / base;
            let got = ved(&CartesianPoint::new(cx, cy), &CartesianPoint::new(ax, ay), &CartesianPoint::new(bx, by));
            prop_assert!((got - oracle).abs() <= 1e-12 * oracle, "{} vs {}", got, oracle);
        }
    }
}
