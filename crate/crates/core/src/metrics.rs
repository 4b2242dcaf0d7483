//! Compression quality and performance metrics.
//!
//! * compression ratio `CR = 1 − N_c / N_o`;
//! * rate of length loss `RLL`, the fraction of polyline length removed;
//! * dynamic time warping distance between an original trajectory and its
//!   compressed version, aggregated over a set as population mean `μ` and
//!   standard deviation `δ`;
//! * speedup ratio `SR`, serial over parallel wall-clock time.

use std::fmt::Write as _;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::geo::CartesianPoint;
use crate::model::{Trajectory, TrajectorySet};
use crate::pool::WorkerPool;

/// Largest `N_o · N_c` for which [`dtw_distance`] keeps the whole cost
/// matrix and recovers the warping path.
pub const DTW_FULL_MATRIX_LIMIT: usize = 100_000_000;

/// `1 − n_c / n_o`.
pub fn compression_ratio(n_o: usize, n_c: usize) -> Result<f64> {
    if n_o == 0 {
        return Err(Error::InvalidArgument("compression ratio of an empty dataset".into()));
    }
    if n_c > n_o {
        return Err(Error::InvalidArgument(format!(
            "compressed size {n_c} exceeds original size {n_o}"
        )));
    }
    Ok(1.0 - n_c as f64 / n_o as f64)
}

/// Sum of segment lengths.
pub fn polyline_length(points: &[CartesianPoint]) -> f64 {
    points.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

fn check_pairing(originals: &TrajectorySet, compressed: &TrajectorySet) -> Result<()> {
    if originals.len() != compressed.len() {
        return Err(Error::LengthMismatch {
            what: "original vs compressed trajectory count",
            left: originals.len(),
            right: compressed.len(),
        });
    }
    Ok(())
}

/// `(Σ|T| − Σ|T′|) / Σ|T|` over corresponding trajectories.
pub fn rate_of_length_loss(originals: &TrajectorySet, compressed: &TrajectorySet) -> Result<f64> {
    check_pairing(originals, compressed)?;
    let len = |t: &Trajectory| polyline_length(&t.positions().collect::<Vec<_>>());
    let total: f64 = originals.trajectories().iter().map(len).sum();
    let kept: f64 = compressed.trajectories().iter().map(len).sum();
    if total <= 0.0 {
        return Err(Error::ZeroLength);
    }
    Ok((total - kept) / total)
}

/// Accumulated warping cost and, when available, the number of cells on
/// the optimal warping path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtwResult {
    /// `√D(N_o, N_c)`.
    pub distance: f64,
    /// `None` when the cost matrix was too large to keep.
    pub path_length: Option<usize>,
}

/// DTW over squared Euclidean point distances.
pub fn dtw_points(a: &[CartesianPoint], b: &[CartesianPoint]) -> Result<DtwResult> {
    dtw_points_with_limit(a, b, DTW_FULL_MATRIX_LIMIT)
}

/// Like [`dtw_points`], switching to two rolling rows above `limit` cells.
pub fn dtw_points_with_limit(a: &[CartesianPoint], b: &[CartesianPoint], limit: usize) -> Result<DtwResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let (n, m) = (a.len(), b.len());
    let cost = |i: usize, j: usize| a[i].distance_squared(&b[j]);
    if n.saturating_mul(m) > limit {
        let mut prev = vec![f64::INFINITY; m + 1];
        let mut cur = vec![f64::INFINITY; m + 1];
        prev[0] = 0.0;
        for i in 1..=n {
            cur[0] = f64::INFINITY;
            for j in 1..=m {
                cur[j] = cost(i - 1, j - 1) + prev[j - 1].min(prev[j]).min(cur[j - 1]);
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        return Ok(DtwResult {
            distance: prev[m].sqrt(),
            path_length: None,
        });
    }

    let w = m + 1;
    let mut d = vec![f64::INFINITY; (n + 1) * w];
    d[0] = 0.0;
    for i in 1..=n {
        for j in 1..=m {
            let best = d[(i - 1) * w + j - 1].min(d[(i - 1) * w + j]).min(d[i * w + j - 1]);
            d[i * w + j] = cost(i - 1, j - 1) + best;
        }
    }
    // Walk back from (n, m) to (1, 1): diagonal first on ties, then up,
    // then left.
    let (mut i, mut j, mut steps) = (n, m, 1);
    while (i, j) != (1, 1) {
        let diag = d[(i - 1) * w + j - 1];
        let up = d[(i - 1) * w + j];
        let left = d[i * w + j - 1];
        if diag <= up && diag <= left {
            i -= 1;
            j -= 1;
        } else if up <= left {
            i -= 1;
        } else {
            j -= 1;
        }
        steps += 1;
    }
    Ok(DtwResult {
        distance: d[n * w + m].sqrt(),
        path_length: Some(steps),
    })
}

pub fn dtw_distance(t1: &Trajectory, t2: &Trajectory) -> Result<DtwResult> {
    let a: Vec<CartesianPoint> = t1.positions().collect();
    let b: Vec<CartesianPoint> = t2.positions().collect();
    dtw_points(&a, &b)
}

/// Population mean and standard deviation (divisor `M`).
pub fn population_stats(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("statistics of an empty sample".into()));
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m;
    Ok((mean, var.sqrt()))
}

/// Per-pair DTW distances, computed in parallel, in input order.
pub fn dtw_all(originals: &TrajectorySet, compressed: &TrajectorySet, pool: &WorkerPool) -> Result<Vec<f64>> {
    check_pairing(originals, compressed)?;
    let (o, c) = (originals.trajectories(), compressed.trajectories());
    pool.map_range(o.len(), |k| dtw_distance(&o[k], &c[k]).map(|r| r.distance))
        .into_iter()
        .collect()
}

/// `(μ, δ)` of the DTW distances between corresponding trajectories.
pub fn dtw_stats(originals: &TrajectorySet, compressed: &TrajectorySet, pool: &WorkerPool) -> Result<(f64, f64)> {
    population_stats(&dtw_all(originals, compressed, pool)?)
}

/// Serial time over parallel time.
pub fn speedup_ratio(serial: Duration, parallel: Duration) -> Result<f64> {
    if serial.is_zero() || parallel.is_zero() {
        return Err(Error::InvalidArgument(format!(
            "speedup needs positive times, got {serial:?} and {parallel:?}"
        )));
    }
    Ok(serial.as_secs_f64() / parallel.as_secs_f64())
}

/// Quality of a compressed set against its originals.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub trajectories: usize,
    pub original_points: usize,
    pub compressed_points: usize,
    pub cr: f64,
    pub rll: f64,
    pub dtw_mean: f64,
    pub dtw_std: f64,
    /// Named wall-clock stages, in the order they ran.
    pub timings: Vec<(String, Duration)>,
}

impl MetricReport {
    pub fn evaluate(originals: &TrajectorySet, compressed: &TrajectorySet, pool: &WorkerPool) -> Result<Self> {
        check_pairing(originals, compressed)?;
        let mut timings = Vec::new();
        let t = std::time::Instant::now();
        let cr = compression_ratio(originals.total_points(), compressed.total_points())?;
        let rll = rate_of_length_loss(originals, compressed)?;
        timings.push(("cr_rll".to_string(), t.elapsed()));
        let t = std::time::Instant::now();
        let (dtw_mean, dtw_std) = dtw_stats(originals, compressed, pool)?;
        timings.push(("dtw".to_string(), t.elapsed()));
        Ok(MetricReport {
            trajectories: originals.len(),
            original_points: originals.total_points(),
            compressed_points: compressed.total_points(),
            cr,
            rll,
            dtw_mean,
            dtw_std,
            timings,
        })
    }

    /// `key=value` lines. Timing lines are omitted unless `with_timings`.
    pub fn to_key_value(&self, with_timings: bool) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "trajectories={}", self.trajectories);
        let _ = writeln!(s, "original_points={}", self.original_points);
        let _ = writeln!(s, "compressed_points={}", self.compressed_points);
        let _ = writeln!(s, "cr={}", self.cr);
        let _ = writeln!(s, "rll={}", self.rll);
        let _ = writeln!(s, "dtw_mean={}", self.dtw_mean);
        let _ = writeln!(s, "dtw_std={}", self.dtw_std);
        if with_timings {
            for (name, d) in &self.timings {
                let _ = writeln!(s, "time_{name}_s={}", d.as_secs_f64());
            }
        }
        s
    }

    /// One row in the layout `CR (%)  RLL (%)  DTW (μ ± δ)`.
    pub fn table_row(&self, epsilon: f64) -> String {
        format!(
            "{:>6.1}  {:>7.3}  {:>7.3}  {:.2} ± {:.2}",
            epsilon,
            self.cr * 100.0,
            self.rll * 100.0,
            self.dtw_mean,
            self.dtw_std
        )
    }

    pub const CSV_HEADER: &'static str = "epsilon,trajectories,original_points,compressed_points,cr,rll,dtw_mean,dtw_std";

    pub fn csv_row(&self, epsilon: f64) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            epsilon,
            self.trajectories,
            self.original_points,
            self.compressed_points,
            self.cr,
            self.rll,
            self.dtw_mean,
            self.dtw_std
        )
    }
}
