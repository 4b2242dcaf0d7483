use std::ops::Range;

use crate::model::FlatTrajectoryStore;
use crate::pool::WorkerPool;

use super::{grid_project, interpolate_cells, DensityMatrix, GridSpec};

/// What [`rasterize`] counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RasterStats {
    /// Points that landed in the grid.
    pub points: u64,
    /// Cells added by gap interpolation.
    pub interpolated: u64,
    /// Points outside the grid bounds, skipped.
    pub out_of_bounds: u64,
}

impl RasterStats {
    fn merge(self, o: RasterStats) -> RasterStats {
        RasterStats {
            points: self.points + o.points,
            interpolated: self.interpolated + o.interpolated,
            out_of_bounds: self.out_of_bounds + o.out_of_bounds,
        }
    }
}

fn accumulate(
    store: &FlatTrajectoryStore,
    labels: &[u32],
    grid: &GridSpec,
    interpolate: bool,
    range: Range<usize>,
    counts: &mut [u64],
) -> RasterStats {
    let mut stats = RasterStats::default();
    let pts = &store.points;
    for n in range {
        let Some(cell) = grid_project(pts[n].pos, grid) else {
            stats.out_of_bounds += 1;
            continue;
        };
        counts[grid.index(cell)] += 1;
        stats.points += 1;
        if interpolate && n + 1 < pts.len() && labels[n] == labels[n + 1] {
            if let Some(next) = grid_project(pts[n + 1].pos, grid) {
                for c in interpolate_cells(cell, next) {
                    counts[grid.index(c)] += 1;
                    stats.interpolated += 1;
                }
            }
        }
    }
    stats
}

/// Count matrix of every point in `store`, plus the cells bridging gaps
/// between consecutive points of the same trajectory when `interpolate` is
/// set.
///
/// Each worker accumulates a contiguous range of the flat point array into
/// a private grid; the grids are summed at the end, so the result does not
/// depend on the worker count.
pub fn rasterize(
    store: &FlatTrajectoryStore,
    grid: &GridSpec,
    interpolate: bool,
    pool: &WorkerPool,
) -> (DensityMatrix, RasterStats) {
    let labels = store.trajectory_labels();
    let total = store.points.len();
    let cells = grid.u() * grid.v();
    let parts = pool.workers().min(total.max(1));
    let chunk = total.div_ceil(parts).max(1);

    let partials: Vec<(Vec<u64>, RasterStats)> = pool.map_range(parts, |w| {
        let range = (w * chunk).min(total)..((w + 1) * chunk).min(total);
        let mut counts = vec![0u64; cells];
        let stats = accumulate(store, &labels, grid, interpolate, range, &mut counts);
        (counts, stats)
    });

    let stats = partials
        .iter()
        .fold(RasterStats::default(), |acc, (_, s)| acc.merge(*s));
    let mut out = vec![0.0f64; cells];
    pool.for_each_chunk_mut(&mut out, 1 << 14, |c, dst| {
        let base = c << 14;
        for (j, d) in dst.iter_mut().enumerate() {
            *d = partials.iter().map(|(p, _)| p[base + j]).sum::<u64>() as f64;
        }
    });
    let m = DensityMatrix::from_cells(grid.u(), grid.v(), out).expect("counts are non-negative");
    (m, stats)
}

/// Single-threaded rasterizer walking one trajectory at a time.
pub fn rasterize_reference(
    store: &FlatTrajectoryStore,
    grid: &GridSpec,
    interpolate: bool,
) -> (DensityMatrix, RasterStats) {
    let mut m = DensityMatrix::zeros(grid.u(), grid.v());
    let mut stats = RasterStats::default();
    for k in 0..store.len() {
        let traj = store.trajectory(k);
        let cells: Vec<_> = traj.iter().map(|p| grid_project(p.pos, grid)).collect();
        for (i, c) in cells.iter().enumerate() {
            let Some(c) = c else {
                stats.out_of_bounds += 1;
                continue;
            };
            m.cells[grid.index(*c)] += 1.0;
            stats.points += 1;
            if !interpolate {
                continue;
            }
            if let Some(Some(next)) = cells.get(i + 1) {
                for mid in interpolate_cells(*c, *next) {
                    m.cells[grid.index(mid)] += 1.0;
                    stats.interpolated += 1;
                }
            }
        }
    }
    (m, stats)
}
