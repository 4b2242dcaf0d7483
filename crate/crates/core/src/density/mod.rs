//! Vessel density maps.
//!
//! Points are binned into a `u × v` count matrix (optionally filling the
//! cells between consecutive points of a trajectory), and the matrix is
//! smoothed by convolution with a normalized kernel. Cells are addressed
//! 1-based as `(x̃, ỹ)` with `ỹ` growing northwards; storage is row-major
//! starting from the southernmost row.

mod convolve;
mod dump;
mod kernel;
mod raster;
mod render;

pub use convolve::{convolve, convolve_reference};
pub use dump::{read_dump, write_dump, DUMP_MAGIC};
pub use kernel::{build_kernel, kernel_value, KernelFamily, KernelMatrix, KernelSpec};
pub use raster::{rasterize, rasterize_reference, RasterStats};
pub use render::{render_pgm, render_png, Colormap, Scale};

use crate::error::{Error, Result};
use crate::geo::CartesianPoint;
use crate::model::Bounds;

/// Raster geometry: `u` columns by `v` rows covering `bounds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    u: usize,
    v: usize,
    bounds: Bounds,
}

impl GridSpec {
    pub fn new(u: usize, v: usize, bounds: Bounds) -> Result<Self> {
        if u < 2 || v < 2 {
            return Err(Error::InvalidGrid(format!("grid must be at least 2x2, got {u}x{v}")));
        }
        if u32::try_from(u).is_err() || u32::try_from(v).is_err() {
            return Err(Error::InvalidGrid(format!("grid {u}x{v} is too large")));
        }
        let ok = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && hi > lo;
        if !ok(bounds.x_min, bounds.x_max) || !ok(bounds.y_min, bounds.y_max) {
            return Err(Error::InvalidGrid(format!(
                "bounds must have positive extent, got x [{}, {}] y [{}, {}]",
                bounds.x_min, bounds.x_max, bounds.y_min, bounds.y_max
            )));
        }
        Ok(GridSpec { u, v, bounds })
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    /// Storage offset of a cell.
    #[inline]
    pub fn index(&self, c: GridCell) -> usize {
        (c.y as usize - 1) * self.u + (c.x as usize - 1)
    }
}

/// 1-based cell coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridCell {
    pub x: u32,
    pub y: u32,
}

impl GridCell {
    pub const fn new(x: u32, y: u32) -> Self {
        GridCell { x, y }
    }
}

fn axis(p: f64, lo: f64, hi: f64, n: usize) -> u32 {
    let c = ((p - lo) / (hi - lo) * (n - 1) as f64).ceil() as u32 + 1;
    c.clamp(1, n as u32)
}

/// Cell containing `p`, or `None` if `p` lies outside the grid bounds.
///
/// `x̃ = ⌈(x − x_min) / (x_max − x_min) · (u − 1)⌉ + 1`, and likewise for `ỹ`.
pub fn grid_project(p: CartesianPoint, grid: &GridSpec) -> Option<GridCell> {
    let b = &grid.bounds;
    if !b.contains(p) {
        return None;
    }
    Some(GridCell {
        x: axis(p.x, b.x_min, b.x_max, grid.u),
        y: axis(p.y, b.y_min, b.y_max, grid.v),
    })
}

/// Cells strictly between `a` and `b` on the rounded straight line joining
/// them; empty when the two are already 8-adjacent.
pub fn interpolate_cells(a: GridCell, b: GridCell) -> impl Iterator<Item = GridCell> {
    let dx = i64::from(b.x) - i64::from(a.x);
    let dy = i64::from(b.y) - i64::from(a.y);
    let c_max = dx.abs().max(dy.abs());
    let lerp = move |from: u32, delta: i64, c: i64| {
        // c·Δ is exact, so halfway cases round the same in every direction.
        (f64::from(from) + (c * delta) as f64 / c_max as f64).round() as u32
    };
    (1..c_max.max(1)).map(move |c| GridCell {
        x: lerp(a.x, dx, c),
        y: lerp(a.y, dy, c),
    })
}

/// A `u × v` grid of non-negative intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    u: usize,
    v: usize,
    cells: Vec<f64>,
}

impl DensityMatrix {
    pub fn zeros(u: usize, v: usize) -> Self {
        DensityMatrix {
            u,
            v,
            cells: vec![0.0; u * v],
        }
    }

    /// Wraps row-major cells, southernmost row first.
    pub fn from_cells(u: usize, v: usize, cells: Vec<f64>) -> Result<Self> {
        if cells.len() != u * v {
            return Err(Error::LengthMismatch {
                what: "density cells vs u*v",
                left: cells.len(),
                right: u * v,
            });
        }
        if let Some(bad) = cells.iter().find(|c| !(**c >= 0.0) || !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "density cells must be finite and non-negative, found {bad}"
            )));
        }
        Ok(DensityMatrix { u, v, cells })
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<f64> {
        self.cells
    }

    /// Value at 1-based `(x̃, ỹ)`.
    pub fn get(&self, x: usize, y: usize) -> f64 {
        assert!((1..=self.u).contains(&x) && (1..=self.v).contains(&y));
        self.cells[(y - 1) * self.u + (x - 1)]
    }

    /// Row `ỹ` (1-based), west to east.
    pub fn row(&self, y: usize) -> &[f64] {
        &self.cells[(y - 1) * self.u..y * self.u]
    }

    pub fn sum(&self) -> f64 {
        self.cells.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.cells.iter().copied().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_grid(u: usize, v: usize) -> GridSpec {
        GridSpec::new(
            u,
            v,
            Bounds {
                x_min: 0.0,
                x_max: 1.0,
                y_min: 0.0,
                y_max: 1.0,
            },
        )
        .unwrap()
    }

    #[test]
    fn grid_validation() {
        let b = Bounds {
            x_min: 0.0,
            x_max: 0.0,
            y_min: 0.0,
            y_max: 1.0,
        };
        assert!(GridSpec::new(4, 4, b).is_err());
        let b = Bounds { x_max: 1.0, ..b };
        assert!(GridSpec::new(1, 4, b).is_err());
        assert!(GridSpec::new(2, 2, b).is_ok());
    }

    #[test]
    fn projection_endpoints() {
        let g = unit_grid(5, 3);
        assert_eq!(grid_project(CartesianPoint::new(0.0, 0.0), &g), Some(GridCell::new(1, 1)));
        assert_eq!(grid_project(CartesianPoint::new(1.0, 1.0), &g), Some(GridCell::new(5, 3)));
        assert_eq!(grid_project(CartesianPoint::new(1.0, 0.5), &g), Some(GridCell::new(5, 2)));
        assert_eq!(grid_project(CartesianPoint::new(1.5, 0.5), &g), None);
    }

    #[test]
    fn projection_midpoint_u3() {
        let g = unit_grid(3, 3);
        assert_eq!(grid_project(CartesianPoint::new(0.5, 0.5), &g), Some(GridCell::new(2, 2)));
        // Just right of the minimum rounds up into the second cell.
        assert_eq!(grid_project(CartesianPoint::new(1e-9, 0.0), &g).unwrap().x, 2);
    }

    #[test]
    fn interpolation_examples() {
        let c = GridCell::new;
        assert_eq!(interpolate_cells(c(1, 1), c(2, 2)).count(), 0);
        assert_eq!(interpolate_cells(c(3, 3), c(3, 3)).count(), 0);
        assert_eq!(interpolate_cells(c(1, 1), c(4, 1)).collect::<Vec<_>>(), vec![c(2, 1), c(3, 1)]);
        assert_eq!(interpolate_cells(c(4, 1), c(1, 1)).collect::<Vec<_>>(), vec![c(3, 1), c(2, 1)]);
        // Δ = (4, 2): ỹ = 1 + 2c/4, and 1.5 and 2.5 round up.
        assert_eq!(
            interpolate_cells(c(1, 1), c(5, 3)).collect::<Vec<_>>(),
            vec![c(2, 2), c(3, 2), c(4, 3)]
        );
    }

    #[test]
    fn matrix_accessors() {
        let m = DensityMatrix::from_cells(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.get(2, 1), 2.0);
        assert_eq!(m.row(2), &[3.0, 4.0]);
        assert_eq!(m.sum(), 10.0);
        assert_eq!(m.max(), 4.0);
        assert!(DensityMatrix::from_cells(2, 2, vec![1.0; 3]).is_err());
        assert!(DensityMatrix::from_cells(1, 1, vec![-1.0]).is_err());
    }

    proptest! {
        #[test]
        fn projection_matches_formula(x in 0.0f64..=1.0, y in 0.0f64..=1.0, u in 2usize..2000, v in 2usize..2000) {
            let g = GridSpec::new(u, v, Bounds { x_min: -3.0, x_max: 7.0, y_min: 10.0, y_max: 12.5 }).unwrap();
            let p = CartesianPoint::new(-3.0 + 10.0 * x, 10.0 + 2.5 * y);
            let c = grid_project(p, &g).unwrap();
            let fx = ((p.x + 3.0) / 10.0 * (u - 1) as f64).ceil() + 1.0;
            let fy = ((p.y - 10.0) / 2.5 * (v - 1) as f64).ceil() + 1.0;
            prop_assert_eq!(f64::from(c.x), fx);
            prop_assert_eq!(f64::from(c.y), fy);
        }

        #[test]
        fn interpolated_chain_is_connected(ax in 1u32..200, ay in 1u32..200, bx in 1u32..200, by in 1u32..200) {
            let (a, b) = (GridCell::new(ax, ay), GridCell::new(bx, by));
            let inner: Vec<GridCell> = interpolate_cells(a, b).collect();
            let c_max = ax.abs_diff(bx).max(ay.abs_diff(by));
            prop_assert_eq!(inner.len() as u32, c_max.saturating_sub(1));
            let chain: Vec<GridCell> = std::iter::once(a).chain(inner).chain(std::iter::once(b)).collect();
            for w in chain.windows(2) {
                prop_assert!(w[0].x.abs_diff(w[1].x) <= 1 && w[0].y.abs_diff(w[1].y) <= 1);
            }
            for c in &chain {
                prop_assert!(ax.min(bx) <= c.x && c.x <= ax.max(bx));
                prop_assert!(ay.min(by) <= c.y && c.y <= ay.max(by));
            }
            for w in chain.windows(2) {
                let fwd = |p: u32, q: u32, s: u32, e: u32| if s <= e { p <= q } else { p >= q };
                prop_assert!(fwd(w[0].x, w[1].x, ax, bx) && fwd(w[0].y, w[1].y, ay, by));
            }
        }
    }
}
