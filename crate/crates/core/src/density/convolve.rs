use crate::error::{Error, Result};
use crate::pool::WorkerPool;

use super::{DensityMatrix, KernelMatrix};

const TILE_ROWS: usize = 16;
const TILE_COLS: usize = 512;

fn check(m: &DensityMatrix, k: &KernelMatrix) -> Result<()> {
    if k.size() > m.u().min(m.v()) {
        return Err(Error::KernelTooLarge {
            bandwidth: k.size(),
            u: m.u(),
            v: m.v(),
        });
    }
    Ok(())
}

/// `M̄(x̃, ỹ) = Σ_{s,t} f(s, t) · M(x̃ − s, ỹ − t)` with zeros outside the
/// grid.
///
/// The output is cut into tiles of rows and columns that workers fill
/// independently. Every cell sums its terms in the same fixed order (`t`,
/// then `s`, ascending), so the result is identical for any worker count.
pub fn convolve(m: &DensityMatrix, k: &KernelMatrix, pool: &WorkerPool) -> Result<DensityMatrix> {
    check(m, k)?;
    let (u, v) = (m.u(), m.v());
    let a = k.half_width() as isize;
    let src = m.cells();
    let mut out = vec![0.0f64; u * v];

    pool.for_each_chunk_mut(&mut out, TILE_ROWS * u, |band, rows| {
        let r0 = band * TILE_ROWS;
        for x0 in (0..u).step_by(TILE_COLS) {
            let x1 = (x0 + TILE_COLS).min(u);
            for (dr, dst) in rows.chunks_mut(u).enumerate() {
                let r = (r0 + dr) as isize;
                let dst = &mut dst[x0..x1];
                for t in -a..=a {
                    let rr = r - t;
                    if rr < 0 || rr >= v as isize {
                        continue;
                    }
                    let line = &src[rr as usize * u..(rr as usize + 1) * u];
                    for s in -a..=a {
                        let w = k.at(s, t);
                        // Columns c with 0 ≤ c − s < u, clipped to the tile.
                        let lo = (x0 as isize).max(s) as usize;
                        let hi = ((x1 as isize).min(u as isize + s)).max(lo as isize) as usize;
                        let from = (lo as isize - s) as usize;
                        for (d, &m) in dst[lo - x0..hi - x0].iter_mut().zip(&line[from..from + (hi - lo)]) {
                            *d += w * m;
                        }
                    }
                }
            }
        }
    });
    DensityMatrix::from_cells(u, v, out)
        .map_err(|e| Error::InvalidArgument(format!("convolution produced invalid cells: {e}")))
}

/// Direct four-deep loop over cells and kernel offsets.
pub fn convolve_reference(m: &DensityMatrix, k: &KernelMatrix) -> Result<DensityMatrix> {
    check(m, k)?;
    let (u, v) = (m.u() as isize, m.v() as isize);
    let a = k.half_width() as isize;
    let mut out = Vec::with_capacity(m.cells().len());
    for y in 0..v {
        for x in 0..u {
            let mut acc = 0.0;
            for t in -a..=a {
                for s in -a..=a {
                    let (xs, yt) = (x - s, y - t);
                    if (0..u).contains(&xs) && (0..v).contains(&yt) {
                        acc += k.at(s, t) * m.cells()[(yt * u + xs) as usize];
                    }
                }
            }
            out.push(acc);
        }
    }
    DensityMatrix::from_cells(m.u(), m.v(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{build_kernel, KernelFamily, KernelSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn kernel(f: KernelFamily, w: usize) -> KernelMatrix {
        build_kernel(&KernelSpec::new(f, w).unwrap())
    }

    fn random(u: usize, v: usize, seed: u64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DensityMatrix::from_cells(u, v, (0..u * v).map(|_| rng.gen_range(0.0..10.0)).collect()).unwrap()
    }

    #[test]
    fn identity_kernel() {
        let m = random(9, 5, 1);
        let k = kernel(KernelFamily::Gaussian, 1);
        assert_eq!(convolve(&m, &k, &WorkerPool::sequential()).unwrap(), m);
    }

    #[test]
    fn impulse_reproduces_kernel() {
        let mut cells = vec![0.0; 11 * 11];
        cells[5 * 11 + 5] = 1.0;
        let m = DensityMatrix::from_cells(11, 11, cells).unwrap();
        let k = kernel(KernelFamily::Triweight, 5);
        let out = convolve(&m, &k, &WorkerPool::new(3).unwrap()).unwrap();
        for y in 0..11isize {
            for x in 0..11isize {
                let (s, t) = (x - 5, y - 5);
                let want = if s.abs() <= 2 && t.abs() <= 2 { k.at(s, t) } else { 0.0 };
                assert_eq!(out.get(x as usize + 1, y as usize + 1), want);
            }
        }
    }

    #[test]
    fn kernel_larger_than_grid() {
        let m = random(6, 4, 2);
        assert!(matches!(
            convolve(&m, &kernel(KernelFamily::Uniform, 5), &WorkerPool::sequential()),
            Err(Error::KernelTooLarge { .. })
        ));
        assert!(convolve(&m, &kernel(KernelFamily::Uniform, 3), &WorkerPool::sequential()).is_ok());
    }

    #[test]
    fn matches_reference_on_odd_shapes() {
        let pool = WorkerPool::new(4).unwrap();
        for (u, v) in [(7, 40), (600, 20), (33, 17)] {
            let m = random(u, v, (u * v) as u64);
            for w in [1, 3, 7] {
                let k = kernel(KernelFamily::Cosine, w);
                assert_eq!(convolve(&m, &k, &pool).unwrap(), convolve_reference(&m, &k).unwrap());
            }
        }
    }

    #[test]
    fn border_mass_loss() {
        let mut cells = vec![0.0; 64];
        cells[0] = 4.0;
        cells[27] = 2.0;
        let m = DensityMatrix::from_cells(8, 8, cells).unwrap();
        let out = convolve(&m, &kernel(KernelFamily::Gaussian, 3), &WorkerPool::sequential()).unwrap();
        assert!(out.sum() < m.sum());
        let interior = DensityMatrix::from_cells(8, 8, {
            let mut c = vec![0.0; 64];
            c[27] = 2.0;
            c
        })
        .unwrap();
        let out = convolve(&interior, &kernel(KernelFamily::Gaussian, 3), &WorkerPool::sequential()).unwrap();
        assert!((out.sum() - 2.0).abs() <= 2e-9);
    }
}
