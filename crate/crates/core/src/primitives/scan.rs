use rayon::prelude::*;

use super::Block;
use crate::pool::WorkerPool;

/// Prefix sums excluding the current element: `out[i] = Σ_{j<i} values[j]`.
pub fn exclusive_scan_serial(values: &[u64]) -> Vec<u64> {
    values
        .iter()
        .scan(0u64, |acc, &v| {
            let prev = *acc;
            *acc += v;
            Some(prev)
        })
        .collect()
}

/// Reusable scratch space for [`exclusive_scan_in_place`].
///
/// Holds one zero-padded power-of-two tile per block (where the balanced-tree
/// sweeps run), the per-block totals, and the same again for every level of
/// recursion over the totals.
#[derive(Debug, Clone, Default)]
pub struct ScanScratch {
    buf: Vec<u64>,
}

impl ScanScratch {
    /// Scratch large enough to scan up to `max_len` elements with `block`.
    pub fn for_len(max_len: usize, block: Block) -> Self {
        ScanScratch {
            buf: vec![0; scratch_len(max_len, block.capacity())],
        }
    }

    fn ensure(&mut self, len: usize, block: Block) -> &mut [u64] {
        let need = scratch_len(len, block.capacity());
        if self.buf.len() < need {
            self.buf.resize(need, 0);
        }
        &mut self.buf[..need]
    }
}

fn tile_len(block_cap: usize) -> usize {
    block_cap.next_power_of_two()
}

fn scratch_len(n: usize, block_cap: usize) -> usize {
    if n == 0 {
        return 0;
    }
    let blocks = n.div_ceil(block_cap);
    let here = blocks * tile_len(block_cap.min(n)) + blocks;
    if blocks == 1 {
        here
    } else {
        here + scratch_len(blocks, block_cap)
    }
}

/// Work-efficient exclusive scan over a padded power-of-two tile. Returns the
/// tile total.
fn sweep_tile(tile: &mut [u64]) -> u64 {
    let n = tile.len();
    debug_assert!(n.is_power_of_two());
    // Up-sweep: build partial sums at internal nodes of the balanced tree.
    let mut stride = 1;
    while stride < n {
        let mut k = 2 * stride - 1;
        while k < n {
            tile[k] += tile[k - stride];
            k += 2 * stride;
        }
        stride *= 2;
    }
    let total = tile[n - 1];
    // Down-sweep from a zeroed root.
    tile[n - 1] = 0;
    stride = n / 2;
    while stride >= 1 {
        let mut k = 2 * stride - 1;
        while k < n {
            let left = tile[k - stride];
            tile[k - stride] = tile[k];
            tile[k] += left;
            k += 2 * stride;
        }
        stride /= 2;
    }
    total
}

fn scan_block(data: &mut [u64], tile: &mut [u64], total: &mut u64) {
    let m = data.len();
    tile[..m].copy_from_slice(data);
    tile[m..].fill(0);
    *total = sweep_tile(tile);
    data.copy_from_slice(&tile[..m]);
}

/// Exclusive scan in place. Returns the sum of all input elements.
///
/// Each block is scanned with an up-sweep/down-sweep pass over a padded tile,
/// block totals are scanned recursively, and every block after the first is
/// offset by the scanned total of the blocks before it.
pub fn exclusive_scan_in_place(
    data: &mut [u64],
    block: Block,
    pool: &WorkerPool,
    scratch: &mut ScanScratch,
) -> u64 {
    let buf = scratch.ensure(data.len(), block);
    scan_level(data, block.capacity(), pool, buf)
}

fn scan_level(data: &mut [u64], cap: usize, pool: &WorkerPool, scratch: &mut [u64]) -> u64 {
    let n = data.len();
    if n == 0 {
        return 0;
    }
    let blocks = n.div_ceil(cap);
    let tl = tile_len(cap.min(n));
    let (tiles, rest) = scratch.split_at_mut(blocks * tl);
    let (totals, deeper) = rest.split_at_mut(blocks);

    match pool.rayon() {
        Some(p) if blocks > 1 => p.install(|| {
            data.par_chunks_mut(cap)
                .zip(tiles.par_chunks_mut(tl))
                .zip(totals.par_iter_mut())
                .for_each(|((d, t), s)| scan_block(d, t, s));
        }),
        _ => data
            .chunks_mut(cap)
            .zip(tiles.chunks_mut(tl))
            .zip(totals.iter_mut())
            .for_each(|((d, t), s)| scan_block(d, t, s)),
    }

    if blocks == 1 {
        return totals[0];
    }

    let grand_total = scan_level(totals, cap, pool, deeper);

    let totals: &[u64] = totals;
    let propagate = |b: usize, d: &mut [u64]| {
        if b > 0 {
            let offset = totals[b];
            d.iter_mut().for_each(|x| *x += offset);
        }
    };
    match pool.rayon() {
        Some(p) => p.install(|| {
            data.par_chunks_mut(cap)
                .enumerate()
                .for_each(|(b, d)| propagate(b, d));
        }),
        None => data
            .chunks_mut(cap)
            .enumerate()
            .for_each(|(b, d)| propagate(b, d)),
    }
    grand_total
}

/// Multi-block parallel exclusive scan. Identical to
/// [`exclusive_scan_serial`] for every input, block shape and worker count.
pub fn exclusive_scan_parallel(values: &[u64], block: Block, pool: &WorkerPool) -> Vec<u64> {
    let mut out = values.to_vec();
    let mut scratch = ScanScratch::for_len(values.len(), block);
    exclusive_scan_in_place(&mut out, block, pool, &mut scratch);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fold_oracle(values: &[u64]) -> Vec<u64> {
        let mut out = Vec::with_capacity(values.len());
        let mut acc = 0;
        for &v in values {
            out.push(acc);
            acc += v;
        }
        out
    }

    #[test]
    fn serial_examples() {
        assert!(exclusive_scan_serial(&[]).is_empty());
        assert_eq!(exclusive_scan_serial(&[1, 1, 0, 1]), vec![0, 1, 2, 2]);
    }

    #[test]
    fn counting() {
        let pool = WorkerPool::new(2).unwrap();
        let out = exclusive_scan_parallel(&[1; 1000], Block::new(8, 8).unwrap(), &pool);
        assert_eq!(out, (0..1000).collect::<Vec<u64>>());
    }

    #[test]
    fn single_block_single_worker_matches_serial() {
        let v: Vec<u64> = (0..37).map(|i| (i * 7 + 3) % 11).collect();
        let out = exclusive_scan_parallel(&v, Block::new(8, 8).unwrap(), &WorkerPool::sequential());
        assert_eq!(out, exclusive_scan_serial(&v));
    }

    #[test]
    fn returns_total() {
        let mut v: Vec<u64> = (1..=5000).collect();
        let block = Block::new(4, 4).unwrap();
        let mut scratch = ScanScratch::default();
        let total = exclusive_scan_in_place(&mut v, block, &WorkerPool::sequential(), &mut scratch);
        assert_eq!(total, 5000 * 5001 / 2);
        assert_eq!(v[4999] + 5000, total);
    }

    #[test]
    fn tile_sweep_small() {
        let mut t = [3, 1, 7, 0, 4, 1, 6, 3];
        assert_eq!(sweep_tile(&mut t), 25);
        assert_eq!(t, [0, 3, 4, 11, 11, 15, 16, 22]);
    }

    proptest! {
        #[test]
        fn parallel_matches_fold(
            values in proptest::collection::vec(0u64..1000, 0..3000),
            w in 1usize..9,
            h in 2usize..9,
            workers in 1usize..4,
        ) {
            let pool = WorkerPool::new(workers).unwrap();
            let block = Block::new(w, h).unwrap();
            prop_assert_eq!(exclusive_scan_parallel(&values, block, &pool), fold_oracle(&values));
            prop_assert_eq!(exclusive_scan_serial(&values), fold_oracle(&values));
        }
    }
}
