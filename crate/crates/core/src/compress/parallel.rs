use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;

use crate::geo::CartesianPoint;
use crate::model::{FlatTrajectoryStore, TimestampedPoint};
use crate::pool::WorkerPool;
use crate::primitives::{
    exclusive_scan_in_place, segmented_max_scan_in_place, Block, ScanScratch, SegScanScratch,
    SegmentedMaxResult,
};

use super::{gather, ved, BatchCompressionReport, CompressionThreshold, StageTimings, TrajectoryReport};

/// Points handed to one task in the point-wise phases.
const PHASE_CHUNK: usize = 4096;
/// Segments handed to one task in the merge phase.
const MERGE_CHUNK: usize = 2048;

/// Anything with a planar position.
pub trait Positioned {
    fn position(&self) -> CartesianPoint;
}

impl Positioned for CartesianPoint {
    #[inline]
    fn position(&self) -> CartesianPoint {
        *self
    }
}

impl Positioned for TimestampedPoint {
    #[inline]
    fn position(&self) -> CartesianPoint {
        self.pos
    }
}

/// Tuning for [`dp_compress_parallel_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParallelConfig {
    pub block: Block,
    /// Trajectories at least this long get the whole pool for their
    /// per-point phases; shorter ones run as independent tasks.
    pub large_trajectory: usize,
}

impl Default for ParallelConfig {
    fn default() -> Self {
        ParallelConfig {
            block: Block::DEFAULT,
            large_trajectory: 1 << 16,
        }
    }
}

/// Working set of one trajectory under compression.
///
/// Labels are 1-based: label `L` is the segment running from `kept[L-1]` up
/// to (not including) `kept[L]`, and the last point carries label
/// `kept.len()`. Buffers keep their capacity across [`init_state`] calls so
/// one state can serve a whole batch.
#[derive(Debug, Clone)]
pub struct CompressionState {
    /// Segment label of every point.
    pub lp: Vec<u32>,
    /// Distance of every point from its segment's chord.
    pub d: Vec<f64>,
    pub max: SegmentedMaxResult,
    /// Per segment: 1 if it is split this round.
    pub lc: Vec<u64>,
    /// Per split segment: index of the feature point, which starts the new
    /// right-hand segment.
    pub is_idx: Vec<u32>,
    /// Exclusive scan of `lc`.
    pub lacc: Vec<u64>,
    /// Retained point indices, ascending.
    pub kept: Vec<u32>,
    /// Next retained set, built during the merge.
    pub staging: Vec<u32>,
    pub iterations: usize,
    block: Block,
    scan_scratch: ScanScratch,
    seg_scratch: SegScanScratch,
}

impl CompressionState {
    /// Empty state with room for trajectories of up to `max_len` points.
    pub fn with_capacity(max_len: usize, block: Block) -> Self {
        CompressionState {
            lp: Vec::with_capacity(max_len),
            d: Vec::with_capacity(max_len),
            max: SegmentedMaxResult {
                d_max: Vec::with_capacity(max_len),
                i_max: Vec::with_capacity(max_len),
            },
            lc: Vec::with_capacity(max_len),
            is_idx: Vec::with_capacity(max_len),
            lacc: Vec::with_capacity(max_len),
            kept: Vec::with_capacity(max_len),
            staging: Vec::with_capacity(max_len),
            iterations: 0,
            block,
            scan_scratch: ScanScratch::for_len(max_len, block),
            seg_scratch: SegScanScratch::for_len(max_len, block),
        }
    }

    pub fn len(&self) -> usize {
        self.lp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lp.is_empty()
    }

    /// Resets the state for a trajectory of `n ≥ 2` points: both endpoints
    /// kept, every point but the last in segment 1, the last point alone
    /// with label 2.
    pub fn reset(&mut self, n: usize) {
        assert!(n >= 2, "compression state needs at least two points");
        assert!(u32::try_from(n).is_ok(), "trajectory exceeds u32 indexing");
        self.lp.clear();
        self.lp.resize(n - 1, 1);
        self.lp.push(2);
        self.kept.clear();
        self.kept.extend([0, n as u32 - 1]);
        self.staging.clear();
        self.lc.clear();
        self.is_idx.clear();
        self.lacc.clear();
        self.d.clear();
        self.max.d_max.clear();
        self.max.i_max.clear();
        self.iterations = 0;
    }

    /// Checks that `lp` is a contiguous segmentation matching `kept`.
    pub fn check_invariants(&self) -> bool {
        let n = self.lp.len();
        let m = self.kept.len();
        if m < 2 || self.kept[0] != 0 || self.kept[m - 1] as usize != n - 1 {
            return false;
        }
        if self.kept.windows(2).any(|w| w[0] >= w[1]) {
            return false;
        }
        if self.lp[n - 1] as usize != m {
            return false;
        }
        (0..m - 1).all(|k| {
            let r = self.kept[k] as usize..self.kept[k + 1] as usize;
            self.lp[r].iter().all(|&l| l as usize == k + 1)
        })
    }
}

/// State for `points`, or `None` when there is nothing to compress.
pub fn init_state<P>(points: &[P], block: Block) -> Option<CompressionState> {
    if points.len() < 2 {
        return None;
    }
    let mut state = CompressionState::with_capacity(points.len(), block);
    state.reset(points.len());
    Some(state)
}

/// One round over every current segment. Returns `true` once no segment
/// was split, i.e. `state.kept` is final.
pub fn iterate<P: Positioned + Sync>(
    state: &mut CompressionState,
    points: &[P],
    eps: CompressionThreshold,
    pool: &WorkerPool,
) -> bool {
    let n = state.lp.len();
    assert_eq!(points.len(), n, "state was built for a different trajectory");
    let eps = eps.meters();
    let m = state.kept.len();
    state.iterations += 1;

    let CompressionState {
        lp,
        d,
        max,
        lc,
        is_idx,
        lacc,
        kept,
        staging,
        block,
        scan_scratch,
        seg_scratch,
        ..
    } = state;

    // (a) distance of every point from its own segment's chord
    d.resize(n, 0.0);
    {
        let (lp, kept) = (&*lp, &*kept);
        pool.for_each_chunk_mut(d, PHASE_CHUNK, |c, out| {
            let base = c * PHASE_CHUNK;
            for (j, dj) in out.iter_mut().enumerate() {
                let i = base + j;
                let label = lp[i] as usize;
                *dj = if label == m {
                    0.0
                } else {
                    let s = points[kept[label - 1] as usize].position();
                    let e = points[kept[label] as usize].position();
                    ved(&points[i].position(), &s, &e)
                };
            }
        });
    }

    // (b) farthest point of every segment
    max.d_max.clear();
    max.d_max.extend_from_slice(d);
    max.i_max.clear();
    max.i_max.extend(0..n as u32);
    segmented_max_scan_in_place(&mut max.d_max, &mut max.i_max, lp, *block, pool, seg_scratch)
        .expect("labels stay sorted between rounds");

    // (c) split flags and feature points; the last point's pseudo-segment
    // never splits
    lc.resize(m, 0);
    is_idx.resize(m, u32::MAX);
    {
        let (kept, max) = (&*kept, &*max);
        pool.for_each_chunk_mut2(lc, is_idx, MERGE_CHUNK, |c, lc, is| {
            let base = c * MERGE_CHUNK;
            for (j, (flag, idx)) in lc.iter_mut().zip(is.iter_mut()).enumerate() {
                let k = base + j;
                *flag = 0;
                *idx = u32::MAX;
                if k + 1 < m {
                    let last = kept[k + 1] as usize - 1;
                    if max.d_max[last] > eps {
                        *flag = 1;
                        *idx = max.i_max[last];
                    }
                }
            }
        });
    }

    // (d) output offsets
    lacc.clear();
    lacc.extend_from_slice(lc);
    let added = exclusive_scan_in_place(lacc, *block, pool, scan_scratch);
    if added == 0 {
        return true;
    }

    // (e) merge into the next retained set
    staging.clear();
    staging.resize(m + added as usize, 0);
    {
        let merge = Merge {
            kept,
            lc,
            lacc,
            is_idx,
        };
        match pool.rayon() {
            Some(p) if m > MERGE_CHUNK => p.install(|| merge.run_par(staging, 0, m)),
            _ => merge.run(staging, 0, m),
        }
    }

    // (f) relabel: segments shift right by the splits before them, and
    // points from a feature point onward move into the new segment
    {
        let (lc, lacc, is_idx) = (&*lc, &*lacc, &*is_idx);
        pool.for_each_chunk_mut(lp, PHASE_CHUNK, |c, out| {
            let base = c * PHASE_CHUNK;
            for (j, l) in out.iter_mut().enumerate() {
                let i = (base + j) as u32;
                let k = *l as usize - 1;
                let shift = lacc[k] + u64::from(lc[k] == 1 && i >= is_idx[k]);
                *l += shift as u32;
            }
        });
    }

    // (g)
    std::mem::swap(kept, staging);
    debug_assert!(state.check_invariants());
    false
}

struct Merge<'a> {
    kept: &'a [u32],
    lc: &'a [u64],
    lacc: &'a [u64],
    is_idx: &'a [u32],
}

impl Merge<'_> {
    fn start(&self, k: usize) -> usize {
        if k == self.kept.len() {
            k + self.lacc[k - 1] as usize + self.lc[k - 1] as usize
        } else {
            k + self.lacc[k] as usize
        }
    }

    /// Writes segments `k0..k1`; `out` starts at the output slot of `k0`.
    fn run(&self, out: &mut [u32], k0: usize, k1: usize) {
        let base = self.start(k0);
        for k in k0..k1 {
            let at = self.start(k) - base;
            out[at] = self.kept[k];
            if self.lc[k] == 1 {
                out[at + 1] = self.is_idx[k];
            }
        }
    }

    fn run_par(&self, out: &mut [u32], k0: usize, k1: usize) {
        if k1 - k0 <= MERGE_CHUNK {
            return self.run(out, k0, k1);
        }
        let mid = k0 + (k1 - k0) / 2;
        let (left, right) = out.split_at_mut(self.start(mid) - self.start(k0));
        rayon::join(|| self.run_par(left, k0, mid), || self.run_par(right, mid, k1));
    }
}

/// Runs rounds until done and returns the retained indices.
fn compress_one<P: Positioned + Sync>(
    state: &mut CompressionState,
    points: &[P],
    eps: CompressionThreshold,
    pool: &WorkerPool,
) -> (Vec<u32>, usize) {
    if points.len() < 2 {
        return ((0..points.len() as u32).collect(), 0);
    }
    state.reset(points.len());
    while !iterate(state, points, eps, pool) {}
    (state.kept.clone(), state.iterations)
}

/// Parallel Douglas-Peucker over every trajectory of `store` with the
/// default [`ParallelConfig`].
pub fn dp_compress_parallel(
    store: &FlatTrajectoryStore,
    eps: CompressionThreshold,
    pool: &WorkerPool,
) -> (FlatTrajectoryStore, BatchCompressionReport) {
    dp_compress_parallel_with(store, eps, pool, &ParallelConfig::default())
}

/// Parallel Douglas-Peucker with explicit tuning.
///
/// Long trajectories are compressed one after another, each spreading its
/// per-point phases over the whole pool. The rest run as independent tasks,
/// each with single-threaded phases on a workspace owned by the worker that
/// picked it up. All workspaces are allocated up front.
pub fn dp_compress_parallel_with(
    store: &FlatTrajectoryStore,
    eps: CompressionThreshold,
    pool: &WorkerPool,
    config: &ParallelConfig,
) -> (FlatTrajectoryStore, BatchCompressionReport) {
    let start = Instant::now();
    let threshold = if pool.is_sequential() {
        usize::MAX
    } else {
        config.large_trajectory.max(2)
    };
    let (large, small): (Vec<usize>, Vec<usize>) =
        (0..store.len()).partition(|&k| store.t_len[k] >= threshold);
    let small_max = small.iter().map(|&k| store.t_len[k]).max().unwrap_or(0);
    let large_max = large.iter().map(|&k| store.t_len[k]).max().unwrap_or(0);

    let mut allocations = 0;
    let mut large_ws = (!large.is_empty()).then(|| {
        allocations += 1;
        CompressionState::with_capacity(large_max, config.block)
    });
    let small_ws: Vec<Mutex<CompressionState>> = if small.is_empty() {
        Vec::new()
    } else {
        let count = pool.workers().min(small.len());
        allocations += count;
        (0..count)
            .map(|_| Mutex::new(CompressionState::with_capacity(small_max, config.block)))
            .collect()
    };
    let setup = start.elapsed();

    let mut kept: Vec<Vec<u32>> = vec![Vec::new(); store.len()];
    let mut iterations = vec![0usize; store.len()];

    if let Some(ws) = large_ws.as_mut() {
        for &k in &large {
            let (idx, it) = compress_one(ws, store.trajectory(k), eps, pool);
            kept[k] = idx;
            iterations[k] = it;
        }
    }

    let inline = WorkerPool::sequential();
    let run_small = |k: usize| {
        let w = pool.current_worker().unwrap_or(0) % small_ws.len();
        let mut ws = small_ws[w].lock().expect("workspace lock");
        (k, compress_one(&mut ws, store.trajectory(k), eps, &inline))
    };
    let results: Vec<(usize, (Vec<u32>, usize))> = match pool.rayon() {
        Some(p) if small.len() > 1 => p.install(|| small.par_iter().map(|&k| run_small(k)).collect()),
        _ => small.iter().map(|&k| run_small(k)).collect(),
    };
    for (k, (idx, it)) in results {
        kept[k] = idx;
        iterations[k] = it;
    }
    let compute = start.elapsed() - setup;

    let out = gather(store, &kept);
    let report = BatchCompressionReport {
        trajectories: (0..store.len())
            .map(|k| TrajectoryReport {
                original_len: store.t_len[k],
                compressed_len: kept[k].len(),
                iterations: iterations[k],
            })
            .collect(),
        timings: StageTimings {
            total: start.elapsed(),
            staging: start.elapsed() - compute,
            compute,
        },
        workspace_allocations: allocations,
    };
    (out, report)
}
