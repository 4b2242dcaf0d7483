use rayon::prelude::*;

use super::Block;
use crate::error::{Error, Result};
use crate::pool::WorkerPool;

/// Per-position running maximum within each segment and where it was
/// attained.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SegmentedMaxResult {
    pub d_max: Vec<f64>,
    pub i_max: Vec<u32>,
}

fn check_inputs(d: &[f64], lp: &[u32]) -> Result<()> {
    if d.len() != lp.len() {
        return Err(Error::LengthMismatch {
            what: "values vs segment labels",
            left: d.len(),
            right: lp.len(),
        });
    }
    if u32::try_from(d.len()).is_err() {
        return Err(Error::InvalidArgument("segmented scan input exceeds u32 indexing".into()));
    }
    if let Some(i) = lp.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::UnsortedLabels { position: i + 1 });
    }
    Ok(())
}

/// Segmented prefix maximum. Ties keep the earliest index.
pub fn segmented_max_scan_serial(d: &[f64], lp: &[u32]) -> Result<SegmentedMaxResult> {
    check_inputs(d, lp)?;
    let mut out = SegmentedMaxResult {
        d_max: Vec::with_capacity(d.len()),
        i_max: Vec::with_capacity(d.len()),
    };
    let mut cur = (f64::NEG_INFINITY, 0u32);
    for (i, (&v, &label)) in d.iter().zip(lp).enumerate() {
        if i == 0 || label != lp[i - 1] || v > cur.0 {
            cur = (v, i as u32);
        }
        out.d_max.push(cur.0);
        out.i_max.push(cur.1);
    }
    Ok(out)
}

/// Row or block summary: the running maximum at the end of a row together
/// with the label it belongs to.
#[derive(Debug, Clone, Copy, Default)]
struct Carry {
    val: f64,
    idx: u32,
    label: u32,
}

/// Reusable buffers for [`segmented_max_scan_in_place`]: per-row column
/// entries and per-block summaries, plus the same for each recursion level.
#[derive(Debug, Clone, Default)]
pub struct SegScanScratch {
    columns: Vec<Carry>,
    summary_val: Vec<f64>,
    summary_idx: Vec<u32>,
    summary_label: Vec<u32>,
    deeper: Option<Box<SegScanScratch>>,
}

impl SegScanScratch {
    pub fn for_len(max_len: usize, block: Block) -> Self {
        let mut s = SegScanScratch::default();
        s.ensure(max_len, block);
        s
    }

    fn ensure(&mut self, n: usize, block: Block) {
        let rows = n.div_ceil(block.width());
        let blocks = n.div_ceil(block.capacity());
        if self.columns.len() < rows {
            self.columns.resize(rows, Carry::default());
        }
        if self.summary_val.len() < blocks {
            self.summary_val.resize(blocks, 0.0);
            self.summary_idx.resize(blocks, 0);
            self.summary_label.resize(blocks, 0);
        }
        if blocks > 1 {
            self.deeper
                .get_or_insert_with(Default::default)
                .ensure(blocks, block);
        }
    }
}

/// Scans one row in place, tracking the current label and maximum. Returns
/// the row-end summary.
fn scan_row(vals: &mut [f64], idx: &mut [u32], labels: &[u32]) -> Carry {
    let mut cur = Carry {
        val: vals[0],
        idx: idx[0],
        label: labels[0],
    };
    for i in 1..vals.len() {
        if labels[i] != cur.label || vals[i] > cur.val {
            cur = Carry {
                val: vals[i],
                idx: idx[i],
                label: labels[i],
            };
        } else {
            vals[i] = cur.val;
            idx[i] = cur.idx;
        }
    }
    cur
}

/// Applies an earlier carry to the leading run of `labels == carry.label`.
/// Stops at the first position whose running maximum already beats the
/// carry; every later position in the run is at least as large.
fn fix_prefix(vals: &mut [f64], idx: &mut [u32], labels: &[u32], carry: Carry) {
    for i in 0..vals.len() {
        if labels[i] == carry.label && carry.val >= vals[i] {
            vals[i] = carry.val;
            idx[i] = carry.idx;
        } else {
            break;
        }
    }
}

/// Sequential scan over the row summaries of one block. Each entry becomes
/// the running maximum up to the end of its row.
fn scan_columns(columns: &mut [Carry]) {
    for r in 1..columns.len() {
        let prev = columns[r - 1];
        let cur = &mut columns[r];
        if cur.label == prev.label && prev.val >= cur.val {
            cur.val = prev.val;
            cur.idx = prev.idx;
        }
    }
}

/// Segmented max-scan in place over `(vals, idx)` pairs.
///
/// On entry `idx[i]` names the position `vals[i]` came from; on exit each
/// pair is the running segment maximum and its earliest position. Labels
/// must be non-decreasing.
///
/// Within a block of `W × H` elements laid out as `H` rows:
/// 1. every row is scanned independently, leaving its row-end maximum and
///    label in a column entry;
/// 2. the column entries of the block are scanned, so each carries the
///    maximum up to the end of its row;
/// 3. every row but the first is fixed up from the previous row's column
///    entry wherever its leading segment continues from that row.
///
/// Blocks then contribute their last entry to a summary array, which is
/// scanned recursively with the same procedure and propagated back into the
/// leading segment of every following block.
pub fn segmented_max_scan_in_place(
    vals: &mut [f64],
    idx: &mut [u32],
    labels: &[u32],
    block: Block,
    pool: &WorkerPool,
    scratch: &mut SegScanScratch,
) -> Result<()> {
    check_inputs(vals, labels)?;
    if idx.len() != vals.len() {
        return Err(Error::LengthMismatch {
            what: "values vs indices",
            left: vals.len(),
            right: idx.len(),
        });
    }
    scratch.ensure(vals.len(), block);
    scan_level(vals, idx, labels, block, pool, scratch);
    Ok(())
}

fn scan_level(
    vals: &mut [f64],
    idx: &mut [u32],
    labels: &[u32],
    block: Block,
    pool: &WorkerPool,
    scratch: &mut SegScanScratch,
) {
    let n = vals.len();
    if n == 0 {
        return;
    }
    let w = block.width();
    let cap = block.capacity();
    let h = block.height();
    let rows = n.div_ceil(w);
    let blocks = n.div_ceil(cap);
    let columns = &mut scratch.columns[..rows];

    // 1. Row scans.
    let row_task = |((v, i), (l, c)): ((&mut [f64], &mut [u32]), (&[u32], &mut Carry))| {
        *c = scan_row(v, i, l);
    };
    match pool.rayon() {
        Some(p) if rows > 1 => p.install(|| {
            vals.par_chunks_mut(w)
                .zip(idx.par_chunks_mut(w))
                .zip(labels.par_chunks(w).zip(columns.par_iter_mut()))
                .for_each(row_task);
        }),
        _ => vals
            .chunks_mut(w)
            .zip(idx.chunks_mut(w))
            .zip(labels.chunks(w).zip(columns.iter_mut()))
            .for_each(row_task),
    }

    // 2. Column scan, one pass per block.
    match pool.rayon() {
        Some(p) if blocks > 1 => p.install(|| columns.par_chunks_mut(h).for_each(scan_columns)),
        _ => columns.chunks_mut(h).for_each(scan_columns),
    }

    // 3. Row fix-up from the previous row of the same block.
    let columns: &[Carry] = columns;
    let fix_task = |(r, ((v, i), l)): (usize, ((&mut [f64], &mut [u32]), &[u32]))| {
        if r % h != 0 {
            fix_prefix(v, i, l, columns[r - 1]);
        }
    };
    match pool.rayon() {
        Some(p) if rows > 1 => p.install(|| {
            vals.par_chunks_mut(w)
                .zip(idx.par_chunks_mut(w))
                .zip(labels.par_chunks(w))
                .enumerate()
                .for_each(fix_task);
        }),
        _ => vals
            .chunks_mut(w)
            .zip(idx.chunks_mut(w))
            .zip(labels.chunks(w))
            .enumerate()
            .for_each(fix_task),
    }

    if blocks == 1 {
        return;
    }

    // Scan: gather each block's last entry.
    let sv = &mut scratch.summary_val[..blocks];
    let si = &mut scratch.summary_idx[..blocks];
    let sl = &mut scratch.summary_label[..blocks];
    for b in 0..blocks {
        let last = ((b + 1) * cap).min(n) - 1;
        sv[b] = vals[last];
        si[b] = idx[last];
        sl[b] = labels[last];
    }

    // Recursion over the block summaries.
    let deeper = scratch.deeper.as_deref_mut().expect("scratch sized for recursion");
    scan_level(sv, si, sl, block, pool, deeper);

    // Propagate into every block after the first.
    let (sv, si, sl) = (&*sv, &*si, &*sl);
    let prop_task = |(b, ((v, i), l)): (usize, ((&mut [f64], &mut [u32]), &[u32]))| {
        if b > 0 {
            let carry = Carry {
                val: sv[b - 1],
                idx: si[b - 1],
                label: sl[b - 1],
            };
            fix_prefix(v, i, l, carry);
        }
    };
    match pool.rayon() {
        Some(p) => p.install(|| {
            vals.par_chunks_mut(cap)
                .zip(idx.par_chunks_mut(cap))
                .zip(labels.par_chunks(cap))
                .enumerate()
                .for_each(prop_task);
        }),
        None => vals
            .chunks_mut(cap)
            .zip(idx.chunks_mut(cap))
            .zip(labels.chunks(cap))
            .enumerate()
            .for_each(prop_task),
    }
}

/// Parallel segmented max-scan; identical to [`segmented_max_scan_serial`]
/// for every input, block shape and worker count.
pub fn segmented_max_scan_parallel(
    d: &[f64],
    lp: &[u32],
    block: Block,
    pool: &WorkerPool,
) -> Result<SegmentedMaxResult> {
    check_inputs(d, lp)?;
    let mut out = SegmentedMaxResult {
        d_max: d.to_vec(),
        i_max: (0..d.len() as u32).collect(),
    };
    let mut scratch = SegScanScratch::for_len(d.len(), block);
    segmented_max_scan_in_place(&mut out.d_max, &mut out.i_max, lp, block, pool, &mut scratch)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Brute force: for every position, look back over its segment.
    fn brute_force(d: &[f64], lp: &[u32]) -> SegmentedMaxResult {
        let mut out = SegmentedMaxResult::default();
        for i in 0..d.len() {
            let mut start = i;
            while start > 0 && lp[start - 1] == lp[i] {
                start -= 1;
            }
            let mut best = start;
            for j in start..=i {
                if d[j] > d[best] {
                    best = j;
                }
            }
            out.d_max.push(d[best]);
            out.i_max.push(best as u32);
        }
        out
    }

    fn labels_from_lengths(lengths: &[usize]) -> Vec<u32> {
        lengths
            .iter()
            .enumerate()
            .flat_map(|(k, &n)| std::iter::repeat(k as u32 + 1).take(n))
            .collect()
    }

    #[test]
    fn single_segment() {
        let r = segmented_max_scan_serial(&[3.0, 1.0, 2.0], &[1, 1, 1]).unwrap();
        assert_eq!(r.d_max, vec![3.0, 3.0, 3.0]);
        assert_eq!(r.i_max, vec![0, 0, 0]);
    }

    #[test]
    fn resets_per_segment() {
        let r = segmented_max_scan_serial(&[1.0, 5.0, 2.0, 4.0], &[1, 1, 2, 2]).unwrap();
        assert_eq!(r.d_max, vec![1.0, 5.0, 2.0, 4.0]);
        assert_eq!(r.i_max, vec![0, 1, 2, 3]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            segmented_max_scan_serial(&[1.0], &[1, 1]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            segmented_max_scan_serial(&[1.0, 2.0], &[2, 1]),
            Err(Error::UnsortedLabels { position: 1 })
        ));
        assert!(segmented_max_scan_parallel(&[1.0], &[1, 1], Block::DEFAULT, &WorkerPool::sequential()).is_err());
    }

    #[test]
    fn short_segment_in_one_row() {
        let d = [0.5, 2.0, 1.0];
        let lp = [1, 1, 1];
        let block = Block::new(8, 4).unwrap();
        let r = segmented_max_scan_parallel(&d, &lp, block, &WorkerPool::sequential()).unwrap();
        assert_eq!(r, segmented_max_scan_serial(&d, &lp).unwrap());
    }

    #[test]
    fn segment_spanning_rows_needs_column_fix() {
        // W = 4: the maximum sits in row 0 and the segment runs through row 2.
        let d = [0.0, 9.0, 1.0, 1.0, 2.0, 3.0, 1.0, 0.0, 4.0, 1.0, 1.0, 1.0];
        let lp = [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2];
        let block = Block::new(4, 4).unwrap();
        let r = segmented_max_scan_parallel(&d, &lp, block, &WorkerPool::sequential()).unwrap();
        let expected = segmented_max_scan_serial(&d, &lp).unwrap();
        assert_eq!(r, expected);
        assert_eq!(r.i_max[9], 1);
        assert_eq!(r.i_max[11], 10);
    }

    #[test]
    fn segment_spanning_blocks_uses_propagation() {
        // Block of 2 × 2; the segment crosses three blocks.
        let d = [1.0, 7.0, 3.0, 2.0, 6.0, 7.0, 1.0, 8.0, 0.5];
        let lp = [1, 2, 2, 2, 2, 2, 2, 2, 3];
        let block = Block::new(2, 2).unwrap();
        let pool = WorkerPool::new(3).unwrap();
        let r = segmented_max_scan_parallel(&d, &lp, block, &pool).unwrap();
        assert_eq!(r, segmented_max_scan_serial(&d, &lp).unwrap());
        assert_eq!(r.i_max[5], 1, "equal maximum later keeps earliest index");
        assert_eq!(r.i_max[7], 7);
    }

    #[test]
    fn equal_values_report_earliest_index() {
        let n = 5000;
        let d = vec![1.0; n];
        let lp = labels_from_lengths(&[1, 700, 1299, 3000]);
        for (w, h) in [(2, 2), (4, 8), (32, 32), (3, 5)] {
            let block = Block::new(w, h).unwrap();
            let r = segmented_max_scan_parallel(&d, &lp, block, &WorkerPool::new(2).unwrap()).unwrap();
            assert_eq!(r, brute_force(&d, &lp));
            assert_eq!(r.i_max[n - 1], 2000);
        }
    }

    fn segmented_input() -> impl Strategy<Value = (Vec<f64>, Vec<u32>)> {
        proptest::collection::vec((1usize..60, proptest::collection::vec(0u8..6, 1..60)), 1..40).prop_map(
            |segs| {
                let mut d = Vec::new();
                let mut lp = Vec::new();
                for (k, (len, vals)) in segs.into_iter().enumerate() {
                    for j in 0..len {
                        d.push(vals[j % vals.len()] as f64);
                        lp.push(k as u32 + 1);
                    }
                }
                (d, lp)
            },
        )
    }

    proptest! {
        #[test]
        fn serial_matches_brute_force((d, lp) in segmented_input()) {
            prop_assert_eq!(segmented_max_scan_serial(&d, &lp).unwrap(), brute_force(&d, &lp));
        }

        #[test]
        fn parallel_matches_serial(
            (d, lp) in segmented_input(),
            w in 1usize..9,
            h in 1usize..9,
            workers in 1usize..4,
        ) {
            prop_assume!(w * h >= 2);
            let block = Block::new(w, h).unwrap();
            let pool = WorkerPool::new(workers).unwrap();
            let r = segmented_max_scan_parallel(&d, &lp, block, &pool).unwrap();
            prop_assert_eq!(r, segmented_max_scan_serial(&d, &lp).unwrap());
        }
    }
}
