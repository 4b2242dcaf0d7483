//! Deterministic data-parallel scan primitives.
//!
//! Two scans drive the parallel compressor: an exclusive sum-scan that turns
//! per-segment retain flags into output offsets, and a segmented max-scan
//! that finds the farthest point of every curve segment at once. Each has a
//! serial reference implementation, and the parallel versions are required
//! to agree with it bit for bit for every block shape and worker count.
//!
//! Both parallel scans cut their input into blocks of `B = W × H`
//! elements. Blocks are scanned independently, the last value of every
//! block is gathered into a small auxiliary array, that array is scanned
//! (recursively, if it is itself larger than a block) and the results are
//! propagated back into the blocks.

mod scan;
mod segmented;

pub use scan::{
    exclusive_scan_in_place, exclusive_scan_parallel, exclusive_scan_serial, ScanScratch,
};
pub use segmented::{
    segmented_max_scan_in_place, segmented_max_scan_parallel, segmented_max_scan_serial,
    SegScanScratch, SegmentedMaxResult,
};

use crate::error::{Error, Result};

/// Shape of one scan block: `height` rows of `width` elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    width: usize,
    height: usize,
}

impl Block {
    /// 32 × 32 elements. Tunable: nothing on a CPU ties `H` to a warp.
    pub const DEFAULT: Block = Block {
        width: 32,
        height: 32,
    };

    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 || width.saturating_mul(height) < 2 {
            return Err(Error::InvalidBlock { width, height });
        }
        Ok(Block { width, height })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Elements per block, `W × H`.
    pub fn capacity(&self) -> usize {
        self.width * self.height
    }
}

impl Default for Block {
    fn default() -> Self {
        Block::DEFAULT
    }
}
