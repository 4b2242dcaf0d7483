//! Data-parallel Douglas-Peucker compression and kernel density mapping for
//! vessel (AIS) trajectories.
//!
//! Positions are projected with [`geo::Projector`], grouped into
//! [`model::TrajectorySet`]s, and optionally merged into a
//! [`model::FlatTrajectoryStore`] for batch work. [`compress`] offers a
//! serial and a data-parallel Douglas-Peucker that return identical output.
//! [`density`] rasterizes and smooths trajectories into density maps, and
//! [`metrics`] scores compressed output against the original.
//!
//! Everything that runs in parallel takes a [`pool::WorkerPool`]; results
//! never depend on its size.
//!
//! ```
//! use trajforge::compress::{compress_set, Backend, CompressionThreshold, ParallelConfig};
//! use trajforge::geo::Projector;
//! use trajforge::pool::WorkerPool;
//! use trajforge::synth::{generate, SynthConfig};
//!
//! let set = generate(&SynthConfig::new(1_000, 0), &Projector::default())?;
//! let eps = CompressionThreshold::new(10.0)?;
//! let cfg = ParallelConfig::default();
//! let (a, _) = compress_set(&set, eps, Backend::Serial, &WorkerPool::sequential(), &cfg);
//! let (b, _) = compress_set(&set, eps, Backend::Parallel, &WorkerPool::new(3)?, &cfg);
//! assert_eq!(a, b);
//! # Ok::<(), trajforge::Error>(())
//! ```

pub mod compress;
pub mod density;
pub mod error;
pub mod geo;
pub mod metrics;
pub mod model;
pub mod pool;
pub mod primitives;
pub mod synth;

pub use error::{Error, Result};

// The guide's snippets run as doctests through these modules.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/projection.md")]
    mod projection {}
    #[doc = include_str!("../../../book/src/storage.md")]
    mod storage {}
    #[doc = include_str!("../../../book/src/scans.md")]
    mod scans {}
    #[doc = include_str!("../../../book/src/compression.md")]
    mod compression {}
    #[doc = include_str!("../../../book/src/density.md")]
    mod density {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
