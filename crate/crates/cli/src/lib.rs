//! Command-line front end for `trajforge`.
//!
//! Four commands share one worker pool:
//!
//! * `compress` simplifies an AIS CSV with Douglas-Peucker;
//! * `render` builds a smoothed density map, written as a raw matrix dump
//!   and an image;
//! * `metrics` compares an original CSV with its compressed version;
//! * `bench` times the serial and parallel compressors against each other.
//!
//! `synth` writes seeded synthetic data in the input schema.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use trajforge::compress::{compress_set, Backend, CompressionThreshold, ParallelConfig};
use trajforge::density::{
    build_kernel, convolve, rasterize, render_pgm, render_png, write_dump, Colormap, GridSpec,
    KernelFamily, KernelSpec, Scale,
};
use trajforge::geo::Projector;
use trajforge::metrics::{speedup_ratio, MetricReport};
use trajforge::model::{
    flatten, parse_ais_csv_with_stats, write_ais_csv, write_store_csv, IngestConfig, TrajectorySet,
};
use trajforge::pool::{resolve_workers, WorkerPool, WORKERS_ENV};
use trajforge::synth::{generate, SynthConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] trajforge::Error),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "trajforge", version, about = "Vessel trajectory compression and density mapping")]
pub struct Cli {
    /// Worker threads. Falls back to TRAJFORGE_WORKERS, then the CPU count.
    #[arg(long, global = true, env = WORKERS_ENV)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress trajectories with Douglas-Peucker.
    Compress(CompressArgs),
    /// Rasterize and smooth trajectories into a density map.
    Render(RenderArgs),
    /// Compare original and compressed trajectories.
    Metrics(MetricsArgs),
    /// Time the serial and parallel compressors.
    Bench(BenchArgs),
    /// Write seeded synthetic trajectories.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Serial,
    Parallel,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Serial => Backend::Serial,
            BackendArg::Parallel => Backend::Parallel,
        }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Split a vessel's reports into separate trajectories at gaps longer
    /// than this many seconds.
    #[arg(long, default_value_t = 3600.0)]
    pub max_gap: f64,
}

impl IngestArgs {
    fn config(&self) -> IngestConfig {
        IngestConfig {
            max_gap_seconds: self.max_gap,
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    /// Distance threshold in meters.
    #[arg(long, short)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = BackendArg::Parallel)]
    pub backend: BackendArg,
    /// Write the key=value report here instead of standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub ingest: IngestArgs,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    pub input: PathBuf,
    /// Density matrix dump (TFDM format).
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Image file; `.png` selects PNG, anything else binary PGM.
    #[arg(long)]
    pub image: Option<PathBuf>,
    #[arg(long, default_value = "gaussian", value_parser = parse_kernel)]
    pub kernel: KernelFamily,
    /// Odd kernel window size.
    #[arg(long, default_value_t = 7)]
    pub bandwidth: usize,
    /// Grid size as UxV.
    #[arg(long, default_value = "1024x1024", value_parser = parse_grid)]
    pub grid: (usize, usize),
    /// Fill cells between consecutive reports of a trajectory.
    #[arg(long)]
    pub interpolate: bool,
    #[arg(long, default_value = "gray", value_parser = parse_colormap)]
    pub colormap: Colormap,
    #[arg(long, default_value = "linear", value_parser = parse_scale)]
    pub scale: Scale,
    #[command(flatten)]
    pub ingest: IngestArgs,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    pub original: PathBuf,
    pub compressed: PathBuf,
    /// Threshold label for the table row.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Emit a CSV row instead of key=value lines.
    #[arg(long)]
    pub csv: bool,
    #[command(flatten)]
    pub ingest: IngestArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// AIS CSV to benchmark on.
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    pub input: Option<PathBuf>,
    /// Generate this many synthetic points instead of reading a file.
    #[arg(long)]
    pub synthetic: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Repetitions per backend and threshold.
    #[arg(long, default_value_t = 30)]
    pub runs: usize,
    /// Comma-separated thresholds in meters.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1,5,10")]
    pub epsilon: Vec<f64>,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub ingest: IngestArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub output: PathBuf,
    #[arg(long)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub min_len: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_len: usize,
}

fn parse_kernel(s: &str) -> Result<KernelFamily, String> {
    s.parse().map_err(|e: trajforge::Error| e.to_string())
}

fn parse_colormap(s: &str) -> Result<Colormap, String> {
    s.parse().map_err(|e: trajforge::Error| e.to_string())
}

fn parse_scale(s: &str) -> Result<Scale, String> {
    s.parse().map_err(|e: trajforge::Error| e.to_string())
}

/// `UxV`, e.g. `1024x768`.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (u, v) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("grid must look like 1024x1024, got {s:?}"))?;
    let dim = |d: &str| d.trim().parse::<usize>().map_err(|_| format!("bad grid dimension {d:?}"));
    Ok((dim(u)?, dim(v)?))
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| CliError::File {
        path: path.to_owned(),
        source,
    })
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::File {
        path: path.to_owned(),
        source,
    })
}

fn read_set(path: &Path, cfg: &IngestConfig) -> CliResult<TrajectorySet> {
    let (set, stats) = parse_ais_csv_with_stats(open(path)?, cfg)?;
    if stats.duplicates > 0 || stats.conflicting > 0 {
        eprintln!(
            "{}: dropped {} duplicate and {} conflicting rows",
            path.display(),
            stats.duplicates,
            stats.conflicting
        );
    }
    Ok(set)
}

fn threshold(eps: f64) -> CliResult<CompressionThreshold> {
    Ok(CompressionThreshold::new(eps)?)
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let workers = resolve_workers(cli.workers);
    if cli.workers == Some(0) {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let pool = WorkerPool::new(workers)?;
    match cli.command {
        Command::Compress(a) => cmd_compress(&a, &pool, stdout),
        Command::Render(a) => cmd_render(&a, &pool, stdout),
        Command::Metrics(a) => cmd_metrics(&a, &pool, stdout),
        Command::Bench(a) => cmd_bench(&a, &pool, stdout),
        Command::Synth(a) => cmd_synth(&a),
    }
}

pub fn cmd_compress(a: &CompressArgs, pool: &WorkerPool, stdout: &mut dyn Write) -> CliResult<()> {
    let eps = threshold(a.epsilon)?;
    let set = read_set(&a.input, &a.ingest.config())?;
    let (out, report) = compress_set(&set, eps, a.backend.into(), pool, &ParallelConfig::default());
    let mut w = create(&a.output)?;
    write_store_csv(&mut w, &out)?;

    let mut text = String::new();
    text += &format!("backend={}\nworkers={}\nepsilon={}\n", Backend::from(a.backend), pool.workers(), a.epsilon);
    text += &format!(
        "trajectories={}\noriginal_points={}\ncompressed_points={}\ncr={}\nmax_iterations={}\n",
        report.trajectories.len(),
        report.original_points(),
        report.compressed_points(),
        report.compression_ratio(),
        report.max_iterations()
    );
    let t = report.timings;
    text += &format!(
        "time_total_s={}\ntime_staging_s={}\ntime_compute_s={}\n",
        t.total.as_secs_f64(),
        t.staging.as_secs_f64(),
        t.compute.as_secs_f64()
    );
    match &a.report {
        Some(p) => create(p)?.write_all(text.as_bytes()).map_err(|source| CliError::File {
            path: p.clone(),
            source,
        })?,
        None => stdout.write_all(text.as_bytes()).map_err(trajforge::Error::from)?,
    }
    Ok(())
}

pub fn cmd_render(a: &RenderArgs, pool: &WorkerPool, stdout: &mut dyn Write) -> CliResult<()> {
    if a.dump.is_none() && a.image.is_none() {
        return Err(CliError::Usage("render needs --dump and/or --image".into()));
    }
    let spec = KernelSpec::new(a.kernel, a.bandwidth)?;
    let set = read_set(&a.input, &a.ingest.config())?;
    let store = flatten(&set);
    let grid = GridSpec::new(a.grid.0, a.grid.1, store.bounds()?)?;
    let (counts, stats) = rasterize(&store, &grid, a.interpolate, pool);
    let smooth = convolve(&counts, &build_kernel(&spec), pool)?;

    if let Some(p) = &a.dump {
        let mut w = create(p)?;
        write_dump(&mut w, &smooth)?;
        w.flush().map_err(trajforge::Error::from)?;
    }
    if let Some(p) = &a.image {
        let png = p.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"));
        let bytes = if png {
            render_png(&smooth, a.colormap, a.scale)?
        } else {
            render_pgm(&smooth, a.colormap, a.scale)?
        };
        let mut w = create(p)?;
        w.write_all(&bytes).map_err(trajforge::Error::from)?;
        w.flush().map_err(trajforge::Error::from)?;
    }
    writeln!(
        stdout,
        "grid={}x{}\nkernel={}\nbandwidth={}\npoints={}\ninterpolated={}\nout_of_bounds={}",
        grid.u(),
        grid.v(),
        a.kernel,
        a.bandwidth,
        stats.points,
        stats.interpolated,
        stats.out_of_bounds
    )
    .map_err(trajforge::Error::from)?;
    Ok(())
}

pub fn cmd_metrics(a: &MetricsArgs, pool: &WorkerPool, stdout: &mut dyn Write) -> CliResult<()> {
    let original = read_set(&a.original, &a.ingest.config())?;
    let whole = IngestConfig {
        max_gap_seconds: f64::INFINITY,
        ..a.ingest.config()
    };
    let compressed = original.align(&read_set(&a.compressed, &whole)?)?;
    let report = MetricReport::evaluate(&original, &compressed, pool)?;
    let text = if a.csv {
        format!("{}\n{}\n", MetricReport::CSV_HEADER, report.csv_row(a.epsilon))
    } else {
        format!(
            "{}#   eps   CR (%)  RLL (%)  DTW (mu ± delta)\n# {}\n",
            report.to_key_value(false),
            report.table_row(a.epsilon)
        )
    };
    stdout.write_all(text.as_bytes()).map_err(trajforge::Error::from)?;
    Ok(())
}

fn mean(d: &[Duration]) -> Duration {
    d.iter().sum::<Duration>() / d.len().max(1) as u32
}

pub fn cmd_bench(a: &BenchArgs, pool: &WorkerPool, stdout: &mut dyn Write) -> CliResult<()> {
    if a.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    let set = match (&a.input, a.synthetic) {
        (Some(p), _) => read_set(p, &a.ingest.config())?,
        (None, Some(n)) => generate(&SynthConfig::new(n, a.seed), &Projector::default())?,
        (None, None) => return Err(CliError::Usage("bench needs --input or --synthetic".into())),
    };
    let cfg = ParallelConfig::default();
    let mut out = String::from(
        "kind,backend,workers,epsilon,run,total_s,staging_s,compute_s,original_points,compressed_points,speedup\n",
    );
    for &e in &a.epsilon {
        let eps = threshold(e)?;
        let mut means = Vec::new();
        let mut reference = None;
        for backend in [Backend::Serial, Backend::Parallel] {
            let mut totals = Vec::with_capacity(a.runs);
            for run in 0..a.runs {
                let (store, rep) = compress_set(&set, eps, backend, pool, &cfg);
                match &reference {
                    None => reference = Some(store),
                    Some(r) if *r != store => {
                        return Err(CliError::Usage(format!(
                            "backends disagree at epsilon {e}; this is a bug"
                        )))
                    }
                    Some(_) => {}
                }
                let t = rep.timings;
                out += &format!(
                    "run,{backend},{},{e},{run},{},{},{},{},{},\n",
                    pool.workers(),
                    t.total.as_secs_f64(),
                    t.staging.as_secs_f64(),
                    t.compute.as_secs_f64(),
                    rep.original_points(),
                    rep.compressed_points()
                );
                totals.push(t.total);
            }
            means.push(mean(&totals));
        }
        let sr = speedup_ratio(means[0], means[1]).map(|v| v.to_string()).unwrap_or_default();
        for (backend, m) in [Backend::Serial, Backend::Parallel].iter().zip(&means) {
            let speedup = if *backend == Backend::Parallel { sr.as_str() } else { "" };
            out += &format!(
                "mean,{backend},{},{e},,{},,,{},,{speedup}\n",
                pool.workers(),
                m.as_secs_f64(),
                set.total_points()
            );
        }
    }
    match &a.output {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(out.as_bytes()).map_err(trajforge::Error::from)?;
            w.flush().map_err(trajforge::Error::from)?;
        }
        None => stdout.write_all(out.as_bytes()).map_err(trajforge::Error::from)?,
    }
    Ok(())
}

pub fn cmd_synth(a: &SynthArgs) -> CliResult<()> {
    let cfg = SynthConfig {
        min_len: a.min_len,
        max_len: a.max_len,
        ..SynthConfig::new(a.points, a.seed)
    };
    let set = generate(&cfg, &Projector::default())?;
    let mut w = create(&a.output)?;
    write_ais_csv(&mut w, &set)?;
    Ok(())
}
