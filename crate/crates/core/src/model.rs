//! Trajectory data model, AIS CSV ingestion and the flat merged store.
//!
//! Input files carry one position report per row:
//!
//! ```text
//! mmsi,timestamp,lon,lat
//! 413000001,1600000000,121.9842,31.1166
//! ```
//!
//! Coordinates are degrees and timestamps are Unix seconds. Rows are grouped
//! by MMSI, sorted by time, deduplicated and split into separate trajectories
//! wherever consecutive reports are more than [`IngestConfig::max_gap_seconds`]
//! apart.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geo::{CartesianPoint, GeoPoint, Projector};

/// Default gap after which a vessel's reports start a new trajectory.
pub const DEFAULT_MAX_GAP_SECONDS: f64 = 3600.0;

pub const CSV_HEADER: [&str; 4] = ["mmsi", "timestamp", "lon", "lat"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimestampedPoint {
    /// Seconds since the Unix epoch.
    pub t: f64,
    /// Projected position in meters.
    pub pos: CartesianPoint,
    /// Geographic position in radians.
    pub raw_geo: GeoPoint,
    /// Longitude and latitude in degrees, exactly as ingested. Kept so that
    /// writing a point back out reproduces the input text.
    pub geo_deg: (f64, f64),
}

impl TimestampedPoint {
    /// Builds a point from degrees, projecting it with `projector`.
    pub fn from_degrees(t: f64, lon_deg: f64, lat_deg: f64, projector: &Projector) -> Result<Self> {
        let raw_geo = GeoPoint::from_degrees(lon_deg, lat_deg)?;
        let pos = projector.project(&raw_geo)?;
        Ok(TimestampedPoint {
            t,
            pos,
            raw_geo,
            geo_deg: (lon_deg, lat_deg),
        })
    }

    /// A point that only carries a planar position. Handy for tests and for
    /// data that was never geographic.
    pub fn planar(t: f64, x: f64, y: f64) -> Self {
        TimestampedPoint {
            t,
            pos: CartesianPoint::new(x, y),
            raw_geo: GeoPoint { lon: 0.0, lat: 0.0 },
            geo_deg: (0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mmsi: u64,
    points: Vec<TimestampedPoint>,
}

impl Trajectory {
    /// Fails unless `points` is non-empty, finite and strictly ascending in time.
    pub fn new(mmsi: u64, points: Vec<TimestampedPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.t.is_finite() && p.pos.x.is_finite() && p.pos.y.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "trajectory {mmsi}: point {i} is not finite"
                )));
            }
        }
        if let Some(i) = points.windows(2).position(|w| !(w[0].t < w[1].t)) {
            return Err(Error::InvalidArgument(format!(
                "trajectory {mmsi}: timestamps not strictly ascending at point {}",
                i + 1
            )));
        }
        Ok(Trajectory { mmsi, points })
    }

    /// Planar trajectory with timestamps `0, 1, 2, …`.
    pub fn from_xy(mmsi: u64, xy: &[(f64, f64)]) -> Result<Self> {
        let points = xy
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| TimestampedPoint::planar(i as f64, x, y))
            .collect();
        Trajectory::new(mmsi, points)
    }

    pub fn points(&self) -> &[TimestampedPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> impl ExactSizeIterator<Item = CartesianPoint> + '_ {
        self.points.iter().map(|p| p.pos)
    }

    pub fn start_time(&self) -> f64 {
        self.points[0].t
    }

    pub fn end_time(&self) -> f64 {
        self.points[self.points.len() - 1].t
    }

    /// Keeps the points at `indices`, which must be strictly increasing.
    pub fn select(&self, indices: &[usize]) -> Result<Trajectory> {
        let points = indices.iter().map(|&i| self.points[i]).collect();
        Trajectory::new(self.mmsi, points)
    }

    pub fn into_points(self) -> Vec<TimestampedPoint> {
        self.points
    }
}

/// Axis-aligned extent of a set of projected points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    pub fn of_point(p: CartesianPoint) -> Self {
        Bounds {
            x_min: p.x,
            x_max: p.x,
            y_min: p.y,
            y_max: p.y,
        }
    }

    pub fn include(&mut self, p: CartesianPoint) {
        self.x_min = self.x_min.min(p.x);
        self.x_max = self.x_max.max(p.x);
        self.y_min = self.y_min.min(p.y);
        self.y_max = self.y_max.max(p.y);
    }

    pub fn union(mut self, other: Bounds) -> Bounds {
        self.x_min = self.x_min.min(other.x_min);
        self.x_max = self.x_max.max(other.x_max);
        self.y_min = self.y_min.min(other.y_min);
        self.y_max = self.y_max.max(other.y_max);
        self
    }

    pub fn contains(&self, p: CartesianPoint) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn from_points<I: IntoIterator<Item = CartesianPoint>>(points: I) -> Option<Bounds> {
        let mut it = points.into_iter();
        let mut b = Bounds::of_point(it.next()?);
        for p in it {
            b.include(p);
        }
        Some(b)
    }
}

/// An ordered collection of trajectories with cached bounds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectorySet {
    trajectories: Vec<Trajectory>,
    bounds: Option<Bounds>,
}

impl TrajectorySet {
    pub fn new(trajectories: Vec<Trajectory>) -> Self {
        let bounds = Self::compute_bounds(&trajectories);
        TrajectorySet {
            trajectories,
            bounds,
        }
    }

    fn compute_bounds(trajectories: &[Trajectory]) -> Option<Bounds> {
        Bounds::from_points(trajectories.iter().flat_map(|t| t.positions()))
    }

    pub fn push(&mut self, trajectory: Trajectory) {
        let b = Bounds::from_points(trajectory.positions()).expect("trajectories are non-empty");
        self.bounds = Some(match self.bounds {
            Some(existing) => existing.union(b),
            None => b,
        });
        self.trajectories.push(trajectory);
    }

    pub fn trajectories(&self) -> &[Trajectory] {
        &self.trajectories
    }

    pub fn into_trajectories(self) -> Vec<Trajectory> {
        self.trajectories
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn total_points(&self) -> usize {
        self.trajectories.iter().map(Trajectory::len).sum()
    }

    /// Extremes over every point of every trajectory.
    pub fn bounds(&self) -> Result<Bounds> {
        self.bounds.ok_or(Error::EmptySet)
    }

    /// Splits `other` (usually parsed without gap splitting) into trajectories
    /// that line up one-to-one with `self`, assigning each of its points to
    /// the trajectory of the same vessel whose time span contains it.
    pub fn align(&self, other: &TrajectorySet) -> Result<TrajectorySet> {
        let mut by_vessel: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (k, t) in self.trajectories.iter().enumerate() {
            by_vessel.entry(t.mmsi).or_default().push(k);
        }
        let mut buckets: Vec<Vec<TimestampedPoint>> = vec![Vec::new(); self.trajectories.len()];
        for t in &other.trajectories {
            let candidates = by_vessel
                .get(&t.mmsi)
                .ok_or_else(|| Error::Mismatch(format!("vessel {} is not in the reference set", t.mmsi)))?;
            for p in t.points() {
                let k = candidates
                    .iter()
                    .copied()
                    .find(|&k| {
                        let r = &self.trajectories[k];
                        p.t >= r.start_time() && p.t <= r.end_time()
                    })
                    .ok_or_else(|| {
                        Error::Mismatch(format!(
                            "vessel {} has a point at t={} outside every reference trajectory",
                            t.mmsi, p.t
                        ))
                    })?;
                buckets[k].push(*p);
            }
        }
        let mut out = Vec::with_capacity(buckets.len());
        for (k, points) in buckets.into_iter().enumerate() {
            let mmsi = self.trajectories[k].mmsi;
            if points.is_empty() {
                return Err(Error::Mismatch(format!(
                    "trajectory {k} (vessel {mmsi}) has no counterpart"
                )));
            }
            out.push(Trajectory::new(mmsi, points)?);
        }
        Ok(TrajectorySet::new(out))
    }
}

/// Extremes over all points of `set`; fails on an empty set.
pub fn bounds(set: &TrajectorySet) -> Result<Bounds> {
    set.bounds()
}

/// Every trajectory merged back-to-back into one contiguous point sequence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FlatTrajectoryStore {
    pub points: Vec<TimestampedPoint>,
    pub t_len: Vec<usize>,
    pub offsets: Vec<usize>,
    pub mmsi_index: Vec<u64>,
}

impl FlatTrajectoryStore {
    pub fn len(&self) -> usize {
        self.t_len.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_len.is_empty()
    }

    pub fn total_points(&self) -> usize {
        self.points.len()
    }

    pub fn max_len(&self) -> usize {
        self.t_len.iter().copied().max().unwrap_or(0)
    }

    pub fn range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k] + self.t_len[k]
    }

    pub fn trajectory(&self, k: usize) -> &[TimestampedPoint] {
        &self.points[self.range(k)]
    }

    /// Per-point trajectory label: every point of trajectory `k` carries `k`.
    pub fn trajectory_labels(&self) -> Vec<u32> {
        let mut labels = Vec::with_capacity(self.points.len());
        for (k, &n) in self.t_len.iter().enumerate() {
            labels.extend(std::iter::repeat(k as u32).take(n));
        }
        labels
    }

    pub fn bounds(&self) -> Result<Bounds> {
        Bounds::from_points(self.points.iter().map(|p| p.pos)).ok_or(Error::EmptySet)
    }

    /// Checks the layout invariants.
    pub fn validate(&self) -> Result<()> {
        if self.t_len.len() != self.offsets.len() || self.t_len.len() != self.mmsi_index.len() {
            return Err(Error::InvalidArgument(
                "store index arrays differ in length".into(),
            ));
        }
        let mut expected = 0usize;
        for (k, (&n, &off)) in self.t_len.iter().zip(&self.offsets).enumerate() {
            if n == 0 || off != expected {
                return Err(Error::InvalidArgument(format!(
                    "trajectory {k}: bad length/offset ({n}, {off})"
                )));
            }
            expected += n;
        }
        if expected != self.points.len() {
            return Err(Error::LengthMismatch {
                what: "sum of trajectory lengths vs stored points",
                left: expected,
                right: self.points.len(),
            });
        }
        Ok(())
    }

    /// Rebuilds a store from per-trajectory point vectors.
    pub fn from_parts(parts: Vec<(u64, Vec<TimestampedPoint>)>) -> Self {
        let total = parts.iter().map(|(_, p)| p.len()).sum();
        let mut store = FlatTrajectoryStore {
            points: Vec::with_capacity(total),
            t_len: Vec::with_capacity(parts.len()),
            offsets: Vec::with_capacity(parts.len()),
            mmsi_index: Vec::with_capacity(parts.len()),
        };
        for (mmsi, pts) in parts {
            store.offsets.push(store.points.len());
            store.t_len.push(pts.len());
            store.mmsi_index.push(mmsi);
            store.points.extend(pts);
        }
        store
    }
}

/// Merges a trajectory set into one flat store.
pub fn flatten(set: &TrajectorySet) -> FlatTrajectoryStore {
    let total = set.total_points();
    let mut store = FlatTrajectoryStore {
        points: Vec::with_capacity(total),
        t_len: Vec::with_capacity(set.len()),
        offsets: Vec::with_capacity(set.len()),
        mmsi_index: Vec::with_capacity(set.len()),
    };
    for t in set.trajectories() {
        store.offsets.push(store.points.len());
        store.t_len.push(t.len());
        store.mmsi_index.push(t.mmsi);
        store.points.extend_from_slice(t.points());
    }
    store
}

/// Inverse of [`flatten`].
pub fn unflatten(store: &FlatTrajectoryStore) -> Result<TrajectorySet> {
    store.validate()?;
    let mut out = Vec::with_capacity(store.len());
    for k in 0..store.len() {
        out.push(Trajectory::new(store.mmsi_index[k], store.trajectory(k).to_vec())?);
    }
    Ok(TrajectorySet::new(out))
}

/// Ingest options.
#[derive(Debug, Clone, Copy)]
pub struct IngestConfig {
    pub projector: Projector,
    /// Consecutive reports of one vessel further apart than this start a new
    /// trajectory. `f64::INFINITY` disables splitting.
    pub max_gap_seconds: f64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            projector: Projector::default(),
            max_gap_seconds: DEFAULT_MAX_GAP_SECONDS,
        }
    }
}

/// Counters collected while ingesting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub rows: usize,
    pub duplicates: usize,
    /// Rows sharing vessel and timestamp with an earlier row but reporting a
    /// different position. The earliest row in the file wins.
    pub conflicting: usize,
}

struct Row {
    t: f64,
    lon: f64,
    lat: f64,
    line: u64,
}

fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, line: u64) -> Result<T> {
    let raw = record.get(idx).ok_or_else(|| Error::Parse {
        line,
        message: format!("missing column `{}`", CSV_HEADER[idx]),
    })?;
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {} `{raw}`", CSV_HEADER[idx]),
    })
}

/// Parses an AIS CSV stream into a trajectory set.
pub fn parse_ais_csv<R: Read>(reader: R, config: &IngestConfig) -> Result<TrajectorySet> {
    parse_ais_csv_with_stats(reader, config).map(|(set, _)| set)
}

pub fn parse_ais_csv_with_stats<R: Read>(
    reader: R,
    config: &IngestConfig,
) -> Result<(TrajectorySet, IngestStats)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .quoting(false)
        .flexible(true)
        .from_reader(reader);

    let mut stats = IngestStats::default();
    let mut groups: BTreeMap<u64, Vec<Row>> = BTreeMap::new();
    let mut record = csv::StringRecord::new();
    let mut seen_header = false;

    loop {
        let more = rdr.read_record(&mut record).map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line());
        if !seen_header {
            if record.iter().ne(CSV_HEADER.iter().copied()) {
                return Err(Error::Parse {
                    line,
                    message: format!("expected header `{}`", CSV_HEADER.join(",")),
                });
            }
            seen_header = true;
            continue;
        }
        if record.len() != CSV_HEADER.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected 4 columns, found {}", record.len()),
            });
        }
        let mmsi: u64 = parse_field(&record, 0, line)?;
        let t: f64 = parse_field(&record, 1, line)?;
        let lon: f64 = parse_field(&record, 2, line)?;
        let lat: f64 = parse_field(&record, 3, line)?;
        if !t.is_finite() {
            return Err(Error::Parse {
                line,
                message: "timestamp is not finite".into(),
            });
        }
        GeoPoint::from_degrees(lon, lat).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        stats.rows += 1;
        groups.entry(mmsi).or_default().push(Row { t, lon, lat, line });
    }

    let mut trajectories = Vec::new();
    for (mmsi, mut rows) in groups {
        rows.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.line.cmp(&b.line)));
        let mut current: Vec<TimestampedPoint> = Vec::new();
        let mut prev: Option<&Row> = None;
        for row in &rows {
            if let Some(p) = prev {
                if p.t == row.t {
                    if p.lon == row.lon && p.lat == row.lat {
                        stats.duplicates += 1;
                    } else {
                        stats.conflicting += 1;
                    }
                    continue;
                }
                if row.t - p.t > config.max_gap_seconds {
                    trajectories.push(Trajectory::new(mmsi, std::mem::take(&mut current))?);
                }
            }
            let point = TimestampedPoint::from_degrees(row.t, row.lon, row.lat, &config.projector)
                .map_err(|e| Error::Parse {
                    line: row.line,
                    message: e.to_string(),
                })?;
            current.push(point);
            prev = Some(row);
        }
        if !current.is_empty() {
            trajectories.push(Trajectory::new(mmsi, current)?);
        }
    }
    Ok((TrajectorySet::new(trajectories), stats))
}

/// Writes trajectories in the ingest schema, one row per point, in set order.
pub fn write_ais_csv<W: Write>(mut writer: W, set: &TrajectorySet) -> Result<()> {
    writeln!(writer, "{}", CSV_HEADER.join(","))?;
    for t in set.trajectories() {
        write_rows(&mut writer, t.mmsi, t.points())?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes a flat store in the ingest schema.
pub fn write_store_csv<W: Write>(mut writer: W, store: &FlatTrajectoryStore) -> Result<()> {
    writeln!(writer, "{}", CSV_HEADER.join(","))?;
    for k in 0..store.len() {
        write_rows(&mut writer, store.mmsi_index[k], store.trajectory(k))?;
    }
    writer.flush()?;
    Ok(())
}

fn write_rows<W: Write>(writer: &mut W, mmsi: u64, points: &[TimestampedPoint]) -> Result<()> {
    for p in points {
        writeln!(writer, "{},{},{},{}", mmsi, p.t, p.geo_deg.0, p.geo_deg.1)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<TrajectorySet> {
        parse_ais_csv(text.as_bytes(), &IngestConfig::default())
    }

    #[test]
    fn sorts_by_timestamp() {
        let set = parse(
            "mmsi,timestamp,lon,lat\n1,30,122.0,31.0\n1,10,122.1,31.0\n1,20,122.2,31.0\n",
        )
        .unwrap();
        assert_eq!(set.len(), 1);
        let ts: Vec<f64> = set.trajectories()[0].points().iter().map(|p| p.t).collect();
        assert_eq!(ts, vec![10.0, 20.0, 30.0]);
        assert_eq!(set.trajectories()[0].points()[0].geo_deg, (122.1, 31.0));
    }

    #[test]
    fn drops_exact_duplicates() {
        let (set, stats) = parse_ais_csv_with_stats(
            "mmsi,timestamp,lon,lat\r\n7,10,122.0,31.0\r\n7,10,122.0,31.0\r\n".as_bytes(),
            &IngestConfig::default(),
        )
        .unwrap();
        assert_eq!(set.total_points(), 1);
        assert_eq!(stats.duplicates, 1);
    }

    #[test]
    fn conflicting_timestamp_keeps_first_row() {
        let (set, stats) = parse_ais_csv_with_stats(
            "mmsi,timestamp,lon,lat\n7,10,122.5,31.0\n7,10,122.0,31.0\n".as_bytes(),
            &IngestConfig::default(),
        )
        .unwrap();
        assert_eq!(set.total_points(), 1);
        assert_eq!(stats.conflicting, 1);
        assert_eq!(set.trajectories()[0].points()[0].geo_deg.0, 122.5);
    }

    #[test]
    fn empty_input_is_empty_set() {
        assert!(parse("").unwrap().is_empty());
        assert!(parse("mmsi,timestamp,lon,lat\n").unwrap().is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse("mmsi,timestamp,lon,lat\n1,10,122.0,31.0\n1,abc,122.0,31.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse("mmsi,timestamp,lon,lat\n1,10,122.0,89.95\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse("mmsi,timestamp,lon,lat\n1,10,122.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse("id,t,x,y\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn splits_on_time_gaps() {
        let set = parse("mmsi,timestamp,lon,lat\n1,0,122.0,31.0\n1,100,122.1,31.0\n1,4000,122.2,31.0\n2,5,122.0,31.0\n").unwrap();
        let lens: Vec<usize> = set.trajectories().iter().map(Trajectory::len).collect();
        assert_eq!(lens, vec![2, 1, 1]);
    }

    #[test]
    fn csv_roundtrip_is_textually_exact() {
        let text = "mmsi,timestamp,lon,lat\n1,1600000000,121.9842,31.1166\n1,1600000010,121.98425,31.11663\n";
        let set = parse(text).unwrap();
        let mut out = Vec::new();
        write_ais_csv(&mut out, &set).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn flatten_offsets() {
        let five: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 0.0)).collect();
        let store = flatten(&TrajectorySet::new(vec![Trajectory::from_xy(1, &five).unwrap()]));
        assert_eq!(store.t_len, vec![5]);
        assert_eq!(store.offsets, vec![0]);

        let t3 = Trajectory::from_xy(1, &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap();
        let t4 = Trajectory::from_xy(2, &[(0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).unwrap();
        let store = flatten(&TrajectorySet::new(vec![t3, t4]));
        assert_eq!(store.t_len, vec![3, 4]);
        assert_eq!(store.offsets, vec![0, 3]);
        assert_eq!(store.total_points(), 7);
        assert_eq!(store.trajectory_labels(), vec![0, 0, 0, 1, 1, 1, 1]);
        store.validate().unwrap();
    }

    #[test]
    fn bounds_of_single_and_pair() {
        let set = TrajectorySet::new(vec![Trajectory::from_xy(1, &[(2.0, 3.0)]).unwrap()]);
        assert_eq!(
            set.bounds().unwrap(),
            Bounds { x_min: 2.0, x_max: 2.0, y_min: 3.0, y_max: 3.0 }
        );
        let set = TrajectorySet::new(vec![Trajectory::from_xy(1, &[(2.0, -3.0), (-1.0, 5.0)]).unwrap()]);
        assert_eq!(
            bounds(&set).unwrap(),
            Bounds { x_min: -1.0, x_max: 2.0, y_min: -3.0, y_max: 5.0 }
        );
        assert!(matches!(TrajectorySet::default().bounds(), Err(Error::EmptySet)));
    }

    #[test]
    fn push_updates_bounds() {
        let mut set = TrajectorySet::new(vec![Trajectory::from_xy(1, &[(0.0, 0.0)]).unwrap()]);
        set.push(Trajectory::from_xy(2, &[(5.0, -1.0)]).unwrap());
        assert_eq!(set.bounds().unwrap().x_max, 5.0);
        assert_eq!(set.bounds().unwrap().y_min, -1.0);
    }

    #[test]
    fn trajectory_rejects_unsorted_times() {
        let pts = vec![TimestampedPoint::planar(1.0, 0.0, 0.0), TimestampedPoint::planar(1.0, 1.0, 0.0)];
        assert!(Trajectory::new(1, pts).is_err());
        assert!(Trajectory::new(1, vec![]).is_err());
    }

    #[test]
    fn align_reassigns_by_time_span() {
        let text = "mmsi,timestamp,lon,lat\n1,0,122.0,31.0\n1,100,122.1,31.0\n1,200,122.15,31.0\n1,5000,122.2,31.0\n1,5100,122.3,31.0\n";
        let original = parse(text).unwrap();
        let compressed_text = "mmsi,timestamp,lon,lat\n1,0,122.0,31.0\n1,200,122.15,31.0\n1,5000,122.2,31.0\n1,5100,122.3,31.0\n";
        let loose = parse_ais_csv(
            compressed_text.as_bytes(),
            &IngestConfig { max_gap_seconds: f64::INFINITY, ..IngestConfig::default() },
        )
        .unwrap();
        assert_eq!(loose.len(), 1);
        let aligned = original.align(&loose).unwrap();
        let lens: Vec<usize> = aligned.trajectories().iter().map(Trajectory::len).collect();
        assert_eq!(lens, vec![2, 2]);
    }
}
