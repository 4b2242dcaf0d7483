//! Seeded synthetic AIS-like trajectories.
//!
//! Each vessel performs a random walk: constant-ish speed, a heading that
//! drifts by a normally distributed turn per report, and report intervals
//! drawn uniformly from the 2–180 s range typical of AIS. Positions carry a
//! small jitter so that no three consecutive fixes are exactly collinear.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geo::Projector;
use crate::model::{TimestampedPoint, Trajectory, TrajectorySet};

const METERS_PER_DEGREE: f64 = 111_320.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Total number of points across all trajectories.
    pub total_points: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub seed: u64,
    /// Standard deviation of the heading change per report, in degrees.
    pub turn_rate_deg: f64,
    /// Speed range in meters per second.
    pub speed: (f64, f64),
    /// Report interval range in whole seconds.
    pub interval: (u32, u32),
    /// Position jitter amplitude in meters.
    pub noise_m: f64,
    /// Center of the area in degrees (lon, lat).
    pub origin: (f64, f64),
    /// Half-size of the start area in degrees.
    pub spread_deg: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            total_points: 10_000,
            min_len: 20,
            max_len: 2_000,
            seed: 0,
            turn_rate_deg: 6.0,
            speed: (2.0, 9.0),
            interval: (2, 180),
            noise_m: 3.0,
            origin: (122.0, 31.0),
            spread_deg: 0.15,
        }
    }
}

impl SynthConfig {
    pub fn new(total_points: usize, seed: u64) -> Self {
        SynthConfig {
            total_points,
            seed,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("synthetic data: {m}")));
        if self.min_len < 2 || self.max_len < self.min_len {
            return bad("trajectory lengths must satisfy 2 <= min_len <= max_len");
        }
        if !(self.speed.0 > 0.0 && self.speed.1 >= self.speed.0) {
            return bad("speed range must be positive and ordered");
        }
        if self.interval.0 == 0 || self.interval.1 < self.interval.0 {
            return bad("report interval range must be positive and ordered");
        }
        if !(self.noise_m >= 0.0 && self.turn_rate_deg >= 0.0) {
            return bad("noise and turn rate must be non-negative");
        }
        Ok(())
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; one draw is enough here.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Generates trajectories totalling exactly `cfg.total_points` points
/// (a lone leftover point is folded into the last trajectory). Identical
/// configurations give identical output.
pub fn generate(cfg: &SynthConfig, projector: &Projector) -> Result<TrajectorySet> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut lengths = Vec::new();
    let mut left = cfg.total_points;
    while left > 0 {
        let n = rng.gen_range(cfg.min_len..=cfg.max_len).min(left);
        if n < 2 {
            match lengths.last_mut() {
                Some(last) => *last += n,
                None => lengths.push(n),
            }
        } else {
            lengths.push(n);
        }
        left -= n;
    }

    let mut set = TrajectorySet::new(Vec::new());
    for (k, &n) in lengths.iter().enumerate() {
        let mmsi = 100_000_000 + k as u64;
        let mut lon = cfg.origin.0 + rng.gen_range(-cfg.spread_deg..=cfg.spread_deg);
        let mut lat = cfg.origin.1 + rng.gen_range(-cfg.spread_deg..=cfg.spread_deg);
        let mut heading = rng.gen_range(0.0..std::f64::consts::TAU);
        let speed = rng.gen_range(cfg.speed.0..=cfg.speed.1);
        let mut t = 1_600_000_000.0 + rng.gen_range(0..86_400) as f64;
        let mut points = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                let dt = f64::from(rng.gen_range(cfg.interval.0..=cfg.interval.1));
                t += dt;
                heading += normal(&mut rng) * cfg.turn_rate_deg.to_radians();
                let step = speed * dt;
                lat += step * heading.cos() / METERS_PER_DEGREE;
                lon += step * heading.sin() / (METERS_PER_DEGREE * lat.to_radians().cos());
            }
            let jx = rng.gen_range(-1.0..=1.0) * cfg.noise_m;
            let jy = rng.gen_range(-1.0..=1.0) * cfg.noise_m;
            let plat = lat + jy / METERS_PER_DEGREE;
            let plon = lon + jx / (METERS_PER_DEGREE * plat.to_radians().cos());
            points.push(TimestampedPoint::from_degrees(t, round7(plon), round7(plat), projector)?);
        }
        set.push(Trajectory::new(mmsi, points)?);
    }
    Ok(set)
}

/// Seven decimals, the resolution of AIS position reports.
fn round7(deg: f64) -> f64 {
    (deg * 1e7).round() / 1e7
}
