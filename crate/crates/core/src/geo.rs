//! Ellipsoidal Mercator projection.
//!
//! Compression and density mapping both work with planar distances, so every
//! geographic position is projected once at ingest onto a Mercator plane
//! whose scale is set by the radius of the standard parallel.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Largest absolute latitude, in degrees, accepted at ingest.
pub const MAX_LATITUDE_DEG: f64 = 89.9;

/// A geographic position. Both angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lon: f64,
    pub lat: f64,
}

impl GeoPoint {
    /// Builds a point from degrees, rejecting latitudes beyond
    /// [`MAX_LATITUDE_DEG`] and longitudes outside `[-180, 180]`.
    pub fn from_degrees(lon_deg: f64, lat_deg: f64) -> Result<Self> {
        if !lat_deg.is_finite() || lat_deg.abs() > MAX_LATITUDE_DEG {
            return Err(Error::PolarLatitude {
                lat_deg,
                limit_deg: MAX_LATITUDE_DEG,
            });
        }
        if !lon_deg.is_finite() || lon_deg.abs() > 180.0 {
            return Err(Error::InvalidArgument(format!(
                "longitude {lon_deg}° is outside [-180, 180]"
            )));
        }
        Ok(GeoPoint {
            lon: lon_deg.to_radians(),
            lat: lat_deg.to_radians(),
        })
    }

    pub fn lon_degrees(&self) -> f64 {
        self.lon.to_degrees()
    }

    pub fn lat_degrees(&self) -> f64 {
        self.lat.to_degrees()
    }
}

/// A projected position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartesianPoint {
    pub x: f64,
    pub y: f64,
}

impl CartesianPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        CartesianPoint { x, y }
    }

    pub fn distance(&self, other: &CartesianPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_squared(&self, other: &CartesianPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Reference ellipsoid plus the standard parallel of the projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipsoidParams {
    /// Semi-major axis in meters.
    pub a_semi_major: f64,
    /// First eccentricity.
    pub e_first_eccentricity: f64,
    /// Standard parallel in radians.
    pub phi0_standard_parallel: f64,
}

impl EllipsoidParams {
    pub const WGS84_SEMI_MAJOR: f64 = 6_378_137.0;
    pub const WGS84_ECCENTRICITY: f64 = 0.081_819_190_842_6;

    /// WGS-84 with the equator as standard parallel.
    pub const WGS84: EllipsoidParams = EllipsoidParams {
        a_semi_major: Self::WGS84_SEMI_MAJOR,
        e_first_eccentricity: Self::WGS84_ECCENTRICITY,
        phi0_standard_parallel: 0.0,
    };

    pub fn new(a_semi_major: f64, e_first_eccentricity: f64, phi0_standard_parallel: f64) -> Result<Self> {
        let params = EllipsoidParams {
            a_semi_major,
            e_first_eccentricity,
            phi0_standard_parallel,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_semi_major > 0.0 && self.a_semi_major.is_finite()) {
            return Err(Error::InvalidEllipsoid("semi-major axis must be positive"));
        }
        if !(0.0..1.0).contains(&self.e_first_eccentricity) {
            return Err(Error::InvalidEllipsoid("eccentricity must lie in [0, 1)"));
        }
        if !(self.phi0_standard_parallel.abs() < FRAC_PI_2) {
            return Err(Error::InvalidEllipsoid(
                "standard parallel must be strictly inside (-90°, 90°)",
            ));
        }
        Ok(())
    }
}

impl Default for EllipsoidParams {
    fn default() -> Self {
        Self::WGS84
    }
}

/// Radius of the standard parallel: `a·cos φ0 / √(1 − e²·sin² φ0)`.
pub fn standard_parallel_radius(ell: &EllipsoidParams) -> f64 {
    let (sin_phi0, cos_phi0) = ell.phi0_standard_parallel.sin_cos();
    let e = ell.e_first_eccentricity;
    ell.a_semi_major * cos_phi0 / (1.0 - e * e * sin_phi0 * sin_phi0).sqrt()
}

/// Isometric latitude of `lat` (radians) on an ellipsoid of eccentricity `e`.
///
/// Fails for latitudes at or beyond the poles, where the value diverges.
pub fn isometric_latitude(lat: f64, e: f64) -> Result<f64> {
    if !(lat.abs() < FRAC_PI_2) {
        return Err(Error::PolarLatitude {
            lat_deg: lat.to_degrees(),
            limit_deg: 90.0,
        });
    }
    // ln tan(π/4 + φ/2) = asinh(tan φ) and (e/2)·ln((1 − e sin φ)/(1 + e sin φ))
    // = −e·atanh(e sin φ). Evaluated on |φ| so the result is exactly odd.
    let phi = lat.abs();
    let conformal = phi.tan().asinh();
    let q = if e == 0.0 {
        conformal
    } else {
        conformal - e * (e * phi.sin()).atanh()
    };
    Ok(q.copysign(lat))
}

/// Projects a geographic position onto the Mercator plane.
pub fn mercator_project(p: &GeoPoint, ell: &EllipsoidParams) -> Result<CartesianPoint> {
    if !(p.lon.abs() <= PI) {
        return Err(Error::InvalidArgument(format!(
            "longitude {} rad is outside [-π, π]",
            p.lon
        )));
    }
    let r0 = standard_parallel_radius(ell);
    let q = isometric_latitude(p.lat, ell.e_first_eccentricity)?;
    Ok(CartesianPoint {
        x: p.lon * r0,
        y: q * r0,
    })
}

/// A projector with the standard-parallel radius precomputed.
#[derive(Debug, Clone, Copy)]
pub struct Projector {
    ellipsoid: EllipsoidParams,
    r0: f64,
}

impl Projector {
    pub fn new(ellipsoid: EllipsoidParams) -> Result<Self> {
        ellipsoid.validate()?;
        Ok(Projector {
            ellipsoid,
            r0: standard_parallel_radius(&ellipsoid),
        })
    }

    pub fn ellipsoid(&self) -> &EllipsoidParams {
        &self.ellipsoid
    }

    pub fn project(&self, p: &GeoPoint) -> Result<CartesianPoint> {
        let q = isometric_latitude(p.lat, self.ellipsoid.e_first_eccentricity)?;
        Ok(CartesianPoint {
            x: p.lon * self.r0,
            y: q * self.r0,
        })
    }
}

impl Default for Projector {
    fn default() -> Self {
        Projector::new(EllipsoidParams::WGS84).expect("WGS-84 is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const E: f64 = EllipsoidParams::WGS84_ECCENTRICITY;

    // Analytic derivative dq/dφ = (1 − e²) / ((1 − e² sin² φ) cos φ).
    fn dq_dphi(lat: f64, e: f64) -> f64 {
        let s = lat.sin();
        (1.0 - e * e) / ((1.0 - e * e * s * s) * lat.cos())
    }

    #[test]
    fn radius_at_equator_is_semi_major_axis() {
        assert_eq!(standard_parallel_radius(&EllipsoidParams::WGS84), 6_378_137.0);
    }

    #[test]
    fn radius_on_unit_sphere() {
        let ell = EllipsoidParams::new(1.0, 0.0, PI / 3.0).unwrap();
        assert!((standard_parallel_radius(&ell) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn isometric_latitude_at_equator_is_zero() {
        assert_eq!(isometric_latitude(0.0, E).unwrap(), 0.0);
    }

    #[test]
    fn isometric_latitude_is_odd() {
        for i in 1..=89 {
            let lat = (i as f64).to_radians();
            let q = isometric_latitude(lat, E).unwrap();
            let qn = isometric_latitude(-lat, E).unwrap();
            assert!((q + qn).abs() <= 1e-12 * q.abs(), "lat {i}: {q} vs {qn}");
        }
    }

    #[test]
    fn isometric_latitude_rejects_poles() {
        assert!(isometric_latitude(FRAC_PI_2, E).is_err());
        assert!(isometric_latitude(-FRAC_PI_2, E).is_err());
        assert!(isometric_latitude(f64::NAN, E).is_err());
    }

    #[test]
    fn spherical_case_matches_conformal_latitude() {
        for i in -80..=80 {
            let lat = (i as f64).to_radians();
            let expected = (std::f64::consts::FRAC_PI_4 + lat / 2.0).tan().ln();
            let q = isometric_latitude(lat, 0.0).unwrap();
            assert!((q - expected).abs() <= 1e-14 * expected.abs().max(1.0), "{q} vs {expected}");
        }
    }

    #[test]
    fn finite_difference_slope_matches_derivative() {
        let h = 1e-6;
        let mut deg = -80.0;
        while deg <= 80.0 {
            let lat: f64 = f64::to_radians(deg);
            let fd = (isometric_latitude(lat + h, E).unwrap()
                - isometric_latitude(lat - h, E).unwrap())
                / (2.0 * h);
            let exact = dq_dphi(lat, E);
            assert!(
                ((fd - exact) / exact).abs() < 1e-6,
                "lat {deg}: fd {fd} exact {exact}"
            );
            deg += 0.5;
        }
    }

    #[test]
    fn origin_projects_to_origin() {
        let p = mercator_project(&GeoPoint { lon: 0.0, lat: 0.0 }, &EllipsoidParams::WGS84).unwrap();
        assert_eq!(p, CartesianPoint::new(0.0, 0.0));
    }

    #[test]
    fn projection_is_linear_in_longitude_on_equator() {
        let ell = EllipsoidParams::WGS84;
        let a = mercator_project(&GeoPoint { lon: 0.3, lat: 0.0 }, &ell).unwrap();
        let b = mercator_project(&GeoPoint { lon: 0.6, lat: 0.0 }, &ell).unwrap();
        assert_eq!(b.x, 2.0 * a.x);
        assert_eq!(a.y, 0.0);
        assert_eq!(b.y, 0.0);
    }

    #[test]
    fn degrees_ingest_enforces_latitude_limit() {
        assert!(GeoPoint::from_degrees(10.0, 89.9).is_ok());
        assert!(GeoPoint::from_degrees(10.0, 89.95).is_err());
        assert!(GeoPoint::from_degrees(180.5, 0.0).is_err());
        assert!(GeoPoint::from_degrees(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn ellipsoid_validation() {
        assert!(EllipsoidParams::new(0.0, 0.1, 0.0).is_err());
        assert!(EllipsoidParams::new(1.0, 1.0, 0.0).is_err());
        assert!(EllipsoidParams::new(1.0, 0.1, FRAC_PI_2).is_err());
    }

    #[test]
    fn projector_matches_free_function() {
        let ell = EllipsoidParams::new(6_378_137.0, E, 0.4).unwrap();
        let proj = Projector::new(ell).unwrap();
        let p = GeoPoint::from_degrees(121.9842, 31.1166).unwrap();
        assert_eq!(proj.project(&p).unwrap(), mercator_project(&p, &ell).unwrap());
    }

    mod props {
        use super::super::*;
        use super::E;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn x_monotone_in_lon(lat in -1.5f64..1.5, a in -PI..PI, b in -PI..PI) {
                prop_assume!(a < b);
                let ell = EllipsoidParams::WGS84;
                let pa = mercator_project(&GeoPoint { lon: a, lat }, &ell).unwrap();
                let pb = mercator_project(&GeoPoint { lon: b, lat }, &ell).unwrap();
                prop_assert!(pa.x < pb.x);
            }

            #[test]
            fn y_monotone_in_lat(lon in -PI..PI, a in -1.5f64..1.5, b in -1.5f64..1.5) {
                prop_assume!(a < b);
                let ell = EllipsoidParams::WGS84;
                let pa = mercator_project(&GeoPoint { lon, lat: a }, &ell).unwrap();
                let pb = mercator_project(&GeoPoint { lon, lat: b }, &ell).unwrap();
                prop_assert!(pa.y < pb.y);
            }

            #[test]
            fn q_odd(lat in -1.55f64..1.55) {
                let q = isometric_latitude(lat, E).unwrap();
                let qn = isometric_latitude(-lat, E).unwrap();
                prop_assert!((q + qn).abs() <= 1e-12 * q.abs() + 1e-15);
            }
        }
    }
}
