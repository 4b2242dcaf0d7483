use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The eight smoothing kernel shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    Uniform,
    Triangular,
    Epanechnikov,
    Quartic,
    Triweight,
    Tricube,
    Gaussian,
    Cosine,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 8] = [
        KernelFamily::Uniform,
        KernelFamily::Triangular,
        KernelFamily::Epanechnikov,
        KernelFamily::Quartic,
        KernelFamily::Triweight,
        KernelFamily::Tricube,
        KernelFamily::Gaussian,
        KernelFamily::Cosine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Uniform => "uniform",
            KernelFamily::Triangular => "triangular",
            KernelFamily::Epanechnikov => "epanechnikov",
            KernelFamily::Quartic => "quartic",
            KernelFamily::Triweight => "triweight",
            KernelFamily::Tricube => "tricube",
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Cosine => "cosine",
        }
    }

    /// One-dimensional factor; the 2-D kernel is `g(s)·g(t)`.
    fn profile(self, w: f64) -> f64 {
        let a = w.abs();
        match self {
            KernelFamily::Uniform => 0.5,
            KernelFamily::Triangular => 1.0 - a,
            KernelFamily::Epanechnikov => 0.75 * (1.0 - w * w),
            KernelFamily::Quartic => 15.0 / 16.0 * (1.0 - w * w).powi(2),
            KernelFamily::Triweight => 35.0 / 32.0 * (1.0 - w * w).powi(3),
            KernelFamily::Tricube => 70.0 / 81.0 * (1.0 - a * a * a).powi(3),
            KernelFamily::Gaussian => (-0.5 * w * w).exp() / (2.0 * PI).sqrt(),
            KernelFamily::Cosine => PI / 4.0 * (PI / 2.0 * a).cos(),
        }
    }

    fn compact(self) -> bool {
        self != KernelFamily::Gaussian
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        KernelFamily::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| Error::UnknownKernel(s.to_string()))
    }
}

/// Continuous kernel value at `(s, t)`, before any discretization.
///
/// Compact kernels vanish outside `[−1, 1]²`.
pub fn kernel_value(family: KernelFamily, s: f64, t: f64) -> f64 {
    if family.compact() && (s.abs() > 1.0 || t.abs() > 1.0) {
        return 0.0;
    }
    family.profile(s) * family.profile(t)
}

/// Kernel shape and odd window size `ϖ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelSpec {
    family: KernelFamily,
    bandwidth: usize,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, bandwidth: usize) -> Result<Self> {
        if bandwidth % 2 == 0 {
            return Err(Error::EvenBandwidth(bandwidth));
        }
        Ok(KernelSpec { family, bandwidth })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// `a_k = (ϖ − 1) / 2`.
    pub fn half_width(&self) -> usize {
        (self.bandwidth - 1) / 2
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec {
            family: KernelFamily::Gaussian,
            bandwidth: 7,
        }
    }
}

/// A `ϖ × ϖ` weight window summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    size: usize,
    weights: Vec<f64>,
}

impl KernelMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn half_width(&self) -> usize {
        self.size / 2
    }

    /// Weights row by row, `t = −a_k` first, `s` increasing along a row.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at integer offset `(s, t)`, each in `[−a_k, a_k]`.
    pub fn at(&self, s: isize, t: isize) -> f64 {
        let a = self.half_width() as isize;
        assert!(s.abs() <= a && t.abs() <= a);
        self.weights[((t + a) as usize) * self.size + (s + a) as usize]
    }
}

/// Discretizes `spec` at integer offsets scaled by `h = (ϖ + 1) / 2`, so the
/// outermost ring keeps a nonzero weight, then normalizes to unit sum.
pub fn build_kernel(spec: &KernelSpec) -> KernelMatrix {
    let size = spec.bandwidth;
    let a = spec.half_width() as isize;
    let h = (size + 1) as f64 / 2.0;
    let g: Vec<f64> = (-a..=a).map(|s| spec.family.profile(s as f64 / h)).collect();
    let mut weights: Vec<f64> = g.iter().flat_map(|&gt| g.iter().map(move |&gs| gt * gs)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    KernelMatrix { size, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(f: KernelFamily, w: usize) -> KernelSpec {
        KernelSpec::new(f, w).unwrap()
    }

    #[test]
    fn even_bandwidth_rejected() {
        assert!(matches!(KernelSpec::new(KernelFamily::Gaussian, 4), Err(Error::EvenBandwidth(4))));
        assert!(KernelSpec::new(KernelFamily::Gaussian, 0).is_err());
    }

    #[test]
    fn names_round_trip() {
        for f in KernelFamily::ALL {
            assert_eq!(f.name().parse::<KernelFamily>().unwrap(), f);
        }
        assert_eq!("Gaussian".parse::<KernelFamily>().unwrap(), KernelFamily::Gaussian);
        assert!("boxcar".parse::<KernelFamily>().is_err());
    }

    #[test]
    fn uniform_3() {
        let k = build_kernel(&spec(KernelFamily::Uniform, 3));
        assert!(k.weights().iter().all(|&w| (w - 1.0 / 9.0).abs() < 1e-15));
    }

    #[test]
    fn gaussian_center() {
        let c = kernel_value(KernelFamily::Gaussian, 0.0, 0.0);
        assert!((c - 1.0 / (2.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn compact_support() {
        assert_eq!(kernel_value(KernelFamily::Epanechnikov, 1.5, 0.0), 0.0);
        assert!(kernel_value(KernelFamily::Gaussian, 1.5, 0.0) > 0.0);
    }

    #[test]
    fn epanechnikov_5_by_hand() {
        let k = build_kernel(&spec(KernelFamily::Epanechnikov, 5));
        // h = 3: offsets map to 0, ±1/3, ±2/3.
        let g = |i: isize| {
            let u = i as f64 / 3.0;
            0.75 * (1.0 - u * u)
        };
        let mut raw = [[0.0; 5]; 5];
        let mut total = 0.0;
        for t in -2..=2isize {
            for s in -2..=2isize {
                raw[(t + 2) as usize][(s + 2) as usize] = g(s) * g(t);
                total += g(s) * g(t);
            }
        }
        for t in -2..=2isize {
            for s in -2..=2isize {
                let want = raw[(t + 2) as usize][(s + 2) as usize] / total;
                assert!((k.at(s, t) - want).abs() < 1e-15);
            }
        }
        // Corner over center: (1 − 4/9)² per axis pair.
        assert!((k.at(2, 2) / k.at(0, 0) - (5.0f64 / 9.0).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn identity_window() {
        for f in KernelFamily::ALL {
            assert_eq!(build_kernel(&spec(f, 1)).weights(), &[1.0]);
        }
    }

    #[test]
    fn normalized_and_symmetric() {
        for f in KernelFamily::ALL {
            for w in (1..=15).step_by(2) {
                let k = build_kernel(&spec(f, w));
                let a = k.half_width() as isize;
                assert!((k.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12, "{f} {w}");
                for t in -a..=a {
                    for s in -a..=a {
                        let v = k.at(s, t);
                        assert!(v > 0.0, "{f} {w} ({s},{t})");
                        assert_eq!(v, k.at(-s, t));
                        assert_eq!(v, k.at(s, -t));
                        assert_eq!(v, k.at(t, s));
                    }
                }
            }
        }
    }
}
