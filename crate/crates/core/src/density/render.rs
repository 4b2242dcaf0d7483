use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::DensityMatrix;

/// Intensity transfer applied before color lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    #[default]
    Linear,
    /// `log(1 + value)`.
    Log,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            _ => Err(Error::InvalidArgument(format!("unknown scale {s:?}, expected linear or log"))),
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Linear => "linear",
            Scale::Log => "log",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Colormap {
    /// Black background, white peaks.
    #[default]
    Gray,
    /// White background, black peaks.
    Inverted,
    /// Black through red and yellow to white. Color, so PNG only.
    Hot,
}

impl Colormap {
    pub fn name(self) -> &'static str {
        match self {
            Colormap::Gray => "gray",
            Colormap::Inverted => "inverted",
            Colormap::Hot => "hot",
        }
    }

    fn gray_level(self, level: u8) -> Option<u8> {
        match self {
            Colormap::Gray => Some(level),
            Colormap::Inverted => Some(255 - level),
            Colormap::Hot => None,
        }
    }
}

impl FromStr for Colormap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gray" | "grey" => Ok(Colormap::Gray),
            "inverted" => Ok(Colormap::Inverted),
            "hot" => Ok(Colormap::Hot),
            _ => Err(Error::UnknownColormap(s.to_string())),
        }
    }
}

impl fmt::Display for Colormap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// 8-bit levels, north row first.
fn levels(m: &DensityMatrix, scale: Scale) -> Vec<u8> {
    let tf = |x: f64| match scale {
        Scale::Linear => x,
        Scale::Log => x.ln_1p(),
    };
    let top = tf(m.max());
    let mut out = Vec::with_capacity(m.u() * m.v());
    for y in (1..=m.v()).rev() {
        out.extend(m.row(y).iter().map(|&c| {
            if top > 0.0 {
                (tf(c) / top * 255.0).round().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        }));
    }
    out
}

fn hot(level: u8) -> [u8; 3] {
    let l = f64::from(level) / 255.0;
    let ch = |x: f64| (x.clamp(0.0, 1.0) * 255.0).round() as u8;
    [ch(3.0 * l), ch(3.0 * l - 1.0), ch(3.0 * l - 2.0)]
}

/// Binary PGM (`P5`, maxval 255), north up.
pub fn render_pgm(m: &DensityMatrix, colormap: Colormap, scale: Scale) -> Result<Vec<u8>> {
    if colormap.gray_level(0).is_none() {
        return Err(Error::InvalidArgument(format!(
            "colormap {colormap} needs color output, use PNG"
        )));
    }
    let mut out = format!("P5\n{} {}\n255\n", m.u(), m.v()).into_bytes();
    out.extend(levels(m, scale).into_iter().map(|l| colormap.gray_level(l).unwrap()));
    Ok(out)
}

/// PNG image, north up: 8-bit grayscale for the gray maps, RGB for `hot`.
pub fn render_png(m: &DensityMatrix, colormap: Colormap, scale: Scale) -> Result<Vec<u8>> {
    let lv = levels(m, scale);
    let (color, data) = match colormap {
        Colormap::Hot => (png::ColorType::Rgb, lv.into_iter().flat_map(hot).collect()),
        c => (
            png::ColorType::Grayscale,
            lv.into_iter().map(|l| c.gray_level(l).unwrap()).collect::<Vec<u8>>(),
        ),
    };
    let mut buf = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut buf, m.u() as u32, m.v() as u32);
        enc.set_color(color);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header().map_err(|e| Error::Image(e.to_string()))?;
        w.write_image_data(&data).map_err(|e| Error::Image(e.to_string()))?;
    }
    Ok(buf)
}
