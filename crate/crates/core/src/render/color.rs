use serde::{Deserialize, Serialize};

use super::style::{Coding, Style};
use crate::error::{Error, Result};
use crate::ingest::{Track, TrackSample};

/// 8-bit RGBA, straight (non-premultiplied) alpha.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rgba {
    pub r: u8,
    pub g: u8,
    pub b: u8,
    pub a: u8,
}

impl Rgba {
    pub const TRANSPARENT: Rgba = Rgba::new(0, 0, 0, 0);

    pub const fn new(r: u8, g: u8, b: u8, a: u8) -> Self {
        Self { r, g, b, a }
    }

    pub const fn opaque([r, g, b]: [u8; 3]) -> Self {
        Self { r, g, b, a: 255 }
    }

    pub fn rgb(self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }

    /// Channels scaled to `[0, 1]`.
    pub fn unit(self) -> [f64; 4] {
        [self.r, self.g, self.b, self.a].map(|c| c as f64 / 255.0)
    }

    pub fn from_unit(c: [f64; 4]) -> Self {
        let [r, g, b, a] = c.map(quantize);
        Self { r, g, b, a }
    }

    pub fn hex(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.r, self.g, self.b)
    }
}

/// A primitive's fill or stroke: 8-bit color with a real-valued opacity.
///
/// Opacity is kept unquantized so stacked translucent marks follow the
/// exact `1 − (1 − α)^N` accumulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Paint {
    pub rgb: [u8; 3],
    pub alpha: f64,
}

impl Paint {
    pub const fn opaque(rgb: [u8; 3]) -> Self {
        Self { rgb, alpha: 1.0 }
    }

    pub fn unit(self) -> [f64; 4] {
        let [r, g, b] = self.rgb.map(|c| c as f64 / 255.0);
        [r, g, b, self.alpha.clamp(0.0, 1.0)]
    }
}

/// Round half up onto `0..=255`.
pub fn quantize(v: f64) -> u8 {
    (v * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

fn round_half_up(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Straight-alpha source-over on normalized channels.
pub fn composite_over_unit(dst: [f64; 4], src: [f64; 4]) -> [f64; 4] {
    let sa = src[3];
    if sa <= 0.0 {
        return dst;
    }
    let da = dst[3] * (1.0 - sa);
    let out_a = sa + da;
    if out_a <= 0.0 {
        return [0.0; 4];
    }
    let ch = |i: usize| (src[i] * sa + dst[i] * da) / out_a;
    [ch(0), ch(1), ch(2), out_a]
}

/// Source-over of two 8-bit colors, computed in reals and quantized once.
pub fn composite_over(dst: Rgba, src: Rgba) -> Rgba {
    Rgba::from_unit(composite_over_unit(dst.unit(), src.unit()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColorStop {
    pub pos: f64,
    pub rgb: [u8; 3],
}

/// Dark-to-bright ramp used for time coding unless overridden.
pub const DEFAULT_STOPS: [ColorStop; 5] = [
    ColorStop { pos: 0.0, rgb: [13, 8, 135] },
    ColorStop { pos: 0.25, rgb: [126, 3, 168] },
    ColorStop { pos: 0.5, rgb: [204, 71, 120] },
    ColorStop { pos: 0.75, rgb: [248, 149, 64] },
    ColorStop { pos: 1.0, rgb: [240, 249, 33] },
];

/// High-contrast categorical colors for label coding.
pub const DEFAULT_PALETTE: [[u8; 3]; 8] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [23, 190, 207],
];

#[derive(Debug, Clone, PartialEq)]
pub enum ColorMap {
    /// Piecewise-linear ramp; positions strictly increasing from 0 to 1.
    Continuous(Vec<ColorStop>),
    Categorical(Vec<[u8; 3]>),
}

impl ColorMap {
    pub fn continuous(stops: Vec<ColorStop>) -> Result<Self> {
        if stops.len() < 2 {
            return Err(Error::invalid("a continuous colormap needs at least 2 stops"));
        }
        if stops[0].pos != 0.0 || stops[stops.len() - 1].pos != 1.0 {
            return Err(Error::invalid("colormap stops must start at 0 and end at 1"));
        }
        if stops.windows(2).any(|w| !(w[1].pos > w[0].pos)) {
            return Err(Error::invalid("colormap stop positions must strictly increase"));
        }
        Ok(ColorMap::Continuous(stops))
    }

    pub fn categorical(palette: Vec<[u8; 3]>) -> Result<Self> {
        if palette.is_empty() {
            return Err(Error::invalid("a categorical palette needs at least one color"));
        }
        Ok(ColorMap::Categorical(palette))
    }

    pub fn default_continuous() -> Self {
        ColorMap::Continuous(DEFAULT_STOPS.to_vec())
    }

    pub fn default_categorical() -> Self {
        ColorMap::Categorical(DEFAULT_PALETTE.to_vec())
    }

    /// Color at `u ∈ [0, 1]` (clamped). Categorical maps pick evenly spaced
    /// palette entries.
    pub fn sample(&self, u: f64) -> [u8; 3] {
        let u = if u.is_nan() { 0.0 } else { u.clamp(0.0, 1.0) };
        match self {
            ColorMap::Continuous(stops) => {
                let seg = stops
                    .windows(2)
                    .position(|w| u <= w[1].pos)
                    .unwrap_or(stops.len() - 2);
                let (a, b) = (stops[seg], stops[seg + 1]);
                if u == b.pos {
                    return b.rgb;
                }
                let f = (u - a.pos) / (b.pos - a.pos);
                let lerp =
                    |i: usize| round_half_up(a.rgb[i] as f64 + (b.rgb[i] as f64 - a.rgb[i] as f64) * f);
                [lerp(0), lerp(1), lerp(2)]
            }
            ColorMap::Categorical(palette) => {
                let i = ((u * palette.len() as f64) as usize).min(palette.len() - 1);
                palette[i]
            }
        }
    }

    /// Palette entry for a label, wrapping around the palette length.
    pub fn for_label(&self, label: u32) -> [u8; 3] {
        match self {
            ColorMap::Categorical(palette) => palette[label as usize % palette.len()],
            ColorMap::Continuous(stops) => stops[label as usize % stops.len()].rgb,
        }
    }
}

/// Fill color of one spotlight under the style's coding.
///
/// Time coding maps `(t − t_first)/(t_last − t_first)` through the ramp;
/// a zero-length track maps everything to the first stop. Label coding
/// picks `palette[label mod len]`. Alpha is `round(style.alpha · 255)`.
pub fn color_for(sample: &TrackSample, track: &Track, style: &Style) -> Result<Rgba> {
    let rgb = match style.coding {
        Coding::Time => {
            let u = match track.time_span() {
                Some((t0, t1)) if t1 > t0 => (sample.t - t0) / (t1 - t0),
                _ => 0.0,
            };
            style.colormap.sample(u)
        }
        Coding::Label => {
            let label = sample.label.ok_or(Error::MissingLabel { t: sample.t })?;
            style.palette.for_label(label)
        }
    };
    let [r, g, b] = rgb;
    Ok(Rgba::new(r, g, b, quantize(style.alpha)))
}
