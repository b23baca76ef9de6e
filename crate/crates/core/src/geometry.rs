//! Spotlight triangles, trajectory polylines, and the world-to-screen map.
//!
//! World coordinates are meters, y-up. Screen coordinates are pixels, y-down.
//! The axis flip happens only in [`world_to_screen`].

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Track, TrackSample};
use crate::render::Rgba;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Even-odd point-in-polygon test. Edges are half-open in y so a point on a
/// shared horizontal boundary belongs to exactly one of two adjacent cells.
pub fn point_in_polygon(p: Point, poly: &[Point]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a.y <= p.y) != (b.y <= p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Dimensions of a spotlight triangle.
///
/// Both base vertices lie on the circle of radius `length` about the apex,
/// `half_angle` either side of the heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpotlightParams {
    pub length: f64,
    pub half_angle: f64,
}

impl Default for SpotlightParams {
    fn default() -> Self {
        Self {
            length: 0.8,
            half_angle: 25f64.to_radians(),
        }
    }
}

impl SpotlightParams {
    pub fn new(length: f64, half_angle: f64) -> Result<Self> {
        let p = Self { length, half_angle };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::invalid(format!(
                "spotlight length must be positive, got {}",
                self.length
            )));
        }
        if !(self.half_angle > 0.0 && self.half_angle < FRAC_PI_2) {
            return Err(Error::invalid(format!(
                "spotlight half-angle must lie in (0, π/2), got {}",
                self.half_angle
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpotlightUnit {
    pub apex: Point,
    pub base_a: Point,
    pub base_b: Point,
    pub color: Rgba,
    pub source_index: usize,
}

impl SpotlightUnit {
    pub fn vertices(&self) -> [Point; 3] {
        [self.apex, self.base_a, self.base_b]
    }

    pub fn area(&self) -> f64 {
        let (a, b, c) = (self.apex, self.base_a, self.base_b);
        0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)).abs()
    }
}

/// The triangle for one sample. The result is uncolored (transparent black)
/// and has `source_index` 0; callers fill both in.
pub fn spotlight_triangle(sample: &TrackSample, params: &SpotlightParams) -> Result<SpotlightUnit> {
    params.validate()?;
    let apex = sample.position();
    let h = sample.heading;
    let l = params.length;
    let theta = params.half_angle;
    Ok(SpotlightUnit {
        apex,
        base_a: Point::new(apex.x + l * (h + theta).cos(), apex.y + l * (h + theta).sin()),
        base_b: Point::new(apex.x + l * (h - theta).cos(), apex.y + l * (h - theta).sin()),
        color: Rgba::TRANSPARENT,
        source_index: 0,
    })
}

/// One polyline of positions per segment with at least two samples.
pub fn trajectory_polylines(track: &Track) -> Vec<Vec<Point>> {
    track
        .segments()
        .into_iter()
        .filter(|seg| seg.len() >= 2)
        .map(|seg| track.samples[seg].iter().map(TrackSample::position).collect())
        .collect()
}

/// Axis-aligned world rectangle, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldRect {
    pub x0: f64,
    pub y0: f64,
    pub width: f64,
    pub height: f64,
}

/// Maps a world rectangle onto a pixel canvas with one uniform scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub world: WorldRect,
    pub pixel_width: u32,
    pub pixel_height: u32,
    pub margin: u32,
}

impl Viewport {
    /// Derives the pixel height from the world aspect ratio.
    pub fn new(world: WorldRect, pixel_width: u32, margin: u32) -> Result<Self> {
        if !(world.width > 0.0 && world.height > 0.0)
            || !world.width.is_finite()
            || !world.height.is_finite()
        {
            return Err(Error::invalid("viewport world rectangle must have positive size"));
        }
        if pixel_width == 0 || pixel_width <= 2 * margin {
            return Err(Error::invalid(format!(
                "pixel width {pixel_width} leaves no room inside a {margin} px margin"
            )));
        }
        let scale = (pixel_width - 2 * margin) as f64 / world.width;
        let inner_h = (world.height * scale).round().max(1.0);
        if inner_h > u32::MAX as f64 / 2.0 {
            return Err(Error::invalid("viewport height overflows"));
        }
        Ok(Self {
            world,
            pixel_width,
            pixel_height: inner_h as u32 + 2 * margin,
            margin,
        })
    }

    pub fn for_room(width: f64, height: f64, pixel_width: u32, margin: u32) -> Result<Self> {
        Self::new(
            WorldRect {
                x0: 0.0,
                y0: 0.0,
                width,
                height,
            },
            pixel_width,
            margin,
        )
    }

    /// Pixels per meter, identical on both axes.
    pub fn scale(&self) -> f64 {
        (self.pixel_width - 2 * self.margin) as f64 / self.world.width
    }
}

pub fn world_to_screen(p: Point, vp: &Viewport) -> Point {
    let s = vp.scale();
    let m = vp.margin as f64;
    Point::new(
        m + (p.x - vp.world.x0) * s,
        vp.pixel_height as f64 - m - (p.y - vp.world.y0) * s,
    )
}
