use rayon::prelude::*;

use super::color::{composite_over_unit, quantize, Paint, Rgba};
use super::scene::{Primitive, Scene};
use super::style::Style;
use crate::error::{Error, Result};
use crate::geometry::Point;

pub const MAX_PIXELS: u64 = 100_000_000;

/// Row-major 8-bit straight-alpha RGBA pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, fill: Rgba) -> Self {
        let n = width as usize * height as usize;
        let mut pixels = Vec::with_capacity(n * 4);
        for _ in 0..n {
            pixels.extend_from_slice(&[fill.r, fill.g, fill.b, fill.a]);
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn get(&self, x: u32, y: u32) -> Rgba {
        let i = (y as usize * self.width as usize + x as usize) * 4;
        let p = &self.pixels[i..i + 4];
        Rgba::new(p[0], p[1], p[2], p[3])
    }

    pub fn set(&mut self, x: u32, y: u32, c: Rgba) {
        let i = (y as usize * self.width as usize + x as usize) * 4;
        self.pixels[i..i + 4].copy_from_slice(&[c.r, c.g, c.b, c.a]);
    }
}

/// A filled region ready for scan conversion.
struct Shape {
    points: Vec<Point>,
    color: [f64; 4],
    y_min: f64,
    y_max: f64,
}

impl Shape {
    fn new(points: Vec<Point>, paint: Paint) -> Option<Self> {
        if points.len() < 3 || paint.alpha <= 0.0 {
            return None;
        }
        let (y_min, y_max) = points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.y), hi.max(p.y)));
        Some(Self {
            points,
            color: paint.unit(),
            y_min,
            y_max,
        })
    }

    /// Sorted x crossings of the horizontal line at `y`. Edges are half-open
    /// in y, so a sample on a shared vertex or a horizontal edge is counted
    /// once (top edges in, bottom edges out).
    fn crossings(&self, y: f64, xs: &mut Vec<f64>) {
        xs.clear();
        let n = self.points.len();
        for i in 0..n {
            let a = self.points[i];
            let b = self.points[(i + 1) % n];
            if (a.y <= y) != (b.y <= y) {
                xs.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        xs.sort_by(f64::total_cmp);
    }
}

fn stroke_quads(points: &[Point], stroke: Paint, width: f64, out: &mut Vec<Shape>) {
    let half = width / 2.0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len = dx.hypot(dy);
        if len <= 0.0 || !len.is_finite() {
            continue;
        }
        let (nx, ny) = (-dy / len * half, dx / len * half);
        let quad = vec![
            Point::new(a.x + nx, a.y + ny),
            Point::new(b.x + nx, b.y + ny),
            Point::new(b.x - nx, b.y - ny),
            Point::new(a.x - nx, a.y - ny),
        ];
        out.extend(Shape::new(quad, stroke));
    }
}

fn collect_shapes(scene: &Scene) -> Vec<Shape> {
    let mut shapes = Vec::new();
    for prim in scene.primitives() {
        match prim {
            Primitive::Polygon { points, fill } => shapes.extend(Shape::new(points.clone(), *fill)),
            Primitive::Polyline {
                points,
                stroke,
                width,
            } => stroke_quads(points, *stroke, *width, &mut shapes),
            // Legend text is left to the SVG output.
            Primitive::Text { .. } => {}
        }
    }
    shapes
}

/// Center of sub-sample `j` along an axis, in pixels.
#[inline]
fn center(j: usize, ss: usize) -> f64 {
    (j as f64 + 0.5) / ss as f64
}

/// Smallest sub-sample index in `0..=limit` whose center is `>= x`.
fn first_center_at_or_after(x: f64, ss: usize, limit: usize) -> usize {
    let guess = (x * ss as f64 - 0.5).ceil();
    let mut j = if guess.is_nan() || guess <= 0.0 {
        0
    } else if guess >= limit as f64 {
        limit
    } else {
        guess as usize
    };
    while j > 0 && center(j - 1, ss) >= x {
        j -= 1;
    }
    while j < limit && center(j, ss) < x {
        j += 1;
    }
    j
}

fn render_row(py: usize, width: usize, ss: usize, shapes: &[Shape], bg: [f64; 4], out: &mut [u8]) {
    let sub_w = width * ss;
    let mut buf = vec![bg; sub_w * ss];
    let mut xs = Vec::new();
    let top = py as f64;
    let bottom = (py + 1) as f64;
    for shape in shapes {
        if shape.y_max < top || shape.y_min > bottom {
            continue;
        }
        for sy in 0..ss {
            let y = center(py * ss + sy, ss);
            if y < shape.y_min || y >= shape.y_max {
                continue;
            }
            shape.crossings(y, &mut xs);
            let row = &mut buf[sy * sub_w..(sy + 1) * sub_w];
            for span in xs.chunks_exact(2) {
                let start = first_center_at_or_after(span[0], ss, sub_w);
                let end = first_center_at_or_after(span[1], ss, sub_w);
                for px in &mut row[start..end.max(start)] {
                    *px = composite_over_unit(*px, shape.color);
                }
            }
        }
    }
    let n = (ss * ss) as f64;
    for x in 0..width {
        let mut acc = [0.0f64; 4];
        for sy in 0..ss {
            for sx in 0..ss {
                let c = buf[sy * sub_w + x * ss + sx];
                for k in 0..4 {
                    acc[k] += c[k];
                }
            }
        }
        let px = &mut out[x * 4..x * 4 + 4];
        for k in 0..4 {
            px[k] = quantize(acc[k] / n);
        }
    }
}

/// Supersampled scanline rasterization of a scene.
///
/// Each pixel holds `supersample²` sub-samples at sub-pixel centers. A
/// sub-sample takes a shape's color when its center is inside the shape
/// (even-odd, top-left tie rule); shapes are composited back to front and
/// the pixel is the mean of its sub-samples. Rows are independent, so the
/// parallel result is bit-identical to a sequential one.
pub fn rasterize(scene: &Scene, style: &Style) -> Result<RasterImage> {
    let ss = style.supersample;
    if ![1, 2, 4, 8].contains(&ss) {
        return Err(Error::invalid(format!("supersample must be 1, 2, 4 or 8, got {ss}")));
    }
    let (w, h) = (scene.viewport.pixel_width, scene.viewport.pixel_height);
    if w as u64 * h as u64 > MAX_PIXELS {
        return Err(Error::ImageTooLarge {
            width: w,
            height: h,
        });
    }
    let shapes = collect_shapes(scene);
    let bg = Paint::opaque(scene.background).unit();
    let width = w as usize;
    let mut pixels = vec![0u8; width * h as usize * 4];
    if width > 0 {
        pixels
            .par_chunks_mut(width * 4)
            .enumerate()
            .for_each(|(py, row)| render_row(py, width, ss as usize, &shapes, bg, row));
    }
    Ok(RasterImage {
        width: w,
        height: h,
        pixels,
    })
}
