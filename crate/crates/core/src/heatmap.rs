//! Position-only kernel-density heatmap, the conventional baseline that
//! Dandelion diagrams are compared against.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point, Viewport};
use crate::ingest::{ClassroomMap, Track};
use crate::render::{ColorMap, LayerKind, Paint, Primitive, Scene, Style};

pub const DEFAULT_CELL_SIZE: f64 = 0.1;
pub const DEFAULT_BANDWIDTH: f64 = 0.35;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    /// Seconds per square meter.
    Density,
    /// Seconds per cell.
    Occupancy,
    /// Seconds the cell center spent inside the attention cone.
    Attention,
}

/// Regular grid over a room. `values` is row-major with row 0 at the
/// lowest y (the world origin); CSV export flips rows so the top comes first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityGrid {
    pub kind: GridKind,
    pub cell_size: f64,
    pub origin: Point,
    pub cols: usize,
    pub rows: usize,
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl DensityGrid {
    /// Zeroed grid tiling `[0, width) × [0, height)`; the last column/row may
    /// extend past the wall when the room is not a whole number of cells.
    pub fn for_map(map: &ClassroomMap, cell_size: f64, kind: GridKind) -> Result<Self> {
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(Error::invalid(format!("cell size must be positive, got {cell_size}")));
        }
        let cols = ((map.width / cell_size - 1e-9).ceil() as usize).max(1);
        let rows = ((map.height / cell_size - 1e-9).ceil() as usize).max(1);
        if cols.saturating_mul(rows) > 50_000_000 {
            return Err(Error::invalid(format!("{cols}x{rows} grid is too large")));
        }
        Ok(Self {
            kind,
            cell_size,
            origin: Point::new(0.0, 0.0),
            cols,
            rows,
            values: vec![0.0; cols * rows],
        })
    }

    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.cols + col
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.values[self.index(col, row)]
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Point {
        Point::new(
            self.origin.x + (col as f64 + 0.5) * self.cell_size,
            self.origin.y + (row as f64 + 0.5) * self.cell_size,
        )
    }

    /// Cell containing `p` under half-open `[lo, hi)` cells.
    pub fn cell_of(&self, p: Point) -> Option<(usize, usize)> {
        let c = ((p.x - self.origin.x) / self.cell_size).floor();
        let r = ((p.y - self.origin.y) / self.cell_size).floor();
        if c >= 0.0 && r >= 0.0 && (c as usize) < self.cols && (r as usize) < self.rows {
            Some((c as usize, r as usize))
        } else {
            None
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Rows top-first (highest y first), matching how the room is drawn.
    pub fn rows_top_first(&self) -> Vec<&[f64]> {
        (0..self.rows)
            .rev()
            .map(|r| &self.values[r * self.cols..(r + 1) * self.cols])
            .collect()
    }

    /// Comma-separated matrix, one line per row, row 0 = top row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.rows_top_first() {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Isotropic Gaussian density of dwell time.
///
/// Each sample contributes `interval · exp(−d²/2h²) / (2πh²)` to every cell
/// center at distance `d`. Kernels are simply cut off at the walls (the grid
/// covers only the room) without renormalization, so density near the walls
/// is biased low.
pub fn kde_grid(track: &Track, map: &ClassroomMap, cell_size: f64, bandwidth: f64) -> Result<DensityGrid> {
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(Error::invalid(format!("bandwidth must be positive, got {bandwidth}")));
    }
    let mut grid = DensityGrid::for_map(map, cell_size, GridKind::Density)?;
    if track.is_empty() {
        return Ok(grid);
    }
    let interval = track.require_interval()?;
    let two_h2 = 2.0 * bandwidth * bandwidth;
    let weight = interval / (PI * two_h2);
    for row in 0..grid.rows {
        for col in 0..grid.cols {
            let c = grid.cell_center(col, row);
            let mut acc = 0.0;
            for s in &track.samples {
                let (dx, dy) = (c.x - s.x, c.y - s.y);
                acc += weight * (-(dx * dx + dy * dy) / two_h2).exp();
            }
            let i = grid.index(col, row);
            grid.values[i] = acc;
        }
    }
    Ok(grid)
}

/// Draws each cell as an opaque rectangle colored by `value / max`.
pub fn heatmap_scene(grid: &DensityGrid, map: &ClassroomMap, colormap: &ColorMap, vp: &Viewport) -> Result<Scene> {
    if !matches!(colormap, ColorMap::Continuous(_)) {
        return Err(Error::invalid("heatmaps need a continuous colormap"));
    }
    let style = Style::default();
    let mut scene = Scene::new(*vp, style.canvas);
    scene.push_room(map, Paint::opaque(style.room_fill), Paint::opaque(style.obstacle_fill));

    let max = grid.max();
    for row in 0..grid.rows {
        for col in 0..grid.cols {
            let x0 = grid.origin.x + col as f64 * grid.cell_size;
            let y0 = grid.origin.y + row as f64 * grid.cell_size;
            let x1 = (x0 + grid.cell_size).min(map.width);
            let y1 = (y0 + grid.cell_size).min(map.height);
            if x1 <= x0 || y1 <= y0 {
                continue;
            }
            let u = if max > 0.0 { grid.get(col, row) / max } else { 0.0 };
            let points = scene.to_screen(&[
                Point::new(x0, y0),
                Point::new(x1, y0),
                Point::new(x1, y1),
                Point::new(x0, y1),
            ]);
            scene.push(
                LayerKind::Spotlights,
                Primitive::Polygon {
                    points,
                    fill: Paint::opaque(colormap.sample(u)),
                },
            );
        }
    }

    for poly in &map.obstacles {
        let mut points = scene.to_screen(poly);
        points.push(points[0]);
        scene.push(
            LayerKind::Trajectories,
            Primitive::Polyline {
                points,
                stroke: Paint {
                    rgb: [255, 255, 255],
                    alpha: 0.8,
                },
                width: 1.0,
            },
        );
    }

    let unit = match grid.kind {
        GridKind::Density => "s/m²",
        GridKind::Occupancy | GridKind::Attention => "s",
    };
    let lo = if grid.values.is_empty() { 0.0 } else { grid.min() };
    scene.push_ramp_legend(colormap, &format!("{lo:.3} {unit}"), &format!("{max:.3} {unit}"));
    Ok(scene)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::TrackSample;
    use crate::render::DEFAULT_STOPS;

    fn track(points: &[(f64, f64)]) -> Track {
        let mut t = Track::new(
            points
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| TrackSample::new(2.0 * i as f64, x, y, 0.0))
                .collect(),
        );
        t.interval = Some(2.0);
        t
    }

    fn room() -> ClassroomMap {
        ClassroomMap::empty(9.0, 7.0).unwrap()
    }

    #[test]
    fn grid_shape() {
        let g = DensityGrid::for_map(&room(), 0.1, GridKind::Density).unwrap();
        assert_eq!((g.cols, g.rows), (90, 70));
        let g = DensityGrid::for_map(&room(), 0.4, GridKind::Density).unwrap();
        assert_eq!((g.cols, g.rows), (23, 18));
        assert!(DensityGrid::for_map(&room(), 0.0, GridKind::Density).is_err());
    }

    #[test]
    fn empty_track_gives_zero_grid() {
        let g = kde_grid(&Track::default(), &room(), 0.1, 0.35).unwrap();
        assert!(g.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn duplicating_samples_doubles_density() {
        let pts = [(2.0, 3.0), (4.5, 3.5), (6.0, 2.0)];
        let once = kde_grid(&track(&pts), &room(), 0.25, 0.35).unwrap();
        let doubled: Vec<_> = pts.iter().chain(pts.iter()).copied().collect();
        let twice = kde_grid(&track(&doubled), &room(), 0.25, 0.35).unwrap();
        for (a, b) in once.values.iter().zip(&twice.values) {
            assert!((2.0 * a - b).abs() <= 1e-12 * b.abs().max(1e-300), "{a} {b}");
        }
    }

    #[test]
    fn single_interior_sample_integrates_to_interval() {
        let g = kde_grid(&track(&[(4.5, 3.5)]), &room(), 0.05, 0.35).unwrap();
        let mass = g.sum() * 0.05 * 0.05;
        assert!((mass - 2.0).abs() / 2.0 < 0.01, "mass {mass}");
    }

    #[test]
    fn translation_by_one_cell() {
        let cell = 0.25;
        let a = kde_grid(&track(&[(3.0, 3.0), (3.4, 3.6)]), &room(), cell, 0.3).unwrap();
        let b = kde_grid(&track(&[(3.0 + cell, 3.0), (3.4 + cell, 3.6)]), &room(), cell, 0.3).unwrap();
        for row in 0..a.rows {
            for col in 0..a.cols - 1 {
                assert!((a.get(col, row) - b.get(col + 1, row)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn bad_params() {
        assert!(kde_grid(&track(&[(1.0, 1.0)]), &room(), 0.1, 0.0).is_err());
        assert!(kde_grid(&track(&[(1.0, 1.0)]), &room(), -0.1, 0.3).is_err());
        let mut raw = track(&[(1.0, 1.0)]);
        raw.interval = None;
        assert!(kde_grid(&raw, &room(), 0.1, 0.3).is_err());
    }

    fn fills(scene: &Scene) -> Vec<[u8; 3]> {
        scene
            .layer(LayerKind::Spotlights)
            .iter()
            .map(|p| match p {
                Primitive::Polygon { fill, .. } => fill.rgb,
                _ => unreachable!(),
            })
            .collect()
    }

    #[test]
    fn scene_colors_follow_relative_value() {
        let map = ClassroomMap::empty(2.0, 1.0).unwrap();
        let vp = Viewport::for_room(2.0, 1.0, 200, 0).unwrap();
        let cmap = ColorMap::default_continuous();
        let mut g = DensityGrid::for_map(&map, 1.0, GridKind::Occupancy).unwrap();
        let zero = heatmap_scene(&g, &map, &cmap, &vp).unwrap();
        assert!(fills(&zero).iter().all(|&c| c == DEFAULT_STOPS[0].rgb));

        g.values = vec![0.0, 5.0];
        let one = heatmap_scene(&g, &map, &cmap, &vp).unwrap();
        assert_eq!(fills(&one), vec![DEFAULT_STOPS[0].rgb, DEFAULT_STOPS[4].rgb]);

        g.values = vec![3.0, 6.0];
        let two = heatmap_scene(&g, &map, &cmap, &vp).unwrap();
        assert_eq!(fills(&two), vec![cmap.sample(0.5), cmap.sample(1.0)]);

        assert!(heatmap_scene(&g, &map, &ColorMap::default_categorical(), &vp).is_err());
    }

    #[test]
    fn csv_top_row_first() {
        let map = ClassroomMap::empty(2.0, 2.0).unwrap();
        let mut g = DensityGrid::for_map(&map, 1.0, GridKind::Occupancy).unwrap();
        g.values = vec![1.0, 2.0, 3.0, 4.0];
        assert_eq!(g.to_csv(), "3,4\n1,2\n");
    }
}
