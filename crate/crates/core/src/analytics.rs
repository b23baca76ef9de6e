//! Proxemics metrics: where the subject stayed (occupancy), what lay in
//! their field of view (attention), which way they faced (heading
//! histogram), how they moved (mobility), and when they were where
//! (temporal zone occupancy).
//!
//! Every sample of a resampled track stands for `interval` seconds.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::heatmap::{DensityGrid, GridKind};
use crate::ingest::{short_arc, ClassroomMap, Track};

pub const DEFAULT_CELL_SIZE: f64 = 0.5;
pub const DEFAULT_CONE_RANGE: f64 = 3.0;
pub const DEFAULT_CONE_HALF_ANGLE_DEG: f64 = 60.0;
pub const DEFAULT_STOP_SPEED: f64 = 0.3;
pub const DEFAULT_MIN_STOP_DURATION: f64 = 6.0;
pub const DEFAULT_HEADING_BINS: usize = 16;
pub const DEFAULT_TIME_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub grid: DensityGrid,
    /// Seconds spent outside `[0, width) × [0, height)`.
    pub overflow: f64,
}

pub type AttentionGrid = DensityGrid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttentionCone {
    pub range: f64,
    pub half_angle: f64,
}

impl Default for AttentionCone {
    fn default() -> Self {
        Self {
            range: DEFAULT_CONE_RANGE,
            half_angle: DEFAULT_CONE_HALF_ANGLE_DEG.to_radians(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeadingHistogram {
    pub n_bins: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stop {
    pub start_index: usize,
    pub end_index: usize,
    pub centroid: Point,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MobilityStats {
    pub path_length: f64,
    pub mean_speed: f64,
    pub stops: Vec<Stop>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemporalZoneMatrix {
    /// Zone names in declaration order, then `"elsewhere"`.
    pub zones: Vec<String>,
    pub n_bins: usize,
    /// `values[zone][bin]`, seconds.
    pub values: Vec<Vec<f64>>,
}

pub const ELSEWHERE: &str = "elsewhere";

/// Seconds per cell; each sample charges the unique half-open cell holding it.
pub fn occupancy_grid(track: &Track, map: &ClassroomMap, cell_size: f64) -> Result<OccupancyGrid> {
    let mut grid = DensityGrid::for_map(map, cell_size, GridKind::Occupancy)?;
    let interval = track.require_interval()?;
    let mut overflow = 0.0;
    for s in &track.samples {
        let inside = s.x < map.width && s.y < map.height;
        match grid.cell_of(s.position()).filter(|_| inside) {
            Some((c, r)) => {
                let i = grid.index(c, r);
                grid.values[i] += interval;
            }
            None => overflow += interval,
        }
    }
    Ok(OccupancyGrid { grid, overflow })
}

/// Whether the cone at `apex` facing `heading` contains `target`.
#[inline]
pub fn cone_contains(apex: Point, heading: f64, target: Point, cone: &AttentionCone) -> bool {
    let (dx, dy) = (target.x - apex.x, target.y - apex.y);
    dx.hypot(dy) <= cone.range && short_arc(heading, dy.atan2(dx)).abs() <= cone.half_angle
}

/// Seconds each cell center spent inside the attention cone.
///
/// Only cells whose centers can fall within `range` of a sample are tested;
/// the result equals testing every cell against every sample.
pub fn attention_grid(
    track: &Track,
    map: &ClassroomMap,
    cell_size: f64,
    cone: &AttentionCone,
) -> Result<AttentionGrid> {
    if !(cone.range > 0.0) {
        return Err(Error::invalid(format!("cone range must be positive, got {}", cone.range)));
    }
    if !(cone.half_angle > 0.0 && cone.half_angle <= PI) {
        return Err(Error::invalid(format!(
            "cone half-angle must lie in (0, π], got {}",
            cone.half_angle
        )));
    }
    let mut grid = DensityGrid::for_map(map, cell_size, GridKind::Attention)?;
    let interval = track.require_interval()?;
    let span = |lo: f64, hi: f64, origin: f64, n: usize| -> (usize, usize) {
        let a = ((lo - origin) / cell_size - 1.0).floor();
        let b = ((hi - origin) / cell_size + 1.0).ceil();
        let a = if a.is_nan() || a < 0.0 { 0 } else { (a as usize).min(n) };
        let b = if b.is_nan() { n } else if b < 0.0 { 0 } else { (b as usize).min(n) };
        (a, b)
    };
    for s in &track.samples {
        let p = s.position();
        let (c0, c1) = span(p.x - cone.range, p.x + cone.range, grid.origin.x, grid.cols);
        let (r0, r1) = span(p.y - cone.range, p.y + cone.range, grid.origin.y, grid.rows);
        for row in r0..r1 {
            for col in c0..c1 {
                if cone_contains(p, s.heading, grid.cell_center(col, row), cone) {
                    let i = grid.index(col, row);
                    grid.values[i] += interval;
                }
            }
        }
    }
    Ok(grid)
}

/// Seconds per heading bin; bin `k` covers `[2πk/n, 2π(k+1)/n)`.
pub fn heading_histogram(track: &Track, n_bins: usize) -> Result<HeadingHistogram> {
    if n_bins == 0 {
        return Err(Error::invalid("heading histogram needs at least one bin"));
    }
    let interval = track.require_interval()?;
    let width = TAU / n_bins as f64;
    let mut values = vec![0.0; n_bins];
    for s in &track.samples {
        let k = ((s.heading / width).floor().max(0.0) as usize).min(n_bins - 1);
        values[k] += interval;
    }
    Ok(HeadingHistogram { n_bins, values })
}

/// Path length, mean speed, and stops.
///
/// Step `i` (sample `i` to `i + 1`, within a segment) is slow when its speed
/// is below `stop_speed`. A stop is a maximal run of slow steps spanning at
/// least `min_stop_duration`; it covers the samples from the first step's
/// start to the last step's end.
pub fn mobility_stats(track: &Track, stop_speed: f64, min_stop_duration: f64) -> Result<MobilityStats> {
    if !(stop_speed > 0.0 && min_stop_duration > 0.0) {
        return Err(Error::invalid("stop speed and minimum stop duration must be positive"));
    }
    let interval = track.require_interval()?;
    let samples = &track.samples;
    let mut path_length = 0.0;
    let mut stops = Vec::new();

    let close_run = |start: usize, end: usize, stops: &mut Vec<Stop>| {
        let duration = samples[end].t - samples[start].t;
        if duration >= min_stop_duration {
            let n = (end - start + 1) as f64;
            let (sx, sy) = samples[start..=end]
                .iter()
                .fold((0.0, 0.0), |(ax, ay), s| (ax + s.x, ay + s.y));
            stops.push(Stop {
                start_index: start,
                end_index: end,
                centroid: Point::new(sx / n, sy / n),
                duration,
            });
        }
    };

    for seg in track.segments() {
        let mut run: Option<usize> = None;
        for i in seg.start..seg.end.saturating_sub(1) {
            let d = samples[i].position().distance(samples[i + 1].position());
            path_length += d;
            if d / interval < stop_speed {
                run.get_or_insert(i);
            } else if let Some(start) = run.take() {
                close_run(start, i, &mut stops);
            }
        }
        if let Some(start) = run {
            close_run(start, seg.end - 1, &mut stops);
        }
    }

    let tracked = samples.len() as f64 * interval;
    Ok(MobilityStats {
        path_length,
        mean_speed: if tracked > 0.0 { path_length / tracked } else { 0.0 },
        stops,
    })
}

/// Seconds per (zone, time bin). Bins split `[t_first, t_last]` equally with
/// the last bin closed; overlapping zones go to the first declared.
pub fn temporal_zone_occupancy(track: &Track, map: &ClassroomMap, n_bins: usize) -> Result<TemporalZoneMatrix> {
    if n_bins == 0 {
        return Err(Error::invalid("temporal matrix needs at least one time bin"));
    }
    let interval = track.require_interval()?;
    let mut zones: Vec<String> = map.zones.iter().map(|z| z.name.clone()).collect();
    zones.push(ELSEWHERE.to_string());
    let elsewhere = zones.len() - 1;
    let mut values = vec![vec![0.0; n_bins]; zones.len()];
    let (t0, t1) = track.time_span().unwrap_or((0.0, 0.0));
    let span = t1 - t0;
    for s in &track.samples {
        let bin = if span > 0.0 {
            (((s.t - t0) / span * n_bins as f64).floor().max(0.0) as usize).min(n_bins - 1)
        } else {
            0
        };
        let zone = map.zone_of(s.position()).unwrap_or(elsewhere);
        values[zone][bin] += interval;
    }
    Ok(TemporalZoneMatrix {
        zones,
        n_bins,
        values,
    })
}

/// Parameters of a full metrics report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsParams {
    pub cell_size: f64,
    pub cone: AttentionCone,
    pub heading_bins: usize,
    pub time_bins: usize,
    pub stop_speed: f64,
    pub min_stop_duration: f64,
}

impl Default for MetricsParams {
    fn default() -> Self {
        Self {
            cell_size: DEFAULT_CELL_SIZE,
            cone: AttentionCone::default(),
            heading_bins: DEFAULT_HEADING_BINS,
            time_bins: DEFAULT_TIME_BINS,
            stop_speed: DEFAULT_STOP_SPEED,
            min_stop_duration: DEFAULT_MIN_STOP_DURATION,
        }
    }
}

/// Grid geometry header plus values, rows top-first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    #[serde(flatten)]
    pub geometry: DensityGrid,
    pub values: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overflow: Option<f64>,
}

impl GridReport {
    fn new(grid: &DensityGrid, overflow: Option<f64>) -> Self {
        Self {
            geometry: grid.clone(),
            values: grid.rows_top_first().into_iter().map(<[f64]>::to_vec).collect(),
            overflow,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub interval: f64,
    pub samples: usize,
    pub tracked_time: f64,
    pub occupancy: GridReport,
    pub attention: GridReport,
    pub histogram: HeadingHistogram,
    pub mobility: MobilityStats,
    pub temporal: TemporalZoneMatrix,
}

pub fn metrics_report(track: &Track, map: &ClassroomMap, params: &MetricsParams) -> Result<MetricsReport> {
    let interval = track.require_interval()?;
    let occ = occupancy_grid(track, map, params.cell_size)?;
    let att = attention_grid(track, map, params.cell_size, &params.cone)?;
    Ok(MetricsReport {
        interval,
        samples: track.len(),
        tracked_time: track.tracked_time()?,
        occupancy: GridReport::new(&occ.grid, Some(occ.overflow)),
        attention: GridReport::new(&att, None),
        histogram: heading_histogram(track, params.heading_bins)?,
        mobility: mobility_stats(track, params.stop_speed, params.min_stop_duration)?,
        temporal: temporal_zone_occupancy(track, map, params.time_bins)?,
    })
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization is infallible");
        s.push('\n');
        s
    }
}
