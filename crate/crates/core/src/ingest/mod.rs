//! Track ingestion: parsing, validation, and uniform resampling.
//!
//! Tracks are sequences of `(t, x, y, heading[, label])` samples in a y-up
//! world frame measured in meters. Headings are always stored in radians,
//! normalized to `[0, 2π)`.

mod parse;
mod resample;
mod validate;

use std::f64::consts::{PI, TAU};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{point_in_polygon, Point};

pub use parse::{parse_track, write_track, write_track_csv, write_track_json};
pub use resample::resample_uniform;
pub use validate::{validate_track, IssueKind, ValidationIssue};

/// Sampling interval of the reference field data, in seconds.
pub const DEFAULT_INTERVAL: f64 = 2.0;
/// Default gap bridging limit as a multiple of the interval.
pub const DEFAULT_MAX_GAP_FACTOR: f64 = 3.0;
/// Brisk indoor walking upper bound used by validation, m/s.
pub const DEFAULT_MAX_SPEED: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeadingUnit {
    #[default]
    Radians,
    Degrees,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Radians in `[0, 2π)`.
    pub heading: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<u32>,
}

impl TrackSample {
    pub fn new(t: f64, x: f64, y: f64, heading: f64) -> Self {
        Self {
            t,
            x,
            y,
            heading,
            label: None,
        }
    }

    pub fn with_label(mut self, label: u32) -> Self {
        self.label = Some(label);
        self
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackMeta {
    pub session_id: String,
    pub subject_id: String,
    pub session_duration: f64,
}

/// An ordered sequence of samples.
///
/// `interval` is `Some` once the track has been resampled onto a uniform
/// grid; `segment_breaks` then lists the sample indices that follow a gap.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Track {
    pub samples: Vec<TrackSample>,
    pub interval: Option<f64>,
    pub segment_breaks: Vec<usize>,
    pub meta: TrackMeta,
}

impl Track {
    pub fn new(samples: Vec<TrackSample>) -> Self {
        let session_duration = match (samples.first(), samples.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        };
        Self {
            samples,
            interval: None,
            segment_breaks: Vec::new(),
            meta: TrackMeta {
                session_duration,
                ..TrackMeta::default()
            },
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Index ranges of the gap-free segments, in order.
    pub fn segments(&self) -> Vec<Range<usize>> {
        let mut out = Vec::with_capacity(self.segment_breaks.len() + 1);
        let mut start = 0;
        for &b in &self.segment_breaks {
            if b > start && b < self.samples.len() {
                out.push(start..b);
                start = b;
            }
        }
        if start < self.samples.len() {
            out.push(start..self.samples.len());
        }
        out
    }

    /// The uniform interval, or an error for tracks that were never resampled.
    pub fn require_interval(&self) -> Result<f64> {
        match self.interval {
            Some(iv) if iv > 0.0 && iv.is_finite() => Ok(iv),
            _ => Err(Error::invalid(
                "track has no uniform interval; resample it first",
            )),
        }
    }

    /// Seconds represented by the samples: `len × interval`.
    pub fn tracked_time(&self) -> Result<f64> {
        Ok(self.samples.len() as f64 * self.require_interval()?)
    }

    pub fn time_span(&self) -> Option<(f64, f64)> {
        Some((self.samples.first()?.t, self.samples.last()?.t))
    }

    /// Rotates every heading by `offset` radians, e.g. to calibrate a sensor
    /// worn on the back against gaze direction.
    pub fn with_heading_offset(&self, offset: f64) -> Result<Track> {
        let mut out = self.clone();
        for s in &mut out.samples {
            s.heading = normalize_heading(s.heading + offset)?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub name: String,
    pub polygon: Vec<Point>,
}

/// Room bounds `[0, width] × [0, height]` plus furniture and named zones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMap")]
pub struct ClassroomMap {
    pub width: f64,
    pub height: f64,
    #[serde(default)]
    pub obstacles: Vec<Vec<Point>>,
    #[serde(default)]
    pub zones: Vec<Zone>,
}

#[derive(Deserialize)]
struct RawMap {
    width: f64,
    height: f64,
    #[serde(default)]
    obstacles: Vec<Vec<Point>>,
    #[serde(default)]
    zones: Vec<Zone>,
}

impl TryFrom<RawMap> for ClassroomMap {
    type Error = Error;

    fn try_from(raw: RawMap) -> Result<Self> {
        ClassroomMap::new(raw.width, raw.height, raw.obstacles, raw.zones)
    }
}

const BOUNDS_EPS: f64 = 1e-9;

impl ClassroomMap {
    pub fn new(
        width: f64,
        height: f64,
        obstacles: Vec<Vec<Point>>,
        zones: Vec<Zone>,
    ) -> Result<Self> {
        if !(width.is_finite() && width > 0.0 && height.is_finite() && height > 0.0) {
            return Err(Error::invalid(format!(
                "room dimensions must be positive, got {width} x {height}"
            )));
        }
        let map = Self {
            width,
            height,
            obstacles,
            zones,
        };
        for (i, poly) in map.obstacles.iter().enumerate() {
            map.check_polygon(poly, &format!("obstacle {i}"))?;
        }
        for zone in &map.zones {
            map.check_polygon(&zone.polygon, &format!("zone {:?}", zone.name))?;
        }
        Ok(map)
    }

    /// An empty room of the given size.
    pub fn empty(width: f64, height: f64) -> Result<Self> {
        Self::new(width, height, Vec::new(), Vec::new())
    }

    fn check_polygon(&self, poly: &[Point], what: &str) -> Result<()> {
        if poly.len() < 3 {
            return Err(Error::invalid(format!("{what} has fewer than 3 vertices")));
        }
        for p in poly {
            if !self.contains_closed(*p) {
                return Err(Error::invalid(format!(
                    "{what} vertex ({}, {}) lies outside the room",
                    p.x, p.y
                )));
            }
        }
        Ok(())
    }

    fn contains_closed(&self, p: Point) -> bool {
        p.x.is_finite()
            && p.y.is_finite()
            && p.x >= -BOUNDS_EPS
            && p.x <= self.width + BOUNDS_EPS
            && p.y >= -BOUNDS_EPS
            && p.y <= self.height + BOUNDS_EPS
    }

    /// True when `p` lies in the closed room rectangle.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= 0.0 && p.x <= self.width && p.y >= 0.0 && p.y <= self.height
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    /// Index of the first zone (declaration order) containing `p`.
    pub fn zone_of(&self, p: Point) -> Option<usize> {
        self.zones
            .iter()
            .position(|z| point_in_polygon(p, &z.polygon))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map serialization is infallible")
    }
}

/// Wraps any finite angle into `[0, 2π)`.
pub fn normalize_heading(angle: f64) -> Result<f64> {
    if !angle.is_finite() {
        return Err(Error::NonFinite(angle));
    }
    let r = angle.rem_euclid(TAU);
    // rem_euclid of a tiny negative value rounds up to exactly 2π.
    Ok(if r >= TAU { 0.0 } else { r })
}

/// Signed difference `to − from` along the shorter arc, in `[−π, π]`.
pub fn short_arc(from: f64, to: f64) -> f64 {
    let d = (to - from).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        assert!((normalize_heading(-PI / 2.0).unwrap() - 1.5 * PI).abs() < 1e-12);
        assert_eq!(normalize_heading(TAU).unwrap(), 0.0);
        assert_eq!(normalize_heading(0.0).unwrap(), 0.0);
        assert_eq!(normalize_heading(-4.0 * PI).unwrap(), 0.0);
        assert!((normalize_heading(7.0).unwrap() - 0.7168146928204138).abs() < 1e-12);
        let tiny = normalize_heading(-1e-300).unwrap();
        assert!((0.0..TAU).contains(&tiny));
    }

    #[test]
    fn normalize_rejects_non_finite() {
        assert!(matches!(normalize_heading(f64::NAN), Err(Error::NonFinite(_))));
        assert!(matches!(
            normalize_heading(f64::INFINITY),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn short_arc_crosses_seam() {
        assert!((short_arc(6.1, 0.2) - (0.2 + TAU - 6.1)).abs() < 1e-12);
        assert!((short_arc(0.2, 6.1) + (0.2 + TAU - 6.1)).abs() < 1e-12);
        assert_eq!(short_arc(1.0, 1.0), 0.0);
    }

    #[test]
    fn segments_follow_breaks() {
        let samples = (0..5)
            .map(|i| TrackSample::new(i as f64, 0.0, 0.0, 0.0))
            .collect();
        let mut track = Track::new(samples);
        track.segment_breaks = vec![3];
        assert_eq!(track.segments(), vec![0..3, 3..5]);
    }

    #[test]
    fn map_rejects_bad_geometry() {
        assert!(ClassroomMap::empty(0.0, 5.0).is_err());
        let tri = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        assert!(ClassroomMap::new(5.0, 5.0, vec![tri], vec![]).is_err());
        let outside = vec![
            Point::new(0.0, 0.0),
            Point::new(6.0, 0.0),
            Point::new(1.0, 1.0),
        ];
        assert!(ClassroomMap::new(5.0, 5.0, vec![outside], vec![]).is_err());
    }

    #[test]
    fn map_json_round_trip() {
        let text = r#"{"width":10,"height":8,
            "obstacles":[[[1,1],[2,1],[2,2],[1,2]]],
            "zones":[{"name":"front","polygon":[[0,6],[10,6],[10,8],[0,8]]}]}"#;
        let map = ClassroomMap::from_json(text).unwrap();
        assert_eq!(map.obstacles.len(), 1);
        assert_eq!(map.zone_of(Point::new(5.0, 7.0)), Some(0));
        assert_eq!(map.zone_of(Point::new(5.0, 1.0)), None);
        let again = ClassroomMap::from_json(&map.to_json()).unwrap();
        assert_eq!(map, again);
        assert!(ClassroomMap::from_json(r#"{"width":-1,"height":8}"#).is_err());
    }
}
