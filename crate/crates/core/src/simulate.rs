//! Deterministic synthetic classrooms and teaching sessions.
//!
//! Two archetypes: lecture rooms with desks in a matrix facing a board, and
//! teamwork rooms with desks in irregular clusters. The movement model is a
//! simple waypoint loop (walk, then dwell facing the nearest desk) meant to
//! produce contrasting occupancy patterns, not realistic pedagogy.
//!
//! All randomness comes from one SplitMix64 stream, consumed in a fixed
//! order, so output is reproducible across platforms and implementations.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::ingest::{normalize_heading, ClassroomMap, Track, TrackMeta, TrackSample, Zone};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 step: returns the advanced state and the mixed output.
pub fn splitmix_next(state: u64) -> (u64, u64) {
    let next = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = next;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (next, z ^ (z >> 31))
}

/// Top 53 bits of `value` as a float in `[0, 1)`.
pub fn uniform01(value: u64) -> f64 {
    (value >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        let (state, value) = splitmix_next(self.state);
        self.state = state;
        value
    }

    pub fn next_f64(&mut self) -> f64 {
        uniform01(self.next_u64())
    }

    /// Uniform index in `0..n`; `n` must be non-zero.
    fn index(&mut self, n: usize) -> usize {
        ((self.next_f64() * n as f64) as usize).min(n - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutKind {
    Lecture,
    Teamwork,
}

impl fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LayoutKind::Lecture => "lecture",
            LayoutKind::Teamwork => "teamwork",
        })
    }
}

pub const ROOM_WIDTH: f64 = 9.0;
pub const ROOM_HEIGHT: f64 = 7.0;
pub const DESK_WIDTH: f64 = 0.6;
pub const DESK_DEPTH: f64 = 0.5;
pub const LECTURE_ROWS: usize = 4;
pub const LECTURE_COLS: usize = 6;
const LECTURE_PITCH_X: f64 = 1.3;
const LECTURE_PITCH_Y: f64 = 1.2;
const LECTURE_FIRST_X: f64 = 1.25;
const LECTURE_FRONT_ROW_Y: f64 = 5.0;
const BOARD_X: (f64, f64) = (2.5, 6.5);
const BOARD_DEPTH: f64 = 0.15;
pub const CLUSTERS: usize = 4;
pub const DESKS_PER_CLUSTER: usize = 5;
const CLUSTER_RING_RADIUS: f64 = 0.7;
const CLUSTER_MIN_SEPARATION: f64 = 2.0;
const CLUSTER_WALL_CLEARANCE: f64 = 1.2;
const MAX_ATTEMPTS: usize = 10_000;
/// Distance kept between the teacher's front position and the front wall.
const FRONT_STANDOFF: f64 = 0.8;
/// Offset from a lecture desk to where the teacher stands, toward the board.
const AISLE_OFFSET: f64 = 0.6;

fn rect(cx: f64, cy: f64, w: f64, h: f64) -> Vec<Point> {
    vec![
        Point::new(cx - w / 2.0, cy - h / 2.0),
        Point::new(cx + w / 2.0, cy - h / 2.0),
        Point::new(cx + w / 2.0, cy + h / 2.0),
        Point::new(cx - w / 2.0, cy + h / 2.0),
    ]
}

fn thirds(width: f64, height: f64) -> Vec<Zone> {
    let band = |name: &str, y0: f64, y1: f64| Zone {
        name: name.to_string(),
        polygon: vec![
            Point::new(0.0, y0),
            Point::new(width, y0),
            Point::new(width, y1),
            Point::new(0.0, y1),
        ],
    };
    vec![
        band("front", 2.0 * height / 3.0, height),
        band("middle", height / 3.0, 2.0 * height / 3.0),
        band("back", 0.0, height / 3.0),
    ]
}

/// A 9 × 7 m classroom. The board is along the top wall (`y = height`),
/// which is the front of the room.
///
/// Lecture: 24 desks on a 4 × 6 lattice plus the board (last obstacle);
/// the seed is unused. Teamwork: 4 clusters of 5 desks, cluster centers
/// rejection-sampled at least 2 m apart and 1.2 m from the walls, desks on a
/// 0.7 m ring around each center. Obstacles are listed cluster by cluster.
pub fn make_layout(kind: LayoutKind, seed: u64) -> Result<ClassroomMap> {
    layout_from(kind, &mut SplitMix64::new(seed))
}

fn layout_from(kind: LayoutKind, rng: &mut SplitMix64) -> Result<ClassroomMap> {
    let (w, h) = (ROOM_WIDTH, ROOM_HEIGHT);
    let mut obstacles = Vec::new();
    match kind {
        LayoutKind::Lecture => {
            for r in 0..LECTURE_ROWS {
                for c in 0..LECTURE_COLS {
                    let cx = LECTURE_FIRST_X + c as f64 * LECTURE_PITCH_X;
                    let cy = LECTURE_FRONT_ROW_Y - r as f64 * LECTURE_PITCH_Y;
                    obstacles.push(rect(cx, cy, DESK_WIDTH, DESK_DEPTH));
                }
            }
            let (x0, x1) = BOARD_X;
            obstacles.push(rect((x0 + x1) / 2.0, h - BOARD_DEPTH / 2.0, x1 - x0, BOARD_DEPTH));
        }
        LayoutKind::Teamwork => {
            let mut centers: Vec<Point> = Vec::with_capacity(CLUSTERS);
            let mut attempts = 0;
            while centers.len() < CLUSTERS {
                if attempts == MAX_ATTEMPTS {
                    return Err(Error::LayoutFailure { attempts });
                }
                attempts += 1;
                let lo = CLUSTER_WALL_CLEARANCE;
                let x = lo + rng.next_f64() * (w - 2.0 * lo);
                let y = lo + rng.next_f64() * (h - 2.0 * lo);
                let p = Point::new(x, y);
                if centers.iter().all(|c| c.distance(p) >= CLUSTER_MIN_SEPARATION) {
                    centers.push(p);
                }
            }
            for c in centers {
                let rot = rng.next_f64() * TAU;
                for j in 0..DESKS_PER_CLUSTER {
                    let a = rot + TAU * j as f64 / DESKS_PER_CLUSTER as f64;
                    let (dx, dy) = (CLUSTER_RING_RADIUS * a.cos(), CLUSTER_RING_RADIUS * a.sin());
                    obstacles.push(rect(c.x + dx, c.y + dy, DESK_WIDTH, DESK_DEPTH));
                }
            }
        }
    }
    ClassroomMap::new(w, h, obstacles, thirds(w, h))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub duration: f64,
    pub interval: f64,
    pub walk_speed: f64,
    pub dwell_mean: f64,
    /// Probability that a lecture waypoint is the front of the room.
    pub front_bias: f64,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            duration: 3000.0,
            interval: 2.0,
            walk_speed: 0.8,
            dwell_mean: 40.0,
            front_bias: 0.5,
            seed: 0,
        }
    }
}

impl SimParams {
    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !(positive(self.duration)
            && positive(self.interval)
            && positive(self.walk_speed)
            && positive(self.dwell_mean))
        {
            return Err(Error::invalid(
                "duration, interval, walk speed and dwell mean must be positive",
            ));
        }
        if !(0.0..=1.0).contains(&self.front_bias) {
            return Err(Error::invalid("front bias must lie in [0, 1]"));
        }
        if self.duration / self.interval > 10_000_000.0 {
            return Err(Error::invalid("session would exceed 10 million samples"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Phase {
    Walk {
        from: Point,
        to: Point,
        start: f64,
        end: f64,
        heading: f64,
    },
    Dwell {
        at: Point,
        start: f64,
        end: f64,
        heading: f64,
    },
}

impl Phase {
    fn end(&self) -> f64 {
        match *self {
            Phase::Walk { end, .. } | Phase::Dwell { end, .. } => end,
        }
    }

    fn state_at(&self, t: f64) -> (Point, f64) {
        match *self {
            Phase::Walk {
                from,
                to,
                start,
                end,
                heading,
            } => {
                let f = ((t - start) / (end - start)).clamp(0.0, 1.0);
                (
                    Point::new(from.x + f * (to.x - from.x), from.y + f * (to.y - from.y)),
                    heading,
                )
            }
            Phase::Dwell { at, heading, .. } => (at, heading),
        }
    }
}

fn centroid(poly: &[Point]) -> Point {
    let n = poly.len() as f64;
    let (sx, sy) = poly.iter().fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
    Point::new(sx / n, sy / n)
}

/// Waypoints the teacher can choose from, derived from the map.
struct Targets {
    desks: Vec<Point>,
    /// Lecture: aisle points beside desks. Teamwork: cluster centers.
    stations: Vec<Point>,
}

fn targets(map: &ClassroomMap, kind: LayoutKind) -> Targets {
    let centers: Vec<Point> = map.obstacles.iter().map(|o| centroid(o)).collect();
    // Obstacles hugging the front wall (the board) are not desks.
    let desks: Vec<Point> = centers
        .into_iter()
        .filter(|c| map.height - c.y > 0.5)
        .collect();
    let stations = match kind {
        LayoutKind::Lecture => desks
            .iter()
            .map(|d| Point::new(d.x, (d.y + AISLE_OFFSET).min(map.height)))
            .collect(),
        LayoutKind::Teamwork => desks
            .chunks(DESKS_PER_CLUSTER)
            .map(|group| centroid(group))
            .collect(),
    };
    Targets { desks, stations }
}

fn clamp_to(map: &ClassroomMap, p: Point) -> Point {
    Point::new(p.x.clamp(0.0, map.width), p.y.clamp(0.0, map.height))
}

/// Builds the walk/dwell schedule covering `[0, duration]`.
pub(crate) fn plan_session(map: &ClassroomMap, kind: LayoutKind, params: &SimParams) -> Result<Vec<Phase>> {
    params.validate()?;
    let targets = targets(map, kind);
    let mut rng = SplitMix64::new(params.seed);
    let front_y = (map.height - FRONT_STANDOFF).max(0.0);

    let mut pos = match kind {
        LayoutKind::Lecture => Point::new(map.width / 2.0, front_y),
        LayoutKind::Teamwork => Point::new(map.width / 2.0, map.height / 2.0),
    };
    // Facing the back of the room.
    let mut heading = 3.0 * FRAC_PI_2;
    let mut t = 0.0;
    let mut phases = Vec::new();

    while t <= params.duration {
        let target = match kind {
            LayoutKind::Lecture => {
                let choice = rng.next_f64();
                let pick = rng.next_f64();
                if choice < params.front_bias || targets.stations.is_empty() {
                    Point::new(map.width * (0.3 + 0.4 * pick), front_y)
                } else {
                    let n = targets.stations.len();
                    targets.stations[((pick * n as f64) as usize).min(n - 1)]
                }
            }
            LayoutKind::Teamwork => {
                if targets.stations.is_empty() {
                    Point::new(map.width / 2.0, map.height / 2.0)
                } else {
                    targets.stations[rng.index(targets.stations.len())]
                }
            }
        };
        let target = clamp_to(map, target);

        let dist = pos.distance(target);
        if dist > 1e-9 {
            heading = normalize_heading((target.y - pos.y).atan2(target.x - pos.x))?;
            let end = t + dist / params.walk_speed;
            phases.push(Phase::Walk {
                from: pos,
                to: target,
                start: t,
                end,
                heading,
            });
            t = end;
            pos = target;
        }

        let dwell = -params.dwell_mean * (1.0 - rng.next_f64()).ln();
        if let Some(desk) = targets
            .desks
            .iter()
            .min_by(|a, b| a.distance(pos).total_cmp(&b.distance(pos)))
        {
            if desk.distance(pos) > 1e-9 {
                heading = normalize_heading((desk.y - pos.y).atan2(desk.x - pos.x))?;
            }
        }
        phases.push(Phase::Dwell {
            at: pos,
            start: t,
            end: t + dwell,
            heading,
        });
        t += dwell;
    }
    Ok(phases)
}

/// Samples a synthetic session every `interval` seconds over
/// `[0, duration]`, both ends included.
///
/// Lecture targets are the front of the room (probability `front_bias`) or
/// an aisle point beside a uniformly chosen desk; teamwork targets are
/// uniformly chosen cluster centers, where a cluster is each consecutive run
/// of five obstacles in map order. Per waypoint the stream yields the
/// target draws (two for lecture, one for teamwork), then one dwell draw.
pub fn simulate_session(map: &ClassroomMap, kind: LayoutKind, params: &SimParams) -> Result<Track> {
    let phases = plan_session(map, kind, params)?;
    let n = (params.duration / params.interval + 1e-9).floor() as usize;
    let mut samples = Vec::with_capacity(n + 1);
    let mut phase = 0;
    for k in 0..=n {
        let t = k as f64 * params.interval;
        while phase + 1 < phases.len() && phases[phase].end() < t {
            phase += 1;
        }
        let (p, heading) = phases[phase].state_at(t);
        let p = clamp_to(map, p);
        samples.push(TrackSample::new(t, p.x, p.y, heading));
    }
    Ok(Track {
        samples,
        interval: Some(params.interval),
        segment_breaks: Vec::new(),
        meta: TrackMeta {
            session_id: format!("{kind}-seed{}", params.seed),
            subject_id: "teacher".to_string(),
            session_duration: params.duration,
        },
    })
}

/// Fraction of samples whose position falls in the zone named `name`.
pub fn zone_fraction(track: &Track, map: &ClassroomMap, name: &str) -> f64 {
    let Some(zone) = map.zones.iter().position(|z| z.name == name) else {
        return 0.0;
    };
    if track.is_empty() {
        return 0.0;
    }
    let hits = track
        .samples
        .iter()
        .filter(|s| map.zone_of(s.position()) == Some(zone))
        .count();
    hits as f64 / track.len() as f64
}
