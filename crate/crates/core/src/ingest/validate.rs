use std::f64::consts::TAU;
use std::fmt;

use serde::Serialize;

use super::{ClassroomMap, Track};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IssueKind {
    OutOfBounds,
    NonFinite,
    TimeOrder,
    SpeedJump,
    HeadingRange,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationIssue {
    pub kind: IssueKind,
    pub sample_index: usize,
    pub detail: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} @ sample {}: {}", self.kind, self.sample_index, self.detail)
    }
}

/// Reports every data problem in `track`. Issues are data, not failures:
/// an empty result means the track is clean.
///
/// Speed jumps are flagged rather than rejected since decimeter-level
/// positioning noise makes isolated jumps expected.
pub fn validate_track(track: &Track, map: &ClassroomMap, max_speed: f64) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    let mut push = |kind, sample_index, detail: String| {
        issues.push(ValidationIssue {
            kind,
            sample_index,
            detail,
        })
    };

    for (i, s) in track.samples.iter().enumerate() {
        if ![s.t, s.x, s.y, s.heading].iter().all(|v| v.is_finite()) {
            push(
                IssueKind::NonFinite,
                i,
                format!("t={} x={} y={} heading={}", s.t, s.x, s.y, s.heading),
            );
            continue;
        }
        if !map.contains(s.position()) {
            push(
                IssueKind::OutOfBounds,
                i,
                format!(
                    "({}, {}) outside {}x{} m room",
                    s.x, s.y, map.width, map.height
                ),
            );
        }
        if !(0.0..TAU).contains(&s.heading) {
            push(IssueKind::HeadingRange, i, format!("heading {} not in [0, 2π)", s.heading));
        }
        if s.t < 0.0 {
            push(IssueKind::TimeOrder, i, format!("negative time {}", s.t));
        }
        if i == 0 {
            continue;
        }
        let prev = &track.samples[i - 1];
        if !prev.t.is_finite() || !prev.x.is_finite() || !prev.y.is_finite() {
            continue;
        }
        let dt = s.t - prev.t;
        if dt <= 0.0 {
            push(
                IssueKind::TimeOrder,
                i,
                format!("t={} does not follow t={}", s.t, prev.t),
            );
            continue;
        }
        let speed = (s.x - prev.x).hypot(s.y - prev.y) / dt;
        if speed > max_speed {
            push(
                IssueKind::SpeedJump,
                i,
                format!("{speed:.3} m/s exceeds {max_speed} m/s"),
            );
        }
    }
    issues
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::TrackSample;

    fn room() -> ClassroomMap {
        ClassroomMap::empty(10.0, 8.0).unwrap()
    }

    #[test]
    fn flags_out_of_bounds() {
        let t = Track::new(vec![
            TrackSample::new(0.0, 1.0, 1.0, 0.0),
            TrackSample::new(200.0, 100.0, 5.0, 0.0),
        ]);
        let issues = validate_track(&t, &room(), 3.0);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].kind, IssueKind::OutOfBounds);
        assert_eq!(issues[0].sample_index, 1);
    }

    #[test]
    fn flags_speed_jump() {
        let t = Track::new(vec![
            TrackSample::new(0.0, 1.0, 1.0, 0.0),
            TrackSample::new(2.0, 9.0, 1.0, 0.0),
        ]);
        let issues = validate_track(&t, &room(), 2.5);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].kind, IssueKind::SpeedJump);
        assert!(validate_track(&t, &room(), 4.5).is_empty());
    }

    #[test]
    fn clean_walk_has_no_issues() {
        let t = Track::new(
            (0..20)
                .map(|i| TrackSample::new(2.0 * i as f64, 1.0 + 0.4 * i as f64, 4.0, 0.0))
                .collect(),
        );
        assert!(validate_track(&t, &room(), 3.0).is_empty());
    }

    #[test]
    fn flags_order_heading_and_nan() {
        let t = Track::new(vec![
            TrackSample::new(4.0, 1.0, 1.0, 7.0),
            TrackSample::new(2.0, 1.0, 1.0, 0.0),
            TrackSample::new(6.0, f64::NAN, 1.0, 0.0),
        ]);
        let kinds: Vec<_> = validate_track(&t, &room(), 3.0)
            .into_iter()
            .map(|i| (i.kind, i.sample_index))
            .collect();
        assert_eq!(
            kinds,
            vec![
                (IssueKind::HeadingRange, 0),
                (IssueKind::TimeOrder, 1),
                (IssueKind::NonFinite, 2)
            ]
        );
    }
}
