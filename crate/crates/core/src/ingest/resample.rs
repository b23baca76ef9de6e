use super::{normalize_heading, short_arc, Track, TrackSample};
use crate::error::{Error, Result};

/// Tolerance for snapping grid times onto input sample times.
const SNAP_EPS: f64 = 1e-9;

/// Resamples onto the grid `k · interval`, `k ∈ [ceil(t_first/interval),
/// floor(t_last/interval)]`.
///
/// Positions are interpolated linearly and headings along the shorter arc.
/// Input gaps longer than `max_gap` are not bridged: no grid points are
/// synthesized inside them and a segment break is recorded at the first
/// output sample after the gap. Labels come from the earlier bracketing
/// sample.
pub fn resample_uniform(track: &Track, interval: f64, max_gap: f64) -> Result<Track> {
    if !(interval.is_finite() && interval > 0.0) {
        return Err(Error::invalid(format!("interval must be positive, got {interval}")));
    }
    if !(max_gap.is_finite() && max_gap >= interval) {
        return Err(Error::invalid(format!(
            "max_gap ({max_gap}) must be at least the interval ({interval})"
        )));
    }
    let input = &track.samples;
    if input.is_empty() {
        return Err(Error::EmptyTrack);
    }
    if let Some(i) = input.windows(2).position(|w| w[1].t <= w[0].t) {
        return Err(Error::invalid(format!(
            "sample times must be strictly increasing (sample {})",
            i + 1
        )));
    }

    let t_first = input[0].t;
    let t_last = input[input.len() - 1].t;
    let k_first = (t_first / interval - SNAP_EPS).ceil() as i64;
    let k_last = (t_last / interval + SNAP_EPS).floor() as i64;

    let mut samples = Vec::new();
    let mut breaks = Vec::new();
    let mut pending_break = false;
    let mut pair = 0usize;

    for k in k_first..=k_last {
        let t = k as f64 * interval;
        while pair + 1 < input.len() && input[pair + 1].t < t - SNAP_EPS {
            pair += 1;
        }
        let a = &input[pair];
        let sample = if (t - a.t).abs() <= SNAP_EPS {
            TrackSample { t, ..*a }
        } else if pair + 1 < input.len() && (input[pair + 1].t - t).abs() <= SNAP_EPS {
            TrackSample { t, ..input[pair + 1] }
        } else if pair + 1 < input.len() {
            let b = &input[pair + 1];
            if b.t - a.t > max_gap {
                pending_break = true;
                continue;
            }
            let f = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
            TrackSample {
                t,
                x: a.x + f * (b.x - a.x),
                y: a.y + f * (b.y - a.y),
                heading: normalize_heading(a.heading + f * short_arc(a.heading, b.heading))?,
                label: a.label,
            }
        } else {
            // Only reachable through float slop at the tail of the range.
            TrackSample { t, ..*a }
        };
        if pending_break && !samples.is_empty() {
            breaks.push(samples.len());
        }
        pending_break = false;
        samples.push(sample);
    }

    if samples.is_empty() {
        return Err(Error::EmptyTrack);
    }
    Ok(Track {
        samples,
        interval: Some(interval),
        segment_breaks: breaks,
        meta: track.meta.clone(),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{PI, TAU};

    use proptest::prelude::*;

    use super::*;

    fn track(rows: &[(f64, f64, f64, f64)]) -> Track {
        Track::new(
            rows.iter()
                .map(|&(t, x, y, h)| TrackSample::new(t, x, y, h))
                .collect(),
        )
    }

    #[test]
    fn interpolates_position() {
        let out = resample_uniform(&track(&[(0.0, 0.0, 0.0, 0.0), (4.0, 2.0, 0.0, 0.0)]), 2.0, 6.0)
            .unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(out.samples[1].t, 2.0);
        assert_eq!((out.samples[1].x, out.samples[1].y), (1.0, 0.0));
        assert_eq!(out.interval, Some(2.0));
    }

    #[test]
    fn heading_takes_short_arc_over_seam() {
        let out = resample_uniform(&track(&[(0.0, 0.0, 0.0, 6.1), (2.0, 0.0, 0.0, 0.2)]), 1.0, 3.0)
            .unwrap();
        // Frozen from lifting 0.2 to 0.2 + 2π, interpolating, and rewrapping.
        let expected = (6.1 + 0.5 * (0.2 + TAU - 6.1)) - TAU;
        assert!((out.samples[1].heading - expected).abs() < 1e-12);
        assert!((out.samples[1].heading - 0.0084).abs() < 1e-4);
    }

    #[test]
    fn long_gap_is_not_bridged() {
        let out = resample_uniform(
            &track(&[(0.0, 0.0, 0.0, 0.0), (12.0, 1.0, 0.0, 0.0)]),
            2.0,
            6.0,
        )
        .unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.samples[1].t, 12.0);
        assert_eq!(out.segment_breaks, vec![1]);
    }

    #[test]
    fn short_gap_is_bridged() {
        let out = resample_uniform(&track(&[(0.0, 0.0, 0.0, 0.0), (6.0, 3.0, 0.0, 0.0)]), 2.0, 6.0)
            .unwrap();
        assert_eq!(out.len(), 4);
        assert!(out.segment_breaks.is_empty());
    }

    #[test]
    fn grid_is_origin_aligned() {
        let out = resample_uniform(
            &track(&[(0.5, 0.0, 0.0, 0.0), (4.5, 4.0, 0.0, 0.0)]),
            2.0,
            6.0,
        )
        .unwrap();
        let ts: Vec<f64> = out.samples.iter().map(|s| s.t).collect();
        assert_eq!(ts, vec![2.0, 4.0]);
        assert!((out.samples[0].x - 1.5).abs() < 1e-12);
    }

    #[test]
    fn labels_from_earlier_sample() {
        let mut t = track(&[(0.0, 0.0, 0.0, 0.0), (4.0, 2.0, 0.0, 0.0)]);
        t.samples[0].label = Some(1);
        t.samples[1].label = Some(2);
        let out = resample_uniform(&t, 2.0, 6.0).unwrap();
        let labels: Vec<_> = out.samples.iter().map(|s| s.label).collect();
        assert_eq!(labels, vec![Some(1), Some(1), Some(2)]);
    }

    #[test]
    fn rejects_bad_params() {
        let t = track(&[(0.0, 0.0, 0.0, 0.0), (4.0, 2.0, 0.0, 0.0)]);
        assert!(matches!(resample_uniform(&t, 0.0, 6.0), Err(Error::InvalidParams(_))));
        assert!(matches!(resample_uniform(&t, -1.0, 6.0), Err(Error::InvalidParams(_))));
        assert!(matches!(resample_uniform(&t, 2.0, 1.0), Err(Error::InvalidParams(_))));
        assert!(matches!(
            resample_uniform(&Track::default(), 2.0, 6.0),
            Err(Error::EmptyTrack)
        ));
        let unordered = track(&[(4.0, 0.0, 0.0, 0.0), (2.0, 2.0, 0.0, 0.0)]);
        assert!(resample_uniform(&unordered, 2.0, 6.0).is_err());
    }

    fn irregular_track() -> impl Strategy<Value = Track> {
        prop::collection::vec((0.05..5.0f64, -5.0..5.0f64, -5.0..5.0f64, 0.0..TAU), 2..60)
            .prop_map(|rows| {
                let mut t = 0.0;
                Track::new(
                    rows.into_iter()
                        .map(|(dt, x, y, h)| {
                            t += dt;
                            TrackSample::new(t, x, y, h)
                        })
                        .collect(),
                )
            })
    }

    proptest! {
        #[test]
        fn output_is_uniform_and_wrapped(t in irregular_track(), iv in 0.2..3.0f64) {
            let Ok(out) = resample_uniform(&t, iv, 3.0 * iv) else { return Ok(()); };
            for s in &out.samples {
                prop_assert!((0.0..TAU).contains(&s.heading));
            }
            for seg in out.segments() {
                for w in out.samples[seg].windows(2) {
                    prop_assert!((w[1].t - w[0].t - iv).abs() <= 1e-9);
                }
            }
            for w in out.samples.windows(2) {
                prop_assert!(w[1].t > w[0].t);
            }
            for &b in &out.segment_breaks {
                prop_assert!(b > 0 && b < out.len());
            }
        }

        #[test]
        fn idempotent_on_uniform_tracks(t in irregular_track(), iv in 0.2..3.0f64) {
            let Ok(once) = resample_uniform(&t, iv, 3.0 * iv) else { return Ok(()); };
            let twice = resample_uniform(&once, iv, 3.0 * iv).unwrap();
            prop_assert_eq!(once.len(), twice.len());
            prop_assert_eq!(&once.segment_breaks, &twice.segment_breaks);
            for (a, b) in once.samples.iter().zip(&twice.samples) {
                prop_assert!((a.t - b.t).abs() <= 1e-9);
                prop_assert!((a.x - b.x).abs() <= 1e-9);
                prop_assert!((a.y - b.y).abs() <= 1e-9);
                prop_assert!(short_arc(a.heading, b.heading).abs() <= 1e-9);
            }
        }

        #[test]
        fn endpoints_on_grid_are_preserved(k0 in 0u32..20, steps in prop::collection::vec(1u32..3, 1..20)) {
            let iv = 2.0;
            let mut k = k0;
            let mut rows = vec![(k as f64 * iv, 0.0, 0.0, 0.0)];
            for s in steps {
                k += s;
                rows.push((k as f64 * iv, k as f64, 1.0, PI));
            }
            let t = track(&rows);
            let out = resample_uniform(&t, iv, 3.0 * iv).unwrap();
            prop_assert_eq!(out.samples[0], t.samples[0]);
            prop_assert_eq!(*out.samples.last().unwrap(), *t.samples.last().unwrap());
        }
    }
}
