use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{normalize_heading, HeadingUnit, Track, TrackFormat, TrackMeta, TrackSample};
use crate::error::{Error, Result};

const HEADER: [&str; 4] = ["t", "x", "y", "heading"];

/// Reads a track in file order. Headings are converted to radians and
/// wrapped into `[0, 2π)`; no resampling or segmentation happens here.
pub fn parse_track(raw: impl Read, format: TrackFormat, unit: HeadingUnit) -> Result<Track> {
    let mut text = String::new();
    let mut raw = raw;
    raw.read_to_string(&mut text).map_err(|e| {
        if e.kind() == std::io::ErrorKind::InvalidData {
            Error::parse(0, "input is not valid UTF-8")
        } else {
            Error::parse(0, e.to_string())
        }
    })?;
    match format {
        TrackFormat::Csv => parse_csv(&text, unit),
        TrackFormat::Json => parse_json(&text, unit),
    }
}

fn to_radians(value: f64, unit: HeadingUnit, record: usize) -> Result<f64> {
    let rad = match unit {
        HeadingUnit::Radians => value,
        HeadingUnit::Degrees => value.to_radians(),
    };
    normalize_heading(rad).map_err(|_| Error::parse(record, "heading is not finite"))
}

fn parse_csv(text: &str, unit: HeadingUnit) -> Result<Track> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| Error::parse(1, e.to_string()))?,
        None => return Err(Error::EmptyTrack),
    };
    let names: Vec<&str> = header.iter().collect();
    let has_label = match names.as_slice() {
        [t, x, y, h] if [*t, *x, *y, *h] == HEADER => false,
        [t, x, y, h, "label"] if [*t, *x, *y, *h] == HEADER => true,
        _ => {
            return Err(Error::parse(
                1,
                format!("expected header t,x,y,heading[,label], found {}", names.join(",")),
            ))
        }
    };
    let arity = if has_label { 5 } else { 4 };

    let mut samples = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let record = rec.position().map_or(samples.len() + 2, |p| p.line() as usize);
        if rec.len() != arity {
            return Err(Error::parse(
                record,
                format!("expected {arity} fields, found {}", rec.len()),
            ));
        }
        let num = |i: usize, name: &str| -> Result<f64> {
            let v: f64 = rec[i]
                .parse()
                .map_err(|_| Error::parse(record, format!("{name} {:?} is not a number", &rec[i])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::parse(record, format!("{name} is not finite")))
            }
        };
        let t = num(0, "t")?;
        if t < 0.0 {
            return Err(Error::parse(record, "t must be non-negative"));
        }
        let x = num(1, "x")?;
        let y = num(2, "y")?;
        let heading = to_radians(num(3, "heading")?, unit, record)?;
        let label = if has_label && !rec[4].is_empty() {
            Some(rec[4].parse::<u32>().map_err(|_| {
                Error::parse(record, format!("label {:?} is not a small integer", &rec[4]))
            })?)
        } else {
            None
        };
        samples.push(TrackSample {
            t,
            x,
            y,
            heading,
            label,
        });
    }
    if samples.is_empty() {
        return Err(Error::EmptyTrack);
    }
    Ok(Track::new(samples))
}

#[derive(Serialize, Deserialize)]
struct TrackFile {
    #[serde(default)]
    meta: Option<TrackMeta>,
    #[serde(default)]
    interval: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    segment_breaks: Vec<usize>,
    samples: Vec<TrackSample>,
}

fn parse_json(text: &str, unit: HeadingUnit) -> Result<Track> {
    let file: TrackFile =
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    if file.samples.is_empty() {
        return Err(Error::EmptyTrack);
    }
    let mut samples = file.samples;
    for (i, s) in samples.iter_mut().enumerate() {
        let record = i + 1;
        if ![s.t, s.x, s.y].iter().all(|v| v.is_finite()) {
            return Err(Error::parse(record, "non-finite field"));
        }
        if s.t < 0.0 {
            return Err(Error::parse(record, "t must be non-negative"));
        }
        s.heading = to_radians(s.heading, unit, record)?;
    }
    if let Some(iv) = file.interval {
        if !(iv.is_finite() && iv > 0.0) {
            return Err(Error::parse(0, "interval must be positive"));
        }
    }
    if let Some(&bad) = file
        .segment_breaks
        .iter()
        .find(|&&b| b == 0 || b >= samples.len())
    {
        return Err(Error::parse(0, format!("segment break {bad} out of range")));
    }
    let mut track = Track::new(samples);
    track.interval = file.interval;
    track.segment_breaks = file.segment_breaks;
    if let Some(meta) = file.meta {
        track.meta = meta;
    }
    Ok(track)
}

/// Writes `t,x,y,heading[,label]` with headings in radians. The label column
/// is present when any sample carries a label.
pub fn write_track_csv(track: &Track, out: &mut impl Write) -> std::io::Result<()> {
    let labelled = track.samples.iter().any(|s| s.label.is_some());
    if labelled {
        out.write_all(b"t,x,y,heading,label\n")?;
    } else {
        out.write_all(b"t,x,y,heading\n")?;
    }
    for s in &track.samples {
        write!(out, "{},{},{},{}", s.t, s.x, s.y, s.heading)?;
        if labelled {
            match s.label {
                Some(l) => write!(out, ",{l}")?,
                None => out.write_all(b",")?,
            }
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_track_json(track: &Track, out: &mut impl Write) -> std::io::Result<()> {
    let file = TrackFile {
        meta: Some(track.meta.clone()),
        interval: track.interval,
        segment_breaks: track.segment_breaks.clone(),
        samples: track.samples.clone(),
    };
    serde_json::to_writer_pretty(&mut *out, &file)?;
    out.write_all(b"\n")
}

pub fn write_track(track: &Track, format: TrackFormat, out: &mut impl Write) -> std::io::Result<()> {
    match format {
        TrackFormat::Csv => write_track_csv(track, out),
        TrackFormat::Json => write_track_json(track, out),
    }
}
