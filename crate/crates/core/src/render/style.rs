use std::collections::BTreeMap;

use serde::Deserialize;

use super::color::{ColorMap, ColorStop};
use crate::error::{Error, Result};
use crate::geometry::SpotlightParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coding {
    #[default]
    Time,
    Label,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrokeStyle {
    pub rgb: [u8; 3],
    pub width_px: f64,
    pub opacity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub spotlight: SpotlightParams,
    /// Per-spotlight fill opacity in `(0, 1]`.
    pub alpha: f64,
    pub coding: Coding,
    /// Ramp used for time coding.
    pub colormap: ColorMap,
    /// Palette used for label coding.
    pub palette: ColorMap,
    pub trajectory: StrokeStyle,
    pub room_fill: [u8; 3],
    pub obstacle_fill: [u8; 3],
    pub canvas: [u8; 3],
    /// Sub-samples per pixel axis: 1, 2, 4 or 8.
    pub supersample: u32,
    /// Legend names for label codes.
    pub label_names: BTreeMap<u32, String>,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            spotlight: SpotlightParams::default(),
            alpha: 0.12,
            coding: Coding::Time,
            colormap: ColorMap::default_continuous(),
            palette: ColorMap::default_categorical(),
            trajectory: StrokeStyle {
                rgb: [40, 40, 40],
                width_px: 1.5,
                opacity: 0.6,
            },
            room_fill: [246, 246, 246],
            obstacle_fill: [205, 205, 205],
            canvas: [255, 255, 255],
            supersample: 4,
            label_names: BTreeMap::new(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StyleFile {
    length_m: Option<f64>,
    half_angle_deg: Option<f64>,
    alpha: Option<f64>,
    coding: Option<Coding>,
    colormap: Option<ColormapFile>,
    trajectory: Option<TrajectoryFile>,
    supersample: Option<u32>,
    labels: Option<BTreeMap<u32, String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ColormapFile {
    stops: Option<Vec<ColorStop>>,
    palette: Option<Vec<[u8; 3]>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryFile {
    rgb: Option<[u8; 3]>,
    width_px: Option<f64>,
    opacity: Option<f64>,
}

impl Style {
    pub fn validate(&self) -> Result<()> {
        self.spotlight.validate()?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if ![1, 2, 4, 8].contains(&self.supersample) {
            return Err(Error::invalid(format!(
                "supersample must be 1, 2, 4 or 8, got {}",
                self.supersample
            )));
        }
        let t = &self.trajectory;
        if !(t.width_px.is_finite() && t.width_px >= 0.0 && (0.0..=1.0).contains(&t.opacity)) {
            return Err(Error::invalid("trajectory width must be ≥ 0 and opacity in [0, 1]"));
        }
        if !matches!(self.colormap, ColorMap::Continuous(_)) {
            return Err(Error::invalid("time coding requires a continuous colormap"));
        }
        Ok(())
    }

    /// Overlays the keys present in a JSON style file onto `self`.
    pub fn merge_json(&mut self, text: &str) -> Result<()> {
        let file: StyleFile = serde_json::from_str(text)
            .map_err(|e| Error::parse(e.line(), format!("style file: {e}")))?;
        if let Some(l) = file.length_m {
            self.spotlight.length = l;
        }
        if let Some(deg) = file.half_angle_deg {
            self.spotlight.half_angle = deg.to_radians();
        }
        if let Some(a) = file.alpha {
            self.alpha = a;
        }
        if let Some(c) = file.coding {
            self.coding = c;
        }
        if let Some(cm) = file.colormap {
            if let Some(stops) = cm.stops {
                self.colormap = ColorMap::continuous(stops)?;
            }
            if let Some(palette) = cm.palette {
                self.palette = ColorMap::categorical(palette)?;
            }
        }
        if let Some(t) = file.trajectory {
            if let Some(rgb) = t.rgb {
                self.trajectory.rgb = rgb;
            }
            if let Some(w) = t.width_px {
                self.trajectory.width_px = w;
            }
            if let Some(o) = t.opacity {
                self.trajectory.opacity = o;
            }
        }
        if let Some(s) = file.supersample {
            self.supersample = s;
        }
        if let Some(labels) = file.labels {
            self.label_names = labels;
        }
        self.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        Style::default().validate().unwrap();
    }

    #[test]
    fn style_file_overrides() {
        let mut style = Style::default();
        style
            .merge_json(
                r#"{"length_m": 1.2, "half_angle_deg": 30, "alpha": 0.2, "coding": "label",
                    "colormap": {"palette": [[1,2,3]]},
                    "trajectory": {"width_px": 3}, "supersample": 2,
                    "labels": {"0": "lecturing"}}"#,
            )
            .unwrap();
        assert_eq!(style.spotlight.length, 1.2);
        assert!((style.spotlight.half_angle - 30f64.to_radians()).abs() < 1e-15);
        assert_eq!(style.coding, Coding::Label);
        assert_eq!(style.palette, ColorMap::Categorical(vec![[1, 2, 3]]));
        assert_eq!(style.trajectory.width_px, 3.0);
        assert_eq!(style.trajectory.opacity, 0.6);
        assert_eq!(style.label_names[&0], "lecturing");
    }

    #[test]
    fn style_file_rejects_bad_values() {
        assert!(Style::default().merge_json(r#"{"alpha": 0}"#).is_err());
        assert!(Style::default().merge_json(r#"{"supersample": 3}"#).is_err());
        assert!(Style::default().merge_json(r#"{"bogus": 1}"#).is_err());
        assert!(Style::default()
            .merge_json(r#"{"colormap": {"stops": [{"pos": 0.5, "rgb": [0,0,0]}]}}"#)
            .is_err());
    }
}
