use std::collections::BTreeSet;

use super::color::{color_for, ColorMap, Paint};
use super::style::{Coding, Style};
use crate::error::Result;
use crate::geometry::{spotlight_triangle, trajectory_polylines, world_to_screen, Point, Viewport};
use crate::ingest::{ClassroomMap, Track};

/// Drawing layers, back to front. The baseline heatmap reuses the
/// `Spotlights` slot for its density cells and `Trajectories` for obstacle
/// outlines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LayerKind {
    Background,
    Obstacles,
    Spotlights,
    Trajectories,
    Legend,
}

impl LayerKind {
    pub const ALL: [LayerKind; 5] = [
        LayerKind::Background,
        LayerKind::Obstacles,
        LayerKind::Spotlights,
        LayerKind::Trajectories,
        LayerKind::Legend,
    ];

    pub fn id(self) -> &'static str {
        match self {
            LayerKind::Background => "background",
            LayerKind::Obstacles => "obstacles",
            LayerKind::Spotlights => "spotlights",
            LayerKind::Trajectories => "trajectories",
            LayerKind::Legend => "legend",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextAnchor {
    Start,
    End,
}

/// Screen-space (pixel) drawing primitive.
#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Polygon {
        points: Vec<Point>,
        fill: Paint,
    },
    Polyline {
        points: Vec<Point>,
        stroke: Paint,
        width: f64,
    },
    Text {
        at: Point,
        text: String,
        size: f64,
        fill: Paint,
        anchor: TextAnchor,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub viewport: Viewport,
    /// Canvas color behind every layer.
    pub background: [u8; 3],
    layers: [Vec<Primitive>; 5],
}

impl Scene {
    pub fn new(viewport: Viewport, background: [u8; 3]) -> Self {
        Self {
            viewport,
            background,
            layers: Default::default(),
        }
    }

    pub fn push(&mut self, layer: LayerKind, primitive: Primitive) {
        self.layers[layer as usize].push(primitive);
    }

    pub fn layer(&self, layer: LayerKind) -> &[Primitive] {
        &self.layers[layer as usize]
    }

    /// All primitives in draw order.
    pub fn primitives(&self) -> impl Iterator<Item = &Primitive> {
        self.layers.iter().flatten()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.iter().all(Vec::is_empty)
    }

    pub(crate) fn to_screen(&self, pts: &[Point]) -> Vec<Point> {
        pts.iter().map(|&p| world_to_screen(p, &self.viewport)).collect()
    }

    /// Room rectangle and furniture polygons.
    pub(crate) fn push_room(&mut self, map: &ClassroomMap, room: Paint, obstacles: Paint) {
        let corners = [
            Point::new(0.0, 0.0),
            Point::new(map.width, 0.0),
            Point::new(map.width, map.height),
            Point::new(0.0, map.height),
        ];
        let points = self.to_screen(&corners);
        self.push(LayerKind::Background, Primitive::Polygon { points, fill: room });
        for poly in &map.obstacles {
            let points = self.to_screen(poly);
            self.push(LayerKind::Obstacles, Primitive::Polygon { points, fill: obstacles });
        }
    }

    /// Top-left corner of the legend band, below the room.
    pub(crate) fn legend_origin(&self) -> Point {
        let vp = &self.viewport;
        let h = vp.pixel_height as f64;
        let m = vp.margin as f64;
        let y = if m >= 32.0 { h - m + 6.0 } else { h - 30.0 };
        Point::new(m.max(4.0), y)
    }

    /// Horizontal color ramp with labels at both ends.
    pub(crate) fn push_ramp_legend(&mut self, colormap: &ColorMap, left: &str, right: &str) {
        const STEPS: usize = 64;
        const WIDTH: f64 = 256.0;
        const HEIGHT: f64 = 10.0;
        let o = self.legend_origin();
        let w = WIDTH / STEPS as f64;
        for i in 0..STEPS {
            let x0 = o.x + i as f64 * w;
            let u = (i as f64 + 0.5) / STEPS as f64;
            self.push(
                LayerKind::Legend,
                Primitive::Polygon {
                    points: rect(x0, o.y, x0 + w, o.y + HEIGHT),
                    fill: Paint::opaque(colormap.sample(u)),
                },
            );
        }
        self.push_text(Point::new(o.x, o.y + HEIGHT + 12.0), left, TextAnchor::Start);
        self.push_text(Point::new(o.x + WIDTH, o.y + HEIGHT + 12.0), right, TextAnchor::End);
    }

    pub(crate) fn push_text(&mut self, at: Point, text: &str, anchor: TextAnchor) {
        self.push(
            LayerKind::Legend,
            Primitive::Text {
                at,
                text: text.to_string(),
                size: 11.0,
                fill: Paint::opaque([60, 60, 60]),
                anchor,
            },
        );
    }
}

pub(crate) fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point> {
    vec![
        Point::new(x0, y0),
        Point::new(x1, y0),
        Point::new(x1, y1),
        Point::new(x0, y1),
    ]
}

/// `m:ss` for a time in seconds.
pub fn format_clock(seconds: f64) -> String {
    let total = seconds.max(0.0).floor() as u64;
    format!("{}:{:02}", total / 60, total % 60)
}

/// Assembles a Dandelion diagram: room and furniture, one translucent
/// spotlight per sample in time order, per-segment trajectories on top,
/// and a legend for the color coding.
pub fn build_scene(track: &Track, map: &ClassroomMap, style: &Style, vp: &Viewport) -> Result<Scene> {
    style.validate()?;
    let mut scene = Scene::new(*vp, style.canvas);
    scene.push_room(
        map,
        Paint::opaque(style.room_fill),
        Paint::opaque(style.obstacle_fill),
    );

    for (i, sample) in track.samples.iter().enumerate() {
        let mut unit = spotlight_triangle(sample, &style.spotlight)?;
        unit.color = color_for(sample, track, style)?;
        unit.source_index = i;
        let points = scene.to_screen(&unit.vertices());
        scene.push(
            LayerKind::Spotlights,
            Primitive::Polygon {
                points,
                fill: Paint {
                    rgb: unit.color.rgb(),
                    alpha: style.alpha,
                },
            },
        );
    }

    let stroke = Paint {
        rgb: style.trajectory.rgb,
        alpha: style.trajectory.opacity,
    };
    if style.trajectory.width_px > 0.0 && style.trajectory.opacity > 0.0 {
        for line in trajectory_polylines(track) {
            let points = scene.to_screen(&line);
            scene.push(
                LayerKind::Trajectories,
                Primitive::Polyline {
                    points,
                    stroke,
                    width: style.trajectory.width_px,
                },
            );
        }
    }

    match style.coding {
        Coding::Time => {
            let (t0, t1) = track.time_span().unwrap_or((0.0, 0.0));
            scene.push_ramp_legend(&style.colormap, &format_clock(t0), &format_clock(t1));
        }
        Coding::Label => {
            let labels: BTreeSet<u32> = track.samples.iter().filter_map(|s| s.label).collect();
            let o = scene.legend_origin();
            let mut x = o.x;
            for label in labels {
                scene.push(
                    LayerKind::Legend,
                    Primitive::Polygon {
                        points: rect(x, o.y, x + 10.0, o.y + 10.0),
                        fill: Paint::opaque(style.palette.for_label(label)),
                    },
                );
                let name = style
                    .label_names
                    .get(&label)
                    .cloned()
                    .unwrap_or_else(|| format!("label {label}"));
                scene.push_text(Point::new(x + 14.0, o.y + 9.0), &name, TextAnchor::Start);
                x += 24.0 + 7.0 * name.chars().count() as f64;
            }
        }
    }
    Ok(scene)
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::geometry::Point;
    use crate::ingest::TrackSample;

    fn setup(n: usize) -> (Track, ClassroomMap, Viewport) {
        let mut track = Track::new(
            (0..n)
                .map(|i| TrackSample::new(2.0 * i as f64, 1.0 + 0.1 * i as f64, 2.0, 0.5))
                .collect(),
        );
        track.interval = Some(2.0);
        let map = ClassroomMap::empty(10.0, 8.0).unwrap();
        let vp = Viewport::for_room(10.0, 8.0, 500, 40).unwrap();
        (track, map, vp)
    }

    #[test]
    fn counts_match_samples_and_segments() {
        let (track, map, vp) = setup(12);
        let scene = build_scene(&track, &map, &Style::default(), &vp).unwrap();
        assert_eq!(scene.layer(LayerKind::Spotlights).len(), 12);
        assert_eq!(scene.layer(LayerKind::Trajectories).len(), 1);
        assert!(scene.layer(LayerKind::Obstacles).is_empty());
        assert_eq!(scene.layer(LayerKind::Background).len(), 1);
        assert!(!scene.layer(LayerKind::Legend).is_empty());
    }

    #[test]
    fn spotlight_order_is_time_order() {
        let (track, map, vp) = setup(5);
        let scene = build_scene(&track, &map, &Style::default(), &vp).unwrap();
        let apexes: Vec<f64> = scene
            .layer(LayerKind::Spotlights)
            .iter()
            .map(|p| match p {
                Primitive::Polygon { points, .. } => points[0].x,
                _ => unreachable!(),
            })
            .collect();
        assert!(apexes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn label_coding_uses_palette() {
        let (mut track, map, vp) = setup(6);
        for (i, s) in track.samples.iter_mut().enumerate() {
            s.label = Some((i % 2) as u32);
        }
        let style = Style {
            coding: Coding::Label,
            palette: ColorMap::categorical(vec![[255, 0, 0], [0, 0, 255]]).unwrap(),
            ..Style::default()
        };
        let scene = build_scene(&track, &map, &style, &vp).unwrap();
        let fills: HashSet<[u8; 3]> = scene
            .layer(LayerKind::Spotlights)
            .iter()
            .map(|p| match p {
                Primitive::Polygon { fill, .. } => fill.rgb,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(fills.len(), 2);

        track.samples[3].label = None;
        assert!(build_scene(&track, &map, &style, &vp).is_err());
    }

    #[test]
    fn obstacles_land_in_their_layer() {
        let (track, _, vp) = setup(3);
        let desk = vec![
            Point::new(1.0, 1.0),
            Point::new(2.0, 1.0),
            Point::new(2.0, 2.0),
            Point::new(1.0, 2.0),
        ];
        let map = ClassroomMap::new(10.0, 8.0, vec![desk], vec![]).unwrap();
        let scene = build_scene(&track, &map, &Style::default(), &vp).unwrap();
        assert_eq!(scene.layer(LayerKind::Obstacles).len(), 1);
    }

    #[test]
    fn clock_format() {
        assert_eq!(format_clock(0.0), "0:00");
        assert_eq!(format_clock(3000.0), "50:00");
        assert_eq!(format_clock(61.9), "1:01");
    }
}
