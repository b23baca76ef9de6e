use std::fmt::Write;

use super::color::Paint;
use super::scene::{LayerKind, Primitive, Scene, TextAnchor};
use crate::geometry::Point;

/// Fixed three-decimal coordinate, never printing a negative zero.
fn coord(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn opacity(v: f64) -> String {
    format!("{:.4}", v.clamp(0.0, 1.0))
}

fn hex([r, g, b]: [u8; 3]) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn points(pts: &[Point]) -> String {
    let mut out = String::with_capacity(pts.len() * 16);
    for (i, p) in pts.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&coord(p.x));
        out.push(',');
        out.push_str(&coord(p.y));
    }
    out
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn fill_attrs(paint: Paint) -> String {
    format!(r#"fill="{}" fill-opacity="{}""#, hex(paint.rgb), opacity(paint.alpha))
}

/// Serializes a scene as an SVG 1.1 document.
///
/// The output is a pure function of the scene: elements appear in draw
/// order, coordinates carry three decimals and opacities four.
pub fn emit_svg(scene: &Scene) -> String {
    let vp = &scene.viewport;
    let (w, h) = (vp.pixel_width, vp.pixel_height);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{w}" height="{h}" fill="{}"/>"#,
        hex(scene.background)
    );
    for kind in LayerKind::ALL {
        let layer = scene.layer(kind);
        if layer.is_empty() {
            continue;
        }
        let _ = writeln!(out, r#"<g id="{}">"#, kind.id());
        for prim in layer {
            match prim {
                Primitive::Polygon { points: pts, fill } => {
                    let _ = writeln!(
                        out,
                        r#"<polygon points="{}" {}/>"#,
                        points(pts),
                        fill_attrs(*fill)
                    );
                }
                Primitive::Polyline {
                    points: pts,
                    stroke,
                    width,
                } => {
                    let _ = writeln!(
                        out,
                        r#"<polyline points="{}" fill="none" stroke="{}" stroke-opacity="{}" stroke-width="{}" stroke-linejoin="round" stroke-linecap="round"/>"#,
                        points(pts),
                        hex(stroke.rgb),
                        opacity(stroke.alpha),
                        coord(*width)
                    );
                }
                Primitive::Text {
                    at,
                    text,
                    size,
                    fill,
                    anchor,
                } => {
                    let anchor = match anchor {
                        TextAnchor::Start => "start",
                        TextAnchor::End => "end",
                    };
                    let _ = writeln!(
                        out,
                        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="{}" text-anchor="{anchor}" {}>{}</text>"#,
                        coord(at.x),
                        coord(at.y),
                        coord(*size),
                        fill_attrs(*fill),
                        escape(text)
                    );
                }
            }
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Viewport;

    fn viewport() -> Viewport {
        Viewport::for_room(10.0, 8.0, 1000, 0).unwrap()
    }

    #[test]
    fn polygon_formatting() {
        let mut scene = Scene::new(viewport(), [255, 255, 255]);
        scene.push(
            LayerKind::Spotlights,
            Primitive::Polygon {
                points: vec![
                    Point::new(0.0, 800.0),
                    Point::new(86.6, 750.0),
                    Point::new(86.6, 850.0),
                ],
                fill: Paint {
                    rgb: [13, 8, 135],
                    alpha: 0.12,
                },
            },
        );
        let svg = emit_svg(&scene);
        assert!(svg.contains(r#"points="0.000,800.000 86.600,750.000 86.600,850.000""#));
        assert!(svg.contains(r##"fill="#0d0887" fill-opacity="0.1200""##));
        assert_eq!(svg, emit_svg(&scene.clone()));
    }

    #[test]
    fn empty_scene_is_just_the_canvas() {
        let svg = emit_svg(&Scene::new(viewport(), [255, 255, 255]));
        assert_eq!(
            svg,
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"1000\" height=\"800\" viewBox=\"0 0 1000 800\">\n\
             <rect x=\"0\" y=\"0\" width=\"1000\" height=\"800\" fill=\"#ffffff\"/>\n\
             </svg>\n"
        );
    }

    #[test]
    fn polyline_and_text() {
        let mut scene = Scene::new(viewport(), [0, 0, 0]);
        scene.push(
            LayerKind::Trajectories,
            Primitive::Polyline {
                points: vec![Point::new(-0.0001, 1.0), Point::new(2.0, 3.0)],
                stroke: Paint::opaque([1, 2, 3]),
                width: 1.5,
            },
        );
        scene.push(
            LayerKind::Legend,
            Primitive::Text {
                at: Point::new(1.0, 2.0),
                text: "a<b & c".into(),
                size: 11.0,
                fill: Paint::opaque([0, 0, 0]),
                anchor: TextAnchor::End,
            },
        );
        let svg = emit_svg(&scene);
        assert!(svg.contains(r#"<polyline points="0.000,1.000 2.000,3.000" fill="none""#));
        assert!(svg.contains("a&lt;b &amp; c</text>"));
        assert!(svg.find("<g id=\"trajectories\">").unwrap() < svg.find("<g id=\"legend\">").unwrap());
    }
}
