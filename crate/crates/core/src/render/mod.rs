//! Color coding, compositing, scene assembly, and SVG/PNG output.

mod color;
mod png;
mod raster;
mod scene;
mod style;
mod svg;

pub use color::{
    color_for, composite_over, composite_over_unit, quantize, ColorMap, ColorStop, Paint, Rgba,
    DEFAULT_PALETTE, DEFAULT_STOPS,
};
pub use png::{decode_png, encode_png};
pub use raster::{rasterize, RasterImage, MAX_PIXELS};
pub use scene::{build_scene, format_clock, LayerKind, Primitive, Scene, TextAnchor};
pub use style::{Coding, Style, StrokeStyle};
pub use svg::emit_svg;
