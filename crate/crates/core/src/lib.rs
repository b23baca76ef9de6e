//! Dandelion diagrams for indoor teacher-tracking logs.
//!
//! A Dandelion diagram draws every position/heading sample as a translucent
//! "spotlight" triangle whose apex sits at the tracked position and whose
//! base faces the heading. Stacked triangles accumulate color density where
//! the subject lingered, a trajectory line joins consecutive positions, and
//! fill color encodes either session time or an activity label.
//!
//! The crate is organised as a pipeline:
//!
//! - [`ingest`]: parse, validate and resample tracks and classroom maps.
//! - [`geometry`]: spotlight triangles, trajectories, world-to-screen mapping.
//! - [`render`]: color coding, compositing, scene assembly, SVG/PNG output.
//! - [`heatmap`]: the conventional position-only KDE heatmap baseline.
//! - [`analytics`]: occupancy, attention, heading, mobility and temporal metrics.
//! - [`simulate`]: deterministic synthetic classrooms and sessions.
//! - [`cli`]: the `dandelion` command-line front end.

pub mod analytics;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod heatmap;
pub mod ingest;
pub mod render;
pub mod simulate;

pub use error::{Error, Result};
