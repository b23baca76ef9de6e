//! The `dandelion` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.
//! Outputs are written to a temporary file next to the target and renamed
//! into place, so a failed run leaves no partial file behind.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytics::{self, AttentionCone, MetricsParams};
use crate::error::Error;
use crate::geometry::Viewport;
use crate::heatmap::{self, heatmap_scene, kde_grid};
use crate::ingest::{
    self, parse_track, resample_uniform, validate_track, write_track, ClassroomMap, HeadingUnit,
    Track, TrackFormat,
};
use crate::render::{build_scene, emit_svg, encode_png, rasterize, Coding, Scene, Style};
use crate::simulate::{make_layout, simulate_session, LayoutKind, SimParams};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_IO: u8 = 3;

/// Environment variable naming a default style file.
pub const STYLE_ENV: &str = "DANDELION_STYLE";

const DEFAULT_WIDTH: u32 = 1200;
const DEFAULT_MARGIN: u32 = 40;

const DEFAULTS_TABLE: &str = "\
Defaults (style file values override these; flags override the style file):
  resampling interval        2 s
  max gap bridged            3 x interval
  spotlight length           0.8 m
  spotlight half-angle       25 deg
  spotlight opacity          0.12
  time colormap              0:(13,8,135) .25:(126,3,168) .5:(204,71,120) .75:(248,149,64) 1:(240,249,33)
  supersampling              4 (16 sub-samples per pixel)
  image width                1200 px, 40 px margin
  heatmap cell / bandwidth   0.1 m / 0.35 m
  metrics cell               0.5 m
  attention cone             3.0 m range, 60 deg half-angle
  heading bins / time bins   16 / 10
  stop speed / min stop      0.3 m/s / 6 s
  validation max speed       3.0 m/s
Style file (JSON): length_m, half_angle_deg, alpha, coding, colormap{stops|palette},
  trajectory{rgb,width_px,opacity}, supersample, labels. $DANDELION_STYLE names a default style file.";

#[derive(Parser, Debug)]
#[command(
    name = "dandelion",
    version,
    about = "Dandelion diagrams, baseline heatmaps and proxemics metrics from indoor tracking logs",
    after_help = DEFAULTS_TABLE
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render a Dandelion diagram to SVG or PNG.
    #[command(after_help = DEFAULTS_TABLE)]
    Render(RenderArgs),
    /// Render the position-only KDE heatmap baseline.
    #[command(after_help = DEFAULTS_TABLE)]
    Heatmap(HeatmapArgs),
    /// Compute occupancy, attention, heading, mobility and temporal metrics.
    #[command(after_help = DEFAULTS_TABLE)]
    Metrics(MetricsArgs),
    /// Generate a synthetic classroom session.
    #[command(after_help = DEFAULTS_TABLE)]
    Simulate(SimulateArgs),
    /// Check a track for out-of-bounds samples, speed jumps and ordering problems.
    #[command(after_help = DEFAULTS_TABLE)]
    Validate(ValidateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum UnitArg {
    Rad,
    Deg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CodingArg {
    Time,
    Label,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum ImageFormat {
    Svg,
    Png,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LayoutArg {
    Lecture,
    Teamwork,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Track file (.csv with header t,x,y,heading[,label], or .json)
    #[arg(long = "in", value_name = "TRACK")]
    input: PathBuf,
    /// Classroom map JSON
    #[arg(long, value_name = "MAP")]
    map: PathBuf,
    /// Unit of the heading column
    #[arg(long, value_enum, default_value = "rad")]
    heading_unit: UnitArg,
    /// Fixed rotation added to every heading, degrees
    #[arg(long, value_name = "DEG", default_value_t = 0.0)]
    heading_offset: f64,
}

#[derive(Args, Debug)]
struct ResampleArgs {
    /// Resampling interval, seconds
    #[arg(long, value_name = "S", default_value_t = ingest::DEFAULT_INTERVAL)]
    interval: f64,
    /// Longest input gap bridged by interpolation, seconds [default: 3 x interval]
    #[arg(long, value_name = "S")]
    max_gap: Option<f64>,
}

#[derive(Args, Debug)]
struct ImageArgs {
    /// Output file; format from the extension (.svg or .png)
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Output format, overriding the extension
    #[arg(long, value_enum)]
    format: Option<ImageFormat>,
    /// Image width, pixels (height follows the room aspect ratio)
    #[arg(long, value_name = "PX", default_value_t = DEFAULT_WIDTH)]
    width: u32,
    /// Blank border around the room, pixels
    #[arg(long, value_name = "PX", default_value_t = DEFAULT_MARGIN)]
    margin: u32,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    resample: ResampleArgs,
    #[command(flatten)]
    image: ImageArgs,
    /// Style JSON file
    #[arg(long, value_name = "FILE")]
    style: Option<PathBuf>,
    /// Color coding of the spotlights [default: time]
    #[arg(long, value_enum)]
    coding: Option<CodingArg>,
    /// Per-spotlight opacity in (0, 1] [default: 0.12]
    #[arg(long, value_name = "A")]
    alpha: Option<f64>,
    /// Spotlight length, meters [default: 0.8]
    #[arg(long, value_name = "M")]
    length: Option<f64>,
    /// Spotlight half-angle, degrees [default: 25]
    #[arg(long, value_name = "DEG")]
    half_angle: Option<f64>,
    /// Sub-samples per pixel axis: 1, 2, 4 or 8 [default: 4]
    #[arg(long, value_name = "N")]
    supersample: Option<u32>,
}

#[derive(Args, Debug)]
struct HeatmapArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    resample: ResampleArgs,
    #[command(flatten)]
    image: ImageArgs,
    /// Grid cell size, meters
    #[arg(long, value_name = "M", default_value_t = heatmap::DEFAULT_CELL_SIZE)]
    cell: f64,
    /// Gaussian kernel bandwidth, meters
    #[arg(long, value_name = "M", default_value_t = heatmap::DEFAULT_BANDWIDTH)]
    bandwidth: f64,
    /// Also write the density grid as a CSV matrix (row 0 = top), s/m²
    #[arg(long, value_name = "FILE")]
    grid_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    resample: ResampleArgs,
    /// Report JSON file
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Grid cell size, meters
    #[arg(long, value_name = "M", default_value_t = analytics::DEFAULT_CELL_SIZE)]
    cell: f64,
    /// Attention cone range, meters
    #[arg(long, value_name = "M", default_value_t = analytics::DEFAULT_CONE_RANGE)]
    cone_range: f64,
    /// Attention cone half-angle, degrees
    #[arg(long, value_name = "DEG", default_value_t = analytics::DEFAULT_CONE_HALF_ANGLE_DEG)]
    cone_angle: f64,
    /// Heading histogram bins
    #[arg(long, value_name = "N", default_value_t = analytics::DEFAULT_HEADING_BINS)]
    bins: usize,
    /// Time bins of the zone-by-time matrix
    #[arg(long, value_name = "N", default_value_t = analytics::DEFAULT_TIME_BINS)]
    time_bins: usize,
    /// Speed below which a step counts as stationary, m/s
    #[arg(long, value_name = "M/S", default_value_t = analytics::DEFAULT_STOP_SPEED)]
    stop_speed: f64,
    /// Shortest stationary run reported as a stop, seconds
    #[arg(long, value_name = "S", default_value_t = analytics::DEFAULT_MIN_STOP_DURATION)]
    min_stop: f64,
    /// Also write the occupancy grid as a CSV matrix (row 0 = top), seconds
    #[arg(long, value_name = "FILE")]
    occupancy_csv: Option<PathBuf>,
    /// Also write the attention grid as a CSV matrix (row 0 = top), seconds
    #[arg(long, value_name = "FILE")]
    attention_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Classroom archetype
    #[arg(long, value_enum)]
    layout: LayoutArg,
    /// PRNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Session length, seconds
    #[arg(long, value_name = "S", default_value_t = 3000.0)]
    duration: f64,
    /// Sampling interval, seconds
    #[arg(long, value_name = "S", default_value_t = ingest::DEFAULT_INTERVAL)]
    interval: f64,
    /// Walking speed, m/s
    #[arg(long, value_name = "M/S", default_value_t = 0.8)]
    walk_speed: f64,
    /// Mean dwell time at a waypoint, seconds
    #[arg(long, value_name = "S", default_value_t = 40.0)]
    dwell_mean: f64,
    /// Probability that a lecture waypoint is the front of the room
    #[arg(long, value_name = "P", default_value_t = 0.5)]
    front_bias: f64,
    /// Track output (.csv or .json)
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Also write the generated classroom map as JSON
    #[arg(long, value_name = "FILE")]
    map_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Speed above which consecutive samples are flagged, m/s
    #[arg(long, value_name = "M/S", default_value_t = ingest::DEFAULT_MAX_SPEED)]
    max_speed: f64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } | Error::Png(_) => Failure::Io(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Render(a) => render(a, stderr),
        Command::Heatmap(a) => heatmap_cmd(a),
        Command::Metrics(a) => metrics(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Validate(a) => validate(a, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "dandelion: {}", f.message());
            f.code()
        }
    }
}

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> CliResult<String> {
    String::from_utf8(read_file(path)?)
        .map_err(|_| Failure::Data(format!("{}: not valid UTF-8", path.display())))
}

/// Writes via a sibling temp file and an atomic rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

fn track_format(path: &Path) -> TrackFormat {
    if extension(path) == "json" {
        TrackFormat::Json
    } else {
        TrackFormat::Csv
    }
}

fn with_context(path: &Path, e: Error) -> Failure {
    match Failure::from(e) {
        Failure::Data(m) => Failure::Data(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn load_map(path: &Path) -> CliResult<ClassroomMap> {
    ClassroomMap::from_json(&read_text(path)?).map_err(|e| with_context(path, e))
}

fn load_track(input: &InputArgs) -> CliResult<Track> {
    let bytes = read_file(&input.input)?;
    let unit = match input.heading_unit {
        UnitArg::Rad => HeadingUnit::Radians,
        UnitArg::Deg => HeadingUnit::Degrees,
    };
    let track = parse_track(&bytes[..], track_format(&input.input), unit)
        .map_err(|e| with_context(&input.input, e))?;
    if input.heading_offset != 0.0 {
        Ok(track.with_heading_offset(input.heading_offset.to_radians())?)
    } else {
        Ok(track)
    }
}

fn load_resampled(input: &InputArgs, resample: &ResampleArgs) -> CliResult<Track> {
    let track = load_track(input)?;
    let max_gap = resample
        .max_gap
        .unwrap_or(ingest::DEFAULT_MAX_GAP_FACTOR * resample.interval);
    resample_uniform(&track, resample.interval, max_gap).map_err(|e| with_context(&input.input, e))
}

fn image_format(args: &ImageArgs) -> CliResult<ImageFormat> {
    if let Some(f) = args.format {
        return Ok(f);
    }
    match extension(&args.out).as_str() {
        "svg" => Ok(ImageFormat::Svg),
        "png" => Ok(ImageFormat::Png),
        _ => Err(Failure::Usage(format!(
            "cannot infer image format from {}; use .svg/.png or --format",
            args.out.display()
        ))),
    }
}

fn viewport(map: &ClassroomMap, args: &ImageArgs) -> CliResult<Viewport> {
    Viewport::for_room(map.width, map.height, args.width, args.margin)
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn write_image(scene: &Scene, style: &Style, args: &ImageArgs, format: ImageFormat) -> CliResult<()> {
    let bytes = match format {
        ImageFormat::Svg => emit_svg(scene).into_bytes(),
        ImageFormat::Png => encode_png(&rasterize(scene, style)?)?,
    };
    write_atomic(&args.out, &bytes)
}

fn resolve_style(args: &RenderArgs) -> CliResult<Style> {
    let mut style = Style::default();
    if let Some(path) = std::env::var_os(STYLE_ENV).filter(|p| !p.is_empty()) {
        let path = PathBuf::from(path);
        style
            .merge_json(&read_text(&path)?)
            .map_err(|e| with_context(&path, e))?;
    }
    if let Some(path) = &args.style {
        style
            .merge_json(&read_text(path)?)
            .map_err(|e| with_context(path, e))?;
    }
    if let Some(c) = args.coding {
        style.coding = match c {
            CodingArg::Time => Coding::Time,
            CodingArg::Label => Coding::Label,
        };
    }
    if let Some(a) = args.alpha {
        style.alpha = a;
    }
    if let Some(l) = args.length {
        style.spotlight.length = l;
    }
    if let Some(h) = args.half_angle {
        style.spotlight.half_angle = h.to_radians();
    }
    if let Some(s) = args.supersample {
        style.supersample = s;
    }
    style.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(style)
}

fn render(args: RenderArgs, stderr: &mut dyn Write) -> CliResult<u8> {
    let format = image_format(&args.image)?;
    let style = resolve_style(&args)?;
    let map = load_map(&args.input.map)?;
    let track = load_resampled(&args.input, &args.resample)?;
    let issues = validate_track(&track, &map, ingest::DEFAULT_MAX_SPEED);
    if !issues.is_empty() {
        let _ = writeln!(
            stderr,
            "dandelion: warning: {} validation issue(s); run `dandelion validate` for details",
            issues.len()
        );
    }
    let vp = viewport(&map, &args.image)?;
    let scene = build_scene(&track, &map, &style, &vp)?;
    write_image(&scene, &style, &args.image, format)?;
    Ok(EXIT_OK)
}

fn heatmap_cmd(args: HeatmapArgs) -> CliResult<u8> {
    let format = image_format(&args.image)?;
    let map = load_map(&args.input.map)?;
    let track = load_resampled(&args.input, &args.resample)?;
    let grid = kde_grid(&track, &map, args.cell, args.bandwidth)?;
    let style = Style::default();
    let vp = viewport(&map, &args.image)?;
    let scene = heatmap_scene(&grid, &map, &style.colormap, &vp)?;
    let image = match format {
        ImageFormat::Svg => emit_svg(&scene).into_bytes(),
        ImageFormat::Png => encode_png(&rasterize(&scene, &style)?)?,
    };
    write_atomic(&args.image.out, &image)?;
    if let Some(path) = &args.grid_out {
        write_atomic(path, grid.to_csv().as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn metrics(args: MetricsArgs) -> CliResult<u8> {
    let map = load_map(&args.input.map)?;
    let track = load_resampled(&args.input, &args.resample)?;
    let params = MetricsParams {
        cell_size: args.cell,
        cone: AttentionCone {
            range: args.cone_range,
            half_angle: args.cone_angle.to_radians(),
        },
        heading_bins: args.bins,
        time_bins: args.time_bins,
        stop_speed: args.stop_speed,
        min_stop_duration: args.min_stop,
    };
    let report = analytics::metrics_report(&track, &map, &params)?;
    write_atomic(&args.out, report.to_json().as_bytes())?;
    if let Some(path) = &args.occupancy_csv {
        let occ = analytics::occupancy_grid(&track, &map, params.cell_size)?;
        write_atomic(path, occ.grid.to_csv().as_bytes())?;
    }
    if let Some(path) = &args.attention_csv {
        let att = analytics::attention_grid(&track, &map, params.cell_size, &params.cone)?;
        write_atomic(path, att.to_csv().as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn simulate_cmd(args: SimulateArgs) -> CliResult<u8> {
    let kind = match args.layout {
        LayoutArg::Lecture => LayoutKind::Lecture,
        LayoutArg::Teamwork => LayoutKind::Teamwork,
    };
    let map = make_layout(kind, args.seed)?;
    let params = SimParams {
        duration: args.duration,
        interval: args.interval,
        walk_speed: args.walk_speed,
        dwell_mean: args.dwell_mean,
        front_bias: args.front_bias,
        seed: args.seed,
    };
    let track = simulate_session(&map, kind, &params)?;
    let mut buf = Vec::new();
    write_track(&track, track_format(&args.out), &mut buf)
        .map_err(|e| Failure::Io(e.to_string()))?;
    write_atomic(&args.out, &buf)?;
    if let Some(path) = &args.map_out {
        let mut text = map.to_json();
        text.push('\n');
        write_atomic(path, text.as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn validate(args: ValidateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<u8> {
    let map = load_map(&args.input.map)?;
    let track = load_track(&args.input)?;
    let issues = validate_track(&track, &map, args.max_speed);
    for issue in &issues {
        writeln!(stdout, "{issue}").map_err(|e| Failure::Io(e.to_string()))?;
    }
    let _ = writeln!(
        stderr,
        "{}: {} sample(s), {} issue(s)",
        args.input.input.display(),
        track.len(),
        issues.len()
    );
    Ok(if issues.is_empty() { EXIT_OK } else { EXIT_DATA })
}
