//! The two end-to-end detection pipelines: raw frame in, oriented boxes out.
//!
//! The sixteen-plane pipeline refines each grid cluster against the raw
//! points by fitting a vertical plane to the obstacle face and anchoring the
//! box to it. The eight-plane pipeline runs on a finer grid and recovers the
//! heading from the cluster shape itself (rectangle corner extrapolation
//! when two sides are visible, a consensus line otherwise), because a cloud
//! with so few rings rarely supports a plane fit.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::cloud_io::fmt_float;
use crate::fit::{
    convex_hull, fit_vertical_plane, ransac_line, rectangle_from_hull, RansacParams,
};
use crate::geom::{GroundFrame, OrientedBox3, Plane3, PointCloud, Vec2, Vec3};
use crate::grid::{
    classify_cluster_size, connected_components_bridged, filter_clusters, morphology,
    project_to_grid, remove_isolated, Cluster, ClusterFilterParams, Connectivity, GridConfig,
    MorphOp, SizeClass,
};
use crate::preprocess::{filter_by_roi, remove_ground, GroundParams, RoiParams};

#[derive(Debug, Error)]
pub enum DetectError {
    #[error("cannot build a box from an empty subcloud")]
    EmptySubcloud,
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    SixteenPlane,
    EightPlane,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sixteen_plane" => Some(Mode::SixteenPlane),
            "eight_plane" => Some(Mode::EightPlane),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::SixteenPlane => "sixteen_plane",
            Mode::EightPlane => "eight_plane",
        }
    }
}

/// Every knob of both pipelines in one place.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub ground: GroundParams,
    pub roi: RoiParams,
    pub grid: GridConfig,
    pub cluster: ClusterFilterParams,
    pub ransac: RansacParams,
    /// Cluster bounding boxes grow by this margin before cropping the cloud;
    /// recovers points shaved off cluster borders by morphology.
    pub crop_margin: f64,
    /// Both hull extents must exceed this for the two-sides heading branch.
    pub visible_side_min: f64,
    /// A single visible face shorter than this is taken to be a vehicle's
    /// front or back, so the heading points perpendicular to it; longer
    /// faces are vehicle sides and the heading runs along them.
    pub face_width_max: f64,
    /// Smallest box extent on any axis. Shared by both pipelines so their
    /// boxes stay comparable when only a thin face of an obstacle is seen.
    pub min_box_size: f64,
    /// Closing radius in cells for the morphology step.
    pub close_radius: usize,
    /// Clustering bridge reach in cells: cells this close (Chebyshev) join
    /// one cluster. Scales with grid resolution so the metric reach stays
    /// comparable; a sparse ring leaves gaps of a few fine-grid cells along
    /// an obstacle trace.
    pub cluster_bridge: usize,
    pub connectivity: Connectivity,
    /// Feed raw projected points instead of grid cells to the consensus-line
    /// heading estimator (slower, marginally more accurate).
    pub heading_use_raw_points: bool,
}

impl PipelineConfig {
    /// Defaults for 16-ring clouds: coarse 0.20 m grid (the box is refined on
    /// raw points anyway), two points per occupied cell, 0.05 m consensus
    /// tolerance on raw projections.
    pub fn sixteen_plane() -> Self {
        Self {
            mode: Mode::SixteenPlane,
            ground: GroundParams::default(),
            roi: RoiParams::default(),
            grid: GridConfig::default(),
            cluster: ClusterFilterParams::default(),
            ransac: RansacParams::default(),
            crop_margin: 0.10,
            visible_side_min: 1.2,
            face_width_max: 3.0,
            min_box_size: 0.20,
            close_radius: 1,
            cluster_bridge: 0,
            connectivity: Connectivity::Eight,
            heading_use_raw_points: false,
        }
    }

    /// Defaults for 8-or-fewer-ring clouds: fine 0.05 m grid so shape work
    /// can happen on the grid itself, single-point occupancy (thin obstacles
    /// leave very few points per cell), consensus tolerance of 1.5 cells,
    /// and size bands relaxed to keep one-ring traces alive.
    pub fn eight_plane() -> Self {
        Self {
            mode: Mode::EightPlane,
            grid: GridConfig { cell_size: 0.05, occupancy_threshold: 1, ..GridConfig::default() },
            cluster: ClusterFilterParams {
                min_area: 0.05,
                min_side: 0.05,
                ..ClusterFilterParams::default()
            },
            ransac: RansacParams { inlier_tolerance: 0.075, ..RansacParams::default() },
            close_radius: 1,
            cluster_bridge: 4,
            ..Self::sixteen_plane()
        }
    }

    pub fn for_mode(mode: Mode) -> Self {
        match mode {
            Mode::SixteenPlane => Self::sixteen_plane(),
            Mode::EightPlane => Self::eight_plane(),
        }
    }
}

/// How a detection's heading was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    PlaneFit,
    Rectangle,
    RansacLine,
    NoHeading,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::PlaneFit => "plane_fit",
            Provenance::Rectangle => "rectangle",
            Provenance::RansacLine => "ransac_line",
            Provenance::NoHeading => "no_heading",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "plane_fit" => Some(Provenance::PlaneFit),
            "rectangle" => Some(Provenance::Rectangle),
            "ransac_line" => Some(Provenance::RansacLine),
            "no_heading" => Some(Provenance::NoHeading),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub bbox: OrientedBox3,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionFrame {
    pub timestamp: f64,
    pub detections: Vec<Detection>,
}

impl DetectionFrame {
    fn empty(timestamp: f64) -> Self {
        Self { timestamp, detections: Vec::new() }
    }
}

/// Points whose ground-plane projection falls inside the cluster's metric
/// bounding box expanded by `margin`. Half-open on the upper edge so a zero
/// margin inverts the grid binning exactly.
pub fn crop_cloud(
    cloud: &PointCloud,
    cluster: &Cluster,
    ground: &Plane3,
    margin: f64,
) -> PointCloud {
    let frame = GroundFrame::from_plane(ground);
    let lo = cluster.metric_bbox.min - Vec2::new(margin, margin);
    let hi = cluster.metric_bbox.max + Vec2::new(margin, margin);
    let mut out = PointCloud::new(cloud.frame_id.clone(), cloud.timestamp);
    out.points = cloud
        .points
        .iter()
        .filter(|p| {
            let q = frame.project(p.pos());
            q.x >= lo.x && q.x < hi.x && q.y >= lo.y && q.y < hi.y
        })
        .copied()
        .collect();
    out
}

/// Extends [lo, hi] to at least `min_size`, growing away from the ego
/// (coordinate 0 along this axis); centered intervals grow symmetrically.
fn widen_from_ego(lo: f64, hi: f64, min_size: f64) -> (f64, f64) {
    let span = hi - lo;
    if span >= min_size {
        return (lo, hi);
    }
    let deficit = min_size - span;
    let center = (lo + hi) * 0.5;
    if center > 1e-9 {
        (lo, hi + deficit)
    } else if center < -1e-9 {
        (lo - deficit, hi)
    } else {
        (lo - deficit * 0.5, hi + deficit * 0.5)
    }
}

/// Box anchored to a fitted vertical face: the box frame takes its x-axis
/// from the face normal (oriented toward the ego) and its z-axis from the
/// ground normal; extents are the min/max of the subcloud in that frame,
/// with the face-side extent clamped so the face plane is exactly one box
/// face. Extents below `min_size` are widened.
///
/// The heading comes from the plane orientation: the normal itself for a
/// front/back face, the in-plane direction when the face is an obstacle
/// side. A face is a side when the fit flagged it so, or when its in-plane
/// span exceeds `face_width_max` (no vehicle is that wide). This stays
/// correct both for unobserved depth (a vehicle seen exactly back-on) and
/// for crossing traffic whose side happens to face the ego.
pub fn box_from_plane(
    subcloud: &PointCloud,
    face: &Plane3,
    side_facing: bool,
    ground: &Plane3,
    min_size: f64,
    face_width_max: f64,
) -> Result<OrientedBox3, DetectError> {
    if subcloud.is_empty() {
        return Err(DetectError::EmptySubcloud);
    }
    let ez = ground.normal;
    // Face normal toward the ego origin, re-orthogonalized against ground.
    let (normal, offset) =
        if face.offset >= 0.0 { (face.normal, face.offset) } else { (-face.normal, -face.offset) };
    let bx = (normal - ez * normal.dot(ez)).normalized().expect("face parallel to ground");
    let by = ez.cross(bx);
    let u_face = -offset;

    let mut u_lo = f64::INFINITY;
    let mut u_hi = f64::NEG_INFINITY;
    let mut v_lo = f64::INFINITY;
    let mut v_hi = f64::NEG_INFINITY;
    let mut h_lo = f64::INFINITY;
    let mut h_hi = f64::NEG_INFINITY;
    for p in &subcloud.points {
        let pos = p.pos();
        let u = pos.dot(bx);
        let v = pos.dot(by);
        let h = ground.signed_distance(pos);
        u_lo = u_lo.min(u);
        u_hi = u_hi.max(u);
        v_lo = v_lo.min(v);
        v_hi = v_hi.max(v);
        h_lo = h_lo.min(h);
        h_hi = h_hi.max(h);
    }

    // The obstacle body extends to one side of its visible face. Pick the
    // side holding more extent; when the crop is only the face itself, take
    // the far side (away from the ego, which looks down the -u axis here).
    let extent_above = (u_hi - u_face).max(0.0);
    let extent_below = (u_face - u_lo).max(0.0);
    let (u_lo, u_hi) = if extent_above > extent_below + 0.5 * min_size {
        (u_face, u_face + extent_above.max(min_size))
    } else {
        (u_face - extent_below.max(min_size), u_face)
    };

    let (v_lo, v_hi) = widen_symmetric(v_lo, v_hi, min_size);
    let (h_lo, h_hi) = widen_symmetric(h_lo, h_hi, min_size);

    let center = bx * ((u_lo + u_hi) * 0.5)
        + by * ((v_lo + v_hi) * 0.5)
        + ez * ((h_lo + h_hi) * 0.5 - ground.offset);
    let gf = GroundFrame::from_plane(ground);
    let normal_angle = bx.dot(gf.ey).atan2(bx.dot(gf.ex));
    let face_is_side = side_facing || v_hi - v_lo > face_width_max;
    let (length, width, yaw) = if face_is_side {
        (v_hi - v_lo, u_hi - u_lo, normal_angle + std::f64::consts::FRAC_PI_2)
    } else {
        (u_hi - u_lo, v_hi - v_lo, normal_angle)
    };
    Ok(OrientedBox3::new(center, length, width, h_hi - h_lo, yaw, true, false))
}

fn widen_symmetric(lo: f64, hi: f64, min_size: f64) -> (f64, f64) {
    let span = hi - lo;
    if span >= min_size {
        (lo, hi)
    } else {
        let pad = (min_size - span) * 0.5;
        (lo - pad, hi + pad)
    }
}

/// Box from a heading estimate alone: extents and center are the min/max of
/// the subcloud projections in the yaw-rotated ground frame (axis-aligned
/// when no yaw is available). The height is the highest return above the
/// ground, so it is only a lower bound on the true obstacle height.
pub fn box_from_heading(
    subcloud: &PointCloud,
    yaw: Option<f64>,
    ground: &Plane3,
    min_size: f64,
) -> Result<OrientedBox3, DetectError> {
    if subcloud.is_empty() {
        return Err(DetectError::EmptySubcloud);
    }
    let gf = GroundFrame::from_plane(ground);
    let axis = Vec2::new(yaw.unwrap_or(0.0).cos(), yaw.unwrap_or(0.0).sin());
    let across = axis.perp();

    let mut u_lo = f64::INFINITY;
    let mut u_hi = f64::NEG_INFINITY;
    let mut v_lo = f64::INFINITY;
    let mut v_hi = f64::NEG_INFINITY;
    let mut h_max = f64::NEG_INFINITY;
    for p in &subcloud.points {
        let q = gf.project(p.pos());
        let u = q.dot(axis);
        let v = q.dot(across);
        u_lo = u_lo.min(u);
        u_hi = u_hi.max(u);
        v_lo = v_lo.min(v);
        v_hi = v_hi.max(v);
        h_max = h_max.max(gf.height(p.pos()));
    }
    let (u_lo, u_hi) = widen_from_ego(u_lo, u_hi, min_size);
    let (v_lo, v_hi) = widen_from_ego(v_lo, v_hi, min_size);
    let height = h_max.max(min_size);

    let q_center = axis * ((u_lo + u_hi) * 0.5) + across * ((v_lo + v_hi) * 0.5);
    let center = gf.lift(q_center, height * 0.5);
    Ok(OrientedBox3::new(
        center,
        u_hi - u_lo,
        v_hi - v_lo,
        height,
        yaw.unwrap_or(0.0),
        yaw.is_some(),
        true,
    ))
}

/// Fallback when morphology created cells no raw point maps back to: a
/// heading-less box over the cluster's metric extent.
fn box_from_cluster_cells(cluster: &Cluster, ground: &Plane3, min_size: f64) -> OrientedBox3 {
    let gf = GroundFrame::from_plane(ground);
    let (x_lo, x_hi) =
        widen_from_ego(cluster.metric_bbox.min.x, cluster.metric_bbox.max.x, min_size);
    let (y_lo, y_hi) =
        widen_from_ego(cluster.metric_bbox.min.y, cluster.metric_bbox.max.y, min_size);
    let height = min_size;
    let center = gf.lift(Vec2::new((x_lo + x_hi) * 0.5, (y_lo + y_hi) * 0.5), height * 0.5);
    OrientedBox3::new(center, x_hi - x_lo, y_hi - y_lo, height, 0.0, false, true)
}

/// Shared front end: ground removal, ROI crop, grid projection, closing,
/// isolated-cell removal, clustering, size filtering. Returns None when the
/// frame cannot even seed a ground plane (e.g. an empty cloud).
fn front_end(
    cloud: &PointCloud,
    config: &PipelineConfig,
) -> Option<(PointCloud, Plane3, Vec<Cluster>)> {
    let seg = remove_ground(cloud, &config.ground).ok()?;
    let roi = filter_by_roi(&seg.nonground, &seg.plane, &config.roi);
    let grid = project_to_grid(&roi, &seg.plane, &config.grid);
    let grid = morphology(&grid, MorphOp::Close, config.close_radius);
    // Lone cells are noise on a dense grid, but on a bridged sparse grid
    // they are the trace the bridge exists to connect; there the area
    // filter handles stray cells instead.
    let grid = if config.cluster_bridge == 0 { remove_isolated(&grid) } else { grid };
    let clusters = filter_clusters(
        connected_components_bridged(&grid, config.connectivity, config.cluster_bridge),
        &config.cluster,
        config.grid.cell_size,
    );
    Some((roi, seg.plane, clusters))
}

/// Sixteen-plane pipeline: per cluster, crop the raw cloud, fit a vertical
/// plane to the dominant face, and anchor the box to it. Clusters whose
/// plane fit fails still produce a heading-less box; one bad cluster never
/// aborts the frame.
pub fn detect_16(cloud: &PointCloud, config: &PipelineConfig) -> DetectionFrame {
    let Some((roi, ground, clusters)) = front_end(cloud, config) else {
        return DetectionFrame::empty(cloud.timestamp);
    };
    let mut frame = DetectionFrame::empty(cloud.timestamp);
    for cluster in &clusters {
        let crop = crop_cloud(&roi, cluster, &ground, config.crop_margin);
        let detection = match fit_vertical_plane(&crop.points, &ground, &config.ransac) {
            Ok(fit) => {
                box_from_plane(
                    &crop,
                    &fit.plane,
                    fit.side_facing,
                    &ground,
                    config.min_box_size,
                    config.face_width_max,
                )
                .map(|bbox| Detection { bbox, provenance: Provenance::PlaneFit })
            }
            Err(_) => box_from_heading(&crop, None, &ground, config.min_box_size)
                .map(|bbox| Detection { bbox, provenance: Provenance::NoHeading }),
        };
        frame.detections.push(detection.unwrap_or_else(|_| Detection {
            bbox: box_from_cluster_cells(cluster, &ground, config.min_box_size),
            provenance: Provenance::NoHeading,
        }));
    }
    frame
}

/// Eight-plane pipeline: heading from the grid itself. Vehicle-like clusters
/// with two visible sides go through rectangle corner extrapolation; single
/// visible sides fall back to a consensus line over the occupied cell
/// centers; pedestrian-like clusters skip heading estimation entirely.
pub fn detect_8(cloud: &PointCloud, config: &PipelineConfig) -> DetectionFrame {
    let Some((roi, ground, clusters)) = front_end(cloud, config) else {
        return DetectionFrame::empty(cloud.timestamp);
    };
    let gf = GroundFrame::from_plane(&ground);
    let mut frame = DetectionFrame::empty(cloud.timestamp);
    for cluster in &clusters {
        let crop = crop_cloud(&roi, cluster, &ground, config.crop_margin);
        let (yaw, provenance) =
            if classify_cluster_size(cluster, &config.cluster, config.grid.cell_size)
                == SizeClass::PedestrianLike
            {
                (None, Provenance::NoHeading)
            } else {
                heading_for_vehicle(cluster, &crop, &gf, config)
            };
        let detection = box_from_heading(&crop, yaw, &ground, config.min_box_size)
            .map(|bbox| Detection { bbox, provenance });
        frame.detections.push(detection.unwrap_or_else(|_| Detection {
            bbox: box_from_cluster_cells(cluster, &ground, config.min_box_size),
            provenance: Provenance::NoHeading,
        }));
    }
    frame
}

fn heading_for_vehicle(
    cluster: &Cluster,
    crop: &PointCloud,
    gf: &GroundFrame,
    config: &PipelineConfig,
) -> (Option<f64>, Provenance) {
    // Two-sides branch: the hull must be genuinely two-dimensional (both
    // principal extents above the threshold) and carry a usable corner;
    // rectangle_from_hull checks both and declines otherwise.
    if let Ok(hull) = convex_hull(&cluster.metric_points) {
        if let Some(est) = rectangle_from_hull(&hull, config.visible_side_min) {
            return (Some(est.yaw), Provenance::Rectangle);
        }
    }
    let line_points: Vec<Vec2> = if config.heading_use_raw_points {
        crop.points.iter().map(|p| gf.project(p.pos())).collect()
    } else {
        cluster.metric_points.clone()
    };
    match ransac_line(&line_points, &config.ransac) {
        Ok(fit) => {
            // One visible side: decide whether the line traces the vehicle's
            // width (front/back face) or its length (side face) by its span.
            let (lo, hi) = fit
                .inliers
                .iter()
                .map(|&i| (line_points[i] - fit.line.point).dot(fit.line.direction))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), u| (lo.min(u), hi.max(u)));
            let yaw = if hi - lo <= config.face_width_max {
                fit.line.angle() + std::f64::consts::FRAC_PI_2
            } else {
                fit.line.angle()
            };
            (Some(yaw), Provenance::RansacLine)
        }
        Err(_) => (None, Provenance::NoHeading),
    }
}

/// Dispatches on the configured mode.
pub fn run_detector(cloud: &PointCloud, config: &PipelineConfig) -> DetectionFrame {
    match config.mode {
        Mode::SixteenPlane => detect_16(cloud, config),
        Mode::EightPlane => detect_8(cloud, config),
    }
}

const DETECTIONS_HEADER: &str = "# detections: t,n,[cx,cy,cz,length,width,height,yaw,heading_valid,height_is_lower_bound,provenance]*";

/// One line per frame: timestamp, box count, then ten fixed fields per box.
pub fn write_detections(path: &Path, frames: &[DetectionFrame]) -> Result<(), DetectError> {
    let mut out = String::from(DETECTIONS_HEADER);
    out.push('\n');
    for frame in frames {
        out.push_str(&fmt_float(frame.timestamp));
        out.push_str(&format!(",{}", frame.detections.len()));
        for d in &frame.detections {
            let b = &d.bbox;
            out.push_str(&format!(
                ",{},{},{},{},{},{},{},{},{},{}",
                fmt_float(b.center.x),
                fmt_float(b.center.y),
                fmt_float(b.center.z),
                fmt_float(b.length),
                fmt_float(b.width),
                fmt_float(b.height),
                fmt_float(b.yaw),
                u8::from(b.heading_valid),
                u8::from(b.height_is_lower_bound),
                d.provenance.as_str(),
            ));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| DetectError::Io { path: path.to_path_buf(), source })
}

pub fn read_detections(path: &Path) -> Result<Vec<DetectionFrame>, DetectError> {
    let text = fs::read_to_string(path)
        .map_err(|source| DetectError::Io { path: path.to_path_buf(), source })?;
    let err = |line: usize, message: String| DetectError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut frames = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() < 2 {
            return Err(err(line_no, "expected timestamp and box count".into()));
        }
        let num = |s: &str, name: &str| -> Result<f64, DetectError> {
            s.parse::<f64>().map_err(|e| err(line_no, format!("bad {name} `{s}`: {e}")))
        };
        let timestamp = num(f[0], "t")?;
        let n: usize =
            f[1].parse().map_err(|e| err(line_no, format!("bad box count `{}`: {e}", f[1])))?;
        if f.len() != 2 + 10 * n {
            return Err(err(line_no, format!("expected {} fields, found {}", 2 + 10 * n, f.len())));
        }
        let mut detections = Vec::with_capacity(n);
        for b in 0..n {
            let o = 2 + 10 * b;
            let heading_valid = f[o + 7] == "1";
            let provenance = Provenance::parse(f[o + 9])
                .ok_or_else(|| err(line_no, format!("unknown provenance `{}`", f[o + 9])))?;
            detections.push(Detection {
                bbox: OrientedBox3::new(
                    Vec3::new(num(f[o], "cx")?, num(f[o + 1], "cy")?, num(f[o + 2], "cz")?),
                    num(f[o + 3], "length")?,
                    num(f[o + 4], "width")?,
                    num(f[o + 5], "height")?,
                    num(f[o + 6], "yaw")?,
                    heading_valid,
                    f[o + 8] == "1",
                ),
                provenance,
            });
        }
        frames.push(DetectionFrame { timestamp, detections });
    }
    Ok(frames)
}
