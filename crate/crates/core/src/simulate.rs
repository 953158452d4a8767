//! Synthetic lidar raycaster, parametric scenes, and exact per-frame ground
//! truth. Stands in for recorded data when validating the detectors: every
//! frame comes with the true obstacle pose relative to the ego vehicle.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::cloud_io::{fmt_float, FrameRecord};
use crate::geom::{wrap_angle, OrientedBox3, Plane3, Point3, PointCloud, Pose2, Vec3};
use crate::rng::{derive_seed, SplitMix64};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("time {t} outside trajectory span [{start}, {end}]")]
    OutOfSpan { t: f64, start: f64, end: f64 },
    #[error("invalid scenario parameters: {0}")]
    BadParams(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
}

/// Spinning-lidar beam geometry and noise model.
#[derive(Debug, Clone, PartialEq)]
pub struct LidarModel {
    /// One elevation per ring, strictly increasing (radians).
    pub elevation_angles: Vec<f64>,
    pub azimuth_step: f64,
    pub max_range: f64,
    pub range_noise_sigma: f64,
    /// Sensor height above the ego ground point (meters).
    pub mount_height: f64,
}

impl LidarModel {
    pub fn new(
        elevation_angles: Vec<f64>,
        azimuth_step: f64,
        max_range: f64,
        range_noise_sigma: f64,
        mount_height: f64,
    ) -> Result<Self, SimError> {
        if elevation_angles.is_empty() {
            return Err(SimError::BadParams("no elevation angles".into()));
        }
        if !elevation_angles.windows(2).all(|w| w[0] < w[1]) {
            return Err(SimError::BadParams("elevations must be strictly increasing".into()));
        }
        if azimuth_step <= 0.0 || max_range <= 0.0 || range_noise_sigma < 0.0 {
            return Err(SimError::BadParams("non-positive azimuth step or range".into()));
        }
        Ok(Self { elevation_angles, azimuth_step, max_range, range_noise_sigma, mount_height })
    }

    /// Evenly spaced rings between two elevations.
    pub fn uniform(
        rings: usize,
        elevation_min: f64,
        elevation_max: f64,
        azimuth_step: f64,
        max_range: f64,
        range_noise_sigma: f64,
        mount_height: f64,
    ) -> Result<Self, SimError> {
        if rings < 1 {
            return Err(SimError::BadParams("ring count must be at least 1".into()));
        }
        let angles = (0..rings)
            .map(|i| {
                if rings == 1 {
                    elevation_min
                } else {
                    elevation_min
                        + (elevation_max - elevation_min) * i as f64 / (rings - 1) as f64
                }
            })
            .collect();
        Self::new(angles, azimuth_step, max_range, range_noise_sigma, mount_height)
    }

    /// Default 16-ring model: elevations uniform in [-15, +15] degrees,
    /// 0.2 degree azimuth step, 100 m range, 1 cm range noise, 1.8 m mount.
    pub fn default_16() -> Self {
        Self::uniform(
            16,
            (-15.0f64).to_radians(),
            15.0f64.to_radians(),
            0.2f64.to_radians(),
            100.0,
            0.01,
            1.8,
        )
        .expect("default model is valid")
    }

    pub fn rings(&self) -> usize {
        self.elevation_angles.len()
    }

    pub fn azimuth_count(&self) -> usize {
        (std::f64::consts::TAU / self.azimuth_step).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObstacleClass {
    Vehicle,
    Pedestrian,
}

impl ObstacleClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ObstacleClass::Vehicle => "vehicle",
            ObstacleClass::Pedestrian => "pedestrian",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "vehicle" => Some(ObstacleClass::Vehicle),
            "pedestrian" => Some(ObstacleClass::Pedestrian),
            _ => None,
        }
    }
}

/// A box-shaped actor following a timestamped trajectory. `dims` is
/// (length, width, height); the box rests on the ground.
#[derive(Debug, Clone)]
pub struct Obstacle {
    pub dims: Vec3,
    pub class: ObstacleClass,
    pub trajectory: Vec<(f64, Pose2)>,
}

/// World description: ground plane, obstacles, and the ego trajectory.
#[derive(Debug, Clone)]
pub struct Scene {
    pub ground: Plane3,
    pub obstacles: Vec<Obstacle>,
    pub ego_trajectory: Vec<(f64, Pose2)>,
}

impl Scene {
    pub fn time_span(&self) -> (f64, f64) {
        let start = self.ego_trajectory.first().map(|k| k.0).unwrap_or(0.0);
        let end = self.ego_trajectory.last().map(|k| k.0).unwrap_or(0.0);
        (start, end)
    }
}

/// Linear pose interpolation between trajectory knots; yaw takes the
/// shortest arc.
fn interp_pose(trajectory: &[(f64, Pose2)], t: f64) -> Result<Pose2, SimError> {
    let (start, end) = (
        trajectory.first().map(|k| k.0).unwrap_or(0.0),
        trajectory.last().map(|k| k.0).unwrap_or(0.0),
    );
    const SLOP: f64 = 1e-9;
    if trajectory.is_empty() || t < start - SLOP || t > end + SLOP {
        return Err(SimError::OutOfSpan { t, start, end });
    }
    let t = t.clamp(start, end);
    let seg = trajectory.partition_point(|k| k.0 <= t);
    if seg == trajectory.len() {
        return Ok(trajectory[trajectory.len() - 1].1);
    }
    if seg == 0 {
        return Ok(trajectory[0].1);
    }
    let (t0, p0) = trajectory[seg - 1];
    let (t1, p1) = trajectory[seg];
    let alpha = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
    Ok(Pose2::new(
        p0.x + (p1.x - p0.x) * alpha,
        p0.y + (p1.y - p0.y) * alpha,
        p0.yaw + wrap_angle(p1.yaw - p0.yaw) * alpha,
    ))
}

fn rotate_z(v: Vec3, yaw: f64) -> Vec3 {
    let (s, c) = yaw.sin_cos();
    Vec3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z)
}

/// Nearest positive ray parameter where the ray enters an upright box, if
/// any. Origin and direction are in world coordinates.
fn ray_box(origin: Vec3, dir: Vec3, center: Vec3, dims: Vec3, yaw: f64) -> Option<f64> {
    let o = rotate_z(origin - center, -yaw);
    let d = rotate_z(dir, -yaw);
    let half = [dims.x * 0.5, dims.y * 0.5, dims.z * 0.5];
    let oa = [o.x, o.y, o.z];
    let da = [d.x, d.y, d.z];
    let mut t_min = f64::NEG_INFINITY;
    let mut t_max = f64::INFINITY;
    for a in 0..3 {
        if da[a].abs() < 1e-12 {
            if oa[a].abs() > half[a] {
                return None;
            }
            continue;
        }
        let t1 = (-half[a] - oa[a]) / da[a];
        let t2 = (half[a] - oa[a]) / da[a];
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        t_min = t_min.max(lo);
        t_max = t_max.min(hi);
    }
    (t_max >= t_min && t_min > 1e-9).then_some(t_min)
}

fn ray_plane(origin: Vec3, dir: Vec3, plane: &Plane3) -> Option<f64> {
    let denom = plane.normal.dot(dir);
    if denom.abs() < 1e-12 {
        return None;
    }
    let t = -(plane.normal.dot(origin) + plane.offset) / denom;
    (t > 1e-9).then_some(t)
}

/// Casts one full revolution at time `t`, returning the cloud in the ego
/// frame (origin on the ground below the sensor).
///
/// Each (ring, azimuth) ray keeps the nearest hit against the ground plane
/// and all obstacle boxes within `max_range`, with Gaussian range noise.
/// The noise stream is seeded per (frame seed, ring, azimuth index), so
/// output is deterministic and independent of iteration order.
pub fn raycast_frame(
    scene: &Scene,
    lidar: &LidarModel,
    t: f64,
    rng_seed: u64,
) -> Result<FrameRecord, SimError> {
    let ego = interp_pose(&scene.ego_trajectory, t)?;
    let obstacle_poses: Vec<(Pose2, &Obstacle)> = scene
        .obstacles
        .iter()
        .map(|o| interp_pose(&o.trajectory, t).map(|p| (p, o)))
        .collect::<Result<_, _>>()?;

    let ego_ground = Vec3::new(ego.x, ego.y, 0.0);
    let sensor = Vec3::new(ego.x, ego.y, lidar.mount_height);
    let n_az = lidar.azimuth_count();

    let mut cloud = PointCloud::new("ego", t);
    for (ring, &elevation) in lidar.elevation_angles.iter().enumerate() {
        let (es, ec) = elevation.sin_cos();
        for k in 0..n_az {
            let az = -std::f64::consts::PI + k as f64 * lidar.azimuth_step;
            let dir_ego = Vec3::new(ec * az.cos(), ec * az.sin(), es);
            let dir = rotate_z(dir_ego, ego.yaw);

            let mut nearest = ray_plane(sensor, dir, &scene.ground);
            for (pose, obstacle) in &obstacle_poses {
                let center = Vec3::new(pose.x, pose.y, obstacle.dims.z * 0.5);
                if let Some(range) = ray_box(sensor, dir, center, obstacle.dims, pose.yaw) {
                    nearest = Some(nearest.map_or(range, |r: f64| r.min(range)));
                }
            }
            let Some(range) = nearest else { continue };
            if range > lidar.max_range {
                continue;
            }
            let mut rng = SplitMix64::new(derive_seed(rng_seed, &[ring as u64, k as u64]));
            let noisy = range + lidar.range_noise_sigma * rng.next_gaussian();
            let hit = sensor + dir * noisy;
            let local = rotate_z(hit - ego_ground, -ego.yaw);
            cloud.points.push(Point3::with_ring(local.x, local.y, local.z, ring as u32));
        }
    }
    Ok(FrameRecord::new(t, cloud))
}

/// Casts a frame per entry of `times`, deriving an independent noise seed
/// for each frame index from `master_seed`.
pub fn simulate_sequence(
    scene: &Scene,
    lidar: &LidarModel,
    times: &[f64],
    master_seed: u64,
) -> Result<Vec<FrameRecord>, SimError> {
    times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut frame = raycast_frame(scene, lidar, t, derive_seed(master_seed, &[i as u64]))?;
            frame.truth_key = Some(i as u64);
            Ok(frame)
        })
        .collect()
}

/// True state of one obstacle relative to the ego vehicle.
#[derive(Debug, Clone)]
pub struct TruthEntry {
    pub obstacle_id: usize,
    pub class: ObstacleClass,
    /// Ground-plane distance from the ego origin to the nearest point of the
    /// obstacle footprint. Center-to-center distance is reported alongside;
    /// the nearest-face definition avoids the antenna-offset bias a
    /// reference point inside the vehicle would introduce.
    pub dist_nearest: f64,
    pub dist_center: f64,
    pub rel_heading: f64,
    /// True box in the ego frame.
    pub bbox: OrientedBox3,
}

#[derive(Debug, Clone)]
pub struct GroundTruthRecord {
    pub timestamp: f64,
    pub entries: Vec<TruthEntry>,
}

pub fn ground_truth_at(scene: &Scene, t: f64) -> Result<GroundTruthRecord, SimError> {
    let ego = interp_pose(&scene.ego_trajectory, t)?;
    let mut entries = Vec::with_capacity(scene.obstacles.len());
    for (id, obstacle) in scene.obstacles.iter().enumerate() {
        let pose = interp_pose(&obstacle.trajectory, t)?;
        let rel = (pose.xy() - ego.xy()).rotated(-ego.yaw);
        let rel_yaw = wrap_angle(pose.yaw - ego.yaw);
        let bbox = OrientedBox3::new(
            Vec3::new(rel.x, rel.y, obstacle.dims.z * 0.5),
            obstacle.dims.x,
            obstacle.dims.y,
            obstacle.dims.z,
            rel_yaw,
            true,
            false,
        );
        entries.push(TruthEntry {
            obstacle_id: id,
            class: obstacle.class,
            dist_nearest: bbox.nearest_face_distance(),
            dist_center: rel.norm(),
            rel_heading: rel_yaw,
            bbox,
        });
    }
    Ok(GroundTruthRecord { timestamp: t, entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Obstacle closing head-on (with a small lateral offset) from the start
    /// distance down to the end distance.
    Approach,
    /// Obstacle at fixed position sweeping its relative yaw sinusoidally.
    Chicane,
    /// Approach followed by a chicane at close range.
    Lap,
    /// Approach van plus a second vehicle and a pedestrian.
    MultiObstacle,
}

impl Scenario {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "approach" => Some(Scenario::Approach),
            "chicane" => Some(Scenario::Chicane),
            "lap" => Some(Scenario::Lap),
            "multi_obstacle" => Some(Scenario::MultiObstacle),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Approach => "approach",
            Scenario::Chicane => "chicane",
            Scenario::Lap => "lap",
            Scenario::MultiObstacle => "multi_obstacle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub duration: f64,
    pub frame_rate: f64,
    /// Nearest-face distance at t = 0 for approach-style scenarios.
    pub start_distance: f64,
    /// Nearest-face distance at t = duration.
    pub end_distance: f64,
    /// Lateral offset of the obstacle path. A vehicle exactly on the ego
    /// axis shows only its back face; a small offset keeps two faces in
    /// view, which is also how a real vehicle maneuvers around another.
    pub lateral_offset: f64,
    /// Constant relative yaw held through the approach (radians), nose
    /// angled toward the ego axis (sign opposite the lateral offset). Both
    /// visible faces then stay several tens of degrees off grazing, so
    /// their traces survive grid quantization out to the start distance,
    /// for the decimated cloud too.
    pub approach_yaw: f64,
    pub chicane_distance: f64,
    /// Peak relative yaw of the chicane sweep (radians).
    pub chicane_amplitude: f64,
    pub chicane_period: f64,
    /// Vehicle (length, width, height).
    pub vehicle_dims: Vec3,
    pub pedestrian_dims: Vec3,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            duration: 30.0,
            frame_rate: 10.0,
            start_distance: 20.0,
            end_distance: 2.0,
            lateral_offset: 2.0,
            approach_yaw: (-25.0f64).to_radians(),
            chicane_distance: 10.0,
            chicane_amplitude: 40.0f64.to_radians(),
            chicane_period: 10.0,
            vehicle_dims: Vec3::new(4.5, 2.0, 2.2),
            pedestrian_dims: Vec3::new(0.6, 0.6, 1.7),
        }
    }
}

impl ScenarioParams {
    fn validate(&self) -> Result<(), SimError> {
        if self.duration <= 0.0 || self.frame_rate <= 0.0 {
            return Err(SimError::BadParams("duration and frame rate must be positive".into()));
        }
        if self.start_distance <= 0.0 || self.end_distance <= 0.0 {
            return Err(SimError::BadParams("distances must be positive".into()));
        }
        if self.chicane_period <= 0.0 {
            return Err(SimError::BadParams("chicane period must be positive".into()));
        }
        let dims = [self.vehicle_dims, self.pedestrian_dims];
        if dims.iter().any(|d| d.x <= 0.0 || d.y <= 0.0 || d.z <= 0.0) {
            return Err(SimError::BadParams("obstacle dimensions must be positive".into()));
        }
        Ok(())
    }

    /// Frame timestamps: duration * frame_rate frames starting at t = 0.
    pub fn frame_times(&self) -> Vec<f64> {
        let n = (self.duration * self.frame_rate).round() as usize;
        (0..n).map(|i| i as f64 / self.frame_rate).collect()
    }
}

/// Center x such that a vehicle at lateral offset `dy` with heading `yaw`
/// has the requested nearest-face distance from the origin. The distance is
/// strictly increasing in x once positive, so bisection nails it.
fn center_x_for_distance(distance: f64, dims: Vec3, dy: f64, yaw: f64) -> Result<f64, SimError> {
    let footprint_distance = |cx: f64| {
        OrientedBox3::new(Vec3::new(cx, dy, dims.z * 0.5), dims.x, dims.y, dims.z, yaw, true, false)
            .nearest_face_distance()
    };
    let mut lo = 0.0;
    let mut hi = distance + dims.x + dims.y + dy.abs() + 1.0;
    if footprint_distance(lo) > distance || footprint_distance(hi) < distance {
        return Err(SimError::BadParams(format!(
            "distance {distance} unreachable at lateral offset {dy}"
        )));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if footprint_distance(mid) < distance {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn static_ego(duration: f64) -> Vec<(f64, Pose2)> {
    vec![(0.0, Pose2::new(0.0, 0.0, 0.0)), (duration, Pose2::new(0.0, 0.0, 0.0))]
}

/// Builds one of the parametric validation scenes. Deterministic: knots are
/// placed at frame times so interpolation is exact where frames sample.
pub fn generate_scenario(kind: Scenario, params: &ScenarioParams) -> Result<Scene, SimError> {
    params.validate()?;
    let ground = Plane3::new(Vec3::new(0.0, 0.0, 1.0), 0.0);
    let dims = params.vehicle_dims;
    let dy = params.lateral_offset;
    let t_end = params.duration;

    let approach_knots = |from: f64, to: f64, t0: f64, t1: f64| -> Result<Vec<(f64, Pose2)>, SimError> {
        let n = ((t1 - t0) * params.frame_rate).round() as usize;
        let mut knots = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = t0 + (t1 - t0) * i as f64 / n.max(1) as f64;
            let d = from + (to - from) * (t - t0) / (t1 - t0);
            let cx = center_x_for_distance(d, dims, dy, params.approach_yaw)?;
            knots.push((t, Pose2::new(cx, dy, params.approach_yaw)));
        }
        Ok(knots)
    };
    let chicane_knots = |t0: f64, t1: f64| -> Result<Vec<(f64, Pose2)>, SimError> {
        let cx = center_x_for_distance(params.chicane_distance, dims, dy, 0.0)?;
        let n = ((t1 - t0) * params.frame_rate).round() as usize;
        let mut knots = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = t0 + (t1 - t0) * i as f64 / n.max(1) as f64;
            let yaw = params.chicane_amplitude
                * (std::f64::consts::TAU * (t - t0) / params.chicane_period).sin();
            knots.push((t, Pose2::new(cx, dy, yaw)));
        }
        Ok(knots)
    };

    let obstacles = match kind {
        Scenario::Approach => vec![Obstacle {
            dims,
            class: ObstacleClass::Vehicle,
            trajectory: approach_knots(params.start_distance, params.end_distance, 0.0, t_end)?,
        }],
        Scenario::Chicane => vec![Obstacle {
            dims,
            class: ObstacleClass::Vehicle,
            trajectory: chicane_knots(0.0, t_end)?,
        }],
        Scenario::Lap => {
            let mid = t_end * 0.5;
            let mut traj =
                approach_knots(params.start_distance, params.chicane_distance, 0.0, mid)?;
            let mut tail = chicane_knots(mid, t_end)?;
            tail.remove(0); // shared knot at the seam
            traj.append(&mut tail);
            vec![Obstacle { dims, class: ObstacleClass::Vehicle, trajectory: traj }]
        }
        Scenario::MultiObstacle => {
            let van = Obstacle {
                dims,
                class: ObstacleClass::Vehicle,
                trajectory: approach_knots(params.start_distance, params.end_distance, 0.0, t_end)?,
            };
            let second = Obstacle {
                dims,
                class: ObstacleClass::Vehicle,
                trajectory: vec![
                    (0.0, Pose2::new(14.0, -5.0, 0.0)),
                    (t_end, Pose2::new(9.0, -5.0, 0.0)),
                ],
            };
            let pedestrian = Obstacle {
                dims: params.pedestrian_dims,
                class: ObstacleClass::Pedestrian,
                trajectory: vec![
                    (0.0, Pose2::new(7.0, 5.0, 0.0)),
                    (t_end, Pose2::new(7.0, 3.0, 0.0)),
                ],
            };
            vec![van, second, pedestrian]
        }
    };

    Ok(Scene { ground, obstacles, ego_trajectory: static_ego(t_end) })
}

pub const GROUND_TRUTH_FILE: &str = "ground_truth.csv";
const GROUND_TRUTH_HEADER: &str =
    "t,obstacle_id,class,dist_nearest,dist_center,rel_heading,cx,cy,yaw,length,width,height";

pub fn write_ground_truth(path: &Path, records: &[GroundTruthRecord]) -> Result<(), SimError> {
    let mut out = String::from(GROUND_TRUTH_HEADER);
    out.push('\n');
    for rec in records {
        for e in &rec.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                fmt_float(rec.timestamp),
                e.obstacle_id,
                e.class.as_str(),
                fmt_float(e.dist_nearest),
                fmt_float(e.dist_center),
                fmt_float(e.rel_heading),
                fmt_float(e.bbox.center.x),
                fmt_float(e.bbox.center.y),
                fmt_float(e.bbox.yaw),
                fmt_float(e.bbox.length),
                fmt_float(e.bbox.width),
                fmt_float(e.bbox.height),
            ));
        }
    }
    fs::write(path, out).map_err(|source| SimError::Io { path: path.to_path_buf(), source })
}

pub fn read_ground_truth(path: &Path) -> Result<Vec<GroundTruthRecord>, SimError> {
    let text = fs::read_to_string(path)
        .map_err(|source| SimError::Io { path: path.to_path_buf(), source })?;
    let err = |line: usize, message: String| SimError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut records: Vec<GroundTruthRecord> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line_no == 1 {
            if line != GROUND_TRUTH_HEADER {
                return Err(err(line_no, format!("unexpected header `{line}`")));
            }
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 12 {
            return Err(err(line_no, format!("expected 12 fields, found {}", f.len())));
        }
        let num = |s: &str, name: &str| -> Result<f64, SimError> {
            s.parse::<f64>().map_err(|e| err(line_no, format!("bad {name} `{s}`: {e}")))
        };
        let t = num(f[0], "t")?;
        let obstacle_id = f[1]
            .parse::<usize>()
            .map_err(|e| err(line_no, format!("bad obstacle_id `{}`: {e}", f[1])))?;
        let class = ObstacleClass::parse(f[2])
            .ok_or_else(|| err(line_no, format!("unknown class `{}`", f[2])))?;
        let entry = TruthEntry {
            obstacle_id,
            class,
            dist_nearest: num(f[3], "dist_nearest")?,
            dist_center: num(f[4], "dist_center")?,
            rel_heading: num(f[5], "rel_heading")?,
            bbox: OrientedBox3::new(
                Vec3::new(num(f[6], "cx")?, num(f[7], "cy")?, num(f[11], "height")? * 0.5),
                num(f[9], "length")?,
                num(f[10], "width")?,
                num(f[11], "height")?,
                num(f[8], "yaw")?,
                true,
                false,
            ),
        };
        match records.last_mut() {
            Some(rec) if rec.timestamp == t => rec.entries.push(entry),
            _ => records.push(GroundTruthRecord { timestamp: t, entries: vec![entry] }),
        }
    }
    Ok(records)
}
