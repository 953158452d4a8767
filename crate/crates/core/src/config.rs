//! Flat INI-style configuration: `[section]` headers and `key = value`
//! lines. Every pipeline default lives in `defaults.config` at the repo
//! root; a config file only needs the keys it overrides. Unknown keys in
//! pipeline-owned sections are errors, so typos fail loudly.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::cloud_io::DecimationRule;
use crate::detect::{Mode, PipelineConfig};
use crate::grid::Connectivity;
use crate::simulate::{LidarModel, ScenarioParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("config key [{section}] {key}: {reason}")]
    Invalid { section: String, key: String, reason: String },
    #[error("unknown config key [{section}] {key}")]
    Unknown { section: String, key: String },
}

/// Parsed key-value store, keyed by (section, key).
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<(String, String), String>,
}

impl ConfigFile {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                    line: line_no,
                    message: "unterminated section header".into(),
                })?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                message: format!("expected `key = value`, found `{line}`"),
            })?;
            values.insert(
                (section.clone(), key.trim().to_string()),
                value.trim().to_string(),
            );
        }
        Ok(Self { values })
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.values.get(&(section.to_string(), key.to_string())).map(String::as_str)
    }

    fn parse_with<T, F>(&self, section: &str, key: &str, parse: F) -> Result<Option<T>, ConfigError>
    where
        F: Fn(&str) -> Result<T, String>,
    {
        match self.get(section, key) {
            None => Ok(None),
            Some(raw) => parse(raw).map(Some).map_err(|reason| ConfigError::Invalid {
                section: section.into(),
                key: key.into(),
                reason,
            }),
        }
    }

    pub fn get_f64(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        self.parse_with(section, key, |s| s.parse::<f64>().map_err(|e| e.to_string()))
    }

    pub fn get_usize(&self, section: &str, key: &str) -> Result<Option<usize>, ConfigError> {
        self.parse_with(section, key, |s| s.parse::<usize>().map_err(|e| e.to_string()))
    }

    pub fn get_u64(&self, section: &str, key: &str) -> Result<Option<u64>, ConfigError> {
        self.parse_with(section, key, |s| s.parse::<u64>().map_err(|e| e.to_string()))
    }

    pub fn get_bool(&self, section: &str, key: &str) -> Result<Option<bool>, ConfigError> {
        self.parse_with(section, key, |s| match s {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(format!("expected true or false, found `{other}`")),
        })
    }

    /// Fails on any key in `section` outside the allowed list.
    fn ensure_known(&self, section: &str, allowed: &[&str]) -> Result<(), ConfigError> {
        for (sec, key) in self.values.keys() {
            if sec == section && !allowed.contains(&key.as_str()) {
                return Err(ConfigError::Unknown { section: sec.clone(), key: key.clone() });
            }
        }
        Ok(())
    }
}

const GROUND_KEYS: &[&str] =
    &["num_lpr", "seed_margin", "dist_threshold", "num_iterations", "seed_forward_max"];
const ROI_KEYS: &[&str] = &["max_height", "lateral_half_width", "forward_min", "forward_max"];
const GRID_KEYS: &[&str] =
    &["cell_size", "x_min", "x_max", "y_min", "y_max", "occupancy_threshold"];
const CLUSTER_KEYS: &[&str] =
    &["min_area", "max_area", "min_side", "max_side", "pedestrian_max_side"];
const RANSAC_KEYS: &[&str] = &["max_iterations", "inlier_tolerance", "min_inliers", "rng_seed"];
const DETECT_KEYS: &[&str] = &[
    "crop_margin",
    "visible_side_min",
    "min_box_size",
    "close_radius",
    "cluster_bridge",
    "connectivity",
];
const HEADING_KEYS: &[&str] = &["use_raw_points", "face_width_max"];

/// Builds a pipeline configuration: mode defaults, then file overrides, and
/// for the eight-plane mode the `[eight_plane]` overrides (dotted
/// `section.key` entries) last.
pub fn pipeline_config_from(cfg: &ConfigFile, mode: Mode) -> Result<PipelineConfig, ConfigError> {
    let mut pc = PipelineConfig::for_mode(mode);
    apply_pipeline_sections(cfg, &mut pc)?;

    cfg.ensure_known("ground", GROUND_KEYS)?;
    cfg.ensure_known("roi", ROI_KEYS)?;
    cfg.ensure_known("grid", GRID_KEYS)?;
    cfg.ensure_known("cluster", CLUSTER_KEYS)?;
    cfg.ensure_known("ransac", RANSAC_KEYS)?;
    cfg.ensure_known("detect", DETECT_KEYS)?;
    cfg.ensure_known("heading", HEADING_KEYS)?;

    if mode == Mode::EightPlane {
        let mut dotted_allowed: Vec<String> = Vec::new();
        for (section, keys) in [
            ("grid", GRID_KEYS),
            ("cluster", CLUSTER_KEYS),
            ("ransac", RANSAC_KEYS),
            ("detect", DETECT_KEYS),
            ("ground", GROUND_KEYS),
            ("roi", ROI_KEYS),
            ("heading", HEADING_KEYS),
        ] {
            dotted_allowed.extend(keys.iter().map(|k| format!("{section}.{k}")));
        }
        let mut overrides = ConfigFile::empty();
        for ((sec, key), value) in &cfg.values {
            if sec == "eight_plane" {
                if !dotted_allowed.contains(key) {
                    return Err(ConfigError::Unknown { section: sec.clone(), key: key.clone() });
                }
                let (target_sec, target_key) = key.split_once('.').unwrap();
                overrides
                    .values
                    .insert((target_sec.to_string(), target_key.to_string()), value.clone());
            }
        }
        apply_pipeline_sections(&overrides, &mut pc)?;
    }
    Ok(pc)
}

fn apply_pipeline_sections(cfg: &ConfigFile, pc: &mut PipelineConfig) -> Result<(), ConfigError> {
    macro_rules! set {
        ($getter:ident, $section:expr, $key:expr, $target:expr) => {
            if let Some(v) = cfg.$getter($section, $key)? {
                $target = v;
            }
        };
    }
    set!(get_usize, "ground", "num_lpr", pc.ground.num_lpr);
    set!(get_f64, "ground", "seed_margin", pc.ground.seed_margin);
    set!(get_f64, "ground", "dist_threshold", pc.ground.dist_threshold);
    set!(get_usize, "ground", "num_iterations", pc.ground.num_iterations);
    set!(get_f64, "ground", "seed_forward_max", pc.ground.seed_forward_max);

    set!(get_f64, "roi", "max_height", pc.roi.max_height);
    set!(get_f64, "roi", "lateral_half_width", pc.roi.lateral_half_width);
    set!(get_f64, "roi", "forward_min", pc.roi.forward_min);
    set!(get_f64, "roi", "forward_max", pc.roi.forward_max);

    set!(get_f64, "grid", "cell_size", pc.grid.cell_size);
    set!(get_f64, "grid", "x_min", pc.grid.x_min);
    set!(get_f64, "grid", "x_max", pc.grid.x_max);
    set!(get_f64, "grid", "y_min", pc.grid.y_min);
    set!(get_f64, "grid", "y_max", pc.grid.y_max);
    set!(get_usize, "grid", "occupancy_threshold", pc.grid.occupancy_threshold);

    set!(get_f64, "cluster", "min_area", pc.cluster.min_area);
    set!(get_f64, "cluster", "max_area", pc.cluster.max_area);
    set!(get_f64, "cluster", "min_side", pc.cluster.min_side);
    set!(get_f64, "cluster", "max_side", pc.cluster.max_side);
    set!(get_f64, "cluster", "pedestrian_max_side", pc.cluster.pedestrian_max_side);

    set!(get_usize, "ransac", "max_iterations", pc.ransac.max_iterations);
    set!(get_f64, "ransac", "inlier_tolerance", pc.ransac.inlier_tolerance);
    set!(get_usize, "ransac", "min_inliers", pc.ransac.min_inliers);
    set!(get_u64, "ransac", "rng_seed", pc.ransac.rng_seed);

    set!(get_f64, "detect", "crop_margin", pc.crop_margin);
    set!(get_f64, "detect", "visible_side_min", pc.visible_side_min);
    set!(get_f64, "detect", "min_box_size", pc.min_box_size);
    set!(get_usize, "detect", "close_radius", pc.close_radius);
    set!(get_usize, "detect", "cluster_bridge", pc.cluster_bridge);
    if let Some(v) = cfg.get_usize("detect", "connectivity")? {
        pc.connectivity = match v {
            4 => Connectivity::Four,
            8 => Connectivity::Eight,
            other => {
                return Err(ConfigError::Invalid {
                    section: "detect".into(),
                    key: "connectivity".into(),
                    reason: format!("expected 4 or 8, found {other}"),
                })
            }
        };
    }
    set!(get_bool, "heading", "use_raw_points", pc.heading_use_raw_points);
    set!(get_f64, "heading", "face_width_max", pc.face_width_max);
    Ok(())
}

/// Lidar model from the `[lidar]` section; angles are degrees in the file.
pub fn lidar_model_from(cfg: &ConfigFile) -> Result<LidarModel, ConfigError> {
    cfg.ensure_known(
        "lidar",
        &[
            "rings",
            "elevation_min_deg",
            "elevation_max_deg",
            "azimuth_step_deg",
            "max_range",
            "noise_sigma",
            "mount_height",
        ],
    )?;
    let defaults = LidarModel::default_16();
    let rings = cfg.get_usize("lidar", "rings")?.unwrap_or(defaults.rings());
    let el_min = cfg.get_f64("lidar", "elevation_min_deg")?.unwrap_or(-15.0).to_radians();
    let el_max = cfg.get_f64("lidar", "elevation_max_deg")?.unwrap_or(15.0).to_radians();
    let az_step = cfg.get_f64("lidar", "azimuth_step_deg")?.unwrap_or(0.2).to_radians();
    let max_range = cfg.get_f64("lidar", "max_range")?.unwrap_or(defaults.max_range);
    let sigma = cfg.get_f64("lidar", "noise_sigma")?.unwrap_or(defaults.range_noise_sigma);
    let mount = cfg.get_f64("lidar", "mount_height")?.unwrap_or(defaults.mount_height);
    LidarModel::uniform(rings, el_min, el_max, az_step, max_range, sigma, mount).map_err(|e| {
        ConfigError::Invalid { section: "lidar".into(), key: "rings".into(), reason: e.to_string() }
    })
}

/// Scenario parameters from the `[simulate]` section.
pub fn scenario_params_from(cfg: &ConfigFile) -> Result<ScenarioParams, ConfigError> {
    cfg.ensure_known(
        "simulate",
        &[
            "duration",
            "frame_rate",
            "start_distance",
            "end_distance",
            "lateral_offset",
            "approach_yaw_deg",
            "chicane_distance",
            "chicane_amplitude_deg",
            "chicane_period",
        ],
    )?;
    let mut p = ScenarioParams::default();
    macro_rules! set {
        ($key:expr, $target:expr) => {
            if let Some(v) = cfg.get_f64("simulate", $key)? {
                $target = v;
            }
        };
    }
    set!("duration", p.duration);
    set!("frame_rate", p.frame_rate);
    set!("start_distance", p.start_distance);
    set!("end_distance", p.end_distance);
    set!("lateral_offset", p.lateral_offset);
    set!("chicane_distance", p.chicane_distance);
    set!("chicane_period", p.chicane_period);
    if let Some(deg) = cfg.get_f64("simulate", "chicane_amplitude_deg")? {
        p.chicane_amplitude = deg.to_radians();
    }
    if let Some(deg) = cfg.get_f64("simulate", "approach_yaw_deg")? {
        p.approach_yaw = deg.to_radians();
    }
    Ok(p)
}

/// Ring selection from the `[decimation]` section (`keep = even|odd|all`).
pub fn decimation_rule_from(cfg: &ConfigFile) -> Result<DecimationRule, ConfigError> {
    cfg.ensure_known("decimation", &["keep"])?;
    match cfg.get("decimation", "keep") {
        None | Some("even") => Ok(DecimationRule::Even),
        Some("odd") => Ok(DecimationRule::Odd),
        Some("all") => Ok(DecimationRule::All),
        Some(other) => Err(ConfigError::Invalid {
            section: "decimation".into(),
            key: "keep".into(),
            reason: format!("expected even, odd or all, found `{other}`"),
        }),
    }
}

/// Matching radius from the `[eval]` section.
pub fn eval_max_match_distance(cfg: &ConfigFile) -> Result<f64, ConfigError> {
    cfg.ensure_known("eval", &["max_match_distance"])?;
    Ok(cfg.get_f64("eval", "max_match_distance")?.unwrap_or(3.0))
}
