//! Detection-versus-truth metrics: greedy matching, per-frame distance and
//! heading error series, and oriented-footprint IoU.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::cloud_io::fmt_float;
use crate::detect::DetectionFrame;
use crate::geom::{heading_difference, wrap_half_angle, OrientedBox3, Vec2};
use crate::simulate::GroundTruthRecord;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("frame {index}: truth timestamp {truth_t} does not match frame timestamp {frame_t}")]
    TimestampMismatch { index: usize, truth_t: f64, frame_t: f64 },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// One truth obstacle paired with one detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub truth_id: usize,
    pub detection_index: usize,
    /// Ground-plane distance between box centers.
    pub center_distance: f64,
}

/// Greedy nearest-center matching in ascending distance order; pairs beyond
/// `max_dist` stay unmatched. Ties break on (truth id, detection index), so
/// the result is deterministic.
pub fn match_detections(
    truth: &GroundTruthRecord,
    frame: &DetectionFrame,
    max_dist: f64,
) -> Vec<MatchedPair> {
    let mut candidates: Vec<MatchedPair> = Vec::new();
    for entry in &truth.entries {
        for (di, det) in frame.detections.iter().enumerate() {
            let d = entry.bbox.center.xy().distance(det.bbox.center.xy());
            if d <= max_dist {
                candidates.push(MatchedPair {
                    truth_id: entry.obstacle_id,
                    detection_index: di,
                    center_distance: d,
                });
            }
        }
    }
    candidates.sort_by(|a, b| {
        a.center_distance
            .total_cmp(&b.center_distance)
            .then(a.truth_id.cmp(&b.truth_id))
            .then(a.detection_index.cmp(&b.detection_index))
    });

    let mut truth_used = vec![false; truth.entries.len()];
    let truth_slot: Vec<usize> = truth.entries.iter().map(|e| e.obstacle_id).collect();
    let mut det_used = vec![false; frame.detections.len()];
    let mut pairs = Vec::new();
    for c in candidates {
        let slot = truth_slot.iter().position(|&id| id == c.truth_id).unwrap();
        if !truth_used[slot] && !det_used[c.detection_index] {
            truth_used[slot] = true;
            det_used[c.detection_index] = true;
            pairs.push(c);
        }
    }
    pairs
}

/// One evaluation row: a truth obstacle in one frame.
#[derive(Debug, Clone)]
pub struct ErrorRow {
    pub timestamp: f64,
    pub obstacle_id: usize,
    pub matched: bool,
    /// Ego origin to the nearest face of the matched box (NaN when missed).
    pub dist_est: f64,
    pub dist_true: f64,
    /// Matched box yaw, absent when the detector claimed no heading.
    pub heading_est: Option<f64>,
    pub heading_true: f64,
}

impl ErrorRow {
    pub fn dist_err(&self) -> f64 {
        (self.dist_est - self.dist_true).abs()
    }

    /// Heading error magnitude modulo pi, radians.
    pub fn heading_err_abs(&self) -> Option<f64> {
        self.heading_est.map(|est| heading_difference(est, self.heading_true))
    }

    /// Signed heading error folded to [-pi/2, pi/2), radians. Reported
    /// alongside the magnitude since averaging conventions differ.
    pub fn heading_err_signed(&self) -> Option<f64> {
        self.heading_est.map(|est| wrap_half_angle(est - self.heading_true))
    }
}

#[derive(Debug, Clone)]
pub struct ErrorSeries {
    pub rows: Vec<ErrorRow>,
    pub matched_count: usize,
    pub miss_count: usize,
    /// Mean absolute nearest-face distance error over matched rows (meters).
    pub mean_abs_distance_error: f64,
    /// Mean absolute heading error over matched rows with a heading (degrees).
    pub mean_abs_heading_error_deg: f64,
    /// Mean signed heading error, same rows (degrees).
    pub mean_signed_heading_error_deg: f64,
}

impl ErrorSeries {
    fn from_rows(rows: Vec<ErrorRow>) -> Self {
        let matched: Vec<&ErrorRow> = rows.iter().filter(|r| r.matched).collect();
        let with_heading: Vec<&ErrorRow> =
            matched.iter().copied().filter(|r| r.heading_est.is_some()).collect();
        let mean = |values: &mut dyn Iterator<Item = f64>, n: usize| {
            if n == 0 {
                0.0
            } else {
                values.sum::<f64>() / n as f64
            }
        };
        let mean_abs_distance_error =
            mean(&mut matched.iter().map(|r| r.dist_err()), matched.len());
        let mean_abs_heading_error_deg = mean(
            &mut with_heading.iter().map(|r| r.heading_err_abs().unwrap().to_degrees()),
            with_heading.len(),
        );
        let mean_signed_heading_error_deg = mean(
            &mut with_heading.iter().map(|r| r.heading_err_signed().unwrap().to_degrees()),
            with_heading.len(),
        );
        let matched_count = matched.len();
        let miss_count = rows.len() - matched_count;
        Self {
            rows,
            matched_count,
            miss_count,
            mean_abs_distance_error,
            mean_abs_heading_error_deg,
            mean_signed_heading_error_deg,
        }
    }
}

/// Builds the error series for an aligned (truth, detections) sequence.
/// The estimated distance uses the same nearest-face definition as the
/// simulator ground truth; heading errors are modulo pi.
pub fn compute_error_series(
    pairs: &[(GroundTruthRecord, DetectionFrame)],
    max_dist: f64,
) -> Result<ErrorSeries, EvalError> {
    let mut rows = Vec::new();
    for (index, (truth, frame)) in pairs.iter().enumerate() {
        if (truth.timestamp - frame.timestamp).abs() > 1e-6 {
            return Err(EvalError::TimestampMismatch {
                index,
                truth_t: truth.timestamp,
                frame_t: frame.timestamp,
            });
        }
        let matches = match_detections(truth, frame, max_dist);
        for entry in &truth.entries {
            let hit = matches.iter().find(|m| m.truth_id == entry.obstacle_id);
            let row = match hit {
                Some(m) => {
                    let det = &frame.detections[m.detection_index];
                    ErrorRow {
                        timestamp: truth.timestamp,
                        obstacle_id: entry.obstacle_id,
                        matched: true,
                        dist_est: det.bbox.nearest_face_distance(),
                        dist_true: entry.dist_nearest,
                        heading_est: det.bbox.heading_valid.then_some(det.bbox.yaw),
                        heading_true: entry.rel_heading,
                    }
                }
                None => ErrorRow {
                    timestamp: truth.timestamp,
                    obstacle_id: entry.obstacle_id,
                    matched: false,
                    dist_est: f64::NAN,
                    dist_true: entry.dist_nearest,
                    heading_est: None,
                    heading_true: entry.rel_heading,
                },
            };
            rows.push(row);
        }
    }
    Ok(ErrorSeries::from_rows(rows))
}

/// IoU of the two boxes' ground-plane footprints (convex quad clipping).
pub fn footprint_iou(a: &OrientedBox3, b: &OrientedBox3) -> f64 {
    let fa = a.footprint().to_vec();
    let fb = b.footprint();
    let mut clipped = fa;
    for i in 0..4 {
        let edge_a = fb[i];
        let edge_b = fb[(i + 1) % 4];
        clipped = clip_half_plane(&clipped, edge_a, edge_b);
        if clipped.is_empty() {
            return 0.0;
        }
    }
    let inter = polygon_area(&clipped);
    let area_a = a.length * a.width;
    let area_b = b.length * b.width;
    let union = area_a + area_b - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Keeps the part of `poly` on the left of the directed edge a -> b.
fn clip_half_plane(poly: &[Vec2], a: Vec2, b: Vec2) -> Vec<Vec2> {
    let inside = |p: Vec2| (b - a).cross(p - a) >= 0.0;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let cur = poly[i];
        let next = poly[(i + 1) % poly.len()];
        let (cin, nin) = (inside(cur), inside(next));
        if cin {
            out.push(cur);
        }
        if cin != nin {
            let denom = (b - a).cross(next - cur);
            if denom.abs() > 1e-30 {
                let t = (b - a).cross(a - cur) / denom;
                out.push(cur + (next - cur) * t);
            }
        }
    }
    out
}

fn polygon_area(poly: &[Vec2]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..poly.len() {
        let j = (i + 1) % poly.len();
        twice += poly[i].cross(poly[j]);
    }
    twice.abs() * 0.5
}

const ERROR_CSV_HEADER: &str = "t,obstacle_id,matched,dist_est,dist_true,dist_err,heading_est_deg,heading_true_deg,heading_err_abs_deg,heading_err_signed_deg";

/// Heading for plot columns: folded to [-90, 90) degrees so estimated and
/// true curves overlay under the mod-pi convention.
fn fold_deg(h: f64) -> String {
    fmt_float(wrap_half_angle(h).to_degrees())
}

pub fn write_error_csv(path: &Path, series: &ErrorSeries) -> Result<(), EvalError> {
    let mut out = String::from(ERROR_CSV_HEADER);
    out.push('\n');
    for r in &series.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            fmt_float(r.timestamp),
            r.obstacle_id,
            u8::from(r.matched),
            fmt_float(r.dist_est),
            fmt_float(r.dist_true),
            fmt_float(r.dist_err()),
            r.heading_est.map(fold_deg).unwrap_or_else(|| "nan".into()),
            fold_deg(r.heading_true),
            r.heading_err_abs()
                .map(|h| fmt_float(h.to_degrees()))
                .unwrap_or_else(|| "nan".into()),
            r.heading_err_signed()
                .map(|h| fmt_float(h.to_degrees()))
                .unwrap_or_else(|| "nan".into()),
        ));
    }
    fs::write(path, out).map_err(|source| EvalError::Io { path: path.to_path_buf(), source })
}

/// Plot-friendly whitespace table of the same series.
pub fn write_gnuplot_dat(path: &Path, series: &ErrorSeries) -> Result<(), EvalError> {
    let mut out = String::from("# t obstacle_id dist_est dist_true heading_est_deg heading_true_deg\n");
    for r in &series.rows {
        out.push_str(&format!(
            "{} {} {} {} {} {}\n",
            fmt_float(r.timestamp),
            r.obstacle_id,
            fmt_float(r.dist_est),
            fmt_float(r.dist_true),
            r.heading_est.map(fold_deg).unwrap_or_else(|| "nan".into()),
            fold_deg(r.heading_true),
        ));
    }
    fs::write(path, out).map_err(|source| EvalError::Io { path: path.to_path_buf(), source })
}
