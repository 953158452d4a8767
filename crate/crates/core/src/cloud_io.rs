//! Frame serialization, dataset directory layout, and plane decimation.
//!
//! A frame is a UTF-8 CSV with header `x,y,z,ring` and one point per row,
//! meters with at most 9 significant digits; the ring field may be empty. A
//! leading `# t=<seconds>` comment carries the frame timestamp. A sequence is
//! a directory of `frame_<%06d>.csv` plus an optional `ground_truth.csv`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::geom::{Point3, PointCloud};

#[derive(Debug, Error)]
pub enum CloudIoError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("point {index} has no ring index; decimation requires one per point")]
    MissingRing { index: usize },
    #[error("sequence timestamps not strictly increasing at frame {index}")]
    NonMonotonicTimestamps { index: usize },
    #[error("no frame files found in {path}")]
    EmptySequence { path: PathBuf },
}

/// One frame on disk: the cloud, its timestamp, and (when read as part of a
/// sequence) the frame index used to join against ground-truth records.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub timestamp: f64,
    pub cloud: PointCloud,
    pub truth_key: Option<u64>,
}

impl FrameRecord {
    pub fn new(timestamp: f64, cloud: PointCloud) -> Self {
        Self { timestamp, cloud, truth_key: None }
    }
}

/// Rounds to 9 significant digits; the decimal form then reparses exactly.
fn sig9(v: f64) -> f64 {
    format!("{v:.8e}").parse().expect("sig9: formatted float must reparse")
}

/// Formats a float for CSV output: 9 significant digits, shortest decimal.
pub(crate) fn fmt_float(v: f64) -> String {
    format!("{}", sig9(v))
}

pub fn write_frame(record: &FrameRecord, path: &Path) -> Result<(), CloudIoError> {
    let io_err = |source| CloudIoError::Io { path: path.to_path_buf(), source };
    let mut out = String::new();
    out.push_str(&format!("# t={}\n", fmt_float(record.timestamp)));
    out.push_str("x,y,z,ring\n");
    for p in &record.cloud.points {
        let ring = p.ring.map(|r| r.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_float(p.x),
            fmt_float(p.y),
            fmt_float(p.z),
            ring
        ));
    }
    let mut file = fs::File::create(path).map_err(io_err)?;
    file.write_all(out.as_bytes()).map_err(io_err)
}

pub fn read_frame(path: &Path) -> Result<FrameRecord, CloudIoError> {
    let text = fs::read_to_string(path)
        .map_err(|source| CloudIoError::Io { path: path.to_path_buf(), source })?;
    let parse_err = |line: usize, message: String| CloudIoError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut timestamp = None;
    let mut header_seen = false;
    let mut has_ring_column = true;
    let mut points = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(t) = rest.trim().strip_prefix("t=") {
                timestamp = Some(
                    t.trim()
                        .parse::<f64>()
                        .map_err(|e| parse_err(line_no, format!("bad timestamp: {e}")))?,
                );
            }
            continue;
        }
        if !header_seen {
            match line {
                "x,y,z,ring" => has_ring_column = true,
                "x,y,z" => has_ring_column = false,
                other => {
                    return Err(parse_err(line_no, format!("unexpected header `{other}`")));
                }
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let expected = if has_ring_column { 4 } else { 3 };
        if fields.len() != expected {
            return Err(parse_err(
                line_no,
                format!("expected {expected} fields, found {}", fields.len()),
            ));
        }
        let coord = |s: &str, name: &str| -> Result<f64, CloudIoError> {
            s.parse::<f64>().map_err(|e| parse_err(line_no, format!("bad {name} `{s}`: {e}")))
        };
        let x = coord(fields[0], "x")?;
        let y = coord(fields[1], "y")?;
        let z = coord(fields[2], "z")?;
        let ring = if has_ring_column && !fields[3].is_empty() {
            Some(
                fields[3]
                    .parse::<u32>()
                    .map_err(|e| parse_err(line_no, format!("bad ring `{}`: {e}", fields[3])))?,
            )
        } else {
            None
        };
        points.push(Point3 { x, y, z, ring });
    }
    if !header_seen {
        return Err(parse_err(1, "missing header".to_string()));
    }

    let timestamp = timestamp.unwrap_or(0.0);
    let mut cloud = PointCloud::new("ego", timestamp);
    cloud.points = points;
    Ok(FrameRecord::new(timestamp, cloud))
}

/// Keeps exactly the points whose ring satisfies `keep`, preserving order,
/// and renumbers the surviving rings densely in ascending original order.
/// Emulates a lower-resolution sensor from a recorded higher-resolution one.
pub fn decimate_planes<F>(cloud: &PointCloud, keep: F) -> Result<PointCloud, CloudIoError>
where
    F: Fn(u32) -> bool,
{
    let mut kept_rings: Vec<u32> = Vec::new();
    for (i, p) in cloud.points.iter().enumerate() {
        let ring = p.ring.ok_or(CloudIoError::MissingRing { index: i })?;
        if keep(ring) && !kept_rings.contains(&ring) {
            kept_rings.push(ring);
        }
    }
    kept_rings.sort_unstable();

    let mut out = PointCloud::new(cloud.frame_id.clone(), cloud.timestamp);
    for p in &cloud.points {
        let ring = p.ring.expect("checked above");
        if let Ok(new_ring) = kept_rings.binary_search(&ring) {
            out.points.push(Point3 { ring: Some(new_ring as u32), ..*p });
        }
    }
    Ok(out)
}

/// Which rings to keep when halving a cloud's plane count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecimationRule {
    /// Keep even ring indices (default; keeps the vertical field of view
    /// symmetric).
    Even,
    Odd,
    All,
}

impl DecimationRule {
    pub fn keeps(self, ring: u32) -> bool {
        match self {
            DecimationRule::Even => ring.is_multiple_of(2),
            DecimationRule::Odd => ring % 2 == 1,
            DecimationRule::All => true,
        }
    }
}

pub fn frame_file_name(index: u64) -> String {
    format!("frame_{index:06}.csv")
}

pub fn write_sequence(dir: &Path, frames: &[FrameRecord]) -> Result<(), CloudIoError> {
    fs::create_dir_all(dir).map_err(|source| CloudIoError::Io { path: dir.to_path_buf(), source })?;
    for (i, frame) in frames.iter().enumerate() {
        write_frame(frame, &dir.join(frame_file_name(i as u64)))?;
    }
    Ok(())
}

/// Reads all `frame_*.csv` files in `dir`, ordered by frame index. Frames
/// without an embedded timestamp get their index as the timestamp so a foreign
/// directory still yields a strictly increasing sequence.
pub fn read_sequence(dir: &Path) -> Result<Vec<FrameRecord>, CloudIoError> {
    let entries =
        fs::read_dir(dir).map_err(|source| CloudIoError::Io { path: dir.to_path_buf(), source })?;
    let mut indexed: Vec<(u64, PathBuf)> = Vec::new();
    for entry in entries {
        let entry =
            entry.map_err(|source| CloudIoError::Io { path: dir.to_path_buf(), source })?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        if let Some(idx) = name
            .strip_prefix("frame_")
            .and_then(|rest| rest.strip_suffix(".csv"))
            .and_then(|digits| digits.parse::<u64>().ok())
        {
            indexed.push((idx, entry.path()));
        }
    }
    if indexed.is_empty() {
        return Err(CloudIoError::EmptySequence { path: dir.to_path_buf() });
    }
    indexed.sort_by_key(|(idx, _)| *idx);

    let mut frames = Vec::with_capacity(indexed.len());
    let mut prev_t = f64::NEG_INFINITY;
    for (i, (idx, path)) in indexed.iter().enumerate() {
        let mut frame = read_frame(path)?;
        if frame.timestamp == 0.0 && i > 0 {
            frame.timestamp = *idx as f64;
            frame.cloud.timestamp = frame.timestamp;
        }
        frame.truth_key = Some(*idx);
        if frame.timestamp <= prev_t {
            return Err(CloudIoError::NonMonotonicTimestamps { index: i });
        }
        prev_t = frame.timestamp;
        frames.push(frame);
    }
    Ok(frames)
}
