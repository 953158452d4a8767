//! Oriented 3D obstacle boxes from sparse lidar pointclouds.
//!
//! Two detection pipelines share a common front end (ground removal, ROI
//! crop, binary occupancy grid, morphology, clustering):
//!
//! - [`detect::detect_16`] refines each cluster against the raw points by
//!   fitting a vertical plane to the dominant obstacle face and anchoring
//!   the box to it. Works well from 16-ring clouds.
//! - [`detect::detect_8`] recovers the heading from the grid itself, via
//!   rectangle corner extrapolation when two sides are visible and a
//!   consensus line otherwise. Works down to a handful of rings, at the
//!   cost of grid discretization noise and lower-bound heights.
//!
//! A deterministic raycasting simulator ([`simulate`]) and an evaluation
//! harness ([`eval`]) generate scenes with exact ground truth and score the
//! detectors against it.

pub mod cloud_io;
pub mod config;
pub mod detect;
pub mod eval;
pub mod fit;
pub mod geom;
pub mod grid;
pub mod preprocess;
pub mod rng;
pub mod simulate;

pub use detect::{detect_16, detect_8, run_detector, DetectionFrame, Mode, PipelineConfig};
pub use geom::{OrientedBox3, Point3, PointCloud};
