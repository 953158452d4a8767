//! Ground-plane removal and region-of-interest filtering.
//!
//! Ground removal seeds from the lowest points, fits a plane by principal
//! component analysis, then alternates re-segmentation and refitting. The
//! output cloud keeps mainly points that belong to possible obstacles, plus
//! the fitted plane whose normal drives the later grid projection.

use thiserror::Error;

use crate::geom::{Plane3, PointCloud, Vec3};

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("cloud has {have} points, ground removal needs at least {need}")]
    TooFewPoints { have: usize, need: usize },
    #[error("degenerate plane fit: seed points are collinear or too few")]
    DegenerateFit,
}

/// Knobs for iterative ground-plane extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundParams {
    /// Number of lowest points averaged into the seed height reference.
    pub num_lpr: usize,
    /// Points within this height of the reference become seeds (meters).
    pub seed_margin: f64,
    /// Plane membership distance for re-segmentation (meters).
    pub dist_threshold: f64,
    /// Re-segment/refit rounds after the seed fit.
    pub num_iterations: usize,
    /// Seeding only considers points with |x| below this; far rings graze
    /// the ground at shallow angles and destabilize the seed height.
    pub seed_forward_max: f64,
}

impl Default for GroundParams {
    fn default() -> Self {
        Self {
            num_lpr: 250,
            seed_margin: 0.15,
            dist_threshold: 0.20,
            num_iterations: 3,
            seed_forward_max: 20.0,
        }
    }
}

/// Height and lateral crop applied after ground removal.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiParams {
    /// Keep points at most this far above the ground plane (meters); drops
    /// bridges and overhead signs.
    pub max_height: f64,
    /// Keep points with |y| at most this (meters).
    pub lateral_half_width: f64,
    pub forward_min: f64,
    pub forward_max: f64,
}

impl Default for RoiParams {
    fn default() -> Self {
        Self { max_height: 3.0, lateral_half_width: 20.0, forward_min: -30.0, forward_max: 30.0 }
    }
}

/// Result of ground removal: a partition of the input plus the fitted plane.
#[derive(Debug, Clone)]
pub struct GroundSegmentation {
    pub nonground: PointCloud,
    pub ground: PointCloud,
    pub plane: Plane3,
}

/// Splits `cloud` into ground and non-ground points.
///
/// Procedure: average the `num_lpr` lowest points into a height reference,
/// take every point within `seed_margin` of it as seeds, fit a plane by the
/// smallest principal direction of the seed covariance, then `num_iterations`
/// times re-segment all points by `dist_threshold` and refit. Every removed
/// point lies within `dist_threshold` of the returned plane.
pub fn remove_ground(
    cloud: &PointCloud,
    params: &GroundParams,
) -> Result<GroundSegmentation, PreprocessError> {
    let n = cloud.len();
    if n < params.num_lpr {
        return Err(PreprocessError::TooFewPoints { have: n, need: params.num_lpr });
    }

    let mut seed_region: Vec<usize> =
        (0..n).filter(|&i| cloud.points[i].x.abs() <= params.seed_forward_max).collect();
    if seed_region.len() < params.num_lpr {
        seed_region = (0..n).collect();
    }

    // Height reference: mean z of the num_lpr lowest points in the region.
    let mut by_z = seed_region.clone();
    let k = params.num_lpr.min(by_z.len());
    by_z.select_nth_unstable_by(k - 1, |&a, &b| {
        cloud.points[a].z.total_cmp(&cloud.points[b].z)
    });
    let lpr =
        by_z[..k].iter().map(|&i| cloud.points[i].z).sum::<f64>() / k as f64;

    let seeds: Vec<Vec3> = seed_region
        .iter()
        .map(|&i| cloud.points[i].pos())
        .filter(|p| (p.z - lpr).abs() <= params.seed_margin)
        .collect();
    let mut plane = fit_plane_pca(&seeds)?.canonical_ground();

    for _ in 0..params.num_iterations {
        let ground_pts: Vec<Vec3> = cloud
            .points
            .iter()
            .map(|p| p.pos())
            .filter(|&p| plane.signed_distance(p).abs() <= params.dist_threshold)
            .collect();
        plane = fit_plane_pca(&ground_pts)?.canonical_ground();
    }
    if plane.normal.z <= 0.0 {
        return Err(PreprocessError::DegenerateFit);
    }

    let mut nonground = PointCloud::new(cloud.frame_id.clone(), cloud.timestamp);
    let mut ground = PointCloud::new(cloud.frame_id.clone(), cloud.timestamp);
    for p in &cloud.points {
        if plane.signed_distance(p.pos()).abs() <= params.dist_threshold {
            ground.points.push(*p);
        } else {
            nonground.points.push(*p);
        }
    }
    Ok(GroundSegmentation { nonground, ground, plane })
}

/// Keeps points strictly above the ground plane up to `max_height`
/// (inclusive), within the lateral half width and the forward range.
/// Order is preserved; the operation is idempotent.
pub fn filter_by_roi(cloud: &PointCloud, ground: &Plane3, params: &RoiParams) -> PointCloud {
    let mut out = PointCloud::new(cloud.frame_id.clone(), cloud.timestamp);
    out.points = cloud
        .points
        .iter()
        .filter(|p| {
            let d = ground.signed_distance(p.pos());
            d > 0.0
                && d <= params.max_height
                && p.y.abs() <= params.lateral_half_width
                && p.x >= params.forward_min
                && p.x <= params.forward_max
        })
        .copied()
        .collect();
    out
}

/// Least-squares plane through `points`: smallest principal direction of the
/// centered covariance.
pub(crate) fn fit_plane_pca(points: &[Vec3]) -> Result<Plane3, PreprocessError> {
    if points.len() < 3 {
        return Err(PreprocessError::DegenerateFit);
    }
    let inv_n = 1.0 / points.len() as f64;
    let mut c = Vec3::default();
    for p in points {
        c = c + *p;
    }
    let c = c * inv_n;

    // Covariance, packed [xx, xy, xz, yy, yz, zz].
    let mut cov = [0.0f64; 6];
    for p in points {
        let d = *p - c;
        cov[0] += d.x * d.x;
        cov[1] += d.x * d.y;
        cov[2] += d.x * d.z;
        cov[3] += d.y * d.y;
        cov[4] += d.y * d.z;
        cov[5] += d.z * d.z;
    }
    for v in &mut cov {
        *v *= inv_n;
    }

    let (eigenvalues, normal) = smallest_eigenpair_sym3(cov);
    // Collinear points leave two near-zero eigenvalues and no usable normal.
    let scale = eigenvalues[0].max(1e-30);
    if eigenvalues[1] <= scale * 1e-10 {
        return Err(PreprocessError::DegenerateFit);
    }
    Ok(Plane3::from_point_normal(c, normal))
}

/// Eigenvalues (descending) and the eigenvector of the smallest one for a
/// symmetric 3x3 matrix packed as [xx, xy, xz, yy, yz, zz]. Analytic method:
/// trigonometric eigenvalues, eigenvector from row cross products.
fn smallest_eigenpair_sym3(m: [f64; 6]) -> ([f64; 3], Vec3) {
    let [a11, a12, a13, a22, a23, a33] = m;
    let q = (a11 + a22 + a33) / 3.0;
    let p1 = a12 * a12 + a13 * a13 + a23 * a23;

    let eig = if p1 < 1e-300 {
        let mut d = [a11, a22, a33];
        d.sort_unstable_by(|a, b| b.total_cmp(a));
        d
    } else {
        let p2 = (a11 - q).powi(2) + (a22 - q).powi(2) + (a33 - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let inv_p = 1.0 / p;
        let b11 = (a11 - q) * inv_p;
        let b12 = a12 * inv_p;
        let b13 = a13 * inv_p;
        let b22 = (a22 - q) * inv_p;
        let b23 = a23 * inv_p;
        let b33 = (a33 - q) * inv_p;
        let half_det = (b11 * b22 * b33 + 2.0 * b12 * b13 * b23
            - b11 * b23 * b23
            - b22 * b13 * b13
            - b33 * b12 * b12)
            / 2.0;
        let phi = half_det.clamp(-1.0, 1.0).acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + std::f64::consts::TAU / 3.0).cos();
        [e1, 3.0 * q - e1 - e3, e3]
    };

    let lambda = eig[2];
    // Rows of (A - lambda I); any two independent rows cross to the kernel.
    let r0 = Vec3::new(a11 - lambda, a12, a13);
    let r1 = Vec3::new(a12, a22 - lambda, a23);
    let r2 = Vec3::new(a13, a23, a33 - lambda);
    let candidates = [r0.cross(r1), r0.cross(r2), r1.cross(r2)];
    let best = candidates
        .into_iter()
        .max_by(|a, b| a.dot(*a).total_cmp(&b.dot(*b)))
        .unwrap();
    let normal = best.normalized().unwrap_or(Vec3::new(0.0, 0.0, 1.0));
    (eig, normal)
}
