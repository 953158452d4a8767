//! Robust geometric estimators serving both detectors: RANSAC line fitting,
//! a ground-constrained vertical-plane variant, monotone-chain convex hull,
//! and rectangle corner extrapolation for partially observed vehicles.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

use crate::geom::{wrap_half_angle, GroundFrame, Line2, Plane3, Point3, Vec2};
use crate::rng::SplitMix64;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("empty input")]
    EmptyInput,
    #[error("{have} points given, {need} required")]
    TooFewPoints { have: usize, need: usize },
    #[error("degenerate input: points are coincident")]
    Degenerate,
    #[error("no consensus: best candidate has {best} inliers, {required} required")]
    NoConsensus { best: usize, required: usize },
}

/// Seeded RANSAC knobs. The tolerance should track the data's discretization:
/// about 1.5 cells for grid-cell centers, 0.05 m for raw projected points.
#[derive(Debug, Clone, PartialEq)]
pub struct RansacParams {
    pub max_iterations: usize,
    pub inlier_tolerance: f64,
    pub min_inliers: usize,
    pub rng_seed: u64,
}

impl Default for RansacParams {
    fn default() -> Self {
        Self { max_iterations: 200, inlier_tolerance: 0.05, min_inliers: 5, rng_seed: 0 }
    }
}

/// Convex polygon, vertices counter-clockwise, no three collinear.
#[derive(Debug, Clone, PartialEq)]
pub struct HullPolygon {
    pub vertices: Vec<Vec2>,
}

impl HullPolygon {
    /// Axis-aligned extent (x side, y side) of the hull.
    pub fn bbox_sides(&self) -> (f64, f64) {
        let xs = self.vertices.iter().map(|v| v.x);
        let ys = self.vertices.iter().map(|v| v.y);
        let (x_min, x_max) = min_max(xs);
        let (y_min, y_max) = min_max(ys);
        (x_max - x_min, y_max - y_min)
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        let mut twice = 0.0;
        for i in 0..v.len() {
            let j = (i + 1) % v.len();
            twice += v[i].cross(v[j]);
        }
        twice * 0.5
    }

    /// Point-in-hull test with tolerance; degenerate one- and two-vertex
    /// hulls test distance to the vertex or segment.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => self.vertices[0].distance(p) <= tol,
            2 => segment_distance(self.vertices[0], self.vertices[1], p) <= tol,
            n => (0..n).all(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                (b - a).cross(p - a) >= -tol
            }),
        }
    }
}

fn min_max(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn segment_distance(a: Vec2, b: Vec2, p: Vec2) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Minimal convex polygon containing all points (monotone chain). Collinear
/// boundary points are excluded; duplicate inputs collapse. One and two
/// distinct points yield degenerate hulls.
pub fn convex_hull(points: &[Vec2]) -> Result<HullPolygon, FitError> {
    if points.is_empty() {
        return Err(FitError::EmptyInput);
    }
    let mut sorted: Vec<Vec2> = points.to_vec();
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    sorted.dedup();

    if sorted.len() <= 2 {
        return Ok(HullPolygon { vertices: sorted });
    }

    let cross = |o: Vec2, a: Vec2, b: Vec2| (a - o).cross(b - o);
    let mut hull: Vec<Vec2> = Vec::with_capacity(sorted.len() * 2);
    // Lower hull.
    for &p in &sorted {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    // Upper hull.
    let lower_len = hull.len() + 1;
    for &p in sorted.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Ok(HullPolygon { vertices: hull })
}

/// A consensus line and the indices of its supporting points.
#[derive(Debug, Clone)]
pub struct LineFit {
    pub line: Line2,
    pub inliers: Vec<usize>,
}

/// RANSAC over sampled point pairs: keeps the candidate with the most
/// inliers (ties: smaller sum of squared residuals), then refits by total
/// least squares on the inliers. Deterministic for a fixed seed.
pub fn ransac_line(points: &[Vec2], params: &RansacParams) -> Result<LineFit, FitError> {
    if points.is_empty() {
        return Err(FitError::EmptyInput);
    }
    if points.len() < 2 {
        return Err(FitError::TooFewPoints { have: points.len(), need: 2 });
    }
    let fallback = first_distinct_pair(points).ok_or(FitError::Degenerate)?;

    let mut rng = SplitMix64::new(params.rng_seed);
    let mut best: Option<(usize, f64, Line2)> = None;
    let consider = |line: Line2, best: &mut Option<(usize, f64, Line2)>| {
        let (count, ssr) = score_line(points, &line, params.inlier_tolerance);
        let better = match best {
            None => true,
            Some((bc, bs, _)) => count > *bc || (count == *bc && ssr < *bs),
        };
        if better {
            *best = Some((count, ssr, line));
        }
    };

    consider(Line2::through(points[fallback.0], points[fallback.1]), &mut best);
    for _ in 0..params.max_iterations {
        let i = rng.next_index(points.len());
        let j = rng.next_index(points.len());
        if points[i] == points[j] {
            continue;
        }
        consider(Line2::through(points[i], points[j]), &mut best);
    }

    let (count, _, line) = best.expect("fallback candidate always evaluated");
    if count < params.min_inliers {
        return Err(FitError::NoConsensus { best: count, required: params.min_inliers });
    }
    let inliers: Vec<usize> = (0..points.len())
        .filter(|&i| line.distance(points[i]) <= params.inlier_tolerance)
        .collect();
    let refit = total_least_squares(points, &inliers);
    Ok(LineFit { line: refit, inliers })
}

fn first_distinct_pair(points: &[Vec2]) -> Option<(usize, usize)> {
    points.iter().position(|p| *p != points[0]).map(|j| (0, j))
}

fn score_line(points: &[Vec2], line: &Line2, tol: f64) -> (usize, f64) {
    let mut count = 0;
    let mut ssr = 0.0;
    for p in points {
        let d = line.distance(*p);
        if d <= tol {
            count += 1;
            ssr += d * d;
        }
    }
    (count, ssr)
}

/// Orthogonal-regression line through the indexed subset: the major principal
/// axis of its 2D covariance.
fn total_least_squares(points: &[Vec2], indices: &[usize]) -> Line2 {
    let inv_n = 1.0 / indices.len() as f64;
    let mut c = Vec2::default();
    for &i in indices {
        c = c + points[i];
    }
    let c = c * inv_n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &i in indices {
        let d = points[i] - c;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    Line2::new(c, Vec2::new(theta.cos(), theta.sin()))
}

/// A vertical plane (contains the ground normal) fitted to a cropped cloud.
/// `side_facing` marks fits where no consensus line faced the ego forward
/// axis within 45 degrees, so the plane is likely an obstacle side rather
/// than its back or front.
#[derive(Debug, Clone)]
pub struct VerticalPlaneFit {
    pub plane: Plane3,
    pub inliers: Vec<usize>,
    pub side_facing: bool,
}

/// RANSAC on the points' ground-plane projections, lifted back to 3D as a
/// plane containing the ground normal. Candidate lines whose normal lies
/// within 45 degrees of ego-forward are preferred; the global best is the
/// fallback, flagged `side_facing`.
pub fn fit_vertical_plane(
    points: &[Point3],
    ground: &Plane3,
    params: &RansacParams,
) -> Result<VerticalPlaneFit, FitError> {
    if points.is_empty() {
        return Err(FitError::EmptyInput);
    }
    if points.len() < 2 {
        return Err(FitError::TooFewPoints { have: points.len(), need: 2 });
    }
    let frame = GroundFrame::from_plane(ground);
    let pts2: Vec<Vec2> = points.iter().map(|p| frame.project(p.pos())).collect();
    let fallback = first_distinct_pair(&pts2).ok_or(FitError::Degenerate)?;

    // A line direction d has normal perp(d); that normal is within 45
    // degrees of +x exactly when |d.y| >= |d.x|.
    let faces_forward = |line: &Line2| line.direction.y.abs() >= line.direction.x.abs();

    let mut rng = SplitMix64::new(params.rng_seed);
    let mut best_global: Option<(usize, f64, Line2)> = None;
    let mut best_forward: Option<(usize, f64, Line2)> = None;
    let consider = |line: Line2,
                        best_global: &mut Option<(usize, f64, Line2)>,
                        best_forward: &mut Option<(usize, f64, Line2)>| {
        let (count, ssr) = score_line(&pts2, &line, params.inlier_tolerance);
        let update = |slot: &mut Option<(usize, f64, Line2)>| {
            let better = match slot {
                None => true,
                Some((bc, bs, _)) => count > *bc || (count == *bc && ssr < *bs),
            };
            if better {
                *slot = Some((count, ssr, line));
            }
        };
        update(best_global);
        if faces_forward(&line) {
            update(best_forward);
        }
    };

    consider(Line2::through(pts2[fallback.0], pts2[fallback.1]), &mut best_global, &mut best_forward);
    for _ in 0..params.max_iterations {
        let i = rng.next_index(pts2.len());
        let j = rng.next_index(pts2.len());
        if pts2[i] == pts2[j] {
            continue;
        }
        consider(Line2::through(pts2[i], pts2[j]), &mut best_global, &mut best_forward);
    }

    // A forward-facing candidate qualifies only with both the absolute
    // minimum support and a reasonable share of the global best's: close
    // obstacles show their side with thousands of points, and a stray
    // diagonal through them must not masquerade as a front/back face.
    let global = best_global.expect("fallback candidate always evaluated");
    let (chosen, side_facing) = match best_forward {
        Some(fwd) if fwd.0 >= params.min_inliers && 4 * fwd.0 >= global.0 => (fwd, false),
        _ => (global, true),
    };
    if chosen.0 < params.min_inliers {
        return Err(FitError::NoConsensus { best: chosen.0, required: params.min_inliers });
    }

    let inliers: Vec<usize> = (0..pts2.len())
        .filter(|&i| chosen.2.distance(pts2[i]) <= params.inlier_tolerance)
        .collect();
    let line = total_least_squares(&pts2, &inliers);
    let n2 = line.direction.perp();
    let normal = frame.ex * n2.x + frame.ey * n2.y;
    let plane = Plane3::from_point_normal(frame.lift(line.point, 0.0), normal);
    Ok(VerticalPlaneFit { plane, inliers, side_facing })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadingSource {
    TwoSides,
    RansacLine,
}

/// Rectangle recovered from three observed corners plus one extrapolated one.
/// `corners` is ordered (A, B, C, D) with B the observed corner between the
/// two visible sides and D = A + C - B the hidden corner.
#[derive(Debug, Clone)]
pub struct RectangleEstimate {
    pub corners: [Vec2; 4],
    pub yaw: f64,
    pub source: HeadingSource,
}

/// Maximum deviation from a right angle still accepted at the corner vertex.
const CORNER_ANGLE_SLACK: f64 = 35.0 * std::f64::consts::PI / 180.0;

/// Recovers a rectangle from an L-shaped hull: picks the corner vertex B as
/// the one subtending an angle closest to 90 degrees between its two farthest
/// fellow vertices, extrapolates D = A + C - B, and averages the two side
/// directions (circular mean modulo pi, the short side rotated onto the long
/// one) into the yaw. Returns None when no vertex has a usable corner angle
/// or the hull is too small on either axis; the caller then falls back to a
/// plain consensus line.
pub fn rectangle_from_hull(hull: &HullPolygon, min_side: f64) -> Option<RectangleEstimate> {
    let v = &hull.vertices;
    if v.len() < 3 {
        return None;
    }
    // Both hull dimensions must exceed the threshold, measured in the
    // hull's own frame: its diameter and its thickness across the diameter.
    // An axis-aligned bounding box would let a thin diagonal strip through.
    let (diameter, thickness) = hull_principal_extents(v);
    if diameter <= min_side || thickness <= min_side {
        return None;
    }

    let mut best: Option<(f64, usize, usize, usize)> = None;
    for b in 0..v.len() {
        let Some((a, c)) = triangle_extremes(v, b) else { continue };
        let va = v[a] - v[b];
        let vc = v[c] - v[b];
        let cos = (va.dot(vc) / (va.norm() * vc.norm())).clamp(-1.0, 1.0);
        let score = (cos.acos() - FRAC_PI_2).abs();
        if best.is_none_or(|(s, ..)| score < s) {
            best = Some((score, b, a, c));
        }
    }
    let (score, b, a, c) = best?;
    if score > CORNER_ANGLE_SLACK {
        return None;
    }

    let (a_pt, b_pt, c_pt) = (v[a], v[b], v[c]);
    let d_pt = a_pt + c_pt - b_pt;
    let yaw = rectangle_yaw(b_pt - a_pt, c_pt - b_pt);
    Some(RectangleEstimate {
        corners: [a_pt, b_pt, c_pt, d_pt],
        yaw,
        source: HeadingSource::TwoSides,
    })
}

/// Longest vertex-to-vertex distance and the widest spread across it.
fn hull_principal_extents(v: &[Vec2]) -> (f64, f64) {
    let mut diameter = 0.0;
    let mut ends = (0, 0);
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            let d = v[i].distance(v[j]);
            if d > diameter {
                diameter = d;
                ends = (i, j);
            }
        }
    }
    if diameter <= 0.0 {
        return (0.0, 0.0);
    }
    let axis = (v[ends.1] - v[ends.0]) * (1.0 / diameter);
    let thickness = v
        .iter()
        .map(|p| (*p - v[ends.0]).cross(axis).abs())
        .fold(0.0, f64::max);
    (diameter, thickness)
}

/// Far ends of the two sides meeting at `v[b]`: A is the vertex farthest
/// from B, C the vertex spanning the largest triangle with B and A (the far
/// end of the other leg, rather than A's neighbor). Deterministic under
/// ties (lower index wins).
fn triangle_extremes(v: &[Vec2], b: usize) -> Option<(usize, usize)> {
    let a = (0..v.len())
        .filter(|&i| i != b)
        .max_by(|&i, &j| v[i].distance(v[b]).total_cmp(&v[j].distance(v[b])).then(j.cmp(&i)))?;
    let c = (0..v.len())
        .filter(|&i| i != b && i != a)
        .max_by(|&i, &j| {
            let area_i = (v[a] - v[b]).cross(v[i] - v[b]).abs();
            let area_j = (v[a] - v[b]).cross(v[j] - v[b]).abs();
            area_i.total_cmp(&area_j).then(j.cmp(&i))
        })?;
    Some((a, c))
}

/// Circular mean (modulo pi) of the two side directions, with the shorter
/// side rotated a quarter turn onto the longer one first. Choosing the longer
/// side as the reference keeps the result invariant under swapping A and C.
fn rectangle_yaw(side_ab: Vec2, side_bc: Vec2) -> f64 {
    let ab_primary = match side_ab.norm().total_cmp(&side_bc.norm()) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => {
            wrap_half_angle(side_ab.angle()) <= wrap_half_angle(side_bc.angle())
        }
    };
    let (primary, secondary) = if ab_primary { (side_ab, side_bc) } else { (side_bc, side_ab) };
    let t1 = primary.angle();
    let t2 = secondary.angle() + FRAC_PI_2;
    let s = (2.0 * t1).sin() + (2.0 * t2).sin();
    let c = (2.0 * t1).cos() + (2.0 * t2).cos();
    wrap_half_angle(0.5 * s.atan2(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{heading_difference, Vec3};

    const EPS: f64 = 1e-9;

    #[test]
    fn hull_of_square_with_interior_point() {
        let pts = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(0.5, 0.5),
        ];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.vertices.len(), 4);
        assert!(hull.area() > 0.0); // counter-clockwise
        assert!((hull.area() - 1.0).abs() < EPS);
        for p in &pts {
            assert!(hull.contains(*p, 1e-9));
        }
    }

    #[test]
    fn hull_excludes_collinear_boundary_points() {
        let pts = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(2.0, 2.0),
        ];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.vertices.len(), 3);
        assert!(!hull.vertices.contains(&Vec2::new(1.0, 0.0)));
    }

    #[test]
    fn hull_degenerate_two_points() {
        let pts = vec![Vec2::new(1.0, 1.0), Vec2::new(2.0, 3.0), Vec2::new(1.0, 1.0)];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.vertices.len(), 2);
        assert!(hull.contains(Vec2::new(1.5, 2.0), 1e-9));
        assert!(!hull.contains(Vec2::new(0.0, 0.0), 1e-9));
    }

    #[test]
    fn hull_empty_is_error() {
        assert!(matches!(convex_hull(&[]), Err(FitError::EmptyInput)));
    }

    #[test]
    fn ransac_two_points_exact() {
        let pts = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)];
        let params = RansacParams { min_inliers: 2, ..RansacParams::default() };
        let fit = ransac_line(&pts, &params).unwrap();
        assert_eq!(fit.inliers, vec![0, 1]);
        assert!(fit.line.distance(pts[0]) < EPS);
        assert!(fit.line.distance(pts[1]) < EPS);
    }

    #[test]
    fn ransac_recovers_line_among_outliers() {
        // 20 points exactly on y = 0.5 x + 1, plus 5 far outliers.
        let mut pts: Vec<Vec2> = (0..20)
            .map(|i| {
                let x = i as f64 * 0.3;
                Vec2::new(x, 0.5 * x + 1.0)
            })
            .collect();
        pts.extend([
            Vec2::new(0.0, 8.0),
            Vec2::new(2.0, -7.0),
            Vec2::new(4.0, 11.0),
            Vec2::new(5.0, -4.0),
            Vec2::new(1.0, 13.0),
        ]);
        let params = RansacParams { inlier_tolerance: 0.05, ..RansacParams::default() };
        let fit = ransac_line(&pts, &params).unwrap();

        // Exhaustive pair-enumeration oracle for the consensus size.
        let mut oracle_best = 0;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                if pts[i] == pts[j] {
                    continue;
                }
                let (count, _) = score_line(&pts, &Line2::through(pts[i], pts[j]), 0.05);
                oracle_best = oracle_best.max(count);
            }
        }
        assert_eq!(oracle_best, 20);
        assert_eq!(fit.inliers, (0..20).collect::<Vec<_>>());
        let slope = fit.line.direction.y / fit.line.direction.x;
        assert!((slope - 0.5).abs() < 1e-6, "slope {slope}");
        // Noise-free consensus: zero maximum residual.
        let max_resid = fit.inliers.iter().map(|&i| fit.line.distance(pts[i])).fold(0.0, f64::max);
        assert!(max_resid < 1e-9);
    }

    #[test]
    fn ransac_vertical_line_canonical_direction() {
        let pts: Vec<Vec2> = (0..10).map(|i| Vec2::new(2.0, i as f64 * 0.1)).collect();
        let fit = ransac_line(&pts, &RansacParams::default()).unwrap();
        assert!((fit.line.direction.x - 0.0).abs() < EPS);
        assert!((fit.line.direction.y - 1.0).abs() < EPS);
    }

    #[test]
    fn ransac_coincident_points_degenerate() {
        let pts = vec![Vec2::new(1.0, 1.0); 5];
        assert!(matches!(ransac_line(&pts, &RansacParams::default()), Err(FitError::Degenerate)));
    }

    #[test]
    fn ransac_insufficient_consensus() {
        let pts = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 5.0), Vec2::new(2.0, -3.0)];
        let params = RansacParams { min_inliers: 3, inlier_tolerance: 0.01, ..RansacParams::default() };
        assert!(matches!(ransac_line(&pts, &params), Err(FitError::NoConsensus { .. })));
    }

    #[test]
    fn ransac_reproducible_under_seed() {
        let pts: Vec<Vec2> = (0..40)
            .map(|i| {
                let x = i as f64 * 0.2;
                let noise = ((i * 7919) % 13) as f64 * 0.003;
                Vec2::new(x, 0.3 * x - 0.5 + noise)
            })
            .collect();
        let params = RansacParams { inlier_tolerance: 0.03, rng_seed: 9, ..RansacParams::default() };
        let a = ransac_line(&pts, &params).unwrap();
        let b = ransac_line(&pts, &params).unwrap();
        assert_eq!(a.inliers, b.inliers);
        assert_eq!(a.line.direction.x.to_bits(), b.line.direction.x.to_bits());
        assert_eq!(a.line.direction.y.to_bits(), b.line.direction.y.to_bits());
        assert_eq!(a.line.point.x.to_bits(), b.line.point.x.to_bits());
    }

    fn flat_ground() -> Plane3 {
        Plane3::new(Vec3::new(0.0, 0.0, 1.0), 0.0)
    }

    fn face_points(yaw: f64, center: Vec2, half_len: f64, n: usize, heights: &[f64]) -> Vec<Point3> {
        // Points on a vertical plane whose in-plane direction is `yaw`.
        let dir = Vec2::new(yaw.cos(), yaw.sin());
        let mut out = Vec::new();
        for i in 0..n {
            let t = -half_len + 2.0 * half_len * (i as f64) / (n.max(2) - 1) as f64;
            let q = center + dir * t;
            for &h in heights {
                out.push(Point3::new(q.x, q.y, h));
            }
        }
        out
    }

    #[test]
    fn vertical_plane_on_axis_aligned_face() {
        let pts = face_points(FRAC_PI_2, Vec2::new(10.0, 0.0), 1.0, 25, &[0.3, 0.8, 1.4]);
        let fit = fit_vertical_plane(&pts, &flat_ground(), &RansacParams::default()).unwrap();
        assert!(fit.plane.normal.x.abs() > 1.0 - 1e-9);
        assert!(fit.plane.normal.dot(Vec3::new(0.0, 0.0, 1.0)).abs() < 1e-9);
        assert!(!fit.side_facing);
        // Plane passes through x = 10.
        assert!(fit.plane.signed_distance(Vec3::new(10.0, 0.5, 0.7)).abs() < 1e-9);
    }

    #[test]
    fn vertical_plane_rotated_face() {
        let face_dir = FRAC_PI_2 + 20.0f64.to_radians();
        let pts = face_points(face_dir, Vec2::new(8.0, 1.0), 1.0, 30, &[0.5, 1.0]);
        let fit = fit_vertical_plane(&pts, &flat_ground(), &RansacParams::default()).unwrap();
        let normal_angle = fit.plane.normal.y.atan2(fit.plane.normal.x);
        assert!(
            heading_difference(normal_angle, 20.0f64.to_radians()) < 0.5f64.to_radians(),
            "normal angle {normal_angle}"
        );
    }

    #[test]
    fn vertical_plane_single_ring_matches_dense() {
        let dense = face_points(FRAC_PI_2, Vec2::new(6.0, -2.0), 1.2, 30, &[0.2, 0.6, 1.0, 1.5]);
        let single = face_points(FRAC_PI_2, Vec2::new(6.0, -2.0), 1.2, 30, &[0.8]);
        let a = fit_vertical_plane(&dense, &flat_ground(), &RansacParams::default()).unwrap();
        let b = fit_vertical_plane(&single, &flat_ground(), &RansacParams::default()).unwrap();
        assert!((a.plane.normal.x.abs() - b.plane.normal.x.abs()).abs() < 1e-9);
        assert!((a.plane.offset.abs() - b.plane.offset.abs()).abs() < 1e-9);
    }

    #[test]
    fn vertical_plane_prefers_forward_facing_face() {
        // Back face (normal along x) with fewer points than the side face.
        let mut pts = face_points(FRAC_PI_2, Vec2::new(10.0, 1.0), 1.0, 30, &[0.5]);
        pts.extend(face_points(0.0, Vec2::new(12.0, 0.0), 2.2, 60, &[0.5]));
        let fit = fit_vertical_plane(&pts, &flat_ground(), &RansacParams::default()).unwrap();
        assert!(!fit.side_facing);
        assert!(fit.plane.normal.x.abs() > 0.99, "picked side face instead");

        // Only the side face present: global best wins, flagged side-facing.
        let side_only = face_points(0.0, Vec2::new(12.0, 0.0), 2.2, 60, &[0.5]);
        let fit = fit_vertical_plane(&side_only, &flat_ground(), &RansacParams::default()).unwrap();
        assert!(fit.side_facing);
        assert!(fit.plane.normal.y.abs() > 0.99);
    }

    #[test]
    fn vertical_plane_rejects_marginal_forward_candidate() {
        // A dominant side face plus a forward-facing sliver: the sliver must
        // not win the preference with a token inlier count.
        let mut pts = face_points(0.0, Vec2::new(8.0, 0.0), 2.2, 200, &[0.5]);
        pts.extend(face_points(FRAC_PI_2, Vec2::new(5.8, 1.1), 0.1, 8, &[0.5]));
        let fit = fit_vertical_plane(&pts, &flat_ground(), &RansacParams::default()).unwrap();
        assert!(fit.side_facing);
        assert!(fit.plane.normal.y.abs() > 0.99);
    }

    #[test]
    fn rectangle_axis_aligned_triangle() {
        let hull = convex_hull(&[Vec2::new(0.0, 0.0), Vec2::new(4.0, 0.0), Vec2::new(0.0, 2.0)])
            .unwrap();
        let est = rectangle_from_hull(&hull, 1.2).unwrap();
        let [a, b, c, d] = est.corners;
        assert_eq!(b, Vec2::new(0.0, 0.0));
        assert_eq!(d, a + c - b);
        assert_eq!(d, Vec2::new(4.0, 2.0));
        assert!(est.yaw.abs() < EPS);
        assert_eq!(est.source, HeadingSource::TwoSides);
    }

    #[test]
    fn rectangle_from_snapped_l_shape() {
        // Two visible sides of a 2 x 4 rectangle at 30 degrees, snapped to a
        // 0.05 m grid the way occupancy-cell centers would be.
        let yaw = 30.0f64.to_radians();
        let cell = 0.05;
        let b_true = Vec2::new(6.0, -1.0);
        let long_dir = Vec2::new(yaw.cos(), yaw.sin());
        let short_dir = long_dir.perp();
        let mut pts = Vec::new();
        let mut push_snapped = |p: Vec2| {
            let snap = |v: f64| (v / cell).floor() * cell + cell / 2.0;
            pts.push(Vec2::new(snap(p.x), snap(p.y)));
        };
        for i in 0..=80 {
            push_snapped(b_true + long_dir * (4.0 * i as f64 / 80.0));
        }
        for i in 0..=40 {
            push_snapped(b_true + short_dir * (2.0 * i as f64 / 40.0));
        }
        let hull = convex_hull(&pts).unwrap();
        let est = rectangle_from_hull(&hull, 1.2).unwrap();
        assert!(
            heading_difference(est.yaw, yaw) < 2.0f64.to_radians(),
            "yaw {} vs {}",
            est.yaw,
            yaw
        );
        let d_true = b_true + long_dir * 4.0 + short_dir * 2.0;
        assert!(est.corners[3].distance(d_true) <= 2.0 * cell + 1e-9);
    }

    #[test]
    fn rectangle_rejects_thin_hull() {
        // Nearly collinear points: bbox y side under the threshold.
        let pts: Vec<Vec2> = (0..40)
            .map(|i| Vec2::new(i as f64 * 0.1, 0.02 * ((i % 3) as f64)))
            .collect();
        let hull = convex_hull(&pts).unwrap();
        assert!(rectangle_from_hull(&hull, 1.2).is_none());
    }

    #[test]
    fn rectangle_rejects_bad_corner_angle() {
        // A wide obtuse triangle: every vertex angle far from 90 degrees.
        let hull = convex_hull(&[
            Vec2::new(0.0, 0.0),
            Vec2::new(8.0, 0.0),
            Vec2::new(4.0, 1.5),
        ])
        .unwrap();
        assert!(rectangle_from_hull(&hull, 1.2).is_none());
    }

    #[test]
    fn rectangle_yaw_invariant_under_relabeling() {
        let ab = Vec2::new(3.9, 0.1);
        let bc = Vec2::new(-0.05, 2.1);
        let y1 = rectangle_yaw(ab, bc);
        // Swapping A and C maps (AB, BC) to (-BC, -AB).
        let y2 = rectangle_yaw(-bc, -ab);
        assert!((y1 - y2).abs() < EPS, "{y1} vs {y2}");
    }
}
