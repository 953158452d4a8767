#![allow(dead_code)]

//! Shared fixtures and independent oracles for the integration and
//! acceptance suites. The oracles are deliberately naive (brute force)
//! so they cannot share a failure mode with the implementations they check.

use gridbox::geom::{Plane3, Point3, PointCloud, Pose2, Vec2, Vec3};
use gridbox::grid::OccupancyGrid;
use gridbox::rng::SplitMix64;
use gridbox::simulate::{Obstacle, ObstacleClass, Scene};

/// Brute-force connected components by repeated whole-grid sweeps: a cell
/// joins a component if any neighbor is already in it, until a fixed point.
pub fn flood_fill_oracle(grid: &OccupancyGrid, eight: bool) -> Vec<Vec<(usize, usize)>> {
    let cells = grid.occupied_cells();
    let mut label: Vec<usize> = (0..cells.len()).collect();
    let adjacent = |a: (usize, usize), b: (usize, usize)| {
        let dr = a.0.abs_diff(b.0);
        let dc = a.1.abs_diff(b.1);
        if eight {
            dr <= 1 && dc <= 1
        } else {
            dr + dc == 1
        }
    };
    loop {
        let mut changed = false;
        for i in 0..cells.len() {
            for j in 0..cells.len() {
                if adjacent(cells[i], cells[j]) && label[i] != label[j] {
                    let m = label[i].min(label[j]);
                    label[i] = m;
                    label[j] = m;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
    for (i, &cell) in cells.iter().enumerate() {
        // Resolve the label chain to its root.
        let mut root = label[i];
        while label[root] != root {
            root = label[root];
        }
        groups.entry(root).or_default().push(cell);
    }
    let mut out: Vec<Vec<(usize, usize)>> = groups.into_values().collect();
    for g in &mut out {
        g.sort_unstable();
    }
    out.sort();
    out
}

/// Brute-force convex hull: a point is a hull vertex iff some directed edge
/// from it keeps every other point strictly to one side (O(n^3)).
pub fn brute_hull_vertices(points: &[Vec2]) -> Vec<Vec2> {
    let mut dedup: Vec<Vec2> = Vec::new();
    for p in points {
        if !dedup.contains(p) {
            dedup.push(*p);
        }
    }
    if dedup.len() <= 2 {
        dedup.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        return dedup;
    }
    let mut hull = Vec::new();
    for (i, &p) in dedup.iter().enumerate() {
        let mut extreme = false;
        for (j, &q) in dedup.iter().enumerate() {
            if i == j {
                continue;
            }
            // Edge p -> q with every other point strictly left marks p (and q)
            // as hull vertices of a hull with no three collinear points.
            let all_left = dedup
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i && k != j)
                .all(|(_, &r)| (q - p).cross(r - p) > 0.0);
            if all_left {
                extreme = true;
                break;
            }
        }
        if extreme {
            hull.push(p);
        }
    }
    hull.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    hull
}

pub fn random_grid(rng: &mut SplitMix64, max_side: usize, fill: f64) -> OccupancyGrid {
    let rows = 2 + rng.next_index(max_side - 1);
    let cols = 2 + rng.next_index(max_side - 1);
    let config = gridbox::grid::GridConfig {
        cell_size: 0.1,
        x_min: 0.0,
        x_max: cols as f64 * 0.1,
        y_min: 0.0,
        y_max: rows as f64 * 0.1,
        occupancy_threshold: 1,
    };
    let mut grid = OccupancyGrid::empty(config);
    for r in 0..rows {
        for c in 0..cols {
            if rng.next_f64() < fill {
                grid.set(r, c, true);
            }
        }
    }
    grid
}

pub fn random_points_in_disk(rng: &mut SplitMix64, n: usize, radius: f64) -> Vec<Vec2> {
    (0..n)
        .map(|_| {
            let r = radius * rng.next_f64().sqrt();
            let a = std::f64::consts::TAU * rng.next_f64();
            Vec2::new(r * a.cos(), r * a.sin())
        })
        .collect()
}

/// Point set sampling two perpendicular sides of a rectangle (the L an
/// oblique lidar view produces), snapped to cell centers the way grid
/// projection would. Returns (points, hidden corner, yaw).
pub fn snapped_l_shape(
    corner: Vec2,
    yaw: f64,
    length: f64,
    width: f64,
    cell: f64,
) -> (Vec<Vec2>, Vec2, f64) {
    let long_dir = Vec2::new(yaw.cos(), yaw.sin());
    let short_dir = long_dir.perp();
    let snap = |v: f64| (v / cell).floor() * cell + cell / 2.0;
    let mut pts = Vec::new();
    let n_long = (length / (cell * 0.5)).ceil() as usize;
    let n_short = (width / (cell * 0.5)).ceil() as usize;
    for i in 0..=n_long {
        let p = corner + long_dir * (length * i as f64 / n_long as f64);
        pts.push(Vec2::new(snap(p.x), snap(p.y)));
    }
    for i in 0..=n_short {
        let p = corner + short_dir * (width * i as f64 / n_short as f64);
        pts.push(Vec2::new(snap(p.x), snap(p.y)));
    }
    pts.dedup();
    let hidden = corner + long_dir * length + short_dir * width;
    (pts, hidden, yaw)
}

pub fn flat_ground() -> Plane3 {
    Plane3::new(Vec3::new(0.0, 0.0, 1.0), 0.0)
}

pub fn cloud_of(points: Vec<Point3>) -> PointCloud {
    let mut c = PointCloud::new("ego", 0.0);
    c.points = points;
    c
}

/// Scene with static obstacles on flat ground and a static ego at origin.
pub fn static_scene(obstacles: Vec<(Vec3, ObstacleClass, Pose2)>) -> Scene {
    Scene {
        ground: flat_ground(),
        obstacles: obstacles
            .into_iter()
            .map(|(dims, class, pose)| Obstacle {
                dims,
                class,
                trajectory: vec![(0.0, pose), (10.0, pose)],
            })
            .collect(),
        ego_trajectory: vec![
            (0.0, Pose2::new(0.0, 0.0, 0.0)),
            (10.0, Pose2::new(0.0, 0.0, 0.0)),
        ],
    }
}

pub fn van_dims() -> Vec3 {
    Vec3::new(4.5, 2.0, 2.2)
}
