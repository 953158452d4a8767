//! Ground-plane projection, binary occupancy grid, morphology, connected
//! components, and cluster shape filtering.
//!
//! Cell (row, col) covers [x_min + col*s, x_min + (col+1)*s) along x and
//! [y_min + row*s, y_min + (row+1)*s) along y, so row 0 sits at minimum y.

use crate::geom::{GroundFrame, Plane3, PointCloud, Vec2};

/// Grid geometry plus the occupancy point-count threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub cell_size: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// A cell is occupied when at least this many projected points fall in it.
    pub occupancy_threshold: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            cell_size: 0.20,
            x_min: -30.0,
            x_max: 30.0,
            y_min: -20.0,
            y_max: 20.0,
            occupancy_threshold: 2,
        }
    }
}

impl GridConfig {
    pub fn cols(&self) -> usize {
        ((self.x_max - self.x_min) / self.cell_size).ceil() as usize
    }

    pub fn rows(&self) -> usize {
        ((self.y_max - self.y_min) / self.cell_size).ceil() as usize
    }

    /// Cell containing a ground-frame point, or None outside the extent.
    pub fn cell_of(&self, q: Vec2) -> Option<(usize, usize)> {
        let col = ((q.x - self.x_min) / self.cell_size).floor();
        let row = ((q.y - self.y_min) / self.cell_size).floor();
        if col < 0.0 || row < 0.0 {
            return None;
        }
        let (row, col) = (row as usize, col as usize);
        (row < self.rows() && col < self.cols()).then_some((row, col))
    }

    pub fn cell_center(&self, row: usize, col: usize) -> Vec2 {
        Vec2::new(
            self.x_min + (col as f64 + 0.5) * self.cell_size,
            self.y_min + (row as f64 + 0.5) * self.cell_size,
        )
    }
}

/// Binary occupancy grid over the ground plane.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub config: GridConfig,
    pub rows: usize,
    pub cols: usize,
    cells: Vec<bool>,
}

impl OccupancyGrid {
    pub fn empty(config: GridConfig) -> Self {
        let rows = config.rows();
        let cols = config.cols();
        Self { config, rows, cols, cells: vec![false; rows * cols] }
    }

    pub fn occupied(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.cells[row * self.cols + col] = value;
    }

    pub fn count_occupied(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn occupied_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for row in 0..self.rows {
            for col in 0..self.cols {
                if self.occupied(row, col) {
                    out.push((row, col));
                }
            }
        }
        out
    }

    /// Text dump for debugging and golden tests: `P1`, dimensions, then one
    /// line of 0/1 per row, row 0 = minimum y.
    pub fn to_text(&self) -> String {
        let mut out = format!("P1\n{} {}\n", self.cols, self.rows);
        for row in 0..self.rows {
            let line: Vec<&str> = (0..self.cols)
                .map(|col| if self.occupied(row, col) { "1" } else { "0" })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Projects each point orthogonally onto the ground plane, bins it in the
/// ego ground frame, and marks cells meeting the occupancy threshold.
/// Points outside the grid extent are ignored.
pub fn project_to_grid(cloud: &PointCloud, ground: &Plane3, config: &GridConfig) -> OccupancyGrid {
    let frame = GroundFrame::from_plane(ground);
    let rows = config.rows();
    let cols = config.cols();
    let mut counts = vec![0usize; rows * cols];
    for p in &cloud.points {
        if let Some((row, col)) = config.cell_of(frame.project(p.pos())) {
            counts[row * cols + col] += 1;
        }
    }
    let mut grid = OccupancyGrid::empty(config.clone());
    for (i, &n) in counts.iter().enumerate() {
        grid.cells[i] = n >= config.occupancy_threshold;
    }
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorphOp {
    Erode,
    Dilate,
    Open,
    Close,
}

/// Binary morphology with a square structuring element of side 2r+1.
/// Out-of-bounds cells count as unoccupied.
pub fn morphology(grid: &OccupancyGrid, op: MorphOp, kernel_radius: usize) -> OccupancyGrid {
    assert!(kernel_radius >= 1, "morphology: kernel radius must be >= 1");
    match op {
        MorphOp::Erode => erode(grid, kernel_radius),
        MorphOp::Dilate => dilate(grid, kernel_radius),
        MorphOp::Open => dilate(&erode(grid, kernel_radius), kernel_radius),
        MorphOp::Close => erode(&dilate(grid, kernel_radius), kernel_radius),
    }
}

// The square element is separable: a horizontal 1D pass then a vertical one.

fn erode(grid: &OccupancyGrid, r: usize) -> OccupancyGrid {
    let mut h = grid.clone();
    for row in 0..grid.rows {
        for col in 0..grid.cols {
            let ok = col >= r
                && col + r < grid.cols
                && (col - r..=col + r).all(|c| grid.occupied(row, c));
            h.set(row, col, ok);
        }
    }
    let mut out = h.clone();
    for row in 0..grid.rows {
        for col in 0..grid.cols {
            let ok = row >= r
                && row + r < grid.rows
                && (row - r..=row + r).all(|rr| h.occupied(rr, col));
            out.set(row, col, ok);
        }
    }
    out
}

fn dilate(grid: &OccupancyGrid, r: usize) -> OccupancyGrid {
    let mut h = grid.clone();
    for row in 0..grid.rows {
        for col in 0..grid.cols {
            let lo = col.saturating_sub(r);
            let hi = (col + r).min(grid.cols - 1);
            h.set(row, col, (lo..=hi).any(|c| grid.occupied(row, c)));
        }
    }
    let mut out = h.clone();
    for row in 0..grid.rows {
        for col in 0..grid.cols {
            let lo = row.saturating_sub(r);
            let hi = (row + r).min(grid.rows - 1);
            out.set(row, col, (lo..=hi).any(|rr| h.occupied(rr, col)));
        }
    }
    out
}

/// Clears occupied cells that have no occupied 8-neighbor. Removes single
/// noisy cells without erasing one-cell-thick obstacle traces the way a full
/// opening would.
pub fn remove_isolated(grid: &OccupancyGrid) -> OccupancyGrid {
    let mut out = grid.clone();
    for row in 0..grid.rows {
        for col in 0..grid.cols {
            if !grid.occupied(row, col) {
                continue;
            }
            let mut has_neighbor = false;
            'scan: for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (nr, nc) = (row as i64 + dr, col as i64 + dc);
                    if nr >= 0
                        && nc >= 0
                        && (nr as usize) < grid.rows
                        && (nc as usize) < grid.cols
                        && grid.occupied(nr as usize, nc as usize)
                    {
                        has_neighbor = true;
                        break 'scan;
                    }
                }
            }
            if !has_neighbor {
                out.set(row, col, false);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

/// Inclusive cell-index bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellBox {
    pub row_min: usize,
    pub row_max: usize,
    pub col_min: usize,
    pub col_max: usize,
}

impl CellBox {
    /// Metric side lengths (x extent, y extent) of the covered cell region.
    pub fn metric_sides(&self, cell_size: f64) -> (f64, f64) {
        (
            (self.col_max - self.col_min + 1) as f64 * cell_size,
            (self.row_max - self.row_min + 1) as f64 * cell_size,
        )
    }
}

/// Axis-aligned metric rectangle in ground-frame coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb2 {
    pub min: Vec2,
    pub max: Vec2,
}

/// A connected set of occupied cells: a candidate obstacle.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Member cells as (row, col), sorted row-major.
    pub cells: Vec<(usize, usize)>,
    pub bbox: CellBox,
    /// Ground-frame centers of the member cells.
    pub metric_points: Vec<Vec2>,
    /// Metric extent of the covered cell region.
    pub metric_bbox: Aabb2,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Flood-fills occupied cells into clusters. Output is ordered by descending
/// cell count, ties broken by (min row, min col).
pub fn connected_components(grid: &OccupancyGrid, connectivity: Connectivity) -> Vec<Cluster> {
    connected_components_bridged(grid, connectivity, 0)
}

/// Connected components where cells within `bridge_cells` of each other
/// (Chebyshev distance) join the same cluster: components of the dilated
/// grid, restricted to the truly occupied cells. Sparse rings leave gaps of
/// a few cells along an obstacle trace on a fine grid; bridging merges those
/// without inflating the cluster's own cells. `bridge_cells` 0 is plain
/// connectivity.
pub fn connected_components_bridged(
    grid: &OccupancyGrid,
    connectivity: Connectivity,
    bridge_cells: usize,
) -> Vec<Cluster> {
    if bridge_cells == 0 {
        return components_plain(grid, connectivity);
    }
    let dilated = dilate(grid, bridge_cells);
    let regions = components_plain(&dilated, connectivity);
    let mut clusters = Vec::new();
    for region in regions {
        let cells: Vec<(usize, usize)> =
            region.cells.into_iter().filter(|&(r, c)| grid.occupied(r, c)).collect();
        if !cells.is_empty() {
            clusters.push(make_cluster(cells, &grid.config));
        }
    }
    clusters.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then(a.bbox.row_min.cmp(&b.bbox.row_min))
            .then(a.bbox.col_min.cmp(&b.bbox.col_min))
    });
    clusters
}

fn components_plain(grid: &OccupancyGrid, connectivity: Connectivity) -> Vec<Cluster> {
    let neighbors: &[(i64, i64)] = match connectivity {
        Connectivity::Four => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
        Connectivity::Eight => {
            &[(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
        }
    };
    let mut visited = vec![false; grid.rows * grid.cols];
    let mut clusters = Vec::new();

    for row in 0..grid.rows {
        for col in 0..grid.cols {
            if !grid.occupied(row, col) || visited[row * grid.cols + col] {
                continue;
            }
            let mut cells = Vec::new();
            let mut stack = vec![(row, col)];
            visited[row * grid.cols + col] = true;
            while let Some((r, c)) = stack.pop() {
                cells.push((r, c));
                for &(dr, dc) in neighbors {
                    let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                    if nr < 0 || nc < 0 {
                        continue;
                    }
                    let (nr, nc) = (nr as usize, nc as usize);
                    if nr < grid.rows
                        && nc < grid.cols
                        && grid.occupied(nr, nc)
                        && !visited[nr * grid.cols + nc]
                    {
                        visited[nr * grid.cols + nc] = true;
                        stack.push((nr, nc));
                    }
                }
            }
            cells.sort_unstable();
            clusters.push(make_cluster(cells, &grid.config));
        }
    }

    clusters.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then(a.bbox.row_min.cmp(&b.bbox.row_min))
            .then(a.bbox.col_min.cmp(&b.bbox.col_min))
    });
    clusters
}

fn make_cluster(cells: Vec<(usize, usize)>, config: &GridConfig) -> Cluster {
    let row_min = cells.iter().map(|c| c.0).min().unwrap();
    let row_max = cells.iter().map(|c| c.0).max().unwrap();
    let col_min = cells.iter().map(|c| c.1).min().unwrap();
    let col_max = cells.iter().map(|c| c.1).max().unwrap();
    let bbox = CellBox { row_min, row_max, col_min, col_max };
    let metric_points = cells.iter().map(|&(r, c)| config.cell_center(r, c)).collect();
    let s = config.cell_size;
    let metric_bbox = Aabb2 {
        min: Vec2::new(config.x_min + col_min as f64 * s, config.y_min + row_min as f64 * s),
        max: Vec2::new(
            config.x_min + (col_max + 1) as f64 * s,
            config.y_min + (row_max + 1) as f64 * s,
        ),
    };
    Cluster { cells, bbox, metric_points, metric_bbox }
}

/// Area and bounding-box side bands for keeping vehicle-scale clusters, plus
/// the pedestrian size guard used by the low-resolution detector.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterFilterParams {
    pub min_area: f64,
    pub max_area: f64,
    pub min_side: f64,
    pub max_side: f64,
    /// Clusters whose bounding box fits within this on both sides are
    /// pedestrian-like; no heading is estimated for them.
    pub pedestrian_max_side: f64,
}

impl Default for ClusterFilterParams {
    fn default() -> Self {
        Self { min_area: 0.3, max_area: 40.0, min_side: 0.20, max_side: 15.0, pedestrian_max_side: 1.0 }
    }
}

/// Keeps clusters whose metric area (cell count x cell area) and bounding-box
/// sides fall inside the configured bands. Order is preserved.
pub fn filter_clusters(
    clusters: Vec<Cluster>,
    params: &ClusterFilterParams,
    cell_size: f64,
) -> Vec<Cluster> {
    clusters
        .into_iter()
        .filter(|c| {
            let area = c.len() as f64 * cell_size * cell_size;
            let (sx, sy) = c.bbox.metric_sides(cell_size);
            area >= params.min_area
                && area <= params.max_area
                && sx >= params.min_side
                && sx <= params.max_side
                && sy >= params.min_side
                && sy <= params.max_side
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeClass {
    VehicleLike,
    PedestrianLike,
}

/// Pedestrian-like iff both bounding-box sides fit under the pedestrian
/// threshold; anything longer on either side is vehicle-like.
pub fn classify_cluster_size(
    cluster: &Cluster,
    params: &ClusterFilterParams,
    cell_size: f64,
) -> SizeClass {
    let (sx, sy) = cluster.bbox.metric_sides(cell_size);
    if sx <= params.pedestrian_max_side && sy <= params.pedestrian_max_side {
        SizeClass::PedestrianLike
    } else {
        SizeClass::VehicleLike
    }
}
