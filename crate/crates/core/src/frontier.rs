//! Frontier detection and clustering.
//!
//! A frontier cell is a Free cell with at least one Unknown 8-neighbor.
//! Clusters are 8-connected components of the frontier set; each cluster's
//! centroid is the member cell closest to the members' arithmetic mean.

use std::collections::{HashSet, VecDeque};

use crate::world::{Cell, CellState, OccupancyGrid, DIAG_OFFSETS, ORTHO_OFFSETS};
use crate::Real;

/// An 8-connected group of frontier cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierCluster {
    /// Member cells in row-major order.
    pub cells: Vec<Cell>,
    /// Member cell minimizing Euclidean distance to the members' mean
    /// (ties broken row-major).
    pub centroid: Cell,
}

impl FrontierCluster {
    pub fn size(&self) -> usize {
        self.cells.len()
    }
}

/// All frontier cells of `map`, in row-major order.
pub fn detect_frontiers<T: Real>(map: &OccupancyGrid<T>) -> Vec<Cell> {
    let mut out = Vec::new();
    for (cell, state) in map.iter_cells() {
        if state != CellState::Free {
            continue;
        }
        let unknown_neighbor = ORTHO_OFFSETS
            .iter()
            .chain(DIAG_OFFSETS.iter())
            .filter_map(|&off| map.neighbor(cell, off))
            .any(|n| map.get(n) == CellState::Unknown);
        if unknown_neighbor {
            out.push(cell);
        }
    }
    out
}

/// Groups frontier cells into 8-connected clusters, dropping clusters smaller
/// than `min_size`. Output is ordered by (size descending, centroid
/// row-major); partitioning is exact: every input cell lands in exactly one
/// cluster before the size filter.
pub fn cluster_frontiers(cells: &[Cell], min_size: usize) -> Vec<FrontierCluster> {
    let members: HashSet<Cell> = cells.iter().copied().collect();
    let mut sorted: Vec<Cell> = cells.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut visited: HashSet<Cell> = HashSet::new();
    let mut clusters = Vec::new();
    for &seed in &sorted {
        if visited.contains(&seed) {
            continue;
        }
        let mut component = Vec::new();
        let mut queue = VecDeque::from([seed]);
        visited.insert(seed);
        while let Some(cell) = queue.pop_front() {
            component.push(cell);
            for &(dx, dy) in ORTHO_OFFSETS.iter().chain(DIAG_OFFSETS.iter()) {
                let nx = cell.x as i64 + dx;
                let ny = cell.y as i64 + dy;
                if nx < 0 || ny < 0 {
                    continue;
                }
                let n = Cell::new(nx as usize, ny as usize);
                if members.contains(&n) && visited.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        component.sort_unstable();
        clusters.push(FrontierCluster {
            centroid: centroid_of(&component),
            cells: component,
        });
    }
    clusters.retain(|c| c.size() >= min_size);
    clusters.sort_by(|a, b| {
        b.size()
            .cmp(&a.size())
            .then_with(|| a.centroid.cmp(&b.centroid))
    });
    clusters
}

/// Convenience: detect and cluster in one step.
pub fn frontier_clusters<T: Real>(map: &OccupancyGrid<T>, min_size: usize) -> Vec<FrontierCluster> {
    cluster_frontiers(&detect_frontiers(map), min_size)
}

fn centroid_of(cells: &[Cell]) -> Cell {
    debug_assert!(!cells.is_empty());
    let n = cells.len() as f64;
    let mx = cells.iter().map(|c| c.x as f64).sum::<f64>() / n;
    let my = cells.iter().map(|c| c.y as f64).sum::<f64>() / n;
    let mut best = cells[0];
    let mut best_d = f64::INFINITY;
    for &c in cells {
        let d = (c.x as f64 - mx).powi(2) + (c.y as f64 - my).powi(2);
        // Strict less keeps the first (row-major smallest) of tied cells.
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}
