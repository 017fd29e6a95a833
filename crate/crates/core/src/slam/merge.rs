//! Global map assembly: re-render every submap scan at its estimated anchor.

use std::collections::BTreeMap;

use crate::geometry::Pose2;
use crate::scalar::Real;
use crate::slam::graph::VertexId;
use crate::slam::submap::Submap;
use crate::world::{integrate_scan, CellState, OccupancyGrid};

/// Re-integrates every scan of every submap at `estimates[(robot, index)]`
/// composed with the scan's anchor-relative pose, on `template`'s lattice.
/// Each robot renders into its own grid in time order (so a robot's later
/// observations supersede its earlier ones, as in its live belief map);
/// the per-robot grids are then merged with Occupied taking precedence,
/// which is the conservative choice for navigation. Submaps without an
/// estimate fall back to their odometry anchor; scans falling outside the
/// lattice are skipped.
pub fn merge_global_map<T: Real>(
    estimates: &BTreeMap<VertexId, Pose2<T>>,
    submaps: &[Submap<T>],
    template: &OccupancyGrid<T>,
) -> OccupancyGrid<T> {
    let blank = || {
        OccupancyGrid::new(
            template.width(),
            template.height(),
            template.resolution(),
            CellState::Unknown,
        )
        .with_origin(template.origin())
    };
    let mut ordered: Vec<&Submap<T>> = submaps.iter().collect();
    ordered.sort_by_key(|s| (s.robot, s.index));
    let mut per_robot: BTreeMap<usize, OccupancyGrid<T>> = BTreeMap::new();
    for submap in ordered {
        let grid = per_robot.entry(submap.robot).or_insert_with(blank);
        let anchor = estimates
            .get(&VertexId::new(submap.robot, submap.index))
            .copied()
            .unwrap_or(submap.anchor);
        for (rel, scan) in &submap.scans {
            let pose = anchor.compose(rel);
            let _ = integrate_scan(grid, &pose, scan);
        }
    }
    let mut merged = blank();
    for grid in per_robot.values() {
        merged.merge_from(grid);
    }
    merged
}
