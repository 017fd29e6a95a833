//! Submaps: consecutive scans bundled with their odometry, anchored at the
//! window's first pose.

use crate::geometry::Pose2;
use crate::scalar::Real;
use crate::slam::graph::SlamError;
use crate::world::{integrate_scan, CellState, OccupancyGrid, Scan};

/// A window of consecutive scans. `anchor` is the odometry estimate at the
/// window start; each scan is stored with its pose relative to the anchor,
/// so the whole submap re-renders rigidly at any anchor estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Submap<T> {
    pub robot: usize,
    pub index: usize,
    pub anchor: Pose2<T>,
    /// Inclusive cycle range the window covers.
    pub time_window: (u64, u64),
    pub scans: Vec<(Pose2<T>, Scan<T>)>,
    pub local_grid: OccupancyGrid<T>,
}

/// Bundles `window` (odometry pose, scan) pairs into a submap. The local
/// grid uses `template`'s lattice and holds only this window's scans,
/// integrated at their odometry poses; scans whose origin falls outside the
/// lattice are kept in `scans` but leave the grid untouched.
pub fn build_submap<T: Real>(
    robot: usize,
    index: usize,
    t_start: u64,
    window: &[(Pose2<T>, Scan<T>)],
    template: &OccupancyGrid<T>,
) -> Result<Submap<T>, SlamError> {
    if window.is_empty() {
        return Err(SlamError::EmptyWindow);
    }
    let anchor = window[0].0;
    let mut local_grid = OccupancyGrid::new(
        template.width(),
        template.height(),
        template.resolution(),
        CellState::Unknown,
    )
    .with_origin(template.origin());
    let mut scans = Vec::with_capacity(window.len());
    for (pose, scan) in window {
        let _ = integrate_scan(&mut local_grid, pose, scan);
        scans.push((anchor.relative_to(pose), scan.clone()));
    }
    Ok(Submap {
        robot,
        index,
        anchor,
        time_window: (t_start, t_start + window.len() as u64 - 1),
        scans,
        local_grid,
    })
}
