//! Range sensor model: raycasting against the ground-truth grid and
//! integrating scans into a belief grid.

use serde::{Deserialize, Serialize};

use crate::geometry::Pose2;
use crate::scalar::Real;
use crate::world::grid::{Cell, CellState, OccupancyGrid};
use crate::world::io::WorldError;

/// One range measurement. `angle` is relative to the robot heading (sensor
/// frame), so a scan can be re-rendered at any pose estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beam<T> {
    pub angle: T,
    pub range: T,
    pub hit: bool,
}

/// A full sweep of equally spaced beams.
/// Invariant: `hit == false` exactly when `range == max_range`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scan<T> {
    pub beams: Vec<Beam<T>>,
    pub max_range: T,
}

/// Incremental grid traversal along a ray (Amanatides-Woo). Coordinates are
/// in the grid frame; cells may step outside the grid, callers bound-check.
struct GridRay<T> {
    cell: (i64, i64),
    step: (i64, i64),
    t_max: (T, T),
    t_delta: (T, T),
}

impl<T: Real> GridRay<T> {
    fn new(px: T, py: T, dx: T, dy: T, res: T) -> Self {
        let cx = (px / res).floor();
        let cy = (py / res).floor();
        let axis = |p: T, c: T, d: T| -> (i64, T, T) {
            if d > T::zero() {
                (1, ((c + T::one()) * res - p) / d, res / d)
            } else if d < T::zero() {
                (-1, (c * res - p) / d, res / -d)
            } else {
                (0, T::infinity(), T::infinity())
            }
        };
        let (sx, tmx, tdx) = axis(px, cx, dx);
        let (sy, tmy, tdy) = axis(py, cy, dy);
        Self {
            cell: (cx.to_i64().unwrap(), cy.to_i64().unwrap()),
            step: (sx, sy),
            t_max: (tmx, tmy),
            t_delta: (tdx, tdy),
        }
    }

    fn cell(&self) -> (i64, i64) {
        self.cell
    }

    /// Advances into the next cell, returning the distance at which the ray
    /// crosses into it.
    fn next_crossing(&mut self) -> (T, (i64, i64)) {
        let t;
        if self.t_max.0 <= self.t_max.1 {
            t = self.t_max.0;
            self.t_max.0 += self.t_delta.0;
            self.cell.0 += self.step.0;
        } else {
            t = self.t_max.1;
            self.t_max.1 += self.t_delta.1;
            self.cell.1 += self.step.1;
        }
        (t, self.cell)
    }
}

fn in_bounds<T: Real>(grid: &OccupancyGrid<T>, cell: (i64, i64)) -> Option<Cell> {
    if cell.0 >= 0 && cell.1 >= 0 && (cell.0 as usize) < grid.width() && (cell.1 as usize) < grid.height() {
        Some(Cell::new(cell.0 as usize, cell.1 as usize))
    } else {
        None
    }
}

/// Grid-frame position and direction of a beam.
fn beam_in_grid_frame<T: Real>(grid: &OccupancyGrid<T>, pose: &Pose2<T>, angle: T) -> (T, T, T, T) {
    let inv = grid.origin().inverse();
    let (px, py) = inv.transform_point(pose.x, pose.y);
    let a = angle - grid.origin().theta;
    (px, py, a.cos(), a.sin())
}

/// Casts `n_beams` equally spaced beams (beam k at `theta + 2*pi*k/n_beams`)
/// from `pose` and returns ranges to the first occupied cell boundary,
/// clamped to `max_range`. The pose must lie in a free cell of `world`.
pub fn raycast_scan<T: Real>(
    world: &OccupancyGrid<T>,
    pose: &Pose2<T>,
    max_range: T,
    n_beams: usize,
) -> Result<Scan<T>, WorldError> {
    assert!(n_beams > 0, "n_beams must be positive");
    assert!(max_range > T::zero(), "max_range must be positive");
    let invalid = || WorldError::InvalidPose {
        x: pose.x.to_f64().unwrap_or(f64::NAN),
        y: pose.y.to_f64().unwrap_or(f64::NAN),
    };
    let start = world.world_to_cell(pose.x, pose.y).ok_or_else(invalid)?;
    if world.get(start) != CellState::Free {
        return Err(invalid());
    }
    let two_pi = T::PI() + T::PI();
    let n = T::from_usize(n_beams).unwrap();
    let mut beams = Vec::with_capacity(n_beams);
    for k in 0..n_beams {
        let angle = two_pi * T::from_usize(k).unwrap() / n;
        let (px, py, dx, dy) = beam_in_grid_frame(world, pose, pose.theta + angle);
        let mut ray = GridRay::new(px, py, dx, dy, world.resolution());
        let (range, hit) = loop {
            let (t, cell) = ray.next_crossing();
            if t >= max_range {
                break (max_range, false);
            }
            match in_bounds(world, cell) {
                // Leaving the grid: nothing to hit beyond this point.
                None => break (max_range, false),
                Some(c) if world.get(c) == CellState::Occupied => break (t, true),
                Some(_) => {}
            }
        };
        beams.push(Beam { angle, range, hit });
    }
    Ok(Scan { beams, max_range })
}

/// Integrates a scan taken at `pose` into a belief grid: traversed cells
/// become Free, each hit beam's terminal cell becomes Occupied. Within one
/// scan Occupied wins over Free (beam aliasing), across scans the latest
/// observation wins. Beam segments leaving the grid are clipped.
pub fn integrate_scan<T: Real>(
    map: &mut OccupancyGrid<T>,
    pose: &Pose2<T>,
    scan: &Scan<T>,
) -> Result<(), WorldError> {
    let start = map.world_to_cell(pose.x, pose.y).ok_or(WorldError::InvalidPose {
        x: pose.x.to_f64().unwrap_or(f64::NAN),
        y: pose.y.to_f64().unwrap_or(f64::NAN),
    })?;
    let mut free = Vec::new();
    let mut occupied = Vec::new();
    free.push(start);
    for beam in &scan.beams {
        let (px, py, dx, dy) = beam_in_grid_frame(map, pose, pose.theta + beam.angle);
        let mut ray = GridRay::new(px, py, dx, dy, map.resolution());
        let mut cur = in_bounds(map, ray.cell());
        loop {
            let (t, next) = ray.next_crossing();
            if t > beam.range {
                break;
            }
            if let Some(c) = cur {
                free.push(c);
            }
            cur = in_bounds(map, next);
            if cur.is_none() {
                break;
            }
        }
        if let Some(c) = cur {
            if beam.hit {
                occupied.push(c);
            } else {
                free.push(c);
            }
        }
    }
    for c in free {
        map.set(c, CellState::Free);
    }
    for c in occupied {
        map.set(c, CellState::Occupied);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::io::parse_ascii;

    fn room(width: usize, height: usize) -> OccupancyGrid<f64> {
        let mut g = OccupancyGrid::new(width, height, 1.0, CellState::Free);
        for x in 0..width {
            g.set(Cell::new(x, 0), CellState::Occupied);
            g.set(Cell::new(x, height - 1), CellState::Occupied);
        }
        for y in 0..height {
            g.set(Cell::new(0, y), CellState::Occupied);
            g.set(Cell::new(width - 1, y), CellState::Occupied);
        }
        g
    }

    /// Independent oracle: slab-method ray/AABB intersection against every
    /// occupied cell, returning the smallest entry distance within range.
    fn ray_aabb_oracle(world: &OccupancyGrid<f64>, px: f64, py: f64, angle: f64, max_range: f64) -> (f64, bool) {
        let (dx, dy) = (angle.cos(), angle.sin());
        let mut best = f64::INFINITY;
        for (cell, state) in world.iter_cells() {
            if state != CellState::Occupied {
                continue;
            }
            let (x0, y0) = (cell.x as f64, cell.y as f64);
            let (x1, y1) = (x0 + 1.0, y0 + 1.0);
            let mut t0 = 0.0f64;
            let mut t1 = f64::INFINITY;
            let mut ok = true;
            for (p, d, lo, hi) in [(px, dx, x0, x1), (py, dy, y0, y1)] {
                if d.abs() < 1e-300 {
                    if p < lo || p > hi {
                        ok = false;
                    }
                } else {
                    let (a, b) = ((lo - p) / d, (hi - p) / d);
                    t0 = t0.max(a.min(b));
                    t1 = t1.min(a.max(b));
                }
            }
            if ok && t0 <= t1 && t0 > 0.0 {
                best = best.min(t0);
            }
        }
        if best < max_range {
            (best, true)
        } else {
            (max_range, false)
        }
    }

    #[test]
    fn raycast_matches_ray_aabb_oracle() {
        let text = "\
##########
#........#
#..##....#
#..##..#.#
#........#
#.####...#
#........#
##########
";
        let world = parse_ascii::<f64>(text, 1.0).unwrap();
        let pose = Pose2::new(1.63, 1.31, 0.37);
        let scan = raycast_scan(&world, &pose, 20.0, 57).unwrap();
        for beam in &scan.beams {
            let (r, h) = ray_aabb_oracle(&world, pose.x, pose.y, pose.theta + beam.angle, 20.0);
            assert_eq!(beam.hit, h, "hit mismatch at angle {}", beam.angle);
            assert!((beam.range - r).abs() < 1e-9, "range {} vs oracle {} at angle {}", beam.range, r, beam.angle);
        }
    }

    #[test]
    fn scan_invariants_hold() {
        let world = room(12, 9);
        let pose = Pose2::new(5.5, 4.5, 0.0);
        for max_range in [2.0, 4.0, 50.0] {
            let scan = raycast_scan(&world, &pose, max_range, 73).unwrap();
            assert_eq!(scan.beams.len(), 73);
            for b in &scan.beams {
                assert!(b.range >= 0.0 && b.range <= max_range);
                assert_eq!(b.hit, b.range != max_range, "hit=false iff range==max_range");
            }
        }
    }

    #[test]
    fn raycast_rejects_pose_outside_free_space() {
        let world = room(6, 6);
        assert!(matches!(
            raycast_scan(&world, &Pose2::new(0.5, 0.5, 0.0), 5.0, 4),
            Err(WorldError::InvalidPose { .. })
        ));
        assert!(matches!(
            raycast_scan(&world, &Pose2::new(-3.0, 2.0, 0.0), 5.0, 4),
            Err(WorldError::InvalidPose { .. })
        ));
    }

    #[test]
    fn straight_beam_range_hits_wall_boundary() {
        let world = room(12, 9);
        // Facing +x from (5.5, 4.5): wall cell column x=11 starts at 11.0.
        let pose = Pose2::new(5.5, 4.5, 0.0);
        let scan = raycast_scan(&world, &pose, 50.0, 1).unwrap();
        assert!(scan.beams[0].hit);
        assert!((scan.beams[0].range - 5.5).abs() < 1e-12);
    }

    #[test]
    fn integrate_marks_ray_free_and_endpoint_occupied() {
        let world = room(12, 9);
        let pose = Pose2::new(5.5, 4.5, 0.0);
        let scan = raycast_scan(&world, &pose, 50.0, 1).unwrap();
        let mut belief = OccupancyGrid::new(12, 9, 1.0, CellState::Unknown);
        integrate_scan(&mut belief, &pose, &scan).unwrap();
        for x in 5..11 {
            assert_eq!(belief.get(Cell::new(x, 4)), CellState::Free, "cell {x} on ray");
        }
        assert_eq!(belief.get(Cell::new(11, 4)), CellState::Occupied);
        let unknown = belief.count(CellState::Unknown);
        // 6 free cells plus the hit cell are known; the rest stay unknown.
        assert_eq!(unknown, 12 * 9 - 7, "everything off the single ray stays unknown");
    }

    #[test]
    fn scan_rerenders_relative_to_the_given_pose() {
        // A single +x beam captured at heading 0, re-integrated at heading
        // pi/2, paints up the +y column instead and clips at the grid edge.
        let world = room(12, 9);
        let capture = Pose2::new(5.5, 4.5, 0.0);
        let scan = raycast_scan(&world, &capture, 50.0, 1).unwrap();
        let mut belief = OccupancyGrid::new(12, 9, 1.0, CellState::Unknown);
        let rotated = Pose2::new(5.5, 4.5, std::f64::consts::FRAC_PI_2);
        integrate_scan(&mut belief, &rotated, &scan).unwrap();
        for y in 4..9 {
            assert_eq!(belief.get(Cell::new(5, y)), CellState::Free, "cell y={y}");
        }
        assert_eq!(belief.count(CellState::Occupied), 0, "endpoint clipped away");
        assert_eq!(belief.count(CellState::Free), 5);
    }

    #[test]
    fn integrate_is_idempotent_and_monotone() {
        let world = room(10, 10);
        let pose = Pose2::new(4.3, 5.2, 1.1);
        let scan = raycast_scan(&world, &pose, 6.0, 41).unwrap();
        let mut belief = OccupancyGrid::new(10, 10, 1.0, CellState::Unknown);
        integrate_scan(&mut belief, &pose, &scan).unwrap();
        let known_before: Vec<bool> = belief.cells().iter().map(|&s| s != CellState::Unknown).collect();
        let snapshot = belief.clone();
        integrate_scan(&mut belief, &pose, &scan).unwrap();
        assert_eq!(belief, snapshot, "same scan twice leaves the map unchanged");
        // A second scan from elsewhere never un-knows a cell.
        let pose2 = Pose2::new(7.5, 2.5, -0.4);
        let scan2 = raycast_scan(&world, &pose2, 6.0, 41).unwrap();
        integrate_scan(&mut belief, &pose2, &scan2).unwrap();
        for (i, was_known) in known_before.iter().enumerate() {
            if *was_known {
                assert_ne!(belief.cells()[i], CellState::Unknown);
            }
        }
    }

    #[test]
    fn dense_scan_observation_matches_segment_oracle() {
        // Oracle: a cell is observed iff some beam segment passes through its
        // interior. Computed with independent segment/AABB clipping.
        let world = room(11, 11);
        let pose = Pose2::new(5.47, 5.52, 0.3);
        let max_range = 3.7;
        let scan = raycast_scan(&world, &pose, max_range, 257).unwrap();
        let mut belief = OccupancyGrid::new(11, 11, 1.0, CellState::Unknown);
        integrate_scan(&mut belief, &pose, &scan).unwrap();

        let mut expected = vec![false; 11 * 11];
        expected[belief.index(belief.world_to_cell(pose.x, pose.y).unwrap())] = true;
        for b in &scan.beams {
            let a = pose.theta + b.angle;
            let (dx, dy) = (a.cos(), a.sin());
            for (cell, _) in world.iter_cells() {
                let (x0, y0) = (cell.x as f64, cell.y as f64);
                let mut t0 = 0.0f64;
                let mut t1 = b.range;
                let mut ok = true;
                for (p, d, lo, hi) in [(pose.x, dx, x0, x0 + 1.0), (pose.y, dy, y0, y0 + 1.0)] {
                    if d.abs() < 1e-300 {
                        if p < lo || p > hi {
                            ok = false;
                        }
                    } else {
                        let (a, bb) = ((lo - p) / d, (hi - p) / d);
                        t0 = t0.max(a.min(bb));
                        t1 = t1.min(a.max(bb));
                    }
                }
                // Strict interior crossing; skip knife-edge touches.
                if ok && t1 - t0 > 1e-9 {
                    expected[belief.index(cell)] = true;
                }
            }
        }
        for (i, &exp) in expected.iter().enumerate() {
            let got = belief.cells()[i] != CellState::Unknown;
            assert_eq!(got, exp, "cell {} observation mismatch", i);
        }
    }
}
