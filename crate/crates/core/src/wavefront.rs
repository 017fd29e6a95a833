//! Integer distance fields over known-free space.
//!
//! Two metrics are provided:
//! - [`mwf_field`]: the modified wave-front distance — 8-connected with step
//!   cost 3 for orthogonal and 4 for diagonal moves (a classic 3-4 chamfer
//!   metric), propagating only through Free cells. Frontier cells are Free
//!   cells, so they are reachable terminals; Unknown and Occupied cells block
//!   propagation.
//! - [`orig_wavefront_field`]: the plain 4-connected unit-cost wavefront used
//!   by the baseline strategy.
//!
//! Both return exact integer distances; unreachable cells carry no value.

use crate::world::{Cell, CellState, OccupancyGrid, DIAG_OFFSETS, ORTHO_OFFSETS};
use crate::Real;

pub const ORTHO_COST: u32 = 3;
pub const DIAG_COST: u32 = 4;

const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("distance field source {0} is outside the map")]
    SourceOutOfBounds(Cell),
    #[error("distance field source {0} is not a free cell")]
    SourceNotFree(Cell),
}

/// A single-source integer distance field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceField {
    source: Cell,
    width: usize,
    height: usize,
    values: Vec<u32>,
}

impl DistanceField {
    pub fn source(&self) -> Cell {
        self.source
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Distance to `cell`, or `None` if unreachable (or out of bounds).
    pub fn get(&self, cell: Cell) -> Option<u32> {
        if cell.x >= self.width || cell.y >= self.height {
            return None;
        }
        let v = self.values[cell.y * self.width + cell.x];
        (v != UNREACHABLE).then_some(v)
    }

    /// Test/tooling constructor for synthetic fields.
    pub fn from_values(source: Cell, width: usize, height: usize, values: Vec<Option<u32>>) -> Self {
        assert_eq!(values.len(), width * height);
        Self {
            source,
            width,
            height,
            values: values.into_iter().map(|v| v.unwrap_or(UNREACHABLE)).collect(),
        }
    }
}

fn check_source<T: Real>(map: &OccupancyGrid<T>, source: Cell) -> Result<(), FieldError> {
    if !map.contains(source) {
        return Err(FieldError::SourceOutOfBounds(source));
    }
    if map.get(source) != CellState::Free {
        return Err(FieldError::SourceNotFree(source));
    }
    Ok(())
}

/// Modified wave-front distance field from `source` over the Free cells of
/// `map`. Dijkstra with a bucket queue; the integer weights {3,4} keep the
/// frontier of distances dense, so buckets beat a binary heap here.
pub fn mwf_field<T: Real>(map: &OccupancyGrid<T>, source: Cell) -> Result<DistanceField, FieldError> {
    check_source(map, source)?;
    let (w, h) = (map.width(), map.height());
    let mut values = vec![UNREACHABLE; w * h];
    values[source.y * w + source.x] = 0;
    // buckets[d] holds cell indices queued at tentative distance d.
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); DIAG_COST as usize + 1];
    buckets[0].push(source.y * w + source.x);
    let mut d = 0usize;
    let mut remaining = 1usize;
    while remaining > 0 {
        while d >= buckets.len() || buckets[d].is_empty() {
            if d + 1 >= buckets.len() {
                buckets.resize(d + 2, Vec::new());
            }
            d += 1;
        }
        let idx = buckets[d].pop().unwrap();
        remaining -= 1;
        if values[idx] != d as u32 {
            continue; // stale entry superseded by a shorter path
        }
        let cell = Cell::new(idx % w, idx / w);
        for (offsets, cost) in [(&ORTHO_OFFSETS, ORTHO_COST), (&DIAG_OFFSETS, DIAG_COST)] {
            for &off in offsets.iter() {
                let Some(n) = map.neighbor(cell, off) else { continue };
                if map.get(n) != CellState::Free {
                    continue;
                }
                let nidx = n.y * w + n.x;
                let nd = d as u32 + cost;
                if nd < values[nidx] {
                    values[nidx] = nd;
                    let slot = nd as usize;
                    if slot >= buckets.len() {
                        buckets.resize(slot + 1, Vec::new());
                    }
                    buckets[slot].push(nidx);
                    remaining += 1;
                }
            }
        }
    }
    Ok(DistanceField {
        source,
        width: w,
        height: h,
        values,
    })
}

/// Plain wavefront: 4-connected breadth-first distances (unit step cost)
/// over Free cells.
pub fn orig_wavefront_field<T: Real>(
    map: &OccupancyGrid<T>,
    source: Cell,
) -> Result<DistanceField, FieldError> {
    check_source(map, source)?;
    let (w, h) = (map.width(), map.height());
    let mut values = vec![UNREACHABLE; w * h];
    values[source.y * w + source.x] = 0;
    let mut queue = std::collections::VecDeque::from([source]);
    while let Some(cell) = queue.pop_front() {
        let d = values[cell.y * w + cell.x];
        for &off in ORTHO_OFFSETS.iter() {
            let Some(n) = map.neighbor(cell, off) else { continue };
            if map.get(n) != CellState::Free {
                continue;
            }
            let nidx = n.y * w + n.x;
            if values[nidx] == UNREACHABLE {
                values[nidx] = d + 1;
                queue.push_back(n);
            }
        }
    }
    Ok(DistanceField {
        source,
        width: w,
        height: h,
        values,
    })
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_and_neighbor_anchor_values() {
        let map = OccupancyGrid::<f64>::new(5, 5, 1.0, CellState::Free);
        let f = mwf_field(&map, Cell::new(2, 2)).unwrap();
        assert_eq!(f.get(Cell::new(2, 2)), Some(0));
        assert_eq!(f.get(Cell::new(3, 2)), Some(ORTHO_COST));
        assert_eq!(f.get(Cell::new(2, 1)), Some(ORTHO_COST));
        assert_eq!(f.get(Cell::new(3, 3)), Some(DIAG_COST));
        assert_eq!(f.get(Cell::new(4, 4)), Some(2 * DIAG_COST));
        // Knight-move cell: one diagonal + one orthogonal step.
        assert_eq!(f.get(Cell::new(4, 3)), Some(DIAG_COST + ORTHO_COST));
    }

    #[test]
    fn unknown_and_occupied_block_propagation() {
        let mut map = OccupancyGrid::<f64>::new(5, 1, 1.0, CellState::Free);
        map.set(Cell::new(2, 0), CellState::Unknown);
        let f = mwf_field(&map, Cell::new(0, 0)).unwrap();
        assert_eq!(f.get(Cell::new(1, 0)), Some(3));
        assert_eq!(f.get(Cell::new(2, 0)), None);
        assert_eq!(f.get(Cell::new(3, 0)), None, "blocked corridor is unreachable");
        map.set(Cell::new(2, 0), CellState::Occupied);
        let f = mwf_field(&map, Cell::new(0, 0)).unwrap();
        assert_eq!(f.get(Cell::new(4, 0)), None);
    }

    #[test]
    fn source_must_be_free_and_in_bounds() {
        let mut map = OccupancyGrid::<f64>::new(3, 3, 1.0, CellState::Free);
        map.set(Cell::new(1, 1), CellState::Occupied);
        assert_eq!(
            mwf_field(&map, Cell::new(1, 1)).unwrap_err(),
            FieldError::SourceNotFree(Cell::new(1, 1))
        );
        assert_eq!(
            mwf_field(&map, Cell::new(7, 0)).unwrap_err(),
            FieldError::SourceOutOfBounds(Cell::new(7, 0))
        );
        assert!(orig_wavefront_field(&map, Cell::new(1, 1)).is_err());
    }

    #[test]
    fn bucket_queue_matches_heap_dijkstra_on_random_maps() {
        for seed in 0..25u64 {
            let map = oracle::random_map(23, 17, 220, seed);
            let mut source = Cell::new(0, 0);
            'find: for (cell, state) in map.iter_cells() {
                if state == CellState::Free {
                    source = cell;
                    break 'find;
                }
            }
            let field = mwf_field(&map, source).unwrap();
            let expected = oracle::dijkstra_34(&map, source);
            for (cell, _) in map.iter_cells() {
                assert_eq!(
                    field.get(cell),
                    expected[cell.y * map.width() + cell.x],
                    "seed {seed} cell {cell}"
                );
            }
        }
    }

    #[test]
    fn unit_wavefront_matches_bfs_oracle() {
        for seed in 100..110u64 {
            let map = oracle::random_map(19, 14, 250, seed);
            let mut source = Cell::new(0, 0);
            for (cell, state) in map.iter_cells() {
                if state == CellState::Free {
                    source = cell;
                    break;
                }
            }
            let field = orig_wavefront_field(&map, source).unwrap();
            let expected = oracle::bfs_unit(&map, source);
            for (cell, _) in map.iter_cells() {
                assert_eq!(field.get(cell), expected[cell.y * map.width() + cell.x]);
            }
        }
    }

    #[test]
    fn metric_is_symmetric_between_free_cells() {
        let map = oracle::random_map(15, 15, 200, 42);
        let mut frees = map
            .iter_cells()
            .filter(|&(_, s)| s == CellState::Free)
            .map(|(c, _)| c);
        let a = frees.next().unwrap();
        let b = frees.nth(40).unwrap();
        let fa = mwf_field(&map, a).unwrap();
        let fb = mwf_field(&map, b).unwrap();
        assert_eq!(fa.get(b), fb.get(a));
    }

    #[test]
    fn removing_an_obstacle_never_increases_distances() {
        let mut map = oracle::random_map(15, 12, 300, 7);
        let source = map
            .iter_cells()
            .find(|&(_, s)| s == CellState::Free)
            .map(|(c, _)| c)
            .unwrap();
        let before = mwf_field(&map, source).unwrap();
        let obstacle = map
            .iter_cells()
            .find(|&(_, s)| s == CellState::Occupied)
            .map(|(c, _)| c)
            .unwrap();
        map.set(obstacle, CellState::Free);
        let after = mwf_field(&map, source).unwrap();
        for (cell, _) in map.iter_cells() {
            if let Some(d_before) = before.get(cell) {
                let d_after = after.get(cell).expect("reachability never shrinks");
                assert!(d_after <= d_before, "cell {cell}: {d_after} > {d_before}");
            }
        }
    }

    #[test]
    fn neighbor_distances_differ_by_at_most_the_step_cost() {
        let map = oracle::random_map(20, 20, 250, 3);
        let source = map
            .iter_cells()
            .find(|&(_, s)| s == CellState::Free)
            .map(|(c, _)| c)
            .unwrap();
        let f = mwf_field(&map, source).unwrap();
        for (cell, state) in map.iter_cells() {
            if state != CellState::Free {
                continue;
            }
            let Some(d) = f.get(cell) else { continue };
            for (offsets, cost) in [(&ORTHO_OFFSETS, 3i64), (&DIAG_OFFSETS, 4i64)] {
                for &off in offsets.iter() {
                    if let Some(n) = map.neighbor(cell, off) {
                        if map.get(n) == CellState::Free {
                            if let Some(dn) = f.get(n) {
                                assert!((d as i64 - dn as i64).abs() <= cost);
                            }
                        }
                    }
                }
            }
        }
    }
}
