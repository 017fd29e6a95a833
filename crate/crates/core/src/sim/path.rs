//! Grid path planning for the exploration loop.
//!
//! A* over Free cells with the same step costs as the wavefront metric
//! (3 orthogonal, 4 diagonal), so a returned path's cost equals the
//! wavefront distance between its endpoints. Goals are frontier-cluster
//! centroids, which are themselves Free frontier cells; any non-Free
//! target is rejected as unreachable.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use crate::world::{CellState, OccupancyGrid, DIAG_OFFSETS, ORTHO_OFFSETS};
use crate::{Cell, Real};

/// Planning failure: the target is not a traversable Free cell, or no
/// Free-cell path connects the endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathError {
    Unreachable,
}

impl fmt::Display for PathError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathError::Unreachable => write!(f, "goal unreachable over known free space"),
        }
    }
}

impl std::error::Error for PathError {}

/// Total {3, 4} cost of a cell path (0 for a single cell).
pub fn path_cost(path: &[Cell]) -> u32 {
    path.windows(2)
        .map(|w| {
            let dx = w[0].x.abs_diff(w[1].x);
            let dy = w[0].y.abs_diff(w[1].y);
            debug_assert!(dx <= 1 && dy <= 1 && dx + dy > 0, "non-adjacent step");
            if dx + dy == 2 {
                4
            } else {
                3
            }
        })
        .sum()
}

/// Octile lower bound under {3, 4} step costs.
fn heuristic(a: Cell, b: Cell) -> u32 {
    let dx = a.x.abs_diff(b.x) as u32;
    let dy = a.y.abs_diff(b.y) as u32;
    4 * dx.min(dy) + 3 * dx.abs_diff(dy)
}

/// Shortest 8-connected path from `from` to `to` over Free cells of `map`,
/// including both endpoints. Ties between equal-cost frontier nodes break
/// by insertion order, making the result deterministic. `from == to`
/// yields the single-cell path.
pub fn plan_path<T: Real>(
    map: &OccupancyGrid<T>,
    from: Cell,
    to: Cell,
) -> Result<Vec<Cell>, PathError> {
    if !map.contains(from) || !map.contains(to) || map.get(from) != CellState::Free {
        return Err(PathError::Unreachable);
    }
    if from == to {
        return Ok(vec![from]);
    }
    if map.get(to) != CellState::Free {
        return Err(PathError::Unreachable);
    }
    let w = map.width();
    let start = map.index(from);
    let target = map.index(to);
    let mut g: Vec<Option<u32>> = vec![None; map.len()];
    let mut parent: Vec<usize> = vec![usize::MAX; map.len()];
    let mut heap: BinaryHeap<Reverse<(u32, u64, usize)>> = BinaryHeap::new();
    let mut seq = 0u64;
    g[start] = Some(0);
    heap.push(Reverse((heuristic(from, to), seq, start)));
    while let Some(Reverse((f, _, idx))) = heap.pop() {
        let cell = map.cell_at(idx);
        let d = g[idx].expect("queued node has a g score");
        if f != d + heuristic(cell, to) {
            continue; // stale entry
        }
        if idx == target {
            let mut path = vec![to];
            let mut cur = idx;
            while cur != start {
                cur = parent[cur];
                path.push(map.cell_at(cur));
            }
            path.reverse();
            return Ok(path);
        }
        let costs = ORTHO_OFFSETS
            .iter()
            .map(|&o| (o, 3u32))
            .chain(DIAG_OFFSETS.iter().map(|&o| (o, 4u32)));
        for (off, cost) in costs {
            let Some(n) = map.neighbor(cell, off) else { continue };
            if map.get(n) != CellState::Free {
                continue;
            }
            let nidx = n.y * w + n.x;
            let nd = d + cost;
            if g[nidx].map_or(true, |old| nd < old) {
                g[nidx] = Some(nd);
                parent[nidx] = idx;
                seq += 1;
                heap.push(Reverse((nd + heuristic(n, to), seq, nidx)));
            }
        }
    }
    Err(PathError::Unreachable)
}
