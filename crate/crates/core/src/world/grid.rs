//! Occupancy grid storage and cell/world coordinate conversions.

use serde::{Deserialize, Serialize};

use crate::geometry::Pose2;
use crate::scalar::Real;

/// State of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellState {
    Free,
    Occupied,
    Unknown,
}

/// Grid coordinate: `x` is the column, `y` the row. Row-major order sorts by
/// `(y, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    // Field order matters: derived Ord gives row-major comparison.
    pub y: usize,
    pub x: usize,
}

impl Cell {
    pub fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// The eight king-move neighbor offsets, orthogonal first.
pub const ORTHO_OFFSETS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
pub const DIAG_OFFSETS: [(i64, i64); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

/// A 2D occupancy grid. `origin` is the pose of the corner of cell (0,0);
/// cell centers sit at `origin ⊕ ((x+0.5)·res, (y+0.5)·res)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid<T> {
    resolution: T,
    width: usize,
    height: usize,
    origin: Pose2<T>,
    cells: Vec<CellState>,
}

impl<T: Real> OccupancyGrid<T> {
    /// Creates a grid filled with `fill`. Panics if either dimension is zero
    /// or the resolution is not strictly positive.
    pub fn new(width: usize, height: usize, resolution: T, fill: CellState) -> Self {
        assert!(width > 0 && height > 0, "grid dimensions must be positive");
        assert!(resolution > T::zero(), "resolution must be positive");
        Self {
            resolution,
            width,
            height,
            origin: Pose2::identity(),
            cells: vec![fill; width * height],
        }
    }

    pub fn with_origin(mut self, origin: Pose2<T>) -> Self {
        self.origin = origin;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> T {
        self.resolution
    }

    pub fn origin(&self) -> Pose2<T> {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index(&self, cell: Cell) -> usize {
        debug_assert!(self.contains(cell));
        cell.y * self.width + cell.x
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new(index % self.width, index / self.width)
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.x < self.width && cell.y < self.height
    }

    pub fn get(&self, cell: Cell) -> CellState {
        self.cells[self.index(cell)]
    }

    pub fn set(&mut self, cell: Cell, state: CellState) {
        let i = self.index(cell);
        self.cells[i] = state;
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    /// Iterates all cells in row-major order.
    pub fn iter_cells(&self) -> impl Iterator<Item = (Cell, CellState)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, &s)| (self.cell_at(i), s))
    }

    /// In-bounds neighbor of `cell` at the given king-move offset.
    pub fn neighbor(&self, cell: Cell, offset: (i64, i64)) -> Option<Cell> {
        let nx = cell.x as i64 + offset.0;
        let ny = cell.y as i64 + offset.1;
        if nx < 0 || ny < 0 || nx >= self.width as i64 || ny >= self.height as i64 {
            None
        } else {
            Some(Cell::new(nx as usize, ny as usize))
        }
    }

    pub fn count(&self, state: CellState) -> usize {
        self.cells.iter().filter(|&&s| s == state).count()
    }

    /// World coordinates of the center of `cell`.
    pub fn cell_center(&self, cell: Cell) -> (T, T) {
        let half = T::from_f64_lossy(0.5);
        let cx = (T::from_usize(cell.x).unwrap() + half) * self.resolution;
        let cy = (T::from_usize(cell.y).unwrap() + half) * self.resolution;
        self.origin.transform_point(cx, cy)
    }

    /// Cell containing the world point, if in bounds. Round-trips exactly with
    /// [`Self::cell_center`] for in-bounds cells.
    pub fn world_to_cell(&self, x: T, y: T) -> Option<Cell> {
        let inv = self.origin.inverse();
        let (gx, gy) = inv.transform_point(x, y);
        let cx = (gx / self.resolution).floor();
        let cy = (gy / self.resolution).floor();
        if cx < T::zero() || cy < T::zero() {
            return None;
        }
        let cell = Cell::new(cx.to_usize()?, cy.to_usize()?);
        self.contains(cell).then_some(cell)
    }

    /// Merges another grid of equal dimensions into this one. Occupied wins
    /// over Free wins over Unknown, so information never regresses to Unknown.
    pub fn merge_from(&mut self, other: &OccupancyGrid<T>) {
        assert_eq!(
            (self.width, self.height),
            (other.width, other.height),
            "merge requires equal grid dimensions"
        );
        for (mine, theirs) in self.cells.iter_mut().zip(other.cells.iter()) {
            *mine = match (*mine, *theirs) {
                (CellState::Occupied, _) | (_, CellState::Occupied) => CellState::Occupied,
                (CellState::Free, _) | (_, CellState::Free) => CellState::Free,
                _ => CellState::Unknown,
            };
        }
    }
}
