//! Ground-truth worlds, belief grids, file formats and the range sensor.

mod grid;
mod io;
mod sensor;

pub use grid::{Cell, CellState, OccupancyGrid, DIAG_OFFSETS, ORTHO_OFFSETS};
pub use io::{load_world, parse_ascii, parse_pgm, save_pgm, to_ascii, to_pgm_bytes, WorldError};
pub use sensor::{integrate_scan, raycast_scan, Beam, Scan};
