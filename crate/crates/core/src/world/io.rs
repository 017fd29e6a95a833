//! World/map file formats.
//!
//! Two formats are supported and auto-detected by content:
//! - ASCII art: one line per row (row 0 first), `#` = occupied, `.` = free.
//! - Binary PGM (P5, 8-bit): pixel values < 128 are occupied, the rest free.
//!
//! Belief maps export as PGM with Free=255, Occupied=0, Unknown=128.

use std::path::Path;

use crate::scalar::Real;
use crate::world::grid::{Cell, CellState, OccupancyGrid};

/// Errors from world loading and sensor preconditions.
#[derive(Debug, thiserror::Error)]
pub enum WorldError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("map parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("pgm parse error at byte offset {offset}: {msg}")]
    Pgm { offset: usize, msg: String },
    #[error("map has zero explorable area")]
    ZeroArea,
    #[error("pose ({x}, {y}) does not lie in a free cell")]
    InvalidPose { x: f64, y: f64 },
}

/// Loads a ground-truth world from `path` at the given cell resolution
/// (meters per cell). Format is detected from the file content.
pub fn load_world<T: Real>(path: &Path, resolution: T) -> Result<OccupancyGrid<T>, WorldError> {
    let bytes = std::fs::read(path)?;
    let grid = if bytes.starts_with(b"P5") {
        parse_pgm(&bytes, resolution)?
    } else {
        parse_ascii(std::str::from_utf8(&bytes).map_err(|e| WorldError::Parse {
            line: 0,
            col: 0,
            msg: format!("not valid utf-8: {e}"),
        })?, resolution)?
    };
    if grid.count(CellState::Free) == 0 {
        return Err(WorldError::ZeroArea);
    }
    Ok(grid)
}

/// Parses the ASCII map format. Every row must have the same width and only
/// contain `#` or `.`.
pub fn parse_ascii<T: Real>(text: &str, resolution: T) -> Result<OccupancyGrid<T>, WorldError> {
    let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if rows.is_empty() {
        return Err(WorldError::Parse {
            line: 1,
            col: 1,
            msg: "empty map".into(),
        });
    }
    let width = rows[0].chars().count();
    let mut grid = OccupancyGrid::new(width, rows.len(), resolution, CellState::Free);
    for (y, row) in rows.iter().enumerate() {
        let count = row.chars().count();
        if count != width {
            return Err(WorldError::Parse {
                line: y + 1,
                col: count + 1,
                msg: format!("row width {count} differs from first row width {width}"),
            });
        }
        for (x, ch) in row.chars().enumerate() {
            let state = match ch {
                '#' => CellState::Occupied,
                '.' => CellState::Free,
                _ => {
                    return Err(WorldError::Parse {
                        line: y + 1,
                        col: x + 1,
                        msg: format!("unexpected character {ch:?}; expected '#' or '.'"),
                    })
                }
            };
            grid.set(Cell::new(x, y), state);
        }
    }
    Ok(grid)
}

/// Parses an 8-bit binary PGM (P5).
pub fn parse_pgm<T: Real>(bytes: &[u8], resolution: T) -> Result<OccupancyGrid<T>, WorldError> {
    let mut pos = 0usize;
    let magic = pgm_token(bytes, &mut pos)?;
    if magic != b"P5" {
        return Err(WorldError::Pgm {
            offset: 0,
            msg: "missing P5 magic".into(),
        });
    }
    let width = pgm_number(bytes, &mut pos, "width")?;
    let height = pgm_number(bytes, &mut pos, "height")?;
    let maxval = pgm_number(bytes, &mut pos, "maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(WorldError::Pgm {
            offset: pos,
            msg: format!("unsupported maxval {maxval}; only 8-bit PGM is accepted"),
        });
    }
    if width == 0 || height == 0 {
        return Err(WorldError::Pgm {
            offset: pos,
            msg: "zero image dimension".into(),
        });
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let need = width * height;
    if bytes.len() < pos + need {
        return Err(WorldError::Pgm {
            offset: bytes.len(),
            msg: format!("raster truncated: need {need} bytes, found {}", bytes.len() - pos),
        });
    }
    let mut grid = OccupancyGrid::new(width, height, resolution, CellState::Free);
    for (i, &v) in bytes[pos..pos + need].iter().enumerate() {
        let state = if v < 128 { CellState::Occupied } else { CellState::Free };
        grid.set(Cell::new(i % width, i / width), state);
    }
    Ok(grid)
}

fn pgm_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8], WorldError> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(WorldError::Pgm {
            offset: start,
            msg: "unexpected end of header".into(),
        });
    }
    Ok(&bytes[start..*pos])
}

fn pgm_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize, WorldError> {
    let start = *pos;
    let tok = pgm_token(bytes, pos)?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| WorldError::Pgm {
            offset: start,
            msg: format!("invalid {what} field"),
        })
}

/// Renders a belief or world grid as binary PGM bytes
/// (Free=255, Occupied=0, Unknown=128).
pub fn to_pgm_bytes<T: Real>(grid: &OccupancyGrid<T>) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", grid.width(), grid.height()).into_bytes();
    out.extend(grid.cells().iter().map(|s| match s {
        CellState::Free => 255u8,
        CellState::Occupied => 0,
        CellState::Unknown => 128,
    }));
    out
}

/// Writes [`to_pgm_bytes`] output to a file.
pub fn save_pgm<T: Real>(grid: &OccupancyGrid<T>, path: &Path) -> Result<(), WorldError> {
    std::fs::write(path, to_pgm_bytes(grid))?;
    Ok(())
}

/// ASCII rendering for diagnostics: `#` occupied, `.` free, `?` unknown.
pub fn to_ascii<T: Real>(grid: &OccupancyGrid<T>) -> String {
    let mut s = String::with_capacity((grid.width() + 1) * grid.height());
    for y in 0..grid.height() {
        for x in 0..grid.width() {
            s.push(match grid.get(Cell::new(x, y)) {
                CellState::Free => '.',
                CellState::Occupied => '#',
                CellState::Unknown => '?',
            });
        }
        s.push('\n');
    }
    s
}
