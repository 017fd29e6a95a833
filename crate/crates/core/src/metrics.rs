//! Exploration evaluation metrics.
//!
//! - [`sigma_ind`]: population standard deviation of per-robot explored
//!   areas (how evenly work was split).
//! - [`r_overlap`]: overlapping coverage as a percentage of the union.
//! - [`success_rate`]: percentage of successful runs.
//! - [`coverage_times`]: first times at which union coverage reaches 90%
//!   (topological coverage) and 99% (total coverage) of the explorable area.
//! - [`map_ssim`]: structural similarity between two grids rendered at
//!   Free=255 / Occupied=0 / Unknown=128, mean over sliding 7x7 windows with
//!   sample-variance normalization — numerically interchangeable with the
//!   common reference implementation at its uniform-window defaults.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::world::{CellState, OccupancyGrid};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricsError {
    #[error("metric input must not be empty")]
    EmptyInput,
    #[error("total area must be positive")]
    NonPositiveTotal,
    #[error("grid dimensions {0}x{1} and {2}x{3} cover different extents")]
    ExtentMismatch(usize, usize, usize, usize),
    #[error("window size {0} exceeds grid dimensions {1}x{2}")]
    WindowTooLarge(usize, usize, usize),
}

/// How the overlap ratio combines per-robot areas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapForm {
    /// `100 * (sum(S_i) - S_total) / S_total`: the overlapping mass by
    /// inclusion-exclusion. Default.
    InclusionExclusion,
    /// `100 * sum(S_i - S_total) / S_total`: subtracts the total once per
    /// robot. Kept for auditing; generally negative.
    Literal,
}

/// Population standard deviation (divides by N) of per-robot explored areas.
pub fn sigma_ind<T: Real>(areas: &[T]) -> Result<T, MetricsError> {
    if areas.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let n = T::from_usize(areas.len()).unwrap();
    let mean = areas.iter().fold(T::zero(), |a, &b| a + b) / n;
    let var = areas
        .iter()
        .fold(T::zero(), |a, &b| a + (b - mean) * (b - mean))
        / n;
    Ok(var.sqrt())
}

/// Overlap percentage of per-robot areas against the union area.
pub fn r_overlap<T: Real>(areas: &[T], total: T, form: OverlapForm) -> Result<T, MetricsError> {
    if areas.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if total <= T::zero() {
        return Err(MetricsError::NonPositiveTotal);
    }
    let hundred = T::from_f64_lossy(100.0);
    let sum = areas.iter().fold(T::zero(), |a, &b| a + b);
    let n = T::from_usize(areas.len()).unwrap();
    let overlap = match form {
        OverlapForm::InclusionExclusion => sum - total,
        OverlapForm::Literal => sum - n * total,
    };
    Ok(hundred * overlap / total)
}

/// Percentage of `true` outcomes.
pub fn success_rate<T: Real>(outcomes: &[bool]) -> Result<T, MetricsError> {
    if outcomes.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let hits = outcomes.iter().filter(|&&b| b).count();
    Ok(T::from_f64_lossy(100.0) * T::from_usize(hits).unwrap()
        / T::from_usize(outcomes.len()).unwrap())
}

/// First crossing times of the 90% and 99% coverage thresholds.
/// `coverage[i]` is the union coverage fraction at the end of cycle `i + 1`;
/// the returned times are in seconds (`cycle * cycle_period`).
pub fn coverage_times<T: Real>(coverage: &[T], cycle_period: T) -> (Option<T>, Option<T>) {
    let first_at = |threshold: T| {
        coverage
            .iter()
            .position(|&c| c >= threshold)
            .map(|i| T::from_usize(i + 1).unwrap() * cycle_period)
    };
    (
        first_at(T::from_f64_lossy(0.90)),
        first_at(T::from_f64_lossy(0.99)),
    )
}

fn render<T: Real>(grid: &OccupancyGrid<T>) -> Vec<f64> {
    grid.cells()
        .iter()
        .map(|s| match s {
            CellState::Free => 255.0,
            CellState::Occupied => 0.0,
            CellState::Unknown => 128.0,
        })
        .collect()
}

/// Nearest-neighbor resample of `src` onto the cell lattice of `reference`.
fn resample<T: Real>(
    reference: &OccupancyGrid<T>,
    src: &OccupancyGrid<T>,
) -> Result<Vec<f64>, MetricsError> {
    let extent = |n: usize, res: T| T::from_usize(n).unwrap() * res;
    let tol = reference.resolution().min(src.resolution()) * T::from_f64_lossy(0.5);
    if (extent(reference.width(), reference.resolution()) - extent(src.width(), src.resolution()))
        .abs()
        > tol
        || (extent(reference.height(), reference.resolution())
            - extent(src.height(), src.resolution()))
        .abs()
            > tol
    {
        return Err(MetricsError::ExtentMismatch(
            reference.width(),
            reference.height(),
            src.width(),
            src.height(),
        ));
    }
    let vals = render(src);
    let mut out = Vec::with_capacity(reference.len());
    for y in 0..reference.height() {
        for x in 0..reference.width() {
            let sx = (x * src.width()) / reference.width();
            let sy = (y * src.height()) / reference.height();
            out.push(vals[sy * src.width() + sx]);
        }
    }
    Ok(out)
}

/// Mean structural similarity between `reference` and `result` over sliding
/// `window`-sized windows (odd, default 7). `result` is resampled to the
/// reference lattice first if the dimensions differ; grids covering
/// different physical extents are an error. Identical inputs give exactly 1.
pub fn map_ssim<T: Real>(
    reference: &OccupancyGrid<T>,
    result: &OccupancyGrid<T>,
    window: usize,
) -> Result<f64, MetricsError> {
    assert!(window % 2 == 1 && window > 0, "window must be odd");
    let (w, h) = (reference.width(), reference.height());
    if window > w || window > h {
        return Err(MetricsError::WindowTooLarge(window, w, h));
    }
    let a = render(reference);
    let b = if result.width() == w && result.height() == h {
        render(result)
    } else {
        resample(reference, result)?
    };
    let c1 = (0.01f64 * 255.0).powi(2);
    let c2 = (0.03f64 * 255.0).powi(2);
    let np = (window * window) as f64;
    let cov_norm = np / (np - 1.0);
    let mut sum = 0.0;
    let mut count = 0usize;
    for y0 in 0..=(h - window) {
        for x0 in 0..=(w - window) {
            let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for y in y0..y0 + window {
                for x in x0..x0 + window {
                    let va = a[y * w + x];
                    let vb = b[y * w + x];
                    sa += va;
                    sb += vb;
                    saa += va * va;
                    sbb += vb * vb;
                    sab += va * vb;
                }
            }
            let ua = sa / np;
            let ub = sb / np;
            let va = cov_norm * (saa / np - ua * ua);
            let vb = cov_norm * (sbb / np - ub * ub);
            let vab = cov_norm * (sab / np - ua * ub);
            let s = ((2.0 * ua * ub + c1) * (2.0 * vab + c2))
                / ((ua * ua + ub * ub + c1) * (va + vb + c2));
            sum += s;
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

/// Metric record of one simulation run. Times are seconds; areas m^2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    /// First time union coverage reached 90% of the explorable area.
    pub t_topo_s: Option<f64>,
    /// First time union coverage reached 99%.
    pub t_total_s: Option<f64>,
    /// Population std deviation of per-robot discovered areas.
    pub sigma_ind_m2: f64,
    /// Overlap percentage (default inclusion-exclusion form).
    pub r_overlap_pct: f64,
    /// Reached 99% coverage with no goal-holding robot ever stuck.
    pub success: bool,
    /// SSIM of the final merged belief map against the ground truth.
    pub ssim: Option<f64>,
    /// Per-robot first-discovered areas.
    pub areas_m2: Vec<f64>,
    /// Union discovered area.
    pub union_m2: f64,
    /// Cycles executed.
    pub cycles: u64,
}
