//! Multi-robot exploration toolkit.
//!
//! What's here:
//! - `world`: occupancy grids, map file formats, a raycasting range sensor
//!   and scan integration.
//! - `frontier`: frontier detection and clustering on belief grids.
//! - `wavefront`: integer distance fields — the modified wave-front metric
//!   (orthogonal step 3, diagonal step 4 over known-free space) and the plain
//!   4-connected unit-cost wavefront.
//! - `noise`: colored 1/f^alpha noise generated by a seeded FIR recursion
//!   over a SplitMix64/Box-Muller Gaussian stream.
//! - `potential`: frontier goal selection by attractive/repulsive potentials,
//!   in two flavors — the wavefront+colored-noise strategy and a plain
//!   potential-field baseline.
//! - `slam`: submaps, synthetic loop-closure proposal, pose-graph
//!   construction/optimization (centralized and per-robot blocks) and global
//!   map merging, plus plain-text graph import/export.
//! - `sim`: a deterministic synchronous multi-robot simulation loop.
//! - `metrics`: exploration metrics (spread, overlap ratio, success rate,
//!   coverage times, map SSIM).
//!
//! Continuous math is generic over [`scalar::Real`] (`f32`/`f64` via
//! num-traits); the aliases below fix `f64`, which is what the simulator and
//! CLI use.

pub mod frontier;
pub mod geometry;
pub mod metrics;
pub mod noise;
pub mod potential;
pub mod scalar;
pub mod sim;
pub mod slam;
pub mod wavefront;
pub mod world;

pub use scalar::Real;
pub use world::{Cell, CellState};

/// `f64` aliases for the generic core types.
pub type Pose2 = geometry::Pose2<f64>;
pub type OccupancyGrid = world::OccupancyGrid<f64>;
pub type Scan = world::Scan<f64>;
pub type Beam = world::Beam<f64>;
pub type ColoredNoiseGen = noise::ColoredNoiseGen<f64>;
pub type StrategyParams = potential::StrategyParams<f64>;
pub type Submap = slam::Submap<f64>;
pub type PoseGraph = slam::PoseGraph<f64>;
pub type LoopClosure = slam::LoopClosure<f64>;
pub type SimConfig = sim::SimConfig<f64>;
pub type Simulation = sim::Simulation<f64>;
