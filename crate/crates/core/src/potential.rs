//! Potential-field goal selection.
//!
//! Each robot scores every reachable frontier cluster with
//! `P_total = P_a + P_r` and heads for the argmin:
//!
//! - `P_a = -k_a * C_q / d(p, q)` — attraction grows with cluster size `C_q`
//!   and shrinks with the wavefront distance from the robot's cell `p` to the
//!   cluster centroid `q`. The main strategy uses the modified wave-front
//!   metric; the baseline uses the 4-connected unit wavefront. The
//!   `quadratic` form accumulates the term `C_q` times (effectively
//!   `-k_a * C_q^2 / d`).
//! - `P_r` — repulsion evaluated at the candidate centroid, summing over the
//!   *other* robots within sensor range `d_s` (Euclidean, meters). The main
//!   strategy adds `k_r * exp((d - d_s)/sigma_r) + chi_n` per robot in range
//!   (`chi_n` is robot n's current colored-noise value); the baseline uses
//!   `k_r * (d_s - d)/d_s` with no noise. Robots at `d >= d_s` contribute
//!   exactly zero.

use serde::{Deserialize, Serialize};

use crate::frontier::FrontierCluster;
use crate::geometry::Pose2;
use crate::scalar::Real;
use crate::wavefront::{mwf_field, orig_wavefront_field, DistanceField};
use crate::world::{CellState, OccupancyGrid, DIAG_OFFSETS, ORTHO_OFFSETS};
use crate::Cell;

/// Shape of the attractive term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttractiveForm {
    /// `-k_a * C_q / d`
    Linear,
    /// The literal size-times loop: `-k_a * C_q^2 / d`
    Quadratic,
}

/// Direction of the exponential repulsion ramp inside sensor range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepulsionSign {
    /// Exponent `(d - d_s)/sigma_r`: repulsion peaks at the sensor boundary.
    Increasing,
    /// Exponent `(d_s - d)/sigma_r`: repulsion peaks at contact.
    Inverted,
}

/// Which noise value feeds the repulsion term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseTerm {
    /// Accumulated chi (default).
    Chi,
    /// The per-cycle increment delta-chi.
    DeltaChi,
}

/// Exploration strategy selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Modified wave-front distance + exponential repulsion + colored noise.
    MwfCn,
    /// Unit-wavefront baseline with linear repulsion and no noise.
    Mmpf,
}

/// Strategy gains and noise parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrategyParams<T> {
    pub k_a: T,
    pub k_r: T,
    pub sigma_r: T,
    /// Sensor / repulsion range in meters.
    pub d_s: T,
    /// Noise color exponent.
    pub alpha: T,
    /// Variance of the white noise driving chi.
    pub sigma_d: T,
    pub attractive_form: AttractiveForm,
    pub repulsion_sign: RepulsionSign,
    pub noise_term: NoiseTerm,
}

impl<T: Real> Default for StrategyParams<T> {
    fn default() -> Self {
        Self {
            k_a: T::one(),
            k_r: T::one(),
            sigma_r: T::from_f64_lossy(0.6),
            d_s: T::from_f64_lossy(7.0),
            alpha: T::from_f64_lossy(2.0),
            sigma_d: T::from_f64_lossy(0.095),
            attractive_form: AttractiveForm::Linear,
            repulsion_sign: RepulsionSign::Increasing,
            noise_term: NoiseTerm::Chi,
        }
    }
}

/// Attractive potential toward a cluster of `size` cells at wavefront
/// distance `dist` (> 0) from the robot.
pub fn attractive_potential<T: Real>(dist: u32, size: usize, params: &StrategyParams<T>) -> T {
    debug_assert!(dist > 0, "attraction undefined at distance 0");
    let c = T::from_usize(size).unwrap();
    let d = T::from_u32(dist).unwrap();
    match params.attractive_form {
        AttractiveForm::Linear => -(params.k_a * c) / d,
        AttractiveForm::Quadratic => {
            // Literal accumulation, one subtraction per member cell.
            let mut p = T::zero();
            for _ in 0..size {
                p -= params.k_a * c / d;
            }
            p
        }
    }
}

/// Repulsive potential at world point `p` from the given robots. `noise[n]`
/// is robot n's current noise value; it enters only while robot n is within
/// `d_s` of `p`.
pub fn repulsive_potential<T: Real>(
    p: (T, T),
    robots: &[Pose2<T>],
    noise: &[T],
    params: &StrategyParams<T>,
) -> T {
    debug_assert_eq!(robots.len(), noise.len());
    let mut total = T::zero();
    for (robot, &chi) in robots.iter().zip(noise.iter()) {
        let dx = robot.x - p.0;
        let dy = robot.y - p.1;
        let d = (dx * dx + dy * dy).sqrt();
        if d < params.d_s {
            let e = match params.repulsion_sign {
                RepulsionSign::Increasing => (d - params.d_s) / params.sigma_r,
                RepulsionSign::Inverted => (params.d_s - d) / params.sigma_r,
            };
            total += params.k_r * e.exp() + chi;
        }
    }
    total
}

/// Baseline linear repulsion: `k_r * (d_s - d)/d_s` per robot in range.
pub fn linear_repulsive_potential<T: Real>(
    p: (T, T),
    robots: &[Pose2<T>],
    params: &StrategyParams<T>,
) -> T {
    let mut total = T::zero();
    for robot in robots {
        let dx = robot.x - p.0;
        let dy = robot.y - p.1;
        let d = (dx * dx + dy * dy).sqrt();
        if d < params.d_s {
            total += params.k_r * (params.d_s - d) / params.d_s;
        }
    }
    total
}

/// Total potential of one candidate cluster: attraction over the distance
/// field from the robot's cell, repulsion at the centroid's world point.
/// `None` if the centroid is unreachable or the robot sits on it.
pub fn total_potential<T: Real>(
    map: &OccupancyGrid<T>,
    cluster: &FrontierCluster,
    field: &DistanceField,
    peers: &[Pose2<T>],
    peer_noise: &[T],
    params: &StrategyParams<T>,
    strategy: Strategy,
) -> Option<T> {
    let dist = field.get(cluster.centroid)?;
    if dist == 0 {
        return None;
    }
    let p_a = attractive_potential(dist, cluster.size(), params);
    let point = map.cell_center(cluster.centroid);
    let p_r = match strategy {
        Strategy::MwfCn => repulsive_potential(point, peers, peer_noise, params),
        Strategy::Mmpf => linear_repulsive_potential(point, peers, params),
    };
    Some(p_a + p_r)
}

/// Per-candidate breakdown from one goal evaluation, for decision logging.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateEval<T> {
    pub centroid: Cell,
    pub size: usize,
    pub dist: Option<u32>,
    pub p_a: T,
    pub p_r: T,
    pub p_total: T,
}

/// Outcome of scoring all clusters for one robot.
#[derive(Debug, Clone, PartialEq)]
pub struct GoalDecision<T> {
    /// One entry per input cluster, in the input order. Unreachable
    /// candidates carry `dist: None` and zeroed potentials.
    pub candidates: Vec<CandidateEval<T>>,
    /// Index of the selected cluster in the input slice.
    pub chosen: Option<usize>,
}

/// Scores every cluster for robot `robot_idx` and picks the minimum total
/// potential. `noise[n]` is robot n's current noise value (ignored by the
/// baseline strategy). With clusters in canonical order (size descending,
/// then centroid row-major), keeping the first strict minimum implements the
/// tie-break "larger cluster, then row-major centroid".
pub fn evaluate_goals<T: Real>(
    strategy: Strategy,
    map: &OccupancyGrid<T>,
    robot_idx: usize,
    clusters: &[FrontierCluster],
    robots: &[Pose2<T>],
    noise: &[T],
    params: &StrategyParams<T>,
) -> GoalDecision<T> {
    let mut decision = GoalDecision {
        candidates: Vec::with_capacity(clusters.len()),
        chosen: None,
    };
    let Some(robot_cell) = map.world_to_cell(robots[robot_idx].x, robots[robot_idx].y) else {
        return decision;
    };
    if map.get(robot_cell) != CellState::Free {
        return decision;
    }
    let field = match strategy {
        Strategy::MwfCn => mwf_field(map, robot_cell),
        Strategy::Mmpf => orig_wavefront_field(map, robot_cell),
    };
    let Ok(field) = field else {
        return decision;
    };
    let mut peers = Vec::with_capacity(robots.len().saturating_sub(1));
    let mut peer_noise = Vec::with_capacity(peers.capacity());
    for (n, robot) in robots.iter().enumerate() {
        if n != robot_idx {
            peers.push(*robot);
            peer_noise.push(noise.get(n).copied().unwrap_or_else(T::zero));
        }
    }
    let mut best: Option<(usize, T)> = None;
    for (i, cluster) in clusters.iter().enumerate() {
        let dist = field.get(cluster.centroid).filter(|&d| d > 0);
        let eval = match dist {
            None => CandidateEval {
                centroid: cluster.centroid,
                size: cluster.size(),
                dist: None,
                p_a: T::zero(),
                p_r: T::zero(),
                p_total: T::zero(),
            },
            Some(d) => {
                let p_a = attractive_potential(d, cluster.size(), params);
                let point = map.cell_center(cluster.centroid);
                let p_r = match strategy {
                    Strategy::MwfCn => repulsive_potential(point, &peers, &peer_noise, params),
                    Strategy::Mmpf => linear_repulsive_potential(point, &peers, params),
                };
                let p_total = p_a + p_r;
                if best.map_or(true, |(_, b)| p_total < b) {
                    best = Some((i, p_total));
                }
                CandidateEval {
                    centroid: cluster.centroid,
                    size: cluster.size(),
                    dist: Some(d),
                    p_a,
                    p_r,
                    p_total,
                }
            }
        };
        decision.candidates.push(eval);
    }
    decision.chosen = best.map(|(i, _)| i);
    decision
}

/// Steering mode: evaluates the potential at each traversable 8-neighbor of
/// `robot_cell` using a distance field sourced at the chosen goal, and
/// returns the neighbor minimizing it (first strict minimum in fixed offset
/// order). `None` when no neighbor is traversable or reaches the goal.
pub fn steer_step<T: Real>(
    map: &OccupancyGrid<T>,
    robot_cell: Cell,
    goal_field: &DistanceField,
    goal_size: usize,
    peers: &[Pose2<T>],
    peer_noise: &[T],
    params: &StrategyParams<T>,
) -> Option<Cell> {
    let mut best: Option<(Cell, T)> = None;
    for &off in ORTHO_OFFSETS.iter().chain(DIAG_OFFSETS.iter()) {
        let Some(n) = map.neighbor(robot_cell, off) else { continue };
        if map.get(n) != CellState::Free {
            continue;
        }
        let Some(dist) = goal_field.get(n).filter(|&d| d > 0) else { continue };
        let p_a = attractive_potential(dist, goal_size, params);
        let p_r = repulsive_potential(map.cell_center(n), peers, peer_noise, params);
        let p = p_a + p_r;
        if best.map_or(true, |(_, b)| p < b) {
            best = Some((n, p));
        }
    }
    best.map(|(c, _)| c)
}
