//! Deterministic synchronous multi-robot exploration loop.
//!
//! Each cycle, every robot first scans the true world from its cycle-start
//! pose; then robots are processed in id order: integrate the cycle's scans
//! (own plus those of comm-reachable peers, each at the sender's broadcast
//! odometry pose), replan on the configured interval (one noise draw,
//! frontier clustering, potential-field goal selection, A* path), advance
//! one cell if the ground truth allows it, and update stuck bookkeeping.
//! Peer positions and noise values are snapshotted at cycle start, so every
//! robot sees the previous cycle's world regardless of processing order.
//!
//! Determinism contract: identical config (including seed) reproduces a
//! bit-identical event log. Wall-clock timings are therefore kept out of
//! the event log and reported separately.

mod events;
mod path;

pub use events::{
    metrics_from_events, EventLog, EventRecord, EventsError, Milestone, TimingRecord,
};
pub use path::{path_cost, plan_path, PathError};

use std::collections::{BTreeMap, VecDeque};
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::frontier::frontier_clusters;
use crate::geometry::Pose2;
use crate::metrics::{MetricsError, RunMetrics};
use crate::noise::{derive_seed, ColoredNoiseGen, GaussianStream};
use crate::potential::{evaluate_goals, NoiseTerm, Strategy, StrategyParams};
use crate::slam::{
    apply_odometry, build_pose_graph, build_submap, merge_global_map, odometry_delta,
    optimize_distributed, propose_and_score_closures, ClosureConfig, PoseGraph, SlamError, Submap,
    VertexId,
};
use crate::world::{
    integrate_scan, load_world, raycast_scan, Cell, CellState, OccupancyGrid, Scan, WorldError,
    DIAG_OFFSETS, ORTHO_OFFSETS,
};
use crate::{frontier::FrontierCluster, Real};

/// Per-robot seed stream tags.
const NOISE_TAG: u64 = 1;
const DRIFT_TAG: u64 = 2;
const CLOSURE_TAG: u64 = 3;

/// Who can exchange maps with whom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum CommModel<T> {
    /// Every robot reaches every other robot each cycle.
    AlwaysOn,
    /// Peers exchange only when strictly closer than `radius` meters
    /// (previous cycle's true positions), so radius 0 disables comms.
    Radius { radius: T },
}

impl<T> Default for CommModel<T> {
    fn default() -> Self {
        CommModel::AlwaysOn
    }
}

/// Submap cadence and loop-closure / optimizer settings for the mapping
/// back end driven by [`Simulation::run_slam`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[serde(bound(deserialize = "T: Real + serde::Deserialize<'de>"))]
pub struct SlamConfig<T> {
    /// Cycles per submap window.
    pub submap_window: u32,
    /// Gate: submap pairs with odometry anchors farther apart are never
    /// scored for loop closure.
    pub lambda: T,
    /// Std deviation of the synthetic closure's translation error.
    pub sigma_xy: T,
    /// Std deviation of the synthetic closure's heading error.
    pub sigma_theta: T,
    /// Probability a scored pair is drawn as an outlier (confidence x0.4).
    pub outlier_rate: f64,
    /// Gauss-Seidel rounds of the distributed optimizer.
    pub rounds: usize,
    /// Gauss-Newton iterations per robot block per round.
    pub inner_iters: usize,
    /// Optimizer convergence tolerance.
    pub tol: T,
}

impl<T: Real> Default for SlamConfig<T> {
    fn default() -> Self {
        Self {
            submap_window: 30,
            lambda: T::from_f64_lossy(10.0),
            sigma_xy: T::from_f64_lossy(0.05),
            sigma_theta: T::from_f64_lossy(0.01),
            outlier_rate: 0.0,
            rounds: 50,
            inner_iters: 10,
            tol: T::from_f64_lossy(1e-9),
        }
    }
}

/// Full description of one run. Identical configs produce identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[serde(bound(deserialize = "T: Real + serde::Deserialize<'de>"))]
pub struct SimConfig<T> {
    /// Ground-truth map file (ASCII art or PGM).
    pub world: PathBuf,
    /// Meters per cell when loading the world.
    pub resolution: T,
    pub n_robots: usize,
    /// One start pose per robot, each in a free world cell. Co-location is
    /// allowed; separation is the repulsion term's job.
    pub start_poses: Vec<Pose2<T>>,
    /// Sensor range in meters; also copied into `params.d_s` at
    /// construction so sensing and repulsion share one range.
    pub d_s: T,
    pub n_beams: usize,
    /// Simulated seconds per cycle.
    pub cycle_period: T,
    /// Odometry drift: std deviation of the Gaussian error added to each
    /// pose delta component, per meter traveled. 0 keeps odometry exact.
    pub odom_drift_sigma: T,
    pub strategy: Strategy,
    pub params: StrategyParams<T>,
    /// Seconds without cell change after which a goal-holding robot counts
    /// as stuck.
    pub stuck_window: T,
    pub comm: CommModel<T>,
    pub seed: u64,
    pub max_cycles: u32,
    /// Planning cadence in cycles (1 = replan every cycle). A blocked move
    /// forces a replan on the next cycle regardless.
    pub replan_interval: u32,
    /// Frontier clusters smaller than this are ignored.
    pub min_cluster_size: usize,
    pub slam: SlamConfig<T>,
}

impl<T: Real> Default for SimConfig<T> {
    fn default() -> Self {
        Self {
            world: PathBuf::new(),
            resolution: T::from_f64_lossy(0.5),
            n_robots: 2,
            start_poses: Vec::new(),
            d_s: T::from_f64_lossy(7.0),
            n_beams: 360,
            cycle_period: T::one(),
            odom_drift_sigma: T::zero(),
            strategy: Strategy::MwfCn,
            params: StrategyParams::default(),
            stuck_window: T::from_f64_lossy(120.0),
            comm: CommModel::AlwaysOn,
            seed: 0,
            max_cycles: 5000,
            replan_interval: 1,
            min_cluster_size: 1,
            slam: SlamConfig::default(),
        }
    }
}

/// One robot's live state.
#[derive(Debug, Clone)]
pub struct RobotState<T> {
    pub id: usize,
    /// Ground-truth pose; always in a free world cell.
    pub true_pose: Pose2<T>,
    /// Dead-reckoned pose (true deltas plus drift).
    pub odom_pose: Pose2<T>,
    pub belief_map: OccupancyGrid<T>,
    /// Selected frontier-cluster centroid, if any.
    pub goal: Option<Cell>,
    pub noise_gen: ColoredNoiseGen<T>,
    /// Remaining planned cells; the head is the robot's own cell.
    pub path: Vec<Cell>,
    /// First cycle of the current motionless streak.
    pub stuck_since: Option<u32>,
    /// Latest broadcast noise term (chi or delta-chi per the params).
    pub noise_value: T,
}

/// True iff the robot's true-pose cell has not changed for at least
/// `stuck_window` seconds of simulated time as of cycle `now`.
pub fn detect_stuck<T: Real>(
    robot: &RobotState<T>,
    now: u32,
    stuck_window: T,
    cycle_period: T,
) -> bool {
    match robot.stuck_since {
        None => false,
        Some(since) => {
            let frozen = T::from_u32(now.saturating_sub(since) + 1).unwrap() * cycle_period;
            frozen >= stuck_window
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Slam(#[from] SlamError),
}

/// Mapping back-end products for one finished run.
#[derive(Debug, Clone)]
pub struct SlamOutcome<T> {
    pub graph: PoseGraph<T>,
    pub estimates: BTreeMap<VertexId, Pose2<T>>,
    pub accepted_closures: usize,
    /// Global map re-rendered at the raw odometry anchors.
    pub dead_reckoned: OccupancyGrid<T>,
    /// Global map re-rendered at the optimized anchors.
    pub optimized: OccupancyGrid<T>,
    pub objective_trace: Vec<T>,
}

/// One exploration run in progress.
#[derive(Debug, Clone)]
pub struct Simulation<T: Real> {
    config: SimConfig<T>,
    world: OccupancyGrid<T>,
    robots: Vec<RobotState<T>>,
    cycle: u32,
    /// Ground-truth free world cells observed by anyone, by cell index.
    discovered: Vec<bool>,
    /// Per robot: cells it was among the first to observe.
    attributed: Vec<Vec<bool>>,
    s_cells: Vec<usize>,
    union_cells: usize,
    free_total: usize,
    drift_rngs: Vec<GaussianStream>,
    /// Per robot, per cycle: (odometry pose, true pose, scan).
    trajectories: Vec<Vec<(Pose2<T>, Pose2<T>, Scan<T>)>>,
    log: EventLog<T>,
    milestones_hit: [bool; 2],
    needs_replan: Vec<bool>,
    finished: bool,
}

impl<T: Real> Simulation<T> {
    /// Loads the world named by the config and builds the initial state.
    pub fn new(config: SimConfig<T>) -> Result<Self, SimError> {
        let world = load_world(&config.world, config.resolution)?;
        Self::with_world(config, world)
    }

    /// Builds the initial state over an already-loaded ground-truth grid
    /// (the config's world path is ignored).
    pub fn with_world(mut config: SimConfig<T>, world: OccupancyGrid<T>) -> Result<Self, SimError> {
        let fail = |msg: String| Err(SimError::Config(msg));
        if config.n_robots == 0 {
            return fail("n_robots must be at least 1".into());
        }
        if config.start_poses.len() != config.n_robots {
            return fail(format!(
                "{} start poses for {} robots",
                config.start_poses.len(),
                config.n_robots
            ));
        }
        if !(config.d_s > T::zero()) {
            return fail("d_s must be positive".into());
        }
        if config.n_beams == 0 || config.max_cycles == 0 || config.replan_interval == 0 {
            return fail("n_beams, max_cycles and replan_interval must be positive".into());
        }
        if !(config.cycle_period > T::zero()) || !(config.stuck_window > T::zero()) {
            return fail("cycle_period and stuck_window must be positive".into());
        }
        if config.slam.submap_window == 0 {
            return fail("slam.submap_window must be positive".into());
        }
        if !(config.params.alpha >= T::zero()) || !(config.params.sigma_d >= T::zero()) {
            return fail("params.alpha and params.sigma_d must be non-negative".into());
        }
        for (i, pose) in config.start_poses.iter().enumerate() {
            let ok = world
                .world_to_cell(pose.x, pose.y)
                .is_some_and(|c| world.get(c) == CellState::Free);
            if !ok {
                return fail(format!("start pose {i} is not in a free world cell"));
            }
        }
        config.params.d_s = config.d_s;
        let blank = || {
            OccupancyGrid::new(
                world.width(),
                world.height(),
                world.resolution(),
                CellState::Unknown,
            )
            .with_origin(world.origin())
        };
        let n = config.n_robots;
        let robots = (0..n)
            .map(|i| RobotState {
                id: i,
                true_pose: config.start_poses[i],
                odom_pose: config.start_poses[i],
                belief_map: blank(),
                goal: None,
                noise_gen: ColoredNoiseGen::new(
                    config.params.alpha,
                    config.params.sigma_d,
                    derive_seed(config.seed, &[NOISE_TAG, i as u64]),
                ),
                path: Vec::new(),
                stuck_since: None,
                noise_value: T::zero(),
            })
            .collect();
        let drift_rngs = (0..n)
            .map(|i| GaussianStream::new(derive_seed(config.seed, &[DRIFT_TAG, i as u64])))
            .collect();
        let free_total = world.count(CellState::Free);
        Ok(Self {
            robots,
            cycle: 0,
            discovered: vec![false; world.len()],
            attributed: vec![vec![false; world.len()]; n],
            s_cells: vec![0; n],
            union_cells: 0,
            free_total,
            drift_rngs,
            trajectories: vec![Vec::new(); n],
            log: EventLog::default(),
            milestones_hit: [false; 2],
            needs_replan: vec![false; n],
            finished: false,
            config,
            world,
        })
    }

    pub fn config(&self) -> &SimConfig<T> {
        &self.config
    }

    pub fn world(&self) -> &OccupancyGrid<T> {
        &self.world
    }

    pub fn robots(&self) -> &[RobotState<T>] {
        &self.robots
    }

    pub fn cycle(&self) -> u32 {
        self.cycle
    }

    /// True once a cycle ended with every robot freshly replanned and
    /// goalless: no reachable frontiers remain anywhere.
    pub fn finished(&self) -> bool {
        self.finished
    }

    pub fn log(&self) -> &EventLog<T> {
        &self.log
    }

    pub fn into_log(self) -> EventLog<T> {
        self.log
    }

    /// (per-robot first-discovered cell counts, union cell count,
    /// ground-truth free cell count).
    pub fn coverage_cells(&self) -> (Vec<usize>, usize, usize) {
        (self.s_cells.clone(), self.union_cells, self.free_total)
    }

    /// World cell indices first observed by `robot`.
    pub fn attributed_cells(&self, robot: usize) -> Vec<usize> {
        indices_of(&self.attributed[robot])
    }

    /// World cell indices observed by anyone.
    pub fn discovered_cells(&self) -> Vec<usize> {
        indices_of(&self.discovered)
    }

    /// Metrics recomputed from this run's log.
    pub fn metrics(&self) -> Result<RunMetrics, MetricsError> {
        metrics_from_events(&self.log, self.config.cycle_period.to_f64().unwrap_or(1.0))
    }

    /// Steps until the exploration fixes (no reachable frontiers) or the
    /// cycle cap is hit.
    pub fn run(&mut self) {
        while self.cycle < self.config.max_cycles && !self.finished {
            self.step();
        }
    }

    /// Executes one synchronous cycle. Stepping a finished simulation is a
    /// fixed point: robots idle and only log rows accrue.
    pub fn step(&mut self) {
        self.cycle += 1;
        let now = self.cycle;
        let n = self.config.n_robots;
        let interval = self.config.replan_interval;
        // Previous cycle's state, seen symmetrically by every robot.
        let snap_true: Vec<Pose2<T>> = self.robots.iter().map(|r| r.true_pose).collect();
        let snap_odom: Vec<Pose2<T>> = self.robots.iter().map(|r| r.odom_pose).collect();
        let snap_noise: Vec<T> = self.robots.iter().map(|r| r.noise_value).collect();
        let mut observed: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut replanned = vec![false; n];
        // (1) Sense: every robot scans the true world from its cycle-start
        // pose. Raycast cost is attributed to each robot's timing below.
        let mut scans: Vec<Scan<T>> = Vec::with_capacity(n);
        let mut sense_micros = vec![0u64; n];
        for i in 0..n {
            let t0 = Instant::now();
            let scan = raycast_scan(
                &self.world,
                &snap_true[i],
                self.config.d_s,
                self.config.n_beams,
            )
            .expect("true pose stays in a free world cell");
            observed[i] = observed_free_indices(&self.world, &snap_true[i], &scan);
            self.trajectories[i].push((snap_odom[i], snap_true[i], scan.clone()));
            sense_micros[i] = t0.elapsed().as_micros() as u64;
            scans.push(scan);
        }
        for i in 0..n {
            let t0 = Instant::now();
            // (2)+(3) Believe every reachable robot's scan (own included) at
            // its broadcast odometry pose. Integration is last-writer-wins
            // across scans, so a stale occupied artifact heals as soon as any
            // robot re-observes the cell as free.
            for j in 0..n {
                if j == i || reachable(&self.config.comm, &snap_true[i], &snap_true[j]) {
                    let _ = integrate_scan(&mut self.robots[i].belief_map, &snap_odom[j], &scans[j]);
                }
            }
            // (4) Replan on cadence or after a blocked move.
            if self.needs_replan[i] || (now - 1) % interval == 0 {
                self.needs_replan[i] = false;
                replanned[i] = true;
                let robot = &mut self.robots[i];
                let sample = robot.noise_gen.next_sample();
                robot.noise_value = match self.config.params.noise_term {
                    NoiseTerm::Chi => sample.chi,
                    NoiseTerm::DeltaChi => sample.delta_chi,
                };
                let clusters = viable_clusters(
                    &robot.belief_map,
                    frontier_clusters(&robot.belief_map, self.config.min_cluster_size),
                );
                // Only peers in comm range broadcast their position and
                // noise; self goes first so index 0 is the planning robot.
                let mut positions = vec![robot.odom_pose];
                let mut noise_vals = vec![robot.noise_value];
                for j in 0..n {
                    if j != i && reachable(&self.config.comm, &snap_true[i], &snap_true[j]) {
                        positions.push(snap_odom[j]);
                        noise_vals.push(snap_noise[j]);
                    }
                }
                let decision = evaluate_goals(
                    self.config.strategy,
                    &robot.belief_map,
                    0,
                    &clusters,
                    &positions,
                    &noise_vals,
                    &self.config.params,
                );
                robot.goal = None;
                robot.path.clear();
                if let Some(k) = decision.chosen {
                    let centroid = clusters[k].centroid;
                    let from = robot.belief_map.world_to_cell(robot.odom_pose.x, robot.odom_pose.y);
                    if let Some(p) =
                        from.and_then(|f| plan_path(&robot.belief_map, f, centroid).ok())
                    {
                        robot.goal = Some(centroid);
                        robot.path = p;
                    }
                }
            }
            // (5) Advance one cell if the ground truth allows it.
            let mut moved = false;
            if self.robots[i].path.len() >= 2 {
                let next = self.robots[i].path[1];
                if self.world.get(next) == CellState::Free {
                    let robot = &mut self.robots[i];
                    robot.path.remove(0);
                    let (wx, wy) = self.world.cell_center(next);
                    let prev = robot.true_pose;
                    let heading = (wy - prev.y).atan2(wx - prev.x);
                    let new_true = Pose2::new(wx, wy, heading);
                    let sigma = self.config.odom_drift_sigma;
                    robot.odom_pose = if sigma > T::zero() {
                        let delta = odometry_delta(&prev, &new_true);
                        let len = (new_true.x - prev.x).hypot(new_true.y - prev.y);
                        let scale = sigma * len;
                        let mut g = || T::from_f64_lossy(self.drift_rngs[i].next_standard());
                        let noisy =
                            Pose2::new(delta.x + scale * g(), delta.y + scale * g(), delta.theta + scale * g());
                        apply_odometry(&robot.odom_pose, &noisy)
                    } else {
                        // Zero drift means odometry tracks truth bitwise; going
                        // through the delta round-trip would leave trig dust
                        // that can flip boundary-exact beam endpoints.
                        new_true
                    };
                    robot.true_pose = new_true;
                    moved = true;
                } else {
                    // Believed free, actually blocked: learn it and replan.
                    let robot = &mut self.robots[i];
                    robot.belief_map.set(next, CellState::Occupied);
                    robot.path.clear();
                    self.needs_replan[i] = true;
                }
            } else if self.robots[i].path.len() == 1 {
                // Arrived; the next replan picks a fresh goal.
                self.robots[i].goal = None;
                self.robots[i].path.clear();
            }
            // (6) Stuck bookkeeping.
            let robot = &mut self.robots[i];
            if moved {
                robot.stuck_since = None;
            } else if robot.stuck_since.is_none() {
                robot.stuck_since = Some(now);
            }
            self.log.timings.push(TimingRecord {
                cycle: now,
                robot: i,
                micros: sense_micros[i] + t0.elapsed().as_micros() as u64,
            });
        }
        // First-discoverer attribution; same-cycle co-discoveries go to all.
        let mut newly: Vec<usize> = Vec::new();
        for (i, cells) in observed.iter().enumerate() {
            for &idx in cells {
                if !self.discovered[idx] && !self.attributed[i][idx] {
                    self.attributed[i][idx] = true;
                    self.s_cells[i] += 1;
                    newly.push(idx);
                }
            }
        }
        for idx in newly {
            if !self.discovered[idx] {
                self.discovered[idx] = true;
                self.union_cells += 1;
            }
        }
        let coverage_pct = 100.0 * self.union_cells as f64 / self.free_total.max(1) as f64;
        for (slot, (threshold, pct)) in [(90u8, 90.0f64), (99, 99.0)].iter().enumerate() {
            if !self.milestones_hit[slot] && coverage_pct >= *pct {
                self.milestones_hit[slot] = true;
                self.log.milestones.push(Milestone { threshold_pct: *threshold, cycle: now });
            }
        }
        let res2 = {
            let r = self.world.resolution().to_f64().unwrap_or(1.0);
            r * r
        };
        let overlap_m2 =
            (self.s_cells.iter().sum::<usize>() - self.union_cells) as f64 * res2;
        for i in 0..n {
            let robot = &self.robots[i];
            let stuck = robot.goal.is_some()
                && detect_stuck(robot, now, self.config.stuck_window, self.config.cycle_period);
            self.log.records.push(EventRecord {
                cycle: now,
                robot: i,
                pose: robot.true_pose,
                goal: robot.goal,
                coverage_pct: T::from_f64_lossy(coverage_pct),
                s_i_m2: T::from_f64_lossy(self.s_cells[i] as f64 * res2),
                overlap_m2: T::from_f64_lossy(overlap_m2),
                stuck,
            });
        }
        if (0..n).all(|i| replanned[i] && self.robots[i].goal.is_none()) {
            self.finished = true;
        }
    }

    /// Runs the mapping back end over the trajectory recorded so far:
    /// cuts submaps on the configured window, proposes and scores loop
    /// closures, optimizes the pose graph distributedly, and renders the
    /// merged global map at both raw odometry and optimized anchors.
    pub fn run_slam(&self) -> Result<SlamOutcome<T>, SimError> {
        let cfg = &self.config.slam;
        let window = cfg.submap_window as usize;
        let template = OccupancyGrid::new(
            self.world.width(),
            self.world.height(),
            self.world.resolution(),
            CellState::Unknown,
        )
        .with_origin(self.world.origin());
        let mut submaps: Vec<Submap<T>> = Vec::new();
        let mut truth: BTreeMap<VertexId, Pose2<T>> = BTreeMap::new();
        let mut chains: Vec<Vec<Pose2<T>>> = vec![Vec::new(); self.config.n_robots];
        for (robot, traj) in self.trajectories.iter().enumerate() {
            for (index, chunk) in traj.chunks(window).enumerate() {
                let pairs: Vec<(Pose2<T>, Scan<T>)> =
                    chunk.iter().map(|(odom, _, scan)| (*odom, scan.clone())).collect();
                let submap = build_submap(
                    robot,
                    index,
                    (index * window) as u64,
                    &pairs,
                    &template,
                )?;
                truth.insert(VertexId::new(robot, index), chunk[0].1);
                chains[robot].push(chunk[0].0);
                submaps.push(submap);
            }
        }
        let closures = propose_and_score_closures(
            &submaps,
            &truth,
            &template,
            &ClosureConfig {
                lambda: cfg.lambda,
                sigma_xy: cfg.sigma_xy,
                sigma_theta: cfg.sigma_theta,
                outlier_rate: cfg.outlier_rate,
                seed: derive_seed(self.config.seed, &[CLOSURE_TAG]),
            },
        );
        let accepted_closures = closures.len();
        let graph = build_pose_graph(&chains, &closures)?;
        let dead_reckoned = merge_global_map(&BTreeMap::new(), &submaps, &template);
        let result = optimize_distributed(&graph, cfg.rounds, cfg.inner_iters, cfg.tol)?;
        let optimized = merge_global_map(&result.estimates, &submaps, &template);
        Ok(SlamOutcome {
            graph,
            accepted_closures,
            dead_reckoned,
            optimized,
            objective_trace: result.trace.clone(),
            estimates: result.estimates,
        })
    }
}

fn indices_of(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect()
}

fn reachable<T: Real>(comm: &CommModel<T>, a: &Pose2<T>, b: &Pose2<T>) -> bool {
    match comm {
        CommModel::AlwaysOn => true,
        CommModel::Radius { radius } => (a.x - b.x).hypot(a.y - b.y) < *radius,
    }
}

/// Drops clusters whose unknown neighbors can never be observed.
///
/// A beam reaches a cell only through a face of a non-occupied cell, so an
/// Unknown region is observable iff it is 4-connected to known free space
/// through non-occupied cells. Without this filter, sealed pockets (such as
/// the blind cell behind a wall corner, which no ray can enter) would keep
/// a frontier alive forever and exploration would never terminate.
fn viable_clusters<T: Real>(
    map: &OccupancyGrid<T>,
    clusters: Vec<FrontierCluster>,
) -> Vec<FrontierCluster> {
    let mut open = vec![false; map.len()];
    let mut queue: VecDeque<Cell> = VecDeque::new();
    for (cell, state) in map.iter_cells() {
        if state == CellState::Free {
            open[map.index(cell)] = true;
            queue.push_back(cell);
        }
    }
    while let Some(cell) = queue.pop_front() {
        for &off in ORTHO_OFFSETS.iter() {
            if let Some(nb) = map.neighbor(cell, off) {
                let idx = map.index(nb);
                if !open[idx] && map.get(nb) != CellState::Occupied {
                    open[idx] = true;
                    queue.push_back(nb);
                }
            }
        }
    }
    let has_open_unknown = |cell: Cell| {
        ORTHO_OFFSETS
            .iter()
            .chain(DIAG_OFFSETS.iter())
            .filter_map(|&off| map.neighbor(cell, off))
            .any(|u| map.get(u) == CellState::Unknown && open[map.index(u)])
    };
    clusters
        .into_iter()
        .filter(|c| c.cells.iter().any(|&m| has_open_unknown(m)))
        .collect()
}

/// Ground-truth free world cells the scan observes from `pose`.
fn observed_free_indices<T: Real>(
    world: &OccupancyGrid<T>,
    pose: &Pose2<T>,
    scan: &Scan<T>,
) -> Vec<usize> {
    let mut scratch = OccupancyGrid::new(
        world.width(),
        world.height(),
        world.resolution(),
        CellState::Unknown,
    )
    .with_origin(world.origin());
    let _ = integrate_scan(&mut scratch, pose, scan);
    scratch
        .cells()
        .iter()
        .zip(world.cells().iter())
        .enumerate()
        .filter_map(|(i, (&seen, &truth))| {
            (seen == CellState::Free && truth == CellState::Free).then_some(i)
        })
        .collect()
}
