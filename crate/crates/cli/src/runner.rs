//! Run execution shared by the run/sweep/compare subcommands.
//!
//! The world file is loaded and validated once up front; batches then run
//! in a rayon worker pool over fully isolated simulations and the caller
//! writes all rows from the collected results, so output is deterministic
//! regardless of scheduling.

use mrex::metrics::{map_ssim, r_overlap, OverlapForm, RunMetrics};
use mrex::world::load_world;
use mrex::{OccupancyGrid, SimConfig, Simulation};
use rayon::prelude::*;

use crate::error::Failure;

/// SSIM window used for every reported map score.
pub const SSIM_WINDOW: usize = 7;

/// A finished run: the simulation (log, robots, world) plus its metric
/// record with the merged-belief SSIM filled in.
pub struct RunProducts {
    pub sim: Simulation,
    pub merged_belief: OccupancyGrid,
    pub metrics: RunMetrics,
}

/// Loads and validates the scenario's world once for a whole batch.
pub fn load_scenario_world(config: &SimConfig) -> Result<OccupancyGrid, Failure> {
    load_world(&config.world, config.resolution).map_err(|e| {
        Failure::Validation(format!("world {}: {e}", config.world.display()))
    })
}

/// Runs one simulation to completion. `on_cycle` fires after every step
/// (the run subcommand hooks map snapshots here).
pub fn run_sim(
    config: SimConfig,
    world: OccupancyGrid,
    overlap_form: OverlapForm,
    mut on_cycle: impl FnMut(&Simulation) -> Result<(), Failure>,
) -> Result<RunProducts, Failure> {
    let max_cycles = config.max_cycles;
    let mut sim = Simulation::with_world(config, world)?;
    while !sim.finished() && sim.cycle() < max_cycles {
        sim.step();
        on_cycle(&sim)?;
    }
    let mut metrics = sim.metrics()?;
    if overlap_form != OverlapForm::InclusionExclusion {
        metrics.r_overlap_pct =
            r_overlap(&metrics.areas_m2, metrics.union_m2, overlap_form)?;
    }
    let mut merged_belief = sim.robots()[0].belief_map.clone();
    for robot in &sim.robots()[1..] {
        merged_belief.merge_from(&robot.belief_map);
    }
    metrics.ssim = Some(map_ssim(sim.world(), &merged_belief, SSIM_WINDOW)?);
    Ok(RunProducts { sim, merged_belief, metrics })
}

/// Runs a batch of configs against one shared world in a worker pool and
/// returns their metric records in input order.
pub fn run_batch(
    configs: Vec<SimConfig>,
    world: &OccupancyGrid,
    overlap_form: OverlapForm,
) -> Result<Vec<RunMetrics>, Failure> {
    configs
        .into_par_iter()
        .map(|config| {
            run_sim(config, world.clone(), overlap_form, |_| Ok(())).map(|p| p.metrics)
        })
        .collect()
}
