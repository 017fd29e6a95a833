//! Scratch diagnostic runner (not part of the library surface).

use mrex::geometry::Pose2;
use mrex::metrics::map_ssim;
use mrex::potential::Strategy;
use mrex::sim::{SimConfig, Simulation};
use mrex::world::load_world;
use std::time::Instant;

fn base_config(seed: u64) -> SimConfig<f64> {
    let mut config = SimConfig::<f64>::default();
    config.n_robots = 2;
    config.start_poses = vec![Pose2::new(1.25, 1.25, 0.0), Pose2::new(1.75, 1.25, 0.0)];
    config.strategy = Strategy::MwfCn;
    config.seed = 3000 + seed;
    config.odom_drift_sigma = 0.02;
    config.slam.submap_window = 10;
    config
}

fn main() {
    let world = load_world::<f64>("maps/maze_50x40.txt".as_ref(), 0.5).unwrap();

    println!("== seed 9, window 10, 1500 cycles, rounds sweep ==");
    for rounds in [50usize, 200, 800] {
        let mut config = base_config(9);
        config.max_cycles = 1500;
        config.slam.rounds = rounds;
        let mut sim = Simulation::with_world(config, world.clone()).unwrap();
        sim.run();
        let t1 = Instant::now();
        let out = sim.run_slam().unwrap();
        let t_slam = t1.elapsed();
        let s_opt = map_ssim(&world, &out.optimized, 7).unwrap();
        let s_dead = map_ssim(&world, &out.dead_reckoned, 7).unwrap();
        let trace_tail: Vec<f64> = out
            .objective_trace
            .iter()
            .rev()
            .take(3)
            .rev()
            .copied()
            .collect();
        println!(
            "rounds {rounds:4} opt {s_opt:.4} dead {s_dead:.4} margin {:+.4} trace_tail {trace_tail:.1?} (slam {t_slam:.1?})",
            s_opt - s_dead,
        );
    }

    println!("\n== all seeds, window 10, max_cycles 400 ==");
    for seed in 0..10u64 {
        let mut config = base_config(seed);
        config.max_cycles = 400;
        let mut sim = Simulation::with_world(config, world.clone()).unwrap();
        let t0 = Instant::now();
        sim.run();
        let t_run = t0.elapsed();
        let t1 = Instant::now();
        let out = sim.run_slam().unwrap();
        let t_slam = t1.elapsed();
        let s_opt = map_ssim(&world, &out.optimized, 7).unwrap();
        let s_dead = map_ssim(&world, &out.dead_reckoned, 7).unwrap();
        println!(
            "seed {seed} cycles {:4} closures {:5} opt {s_opt:.4} dead {s_dead:.4} margin {:+.4} {} (run {t_run:.1?}, slam {t_slam:.1?})",
            sim.cycle(),
            out.accepted_closures,
            s_opt - s_dead,
            if s_opt > s_dead { "OK " } else { "BAD" },
        );
    }
}
