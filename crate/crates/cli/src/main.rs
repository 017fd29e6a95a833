//! `mrex`: scenario-driven runner for the multi-robot exploration
//! simulator.
//!
//! Subcommands: `run` (one scenario, full artifacts), `sweep` (one strategy
//! parameter over a value list), `compare` (both strategies on paired
//! seeds), `noise` (colored-noise dump), `defaults` (print the default
//! scenario) and `validate` (parse and check a scenario). Exit codes:
//! 0 success, 2 validation error, 3 runtime failure.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use mrex::metrics::map_ssim;
use mrex::potential::Strategy;
use mrex::world::save_pgm;
use mrex::{ColoredNoiseGen, Simulation, StrategyParams};
use mrex_cli::csv::{
    compare_csv, compare_deltas, noise_csv, run_csv, sweep_csv, CompareRow, SweepRow,
};
use mrex_cli::error::Failure;
use mrex_cli::runner::{load_scenario_world, run_batch, run_sim, SSIM_WINDOW};
use mrex_cli::scenario::{resolve_out_dir, Scenario};

#[derive(Parser)]
#[command(
    name = "mrex",
    version,
    about = "Deterministic multi-robot exploration: run scenarios, sweep parameters, compare strategies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one scenario and write its artifacts.
    Run {
        /// Scenario TOML file.
        scenario: PathBuf,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (overrides the scenario's out_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one strategy parameter over a list of values.
    Sweep {
        /// Scenario TOML file.
        scenario: PathBuf,
        /// Swept parameter: alpha, sigma_d, sigma_r, k_a or k_r.
        #[arg(long)]
        param: String,
        /// Comma-separated values to sweep.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
        /// Seeded runs per value (seeds = scenario seed + run index).
        #[arg(long, default_value_t = 3)]
        runs: usize,
        /// Output directory (overrides the scenario's out_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run mwf_cn and mmpf on paired seeds and report the deltas.
    Compare {
        /// Scenario TOML file (its strategy field is ignored).
        scenario: PathBuf,
        /// Paired runs per strategy (seeds = scenario seed + run index).
        #[arg(long, default_value_t = 20)]
        runs: usize,
        /// Output directory (overrides the scenario's out_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump a seeded colored-noise sequence (k, w, delta_chi, chi).
    Noise {
        /// Color exponent (0 white, 1 pink, 2 brown).
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        /// Variance of the driving white noise.
        #[arg(long = "sigma-d", default_value_t = 0.095)]
        sigma_d: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Samples to draw.
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the default scenario TOML.
    Defaults,
    /// Parse a scenario and check it against the simulator's preconditions.
    Validate {
        /// Scenario TOML file.
        scenario: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(failure) = dispatch(cli.command) {
        eprintln!("{failure}");
        std::process::exit(failure.exit_code());
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { scenario, seed, out } => cmd_run(&scenario, seed, out),
        Command::Sweep { scenario, param, values, runs, out } => {
            cmd_sweep(&scenario, &param, &values, runs, out)
        }
        Command::Compare { scenario, runs, out } => cmd_compare(&scenario, runs, out),
        Command::Noise { alpha, sigma_d, seed, count, out } => {
            cmd_noise(alpha, sigma_d, seed, count, out)
        }
        Command::Defaults => {
            print!("{}", Scenario::defaults_toml());
            Ok(())
        }
        Command::Validate { scenario } => cmd_validate(&scenario),
    }
}

fn strategy_name(strategy: Strategy) -> &'static str {
    match strategy {
        Strategy::MwfCn => "mwf_cn",
        Strategy::Mmpf => "mmpf",
    }
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::Runtime(format!("writing {}: {e}", path.display())))
}

fn save_map(grid: &mrex::OccupancyGrid, path: &Path) -> Result<(), Failure> {
    save_pgm(grid, path).map_err(|e| Failure::Runtime(format!("writing {}: {e}", path.display())))
}

fn fmt_time(v: Option<f64>) -> String {
    match v {
        Some(t) => format!("{t} s"),
        None => "never".into(),
    }
}

fn cmd_run(path: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<(), Failure> {
    let mut scenario = Scenario::load(path)?;
    if let Some(s) = seed {
        scenario.sim.seed = s;
    }
    let world = load_scenario_world(&scenario.sim)?;
    let out_dir = resolve_out_dir(out, scenario.out_dir.as_deref(), "mrex-run");
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::Runtime(format!("creating {}: {e}", out_dir.display())))?;

    let snapshot_every = scenario.snapshot_every;
    let products = run_sim(scenario.sim.clone(), world, scenario.overlap_form, |sim| {
        if snapshot_every > 0 && sim.cycle() % snapshot_every == 0 {
            for robot in sim.robots() {
                let file = out_dir
                    .join(format!("belief_robot{}_cycle{:06}.pgm", robot.id, sim.cycle()));
                save_map(&robot.belief_map, &file)?;
            }
        }
        Ok(())
    })?;
    let sim = &products.sim;
    let metrics = &products.metrics;

    write(&out_dir.join("events.csv"), sim.log().to_events_csv())?;
    write(&out_dir.join("timing.csv"), sim.log().to_timing_csv())?;
    let strategy = strategy_name(sim.config().strategy);
    write(
        &out_dir.join("metrics.csv"),
        run_csv(sim.config().seed, strategy, &sim.config().params, metrics),
    )?;
    for robot in sim.robots() {
        save_map(&robot.belief_map, &out_dir.join(format!("belief_robot{}.pgm", robot.id)))?;
    }
    save_map(&products.merged_belief, &out_dir.join("merged_belief.pgm"))?;
    let slam = sim.run_slam().map_err(Failure::from)?;
    save_map(&slam.dead_reckoned, &out_dir.join("slam_dead_reckoned.pgm"))?;
    save_map(&slam.optimized, &out_dir.join("slam_optimized.pgm"))?;
    let ssim_opt = map_ssim(sim.world(), &slam.optimized, SSIM_WINDOW)?;
    let ssim_dead = map_ssim(sim.world(), &slam.dead_reckoned, SSIM_WINDOW)?;

    let areas: Vec<String> = metrics.areas_m2.iter().map(|a| format!("{a:.2}")).collect();
    println!("run {}: strategy {strategy}, seed {}", path.display(), sim.config().seed);
    println!(
        "  cycles {}, finished {}, success {}",
        metrics.cycles,
        sim.finished(),
        metrics.success
    );
    println!(
        "  T_topo {}, T_total {}",
        fmt_time(metrics.t_topo_s),
        fmt_time(metrics.t_total_s)
    );
    println!(
        "  S_i [{}] m2, sigma_ind {:.3} m2, r_overlap {:.2} %",
        areas.join(", "),
        metrics.sigma_ind_m2,
        metrics.r_overlap_pct
    );
    println!(
        "  merged-belief SSIM {:.4}; slam: {} closures, optimized SSIM {ssim_opt:.4}, dead-reckoned SSIM {ssim_dead:.4}",
        metrics.ssim.unwrap_or(f64::NAN),
        slam.accepted_closures
    );
    println!("  artifacts: {}", out_dir.display());
    Ok(())
}

fn set_param(params: &mut StrategyParams, name: &str, value: f64) -> Result<(), Failure> {
    match name {
        "alpha" => params.alpha = value,
        "sigma_d" => params.sigma_d = value,
        "sigma_r" => params.sigma_r = value,
        "k_a" => params.k_a = value,
        "k_r" => params.k_r = value,
        other => {
            return Err(Failure::Validation(format!(
                "param {other} is not sweepable; choose one of alpha, sigma_d, sigma_r, k_a, k_r"
            )))
        }
    }
    Ok(())
}

fn cmd_sweep(
    path: &Path,
    param: &str,
    values: &[f64],
    runs: usize,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    if values.is_empty() {
        return Err(Failure::Validation("sweep needs at least one --values entry".into()));
    }
    if runs == 0 {
        return Err(Failure::Validation("--runs must be at least 1".into()));
    }
    let scenario = Scenario::load(path)?;
    let world = load_scenario_world(&scenario.sim)?;
    let base_seed = scenario.sim.seed;
    let mut configs = Vec::with_capacity(values.len() * runs);
    let mut keys = Vec::with_capacity(values.len() * runs);
    for &value in values {
        for index in 0..runs {
            let mut config = scenario.sim.clone();
            set_param(&mut config.params, param, value)?;
            config.seed = base_seed + index as u64;
            keys.push((value, config.seed));
            configs.push(config);
        }
    }
    let metrics = run_batch(configs, &world, scenario.overlap_form)?;
    let rows: Vec<SweepRow> = keys
        .into_iter()
        .zip(metrics)
        .map(|((value, seed), metrics)| SweepRow { value, seed, metrics })
        .collect();

    let out_dir = resolve_out_dir(out, scenario.out_dir.as_deref(), "mrex-sweep");
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::Runtime(format!("creating {}: {e}", out_dir.display())))?;
    let csv_path = out_dir.join("sweep.csv");
    write(&csv_path, sweep_csv(param, &rows))?;

    println!("sweep {param} over {values:?}, {runs} runs per value");
    for &value in values {
        let group: Vec<&SweepRow> = rows.iter().filter(|r| r.value == value).collect();
        let (mean, std) = mrex_cli::csv::mean_std(group.iter().map(|r| r.metrics.t_total_s));
        let reached = group.iter().filter(|r| r.metrics.t_total_s.is_some()).count();
        let mean = if mean.is_empty() { "never".into() } else { format!("{mean} s (std {std})") };
        println!("  {param} = {value}: mean T_total {mean}, {reached}/{} runs reached 99%", group.len());
    }
    println!("  artifacts: {}", csv_path.display());
    Ok(())
}

fn cmd_compare(path: &Path, runs: usize, out: Option<PathBuf>) -> Result<(), Failure> {
    if runs == 0 {
        return Err(Failure::Validation("--runs must be at least 1".into()));
    }
    let scenario = Scenario::load(path)?;
    let world = load_scenario_world(&scenario.sim)?;
    let base_seed = scenario.sim.seed;
    let strategies = [Strategy::MwfCn, Strategy::Mmpf];
    let mut configs = Vec::with_capacity(2 * runs);
    let mut keys = Vec::with_capacity(2 * runs);
    for strategy in strategies {
        for index in 0..runs {
            let mut config = scenario.sim.clone();
            config.strategy = strategy;
            config.seed = base_seed + index as u64;
            keys.push((strategy_name(strategy), config.seed));
            configs.push(config);
        }
    }
    let metrics = run_batch(configs, &world, scenario.overlap_form)?;
    let rows: Vec<CompareRow> = keys
        .into_iter()
        .zip(metrics)
        .map(|((strategy, seed), metrics)| CompareRow { strategy, seed, metrics })
        .collect();

    let out_dir = resolve_out_dir(out, scenario.out_dir.as_deref(), "mrex-compare");
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::Runtime(format!("creating {}: {e}", out_dir.display())))?;
    let csv_path = out_dir.join("compare.csv");
    write(&csv_path, compare_csv(&rows, ["mwf_cn", "mmpf"]))?;

    println!("compare mwf_cn vs mmpf, {runs} paired runs");
    for name in ["mwf_cn", "mmpf"] {
        let group: Vec<&CompareRow> = rows.iter().filter(|r| r.strategy == name).collect();
        let (mean, _) = mrex_cli::csv::mean_std(group.iter().map(|r| r.metrics.t_total_s));
        let mean = if mean.is_empty() { "never".into() } else { format!("{mean} s") };
        let success = group.iter().filter(|r| r.metrics.success).count();
        println!("  {name}: mean T_total {mean}, {success}/{} successful", group.len());
    }
    let d = compare_deltas(&rows, "mwf_cn", "mmpf");
    println!(
        "  deltas (mwf_cn - mmpf): T_total {}, r_overlap {:.3} %, sigma_ind {:.3} m2",
        d.d_t_total_s.map(|v| format!("{v:.1} s")).unwrap_or_else(|| "n/a".into()),
        d.d_r_overlap_pct,
        d.d_sigma_ind_m2,
    );
    println!("  artifacts: {}", csv_path.display());
    Ok(())
}

fn cmd_noise(
    alpha: f64,
    sigma_d: f64,
    seed: u64,
    count: usize,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    if !(alpha >= 0.0) || !(sigma_d >= 0.0) {
        return Err(Failure::Validation("alpha and sigma-d must be non-negative".into()));
    }
    if count == 0 {
        return Err(Failure::Validation("--count must be at least 1".into()));
    }
    let mut generator = ColoredNoiseGen::new(alpha, sigma_d, seed);
    let samples: Vec<_> = (0..count).map(|_| generator.next_sample()).collect();
    let out_dir = resolve_out_dir(out, None, "mrex-noise");
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::Runtime(format!("creating {}: {e}", out_dir.display())))?;
    let csv_path = out_dir.join("noise.csv");
    write(&csv_path, noise_csv(&samples))?;
    println!(
        "noise alpha {alpha} sigma_d {sigma_d} seed {seed}: {count} samples, final chi {}",
        samples.last().expect("count >= 1").chi
    );
    println!("  artifacts: {}", csv_path.display());
    Ok(())
}

fn cmd_validate(path: &Path) -> Result<(), Failure> {
    let scenario = Scenario::load(path)?;
    let world = load_scenario_world(&scenario.sim)?;
    Simulation::with_world(scenario.sim.clone(), world)?;
    println!(
        "ok: {} (world {}, {} robots, strategy {}, seed {})",
        path.display(),
        scenario.sim.world.display(),
        scenario.sim.n_robots,
        strategy_name(scenario.sim.strategy),
        scenario.sim.seed
    );
    Ok(())
}
