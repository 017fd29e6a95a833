//! Scenario files: the TOML schema every subcommand consumes.
//!
//! A scenario nests the full simulator configuration under `[sim]` plus the
//! CLI-level knobs (output directory, snapshot cadence, metric options).
//! Unknown keys anywhere are rejected so a typo cannot silently fall back
//! to a default. `mrex defaults` prints the default scenario; that output
//! re-parses to exactly the default config.

use std::path::{Path, PathBuf};

use mrex::metrics::OverlapForm;
use mrex::SimConfig;
use serde::{Deserialize, Serialize};

use crate::error::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    /// Where artifacts go. Relative paths resolve under `$MREX_OUT` (or the
    /// working directory when unset); a `--out` flag overrides this.
    pub out_dir: Option<PathBuf>,
    /// Write per-robot belief PGM snapshots every this many cycles during
    /// `run`; 0 disables cadence snapshots (finals are always written).
    pub snapshot_every: u32,
    /// Which overlap-ratio form metric rows report.
    pub overlap_form: OverlapForm,
    /// The full simulator configuration.
    pub sim: SimConfig,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            out_dir: None,
            snapshot_every: 0,
            overlap_form: OverlapForm::InclusionExclusion,
            sim: SimConfig::default(),
        }
    }
}

impl Scenario {
    /// Parses a scenario file. The `sim.world` path, when relative, is
    /// rebased onto the scenario file's directory so fixtures work from any
    /// working directory.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Failure::Validation(format!("cannot read scenario {}: {e}", path.display()))
        })?;
        let mut scenario: Scenario = toml::from_str(&text).map_err(|e| {
            Failure::Validation(format!("scenario {}: {e}", path.display()))
        })?;
        if scenario.sim.world.is_relative() {
            if let Some(dir) = path.parent() {
                scenario.sim.world = dir.join(&scenario.sim.world);
            }
        }
        Ok(scenario)
    }

    /// The default scenario rendered as TOML.
    pub fn defaults_toml() -> String {
        toml::to_string_pretty(&Scenario::default())
            .expect("default scenario serializes")
    }
}

/// Resolves the output directory: explicit flag, then the scenario's
/// `out_dir`, then `fallback`; relative results land under `$MREX_OUT`
/// when that is set.
pub fn resolve_out_dir(
    flag: Option<PathBuf>,
    scenario_out: Option<&Path>,
    fallback: &str,
) -> PathBuf {
    let chosen = flag
        .or_else(|| scenario_out.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from(fallback));
    if chosen.is_absolute() {
        return chosen;
    }
    match std::env::var_os("MREX_OUT") {
        Some(root) => PathBuf::from(root).join(chosen),
        None => chosen,
    }
}
