//! Per-cycle event records, their CSV form, and metric extraction.
//!
//! The run log is the durable face of a simulation: every per-run metric is
//! recomputable from it alone. Two files are written per run so that the
//! primary log stays bit-identical across re-runs of the same seed: the
//! event log holds only deterministic quantities, while wall-clock
//! computation times go to a separate timing log.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::geometry::Pose2;
use crate::metrics::{self, MetricsError, OverlapForm, RunMetrics};
use crate::world::Cell;
use crate::Real;

/// One robot's row for one cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord<T> {
    pub cycle: u32,
    pub robot: usize,
    /// Ground-truth pose at the end of the cycle.
    pub pose: Pose2<T>,
    /// Goal centroid after this cycle's planning, if any.
    pub goal: Option<Cell>,
    /// Union coverage after this cycle, percent of explorable free area.
    pub coverage_pct: T,
    /// This robot's cumulative first-discovered area.
    pub s_i_m2: T,
    /// Global overlap mass (sum of per-robot areas minus union).
    pub overlap_m2: T,
    /// Whether this robot held a goal and had not moved for the stuck
    /// window as of this cycle.
    pub stuck: bool,
}

/// Coverage threshold crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Milestone {
    pub threshold_pct: u8,
    pub cycle: u32,
}

/// Wall-clock computation time of one robot's cycle. Nondeterministic by
/// nature, hence logged separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimingRecord {
    pub cycle: u32,
    pub robot: usize,
    pub micros: u64,
}

/// Full log of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog<T> {
    /// One record per (cycle, robot), cycle-major in robot id order.
    pub records: Vec<EventRecord<T>>,
    /// 90% / 99% coverage crossings, at most one each.
    pub milestones: Vec<Milestone>,
    /// Per-robot cycle timings; not part of the deterministic surface.
    pub timings: Vec<TimingRecord>,
}

impl<T> Default for EventLog<T> {
    fn default() -> Self {
        Self { records: Vec::new(), milestones: Vec::new(), timings: Vec::new() }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EventsError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

const SCHEMA: &str = "# schema: mrex/events/v1";
const HEADER: &str = "cycle,robot,x,y,theta,goal_x,goal_y,coverage_pct,s_i_m2,overlap_m2,stuck";

fn num<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

impl<T: Real> EventLog<T> {
    /// Deterministic CSV: schema line, header, one row per record, then one
    /// comment line per milestone.
    pub fn to_events_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(SCHEMA);
        out.push('\n');
        out.push_str(HEADER);
        out.push('\n');
        for r in &self.records {
            let (gx, gy) = match r.goal {
                Some(c) => (c.x.to_string(), c.y.to_string()),
                None => (String::new(), String::new()),
            };
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.cycle,
                r.robot,
                num(r.pose.x),
                num(r.pose.y),
                num(r.pose.theta),
                gx,
                gy,
                num(r.coverage_pct),
                num(r.s_i_m2),
                num(r.overlap_m2),
                u8::from(r.stuck),
            )
            .expect("writing to String cannot fail");
        }
        for m in &self.milestones {
            writeln!(out, "# milestone,{},{}", m.threshold_pct, m.cycle)
                .expect("writing to String cannot fail");
        }
        out
    }

    /// Wall-clock timings as their own CSV.
    pub fn to_timing_csv(&self) -> String {
        let mut out = String::from("# schema: mrex/timing/v1\ncycle,robot,computation_us\n");
        for t in &self.timings {
            writeln!(out, "{},{},{}", t.cycle, t.robot, t.micros)
                .expect("writing to String cannot fail");
        }
        out
    }

    /// Parses the event CSV back into a log (timings are not part of it).
    pub fn from_events_csv(text: &str) -> Result<Self, EventsError> {
        let err = |line: usize, msg: &str| EventsError::Parse { line, msg: msg.into() };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim() == SCHEMA => {}
            _ => return Err(err(1, "missing schema line")),
        }
        match lines.next() {
            Some((_, l)) if l.trim() == HEADER => {}
            _ => return Err(err(2, "missing header line")),
        }
        let mut log = EventLog::default();
        for (i, line) in lines {
            let lineno = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# milestone,") {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 2 {
                    return Err(err(lineno, "milestone needs threshold and cycle"));
                }
                let threshold_pct = parts[0]
                    .parse()
                    .map_err(|_| err(lineno, "bad milestone threshold"))?;
                let cycle = parts[1].parse().map_err(|_| err(lineno, "bad milestone cycle"))?;
                log.milestones.push(Milestone { threshold_pct, cycle });
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 11 {
                return Err(err(lineno, "expected 11 fields"));
            }
            let int = |s: &str, what: &str| -> Result<u64, EventsError> {
                s.parse().map_err(|_| err(lineno, what))
            };
            let float = |s: &str, what: &str| -> Result<T, EventsError> {
                s.parse::<f64>()
                    .map(T::from_f64_lossy)
                    .map_err(|_| err(lineno, what))
            };
            let goal = match (f[5].is_empty(), f[6].is_empty()) {
                (true, true) => None,
                (false, false) => Some(Cell::new(
                    int(f[5], "bad goal_x")? as usize,
                    int(f[6], "bad goal_y")? as usize,
                )),
                _ => return Err(err(lineno, "goal must set both or neither coordinate")),
            };
            log.records.push(EventRecord {
                cycle: int(f[0], "bad cycle")? as u32,
                robot: int(f[1], "bad robot")? as usize,
                pose: Pose2::new(
                    float(f[2], "bad x")?,
                    float(f[3], "bad y")?,
                    float(f[4], "bad theta")?,
                ),
                goal,
                coverage_pct: float(f[7], "bad coverage_pct")?,
                s_i_m2: float(f[8], "bad s_i_m2")?,
                overlap_m2: float(f[9], "bad overlap_m2")?,
                stuck: match f[10] {
                    "0" => false,
                    "1" => true,
                    _ => return Err(err(lineno, "stuck must be 0 or 1")),
                },
            });
        }
        Ok(log)
    }
}

/// Computes the per-run metric record from the log alone. `cycle_period` is
/// seconds of simulated time per cycle. SSIM needs the grids, so it stays
/// `None` here.
pub fn metrics_from_events<T: Real>(
    log: &EventLog<T>,
    cycle_period: f64,
) -> Result<RunMetrics, MetricsError> {
    if log.records.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut t_topo_cycle = None;
    let mut t_total_cycle = None;
    let mut areas: BTreeMap<usize, f64> = BTreeMap::new();
    for r in &log.records {
        let pct = num(r.coverage_pct);
        if t_topo_cycle.is_none() && pct >= 90.0 {
            t_topo_cycle = Some(r.cycle);
        }
        if t_total_cycle.is_none() && pct >= 99.0 {
            t_total_cycle = Some(r.cycle);
        }
        areas.insert(r.robot, num(r.s_i_m2));
    }
    let last = log.records.last().expect("nonempty");
    let areas: Vec<f64> = areas.into_values().collect();
    let union_m2 = areas.iter().sum::<f64>() - num(last.overlap_m2);
    let stuck_before_finish = log.records.iter().any(|r| {
        r.stuck && t_total_cycle.map_or(true, |c| r.cycle <= c)
    });
    Ok(RunMetrics {
        t_topo_s: t_topo_cycle.map(|c| c as f64 * cycle_period),
        t_total_s: t_total_cycle.map(|c| c as f64 * cycle_period),
        sigma_ind_m2: metrics::sigma_ind(&areas)?,
        r_overlap_pct: metrics::r_overlap(&areas, union_m2, OverlapForm::InclusionExclusion)?,
        success: t_total_cycle.is_some() && !stuck_before_finish,
        ssim: None,
        areas_m2: areas,
        union_m2,
        cycles: last.cycle as u64,
    })
}
