//! CSV builders for run, sweep, compare and noise artifacts.
//!
//! Every file starts with a `# schema: mrex/<kind>/v1` line. Numbers use
//! Rust's shortest round-trip float formatting, so identical inputs always
//! produce byte-identical files. Optional quantities (a run that never
//! reached a coverage threshold, an aggregate over zero values) render as
//! empty fields.

use std::fmt::Write as _;

use mrex::metrics::RunMetrics;
use mrex::noise::NoiseSample;
use mrex::StrategyParams;

/// Per-run metric columns shared by the run/sweep/compare schemas.
pub const METRIC_COLUMNS: &str =
    "t_topo_s,t_total_s,sigma_ind_m2,r_overlap_pct,success,ssim,cycles,union_m2,areas_m2";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// The metric column values for one run row. `success` renders as 0/1;
/// per-robot areas join with ';' to keep one column regardless of N.
pub fn metric_fields(m: &RunMetrics) -> String {
    let areas: Vec<String> = m.areas_m2.iter().map(f64::to_string).collect();
    format!(
        "{},{},{},{},{},{},{},{},{}",
        opt(m.t_topo_s),
        opt(m.t_total_s),
        m.sigma_ind_m2,
        m.r_overlap_pct,
        u8::from(m.success),
        opt(m.ssim),
        m.cycles,
        m.union_m2,
        areas.join(";"),
    )
}

/// Mean and population standard deviation over the values present; empty
/// strings when no value is present.
pub fn mean_std(values: impl Iterator<Item = Option<f64>>) -> (String, String) {
    let vals: Vec<f64> = values.flatten().collect();
    if vals.is_empty() {
        return (String::new(), String::new());
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean.to_string(), var.sqrt().to_string())
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> String {
    mean_std(values).0
}

/// Aggregate metric columns: means of each numeric column, success rate in
/// percent in the success column, areas left empty.
pub fn aggregate_fields(ms: &[&RunMetrics]) -> String {
    let col = |f: &dyn Fn(&RunMetrics) -> Option<f64>| mean_of(ms.iter().map(|m| f(*m)));
    let success_pct = 100.0 * ms.iter().filter(|m| m.success).count() as f64 / ms.len() as f64;
    format!(
        "{},{},{},{},{},{},{},{},",
        col(&|m| m.t_topo_s),
        col(&|m| m.t_total_s),
        col(&|m| Some(m.sigma_ind_m2)),
        col(&|m| Some(m.r_overlap_pct)),
        success_pct,
        col(&|m| m.ssim),
        col(&|m| Some(m.cycles as f64)),
        col(&|m| Some(m.union_m2)),
    )
}

/// Single-run metrics file: one data row.
pub fn run_csv(seed: u64, strategy: &str, p: &StrategyParams, m: &RunMetrics) -> String {
    format!(
        "# schema: mrex/metrics/v1\nseed,strategy,alpha,sigma_d,sigma_r,k_a,k_r,{METRIC_COLUMNS}\n{seed},{strategy},{},{},{},{},{},{}\n",
        p.alpha,
        p.sigma_d,
        p.sigma_r,
        p.k_a,
        p.k_r,
        metric_fields(m),
    )
}

/// One sweep result: the swept value, this run's seed and its metrics.
pub struct SweepRow {
    pub value: f64,
    pub seed: u64,
    pub metrics: RunMetrics,
}

/// Sweep file: run rows grouped by swept value in input order, then one
/// `agg` row per value carrying mean/std of the coverage times.
pub fn sweep_csv(param: &str, rows: &[SweepRow]) -> String {
    let mut out = String::from("# schema: mrex/sweep/v1\n");
    writeln!(
        out,
        "kind,param,value,seed,{METRIC_COLUMNS},t_topo_mean_s,t_topo_std_s,t_total_mean_s,t_total_std_s"
    )
    .expect("writing to String cannot fail");
    for r in rows {
        writeln!(
            out,
            "run,{param},{},{},{},,,,",
            r.value,
            r.seed,
            metric_fields(&r.metrics)
        )
        .expect("writing to String cannot fail");
    }
    let mut seen: Vec<f64> = Vec::new();
    for r in rows {
        if seen.contains(&r.value) {
            continue;
        }
        seen.push(r.value);
        let group: Vec<&SweepRow> = rows.iter().filter(|x| x.value == r.value).collect();
        let (topo_mean, topo_std) = mean_std(group.iter().map(|x| x.metrics.t_topo_s));
        let (total_mean, total_std) = mean_std(group.iter().map(|x| x.metrics.t_total_s));
        writeln!(
            out,
            "agg,{param},{},,,,,,,,,,,{topo_mean},{topo_std},{total_mean},{total_std}",
            r.value
        )
        .expect("writing to String cannot fail");
    }
    out
}

/// One compare result: strategy name, seed, metrics.
pub struct CompareRow {
    pub strategy: &'static str,
    pub seed: u64,
    pub metrics: RunMetrics,
}

/// Directional deltas between the two strategies' aggregate means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareDeltas {
    pub d_t_total_s: Option<f64>,
    pub d_r_overlap_pct: f64,
    pub d_sigma_ind_m2: f64,
}

/// Means of the first strategy minus means of the second, over run rows.
pub fn compare_deltas(rows: &[CompareRow], a: &str, b: &str) -> CompareDeltas {
    let mean = |name: &str, f: &dyn Fn(&RunMetrics) -> Option<f64>| -> Option<f64> {
        let vals: Vec<f64> = rows
            .iter()
            .filter(|r| r.strategy == name)
            .filter_map(|r| f(&r.metrics))
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    };
    let delta = |f: &dyn Fn(&RunMetrics) -> Option<f64>| -> Option<f64> {
        Some(mean(a, f)? - mean(b, f)?)
    };
    CompareDeltas {
        d_t_total_s: delta(&|m| m.t_total_s),
        d_r_overlap_pct: delta(&|m| Some(m.r_overlap_pct)).unwrap_or(f64::NAN),
        d_sigma_ind_m2: delta(&|m| Some(m.sigma_ind_m2)).unwrap_or(f64::NAN),
    }
}

/// Compare file: all run rows (strategy-major, seed order), one `mean` row
/// per strategy, then a `# deltas` comment line (first strategy minus
/// second) so the row count stays runs x 2 + 2.
pub fn compare_csv(rows: &[CompareRow], strategies: [&'static str; 2]) -> String {
    let mut out = String::from("# schema: mrex/compare/v1\n");
    writeln!(out, "kind,strategy,seed,{METRIC_COLUMNS}").expect("writing to String cannot fail");
    for r in rows {
        writeln!(out, "run,{},{},{}", r.strategy, r.seed, metric_fields(&r.metrics))
            .expect("writing to String cannot fail");
    }
    for name in strategies {
        let group: Vec<&RunMetrics> = rows
            .iter()
            .filter(|r| r.strategy == name)
            .map(|r| &r.metrics)
            .collect();
        writeln!(out, "mean,{name},,{}", aggregate_fields(&group))
            .expect("writing to String cannot fail");
    }
    let d = compare_deltas(rows, strategies[0], strategies[1]);
    writeln!(
        out,
        "# deltas,t_total_s={},r_overlap_pct={},sigma_ind_m2={}",
        d.d_t_total_s.map(|v| v.to_string()).unwrap_or_default(),
        d.d_r_overlap_pct,
        d.d_sigma_ind_m2,
    )
    .expect("writing to String cannot fail");
    out
}

/// Noise dump: one row per draw of the generator.
pub fn noise_csv(samples: &[NoiseSample<f64>]) -> String {
    let mut out = String::from("# schema: mrex/noise/v1\nk,w,delta_chi,chi\n");
    for (k, s) in samples.iter().enumerate() {
        writeln!(out, "{},{},{},{}", k + 1, s.w, s.delta_chi, s.chi)
            .expect("writing to String cannot fail");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(t_total: Option<f64>, overlap: f64, sigma: f64, success: bool) -> RunMetrics {
        RunMetrics {
            t_topo_s: t_total.map(|t| t - 10.0),
            t_total_s: t_total,
            sigma_ind_m2: sigma,
            r_overlap_pct: overlap,
            success,
            ssim: Some(0.5),
            areas_m2: vec![10.0, 20.0],
            union_m2: 25.0,
            cycles: t_total.unwrap_or(99.0) as u64,
        }
    }

    #[test]
    fn run_csv_has_schema_header_and_one_row() {
        let text = run_csv(7, "mwf_cn", &StrategyParams::default(), &m(Some(30.0), 12.0, 1.0, true));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "# schema: mrex/metrics/v1");
        assert!(lines[2].starts_with("7,mwf_cn,2,0.095,0.6,1,1,20,30,1,12,1,0.5,30,25,10;20"));
    }

    #[test]
    fn sweep_csv_counts_rows_and_aggregates() {
        let rows = vec![
            SweepRow { value: 0.035, seed: 5, metrics: m(Some(30.0), 10.0, 1.0, true) },
            SweepRow { value: 0.035, seed: 6, metrics: m(Some(50.0), 10.0, 1.0, true) },
            SweepRow { value: 0.095, seed: 5, metrics: m(None, 10.0, 1.0, false) },
            SweepRow { value: 0.095, seed: 6, metrics: m(Some(40.0), 10.0, 1.0, true) },
        ];
        let text = sweep_csv("sigma_d", &rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2 + 4 + 2);
        // Mean 40, population std 10 for the first value.
        assert_eq!(lines[6], "agg,sigma_d,0.035,,,,,,,,,,,30,10,40,10");
        // Single defined value in the second group: std 0.
        assert_eq!(lines[7], "agg,sigma_d,0.095,,,,,,,,,,,30,0,40,0");
    }

    #[test]
    fn compare_deltas_recompute_from_rows() {
        let rows = vec![
            CompareRow { strategy: "mwf_cn", seed: 0, metrics: m(Some(30.0), 10.0, 2.0, true) },
            CompareRow { strategy: "mwf_cn", seed: 1, metrics: m(Some(34.0), 14.0, 4.0, true) },
            CompareRow { strategy: "mmpf", seed: 0, metrics: m(Some(40.0), 11.0, 3.0, true) },
            CompareRow { strategy: "mmpf", seed: 1, metrics: m(Some(44.0), 13.0, 5.0, true) },
        ];
        let d = compare_deltas(&rows, "mwf_cn", "mmpf");
        assert_eq!(d.d_t_total_s, Some(-10.0));
        assert_eq!(d.d_r_overlap_pct, 0.0);
        assert_eq!(d.d_sigma_ind_m2, -1.0);
        let text = compare_csv(&rows, ["mwf_cn", "mmpf"]);
        assert!(text.ends_with("# deltas,t_total_s=-10,r_overlap_pct=0,sigma_ind_m2=-1\n"));
        // 4 run rows + 2 mean rows between header and deltas comment.
        assert_eq!(text.lines().count(), 2 + 4 + 2 + 1);
    }

    #[test]
    fn aggregate_success_column_is_a_percentage() {
        let a = m(Some(30.0), 10.0, 1.0, true);
        let b = m(None, 10.0, 1.0, false);
        let fields = aggregate_fields(&[&a, &b]);
        let success: f64 = fields.split(',').nth(4).unwrap().parse().unwrap();
        assert_eq!(success, 50.0);
    }
}
