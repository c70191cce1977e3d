//! Experiment runner: instances, seeded trial batches and CSV reports.

mod config;
mod experiments;
pub mod instances;

use std::io::Write;
use std::path::Path;

use serde::Serialize;

pub use config::{ExperimentConfig, ExperimentMode, InstanceRef};
pub use experiments::{
    log10_product_size, median, run_benchmark, run_compare_bias, run_oracle_check, run_success_curve, run_trials,
    size_exponent, summarize_benchmark, Arm, BenchRow, BenchSummary, BiasReport, BiasSummaryRow, BiasTrialRow,
    CurveRow, OracleRow, Status, TraceRow, ORACLE_TOL,
};

/// Writes rows as CSV with a header line.
pub fn write_csv<T: Serialize>(rows: &[T], out: impl Write) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file<T: Serialize>(rows: &[T], path: &Path) -> crate::Result<()> {
    write_csv(rows, std::fs::File::create(path)?)
}

/// Rows of any experiment, ready to write.
#[derive(Clone, Debug)]
pub enum Report {
    Benchmark(Vec<BenchRow>),
    SuccessCurve(Vec<CurveRow>),
    CompareBias(BiasReport),
    OracleCheck(Vec<OracleRow>),
}

impl Report {
    /// Main table to `out`. Bias comparisons also write
    /// `<stem>.trials.csv` and, when traced, `<stem>.trace.csv` next to it.
    pub fn write(&self, out: &Path) -> crate::Result<()> {
        match self {
            Report::Benchmark(r) => write_csv_file(r, out),
            Report::SuccessCurve(r) => write_csv_file(r, out),
            Report::OracleCheck(r) => write_csv_file(r, out),
            Report::CompareBias(r) => {
                write_csv_file(&r.summary, out)?;
                write_csv_file(&r.trials, &out.with_extension("trials.csv"))?;
                if !r.trace.is_empty() {
                    write_csv_file(&r.trace, &out.with_extension("trace.csv"))?;
                }
                Ok(())
            }
        }
    }
}

/// Runs the experiment `cfg` describes; relative instance paths resolve
/// against `base`.
pub fn run(cfg: &ExperimentConfig, base: &Path) -> crate::Result<Report> {
    cfg.validate()?;
    let instances = cfg.load_instances(base)?;
    Ok(match cfg.mode {
        ExperimentMode::Benchmark | ExperimentMode::Synthesize => Report::Benchmark(run_benchmark(cfg, &instances)?),
        ExperimentMode::OracleCheck => Report::OracleCheck(run_oracle_check(cfg, &instances)?),
        ExperimentMode::SuccessCurve => {
            let mut rows = Vec::new();
            for inst in &instances {
                rows.extend(run_success_curve(cfg, inst)?);
            }
            Report::SuccessCurve(rows)
        }
        ExperimentMode::CompareBias => {
            let mut all = BiasReport::default();
            for inst in &instances {
                let r = run_compare_bias(cfg, inst)?;
                all.trials.extend(r.trials);
                all.summary.extend(r.summary);
                all.trace.extend(r.trace);
            }
            Report::CompareBias(all)
        }
    })
}
