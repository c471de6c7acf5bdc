//! Declarative sweeps, analytic-versus-simulation comparison and report
//! export.

mod gain;
mod report;
mod run;
mod selftest;
mod sweep;

pub use gain::{gain_at_target, snr_at_target};
pub use report::{
    any_disagreement, csv_string, curve_points, curves, emit_report, load_csv, read_csv, summary,
    write_csv, ReportOptions, CSV_FILE, CSV_HEADER, GNUPLOT_FILE, SUMMARY_FILE,
};
pub use run::{
    analytic_per_total, curve_id, run_sweep, run_sweep_with_workers, ResultRow, Verdict,
    REL_TOLERANCE, SIM_FLOOR,
};
pub use selftest::{run_selftest, Check};
pub use sweep::{BudgetRule, Output, SnrGrid, SweepPoint, SweepSpec, DEFAULT_FRAMES};
