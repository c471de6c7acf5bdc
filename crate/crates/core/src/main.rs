use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eirlab::experiments::{
    any_disagreement, emit_report, gain_at_target, load_csv, run_selftest, run_sweep_with_workers,
    summary, Output, ReportOptions, SweepSpec, Verdict,
};
use eirlab::sim::Fidelity;
use eirlab::Error;

const EXIT_DISAGREE: u8 = 2;

/// Packet error rates of incremental relaying with AF and DF relays.
#[derive(Debug, Parser)]
#[command(name = "eirlab", version)]
struct Cli {
    /// Override the sweep seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the number of simulated frames per point.
    #[arg(long, global = true)]
    frames: Option<u64>,

    /// Simulation fidelity: `snr` or `symbol`.
    #[arg(long, global = true)]
    fidelity: Option<Fidelity>,

    /// Directory for results.csv and summary.txt.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Stop the unrelayed sum of the frame PER at N-1.
    #[arg(long, global = true)]
    paper_compat_sum: bool,

    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Also write a gnuplot script next to the CSV.
    #[arg(long, global = true)]
    gnuplot: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a sweep and write the CSV and summary.
    Sweep { config: PathBuf },
    /// Run a sweep with both outputs and grade every row.
    Compare { config: PathBuf },
    /// SNR gap in dB between two curves of a results CSV at a target PER.
    Gain {
        #[arg(long)]
        target: f64,
        #[arg(long)]
        baseline: String,
        #[arg(long)]
        candidate: String,
        results: PathBuf,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

fn load_spec(cli: &Cli, path: &Path) -> Result<SweepSpec, Error> {
    let mut spec = SweepSpec::load(path)?;
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    if let Some(frames) = cli.frames {
        spec.n_frames = frames;
    }
    if let Some(f) = cli.fidelity {
        spec.fidelity = f;
    }
    spec.paper_compat_sum |= cli.paper_compat_sum;
    spec.validate()?;
    Ok(spec)
}

fn workers(cli: &Cli) -> usize {
    cli.workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn write_report(
    cli: &Cli,
    rows: &[eirlab::experiments::ResultRow],
    default_dir: bool,
) -> Result<(), Error> {
    let dir = match (&cli.out, default_dir) {
        (Some(d), _) => d.clone(),
        (None, true) => PathBuf::from("results"),
        (None, false) => return Ok(()),
    };
    for p in emit_report(
        rows,
        &dir,
        ReportOptions {
            gnuplot: cli.gnuplot,
        },
    )? {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Sweep { config } => {
            let spec = load_spec(cli, config)?;
            let rows = run_sweep_with_workers(&spec, workers(cli))?;
            write_report(cli, &rows, true)?;
            print!("{}", summary(&rows)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { config } => {
            let mut spec = load_spec(cli, config)?;
            spec.outputs = vec![Output::Both];
            let rows = run_sweep_with_workers(&spec, workers(cli))?;
            write_report(cli, &rows, false)?;
            println!(
                "{:<16} {:>7} {:>11} {:>11} {:>23} {:>7}  verdict",
                "curve", "snr_db", "analytic", "sim", "95% CI", "rel"
            );
            for r in &rows {
                let v = r.verdict().unwrap_or(Verdict::Disagree);
                println!(
                    "{:<16} {:>7} {:>11.4e} {:>11.4e} [{:>10.4e},{:>10.4e}] {:>6.1}%  {}",
                    r.curve_id(),
                    r.snr_db,
                    r.per_analytic.unwrap_or(f64::NAN),
                    r.per_sim.unwrap_or(f64::NAN),
                    r.ci_low.unwrap_or(f64::NAN),
                    r.ci_high.unwrap_or(f64::NAN),
                    100.0 * r.relative_error().unwrap_or(f64::NAN),
                    v.label()
                );
            }
            Ok(if any_disagreement(&rows) {
                ExitCode::from(EXIT_DISAGREE)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Gain {
            target,
            baseline,
            candidate,
            results,
        } => {
            let rows = load_csv(results)?;
            let g = gain_at_target(&rows, *target, baseline, candidate)?;
            println!("{g:.3}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest => {
            let checks = run_selftest();
            for c in &checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                println!("{mark}  {:<48} {}", c.name, c.detail);
            }
            Ok(if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_DISAGREE)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
