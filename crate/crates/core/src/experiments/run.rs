use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sweep::{SweepPoint, SweepSpec};
use crate::analytic::{per_total_quadrature, per_total_with, SumBound, K_MAX};
use crate::error::{Error, Result};
use crate::sim::{estimate_per_on, RngStream};
use crate::{FrameConfig, LinkBudget, RelayMode};

/// Relative error under which a row outside the simulated CI still passes a
/// comparison.
pub const REL_TOLERANCE: f64 = 0.20;

/// Simulated PERs below this floor are too noisy to compare.
pub const SIM_FLOOR: f64 = 1e-5;

/// One line of the results CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub snr_db: f64,
    pub mode: RelayMode,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub per_analytic: Option<f64>,
    pub per_sim: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Analytic PER lies inside the simulated 95% interval.
    InsideCi,
    /// Outside the interval but within [`REL_TOLERANCE`].
    WithinTolerance,
    Disagree,
    /// Simulated PER below [`SIM_FLOOR`].
    BelowFloor,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self != Verdict::Disagree
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::InsideCi => "PASS",
            Verdict::WithinTolerance => "PASS~",
            Verdict::Disagree => "FAIL",
            Verdict::BelowFloor => "SKIP",
        }
    }
}

impl ResultRow {
    /// Identifier shared by all rows of one curve, e.g. `df-8-16-1`.
    pub fn curve_id(&self) -> String {
        curve_id(self.mode, self.n, self.k, self.m)
    }

    pub fn frame_config(&self) -> Result<FrameConfig> {
        FrameConfig::new(self.n, self.k, self.m)
    }

    /// Relative deviation of the analytic PER from the simulated one.
    pub fn relative_error(&self) -> Option<f64> {
        let (a, s) = (self.per_analytic?, self.per_sim?);
        (s > 0.0).then(|| (a - s).abs() / s)
    }

    /// Analytic PER lies outside the simulated interval.
    pub fn outside_ci(&self) -> bool {
        match (self.per_analytic, self.ci_low, self.ci_high) {
            (Some(a), Some(lo), Some(hi)) => !(lo..=hi).contains(&a),
            _ => false,
        }
    }

    /// `None` unless both analytic and simulated values are present.
    pub fn verdict(&self) -> Option<Verdict> {
        let (_, s) = (self.per_analytic?, self.per_sim?);
        Some(if s < SIM_FLOOR {
            Verdict::BelowFloor
        } else if !self.outside_ci() {
            Verdict::InsideCi
        } else if self.relative_error().is_some_and(|r| r <= REL_TOLERANCE) {
            Verdict::WithinTolerance
        } else {
            Verdict::Disagree
        })
    }
}

pub fn curve_id(mode: RelayMode, n: usize, k: usize, m: usize) -> String {
    format!("{}-{n}-{k}-{m}", mode.as_str().to_ascii_lowercase())
}

/// Frame-average PER from the expansion, or from numerical integration when
/// the packet is too long for it or the alternating sum loses precision.
pub fn analytic_per_total(
    mode: RelayMode,
    cfg: &FrameConfig,
    budget: &LinkBudget,
    bound: SumBound,
) -> Result<f64> {
    if cfg.packet_len() <= K_MAX {
        match per_total_with(mode, cfg, budget, bound) {
            Ok(p) => return Ok(p.value()),
            Err(Error::Cancellation { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(per_total_quadrature(mode, cfg, budget, bound)?.value())
}

fn run_point(spec: &SweepSpec, p: &SweepPoint) -> Result<ResultRow> {
    let bound = if spec.paper_compat_sum {
        SumBound::PaperCompat
    } else {
        SumBound::Full
    };
    let per_analytic = if spec.wants_analytic() {
        Some(analytic_per_total(p.mode, &p.cfg, &p.budget, bound)?)
    } else {
        None
    };
    let mut row = ResultRow {
        snr_db: p.snr_db,
        mode: p.mode,
        n: p.cfg.n_packets(),
        k: p.cfg.packet_len(),
        m: p.cfg.n_relayed(),
        per_analytic,
        per_sim: None,
        ci_low: None,
        ci_high: None,
        trials: None,
        seed: None,
    };
    if spec.wants_simulated() {
        let est = estimate_per_on(
            p.mode,
            &p.cfg,
            &p.budget,
            spec.n_frames,
            RngStream::new(spec.seed, p.index),
            spec.fidelity,
        )?;
        row.per_sim = Some(est.per);
        row.ci_low = Some(est.ci_low);
        row.ci_high = Some(est.ci_high);
        row.trials = Some(est.trials);
        row.seed = Some(est.seed);
    }
    Ok(row)
}

/// Evaluates every point of the sweep on the current rayon pool. Each point
/// simulates on its own stream, so the rows do not depend on the pool size.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ResultRow>> {
    let points = spec.points()?;
    points.par_iter().map(|p| run_point(spec, p)).collect()
}

/// [`run_sweep`] on a dedicated pool of `workers` threads.
pub fn run_sweep_with_workers(spec: &SweepSpec, workers: usize) -> Result<Vec<ResultRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(vec![format!("cannot start {workers} workers: {e}")]))?;
    pool.install(|| run_sweep(spec))
}
