use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::frame::{FrameOutcome, FrameSimulator};
use super::{Fidelity, RngStream};
use crate::error::{Error, Result};
use crate::{FrameConfig, LinkBudget, RelayMode};

/// Frames simulated per random stream. Blocks are the unit of parallel work,
/// so the partition (and thus every draw) is independent of the thread count.
pub const BLOCK_FRAMES: u64 = 16_384;

const Z_95: f64 = 1.959_963_984_540_054;

/// Packet error rate estimate with a 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerEstimate {
    pub packet_errors: u64,
    pub packets: u64,
    pub per: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    /// Number of simulated frames.
    pub trials: u64,
}

impl PerEstimate {
    pub fn from_counts(packet_errors: u64, packets: u64, seed: u64, trials: u64) -> Result<Self> {
        if packets == 0 || packet_errors > packets {
            return Err(Error::domain(
                "PerEstimate::from_counts",
                format!("need 0 <= errors <= packets, packets >= 1; got {packet_errors}/{packets}"),
            ));
        }
        let per = packet_errors as f64 / packets as f64;
        let (lo, hi) = wilson_interval(packet_errors, packets);
        Ok(PerEstimate {
            packet_errors,
            packets,
            per,
            ci_low: lo.min(per),
            ci_high: hi.max(per),
            seed,
            trials,
        })
    }

    pub fn contains(&self, p: f64) -> bool {
        (self.ci_low..=self.ci_high).contains(&p)
    }

    /// The two 95% intervals intersect.
    pub fn overlaps(&self, other: &PerEstimate) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }

    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }
}

/// 95% Wilson score interval for `successes` out of `n` trials.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if successes == n {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Monte Carlo PER over `n_frames` frames on stream `(seed, 0)`.
pub fn estimate_per(
    mode: RelayMode,
    cfg: &FrameConfig,
    budget: &LinkBudget,
    n_frames: u64,
    seed: u64,
    fidelity: Fidelity,
) -> Result<PerEstimate> {
    estimate_per_on(
        mode,
        cfg,
        budget,
        n_frames,
        RngStream::new(seed, 0),
        fidelity,
    )
}

/// Like [`estimate_per`] with an explicit experiment-point stream. Frames are
/// split into fixed blocks, each with its own derived stream, and counts are
/// summed as integers, so the result does not depend on the rayon pool size.
pub fn estimate_per_on(
    mode: RelayMode,
    cfg: &FrameConfig,
    budget: &LinkBudget,
    n_frames: u64,
    stream: RngStream,
    fidelity: Fidelity,
) -> Result<PerEstimate> {
    if n_frames == 0 {
        return Err(Error::Config(vec!["n_frames must be >= 1".to_owned()]));
    }
    let blocks = n_frames.div_ceil(BLOCK_FRAMES);
    let total = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let frames = BLOCK_FRAMES.min(n_frames - b * BLOCK_FRAMES);
            let mut rng = stream.block(b).rng();
            let mut sim = FrameSimulator::new(mode, *cfg, *budget, fidelity);
            (0..frames).fold(FrameOutcome::default(), |acc, _| acc + sim.run(&mut rng))
        })
        .reduce(FrameOutcome::default, |a, b| a + b);
    PerEstimate::from_counts(total.errors, total.packets, stream.seed, n_frames)
}
