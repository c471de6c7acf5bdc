use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::Fidelity;
use crate::{FrameConfig, LinkBudget, RelayMode, Snr};

pub const DEFAULT_FRAMES: u64 = 1_000_000;

/// How the relay-link averages follow the swept direct-link SNR.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum BudgetRule {
    /// `Γ_SR = Γ_RD = Γ_SD`.
    #[default]
    Symmetric,
    /// `Γ_SR` and `Γ_RD` sit at fixed dB offsets from `Γ_SD`.
    Explicit {
        sr_offset_db: f64,
        rd_offset_db: f64,
    },
}

impl BudgetRule {
    pub fn at(&self, snr_db: f64) -> Result<LinkBudget> {
        match *self {
            BudgetRule::Symmetric => LinkBudget::symmetric_db(snr_db),
            BudgetRule::Explicit {
                sr_offset_db,
                rd_offset_db,
            } => LinkBudget::from_db(snr_db, snr_db + sr_offset_db, snr_db + rd_offset_db),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Analytic,
    Simulated,
    Both,
}

/// SNR points, either listed or as an inclusive arithmetic range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SnrGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl SnrGrid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            SnrGrid::List(v) => v.clone(),
            SnrGrid::Range { start, stop, step } => {
                if !(*step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
                    return Vec::new();
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                // computed from the index so points do not accumulate drift
                (0..=n).map(|j| start + j as f64 * step).collect()
            }
        }
    }
}

/// A declarative sweep, one JSON document per experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_modes")]
    pub modes: Vec<RelayMode>,
    pub snr_db: SnrGrid,
    pub n_packets: usize,
    pub packet_len: usize,
    /// Values of `M` to sweep.
    pub n_relayed: Vec<usize>,
    #[serde(default)]
    pub budget: BudgetRule,
    #[serde(default = "default_frames")]
    pub n_frames: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub fidelity: Fidelity,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
    /// Stop the unrelayed-packet sum of the frame PER at `N - 1`.
    #[serde(default)]
    pub paper_compat_sum: bool,
}

fn default_modes() -> Vec<RelayMode> {
    RelayMode::ALL.to_vec()
}

fn default_frames() -> u64 {
    DEFAULT_FRAMES
}

fn default_outputs() -> Vec<Output> {
    vec![Output::Both]
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SweepSpec::from_json(&text)
    }

    pub fn wants_analytic(&self) -> bool {
        self.outputs
            .iter()
            .any(|o| matches!(o, Output::Analytic | Output::Both))
    }

    pub fn wants_simulated(&self) -> bool {
        self.outputs
            .iter()
            .any(|o| matches!(o, Output::Simulated | Output::Both))
    }

    /// Checks every constraint and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.modes.is_empty() {
            problems.push("modes must not be empty".to_owned());
        }
        let grid = self.snr_db.points();
        if grid.is_empty() {
            problems.push("snr_db grid must not be empty".to_owned());
        }
        if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
            problems.push(format!("snr_db contains non-finite value {x}"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            problems.push("snr_db grid must be strictly increasing".to_owned());
        }
        if self.n_packets == 0 {
            problems.push("n_packets must be >= 1".to_owned());
        }
        if self.packet_len == 0 {
            problems.push("packet_len must be >= 1".to_owned());
        }
        if self.n_relayed.is_empty() {
            problems.push("n_relayed must list at least one M".to_owned());
        }
        for &m in &self.n_relayed {
            if m > self.n_packets {
                problems.push(format!(
                    "n_relayed value {m} exceeds n_packets={}",
                    self.n_packets
                ));
            }
        }
        if self.n_frames == 0 {
            problems.push("n_frames must be >= 1".to_owned());
        }
        if self.outputs.is_empty() {
            problems.push("outputs must not be empty".to_owned());
        }
        if let BudgetRule::Explicit {
            sr_offset_db,
            rd_offset_db,
        } = self.budget
        {
            if !sr_offset_db.is_finite() || !rd_offset_db.is_finite() {
                problems.push("budget offsets must be finite".to_owned());
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }

    /// Grid points in run order: SNR outermost, then mode, then `M`.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        self.validate()?;
        let mut out = Vec::new();
        for snr_db in self.snr_db.points() {
            let budget = self.budget.at(snr_db)?;
            for &mode in &self.modes {
                for &m in &self.n_relayed {
                    out.push(SweepPoint {
                        index: out.len() as u64,
                        snr_db,
                        mode,
                        cfg: FrameConfig::new(self.n_packets, self.packet_len, m)?,
                        budget,
                    });
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// Position in run order, also the point's random stream id.
    pub index: u64,
    pub snr_db: f64,
    pub mode: RelayMode,
    pub cfg: FrameConfig,
    pub budget: LinkBudget,
}

impl SweepPoint {
    pub fn snr(&self) -> Snr {
        Snr::from_db(self.snr_db)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"snr_db": [10], "n_packets": 8, "packet_len": 16, "n_relayed": [1]}"#;

    #[test]
    fn defaults() {
        let s = SweepSpec::from_json(MINIMAL).unwrap();
        assert_eq!(s.modes, RelayMode::ALL.to_vec());
        assert_eq!(s.n_frames, DEFAULT_FRAMES);
        assert_eq!(s.fidelity, Fidelity::SnrLevel);
        assert_eq!(s.budget, BudgetRule::Symmetric);
        assert_eq!(s.outputs, vec![Output::Both]);
        assert!(!s.paper_compat_sum);
        assert_eq!(s.points().unwrap().len(), 2);
    }

    #[test]
    fn full_document() {
        let s = SweepSpec::from_json(
            r#"{
                "modes": ["DF"],
                "snr_db": {"start": 5, "stop": 25, "step": 2.5},
                "n_packets": 4, "packet_len": 32, "n_relayed": [0, 1, 4],
                "budget": {"rule": "explicit", "sr_offset_db": 3, "rd_offset_db": -2},
                "n_frames": 1000, "seed": 7, "fidelity": "symbol_level",
                "outputs": ["analytic"], "paper_compat_sum": true
            }"#,
        )
        .unwrap();
        let grid = s.snr_db.points();
        assert_eq!(grid.len(), 9);
        assert_eq!(grid[8], 25.0);
        let pts = s.points().unwrap();
        assert_eq!(pts.len(), 27);
        assert_eq!(pts[4].cfg.n_relayed(), 1);
        assert!((pts[0].budget.gamma_sr.db() - 8.0).abs() < 1e-12);
        assert!((pts[0].budget.gamma_rd.db() - 3.0).abs() < 1e-12);
        assert!(s.wants_analytic() && !s.wants_simulated());
    }

    #[test]
    fn validation_lists_every_problem() {
        let err = SweepSpec::from_json(
            r#"{"modes": [], "snr_db": [10, 5], "n_packets": 2, "packet_len": 0,
                "n_relayed": [3], "n_frames": 0, "outputs": []}"#,
        )
        .unwrap_err();
        match err {
            Error::Config(v) => assert_eq!(v.len(), 6, "{v:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad =
            r#"{"snr_db": [1], "n_packets": 1, "packet_len": 1, "n_relayed": [0], "frames": 3}"#;
        assert!(matches!(SweepSpec::from_json(bad), Err(Error::Json(_))));
    }
}
