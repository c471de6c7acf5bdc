//! Closed-form PER engine.
//!
//! The expansion path writes the conditional BPSK packet error rate as a
//! finite sum of exponentials in the SNR, so averaging over any fading
//! distribution reduces to evaluating its MGF at the exponents. The
//! quadrature path integrates the exact conditional PER instead and serves
//! both as an oracle and as the fallback for long packets.

mod expansion;
pub(crate) mod integrate;
mod mgf;
pub(crate) mod per;
mod quadrature;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use expansion::{ExpansionCoefficients, Term, K_MAX};
pub use mgf::{mgf_af_combined, mgf_exponential, mgf_ordered};
pub use per::{
    per_combined_af, per_combined_df, per_combined_df_relay_ok, per_conditional_approx,
    per_conditional_approx_closed, per_conditional_exact, per_direct_ordered, per_rayleigh, per_sr,
    per_total, per_total_with, SumBound,
};
pub use quadrature::{
    ordered_density, per_total_quadrature, per_unconditional_quadrature, rayleigh_average,
    QuadratureBranch,
};

/// Linear signal-to-noise ratio. Construct from dB at the API boundary.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Snr(f64);

impl Snr {
    pub fn from_db(db: f64) -> Self {
        Snr(10f64.powf(db / 10.0))
    }

    pub fn from_linear(linear: f64) -> Result<Self> {
        if linear.is_nan() || linear < 0.0 {
            return Err(Error::domain(
                "Snr::from_linear",
                format!("{linear} is not >= 0"),
            ));
        }
        Ok(Snr(linear))
    }

    #[inline]
    pub fn linear(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        10.0 * self.0.log10()
    }
}

impl fmt::Display for Snr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2} dB", self.db())
    }
}

/// Frame geometry: `N` packets of `K` BPSK symbols, `M` of them relayed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameConfig {
    n_packets: usize,
    packet_len: usize,
    n_relayed: usize,
}

impl FrameConfig {
    pub fn new(n_packets: usize, packet_len: usize, n_relayed: usize) -> Result<Self> {
        let mut problems = Vec::new();
        if n_packets == 0 {
            problems.push("N (packets per frame) must be >= 1".to_owned());
        }
        if packet_len == 0 {
            problems.push("K (symbols per packet) must be >= 1".to_owned());
        }
        if n_relayed > n_packets {
            problems.push(format!("M={n_relayed} exceeds N={n_packets}"));
        }
        if problems.is_empty() {
            Ok(FrameConfig {
                n_packets,
                packet_len,
                n_relayed,
            })
        } else {
            Err(Error::Config(problems))
        }
    }

    pub fn n_packets(&self) -> usize {
        self.n_packets
    }

    pub fn packet_len(&self) -> usize {
        self.packet_len
    }

    pub fn n_relayed(&self) -> usize {
        self.n_relayed
    }

    /// Symbols per frame, `L = N·K`.
    pub fn frame_len(&self) -> usize {
        self.n_packets * self.packet_len
    }

    pub fn with_relayed(self, n_relayed: usize) -> Result<Self> {
        FrameConfig::new(self.n_packets, self.packet_len, n_relayed)
    }
}

/// Average SNRs of the direct, source-relay and relay-destination links.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub gamma_sd: Snr,
    pub gamma_sr: Snr,
    pub gamma_rd: Snr,
}

impl LinkBudget {
    pub fn new(gamma_sd: Snr, gamma_sr: Snr, gamma_rd: Snr) -> Result<Self> {
        for (name, g) in [("S-D", gamma_sd), ("S-R", gamma_sr), ("R-D", gamma_rd)] {
            if !(g.linear() > 0.0 && g.linear().is_finite()) {
                return Err(Error::domain(
                    "LinkBudget::new",
                    format!(
                        "{name} average SNR must be positive and finite, got {}",
                        g.linear()
                    ),
                ));
            }
        }
        Ok(LinkBudget {
            gamma_sd,
            gamma_sr,
            gamma_rd,
        })
    }

    pub fn from_db(sd_db: f64, sr_db: f64, rd_db: f64) -> Result<Self> {
        LinkBudget::new(
            Snr::from_db(sd_db),
            Snr::from_db(sr_db),
            Snr::from_db(rd_db),
        )
    }

    /// All three links at the same average SNR.
    pub fn symmetric_db(snr_db: f64) -> Result<Self> {
        LinkBudget::from_db(snr_db, snr_db, snr_db)
    }

    /// Constant in the fixed-gain AF end-to-end SNR
    /// `γ_R = γ_SR·γ_RD / (γ_RD + c₁)`, with `c₁ = 1 + Γ_SR`.
    pub fn af_c1(&self) -> f64 {
        1.0 + self.gamma_sr.linear()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelayMode {
    /// Fixed-gain amplify-and-forward.
    #[serde(rename = "AF", alias = "af")]
    AmplifyForward,
    /// Decode-and-forward, relaying only correctly decoded packets.
    #[serde(rename = "DF", alias = "df")]
    DecodeForward,
}

impl RelayMode {
    pub const ALL: [RelayMode; 2] = [RelayMode::AmplifyForward, RelayMode::DecodeForward];

    pub fn as_str(self) -> &'static str {
        match self {
            RelayMode::AmplifyForward => "AF",
            RelayMode::DecodeForward => "DF",
        }
    }
}

impl fmt::Display for RelayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelayMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AF" => Ok(RelayMode::AmplifyForward),
            "DF" => Ok(RelayMode::DecodeForward),
            _ => Err(Error::domain(
                "RelayMode::from_str",
                format!("unknown mode {s:?}"),
            )),
        }
    }
}

/// Forwarding rate and spectral efficiency of a frame configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Efficiency {
    /// `FR = M/N`
    pub forwarding_rate: f64,
    /// `η = N/(N+M)`
    pub eta: f64,
}

pub fn efficiency(n_relayed: usize, n_packets: usize) -> Result<Efficiency> {
    if n_packets == 0 || n_relayed > n_packets {
        return Err(Error::domain(
            "efficiency",
            format!("need 0 <= M <= N and N >= 1, got M={n_relayed}, N={n_packets}"),
        ));
    }
    let (m, n) = (n_relayed as f64, n_packets as f64);
    Ok(Efficiency {
        forwarding_rate: m / n,
        eta: 1.0 / (1.0 + m / n),
    })
}

/// Least-squares slope of `-log10(PER)` against `snr_db / 10`, i.e. the
/// apparent diversity order over the supplied window.
pub fn diversity_slope(curve: &[(f64, f64)]) -> Result<f64> {
    if curve.len() < 2 {
        return Err(Error::domain("diversity_slope", "need at least two points"));
    }
    if let Some(&(db, per)) = curve.iter().find(|(_, p)| !(*p > 0.0)) {
        return Err(Error::domain(
            "diversity_slope",
            format!("PER must be positive, got {per} at {db} dB"),
        ));
    }
    let n = curve.len() as f64;
    let xs = curve.iter().map(|(db, _)| db / 10.0);
    let ys = curve.iter().map(|(_, p)| -p.log10());
    let mx = xs.clone().sum::<f64>() / n;
    let my = ys.clone().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return Err(Error::domain("diversity_slope", "SNR points are all equal"));
    }
    Ok(sxy / sxx)
}
