//! Monte Carlo simulator of the incremental-relaying protocol.
//!
//! Two fidelities share the same frame logic. The SNR-level path draws
//! instantaneous SNRs and flips a coin with the exact conditional PER; the
//! symbol-level path transmits BPSK symbols through complex baseband
//! channels and detects them.

mod estimate;
mod frame;
mod rng;
mod symbol;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use estimate::{estimate_per, estimate_per_on, wilson_interval, PerEstimate, BLOCK_FRAMES};
pub use frame::{
    af_combined_snr, sample_rayleigh_snr, select_weakest, simulate_frame, FadingDraw, FrameOutcome,
    FrameSimulator,
};
pub use rng::RngStream;
pub use symbol::{
    mrc_snr_af, sample_coefficient, symbol_level_packet, PacketOutcome, PacketRoute, SymbolPacket,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fidelity {
    #[default]
    SnrLevel,
    SymbolLevel,
}

impl fmt::Display for Fidelity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fidelity::SnrLevel => "snr_level",
            Fidelity::SymbolLevel => "symbol_level",
        })
    }
}

impl FromStr for Fidelity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "snr" | "snr_level" => Ok(Fidelity::SnrLevel),
            "symbol" | "symbol_level" => Ok(Fidelity::SymbolLevel),
            _ => Err(Error::domain(
                "Fidelity::from_str",
                format!("unknown fidelity {s:?}"),
            )),
        }
    }
}
