//! Packet-error-rate laboratory for efficient incremental relaying.
//!
//! A source sends a frame of `N` packets of `K` BPSK symbols over block
//! Rayleigh fading. The destination feeds back the indices of the `M`
//! packets with the weakest direct channel, and only those are forwarded by
//! the relay (amplify-and-forward or decode-and-forward) and combined with
//! MRC. [`analytic`] evaluates the frame PER in closed form, [`sim`]
//! estimates it by Monte Carlo, and [`experiments`] runs sweeps over both.

// `!(x > 0.0)` is used on purpose to reject NaN together with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod experiments;
pub mod sim;
pub mod specfun;

pub use analytic::{FrameConfig, LinkBudget, RelayMode, Snr};
pub use error::{Error, Result};
pub use specfun::Probability;
