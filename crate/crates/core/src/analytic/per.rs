use super::expansion::{ExpansionCoefficients, Neumaier};
use super::mgf::{mgf_af_combined, mgf_exponential, mgf_ordered};
use super::{FrameConfig, LinkBudget, RelayMode, Snr};
use crate::error::{Error, Result};
use crate::specfun::{q_approx, q_unchecked, Probability};

/// Upper limit of the unrelayed sum in the frame-average PER.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumBound {
    /// Sum unrelayed packets `M+1..=N`.
    #[default]
    Full,
    /// Sum `M+1..=N-1`, dropping the strongest packet. Kept only to reproduce
    /// the literal published expression.
    PaperCompat,
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::domain("per", "packet length K must be >= 1"))
    } else {
        Ok(())
    }
}

/// `1 - (1 - p)^K` without cancellation for tiny `p`.
#[inline]
pub(crate) fn packet_error_from_symbol(p: f64, k: usize) -> f64 {
    -(k as f64 * (-p).ln_1p()).exp_m1()
}

#[inline]
pub(crate) fn per_exact_linear(gamma: f64, k: usize) -> f64 {
    packet_error_from_symbol(q_unchecked((2.0 * gamma).sqrt()), k)
}

/// Conditional BPSK PER over a block-faded packet of `K` symbols,
/// `1 - [1 - Q(√(2γ))]^K`.
pub fn per_conditional_exact(gamma: Snr, k: usize) -> Result<Probability> {
    check_k(k)?;
    Ok(Probability::saturating(per_exact_linear(gamma.linear(), k)))
}

/// Exponential-sum approximation
/// `Σ_n D_{K,n} Σ_m C_{n,m} e^{-A_{n,m}γ}`, for `K ≤ K_MAX`.
pub fn per_conditional_approx(gamma: Snr, k: usize) -> Result<Probability> {
    let g = gamma.linear();
    ExpansionCoefficients::cached(k)?.average(|a| Ok((-a * g).exp()))
}

/// The same approximation in product form, `1 - [1 - Q̃(√(2γ))]^K` with the
/// two-exponential `Q̃`. Valid for any `K`.
pub fn per_conditional_approx_closed(gamma: Snr, k: usize) -> Result<Probability> {
    check_k(k)?;
    let q = q_approx((2.0 * gamma.linear()).sqrt())?;
    Ok(Probability::saturating(packet_error_from_symbol(q, k)))
}

/// Average PER of a single Rayleigh link with mean SNR `gamma_bar`.
pub fn per_rayleigh(k: usize, gamma_bar: Snr) -> Result<Probability> {
    ExpansionCoefficients::cached(k)?.average(|a| mgf_exponential(a, gamma_bar))
}

/// PER of the source-relay hop.
pub fn per_sr(k: usize, gamma_sr: Snr) -> Result<Probability> {
    per_rayleigh(k, gamma_sr)
}

fn check_index(func: &'static str, i: usize, upper: usize, what: &str) -> Result<()> {
    if i == 0 || i > upper {
        return Err(Error::domain(
            func,
            format!("i={i} outside 1..={upper} ({what})"),
        ));
    }
    Ok(())
}

/// PER of the `i`-th weakest packet decoded from the direct link alone.
pub fn per_direct_ordered(i: usize, cfg: &FrameConfig, budget: &LinkBudget) -> Result<Probability> {
    let n = cfg.n_packets();
    check_index("per_direct_ordered", i, n, "N")?;
    ExpansionCoefficients::cached(cfg.packet_len())?
        .average(|a| mgf_ordered(i, n, budget.gamma_sd, a))
}

/// PER of the `i`-th weakest packet after MRC with its AF-relayed copy.
pub fn per_combined_af(i: usize, cfg: &FrameConfig, budget: &LinkBudget) -> Result<Probability> {
    check_index("per_combined_af", i, cfg.n_relayed(), "M")?;
    combined_af(i, cfg, budget)
}

fn combined_af(i: usize, cfg: &FrameConfig, budget: &LinkBudget) -> Result<Probability> {
    let n = cfg.n_packets();
    ExpansionCoefficients::cached(cfg.packet_len())?
        .average(|a| Ok(mgf_af_combined(a, budget)? * mgf_ordered(i, n, budget.gamma_sd, a)?))
}

/// DF PER of the `i`-th weakest packet given that the relay decoded it,
/// i.e. MRC of the direct and relay-destination branches.
pub fn per_combined_df_relay_ok(
    i: usize,
    cfg: &FrameConfig,
    budget: &LinkBudget,
) -> Result<Probability> {
    let n = cfg.n_packets();
    check_index("per_combined_df_relay_ok", i, n, "N")?;
    ExpansionCoefficients::cached(cfg.packet_len())?.average(|a| {
        Ok(mgf_ordered(i, n, budget.gamma_sd, a)? * mgf_exponential(a, budget.gamma_rd)?)
    })
}

/// DF PER of the `i`-th weakest packet with decode-check gating:
/// `PER_SR·PERᵢ + (1 - PER_SR)·PER_{Cᵢ}`.
pub fn per_combined_df(i: usize, cfg: &FrameConfig, budget: &LinkBudget) -> Result<Probability> {
    check_index("per_combined_df", i, cfg.n_relayed(), "M")?;
    let p_sr = per_sr(cfg.packet_len(), budget.gamma_sr)?.value();
    combined_df(i, cfg, budget, p_sr)
}

fn combined_df(i: usize, cfg: &FrameConfig, budget: &LinkBudget, p_sr: f64) -> Result<Probability> {
    let direct = per_direct_ordered(i, cfg, budget)?.value();
    let relayed = per_combined_df_relay_ok(i, cfg, budget)?.value();
    Ok(Probability::saturating(
        p_sr * direct + (1.0 - p_sr) * relayed,
    ))
}

/// Frame-average PER with the `M` weakest packets relayed.
pub fn per_total(mode: RelayMode, cfg: &FrameConfig, budget: &LinkBudget) -> Result<Probability> {
    per_total_with(mode, cfg, budget, SumBound::Full)
}

pub fn per_total_with(
    mode: RelayMode,
    cfg: &FrameConfig,
    budget: &LinkBudget,
    bound: SumBound,
) -> Result<Probability> {
    let n = cfg.n_packets();
    let m = cfg.n_relayed();
    let p_sr = match mode {
        RelayMode::DecodeForward if m > 0 => per_sr(cfg.packet_len(), budget.gamma_sr)?.value(),
        _ => 0.0,
    };
    let mut acc = Neumaier::default();
    for i in 1..=m {
        let p = match mode {
            RelayMode::AmplifyForward => combined_af(i, cfg, budget)?,
            RelayMode::DecodeForward => combined_df(i, cfg, budget, p_sr)?,
        };
        acc.add(p.value());
    }
    let last = match bound {
        SumBound::Full => n,
        SumBound::PaperCompat => n - 1,
    };
    for j in (m + 1)..=last {
        acc.add(per_direct_ordered(j, cfg, budget)?.value());
    }
    Ok(Probability::saturating(acc.total() / n as f64))
}
