use super::{LinkBudget, Snr};
use crate::error::{Error, Result};
use crate::specfun::exp_integral_gamma0_scaled;

fn check_s(func: &'static str, s: f64) -> Result<()> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::domain(func, format!("s = {s} is not >= 0")));
    }
    Ok(())
}

fn check_mean(func: &'static str, gamma_bar: Snr) -> Result<()> {
    if !(gamma_bar.linear() > 0.0) {
        return Err(Error::domain(func, "average SNR must be > 0"));
    }
    Ok(())
}

/// `E[e^{-sγ₍ᵢ₎}]` for the `i`-th smallest of `n` i.i.d. exponential SNRs
/// with mean `gamma_bar`:
/// `Φᵢ(s) = Π_{m=1..i} (n-m+1) / (sΓ + n-m+1)`.
pub fn mgf_ordered(i: usize, n: usize, gamma_bar: Snr, s: f64) -> Result<f64> {
    if i == 0 || i > n {
        return Err(Error::domain(
            "mgf_ordered",
            format!("order index i={i} outside 1..={n}"),
        ));
    }
    check_s("mgf_ordered", s)?;
    check_mean("mgf_ordered", gamma_bar)?;
    let sg = s * gamma_bar.linear();
    Ok((1..=i)
        .map(|m| {
            let r = (n - m + 1) as f64;
            r / (sg + r)
        })
        .product())
}

/// `1 / (1 + sΓ)`, the MGF of an exponential SNR with mean `Γ`.
pub fn mgf_exponential(s: f64, gamma_bar: Snr) -> Result<f64> {
    check_s("mgf_exponential", s)?;
    check_mean("mgf_exponential", gamma_bar)?;
    Ok(1.0 / (1.0 + s * gamma_bar.linear()))
}

/// MGF of the fixed-gain AF relayed-branch SNR
/// `γ_R = γ_SR·γ_RD / (γ_RD + c₁)`:
///
/// `Φ_C(s) = c₂ [1 + (c₁ - c₁c₂)/Γ_RD · e^{z} Γ(0, z)]`, `z = c₁c₂/Γ_RD`,
/// `c₂ = 1/(1 + sΓ_SR)`.
pub fn mgf_af_combined(s: f64, budget: &LinkBudget) -> Result<f64> {
    check_s("mgf_af_combined", s)?;
    if s == 0.0 {
        return Ok(1.0);
    }
    let c1 = budget.af_c1();
    let c2 = 1.0 / (1.0 + s * budget.gamma_sr.linear());
    let g_rd = budget.gamma_rd.linear();
    let z = c1 * c2 / g_rd;
    let value = c2 * (1.0 + c1 * (1.0 - c2) / g_rd * exp_integral_gamma0_scaled(z)?);
    Ok(value.min(1.0))
}
