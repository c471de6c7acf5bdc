//! Exact unconditional PERs by numerical integration of the conditional
//! PER against the relevant SNR densities. Slow, but free of the Q-function
//! approximation and of the expansion's cancellation, so it works for any K.

use super::integrate::{integrate_half_line, Tolerance};
use super::per::{per_exact_linear, SumBound};
use super::{FrameConfig, LinkBudget, RelayMode, Snr};
use crate::error::{Error, Result};
use crate::specfun::{log_binomial, Probability};

/// Which averaged PER to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureBranch {
    /// Unordered Rayleigh S→D packet.
    Rayleigh,
    /// `i`-th weakest packet, direct link only.
    Direct { i: usize },
    /// Source-relay hop.
    SourceRelay,
    /// `i`-th weakest packet combined with its AF-relayed copy.
    CombinedAf { i: usize },
    /// `i`-th weakest packet under gated DF relaying.
    CombinedDf { i: usize },
}

/// Density of the `i`-th smallest of `n` i.i.d. exponential SNRs with mean
/// `gamma_bar`.
pub fn ordered_density(i: usize, n: usize, gamma_bar: Snr, x: f64) -> Result<f64> {
    if i == 0 || i > n {
        return Err(Error::domain(
            "ordered_density",
            format!("i={i} outside 1..={n}"),
        ));
    }
    Ok(OrderedDensity::build(i, n, gamma_bar.linear())?.eval(x))
}

#[derive(Clone, Copy)]
struct OrderedDensity {
    i: usize,
    n: usize,
    mean: f64,
    coef: f64,
}

impl OrderedDensity {
    fn new(i: usize, n: usize, mean: f64, ln_coef: f64) -> Self {
        OrderedDensity {
            i,
            n,
            mean,
            coef: ln_coef.exp(),
        }
    }

    fn build(i: usize, n: usize, mean: f64) -> Result<Self> {
        let ln_coef = (n as f64).ln() + log_binomial(n as i64 - 1, i as i64 - 1)?;
        Ok(Self::new(i, n, mean, ln_coef))
    }

    fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let t = x / self.mean;
        let cdf = -(-t).exp_m1();
        self.coef * cdf.powi(self.i as i32 - 1) * (-((self.n - self.i + 1) as f64) * t).exp()
            / self.mean
    }

    // generous upper bound on the spread of the order statistic
    fn scale(&self) -> f64 {
        self.mean * (1.0 + (self.n as f64).ln())
    }
}

/// `∫ f(γ) e^{-γ/Γ}/Γ dγ`: the average of `f` over Rayleigh fading.
pub fn rayleigh_average<F: FnMut(f64) -> f64>(mut f: F, gamma_bar: Snr) -> Result<f64> {
    let g = gamma_bar.linear();
    if !(g > 0.0) {
        return Err(Error::domain("rayleigh_average", "average SNR must be > 0"));
    }
    // substitute γ = Γ·v so the density is e^{-v}
    let r = integrate_half_line(|v| f(g * v) * (-v).exp(), 1.0, Tolerance::OUTER)?;
    Ok(r.value)
}

/// `E[PER(γ₍ᵢ₎ + c)]` for a fixed extra branch SNR `c`.
fn ordered_shifted(dens: &OrderedDensity, k: usize, c: f64) -> Result<f64> {
    let r = integrate_half_line(
        |a| dens.eval(a) * per_exact_linear(a + c, k),
        dens.scale(),
        Tolerance::INNER,
    )?;
    Ok(r.value)
}

/// `E[PER(γ₍ᵢ₎ + Y)]` with `Y` exponential of mean `mean`.
fn ordered_plus_exponential(dens: &OrderedDensity, k: usize, mean: f64) -> Result<f64> {
    if mean <= 0.0 {
        return ordered_shifted(dens, k, 0.0);
    }
    let mut failure = None;
    let r = integrate_half_line(
        |v| match ordered_shifted(dens, k, mean * v) {
            Ok(h) => h * (-v).exp(),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        1.0,
        Tolerance::INNER,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(r.value),
    }
}

fn combined_af(dens: &OrderedDensity, k: usize, budget: &LinkBudget) -> Result<f64> {
    let g_sr = budget.gamma_sr.linear();
    let g_rd = budget.gamma_rd.linear();
    let c1 = budget.af_c1();
    let mut failure = None;
    // given γ_RD = y, γ_R is exponential with mean Γ_SR·y/(y + c₁)
    let r = integrate_half_line(
        |w| {
            let y = g_rd * w;
            match ordered_plus_exponential(dens, k, g_sr * y / (y + c1)) {
                Ok(h) => h * (-w).exp(),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        1.0,
        Tolerance::OUTER,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(r.value),
    }
}

fn check_index(i: usize, upper: usize) -> Result<()> {
    if i == 0 || i > upper {
        return Err(Error::domain(
            "per_unconditional_quadrature",
            format!("i={i} outside 1..={upper}"),
        ));
    }
    Ok(())
}

/// Exact (non-approximated) unconditional PER of the chosen branch.
pub fn per_unconditional_quadrature(
    branch: QuadratureBranch,
    cfg: &FrameConfig,
    budget: &LinkBudget,
) -> Result<Probability> {
    let k = cfg.packet_len();
    let n = cfg.n_packets();
    let g_sd = budget.gamma_sd.linear();
    let value = match branch {
        QuadratureBranch::Rayleigh => {
            rayleigh_average(|g| per_exact_linear(g, k), budget.gamma_sd)?
        }
        QuadratureBranch::SourceRelay => {
            rayleigh_average(|g| per_exact_linear(g, k), budget.gamma_sr)?
        }
        QuadratureBranch::Direct { i } => {
            check_index(i, n)?;
            let dens = OrderedDensity::build(i, n, g_sd)?;
            ordered_shifted(&dens, k, 0.0)?
        }
        QuadratureBranch::CombinedAf { i } => {
            check_index(i, n)?;
            combined_af(&OrderedDensity::build(i, n, g_sd)?, k, budget)?
        }
        QuadratureBranch::CombinedDf { i } => {
            check_index(i, n)?;
            let dens = OrderedDensity::build(i, n, g_sd)?;
            let p_sr = rayleigh_average(|g| per_exact_linear(g, k), budget.gamma_sr)?;
            let direct = ordered_shifted(&dens, k, 0.0)?;
            let relayed = ordered_plus_exponential(&dens, k, budget.gamma_rd.linear())?;
            p_sr * direct + (1.0 - p_sr) * relayed
        }
    };
    if !(-1e-8..=1.0 + 1e-8).contains(&value) {
        return Err(Error::Quadrature {
            value,
            error: f64::NAN,
            intervals: 0,
        });
    }
    Ok(Probability::saturating(value))
}

/// Frame-average PER evaluated entirely on the quadrature path.
pub fn per_total_quadrature(
    mode: RelayMode,
    cfg: &FrameConfig,
    budget: &LinkBudget,
    bound: SumBound,
) -> Result<Probability> {
    let n = cfg.n_packets();
    let m = cfg.n_relayed();
    let last = match bound {
        SumBound::Full => n,
        SumBound::PaperCompat => n - 1,
    };
    let mut total = 0.0;
    for i in 1..=m {
        let branch = match mode {
            RelayMode::AmplifyForward => QuadratureBranch::CombinedAf { i },
            RelayMode::DecodeForward => QuadratureBranch::CombinedDf { i },
        };
        total += per_unconditional_quadrature(branch, cfg, budget)?.value();
    }
    for j in (m + 1)..=last {
        total +=
            per_unconditional_quadrature(QuadratureBranch::Direct { i: j }, cfg, budget)?.value();
    }
    Ok(Probability::saturating(total / n as f64))
}
