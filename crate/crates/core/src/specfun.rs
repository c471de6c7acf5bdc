//! Scalar special functions used by the closed-form PER expressions.
//!
//! Everything here is pure and allocation free. Domain violations come back
//! as [`Error::Domain`] instead of NaN so callers can surface them.

use std::fmt;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::domain(
                "Probability::new",
                format!("{value} is not in [0, 1]"),
            ))
        }
    }

    /// Clamps a value that is already known to be a probability up to
    /// rounding.
    pub(crate) fn saturating(value: f64) -> Self {
        debug_assert!(!value.is_nan());
        Probability(value.clamp(0.0, 1.0))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn complement(self) -> Self {
        Probability(1.0 - self.0)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Gaussian tail probability `Q(x) = P(Z > x)` for a standard normal `Z`.
pub fn q_exact(x: f64) -> Result<Probability> {
    if x.is_nan() {
        return Err(Error::domain("q_exact", "argument is NaN"));
    }
    if x == f64::INFINITY {
        return Ok(Probability::ZERO);
    }
    if x == f64::NEG_INFINITY {
        return Ok(Probability::ONE);
    }
    Ok(Probability::saturating(q_unchecked(x)))
}

#[inline]
pub(crate) fn q_unchecked(x: f64) -> f64 {
    0.5 * libm::erfc(x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Two-exponential approximation
/// `Q(x) ≈ (1/4)(e^{-x²/2}/3 + e^{-2x²/3})`.
///
/// Defined for `x ≥ 0` only; the value lies in `(0, 1/3]`.
pub fn q_approx(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain("q_approx", format!("{x} is not >= 0")));
    }
    let x2 = x * x;
    Ok(0.25 * ((-0.5 * x2).exp() / 3.0 + (-2.0 * x2 / 3.0).exp()))
}

/// Exponential integral `E₁(x) = Γ(0, x)` for `x > 0`.
pub fn exp_integral_gamma0(x: f64) -> Result<f64> {
    check_e1_arg("exp_integral_gamma0", x)?;
    if x < 1.0 {
        Ok(e1_series(x))
    } else {
        Ok(e1_scaled_cf(x) * (-x).exp())
    }
}

/// `eˣ·Γ(0, x)`, evaluated without forming `eˣ` for large `x`.
pub fn exp_integral_gamma0_scaled(x: f64) -> Result<f64> {
    check_e1_arg("exp_integral_gamma0_scaled", x)?;
    if x < 1.0 {
        Ok(e1_series(x) * x.exp())
    } else {
        Ok(e1_scaled_cf(x))
    }
}

fn check_e1_arg(func: &'static str, x: f64) -> Result<()> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::domain(func, format!("{x} is not > 0")));
    }
    Ok(())
}

// E1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k·k!), x < 1
fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -x / kf;
        let contrib = term / kf;
        sum += contrib;
        if contrib.abs() < f64::EPSILON * sum.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

// Modified Lentz evaluation of eˣ·E1(x) = 1/(x+1- 1²/(x+3- 2²/(x+5- ...))), x >= 1
fn e1_scaled_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= f64::EPSILON {
            break;
        }
    }
    h
}

/// `ln C(n, k)`; exact integer arithmetic while it fits, log-Gamma beyond.
pub fn log_binomial(n: i64, k: i64) -> Result<f64> {
    if n < 0 || k < 0 || k > n {
        return Err(Error::domain(
            "log_binomial",
            format!("need 0 <= k <= n, got n={n}, k={k}"),
        ));
    }
    let (n, k) = (n as u64, k as u64);
    let k = k.min(n - k);
    if let Some(exact) = binomial_u128(n, k) {
        return Ok((exact as f64).ln());
    }
    let (nf, kf) = (n as f64, k as f64);
    Ok(libm::lgamma(nf + 1.0) - libm::lgamma(kf + 1.0) - libm::lgamma(nf - kf + 1.0))
}

fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}
