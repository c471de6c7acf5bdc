use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::specfun::{log_binomial, Probability};

/// Largest packet length accepted by the exponential-sum expansion. The
/// alternating binomial weights cost roughly `K·log2(4/3)` bits of precision.
pub const K_MAX: usize = 64;

/// Results outside `[-GUARD, 1 + GUARD]` are reported as cancellation.
const GUARD: f64 = 1e-9;

/// One `(n, m)` term of `Σ_n D_{K,n} Σ_m C_{n,m} e^{-A_{n,m}γ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub n: u32,
    pub m: u32,
    /// `(-1)^{n+1}`
    pub d_sign: f64,
    /// `ln |D_{K,n}| = ln C(K, n)`
    pub ln_d: f64,
    /// `ln C_{n,m} = ln C(n, m) - n ln 4 - (n - m) ln 3`
    pub ln_c: f64,
    /// `3·A_{n,m} = 3n + m`, kept integral so `A` is exact.
    pub a_thirds: u32,
}

impl Term {
    pub fn a(&self) -> f64 {
        self.a_thirds as f64 / 3.0
    }

    /// Signed product `D_{K,n}·C_{n,m}`.
    pub fn weight(&self) -> f64 {
        self.d_sign * (self.ln_d + self.ln_c).exp()
    }
}

#[derive(Debug, Clone)]
pub struct ExpansionCoefficients {
    k: usize,
    terms: Vec<Term>,
    // distinct exponents with their accumulated weights, ascending in A
    grouped: Vec<(u32, f64)>,
}

impl ExpansionCoefficients {
    pub fn new(k: usize) -> Result<Self> {
        check_k(k)?;
        let (ln3, ln4) = (3f64.ln(), 4f64.ln());
        let mut terms = Vec::with_capacity(k * (k + 3) / 2);
        for n in 1..=k {
            let ln_d = log_binomial(k as i64, n as i64)?;
            let d_sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            for m in 0..=n {
                let ln_c =
                    log_binomial(n as i64, m as i64)? - n as f64 * ln4 - (n - m) as f64 * ln3;
                terms.push(Term {
                    n: n as u32,
                    m: m as u32,
                    d_sign,
                    ln_d,
                    ln_c,
                    a_thirds: (3 * n + m) as u32,
                });
            }
        }

        let max_thirds = 4 * k;
        let mut sums = vec![Neumaier::default(); max_thirds + 1];
        for t in &terms {
            sums[t.a_thirds as usize].add(t.weight());
        }
        let grouped = sums
            .iter()
            .enumerate()
            .filter(|(t, _)| *t >= 3)
            .map(|(t, s)| (t as u32, s.total()))
            .filter(|(_, w)| *w != 0.0)
            .collect();

        Ok(ExpansionCoefficients { k, terms, grouped })
    }

    /// Shared read-only table for packet length `k`.
    pub fn cached(k: usize) -> Result<&'static ExpansionCoefficients> {
        static TABLES: [OnceLock<ExpansionCoefficients>; K_MAX] =
            [const { OnceLock::new() }; K_MAX];
        check_k(k)?;
        let slot = &TABLES[k - 1];
        if let Some(t) = slot.get() {
            return Ok(t);
        }
        let table = ExpansionCoefficients::new(k)?;
        Ok(slot.get_or_init(|| table))
    }

    pub fn packet_len(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term(&self, n: usize, m: usize) -> Option<&Term> {
        if n == 0 || n > self.k || m > n {
            return None;
        }
        // rows 1..n-1 hold 2 + 3 + ... + n terms
        let offset = (n - 1) * (n + 2) / 2;
        self.terms.get(offset + m)
    }

    /// Evaluates `Σ_n D_{K,n} Σ_m C_{n,m} Φ(A_{n,m})` for an MGF `Φ`.
    ///
    /// Positive and negative contributions are accumulated separately with
    /// compensated summation; the result must land in `[0, 1]` up to the
    /// cancellation guard.
    pub fn average<F>(&self, mut mgf: F) -> Result<Probability>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut pos = Neumaier::default();
        let mut neg = Neumaier::default();
        for &(thirds, w) in &self.grouped {
            let phi = mgf(thirds as f64 / 3.0)?;
            let term = w * phi;
            if term >= 0.0 {
                pos.add(term);
            } else {
                neg.add(-term);
            }
        }
        let value = pos.total() - neg.total();
        if !(-GUARD..=1.0 + GUARD).contains(&value) || value.is_nan() {
            return Err(Error::Cancellation { value });
        }
        Ok(Probability::saturating(value))
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::domain("ExpansionCoefficients", "K must be >= 1"));
    }
    if k > K_MAX {
        return Err(Error::Capability { k, k_max: K_MAX });
    }
    Ok(())
}

/// Kahan-Babuška-Neumaier running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}
