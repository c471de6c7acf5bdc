//! Fast invariant checks behind the `selftest` subcommand.

use crate::analytic::{
    efficiency, mgf_exponential, mgf_ordered, per_rayleigh, per_total, per_total_quadrature,
    ExpansionCoefficients, SumBound,
};
use crate::error::Result;
use crate::sim::{estimate_per, Fidelity};
use crate::specfun::{exp_integral_gamma0, q_exact};
use crate::{FrameConfig, LinkBudget, RelayMode, Snr};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check {
            name,
            passed,
            detail,
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

pub fn run_selftest() -> Vec<Check> {
    vec![
        check("q_exact reference values", || {
            let e = rel(q_exact(1.0)?.value(), 0.158_655_253_931_457_05)
                .max(rel(q_exact(5.0)?.value(), 2.866_515_718_791_939e-7));
            Ok((e < 1e-13, format!("max rel err {e:.2e}")))
        }),
        check("E1 reference values", || {
            let e = rel(exp_integral_gamma0(1.0)?, 0.219_383_934_395_520_27)
                .max(rel(exp_integral_gamma0(0.01)?, 4.037_929_576_538_114));
            Ok((e < 1e-13, format!("max rel err {e:.2e}")))
        }),
        check("expansion reproduces 1-(2/3)^K at zero SNR", || {
            let got = ExpansionCoefficients::cached(16)?
                .average(|_| Ok(1.0))?
                .value();
            let want = 1.0 - (2.0f64 / 3.0).powi(16);
            Ok(((got - want).abs() < 1e-13, format!("{got} vs {want}")))
        }),
        check("ordered MGFs average to the unordered MGF", || {
            let mut worst = 0.0f64;
            for n in [4, 8, 16] {
                for s in [0.5, 1.0, 2.0] {
                    let g = Snr::from_db(10.0);
                    let mut sum = 0.0;
                    for i in 1..=n {
                        sum += mgf_ordered(i, n, g, s)?;
                    }
                    worst = worst.max(rel(sum / n as f64, mgf_exponential(s, g)?));
                }
            }
            Ok((worst < 1e-12, format!("max rel err {worst:.2e}")))
        }),
        check("frame PER without relaying equals Rayleigh PER", || {
            let mut worst = 0.0f64;
            for db in [0.0, 10.0, 20.0] {
                let b = LinkBudget::symmetric_db(db)?;
                let cfg = FrameConfig::new(8, 16, 0)?;
                let want = per_rayleigh(16, b.gamma_sd)?.value();
                for mode in RelayMode::ALL {
                    worst = worst.max(rel(per_total(mode, &cfg, &b)?.value(), want));
                }
            }
            Ok((worst < 1e-10, format!("max rel err {worst:.2e}")))
        }),
        check("efficiency is 1/(1+FR)", || {
            let mut ok = true;
            for n in 1..=16 {
                for m in 0..=n {
                    let e = efficiency(m, n)?;
                    ok &= e.eta == 1.0 / (1.0 + e.forwarding_rate);
                }
            }
            Ok((ok, "N <= 16".to_owned()))
        }),
        check("DF beats AF with two relayed packets", || {
            let cfg = FrameConfig::new(8, 16, 2)?;
            let mut ok = true;
            for db in [10.0, 15.0, 20.0, 25.0] {
                let b = LinkBudget::symmetric_db(db)?;
                ok &= per_total(RelayMode::DecodeForward, &cfg, &b)?
                    <= per_total(RelayMode::AmplifyForward, &cfg, &b)?;
            }
            Ok((ok, "10-25 dB".to_owned()))
        }),
        check("simulation is independent of worker count", || {
            let cfg = FrameConfig::new(8, 16, 2)?;
            let b = LinkBudget::symmetric_db(8.0)?;
            let run = |t| -> Result<_> {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .unwrap();
                pool.install(|| {
                    estimate_per(
                        RelayMode::AmplifyForward,
                        &cfg,
                        &b,
                        50_000,
                        1,
                        Fidelity::SnrLevel,
                    )
                })
            };
            let (a, c) = (run(1)?, run(4)?);
            Ok((
                a == c,
                format!("{} vs {} errors", a.packet_errors, c.packet_errors),
            ))
        }),
        check("SNR-level and symbol-level simulators agree", || {
            let cfg = FrameConfig::new(4, 8, 1)?;
            let b = LinkBudget::symmetric_db(6.0)?;
            let mut ok = true;
            let mut detail = Vec::new();
            for mode in RelayMode::ALL {
                let s = estimate_per(mode, &cfg, &b, 50_000, 2, Fidelity::SnrLevel)?;
                let y = estimate_per(mode, &cfg, &b, 50_000, 3, Fidelity::SymbolLevel)?;
                ok &= s.overlaps(&y);
                detail.push(format!("{mode} {:.4}/{:.4}", s.per, y.per));
            }
            Ok((ok, detail.join(", ")))
        }),
        check("simulation matches exact frame PER", || {
            let cfg = FrameConfig::new(8, 16, 1)?;
            let b = LinkBudget::symmetric_db(10.0)?;
            let est = estimate_per(
                RelayMode::DecodeForward,
                &cfg,
                &b,
                200_000,
                4,
                Fidelity::SnrLevel,
            )?;
            let exact =
                per_total_quadrature(RelayMode::DecodeForward, &cfg, &b, SumBound::Full)?.value();
            let se = (exact * (1.0 - exact) / est.packets as f64).sqrt();
            let z = (est.per - exact) / se;
            Ok((
                z.abs() < 4.0,
                format!("sim {:.5}, exact {exact:.5}, z {z:.2}", est.per),
            ))
        }),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        for c in super::run_selftest() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
