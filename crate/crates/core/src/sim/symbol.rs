//! Symbol-level packet transmission through the literal baseband model.
//!
//! Units: symbol energy `E_s = 1`; complex AWGN with variance `n0` at every
//! receiver; channel coefficients are circularly-symmetric complex Gaussians
//! whose power equals the link's average SNR when `n0 = 1`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// How the packet reaches the destination besides the direct link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PacketRoute {
    Direct,
    AmplifyForward {
        h_sr: Complex64,
        h_rd: Complex64,
        /// Fixed relay gain `G = √(E_s / (E_s·Γ_SR + N₀))`.
        gain: f64,
    },
    DecodeForward {
        h_sr: Complex64,
        h_rd: Complex64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolPacket {
    pub h_sd: Complex64,
    pub route: PacketRoute,
    pub n0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PacketOutcome {
    /// At least one of the `K` symbols was detected wrongly at the destination.
    pub error: bool,
    /// The relayed branch took part in the combining.
    pub relay_used: bool,
}

/// Draws a Rayleigh coefficient with `E|h|² = power`.
pub fn sample_coefficient<R: Rng + ?Sized>(power: f64, rng: &mut R) -> Complex64 {
    let scale = (0.5 * power).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(scale * re, scale * im)
}

fn noise<R: Rng + ?Sized>(n0: f64, rng: &mut R) -> Complex64 {
    sample_coefficient(n0, rng)
}

/// Post-MRC SNR implied by the channel coefficients of an AF-relayed packet.
pub fn mrc_snr_af(h_sd: Complex64, h_sr: Complex64, h_rd: Complex64, gain: f64, n0: f64) -> f64 {
    let a_relay = h_rd * gain * h_sr;
    let var_relay = n0 * (h_rd.norm_sqr() * gain * gain + 1.0);
    h_sd.norm_sqr() / n0 + a_relay.norm_sqr() / var_relay
}

/// Sends `k` random BPSK symbols through the direct link and, if routed,
/// the relay; combines with MRC using exact branch noise variances and hard
/// decides each symbol.
pub fn symbol_level_packet<R: Rng + ?Sized>(
    pkt: &SymbolPacket,
    k: usize,
    rng: &mut R,
) -> PacketOutcome {
    let n0 = pkt.n0;
    match pkt.route {
        PacketRoute::Direct => {
            let mut error = false;
            for _ in 0..k {
                let x = bpsk(rng);
                let y = pkt.h_sd * x + noise(n0, rng);
                error |= decide((pkt.h_sd.conj() * y).re) != x;
            }
            PacketOutcome {
                error,
                relay_used: false,
            }
        }
        PacketRoute::AmplifyForward { h_sr, h_rd, gain } => {
            let a_relay = h_rd * gain * h_sr;
            let var_relay = n0 * (h_rd.norm_sqr() * gain * gain + 1.0);
            let mut error = false;
            for _ in 0..k {
                let x = bpsk(rng);
                let y = pkt.h_sd * x + noise(n0, rng);
                let r = h_sr * x + noise(n0, rng);
                let z = h_rd * gain * r + noise(n0, rng);
                let stat = (pkt.h_sd.conj() * y).re / n0 + (a_relay.conj() * z).re / var_relay;
                error |= decide(stat) != x;
            }
            PacketOutcome {
                error,
                relay_used: true,
            }
        }
        PacketRoute::DecodeForward { h_sr, h_rd } => {
            let symbols: Vec<f64> = (0..k).map(|_| bpsk(rng)).collect();
            let direct: Vec<Complex64> = symbols
                .iter()
                .map(|&x| pkt.h_sd * x + noise(n0, rng))
                .collect();
            let mut relay_ok = true;
            for &x in &symbols {
                let r = h_sr * x + noise(n0, rng);
                relay_ok &= decide((h_sr.conj() * r).re) == x;
            }
            let mut error = false;
            for (&x, &y) in symbols.iter().zip(&direct) {
                let mut stat = (pkt.h_sd.conj() * y).re;
                if relay_ok {
                    // relay re-encodes the packet it verified
                    let z = h_rd * x + noise(n0, rng);
                    stat += (h_rd.conj() * z).re;
                }
                error |= decide(stat) != x;
            }
            PacketOutcome {
                error,
                relay_used: relay_ok,
            }
        }
    }
}

#[inline]
fn bpsk<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

#[inline]
fn decide(stat: f64) -> f64 {
    if stat >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::per_conditional_exact;
    use crate::sim::frame::af_combined_snr;
    use crate::specfun::q_exact;
    use crate::{LinkBudget, Snr};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn noiseless_is_always_correct() {
        let mut r = rng(1);
        for _ in 0..1000 {
            let h = sample_coefficient(1.0, &mut r);
            for route in [
                PacketRoute::Direct,
                PacketRoute::AmplifyForward {
                    h_sr: sample_coefficient(1.0, &mut r),
                    h_rd: sample_coefficient(1.0, &mut r),
                    gain: 0.7,
                },
                PacketRoute::DecodeForward {
                    h_sr: sample_coefficient(1.0, &mut r),
                    h_rd: sample_coefficient(1.0, &mut r),
                },
            ] {
                let pkt = SymbolPacket {
                    h_sd: h,
                    route,
                    n0: 0.0,
                };
                let out = symbol_level_packet(&pkt, 32, &mut r);
                assert!(!out.error);
            }
        }
    }

    #[test]
    fn direct_symbol_error_rate_is_q() {
        // fixed channel, K = 1 so packet errors are symbol errors
        let gamma: f64 = 2.0;
        let pkt = SymbolPacket {
            h_sd: Complex64::from_polar(gamma.sqrt(), 0.7),
            route: PacketRoute::Direct,
            n0: 1.0,
        };
        let mut r = rng(2);
        let trials = 2_000_000u64;
        let errs = (0..trials)
            .filter(|_| symbol_level_packet(&pkt, 1, &mut r).error)
            .count() as f64;
        let p = q_exact((2.0 * gamma).sqrt()).unwrap().value();
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((errs / trials as f64 - p).abs() < 4.0 * se);
    }

    #[test]
    fn mrc_snr_matches_af_combined_snr() {
        let budget = LinkBudget::from_db(7.0, 12.0, 4.0).unwrap();
        let gain = (1.0 / (budget.gamma_sr.linear() + 1.0)).sqrt();
        let mut r = rng(3);
        for _ in 0..10_000 {
            let h_sd = sample_coefficient(budget.gamma_sd.linear(), &mut r);
            let h_sr = sample_coefficient(budget.gamma_sr.linear(), &mut r);
            let h_rd = sample_coefficient(budget.gamma_rd.linear(), &mut r);
            let sym = mrc_snr_af(h_sd, h_sr, h_rd, gain, 1.0);
            let snr = af_combined_snr(
                Snr::from_linear(h_sd.norm_sqr()).unwrap(),
                Snr::from_linear(h_sr.norm_sqr()).unwrap(),
                Snr::from_linear(h_rd.norm_sqr()).unwrap(),
                &budget,
            )
            .linear();
            assert!(((sym - snr) / snr).abs() < 1e-12);
        }
    }

    #[test]
    fn af_packet_error_matches_snr_level_prediction() {
        let budget = LinkBudget::symmetric_db(3.0).unwrap();
        let gain = (1.0 / (budget.gamma_sr.linear() + 1.0)).sqrt();
        let k = 8;
        let mut r = rng(4);
        let (mut errs, mut predicted, mut var) = (0.0, 0.0, 0.0);
        let trials = 400_000;
        for _ in 0..trials {
            let h_sd = sample_coefficient(budget.gamma_sd.linear(), &mut r);
            let h_sr = sample_coefficient(budget.gamma_sr.linear(), &mut r);
            let h_rd = sample_coefficient(budget.gamma_rd.linear(), &mut r);
            let g = mrc_snr_af(h_sd, h_sr, h_rd, gain, 1.0);
            let p = per_conditional_exact(Snr::from_linear(g).unwrap(), k)
                .unwrap()
                .value();
            predicted += p;
            var += p * (1.0 - p);
            let pkt = SymbolPacket {
                h_sd,
                route: PacketRoute::AmplifyForward { h_sr, h_rd, gain },
                n0: 1.0,
            };
            if symbol_level_packet(&pkt, k, &mut r).error {
                errs += 1.0;
            }
        }
        assert!(
            (errs - predicted).abs() < 4.0 * var.sqrt(),
            "{errs} vs {predicted}"
        );
    }

    #[test]
    fn df_relay_branch_only_after_clean_decode() {
        let mut r = rng(5);
        let mut used = 0;
        let trials = 20_000;
        for _ in 0..trials {
            // strong relay-destination link, marginal S-R
            let pkt = SymbolPacket {
                h_sd: Complex64::new(0.05, 0.0),
                route: PacketRoute::DecodeForward {
                    h_sr: Complex64::new(1.5, 0.0),
                    h_rd: Complex64::new(30.0, 0.0),
                },
                n0: 1.0,
            };
            let out = symbol_level_packet(&pkt, 16, &mut r);
            if out.relay_used {
                used += 1;
                assert!(!out.error);
            }
        }
        let p_ok = 1.0
            - per_conditional_exact(Snr::from_linear(2.25).unwrap(), 16)
                .unwrap()
                .value();
        let frac = used as f64 / trials as f64;
        let se = (p_ok * (1.0 - p_ok) / trials as f64).sqrt();
        assert!((frac - p_ok).abs() < 4.0 * se, "{frac} vs {p_ok}");
    }
}
