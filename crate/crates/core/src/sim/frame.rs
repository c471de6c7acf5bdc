use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::symbol::{sample_coefficient, symbol_level_packet, PacketRoute, SymbolPacket};
use super::{Fidelity, RngStream};
use crate::analytic::per::per_exact_linear;
use crate::{FrameConfig, LinkBudget, RelayMode, Snr};

/// Exponential draw with mean `gamma_bar`, i.e. the instantaneous SNR of a
/// Rayleigh-faded link.
pub fn sample_rayleigh_snr<R: Rng + ?Sized>(gamma_bar: Snr, rng: &mut R) -> Snr {
    let e: f64 = Exp1.sample(rng);
    Snr::from_linear(gamma_bar.linear() * e).expect("exponential draws are nonnegative")
}

/// Indices of the `m` smallest SNRs, weakest first; equal SNRs keep their
/// original order.
pub fn select_weakest(direct: &[f64], m: usize) -> Vec<usize> {
    let mut idx = Vec::with_capacity(direct.len());
    select_weakest_into(direct, m, &mut idx);
    idx
}

fn select_weakest_into(direct: &[f64], m: usize, idx: &mut Vec<usize>) {
    assert!(m <= direct.len(), "M={m} exceeds N={}", direct.len());
    idx.clear();
    idx.extend(0..direct.len());
    // stable sort keeps lower indices first among ties
    idx.sort_by(|&a, &b| direct[a].total_cmp(&direct[b]));
    idx.truncate(m);
}

/// Post-MRC SNR of an AF-relayed packet: `γ_d + γ_SR·γ_RD / (γ_RD + c₁)`.
pub fn af_combined_snr(
    gamma_direct: Snr,
    gamma_sr: Snr,
    gamma_rd: Snr,
    budget: &LinkBudget,
) -> Snr {
    let (sr, rd) = (gamma_sr.linear(), gamma_rd.linear());
    let relayed = if rd.is_infinite() {
        sr
    } else if sr == 0.0 {
        0.0
    } else {
        sr * rd / (rd + budget.af_c1())
    };
    Snr::from_linear(gamma_direct.linear() + relayed).expect("sum of nonnegative SNRs")
}

/// One frame's fading state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FadingDraw {
    /// Instantaneous direct-link SNR of every packet, in frame order.
    pub direct: Vec<f64>,
    /// `(packet index, γ_SR, γ_RD)` for each relayed packet, in frame order.
    pub relay: Vec<(usize, f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FrameOutcome {
    pub errors: u64,
    pub packets: u64,
}

impl std::ops::Add for FrameOutcome {
    type Output = FrameOutcome;

    fn add(self, rhs: FrameOutcome) -> FrameOutcome {
        FrameOutcome {
            errors: self.errors + rhs.errors,
            packets: self.packets + rhs.packets,
        }
    }
}

/// Reusable per-worker state for running frames of one configuration.
#[derive(Debug, Clone)]
pub struct FrameSimulator {
    mode: RelayMode,
    cfg: FrameConfig,
    budget: LinkBudget,
    fidelity: Fidelity,
    af_gain: f64,
    draw: FadingDraw,
    // complex direct coefficients for the symbol-level path
    h_sd: Vec<num_complex::Complex64>,
    weakest: Vec<usize>,
    relayed: Vec<bool>,
    packet_errors: Vec<bool>,
}

impl FrameSimulator {
    pub fn new(mode: RelayMode, cfg: FrameConfig, budget: LinkBudget, fidelity: Fidelity) -> Self {
        let n = cfg.n_packets();
        FrameSimulator {
            mode,
            cfg,
            budget,
            fidelity,
            af_gain: (1.0 / (budget.gamma_sr.linear() + 1.0)).sqrt(),
            draw: FadingDraw {
                direct: Vec::with_capacity(n),
                relay: Vec::with_capacity(cfg.n_relayed()),
            },
            h_sd: Vec::with_capacity(n),
            weakest: Vec::with_capacity(n),
            relayed: vec![false; n],
            packet_errors: vec![false; n],
        }
    }

    /// Fading realisation of the most recent frame.
    pub fn last_draw(&self) -> &FadingDraw {
        &self.draw
    }

    /// Per-packet error flags of the most recent frame, in frame order.
    pub fn last_packet_errors(&self) -> &[bool] {
        &self.packet_errors
    }

    /// Indices of the packets relayed in the most recent frame, weakest
    /// direct link first.
    pub fn last_relayed(&self) -> &[usize] {
        &self.weakest
    }

    pub fn run<R: Rng + ?Sized>(&mut self, rng: &mut R) -> FrameOutcome {
        match self.fidelity {
            Fidelity::SnrLevel => self.run_snr_level(rng),
            Fidelity::SymbolLevel => self.run_symbol_level(rng),
        }
    }

    fn broadcast<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let n = self.cfg.n_packets();
        let g_sd = self.budget.gamma_sd;
        self.draw.direct.clear();
        self.draw.relay.clear();
        self.h_sd.clear();
        match self.fidelity {
            Fidelity::SnrLevel => {
                for _ in 0..n {
                    self.draw
                        .direct
                        .push(sample_rayleigh_snr(g_sd, rng).linear());
                }
            }
            Fidelity::SymbolLevel => {
                for _ in 0..n {
                    let h = sample_coefficient(g_sd.linear(), rng);
                    self.h_sd.push(h);
                    self.draw.direct.push(h.norm_sqr());
                }
            }
        }
        // ideal feedback of the M weakest indices
        select_weakest_into(&self.draw.direct, self.cfg.n_relayed(), &mut self.weakest);
        self.relayed.iter_mut().for_each(|r| *r = false);
        for &i in &self.weakest {
            self.relayed[i] = true;
        }
    }

    fn run_snr_level<R: Rng + ?Sized>(&mut self, rng: &mut R) -> FrameOutcome {
        self.broadcast(rng);
        let k = self.cfg.packet_len();
        let mut errors = 0;
        for p in 0..self.cfg.n_packets() {
            let direct = self.draw.direct[p];
            let gamma = if self.relayed[p] {
                let sr = sample_rayleigh_snr(self.budget.gamma_sr, rng);
                let rd = sample_rayleigh_snr(self.budget.gamma_rd, rng);
                self.draw.relay.push((p, sr.linear(), rd.linear()));
                match self.mode {
                    RelayMode::AmplifyForward => {
                        af_combined_snr(Snr::from_linear(direct).unwrap(), sr, rd, &self.budget)
                            .linear()
                    }
                    RelayMode::DecodeForward => {
                        let relay_decodes = rng.random::<f64>() >= per_exact_linear(sr.linear(), k);
                        if relay_decodes {
                            direct + rd.linear()
                        } else {
                            direct
                        }
                    }
                }
            } else {
                direct
            };
            let failed = rng.random::<f64>() < per_exact_linear(gamma, k);
            self.packet_errors[p] = failed;
            errors += failed as u64;
        }
        FrameOutcome {
            errors,
            packets: self.cfg.n_packets() as u64,
        }
    }

    fn run_symbol_level<R: Rng + ?Sized>(&mut self, rng: &mut R) -> FrameOutcome {
        self.broadcast(rng);
        let k = self.cfg.packet_len();
        let mut errors = 0;
        for p in 0..self.cfg.n_packets() {
            let route = if self.relayed[p] {
                let h_sr = sample_coefficient(self.budget.gamma_sr.linear(), rng);
                let h_rd = sample_coefficient(self.budget.gamma_rd.linear(), rng);
                self.draw.relay.push((p, h_sr.norm_sqr(), h_rd.norm_sqr()));
                match self.mode {
                    RelayMode::AmplifyForward => PacketRoute::AmplifyForward {
                        h_sr,
                        h_rd,
                        gain: self.af_gain,
                    },
                    RelayMode::DecodeForward => PacketRoute::DecodeForward { h_sr, h_rd },
                }
            } else {
                PacketRoute::Direct
            };
            let pkt = SymbolPacket {
                h_sd: self.h_sd[p],
                route,
                n0: 1.0,
            };
            let failed = symbol_level_packet(&pkt, k, rng).error;
            self.packet_errors[p] = failed;
            errors += failed as u64;
        }
        FrameOutcome {
            errors,
            packets: self.cfg.n_packets() as u64,
        }
    }
}

/// Runs a single frame on its own random stream.
pub fn simulate_frame(
    mode: RelayMode,
    cfg: &FrameConfig,
    budget: &LinkBudget,
    stream: RngStream,
    fidelity: Fidelity,
) -> FrameOutcome {
    FrameSimulator::new(mode, *cfg, *budget, fidelity).run(&mut stream.rng())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rayleigh_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = Snr::from_db(7.0);
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| sample_rayleigh_snr(g, &mut rng).linear())
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(((mean - g.linear()) / g.linear()).abs() < 5e-3);
        assert!(((var - g.linear().powi(2)) / g.linear().powi(2)).abs() < 2e-2);
        assert!(xs.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn rayleigh_replays() {
        let a: Vec<f64> = {
            let mut r = RngStream::new(4, 2).rng();
            (0..8)
                .map(|_| sample_rayleigh_snr(Snr::from_db(3.0), &mut r).linear())
                .collect()
        };
        let b: Vec<f64> = {
            let mut r = RngStream::new(4, 2).rng();
            (0..8)
                .map(|_| sample_rayleigh_snr(Snr::from_db(3.0), &mut r).linear())
                .collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn weakest_selection() {
        assert!(select_weakest(&[3.0, 1.0, 2.0], 0).is_empty());
        assert_eq!(select_weakest(&[3.0, 1.0, 2.0], 2), vec![1, 2]);
        assert_eq!(select_weakest(&[3.0, 1.0, 2.0], 3), vec![1, 2, 0]);
        assert_eq!(select_weakest(&[2.0, 1.0, 2.0, 1.0], 3), vec![1, 3, 0]);
    }

    #[test]
    fn af_snr_limits() {
        let b = LinkBudget::symmetric_db(10.0).unwrap();
        let s = |x| Snr::from_linear(x).unwrap();
        assert_eq!(af_combined_snr(s(2.5), s(0.0), s(7.0), &b).linear(), 2.5);
        assert_eq!(
            af_combined_snr(s(2.5), s(4.0), s(f64::INFINITY), &b).linear(),
            6.5
        );
        let big = af_combined_snr(s(2.5), s(4.0), s(1e15), &b).linear();
        assert!((big - 6.5).abs() < 1e-12);
        let mid = af_combined_snr(s(1.0), s(4.0), s(11.0), &b).linear();
        assert!((mid - (1.0 + 44.0 / 22.0)).abs() < 1e-15);
    }

    #[test]
    fn ordered_means_follow_spacings() {
        let n = 8;
        let cfg = FrameConfig::new(n, 4, n).unwrap();
        let budget = LinkBudget::symmetric_db(10.0).unwrap();
        let mut sim =
            FrameSimulator::new(RelayMode::DecodeForward, cfg, budget, Fidelity::SnrLevel);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut sums = vec![0.0; n];
        let frames = 200_000;
        for _ in 0..frames {
            sim.run(&mut rng);
            let mut d = sim.last_draw().direct.clone();
            d.sort_by(f64::total_cmp);
            for (s, x) in sums.iter_mut().zip(d) {
                *s += x;
            }
        }
        let g = budget.gamma_sd.linear();
        for i in 1..=n {
            let want: f64 = (1..=i).map(|m| g / (n - m + 1) as f64).sum();
            let got = sums[i - 1] / frames as f64;
            assert!(((got - want) / want).abs() < 0.01, "i={i}: {got} vs {want}");
        }
    }

    #[test]
    fn relay_draws_only_for_weakest() {
        let cfg = FrameConfig::new(8, 16, 3).unwrap();
        let budget = LinkBudget::symmetric_db(5.0).unwrap();
        for fid in [Fidelity::SnrLevel, Fidelity::SymbolLevel] {
            let mut sim = FrameSimulator::new(RelayMode::AmplifyForward, cfg, budget, fid);
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            for _ in 0..100 {
                let out = sim.run(&mut rng);
                assert_eq!(out.packets, 8);
                let d = sim.last_draw();
                let mut got: Vec<usize> = d.relay.iter().map(|r| r.0).collect();
                let mut want = select_weakest(&d.direct, 3);
                got.sort();
                want.sort();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn huge_snr_never_errs() {
        let cfg = FrameConfig::new(8, 16, 2).unwrap();
        let budget = LinkBudget::symmetric_db(200.0).unwrap();
        for mode in RelayMode::ALL {
            let mut sim = FrameSimulator::new(mode, cfg, budget, Fidelity::SnrLevel);
            let mut rng = ChaCha8Rng::seed_from_u64(14);
            let errs: u64 = (0..1_000_000).map(|_| sim.run(&mut rng).errors).sum();
            assert_eq!(errs, 0);
        }
    }
}
