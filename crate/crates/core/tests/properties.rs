use proptest::prelude::*;

use eirlab::analytic::{
    efficiency, mgf_exponential, mgf_ordered, per_conditional_exact, per_total,
};
use eirlab::experiments::{csv_string, read_csv, ResultRow};
use eirlab::sim::{af_combined_snr, select_weakest, wilson_interval, PerEstimate};
use eirlab::specfun::{exp_integral_gamma0_scaled, q_exact};
use eirlab::{FrameConfig, LinkBudget, RelayMode, Snr};

fn mode() -> impl Strategy<Value = RelayMode> {
    prop_oneof![
        Just(RelayMode::AmplifyForward),
        Just(RelayMode::DecodeForward)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn q_is_a_decreasing_symmetric_tail(x in -30.0f64..30.0, dx in 1e-3f64..5.0) {
        let q = q_exact(x).unwrap().value();
        prop_assert!((0.0..=1.0).contains(&q));
        prop_assert!(q_exact(x + dx).unwrap().value() <= q);
        let mirror = q_exact(-x).unwrap().value();
        prop_assert!((q + mirror - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scaled_e1_is_positive_and_decreasing(x in 1e-6f64..1e6, f in 1.001f64..10.0) {
        let a = exp_integral_gamma0_scaled(x).unwrap();
        let b = exp_integral_gamma0_scaled(x * f).unwrap();
        prop_assert!(a > 0.0 && b <= a * (1.0 + 1e-14));
        // ½ln(1 + 2/x) < e^x E1(x) < ln(1 + 1/x)
        let slack = 1.0 + 1e-13;
        prop_assert!(a <= (1.0 / x).ln_1p() * slack);
        prop_assert!(a * slack >= 0.5 * (2.0 / x).ln_1p());
    }

    #[test]
    fn ordered_mgfs(n in 1usize..24, s in 0.0f64..50.0, db in -10.0f64..40.0) {
        let g = Snr::from_db(db);
        let mut prev = 1.0;
        let mut sum = 0.0;
        for i in 1..=n {
            let phi = mgf_ordered(i, n, g, s).unwrap();
            prop_assert!(phi > 0.0 && phi <= prev * (1.0 + 1e-15));
            prev = phi;
            sum += phi;
        }
        let want = mgf_exponential(s, g).unwrap();
        prop_assert!(((sum / n as f64 - want) / want).abs() < 1e-12);
    }

    #[test]
    fn frame_per_is_monotone(
        mode in mode(),
        n in 1usize..10,
        k in 1usize..48,
        db in 0.0f64..30.0,
        m_frac in 0.0f64..1.0,
    ) {
        let m = ((n as f64) * m_frac).floor() as usize;
        let b = LinkBudget::symmetric_db(db).unwrap();
        let cfg = FrameConfig::new(n, k, m).unwrap();
        let p = per_total(mode, &cfg, &b).unwrap().value();
        prop_assert!((0.0..=1.0).contains(&p));
        let more = per_total(mode, &cfg.with_relayed(m + 1).unwrap_or(cfg), &b).unwrap().value();
        prop_assert!(more <= p * (1.0 + 1e-9));
        let brighter = per_total(mode, &cfg, &LinkBudget::symmetric_db(db + 1.0).unwrap()).unwrap().value();
        prop_assert!(brighter <= p * (1.0 + 1e-9));
    }

    #[test]
    fn conditional_per_grows_with_packet_length(db in -10.0f64..25.0, k in 1usize..200) {
        let g = Snr::from_db(db);
        let a = per_conditional_exact(g, k).unwrap().value();
        let b = per_conditional_exact(g, k + 1).unwrap().value();
        prop_assert!(a <= b && b <= 1.0);
    }

    #[test]
    fn weakest_selection_is_sorted_prefix(snrs in prop::collection::vec(0.0f64..50.0, 1..20), m_frac in 0.0f64..=1.0) {
        let m = ((snrs.len() as f64) * m_frac).floor() as usize;
        let picked = select_weakest(&snrs, m);
        prop_assert_eq!(picked.len(), m);
        for w in picked.windows(2) {
            prop_assert!(snrs[w[0]] < snrs[w[1]] || (snrs[w[0]] == snrs[w[1]] && w[0] < w[1]));
        }
        if let Some(&last) = picked.last() {
            for (j, &x) in snrs.iter().enumerate() {
                if !picked.contains(&j) {
                    prop_assert!(x > snrs[last] || (x == snrs[last] && j > last));
                }
            }
        }
    }

    #[test]
    fn af_snr_is_bounded(d in 0.0f64..100.0, sr in 0.0f64..100.0, rd in 0.0f64..1e4, db in -5.0f64..30.0) {
        let b = LinkBudget::symmetric_db(db).unwrap();
        let s = |x| Snr::from_linear(x).unwrap();
        let c = af_combined_snr(s(d), s(sr), s(rd), &b).linear();
        prop_assert!(c >= d && c <= d + sr);
    }

    #[test]
    fn wilson_brackets_the_estimate(n in 1u64..10_000_000, frac in 0.0f64..=1.0) {
        let e = ((n as f64) * frac).floor() as u64;
        let est = PerEstimate::from_counts(e, n, 0, 1).unwrap();
        prop_assert!(est.ci_low <= est.per && est.per <= est.ci_high);
        prop_assert!(est.ci_low >= 0.0 && est.ci_high <= 1.0);
        let (lo, hi) = wilson_interval(e, n);
        prop_assert!(lo <= hi);
    }

    #[test]
    fn efficiency_identity(n in 1usize..1000, m_frac in 0.0f64..=1.0) {
        let m = ((n as f64) * m_frac).floor() as usize;
        let e = efficiency(m, n).unwrap();
        prop_assert_eq!(e.eta, 1.0 / (1.0 + e.forwarding_rate));
        prop_assert!(e.eta >= 0.5 && e.eta <= 1.0);
    }

    #[test]
    fn csv_round_trips(
        rows in prop::collection::vec(
            (-20.0f64..40.0, mode(), 1usize..64, 1usize..256, 0.0f64..1.0, prop::option::of(0.0f64..1.0),
             prop::option::of((0.0f64..1.0, 1u64..u64::MAX / 2))),
            1..12,
        )
    ) {
        let rows: Vec<ResultRow> = rows
            .into_iter()
            .map(|(snr, mode, n, k, pa, sim, meta)| ResultRow {
                snr_db: snr,
                mode,
                n,
                k,
                m: n / 2,
                per_analytic: Some(pa),
                per_sim: sim,
                ci_low: sim.map(|p| p * 0.9),
                ci_high: sim.map(|p| (p * 1.1).min(1.0)),
                trials: meta.map(|m| m.1),
                seed: meta.map(|m| m.1 ^ 0xABCD),
            })
            .collect();
        let text = csv_string(&rows).unwrap();
        prop_assert_eq!(read_csv(text.as_bytes()).unwrap(), rows);
    }
}
