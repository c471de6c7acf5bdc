use super::report::{curve_points, curves};
use super::run::ResultRow;
use crate::error::{Error, Result};

/// SNR in dB at which a decreasing PER curve first reaches `target`,
/// interpolating linearly in `(dB, log10 PER)`.
pub fn snr_at_target(curve: &[(f64, f64)], target: f64, id: &str) -> Result<f64> {
    let range_err = || Error::Range {
        target,
        curve: id.to_owned(),
    };
    if !(target > 0.0 && target < 1.0) {
        return Err(range_err());
    }
    let lt = target.log10();
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|&(x, p)| (x, p.log10()))
        .collect();
    for w in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y0 >= lt && y1 <= lt {
            if y0 == y1 {
                return Ok(x0);
            }
            return Ok(x0 + (lt - y0) * (x1 - x0) / (y1 - y0));
        }
    }
    Err(range_err())
}

/// Horizontal gap in dB between two curves at `target` PER; positive when
/// the candidate reaches the target at a lower SNR than the baseline.
pub fn gain_at_target(
    rows: &[ResultRow],
    target: f64,
    baseline: &str,
    candidate: &str,
) -> Result<f64> {
    let all = curves(rows);
    let lookup = |id: &str| {
        all.iter()
            .find(|(c, _)| c == id)
            .map(|(_, rs)| curve_points(rs))
            .ok_or_else(|| Error::Range {
                target,
                curve: format!("{id} (no such curve)"),
            })
    };
    let b = snr_at_target(&lookup(baseline)?, target, baseline)?;
    let c = snr_at_target(&lookup(candidate)?, target, candidate)?;
    Ok(b - c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RelayMode;

    fn rows(m: usize, shift_db: f64) -> Vec<ResultRow> {
        (0..=12)
            .map(|j| {
                let snr = 2.5 * j as f64;
                ResultRow {
                    snr_db: snr,
                    mode: RelayMode::DecodeForward,
                    n: 8,
                    k: 16,
                    m,
                    per_analytic: Some(10f64.powf(-(snr + shift_db) / 10.0).min(1.0)),
                    per_sim: None,
                    ci_low: None,
                    ci_high: None,
                    trials: None,
                    seed: None,
                }
            })
            .collect()
    }

    #[test]
    fn identical_curves() {
        let r = rows(0, 0.0);
        assert_eq!(
            gain_at_target(&r, 1e-2, "df-8-16-0", "df-8-16-0").unwrap(),
            0.0
        );
    }

    #[test]
    fn shifted_curve() {
        let mut r = rows(0, 0.0);
        r.extend(rows(1, 3.0));
        let g = gain_at_target(&r, 1e-2, "df-8-16-0", "df-8-16-1").unwrap();
        assert!((g - 3.0).abs() < 0.01, "{g}");
        let g = gain_at_target(&r, 0.0316, "df-8-16-0", "df-8-16-1").unwrap();
        assert!((g - 3.0).abs() < 0.01, "{g}");
    }

    #[test]
    fn unbracketed_target() {
        let r = rows(0, 0.0);
        assert!(matches!(
            gain_at_target(&r, 1e-5, "df-8-16-0", "df-8-16-0"),
            Err(Error::Range { .. })
        ));
        assert!(gain_at_target(&r, 1e-2, "df-8-16-0", "af-8-16-0").is_err());
    }
}
