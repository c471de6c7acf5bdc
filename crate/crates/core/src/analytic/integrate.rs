//! Globally adaptive 15-point Gauss-Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Error bound that is still acceptable if the interval budget runs out.
    pub fallback_abs: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub(crate) const OUTER: Tolerance = Tolerance {
        abs: 1e-15,
        rel: 1e-9,
        fallback_abs: 1e-8,
        max_intervals: 400,
    };
    pub(crate) const INNER: Tolerance = Tolerance {
        abs: 1e-16,
        rel: 1e-10,
        fallback_abs: 1e-9,
        max_intervals: 200,
    };
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Integral {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Piece {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
    }
}

/// Integrates `f` over the union of consecutive `[breaks[j], breaks[j+1]]`.
pub(crate) fn integrate_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Integral> {
    let mut heap: BinaryHeap<Piece> = breaks
        .windows(2)
        .map(|w| gk15(&mut f, w[0], w[1]))
        .collect();
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature {
                value,
                error,
                intervals: heap.len(),
            });
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Integral { value, error });
        }
        if heap.len() >= tol.max_intervals {
            if error <= tol.fallback_abs.max(1e3 * tol.rel * value.abs()) {
                return Ok(Integral { value, error });
            }
            return Err(Error::Quadrature {
                value,
                error,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            heap.push(Piece {
                error: 0.0,
                ..worst
            });
            continue;
        }
        heap.push(gk15(&mut f, worst.a, mid));
        heap.push(gk15(&mut f, mid, worst.b));
    }
}

/// Integrates `f` over `[0, ∞)`. `scale` is the largest length scale of the
/// integrand (e.g. the mean of a density); finite breakpoints grow
/// geometrically up to well beyond it and the tail is mapped onto `[0, 1)`.
pub(crate) fn integrate_half_line<F: FnMut(f64) -> f64>(
    mut f: F,
    scale: f64,
    tol: Tolerance,
) -> Result<Integral> {
    let mut breaks = vec![0.0, 0.25];
    let limit = 60.0 * scale.max(1.0);
    while *breaks.last().unwrap() < limit {
        let next = breaks.last().unwrap() * 4.0;
        breaks.push(next);
    }
    let edge = *breaks.last().unwrap();
    let finite = integrate_breaks(&mut f, &breaks, tol)?;
    // x = edge + edge·u/(1-u), u in [0, 1)
    let mut mapped = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - u;
        let x = edge + edge * u / one_minus;
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v * edge / (one_minus * one_minus)
        }
    };
    let tail = integrate_breaks(&mut mapped, &[0.0, 0.5, 1.0], tol)?;
    Ok(Integral {
        value: finite.value + tail.value,
        error: finite.error + tail.error,
    })
}
