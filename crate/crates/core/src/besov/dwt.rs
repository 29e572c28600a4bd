//! Periodised orthonormal filter-bank transform.
//!
//! The scaling filter is Daubechies with 6 vanishing moments (12 taps,
//! Hölder regularity above 2), computed offline by spectral factorisation
//! of the half-band polynomial and frozen here to full double precision.
//! Periodised Daubechies banks stay exactly orthonormal at every even
//! signal length because the filter autocorrelation vanishes at all
//! non-zero even lags.

/// db6 scaling (low-pass) filter, sum = sqrt(2).
pub const DB6_LOWPASS: [f64; 12] = [
    -0.001_077_301_085_308_479,
    0.004_777_257_510_945_504,
    0.000_553_842_201_161_509_4,
    -0.031_582_039_317_486_016,
    0.027_522_865_530_305_675,
    0.097_501_605_587_322_99,
    -0.129_766_867_567_261_83,
    -0.226_264_693_965_439_58,
    0.315_250_351_709_198_35,
    0.751_133_908_021_094_7,
    0.494_623_890_398_452_9,
    0.111_540_743_350_109_37,
];

pub const FILTER_LEN: usize = 12;

/// High-pass companion: `g[k] = (-1)^k h[L-1-k]`.
pub fn highpass() -> [f64; FILTER_LEN] {
    let mut g = [0.0; FILTER_LEN];
    for (k, slot) in g.iter_mut().enumerate() {
        let v = DB6_LOWPASS[FILTER_LEN - 1 - k];
        *slot = if k % 2 == 0 { v } else { -v };
    }
    g
}

/// One periodic analysis step: `x` of even length `n` into `n/2` approx and
/// `n/2` detail coefficients, `a[k] = sum_m h[m] x[(2k+m) mod n]`.
pub fn analyze_step(x: &[f64], approx: &mut [f64], detail: &mut [f64]) {
    let n = x.len();
    let g = highpass();
    for k in 0..n / 2 {
        let mut a = 0.0;
        let mut d = 0.0;
        let base = 2 * k;
        for m in 0..FILTER_LEN {
            let v = x[(base + m) % n];
            a += DB6_LOWPASS[m] * v;
            d += g[m] * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

/// Inverse of [`analyze_step`] (exact, by orthonormality).
pub fn synthesize_step(approx: &[f64], detail: &[f64], x: &mut [f64]) {
    let n = 2 * approx.len();
    let g = highpass();
    for v in x.iter_mut() {
        *v = 0.0;
    }
    for k in 0..approx.len() {
        let base = 2 * k;
        for m in 0..FILTER_LEN {
            x[(base + m) % n] += DB6_LOWPASS[m] * approx[k] + g[m] * detail[k];
        }
    }
}
