//! Standard normal survival function `1 - Φ(t)`, via `erfc`.
//!
//! `erfc` uses the positive-term series `erf(x) = 2/√π e^{-x²} Σ 2ᵏx^{2k+1}/(2k+1)!!`
//! below `x = 2` and the Laplace continued fraction above it.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

const SERIES_LIMIT: f64 = 2.0;
const CF_TERMS: usize = 400;

fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    while term > 1e-17 * sum {
        k += 1.0;
        term *= 2.0 * x2 / (2.0 * k + 1.0);
        sum += term;
    }
    2.0 / PI.sqrt() * (-x2).exp() * sum
}

/// `ln erfc(x)` for `x ≥ SERIES_LIMIT`:
/// `erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))`.
fn log_erfc_cf(x: f64) -> f64 {
    let mut f = x;
    for k in (1..=CF_TERMS).rev() {
        f = x + (k as f64 / 2.0) / f;
    }
    -x * x - 0.5 * PI.ln() - f.ln()
}

fn log_erfc_nonneg(x: f64) -> f64 {
    if x < SERIES_LIMIT {
        (-erf_series(x)).ln_1p()
    } else {
        log_erfc_cf(x)
    }
}

/// `ln(1 - Φ(t))`, finite far into the right tail.
pub fn log_normal_sf(t: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t >= 0.0 {
        -std::f64::consts::LN_2 + log_erfc_nonneg(t * FRAC_1_SQRT_2)
    } else {
        (-normal_sf(-t)).ln_1p()
    }
}

/// `1 - Φ(t)`.
pub fn normal_sf(t: f64) -> f64 {
    if t >= 0.0 {
        log_normal_sf(t).exp()
    } else {
        1.0 - normal_sf(-t)
    }
}
