use std::f64::consts::PI;

use crate::error::{domain, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

// Lanczos sum for x >= 0.5, returns Gamma(x).
fn lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

fn stirling_corr(x: f64) -> f64 {
    // Bernoulli corrections B_{2k} / (2k (2k-1) x^{2k-1})
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in C {
        corr += c * p;
        p *= inv2;
    }
    corr
}

fn stirling_ln(x: f64) -> f64 {
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + stirling_corr(x)
}

// exp(stirling_ln) loses ~|ln Gamma| ulps; the product form does not
fn stirling(x: f64) -> f64 {
    let half = x.powf(0.5 * (x - 0.5));
    half * (half * (-x).exp()) * (2.0 * PI).sqrt() * stirling_corr(x).exp()
}

/// Gamma function for positive arguments (overflows to +inf beyond ~171.6).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("gamma_fn requires a finite positive argument, got {x}"));
    }
    Ok(gamma_pos(x))
}

pub(crate) fn gamma_pos(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= 30.0 {
        (2..x as u32).fold(1.0, |acc, k| acc * k as f64)
    } else if x < 0.5 {
        lanczos(x + 1.0) / x
    } else if x > 171.7 {
        f64::INFINITY
    } else if x >= 10.0 {
        stirling(x)
    } else {
        lanczos(x)
    }
}

/// Natural log of Gamma for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x >= 10.0 {
        stirling_ln(x)
    } else {
        gamma_pos(x).ln()
    }
}
