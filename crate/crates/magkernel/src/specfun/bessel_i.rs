use std::f64::consts::PI;

use super::gamma::{gamma_pos, ln_gamma};
use super::{BesselOrder, ScaledBesselValue, Scaling};
use crate::error::{domain, Result};
use crate::quad::integrate;

/// Beyond this argument the Hankel expansion is used instead of the series.
fn asymptotic_threshold(nu: f64) -> f64 {
    30.0 + 0.25 * nu * nu
}

/// `ln I_nu(z)`; `-inf` at `z = 0` for `nu > 0`.
pub fn ln_bessel_i(nu: f64, z: f64) -> f64 {
    debug_assert!(nu >= 0.0 && z >= 0.0);
    if z == 0.0 {
        return if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if z > asymptotic_threshold(nu) {
        z + hankel_scaled(nu, z).ln()
    } else {
        ln_series(nu, z)
    }
}

/// `exp(-z) I_nu(z)`, overflow-free for any finite `z >= 0`.
pub fn bessel_i_scaled(nu: f64, z: f64) -> f64 {
    debug_assert!(nu >= 0.0 && z >= 0.0);
    if z == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if z > asymptotic_threshold(nu) {
        hankel_scaled(nu, z)
    } else {
        (ln_series(nu, z) - z).exp()
    }
}

pub fn bessel_i(order: BesselOrder, z: f64, scaling: Scaling) -> Result<ScaledBesselValue> {
    if !(z >= 0.0) || !z.is_finite() {
        return domain(format!("bessel_i requires finite z >= 0, got {z}"));
    }
    let nu = order.nu();
    let value = match scaling {
        Scaling::ExpMinusZ => bessel_i_scaled(nu, z),
        Scaling::None => {
            if z == 0.0 {
                bessel_i_scaled(nu, 0.0)
            } else {
                ln_bessel_i(nu, z).exp()
            }
        }
    };
    Ok(ScaledBesselValue { value, scaling })
}

// Power series summed outward from its largest term, in log space.
fn ln_series(nu: f64, z: f64) -> f64 {
    let half = 0.5 * z;
    let q = half * half;
    // (k+1)(k+1+nu) = q at the peak
    let kp = {
        let disc = (nu * nu + 4.0 * q).sqrt();
        let k = 0.5 * (disc - nu) - 1.0;
        if k < 0.0 {
            0usize
        } else {
            k.ceil() as usize
        }
    };
    let kf = kp as f64;
    let ln_peak = (2.0 * kf + nu) * half.ln() - ln_gamma(kf + 1.0) - ln_gamma(kf + nu + 1.0);
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut k = kf;
    loop {
        term *= q / ((k + 1.0) * (k + 1.0 + nu));
        sum += term;
        k += 1.0;
        if term < 1e-17 * sum {
            break;
        }
    }
    term = 1.0;
    let mut k = kf;
    while k > 0.0 {
        term *= k * (k + nu) / q;
        sum += term;
        k -= 1.0;
        if term < 1e-17 * sum {
            break;
        }
    }
    ln_peak + sum.ln()
}

// exp(-z) I_nu(z) ~ (2 pi z)^{-1/2} sum_k (-1)^k a_k(nu) / z^k
fn hankel_scaled(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        let odd = 2.0 * k - 1.0;
        let next = -term * (mu - odd * odd) / (k * 8.0 * z);
        if next.abs() > term.abs() && k > 2.0 * nu + 2.0 {
            break;
        }
        sum += next;
        term = next;
        if term.abs() < 1e-17 * sum.abs() || k > 200.0 {
            break;
        }
        k += 1.0;
    }
    sum / (2.0 * PI * z).sqrt()
}

/// Poisson integral representation
/// `I_nu(z) = (z/2)^nu / (Gamma(nu+1/2) Gamma(1/2)) * int_0^pi sin^{2 nu}(phi) e^{z cos phi} dphi`,
/// evaluated by adaptive Gauss-Kronrod quadrature. Returns the `exp(-z)` scaled value.
pub fn bessel_i_integral(nu: f64, z: f64) -> f64 {
    if z == 0.0 {
        return bessel_i_scaled(nu, 0.0);
    }
    let ln_pref = nu * (0.5 * z).ln() - ln_gamma(nu + 0.5) - 0.5 * PI.ln();
    let pref = if nu + 0.5 < 10.0 {
        (0.5 * z).powf(nu) / (gamma_pos(nu + 0.5) * PI.sqrt())
    } else {
        ln_pref.exp()
    };
    // integrand peaks at phi=0 with width ~ 1/sqrt(z); split there for adaptivity
    let w = (1.0 / z.sqrt()).min(PI / 2.0);
    let f = |phi: f64| {
        let s = phi.sin();
        if s <= 0.0 {
            return if nu == 0.0 { (z * (phi.cos() - 1.0)).exp() } else { 0.0 };
        }
        (2.0 * nu * s.ln() + z * (phi.cos() - 1.0)).exp()
    };
    let mut total = 0.0;
    let mut a = 0.0;
    for b in [w, 4.0 * w, 16.0 * w, PI] {
        let b = b.min(PI);
        if b > a {
            total += integrate(f, a, b, 1e-300, 1e-14).value;
            a = b;
        }
    }
    pref * total
}
