use std::f64::consts::PI;

use super::gamma::{gamma_pos, ln_gamma};
use super::BesselOrder;
use crate::error::{domain, Result};

/// Bessel function of the first kind `J_nu(z)` for real `nu >= 0`, `z >= 0`.
pub fn bessel_j(order: BesselOrder, z: f64) -> Result<f64> {
    if !(z >= 0.0) || !z.is_finite() {
        return domain(format!("bessel_j requires finite z >= 0, got {z}"));
    }
    Ok(j_nu(order.nu(), z))
}

pub(crate) fn j_nu(nu: f64, z: f64) -> f64 {
    if z == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if z >= 25.0 + 0.5 * nu * nu {
        hankel(nu, z)
    } else if z <= 8.0 || z < 0.5 * nu {
        series(nu, z)
    } else {
        miller(nu, z)
    }
}

// Alternating power series with Neumaier compensation.
fn series(nu: f64, z: f64) -> f64 {
    let half = 0.5 * z;
    let q = -half * half;
    let lead = if nu < 100.0 {
        half.powf(nu) / gamma_pos(nu + 1.0)
    } else {
        (nu * half.ln() - ln_gamma(nu + 1.0)).exp()
    };
    let mut sum = 1.0;
    let mut comp = 0.0;
    let mut term = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + nu));
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if term.abs() < 1e-18 * sum.abs() && k > half {
            break;
        }
    }
    lead * (sum + comp)
}

// Backward recurrence on orders mu + k, normalized by
// (z/2)^mu = sum_k (mu + 2k) Gamma(mu + k) / k! J_{mu+2k}(z).
fn miller(nu: f64, z: f64) -> f64 {
    let mu = nu.fract();
    let n_target = nu.floor() as usize;
    let start = (z.max(nu) + 40.0 + 2.0 * z.sqrt()) as usize + 1;
    let mut jp1 = 0.0f64;
    let mut j = 1e-300f64;
    let mut target = 0.0;
    let mut norm = 0.0;
    // weight for even index 2k: (mu+2k) Gamma(mu+k)/k!
    let weight = |k: usize| -> f64 {
        let kf = k as f64;
        if mu == 0.0 {
            if k == 0 {
                1.0
            } else {
                2.0
            }
        } else {
            (mu + 2.0 * kf) * (ln_gamma_small(mu + kf) - ln_gamma(kf + 1.0)).exp()
        }
    };
    let mut idx = start;
    loop {
        if idx == n_target {
            target = j;
        }
        if idx.is_multiple_of(2) {
            norm += weight(idx / 2) * j;
        }
        if idx == 0 {
            break;
        }
        let order = mu + idx as f64;
        let jm1 = 2.0 * order / z * j - jp1;
        jp1 = j;
        j = jm1;
        idx -= 1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            target *= 1e-250;
            norm *= 1e-250;
        }
    }
    target * (0.5 * z).powf(mu) / norm
}

fn ln_gamma_small(x: f64) -> f64 {
    if x < 10.0 {
        gamma_pos(x).ln()
    } else {
        ln_gamma(x)
    }
}

// J_nu(z) = sqrt(2/(pi z)) (P cos chi - Q sin chi), chi = z - (nu/2 + 1/4) pi
fn hankel(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut k = 1.0;
    let mut prev = f64::INFINITY;
    loop {
        let odd = 2.0 * k - 1.0;
        a *= (mu - odd * odd) / (k * 8.0 * z);
        if a.abs() > prev && k > nu + 1.0 {
            break;
        }
        prev = a.abs();
        // a_k (-1)^{floor(k/2)} goes to P (even k) or Q (odd k)
        let kk = k as i64;
        let sign = if (kk / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if kk % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
        if a.abs() < 1e-17 || k > 300.0 {
            break;
        }
        k += 1.0;
    }
    // reduce z mod 2 pi before subtracting the phase offset
    let two_pi = 2.0 * PI;
    let zr = z - two_pi * (z / two_pi).floor();
    let chi = zr - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}
