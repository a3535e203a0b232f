//! Closed-form kernels: free heat kernel, exact mode kernels, and the
//! Aharonov-Bohm series with a certified truncation bound.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::{bessel_i_scaled, gamma_fn, ln_gamma};

/// A kernel argument in polar form: `x = r e^{i theta}`, `y = r' e^{i theta'}`,
/// `dtheta = theta - theta'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub r: f64,
    pub r_prime: f64,
    pub dtheta: f64,
    pub t: f64,
}

impl KernelPoint {
    pub fn new(r: f64, r_prime: f64, dtheta: f64, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return domain(format!("time must be positive, got {t}"));
        }
        if !(r >= 0.0) || !(r_prime >= 0.0) || !r.is_finite() || !r_prime.is_finite() {
            return domain(format!("radii must be finite and >= 0, got ({r}, {r_prime})"));
        }
        if !dtheta.is_finite() {
            return domain("dtheta must be finite");
        }
        Ok(Self { r, r_prime, dtheta: wrap_angle(dtheta), t })
    }

    pub fn distance_sq(&self) -> f64 {
        let d = self.r * self.r + self.r_prime * self.r_prime - 2.0 * self.r * self.r_prime * self.dtheta.cos();
        d.max((self.r - self.r_prime).powi(2))
    }
}

/// Map an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut x = a % two_pi;
    if x <= -PI {
        x += two_pi;
    } else if x > PI {
        x -= two_pi;
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSeriesValue {
    pub value: Complex64,
    pub modes_used: usize,
    pub tail_bound: f64,
}

/// `(4 pi t)^{-1} exp(-|x-y|^2 / 4t)`.
pub fn free_kernel(p: &KernelPoint) -> f64 {
    (-p.distance_sq() / (4.0 * p.t)).exp() / (4.0 * PI * p.t)
}

/// Exact kernel of the half-line operator with potential `beta^2/r^2` in the
/// measure `r dr`: `(2t)^{-1} I_|beta|(r r'/2t) exp(-(r^2+r'^2)/4t)`.
pub fn mode_kernel_exact(beta: f64, r: f64, r_prime: f64, t: f64) -> Result<f64> {
    if !(r > 0.0 && r_prime > 0.0 && t > 0.0) {
        return domain(format!("mode_kernel_exact needs r, r', t > 0, got ({r}, {r_prime}, {t})"));
    }
    Ok(mode_kernel_unchecked(beta.abs(), r, r_prime, t))
}

pub(crate) fn mode_kernel_unchecked(nu: f64, r: f64, r_prime: f64, t: f64) -> f64 {
    let z = r * r_prime / (2.0 * t);
    let d = r - r_prime;
    bessel_i_scaled(nu, z) * (-d * d / (4.0 * t)).exp() / (2.0 * t)
}

/// `ln[(z/2)^nu / Gamma(nu+1)]`, the crude majorant of `exp(-z) I_nu(z)`.
pub(crate) fn ln_crude_majorant(nu: f64, z: f64) -> f64 {
    if z == 0.0 {
        return if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    nu * (0.5 * z).ln() - ln_gamma(nu + 1.0)
}

/// Bound on `sum_{k>=0} exp(-z) I_{nu0+k}(z)` from the crude majorant summed
/// geometrically; infinite when the ratio test fails.
pub(crate) fn crude_tail(nu0: f64, z: f64) -> f64 {
    let q = 0.5 * z / (nu0 + 1.0);
    if q >= 1.0 {
        return f64::INFINITY;
    }
    ln_crude_majorant(nu0, z).exp() / (1.0 - q)
}

/// Bound on `sum_{k>=0} exp(-z) I_{nu0+k}(z)` from the decreasing ratio bound
/// `I_{nu+1}(z) / I_nu(z) < z / (nu + sqrt(nu^2 + z^2))`.
pub(crate) fn ratio_tail(nu0: f64, z: f64) -> f64 {
    if z == 0.0 {
        return if nu0 == 0.0 { 1.0 } else { 0.0 };
    }
    let q = z / (nu0 + (nu0 * nu0 + z * z).sqrt());
    bessel_i_scaled(nu0, z) / (1.0 - q)
}

const AB_MAX_MODES: usize = 10_000;

/// Aharonov-Bohm heat kernel with flux `alpha`, summed over `|m| <= M` in
/// `m, -m` pairs until the certified tail bound is below `tol`.
pub fn ab_kernel(alpha: f64, p: &KernelPoint, tol: f64) -> Result<TruncatedSeriesValue> {
    if !(tol > 0.0) {
        return domain(format!("tol must be positive, got {tol}"));
    }
    if !alpha.is_finite() {
        return domain("alpha must be finite");
    }
    let t = p.t;
    let rr = p.r * p.r + p.r_prime * p.r_prime;
    if p.r == 0.0 || p.r_prime == 0.0 {
        if alpha == alpha.round() {
            let m = -alpha;
            let value = Complex64::from_polar((-rr / (4.0 * t)).exp() / (4.0 * PI * t), m * p.dtheta);
            return Ok(TruncatedSeriesValue { value, modes_used: alpha.abs() as usize, tail_bound: 0.0 });
        }
        return Ok(TruncatedSeriesValue { value: Complex64::new(0.0, 0.0), modes_used: 0, tail_bound: 0.0 });
    }
    let z = p.r * p.r_prime / (2.0 * t);
    let d = p.r - p.r_prime;
    let pref = (-d * d / (4.0 * t)).exp() / (4.0 * PI * t);
    let tail = |m_max: usize| -> f64 {
        let mm = m_max as f64 + 1.0;
        pref * (crude_tail((mm + alpha).abs(), z) + crude_tail((mm - alpha).abs(), z))
    };
    let term = |m: i64| -> Complex64 {
        let nu = (m as f64 + alpha).abs();
        Complex64::from_polar(bessel_i_scaled(nu, z), m as f64 * p.dtheta)
    };
    let mut sum = term(0);
    let mut m_max = 0usize;
    let start = alpha.abs().ceil() as usize;
    while m_max < start {
        m_max += 1;
        sum += term(m_max as i64) + term(-(m_max as i64));
    }
    let mut bound = tail(m_max);
    while bound > tol {
        if m_max >= AB_MAX_MODES {
            return Err(Error::Convergence { achieved: bound, modes: m_max });
        }
        m_max += 1;
        sum += term(m_max as i64) + term(-(m_max as i64));
        bound = tail(m_max);
    }
    Ok(TruncatedSeriesValue { value: sum * pref, modes_used: m_max, tail_bound: bound })
}

/// Large-time limit of `t^{1+|alpha|}` times the AB kernel, `|alpha| <= 1/2`.
pub fn ab_limit_constant(alpha: f64, r: f64, r_prime: f64, dtheta: f64) -> Result<Complex64> {
    if !(alpha.abs() <= 0.5) {
        return domain(format!("ab_limit_constant needs |alpha| <= 1/2, got {alpha}"));
    }
    let a = alpha.abs();
    let base = (r * r_prime / 4.0).powf(a) / (4.0 * PI * gamma_fn(1.0 + a)?);
    if a == 0.5 {
        let sign = if alpha > 0.0 { -1.0 } else { 1.0 };
        Ok(base * (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, sign * dtheta)))
    } else {
        Ok(Complex64::new(base, 0.0))
    }
}
