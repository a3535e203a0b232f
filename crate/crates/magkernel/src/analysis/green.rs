use serde::Serialize;

use super::fit::{fit_decay, DecayModel};
use super::{decade_times, kernel_time_series};
use crate::assembly::Assembler;
use crate::error::{domain, Result};

#[derive(Debug, Clone, Serialize)]
pub struct GreenReport {
    pub value_partial: f64,
    pub tail_estimate: f64,
    pub t_upper: f64,
    pub model: DecayModel,
    pub fitted_exponent: f64,
    /// whether the tail estimate fell below `tol` before the time cap
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum GreenOutcome {
    Finite(GreenReport),
    /// fitted decay exponent is at most 1, so the time integral diverges
    Divergent { fitted_exponent: f64, t_upper: f64, value_partial: f64 },
}

/// Exponents at or below this are treated as non-integrable.
const DIVERGENCE_MARGIN: f64 = 1.02;
const SAMPLES_PER_DECADE: usize = 16;

/// `int_{t_min}^inf k(t, x, y) dt` for `x != y`: the kernel is integrated up to
/// `T`, which grows a decade at a time (up to `t_cap`) until the tail predicted
/// by the fitted decay model is below `tol`.
///
/// Fields with zero total flux use the log-corrected model `C / (t ln^2 t)` for
/// the tail; other fields use a power law fitted to the last two decades.
pub fn green_integral(asm: &Assembler, r: f64, r_prime: f64, dtheta: f64, t_min: f64, tol: f64, t_cap: f64) -> Result<GreenOutcome> {
    if !(tol > 0.0) || !(t_min > 0.0) {
        return domain("green_integral needs t_min > 0 and tol > 0");
    }
    let dist2 = r * r + r_prime * r_prime - 2.0 * r * r_prime * dtheta.cos();
    if dist2 <= 1e-24 {
        return domain("green_integral needs x != y");
    }
    let flux = asm.flux();
    let log_model = flux.alpha.abs() < 1e-12 && !flux.is_zero();
    let mut t_upper = (t_min * 1e3).max(1e3);
    let times = decade_times(t_min, t_upper, SAMPLES_PER_DECADE);
    let mut samples = kernel_time_series(asm, r, r_prime, dtheta, &times, 1e-9)?;
    loop {
        // integrate in ln t: int k dt = int k t d(ln t), Simpson on a uniform log grid
        let value_partial = simpson_log(&samples);
        let window: Vec<(f64, f64)> = samples.iter().cloned().filter(|s| s.0 >= t_upper / 100.0 * 0.999).collect();
        let (t_last, k_last) = *samples.last().unwrap();
        let (model, p, tail) = if log_model {
            // C fitted with the exponent pinned to 1 and the log power to 2
            let c = window.iter().map(|&(t, k)| (k * t * t.ln().powi(2)).ln()).sum::<f64>() / window.len() as f64;
            let p = fit_decay(&window, DecayModel::PowerLaw, 1.0)?.fitted_exponent;
            (DecayModel::PowerLawLog2, p, c.exp() / t_last.ln())
        } else {
            let f = fit_decay(&window, DecayModel::PowerLaw, 1.0)?;
            let p = f.fitted_exponent;
            let tail = if p > DIVERGENCE_MARGIN { k_last * t_last / (p - 1.0) } else { f64::INFINITY };
            (DecayModel::PowerLaw, p, tail)
        };
        if !log_model && p <= DIVERGENCE_MARGIN {
            if t_upper * 10.0 > t_cap {
                return Ok(GreenOutcome::Divergent { fitted_exponent: p, t_upper, value_partial });
            }
        } else if tail < tol || t_upper * 10.0 > t_cap {
            return Ok(GreenOutcome::Finite(GreenReport {
                value_partial,
                tail_estimate: tail,
                t_upper,
                model,
                fitted_exponent: p,
                converged: tail < tol,
            }));
        }
        let more = decade_times(t_upper, t_upper * 10.0, SAMPLES_PER_DECADE);
        samples.extend(kernel_time_series(asm, r, r_prime, dtheta, &more[1..], 1e-9)?);
        t_upper *= 10.0;
    }
}

fn simpson_log(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len();
    let f: Vec<f64> = samples.iter().map(|&(t, k)| t * k).collect();
    let x: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let mut acc = 0.0;
    let mut i = 0;
    while i + 2 < n {
        let h = 0.5 * (x[i + 2] - x[i]);
        acc += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
        i += 2;
    }
    if i + 1 < n {
        acc += 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
    }
    acc
}
