//! Asymptotic fits, kernel bound checks, weighted norm estimates, the Green
//! integral and the Maz'ya criterion.

mod bounds;
mod fit;
mod green;
mod mazya;
mod norms;
mod short_time;

pub use bounds::{check_diamagnetic, check_ondiag_bound, ondiag_stability, BoundCheckReport, DiamagneticSample, OndiagStability};
pub use fit::{fit_decay, ratio_band, DecayFitReport, DecayModel, RatioBand, TimeWindow};
pub use green::{green_integral, GreenOutcome, GreenReport};
pub use mazya::{mazya_condition, MazyaReport};
pub use norms::{weighted_norm_decay, NormKind};
pub use short_time::short_time_check;

use std::f64::consts::PI;

use crate::assembly::{Assembler, OperatorTag};
use crate::error::Result;

/// `n` log-spaced times from `t_min` to `t_max` inclusive.
pub fn log_times(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![t_min];
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Log-spaced times at `per_decade` points per decade.
pub fn decade_times(t_min: f64, t_max: f64, per_decade: usize) -> Vec<f64> {
    let decades = (t_max / t_min).log10();
    let n = (decades * per_decade as f64).round() as usize + 1;
    log_times(t_min, t_max, n.max(2))
}

/// Magnetic kernel `k(t, x, y)` at each time, with absolute tolerance
/// `rel_tol / (4 pi t)` per time.
pub fn kernel_time_series(
    asm: &Assembler,
    r: f64,
    r_prime: f64,
    dtheta: f64,
    times: &[f64],
    rel_tol: f64,
) -> Result<Vec<(f64, f64)>> {
    times
        .iter()
        .map(|&t| {
            let s = asm.slice(t, r_prime, &[r], OperatorTag::Magnetic, rel_tol / (4.0 * PI * t))?;
            Ok((t, s.eval(r, dtheta).norm()))
        })
        .collect()
}
