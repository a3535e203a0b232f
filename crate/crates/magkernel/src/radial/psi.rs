use crate::error::{domain, Result};
use crate::field::FluxProfile;

/// Comparison function `psi_m`: 1 inside the support, and
/// `((r/R)^s + (R/r)^s)/2` outside with `s = |alpha + m|`.
pub fn psi_comparison(flux: &FluxProfile, m: i64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("psi_comparison needs r > 0, got {r}"));
    }
    let rr = flux.support_radius();
    if r < rr {
        return Ok(1.0);
    }
    let s = (flux.alpha + m as f64).abs();
    Ok(0.5 * ((r / rr).powf(s) + (rr / r).powf(s)))
}
