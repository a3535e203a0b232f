use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    /// `k ~ C t^-p`
    PowerLaw,
    /// `k ~ C t^-p (ln t)^-2`
    PowerLawLog2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioBand {
    pub min: f64,
    pub max: f64,
}

impl RatioBand {
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeWindow {
    pub t_min: f64,
    pub t_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFitReport {
    pub model: DecayModel,
    pub fitted_exponent: f64,
    pub log_correction_power: f64,
    pub residual_rms: f64,
    /// `k t^p (ln t)^q / gs` over the window with the fitted `p`
    pub ratio_band: RatioBand,
    pub t_window: TimeWindow,
    /// fitted `ln C`
    pub intercept: f64,
}

/// Least-squares fit of `ln(k / gs_product)` against `c - p ln t` (power law) or
/// `c - p ln t - 2 ln ln t` (log-corrected).
pub fn fit_decay(samples: &[(f64, f64)], model: DecayModel, gs_product: f64) -> Result<DecayFitReport> {
    if samples.len() < 8 {
        return Err(Error::InsufficientData(format!("need at least 8 samples, got {}", samples.len())));
    }
    if !(gs_product > 0.0) {
        return domain("gs_product must be positive");
    }
    for &(t, v) in samples {
        if !(t > 0.0) || !(v > 0.0) || !v.is_finite() {
            return domain(format!("samples must be positive, got ({t}, {v})"));
        }
        if model == DecayModel::PowerLawLog2 && !(t > 1.0) {
            return domain("log-corrected model needs t > 1");
        }
    }
    let t_min = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let t_max = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    if t_max < 16.0 * t_min {
        return Err(Error::InsufficientData(format!("window [{t_min}, {t_max}] spans less than a factor 16")));
    }
    let log_power = match model {
        DecayModel::PowerLaw => 0.0,
        DecayModel::PowerLawLog2 => 2.0,
    };
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(t, v)| {
            let x = t.ln();
            let corr = if log_power > 0.0 { log_power * x.ln() } else { 0.0 };
            (x, (v / gs_product).ln() + corr)
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_rms = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    let p = -slope;
    Ok(DecayFitReport {
        model,
        fitted_exponent: p,
        log_correction_power: log_power,
        residual_rms,
        ratio_band: ratio_band(samples, p, log_power, gs_product),
        t_window: TimeWindow { t_min, t_max },
        intercept,
    })
}

/// Band of `k t^p (ln t)^q / gs` over the samples.
pub fn ratio_band(samples: &[(f64, f64)], p: f64, log_power: f64, gs_product: f64) -> RatioBand {
    let mut band = RatioBand { min: f64::INFINITY, max: 0.0 };
    for &(t, v) in samples {
        let mut x = v * t.powf(p) / gs_product;
        if log_power != 0.0 {
            x *= t.ln().powf(log_power);
        }
        band.min = band.min.min(x);
        band.max = band.max.max(x);
    }
    band
}
