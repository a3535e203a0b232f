use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::assembly::{Assembler, DiagonalSlice, OperatorTag};
use crate::error::{Error, Result};
use crate::exactkern::{free_kernel, KernelPoint};
use crate::field::{flux_profile, make_bump_field, Shape};

#[derive(Debug, Clone, Serialize)]
pub struct BoundCheckReport {
    pub bound_name: String,
    pub sampled_points: usize,
    /// largest `lhs - rhs`; negative means satisfied with margin
    pub max_violation: f64,
    pub fitted_constant: Option<f64>,
    /// for the diamagnetic check: violation against the closed-form free kernel
    /// (includes discretization error)
    pub max_violation_continuum: Option<f64>,
}

const MIN_SAMPLES: usize = 100;

fn diag_value(slice: &DiagonalSlice, x: f64) -> f64 {
    let (i0, w) = slice.grid.stencil(x);
    (0..4).map(|j| w[j] * slice.values[i0 + j]).sum()
}

/// Smallest `C` with `k(t,x,x) <= C min(1/t, (1+|x|)^{2 rho} t^{-1-rho})` over the samples `(|x|, t)`.
pub fn check_ondiag_bound(asm: &Assembler, samples: &[(f64, f64)]) -> Result<BoundCheckReport> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientData(format!("need {MIN_SAMPLES} samples, got {}", samples.len())));
    }
    let rho = asm.flux().rho;
    let mut by_t: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for &(x, t) in samples {
        if !(x >= 0.0 && t > 0.0) {
            return Err(Error::Domain(format!("bad diagonal sample ({x}, {t})")));
        }
        by_t.entry(t.to_bits()).or_default().push(x);
    }
    let mut ratios = Vec::with_capacity(samples.len());
    for (tb, xs) in by_t {
        let t = f64::from_bits(tb);
        let x_max = xs.iter().cloned().fold(0.0, f64::max);
        let slice = asm.diagonal(t, x_max.max(1e-3), OperatorTag::Magnetic, 1e-9 / (4.0 * PI * t))?;
        for &x in &xs {
            let k = diag_value(&slice, x);
            let bound = (1.0 / t).min((1.0 + x).powf(2.0 * rho) * t.powf(-1.0 - rho));
            ratios.push((k, bound));
        }
    }
    let c = ratios.iter().map(|&(k, b)| k / b).fold(0.0, f64::max);
    let max_violation = ratios.iter().map(|&(k, b)| k - c * b).fold(f64::NEG_INFINITY, f64::max);
    Ok(BoundCheckReport {
        bound_name: "ondiag_hk_ub".into(),
        sampled_points: ratios.len(),
        max_violation,
        fitted_constant: Some(c),
        max_violation_continuum: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OndiagStability {
    pub half: BoundCheckReport,
    pub full: BoundCheckReport,
    /// `C_full / C_half - 1`
    pub growth: f64,
}

/// Fits the on-diagonal constant on `|x| <= x_max/2`, `t` in the lower half of the
/// log window, then on the full region, and reports the growth of `C`.
pub fn ondiag_stability(asm: &Assembler, x_max: f64, t_min: f64, t_max: f64, nx: usize, nt: usize) -> Result<OndiagStability> {
    let region = |xm: f64, t_hi: f64| -> Vec<(f64, f64)> {
        let ts = super::log_times(t_min, t_hi, nt);
        let mut out = Vec::with_capacity(nx * nt);
        for &t in &ts {
            for i in 0..nx {
                out.push((xm * i as f64 / (nx - 1) as f64, t));
            }
        }
        out
    };
    let half = check_ondiag_bound(asm, &region(0.5 * x_max, (t_min * t_max).sqrt()))?;
    let full = check_ondiag_bound(asm, &region(x_max, t_max))?;
    let growth = full.fitted_constant.unwrap_or(0.0) / half.fitted_constant.unwrap_or(1.0) - 1.0;
    Ok(OndiagStability { half, full, growth })
}

/// Source radius, time and target `(r, dtheta)` list sharing one set of mode columns.
#[derive(Debug, Clone)]
pub struct DiamagneticSample {
    pub t: f64,
    pub r_prime: f64,
    pub targets: Vec<(f64, f64)>,
}

/// `|k_B(t,x,y)| <= k_0(t,x,y) + tol` where `k_0` is the field-free kernel on the
/// identical grid; the violation against the closed-form free kernel is also reported.
pub fn check_diamagnetic(asm: &Assembler, samples: &[DiamagneticSample], tol: f64) -> Result<BoundCheckReport> {
    let zero_field = make_bump_field(0.0, asm.flux().support_radius(), Shape::CosineBump)?;
    let mut reference = Assembler::with_policy(flux_profile(&zero_field), asm.policy);
    reference.exact_free = false;
    let mut count = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_cont = f64::NEG_INFINITY;
    for s in samples {
        let rs: Vec<f64> = s.targets.iter().map(|p| p.0).collect();
        let sb = asm.slice(s.t, s.r_prime, &rs, OperatorTag::Magnetic, tol)?;
        let sz = reference.slice(s.t, s.r_prime, &rs, OperatorTag::Magnetic, tol)?;
        for &(r, th) in &s.targets {
            let kb = sb.eval(r, th).norm();
            let k0 = sz.eval(r, th).re;
            let kf = free_kernel(&KernelPoint::new(r, s.r_prime, th, s.t)?);
            worst = worst.max(kb - k0 - sb.tail_bound(r) - sz.tail_bound(r));
            worst_cont = worst_cont.max(kb - kf);
            count += 1;
        }
    }
    Ok(BoundCheckReport {
        bound_name: "diamagnetic".into(),
        sampled_points: count,
        max_violation: worst,
        fitted_constant: None,
        max_violation_continuum: Some(worst_cont),
    })
}
