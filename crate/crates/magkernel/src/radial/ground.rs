use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FluxProfile;
use crate::ode::dopri5;

/// Exterior form of the ground state beyond the field support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ExteriorFit {
    /// `a r^sigma + b r^-sigma`, `sigma = |alpha|`
    Power { sigma: f64, a: f64, b: f64 },
    /// `c + d ln r`
    Log { c: f64, d: f64 },
}

impl ExteriorFit {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            ExteriorFit::Power { sigma, a, b } => a * r.powf(sigma) + b * r.powf(-sigma),
            ExteriorFit::Log { c, d } => c + d * r.ln(),
        }
    }

    pub fn leading(&self) -> f64 {
        match *self {
            ExteriorFit::Power { a, .. } => a,
            ExteriorFit::Log { d, .. } => d,
        }
    }
}

/// Positive radial solution of `r (r h')' = b(r)^2 h`, `h(0) = 1`.
#[derive(Debug, Clone)]
pub struct GroundState {
    /// samples in `s = ln r`: (s, h, dh/ds)
    samples: Vec<(f64, f64, f64)>,
    pub fit: ExteriorFit,
    pub fit_residual: f64,
    pub alpha: f64,
    pub r_fit_max: f64,
    s_start: f64,
}

pub const FIT_TOLERANCE: f64 = 1e-6;

pub fn ground_state(flux: &FluxProfile, r_fit_max: f64) -> Result<GroundState> {
    let rr = flux.support_radius();
    if !(r_fit_max > 1.5 * rr) {
        return Err(Error::Domain(format!("r_fit_max must exceed 1.5 R = {}", 1.5 * rr)));
    }
    // b^2 = O(r^4) near the origin, so h = 1 + O(r^4) at the start point
    let s0 = (1e-4 * rr).ln();
    let s1 = r_fit_max.ln();
    let sol = dopri5(
        |s, y: &[f64; 2]| {
            let b = flux.b(s.exp());
            [y[1], b * b * y[0]]
        },
        s0,
        [1.0, 0.0],
        s1,
        1e-10,
        1e-14,
        0.05,
    );
    let samples: Vec<(f64, f64, f64)> = sol.iter().map(|p| (p.x, p.y[0], p.y[1])).collect();
    let mut gs = GroundState {
        samples,
        fit: ExteriorFit::Log { c: 1.0, d: 0.0 },
        fit_residual: 0.0,
        alpha: flux.alpha,
        r_fit_max,
        s_start: s0,
    };
    // least squares on the exterior window
    let lo = 1.5 * rr;
    let npts = 200;
    let pts: Vec<(f64, f64)> = (0..npts)
        .map(|i| {
            let r = lo * (r_fit_max / lo).powf(i as f64 / (npts - 1) as f64);
            (r, gs.interior(r.ln()))
        })
        .collect();
    let sigma = flux.alpha.abs();
    let basis = |r: f64| -> (f64, f64) {
        if sigma > 0.0 {
            (r.powf(sigma), r.powf(-sigma))
        } else {
            (1.0, r.ln())
        }
    };
    let (mut s11, mut s12, mut s22, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(r, h) in &pts {
        // relative weighting
        let (p, q) = basis(r);
        let (p, q, y) = (p / h, q / h, 1.0);
        s11 += p * p;
        s12 += p * q;
        s22 += q * q;
        y1 += p * y;
        y2 += q * y;
    }
    let det = s11 * s22 - s12 * s12;
    let (u, v) = ((s22 * y1 - s12 * y2) / det, (s11 * y2 - s12 * y1) / det);
    gs.fit = if sigma > 0.0 {
        ExteriorFit::Power { sigma, a: u, b: v }
    } else {
        ExteriorFit::Log { c: u, d: v }
    };
    gs.fit_residual = pts.iter().map(|&(r, h)| ((gs.fit.eval(r) - h) / h).abs()).fold(0.0, f64::max);
    if gs.fit_residual > FIT_TOLERANCE {
        return Err(Error::Fit { residual: gs.fit_residual });
    }
    let lead = gs.fit.leading();
    let trivial = flux.is_zero();
    if !(lead > 0.0 || (trivial && lead.abs() < 1e-9)) {
        return Err(Error::Numerical(format!("ground-state leading coefficient {lead:e} is not positive")));
    }
    Ok(gs)
}

impl GroundState {
    fn interior(&self, s: f64) -> f64 {
        let sm = &self.samples;
        if s <= self.s_start {
            return sm[0].1;
        }
        let i = sm.partition_point(|p| p.0 <= s).clamp(1, sm.len() - 1) - 1;
        let (x0, y0, d0) = sm[i];
        let (x1, y1, d1) = sm[i + 1];
        let hh = x1 - x0;
        let u = ((s - x0) / hh).clamp(0.0, 1.0);
        // cubic Hermite
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        h00 * y0 + h10 * hh * d0 + h01 * y1 + h11 * hh * d1
    }

    /// `h(r)`; the fitted exterior form is used beyond `r_fit_max`.
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 1.0;
        }
        if r > self.r_fit_max {
            return self.fit.eval(r);
        }
        self.interior(r.ln())
    }

    /// Integration samples as `(r, h)`.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().map(|p| (p.0.exp(), p.1))
    }
}
