//! Radial magnetic fields, their flux functions `b(r)`, and per-mode potentials.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    CosineBump,
    QuadraticBump,
    Annulus,
}

impl std::str::FromStr for Shape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine_bump" => Ok(Shape::CosineBump),
            "quadratic_bump" => Ok(Shape::QuadraticBump),
            "annulus" => Ok(Shape::Annulus),
            other => Err(Error::Config(format!("unknown field shape '{other}'"))),
        }
    }
}

/// Peak of |b| for the annulus shape when the target flux is small.
const ANNULUS_PEAK: f64 = 0.45;

#[derive(Debug, Clone, PartialEq)]
enum Profile {
    Zero,
    /// B = c (1 + cos(pi r/R)) / 2
    Cosine { c: f64 },
    /// B = c (1 - (r/R)^2)
    Quadratic { c: f64 },
    /// B = c sin^2(2 pi r/R), scaled by -kappa on [R/2, R]
    Annulus { c: f64, kappa: f64 },
    /// linear B between nodes; `cum[i]` is b at node i
    Piecewise { r: Vec<f64>, bval: Vec<f64>, cum: Vec<f64> },
}

/// Radial field profile `B(r)` supported in `[0, R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    profile: Profile,
    support_radius: f64,
}

impl RadialField {
    pub fn zero() -> Self {
        Self { profile: Profile::Zero, support_radius: 1.0 }
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn is_zero(&self) -> bool {
        match &self.profile {
            Profile::Zero => true,
            Profile::Cosine { c } | Profile::Quadratic { c } => *c == 0.0,
            Profile::Annulus { c, .. } => *c == 0.0,
            Profile::Piecewise { bval, .. } => bval.iter().all(|&b| b == 0.0),
        }
    }

    /// Piecewise-linear field through `(r_i, B_i)`; constant `B_0` on `[0, r_0]`,
    /// zero beyond the last node, which must carry `B = 0` for continuity.
    pub fn piecewise(nodes: &[(f64, f64)]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Config("piecewise field needs at least one node".into()));
        }
        for w in nodes.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Config("piecewise radii must be strictly increasing".into()));
            }
        }
        for &(r, b) in nodes {
            if !r.is_finite() || !b.is_finite() || r < 0.0 {
                return Err(Error::Config(format!("invalid piecewise node ({r}, {b})")));
            }
        }
        let last = nodes[nodes.len() - 1];
        if last.1 != 0.0 {
            return Err(Error::Config("last piecewise node must have B = 0 (continuity)".into()));
        }
        let mut r = Vec::with_capacity(nodes.len() + 1);
        let mut bval = Vec::with_capacity(nodes.len() + 1);
        if nodes[0].0 > 0.0 {
            r.push(0.0);
            bval.push(nodes[0].1);
        }
        for &(ri, bi) in nodes {
            r.push(ri);
            bval.push(bi);
        }
        let mut cum = vec![0.0; r.len()];
        for i in 1..r.len() {
            cum[i] = cum[i - 1] + segment_flux(r[i - 1], bval[i - 1], r[i], bval[i], r[i]);
        }
        let support_radius = if last.0 > 0.0 { last.0 } else { 1.0 };
        Ok(Self { profile: Profile::Piecewise { r, bval, cum }, support_radius })
    }

    /// Field value `B(r)`.
    pub fn b_field(&self, r: f64) -> f64 {
        let rr = self.support_radius;
        if r > rr && !matches!(self.profile, Profile::Zero) {
            return 0.0;
        }
        match &self.profile {
            Profile::Zero => 0.0,
            Profile::Cosine { c } => c * 0.5 * (1.0 + (PI * r / rr).cos()),
            Profile::Quadratic { c } => c * (1.0 - (r / rr).powi(2)),
            Profile::Annulus { c, kappa } => {
                let s = (2.0 * PI * r / rr).sin();
                let v = c * s * s;
                if r <= 0.5 * rr {
                    v
                } else {
                    -kappa * v
                }
            }
            Profile::Piecewise { r: nodes, bval, .. } => {
                let i = segment_index(nodes, r);
                if i + 1 >= nodes.len() {
                    return bval[nodes.len() - 1];
                }
                let s = (r - nodes[i]) / (nodes[i + 1] - nodes[i]);
                bval[i] + s * (bval[i + 1] - bval[i])
            }
        }
    }

    /// Flux function `b(r) = int_0^r B(s) s ds`, in closed form.
    pub fn flux(&self, r: f64) -> f64 {
        let rr = self.support_radius;
        let r = r.min(rr);
        match &self.profile {
            Profile::Zero => 0.0,
            Profile::Cosine { c } => {
                let k = rr / PI;
                let x = PI * r / rr;
                c * (0.25 * r * r + 0.5 * (r * k * x.sin() + k * k * (x.cos() - 1.0)))
            }
            Profile::Quadratic { c } => c * (0.5 * r * r - 0.25 * r.powi(4) / (rr * rr)),
            Profile::Annulus { c, kappa } => {
                let k = 2.0 * PI / rr;
                let anti = |t: f64| {
                    0.25 * t * t - t * (2.0 * k * t).sin() / (4.0 * k) - (2.0 * k * t).cos() / (8.0 * k * k)
                };
                let half = 0.5 * rr;
                if r <= half {
                    c * (anti(r) - anti(0.0))
                } else {
                    c * (anti(half) - anti(0.0)) - kappa * c * (anti(r) - anti(half))
                }
            }
            Profile::Piecewise { r: nodes, bval, cum } => {
                let i = segment_index(nodes, r);
                if i + 1 >= nodes.len() {
                    return cum[nodes.len() - 1];
                }
                cum[i] + segment_flux(nodes[i], bval[i], nodes[i + 1], bval[i + 1], r)
            }
        }
    }
}

fn segment_index(nodes: &[f64], r: f64) -> usize {
    match nodes.partition_point(|&x| x <= r) {
        0 => 0,
        k => k - 1,
    }
}

// int_{r0}^{x} B(s) s ds for B linear between (r0, b0) and (r1, b1)
fn segment_flux(r0: f64, b0: f64, r1: f64, b1: f64, x: f64) -> f64 {
    let slope = (b1 - b0) / (r1 - r0);
    let p = |s: f64| (b0 - slope * r0) * 0.5 * s * s + slope * s * s * s / 3.0;
    p(x) - p(r0)
}

/// Build a named bump field with total flux `alpha_target` supported in `[0, R]`.
pub fn make_bump_field(alpha_target: f64, support_radius: f64, shape: Shape) -> Result<RadialField> {
    if !(support_radius > 0.0) || !support_radius.is_finite() {
        return Err(Error::Domain(format!("support radius must be positive, got {support_radius}")));
    }
    if !alpha_target.is_finite() {
        return Err(Error::Domain("alpha must be finite".into()));
    }
    let r2 = support_radius * support_radius;
    let profile = match shape {
        Shape::CosineBump => Profile::Cosine { c: alpha_target / (r2 * (0.25 - 1.0 / (PI * PI))) },
        Shape::QuadraticBump => Profile::Quadratic { c: 4.0 * alpha_target / r2 },
        Shape::Annulus => {
            // inner flux c R^2/16 = peak; total = peak (1 - 3 kappa)
            let peak = ANNULUS_PEAK.max(1.5 * alpha_target.abs());
            let peak = if alpha_target < 0.0 { -peak } else { peak };
            let kappa = (1.0 - alpha_target / peak) / 3.0;
            Profile::Annulus { c: 16.0 * peak / r2, kappa }
        }
    };
    Ok(RadialField { profile, support_radius })
}

/// Cumulative flux data derived from a field.
#[derive(Debug, Clone)]
pub struct FluxProfile {
    field: Arc<RadialField>,
    pub alpha: f64,
    pub sup_abs_b: f64,
    pub rho: f64,
    pub n0: i64,
}

impl FluxProfile {
    pub fn b(&self, r: f64) -> f64 {
        if r > self.field.support_radius {
            self.alpha
        } else {
            self.field.flux(r)
        }
    }

    pub fn field(&self) -> &RadialField {
        &self.field
    }

    pub fn support_radius(&self) -> f64 {
        self.field.support_radius
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero()
    }
}

pub fn flux_profile(field: &RadialField) -> FluxProfile {
    let rr = field.support_radius;
    let mut alpha = field.flux(rr);
    let n = 4000;
    let mut best = (0.0f64, 0.0f64);
    for i in 0..=n {
        let r = rr * i as f64 / n as f64;
        let v = field.flux(r).abs();
        if v > best.0 {
            best = (v, r);
        }
    }
    // golden-section polish around the sampled maximum
    let (mut a, mut c) = ((best.1 - rr / n as f64).max(0.0), (best.1 + rr / n as f64).min(rr));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = c - g * (c - a);
        let x2 = a + g * (c - a);
        if field.flux(x1).abs() > field.flux(x2).abs() {
            c = x2;
        } else {
            a = x1;
        }
    }
    let sup_abs_b = best.0.max(field.flux(0.5 * (a + c)).abs()).max(alpha.abs());
    // flux cancelling to round-off is zero flux; otherwise the exterior
    // behaviour r^{+-alpha} degenerates instead of switching to log r
    if alpha.abs() <= 1e-12 * best.0.max(1.0) {
        alpha = 0.0;
    }
    let rho = (alpha - alpha.round()).abs();
    let n0 = (2.0 * sup_abs_b).floor() as i64 + 1;
    FluxProfile { field: Arc::new(field.clone()), alpha, sup_abs_b, rho, n0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "beta")]
pub enum Variant {
    Magnetic,
    Comparison,
    FreeBeta(f64),
    Screened,
}

/// One angular sector with its radial potential `V(r) = N(r)/r^2`.
#[derive(Debug, Clone)]
pub struct ModeSpec {
    pub m: i64,
    pub variant: Variant,
    flux: FluxProfile,
}

impl ModeSpec {
    /// Numerator `N(r) = r^2 V(r)`.
    pub fn numerator(&self, r: f64) -> f64 {
        let m = self.m as f64;
        match self.variant {
            Variant::Magnetic => {
                let s = self.flux.b(r) + m;
                s * s
            }
            Variant::Comparison => {
                let b = self.flux.b(r);
                b * b + m * m
            }
            Variant::FreeBeta(beta) => beta * beta,
            Variant::Screened => {
                if r > self.flux.support_radius() {
                    let s = self.flux.alpha + m;
                    s * s
                } else {
                    0.0
                }
            }
        }
    }

    pub fn potential(&self, r: f64) -> f64 {
        self.numerator(r) / (r * r)
    }

    /// `sqrt(N(0))`: the order of the regular solution at the origin.
    pub fn origin_order(&self) -> f64 {
        self.numerator(0.0).sqrt()
    }

    pub fn flux(&self) -> &FluxProfile {
        &self.flux
    }
}

pub fn mode_potential(flux: &FluxProfile, m: i64, variant: Variant) -> ModeSpec {
    let variant = match variant {
        Variant::FreeBeta(b) => Variant::FreeBeta(b.abs()),
        v => v,
    };
    ModeSpec { m, variant, flux: flux.clone() }
}
