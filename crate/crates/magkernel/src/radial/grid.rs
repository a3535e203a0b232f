use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Uniform cell-centred radial grid on `(0, r_max)`.
///
/// Nodes sit at `(k - 1/2) h` for `k = 1..=n` with `h = r_max / (n + 1/2)`, so the
/// outermost (ghost) node lands on `r_max` where the Dirichlet condition holds.
/// The cell faces are `k h`; the first face is the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_max: f64,
    pub n: usize,
    pub h: f64,
}

pub const MIN_NODES: usize = 64;

impl RadialGrid {
    pub fn new(r_max: f64, n: usize) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return domain(format!("r_max must be positive, got {r_max}"));
        }
        if n < MIN_NODES {
            return domain(format!("grid needs at least {MIN_NODES} nodes, got {n}"));
        }
        Ok(Self { r_max, n, h: r_max / (n as f64 + 0.5) })
    }

    /// Node `k` (0-based).
    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.node(k)).collect()
    }

    /// Cubic Lagrange stencil `(first node, weights)` for evaluation at `r`.
    pub fn stencil(&self, r: f64) -> (usize, [f64; 4]) {
        let x = r / self.h - 0.5;
        let i0 = (x.floor() as i64 - 1).clamp(0, self.n as i64 - 4) as usize;
        let u = x - i0 as f64;
        let w = [
            -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0,
            u * (u - 2.0) * (u - 3.0) / 2.0,
            -u * (u - 1.0) * (u - 3.0) / 2.0,
            u * (u - 1.0) * (u - 2.0) / 6.0,
        ];
        (i0, w)
    }
}

/// Chooses a grid for kernel evaluation at radii up to `r_query` and times in
/// `[t_min, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPolicy {
    /// Largest allowed spacing in units of the field support radius.
    pub h_over_support: f64,
    /// Spacing must resolve `sqrt(t_min)` with this many nodes.
    pub nodes_per_diffusion_length: f64,
    /// `r_max >= truncation_sigmas * sqrt(t_max)`.
    pub truncation_sigmas: f64,
    /// `r_max >= support_factor * (r_query + R)`.
    pub support_factor: f64,
    /// Fixed grid overriding the rules above.
    pub fixed: Option<(usize, f64)>,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            h_over_support: 0.05,
            nodes_per_diffusion_length: 8.0,
            truncation_sigmas: 8.0,
            support_factor: 4.0,
            fixed: None,
        }
    }
}

impl GridPolicy {
    pub fn fixed(n: usize, r_max: f64) -> Self {
        Self { fixed: Some((n, r_max)), ..Self::default() }
    }

    pub fn grid(&self, support_radius: f64, r_query: f64, t_min: f64, t_max: f64) -> Result<RadialGrid> {
        if let Some((n, r_max)) = self.fixed {
            return RadialGrid::new(r_max, n);
        }
        let r_max = (self.support_factor * (r_query + support_radius)).max(self.truncation_sigmas * t_max.sqrt());
        let h = (self.h_over_support * support_radius).min(t_min.sqrt() / self.nodes_per_diffusion_length);
        let n = ((r_max / h - 0.5).ceil() as usize).max(MIN_NODES);
        RadialGrid::new(r_max, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_reproduces_cubics() {
        let g = RadialGrid::new(10.0, 100).unwrap();
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        for &r in &[0.0, 0.01, 0.33, 5.0, 9.9] {
            let (i0, w) = g.stencil(r);
            let v: f64 = (0..4).map(|j| w[j] * f(g.node(i0 + j))).sum();
            assert!((v - f(r)).abs() < 1e-10, "r={r}");
        }
    }

    #[test]
    fn policy_sizes() {
        let p = GridPolicy::default();
        let g = p.grid(1.0, 2.0, 1.0, 1.0).unwrap();
        assert!(g.r_max >= 12.0 && g.h <= 0.05 + 1e-12);
        let g = p.grid(1.0, 2.0, 1e4, 1e4).unwrap();
        assert!((g.r_max - 800.0).abs() < 1e-9);
    }
}
