use serde::Serialize;

use super::contour::SemigroupFactor;
use super::eigen::tridiag_eigen;
use super::grid::RadialGrid;
use crate::error::{Error, Result};
use crate::field::ModeSpec;

/// Finite-volume discretization of one radial mode operator
/// `-(1/r)(r f')' + N(r)/r^2 f` in the measure `r dr`.
///
/// The unknown is factored as `f = r^gamma g` with `gamma` the fractional part of
/// `sqrt(N(0))`, which makes `g` smooth at the origin. The quadratic form becomes
/// `int g'^2 r^{2gamma+1} dr + int (N - gamma^2) r^{2gamma-1} g^2 dr`; with cell
/// masses `M_k = int_cell r^{2gamma+1}` the symmetrized matrix
/// `M^{-1/2} K M^{-1/2}` is tridiagonal, symmetric and an M-matrix, so the
/// discrete semigroup is positivity preserving.
#[derive(Debug, Clone)]
pub struct DiscreteMode {
    pub mode: ModeSpec,
    pub grid: RadialGrid,
    pub gamma: f64,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    pub mass: Vec<f64>,
    /// `r_k^gamma / sqrt(M_k)` at each node
    node_scale: Vec<f64>,
    /// whether the regular solution vanishes at the origin
    vanishes_at_origin: bool,
}

/// Eigenvalues of a discretized mode, floored at zero.
#[derive(Debug, Clone, Serialize)]
pub struct ModeSpectrum {
    pub values: Vec<f64>,
    /// most negative raw eigenvalue before clamping (0 if none)
    pub min_raw: f64,
    pub clamped: usize,
}

pub fn discretize_mode(mode: &ModeSpec, grid: &RadialGrid) -> Result<DiscreteMode> {
    let n = grid.n;
    let h = grid.h;
    let nu0 = mode.origin_order();
    let gamma = nu0.fract();
    let p = 2.0 * gamma + 2.0;
    let face_pow = |j: usize| -> f64 { (j as f64 * h).powf(p) };
    let mut mass = Vec::with_capacity(n);
    for k in 0..n {
        mass.push((face_pow(k + 1) - face_pow(k)) / p);
    }
    // face weights r^{2 gamma + 1} at k h, k = 0..=n; face 0 is the origin
    let w: Vec<f64> = (0..=n).map(|j| (j as f64 * h).powf(2.0 * gamma + 1.0)).collect();
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        let r = grid.node(k);
        let num = mode.numerator(r) - gamma * gamma;
        if !num.is_finite() {
            return Err(Error::Discretization(format!("non-finite potential at r = {r}")));
        }
        let pot = num.max(0.0) * r.powf(2.0 * gamma - 1.0) * h;
        diag.push(((w[k] + w[k + 1]) / h + pot) / mass[k]);
    }
    let off: Vec<f64> = (0..n - 1).map(|k| -w[k + 1] / (h * (mass[k] * mass[k + 1]).sqrt())).collect();
    let node_scale = (0..n).map(|k| grid.node(k).powf(gamma) / mass[k].sqrt()).collect();
    Ok(DiscreteMode {
        mode: mode.clone(),
        grid: *grid,
        gamma,
        diag,
        off,
        mass,
        node_scale,
        vanishes_at_origin: nu0 > 0.0,
    })
}

/// `exp(-tT)` applied to point sources for one mode at one time.
pub struct ModePropagator<'a> {
    dm: &'a DiscreteMode,
    factor: SemigroupFactor,
}

/// `p(r_i, r_src, t)` at every node, ready for interpolation in `r`.
#[derive(Debug, Clone)]
pub struct KernelColumn {
    // values of E b / sqrt(M) at nodes (g-space), to be scaled by r^gamma
    g: Vec<f64>,
    src_scale: f64,
    gamma: f64,
    grid: RadialGrid,
    vanishes_at_origin: bool,
}

impl KernelColumn {
    /// Kernel value `p(r, r_src, t)`.
    pub fn eval(&self, r: f64) -> f64 {
        if self.src_scale == 0.0 || (r == 0.0 && self.vanishes_at_origin) {
            return 0.0;
        }
        if r >= self.grid.r_max {
            return 0.0;
        }
        let (i0, w) = self.grid.stencil(r);
        let g: f64 = (0..4).map(|j| w[j] * self.g[i0 + j]).sum();
        g * r.powf(self.gamma) * self.src_scale
    }

    /// Kernel value at node `k`.
    pub fn at_node(&self, k: usize) -> f64 {
        self.g[k] * self.grid.node(k).powf(self.gamma) * self.src_scale
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }
}

impl DiscreteMode {
    pub fn propagator(&self, t: f64) -> ModePropagator<'_> {
        ModePropagator { dm: self, factor: SemigroupFactor::new(&self.diag, &self.off, t) }
    }

    /// Spectrum of the symmetric matrix, floor-clamped at 0 within `1e-10 * scale`.
    pub fn spectrum(&self) -> Result<ModeSpectrum> {
        let (vals, _) = tridiag_eigen(&self.diag, &self.off, false)?;
        let scale = self.diag.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let floor = 1e-10 * scale;
        let min_raw = vals.iter().cloned().fold(0.0f64, f64::min);
        if min_raw < -floor {
            return Err(Error::Numerical(format!(
                "eigenvalue {min_raw:e} below floor {:e} (diag scale {scale:e})",
                -floor
            )));
        }
        let clamped = vals.iter().filter(|&&v| v < 0.0).count();
        Ok(ModeSpectrum { values: vals.into_iter().map(|v| v.max(0.0)).collect(), min_raw, clamped })
    }

    /// `r^gamma / sqrt(M)` at nodes; maps g-space values to kernel values.
    pub fn node_scale(&self, k: usize) -> f64 {
        self.node_scale[k]
    }
}

impl<'a> ModePropagator<'a> {
    /// Column `p(., r_src, t)`.
    pub fn column(&self, r_src: f64) -> KernelColumn {
        let dm = self.dm;
        let grid = dm.grid;
        let zero = || KernelColumn {
            g: vec![0.0; grid.n],
            src_scale: 0.0,
            gamma: dm.gamma,
            grid,
            vanishes_at_origin: dm.vanishes_at_origin,
        };
        if (r_src == 0.0 && dm.vanishes_at_origin) || r_src >= grid.r_max {
            return zero();
        }
        let (i0, w) = grid.stencil(r_src);
        let b: Vec<f64> = (0..4).map(|j| w[j] / dm.mass[i0 + j].sqrt()).collect();
        let mut g = self.factor.apply_local(i0, &b);
        for (k, v) in g.iter_mut().enumerate() {
            *v /= dm.mass[k].sqrt();
        }
        KernelColumn {
            g,
            src_scale: r_src.powf(dm.gamma),
            gamma: dm.gamma,
            grid,
            vanishes_at_origin: dm.vanishes_at_origin,
        }
    }

    /// `p(r_k, r_k, t)` at every node.
    pub fn diagonal(&self) -> Vec<f64> {
        let d = self.factor.diagonal();
        d.iter().enumerate().map(|(k, v)| v * self.dm.node_scale[k].powi(2)).collect()
    }

    /// Full discrete kernel `p(r_i, r_j, t)` (row-major, symmetric).
    pub fn matrix(&self) -> Vec<f64> {
        let n = self.dm.grid.n;
        let mut out = vec![0.0; n * n];
        for j in 0..n {
            let col = self.factor.apply_local(j, &[1.0]);
            for i in 0..n {
                out[i * n + j] = col[i] * self.dm.node_scale[i] * self.dm.node_scale[j];
            }
        }
        out
    }
}
