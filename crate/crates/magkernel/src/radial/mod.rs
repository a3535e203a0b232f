//! Per-mode radial semigroups, the ground state of the comparison operator and
//! the `psi_m` comparison functions.

mod contour;
mod discretize;
pub mod eigen;
mod grid;
mod ground;
mod psi;

pub use contour::SemigroupFactor;
pub use discretize::{discretize_mode, DiscreteMode, KernelColumn, ModePropagator, ModeSpectrum};
pub use grid::{GridPolicy, RadialGrid, MIN_NODES};
pub use ground::{ground_state, ExteriorFit, GroundState, FIT_TOLERANCE};
pub use psi::psi_comparison;

use serde::Serialize;

use crate::error::{domain, Result};

/// Dense per-mode kernel `p_m(r_i, r_j, t)` on grid nodes for several times.
#[derive(Debug, Clone, Serialize)]
pub struct ModeKernelTable {
    pub m: i64,
    pub times: Vec<f64>,
    pub nodes: Vec<f64>,
    /// one row-major `n x n` block per time
    pub values: Vec<Vec<f64>>,
    /// kernel is expressed in the measure `r dr` (the `r^gamma / sqrt(M)` factors are applied)
    pub back_transform: bool,
    /// most negative raw entry before clamping
    pub min_raw: f64,
    pub clamped: usize,
}

impl ModeKernelTable {
    pub fn get(&self, time_index: usize, i: usize, j: usize) -> f64 {
        self.values[time_index][i * self.nodes.len() + j]
    }
}

/// Nodes at or below this count use a full eigendecomposition; larger grids
/// assemble the table column by column from the contour propagator.
pub const EIGEN_TABLE_LIMIT: usize = 1024;
pub const TABLE_MAX_NODES: usize = 8192;
const NEG_TOL: f64 = 1e-9;

pub fn mode_heat_kernel(dm: &DiscreteMode, times: &[f64]) -> Result<ModeKernelTable> {
    let n = dm.grid.n;
    if n > TABLE_MAX_NODES {
        return domain(format!("dense kernel tables are limited to {TABLE_MAX_NODES} nodes, got {n}"));
    }
    if times.iter().any(|&t| !(t > 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return domain("times must be positive and sorted");
    }
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(times.len());
    if n <= EIGEN_TABLE_LIMIT {
        let (lam, vecs) = eigen::tridiag_eigen(&dm.diag, &dm.off, true)?;
        let vecs = vecs.expect("vectors requested");
        let floor = 1e-10 * dm.diag.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if lam[0] < -floor {
            return Err(crate::Error::Numerical(format!("eigenvalue {:e} below floor", lam[0])));
        }
        for &t in times {
            let mut block = vec![0.0; n * n];
            for (k, &l) in lam.iter().enumerate() {
                let f = (-t * l.max(0.0)).exp();
                if f == 0.0 {
                    continue;
                }
                let v = &vecs[k * n..(k + 1) * n];
                for i in 0..n {
                    let fi = f * v[i];
                    let row = &mut block[i * n..(i + 1) * n];
                    for j in 0..n {
                        row[j] += fi * v[j];
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    block[i * n + j] *= dm.node_scale(i) * dm.node_scale(j);
                }
            }
            values.push(block);
        }
    } else {
        for &t in times {
            values.push(dm.propagator(t).matrix());
        }
    }
    let mut min_raw = 0.0f64;
    let mut clamped = 0;
    for block in values.iter_mut() {
        // symmetrize and clamp spectral noise
        for i in 0..n {
            for j in i + 1..n {
                let a = 0.5 * (block[i * n + j] + block[j * n + i]);
                block[i * n + j] = a;
                block[j * n + i] = a;
            }
        }
        for v in block.iter_mut() {
            if *v < 0.0 {
                min_raw = min_raw.min(*v);
                clamped += 1;
                *v = 0.0;
            }
        }
    }
    if min_raw < -NEG_TOL {
        return Err(crate::Error::Numerical(format!("kernel entry {min_raw:e} below -{NEG_TOL:e}")));
    }
    Ok(ModeKernelTable {
        m: dm.mode.m,
        times: times.to_vec(),
        nodes: dm.grid.nodes(),
        values,
        back_transform: true,
        min_raw,
        clamped,
    })
}
