//! Assembly of the two-dimensional kernel from per-mode kernels with a
//! certified bound on the dropped modes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exactkern::{mode_kernel_unchecked, ratio_tail, KernelPoint};
use crate::field::{mode_potential, FluxProfile, Variant};
use crate::radial::{discretize_mode, GridPolicy, KernelColumn, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorTag {
    /// the magnetic operator `H_B`
    Magnetic,
    /// the non-magnetic comparison operator with potential `b(|x|)^2/|x|^2`
    Comparison,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelEvaluation {
    pub point: KernelPoint,
    pub value: Complex64,
    pub modes_used: usize,
    pub tail_bound: f64,
    pub operator_tag: OperatorTag,
    pub grid_n: usize,
    pub r_max: f64,
}

pub const MAX_MODES: usize = 512;

/// Kernel assembler for one field.
#[derive(Debug, Clone)]
pub struct Assembler {
    flux: FluxProfile,
    pub policy: GridPolicy,
    pub max_modes: usize,
    /// use the closed-form Bessel modes when the field vanishes identically
    pub exact_free: bool,
}

/// Per-mode kernel data for a fixed time and source radius.
pub struct KernelSlice {
    pub t: f64,
    pub r_src: f64,
    pub tag: OperatorTag,
    pub grid: RadialGrid,
    /// number of numerically computed modes on each side
    pub modes_used: usize,
    tails: Vec<(f64, f64)>,
    // columns for m = -M..=M (magnetic) or m = 0..=M (comparison)
    cols: Vec<ModeColumn>,
}

/// One mode's kernel as a function of the target radius.
enum ModeColumn {
    Grid(KernelColumn),
    /// closed-form free mode of order `|m|`, used for the identically zero field
    Exact { order: f64, r_src: f64, t: f64, grid: RadialGrid },
}

impl ModeColumn {
    fn eval(&self, r: f64) -> f64 {
        match self {
            ModeColumn::Grid(c) => c.eval(r),
            ModeColumn::Exact { order, r_src, t, .. } => free_mode(*order, r, *r_src, *t),
        }
    }

    fn at_node(&self, k: usize) -> f64 {
        match self {
            ModeColumn::Grid(c) => c.at_node(k),
            ModeColumn::Exact { grid, .. } => self.eval(grid.node(k)),
        }
    }
}

fn free_mode(order: f64, r: f64, rp: f64, t: f64) -> f64 {
    if r * rp == 0.0 {
        return if order == 0.0 { (-(r * r + rp * rp) / (4.0 * t)).exp() / (2.0 * t) } else { 0.0 };
    }
    mode_kernel_unchecked(order, r, rp, t)
}

/// `k(t, x, x)` for every grid node `|x| = r_k`.
#[derive(Debug, Clone)]
pub struct DiagonalSlice {
    pub t: f64,
    pub grid: RadialGrid,
    pub modes_used: usize,
    pub values: Vec<f64>,
    /// certified bound on the dropped modes, per node
    pub tail_bounds: Vec<f64>,
    /// per-mode diagonals for `m = -M..=M`
    pub per_mode: Vec<Vec<f64>>,
}

impl Assembler {
    pub fn new(flux: FluxProfile) -> Self {
        Self { flux, policy: GridPolicy::default(), max_modes: MAX_MODES, exact_free: true }
    }

    pub fn with_policy(flux: FluxProfile, policy: GridPolicy) -> Self {
        Self { flux, policy, max_modes: MAX_MODES, exact_free: true }
    }

    pub fn flux(&self) -> &FluxProfile {
        &self.flux
    }

    fn uses_exact_modes(&self) -> bool {
        self.exact_free && self.flux.is_zero()
    }

    /// Lower bound on `sqrt(N_m(r))` over all `r` used by the tail majorant.
    fn majorant_order(&self, m: usize, tag: OperatorTag) -> f64 {
        match tag {
            OperatorTag::Magnetic => (m as f64 - self.flux.sup_abs_b).max(0.0),
            OperatorTag::Comparison => m as f64,
        }
    }

    /// `(2 pi)^{-1} sum_{|m| > M} p_m(r, r', t)` bound for every `M`, as a suffix table.
    fn tail_table(&self, r: f64, rp: f64, t: f64, tag: OperatorTag) -> Vec<f64> {
        let z = r * rp / (2.0 * t);
        let gauss = (-(r - rp).powi(2) / (4.0 * t)).exp() / (2.0 * t);
        let mut terms = Vec::new();
        let mut k = 0usize;
        let closing;
        loop {
            let nu = self.majorant_order(k, tag);
            let v = if z == 0.0 {
                if nu == 0.0 {
                    gauss
                } else {
                    0.0
                }
            } else {
                mode_kernel_unchecked(nu, r, rp, t)
            };
            terms.push(v);
            k += 1;
            let nu_next = self.majorant_order(k, tag);
            let rest = if z == 0.0 { 0.0 } else { gauss * ratio_tail(nu_next, z) };
            if k > 2 && (rest <= 1e-300 || rest <= 1e-20 * terms[0]) {
                closing = rest;
                break;
            }
            if k > 4 * self.max_modes + 64 {
                closing = rest;
                break;
            }
        }
        // suffix[M] = bound on modes |m| > M (both signs), scaled by 1/2pi
        let kk = terms.len();
        let mut suffix = vec![0.0; kk];
        let mut acc = closing;
        for m in (0..kk).rev() {
            suffix[m] = acc * 2.0 / (2.0 * PI);
            acc += terms[m];
        }
        suffix
    }

    /// Smallest admissible `M` and the resulting tail bound at `(r, r')`.
    fn choose_modes(&self, r: f64, rp: f64, t: f64, tag: OperatorTag, tol: f64) -> Result<(usize, f64)> {
        let suffix = self.tail_table(r, rp, t, tag);
        let n0 = self.flux.n0.max(0) as usize;
        for (m, &b) in suffix.iter().enumerate() {
            if m >= n0 && b <= tol {
                if m > self.max_modes {
                    return Err(Error::Convergence { achieved: b, modes: m });
                }
                return Ok((m, b));
            }
        }
        let m = suffix.len().min(self.max_modes);
        Err(Error::Convergence { achieved: suffix[m.min(suffix.len() - 1)], modes: m })
    }

    fn variant(tag: OperatorTag) -> Variant {
        match tag {
            OperatorTag::Magnetic => Variant::Magnetic,
            OperatorTag::Comparison => Variant::Comparison,
        }
    }

    fn mode_range(tag: OperatorTag, m_max: usize) -> Vec<i64> {
        match tag {
            OperatorTag::Magnetic => (-(m_max as i64)..=m_max as i64).collect(),
            OperatorTag::Comparison => (0..=m_max as i64).collect(),
        }
    }

    /// Per-mode columns at source radius `r_src` good for every target in `targets`.
    pub fn slice(&self, t: f64, r_src: f64, targets: &[f64], tag: OperatorTag, tol: f64) -> Result<KernelSlice> {
        if !(tol > 0.0) {
            return domain(format!("tol must be positive, got {tol}"));
        }
        let r_q = targets.iter().cloned().fold(r_src, f64::max);
        let grid = self.policy.grid(self.flux.support_radius(), r_q, t, t)?;
        let mut m_max = 0;
        let mut tails = Vec::with_capacity(targets.len());
        for &r in targets {
            let (m, b) = self.choose_modes(r, r_src, t, tag, tol)?;
            m_max = m_max.max(m);
            tails.push((r, b));
        }
        // tail bounds at the common M
        for tb in tails.iter_mut() {
            let suffix = self.tail_table(tb.0, r_src, t, tag);
            tb.1 = suffix.get(m_max).cloned().unwrap_or(0.0);
        }
        let variant = Self::variant(tag);
        let modes = Self::mode_range(tag, m_max);
        let exact = self.uses_exact_modes();
        let cols: Result<Vec<_>> = modes
            .par_iter()
            .map(|&m| {
                if exact {
                    return Ok(ModeColumn::Exact { order: m.unsigned_abs() as f64, r_src, t, grid });
                }
                let dm = discretize_mode(&mode_potential(&self.flux, m, variant), &grid)?;
                Ok(ModeColumn::Grid(dm.propagator(t).column(r_src)))
            })
            .collect();
        Ok(KernelSlice { t, r_src, tag, grid, modes_used: m_max, tails, cols: cols? })
    }

    pub fn full_kernel(&self, p: &KernelPoint, tag: OperatorTag, tol: f64) -> Result<KernelEvaluation> {
        let s = self.slice(p.t, p.r_prime, &[p.r], tag, tol)?;
        Ok(s.evaluation(p.r, p.dtheta))
    }

    /// `k(t, x, x)` at every node with `r_k <= r_diag_max`, plus per-mode diagonals.
    pub fn diagonal(&self, t: f64, r_diag_max: f64, tag: OperatorTag, tol: f64) -> Result<DiagonalSlice> {
        let grid = self.policy.grid(self.flux.support_radius(), r_diag_max, t, t)?;
        let (m_max, _) = self.choose_modes(r_diag_max, r_diag_max, t, tag, tol)?;
        let variant = Self::variant(tag);
        let modes = Self::mode_range(tag, m_max);
        let exact = self.uses_exact_modes();
        let per_mode: Result<Vec<Vec<f64>>> = modes
            .par_iter()
            .map(|&m| {
                if exact {
                    let order = m.unsigned_abs() as f64;
                    return Ok((0..grid.n).map(|k| free_mode(order, grid.node(k), grid.node(k), t)).collect());
                }
                let dm = discretize_mode(&mode_potential(&self.flux, m, variant), &grid)?;
                Ok(dm.propagator(t).diagonal())
            })
            .collect();
        let per_mode = per_mode?;
        let n = grid.n;
        let mut values = vec![0.0; n];
        for k in 0..n {
            values[k] = sum_modes(tag, &per_mode, |col| col[k], 0.0).re / (2.0 * PI);
        }
        let tail_bounds = (0..n)
            .map(|k| {
                let r = grid.node(k);
                if r > r_diag_max {
                    f64::NAN
                } else {
                    self.tail_table(r, r, t, tag).get(m_max).cloned().unwrap_or(0.0)
                }
            })
            .collect();
        Ok(DiagonalSlice { t, grid, modes_used: m_max, values, tail_bounds, per_mode })
    }

    /// `e^{-tA}(x, y) / p_0(r, r', t)` with both factors from the same grid,
    /// normalized so that it tends to 1 as `t -> infinity`.
    pub fn mode_zero_dominance_ratio(&self, p: &KernelPoint, tol: f64) -> Result<f64> {
        if !(self.flux.alpha.abs() < 1.0) {
            return domain(format!("dominance ratio needs |alpha| < 1, got {}", self.flux.alpha));
        }
        let s = self.slice(p.t, p.r_prime, &[p.r], OperatorTag::Comparison, tol)?;
        let full = s.eval(p.r, p.dtheta).re;
        let p0 = s.mode_value(0, p.r);
        if !(p0 > 0.0) {
            return Err(Error::Numerical(format!("mode-zero kernel {p0:e} is not positive")));
        }
        Ok(2.0 * PI * full / p0)
    }
}

// Deterministic reduction: m = 0, then (+1, -1), (+2, -2), ...
fn sum_modes<T, F: Fn(&T) -> f64>(tag: OperatorTag, cols: &[T], f: F, dtheta: f64) -> Complex64 {
    match tag {
        OperatorTag::Magnetic => {
            let m_max = (cols.len() - 1) / 2;
            let mut acc = Complex64::new(f(&cols[m_max]), 0.0);
            for m in 1..=m_max {
                let pos = f(&cols[m_max + m]);
                let neg = f(&cols[m_max - m]);
                let (s, c) = (m as f64 * dtheta).sin_cos();
                acc += Complex64::new((pos + neg) * c, (pos - neg) * s);
            }
            acc
        }
        OperatorTag::Comparison => {
            let mut acc = f(&cols[0]);
            for (m, col) in cols.iter().enumerate().skip(1) {
                acc += 2.0 * f(col) * (m as f64 * dtheta).cos();
            }
            Complex64::new(acc, 0.0)
        }
    }
}

impl KernelSlice {
    /// Kernel value `k(t, x, y)` with `|x| = r`, `|y| = r_src`.
    pub fn eval(&self, r: f64, dtheta: f64) -> Complex64 {
        sum_modes(self.tag, &self.cols, |c| c.eval(r), dtheta) / (2.0 * PI)
    }

    /// `p_m(r, r_src, t)`.
    pub fn mode_value(&self, m: i64, r: f64) -> f64 {
        let idx = match self.tag {
            OperatorTag::Magnetic => (m + self.modes_used as i64) as usize,
            OperatorTag::Comparison => m.unsigned_abs() as usize,
        };
        self.cols[idx].eval(r)
    }

    /// Kernel at node `k`, `dtheta = 0`.
    pub fn eval_node(&self, k: usize) -> f64 {
        sum_modes(self.tag, &self.cols, |c| c.at_node(k), 0.0).re / (2.0 * PI)
    }

    pub fn tail_bound(&self, r: f64) -> f64 {
        self.tails.iter().find(|tb| tb.0 == r).map(|tb| tb.1).unwrap_or(f64::NAN)
    }

    pub fn evaluation(&self, r: f64, dtheta: f64) -> KernelEvaluation {
        KernelEvaluation {
            point: KernelPoint { r, r_prime: self.r_src, dtheta, t: self.t },
            value: self.eval(r, dtheta),
            modes_used: self.modes_used,
            tail_bound: self.tail_bound(r),
            operator_tag: self.tag,
            grid_n: self.grid.n,
            r_max: self.grid.r_max,
        }
    }
}
