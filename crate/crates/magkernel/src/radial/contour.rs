//! `exp(-tT)` for symmetric tridiagonal `T >= 0` by Talbot-contour quadrature of
//! the resolvent. Each of the `N/2` conjugate-paired nodes costs one complex
//! tridiagonal solve, so applying the semigroup is O(n) at any time `t`.

use num_complex::Complex64;

const TALBOT_N: usize = 24;
const SIGMA: f64 = -0.6122;
const MU: f64 = 0.5017;
const NU: f64 = 0.6407;
const BETA: f64 = 0.2645;

/// Contour node `z_k` and weight `w_k = exp(z_k) z'_k` for the upper half.
fn talbot_nodes() -> [(Complex64, Complex64); TALBOT_N / 2] {
    let n = TALBOT_N as f64;
    let mut out = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); TALBOT_N / 2];
    for (j, slot) in out.iter_mut().enumerate() {
        let k = TALBOT_N / 2 + j;
        let th = -std::f64::consts::PI + (k as f64 + 0.5) * 2.0 * std::f64::consts::PI / n;
        let cot = 1.0 / (NU * th).tan();
        let z = n * Complex64::new(SIGMA + MU * th * cot, BETA * th);
        let sin = (NU * th).sin();
        let dz = n * Complex64::new(MU * cot - MU * NU * th / (sin * sin), BETA);
        *slot = (z, z.exp() * dz);
    }
    out
}

/// LU factors of `s I + T` for every contour node at a fixed time.
pub struct SemigroupFactor {
    t: f64,
    diag: Vec<f64>,
    off: Vec<f64>,
    weights: Vec<Complex64>,
    shifts: Vec<Complex64>,
    // per node: reciprocal pivots and upper multipliers
    inv_piv: Vec<Vec<Complex64>>,
    upper: Vec<Vec<Complex64>>,
}

impl SemigroupFactor {
    pub fn new(diag: &[f64], off: &[f64], t: f64) -> Self {
        let n = diag.len();
        let nodes = talbot_nodes();
        let mut inv_piv = Vec::with_capacity(nodes.len());
        let mut upper = Vec::with_capacity(nodes.len());
        let mut shifts = Vec::with_capacity(nodes.len());
        let mut weights = Vec::with_capacity(nodes.len());
        for &(z, w) in nodes.iter() {
            let s = z / t;
            let mut ip = vec![Complex64::new(0.0, 0.0); n];
            let mut up = vec![Complex64::new(0.0, 0.0); n];
            let mut prev_c = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let mut piv = s + diag[k];
                if k > 0 {
                    piv -= off[k - 1] * prev_c;
                }
                let inv = piv.inv();
                ip[k] = inv;
                if k + 1 < n {
                    prev_c = off[k] * inv;
                    up[k] = prev_c;
                }
            }
            inv_piv.push(ip);
            upper.push(up);
            shifts.push(s);
            weights.push(w);
        }
        Self { t, diag: diag.to_vec(), off: off.to_vec(), weights, shifts, inv_piv, upper }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// `exp(-tT) b` for a right-hand side supported on `[lo, lo + b.len())`.
    pub fn apply_local(&self, lo: usize, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let scale = 2.0 / (TALBOT_N as f64 * self.t);
        let mut out = vec![0.0; n];
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..self.shifts.len() {
            let ip = &self.inv_piv[j];
            let up = &self.upper[j];
            // forward: y_k = (b_k - off_{k-1} y_{k-1}) / piv_k ; zero until lo
            let mut prev = Complex64::new(0.0, 0.0);
            for k in lo..n {
                let bk = if k - lo < b.len() { b[k - lo] } else { 0.0 };
                let mut v = Complex64::new(bk, 0.0);
                if k > lo {
                    v -= self.off[k - 1] * prev;
                }
                prev = v * ip[k];
                y[k] = prev;
            }
            // backward: x_k = y_k - c_k x_{k+1}
            let mut next = Complex64::new(0.0, 0.0);
            let w = self.weights[j];
            for k in (0..n).rev() {
                let yk = if k >= lo { y[k] } else { Complex64::new(0.0, 0.0) };
                let x = if k + 1 < n { yk - up[k] * next } else { yk };
                next = x;
                out[k] += (w * x).im;
            }
        }
        for v in out.iter_mut() {
            *v *= scale;
        }
        out
    }

    /// Diagonal of `exp(-tT)` from forward/backward pivot sweeps.
    pub fn diagonal(&self) -> Vec<f64> {
        let n = self.len();
        let scale = 2.0 / (TALBOT_N as f64 * self.t);
        let mut out = vec![0.0; n];
        let mut right = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..self.shifts.len() {
            let s = self.shifts[j];
            let ip = &self.inv_piv[j];
            // right pivots R_i = a_i - off_i^2 / R_{i+1}
            right[n - 1] = s + self.diag[n - 1];
            for k in (0..n - 1).rev() {
                right[k] = s + self.diag[k] - self.off[k] * self.off[k] / right[k + 1];
            }
            let w = self.weights[j];
            for k in 0..n {
                let a = s + self.diag[k];
                let g = (ip[k].inv() + right[k] - a).inv();
                out[k] += (w * g).im;
            }
        }
        for v in out.iter_mut() {
            *v *= scale;
        }
        out
    }
}
