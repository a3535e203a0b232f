use serde::Serialize;

use crate::error::{domain, Result};
use crate::quad::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MazyaReport {
    /// `None` when the supremum is infinite
    pub supremum: Option<f64>,
    pub infinite: bool,
    pub argmax_r: f64,
}

/// Decades of extension used to decide whether `int_r^inf nu^{-1/(p-1)}` converges.
const MAX_DECADES: usize = 40;

/// `sup_r (int_0^r mu)^{1/q} (int_r^inf nu^{-1/(p-1)})^{(p-1)/p}` over `r_grid`.
/// `q = inf` is passed as `f64::INFINITY`; `p = 1` uses `ess sup_{x>r} 1/nu`.
pub fn mazya_condition<M, N>(mu: M, nu: N, p: f64, q: f64, r_grid: &[f64]) -> Result<MazyaReport>
where
    M: Fn(f64) -> f64,
    N: Fn(f64) -> f64,
{
    if !(p >= 1.0) || !(q >= p) {
        return domain(format!("need 1 <= p <= q, got p = {p}, q = {q}"));
    }
    if r_grid.is_empty() || r_grid.iter().any(|&r| !(r > 0.0)) {
        return domain("r_grid must be nonempty and positive");
    }
    let mut grid = r_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut best = 0.0f64;
    let mut arg = grid[0];
    let mut mu_int = 0.0;
    let mut prev = 0.0;
    for &r in &grid {
        mu_int += integrate(&mu, prev, r, 1e-14, 1e-11).value;
        prev = r;
        let first = if q.is_infinite() { if mu_int > 0.0 { 1.0 } else { 0.0 } } else { mu_int.powf(1.0 / q) };
        let second = match tail_factor(&nu, p, r) {
            Some(v) => v,
            None => {
                if first > 0.0 {
                    return Ok(MazyaReport { supremum: None, infinite: true, argmax_r: r });
                }
                0.0
            }
        };
        let v = first * second;
        if v > best {
            best = v;
            arg = r;
        }
    }
    // grid extension: the running value must not keep growing
    let last = *grid.last().unwrap();
    let mut ext = vec![];
    let mut x = last;
    for _ in 0..8 {
        x *= 10.0;
        ext.push(x);
    }
    let mut running = best;
    let mut growth_steps = 0;
    let mut prev_r = last;
    let mut prev_v = best;
    for &r in &ext {
        mu_int += integrate(&mu, prev_r, r, 1e-14, 1e-11).value;
        prev_r = r;
        let first = if q.is_infinite() { if mu_int > 0.0 { 1.0 } else { 0.0 } } else { mu_int.powf(1.0 / q) };
        let second = tail_factor(&nu, p, r).unwrap_or(f64::INFINITY);
        let v = first * second;
        if !v.is_finite() {
            return Ok(MazyaReport { supremum: None, infinite: true, argmax_r: r });
        }
        if v > prev_v * 1.05 && v > running {
            growth_steps += 1;
        }
        prev_v = v;
        running = running.max(v);
    }
    if growth_steps >= 6 {
        return Ok(MazyaReport { supremum: None, infinite: true, argmax_r: *ext.last().unwrap() });
    }
    Ok(MazyaReport { supremum: Some(best), infinite: false, argmax_r: arg })
}

// (int_r^inf nu^{-1/(p-1)})^{(p-1)/p}, or None when the integral diverges
fn tail_factor<N: Fn(f64) -> f64>(nu: &N, p: f64, r: f64) -> Option<f64> {
    if p == 1.0 {
        // ess sup of 1/nu on [r, inf), sampled log-uniformly
        let mut s = 0.0f64;
        for i in 0..=400 {
            let x = r * 10f64.powf(i as f64 * 0.05);
            let v = nu(x);
            if v <= 0.0 {
                return None;
            }
            s = s.max(1.0 / v);
        }
        return Some(s);
    }
    let e = -1.0 / (p - 1.0);
    let f = |x: f64| {
        let v = nu(x);
        if v <= 0.0 {
            f64::INFINITY
        } else {
            v.powf(e)
        }
    };
    let mut total = 0.0;
    let mut a = r;
    let mut incs: Vec<f64> = Vec::new();
    for _ in 0..MAX_DECADES {
        let b = a * 10.0;
        let inc = integrate(f, a, b, 1e-300, 1e-12).value;
        if !inc.is_finite() {
            return None;
        }
        total += inc;
        incs.push(inc);
        a = b;
        if incs.len() >= 3 {
            let k = incs.len();
            let q1 = incs[k - 1] / incs[k - 2];
            let q2 = incs[k - 2] / incs[k - 3];
            if q1 < 0.9 && q2 < 0.9 && incs[k - 1] / (1.0 - q1) < 1e-10 * total {
                return Some(total.powf((p - 1.0) / p));
            }
        }
        if inc == 0.0 {
            return Some(total.powf((p - 1.0) / p));
        }
    }
    // increments never decayed geometrically: divergent
    let k = incs.len();
    if incs[k - 1] / incs[k - 2] >= 0.9 {
        return None;
    }
    let q1 = incs[k - 1] / incs[k - 2];
    Some((total + incs[k - 1] * q1 / (1.0 - q1)).powf((p - 1.0) / p))
}
