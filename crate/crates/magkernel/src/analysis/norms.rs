use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::assembly::{Assembler, OperatorTag};
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// weighted `L^2_beta -> L^2`
    TwoTwo,
    /// weighted `L^1_beta -> L^inf`
    OneInf,
}

/// Source radii (in units of `R`) for the `(1, inf)` supremum.
const Y_SAMPLES: [f64; 6] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];

/// Kernel-based estimates of the weighted operator norm of `e^{-tH}` for each time.
///
/// `p = 2`: `sqrt( int k(2t, y, y) (1+|y|)^-beta dy )`.
/// `p = 1`: `sup_{x, y} k(t, x, y) (1+|y|)^-beta` over grid radii `|x|` and a fixed
/// set of `|y|`. Intermediate `p` follow by interpolation and are not computed.
pub fn weighted_norm_decay(asm: &Assembler, beta: f64, p: f64, t_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    let rho = asm.flux().rho;
    if !(beta > 2.0 + 2.0 * rho) {
        return domain(format!("weight exponent beta must exceed 2 + 2 rho = {}", 2.0 + 2.0 * rho));
    }
    let kind = if p == 2.0 {
        NormKind::TwoTwo
    } else if p == 1.0 {
        NormKind::OneInf
    } else {
        return domain(format!("only the endpoints p = 1 and p = 2 are computed, got {p}"));
    };
    t_list
        .iter()
        .map(|&t| {
            let v = match kind {
                NormKind::TwoTwo => two_two(asm, beta, t)?,
                NormKind::OneInf => one_inf(asm, beta, t)?,
            };
            Ok((t, v))
        })
        .collect()
}

fn two_two(asm: &Assembler, beta: f64, t: f64) -> Result<f64> {
    let s = 2.0 * t;
    let rr = asm.flux().support_radius();
    // beyond r_c the diagonal equals the free value 1/(4 pi s) up to exp(-r_c^2/2s)
    let r_c = 6.0 * s.sqrt() + 2.0 * rr;
    let slice = asm.diagonal(s, r_c, OperatorTag::Magnetic, 1e-10 / (4.0 * PI * s))?;
    let h = slice.grid.h;
    let mut acc = 0.0;
    let mut k = 0;
    // midpoint rule over whole cells [k h, (k+1) h] up to r_c
    while (k as f64 + 1.0) * h <= r_c {
        let r = slice.grid.node(k);
        acc += slice.values[k] * (1.0 + r).powf(-beta) * 2.0 * PI * r * h;
        k += 1;
    }
    let edge = k as f64 * h;
    let tail = (1.0 + edge).powf(2.0 - beta) / (beta - 2.0) - (1.0 + edge).powf(1.0 - beta) / (beta - 1.0);
    acc += 2.0 * PI * tail / (4.0 * PI * s);
    Ok(acc.sqrt())
}

fn one_inf(asm: &Assembler, beta: f64, t: f64) -> Result<f64> {
    let rr = asm.flux().support_radius();
    let x_max = 6.0 * t.sqrt() + 4.0 * rr;
    let mut best = 0.0f64;
    for &yf in &Y_SAMPLES {
        let y = yf * rr;
        let slice = asm.slice(t, y, &[x_max, y], OperatorTag::Magnetic, 1e-10 / (4.0 * PI * t))?;
        let w = (1.0 + y).powf(-beta);
        let n = slice.grid.n;
        for k in 0..n {
            if slice.grid.node(k) > x_max {
                break;
            }
            best = best.max(slice.eval_node(k) * w);
        }
    }
    Ok(best)
}
