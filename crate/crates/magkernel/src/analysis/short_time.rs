use std::f64::consts::PI;

use crate::assembly::{Assembler, OperatorTag};
use crate::error::{domain, Result};

/// `4 pi t k(t, x, x)`; tends to 1 as `t -> 0`.
pub fn short_time_check(asm: &Assembler, x: f64, t_small: f64) -> Result<f64> {
    if !(t_small > 0.0 && t_small <= 1e-2) {
        return domain(format!("short-time check needs 0 < t <= 1e-2, got {t_small}"));
    }
    let scale = 4.0 * PI * t_small;
    let s = asm.slice(t_small, x, &[x], OperatorTag::Magnetic, 1e-9 / scale)?;
    Ok(scale * s.eval(x, 0.0).re)
}
