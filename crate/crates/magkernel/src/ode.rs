//! Dormand-Prince 5(4) integrator for small autonomous-in-form systems.

/// Accepted step `(x, y, y')` where `y'` is the derivative at `x`.
#[derive(Debug, Clone, Copy)]
pub struct OdeSample<const D: usize> {
    pub x: f64,
    pub y: [f64; D],
    pub dy: [f64; D],
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `y' = f(x, y)` from `x0` to `x1` with relative tolerance `rtol`,
/// returning every accepted step. `max_step` caps the step so that sharp
/// features in `f` are not skipped.
pub fn dopri5<const D: usize, F>(f: F, x0: f64, y0: [f64; D], x1: f64, rtol: f64, atol: f64, max_step: f64) -> Vec<OdeSample<D>>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let mut out = Vec::new();
    let mut x = x0;
    let mut y = y0;
    let mut k0 = f(x, &y);
    out.push(OdeSample { x, y, dy: k0 });
    let mut h = (1e-3 * (x1 - x0)).min(max_step);
    while x < x1 {
        if x + h > x1 {
            h = x1 - x;
        }
        let mut k = [[0.0; D]; 7];
        k[0] = k0;
        for s in 1..7 {
            let mut ys = y;
            for (d, v) in ys.iter_mut().enumerate() {
                for j in 0..s {
                    *v += h * A[s][j] * k[j][d];
                }
            }
            k[s] = f(x + C[s] * h, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for d in 0..D {
            let mut s5 = 0.0;
            let mut s4 = 0.0;
            for s in 0..7 {
                s5 += B5[s] * k[s][d];
                s4 += B4[s] * k[s][d];
            }
            y5[d] = y[d] + h * s5;
            let sc = atol + rtol * y[d].abs().max(y5[d].abs());
            err = err.max((h * (s5 - s4)).abs() / sc);
        }
        if err <= 1.0 {
            x += h;
            y = y5;
            k0 = k[6];
            out.push(OdeSample { x, y, dy: k0 });
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * fac).min(max_step);
    }
    out
}
