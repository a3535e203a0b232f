//! Double-double reference arithmetic (~31 significant digits) used as an
//! independent oracle for the special functions and closed-form kernels.
#![allow(dead_code)]

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

pub const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };
pub const PI: Dd = Dd { hi: std::f64::consts::PI, lo: 1.224_646_799_147_353_2e-16 };

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn powi(self, n: u32) -> Self {
        let mut acc = Dd::ONE;
        let mut base = self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = Dd::new(self.hi.sqrt());
        // one Newton step doubles the digits
        x + (self - x * x) / (x * 2.0)
    }

    pub fn exp(self) -> Self {
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2 * k;
        // r / 2^10, Taylor, then square back
        let r = r * (1.0 / 1024.0);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for i in 1..30 {
            term = term * r / i as f64;
            sum = sum + term;
            if term.hi.abs() < 1e-34 {
                break;
            }
        }
        for _ in 0..10 {
            sum = sum * sum;
        }
        // two halves so that 2^1024 never materialises
        let k = k as i32;
        let (s1, s2) = (2f64.powi(k / 2), 2f64.powi(k - k / 2));
        Dd { hi: sum.hi * s1 * s2, lo: sum.lo * s1 * s2 }
    }

    pub fn ln(self) -> Self {
        assert!(self.hi > 0.0, "ln of nonpositive");
        let mut y = Dd::new(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::ONE;
        }
        y
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * q1;
        let q2 = r.hi / o.hi;
        let r = r - o * q2;
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, o: f64) -> Dd {
        self + Dd::new(o)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    fn sub(self, o: f64) -> Dd {
        self - Dd::new(o)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, o: f64) -> Dd {
        self * Dd::new(o)
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, o: f64) -> Dd {
        self / Dd::new(o)
    }
}

// B_{2k} / (2k (2k-1)) for k = 1..12
const STIRLING: [(f64, f64); 12] = [
    (1.0, 12.0),
    (-1.0, 360.0),
    (1.0, 1260.0),
    (-1.0, 1680.0),
    (1.0, 1188.0),
    (-691.0, 360360.0),
    (1.0, 156.0),
    (-3617.0, 122400.0),
    (43867.0, 244188.0),
    (-174611.0, 125400.0),
    (77683.0, 5796.0),
    (-236364091.0, 1506960.0),
];

/// ln Gamma(x) for x > 0: upward shift to x >= 40, then Stirling.
pub fn ln_gamma(x: Dd) -> Dd {
    assert!(x.hi > 0.0);
    let mut x = x;
    let mut shift = Dd::ONE;
    while x.hi < 40.0 {
        shift = shift * x;
        x = x + 1.0;
    }
    let half_ln_2pi = (PI * 2.0).ln() * 0.5;
    let mut s = (x - 0.5) * x.ln() - x + half_ln_2pi;
    let x2 = x * x;
    let mut xp = x;
    for &(num, den) in &STIRLING {
        s = s + Dd::new(num) / (xp * den);
        xp = xp * x2;
    }
    s - shift.ln()
}

pub fn gamma(x: f64) -> f64 {
    ln_gamma(Dd::new(x)).exp().to_f64()
}

/// I_nu(z) by its power series; all terms are positive so there is no cancellation.
pub fn bessel_i(nu: f64, z: f64) -> Dd {
    if z == 0.0 {
        return if nu == 0.0 { Dd::ONE } else { Dd::ZERO };
    }
    let nu_d = Dd::new(nu);
    let half = Dd::new(z) * 0.5;
    let mut term = (nu_d * half.ln() - ln_gamma(nu_d + 1.0)).exp();
    let q = half * half;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term = term * q / ((nu_d + k) * k);
        sum = sum + term;
        if term.hi < 1e-34 * sum.hi && k > z {
            break;
        }
        assert!(k < 5000.0, "series did not converge");
    }
    sum
}

/// J_nu(z) by its alternating power series; trustworthy for z up to about 12.
pub fn bessel_j(nu: f64, z: f64) -> Dd {
    if z == 0.0 {
        return if nu == 0.0 { Dd::ONE } else { Dd::ZERO };
    }
    let nu_d = Dd::new(nu);
    let half = Dd::new(z) * 0.5;
    let mut term = (nu_d * half.ln() - ln_gamma(nu_d + 1.0)).exp();
    let q = -(half * half);
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term = term * q / ((nu_d + k) * k);
        sum = sum + term;
        if term.abs().hi < 1e-34 && k > z {
            break;
        }
    }
    sum
}

/// e^{-(r^2 + r'^2)/(4t)} I_beta(r r'/(2t)) / (2t)
pub fn mode_kernel(beta: f64, r: f64, rp: f64, t: f64) -> f64 {
    let tt = Dd::new(t);
    let expo = -(Dd::new(r) * r + Dd::new(rp) * rp) / (tt * 4.0);
    let z = (Dd::new(r) * rp / (tt * 2.0)).to_f64();
    (bessel_i(beta, z) * expo.exp() / (tt * 2.0)).to_f64()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
