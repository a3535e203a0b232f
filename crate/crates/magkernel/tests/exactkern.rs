mod common;

use std::f64::consts::PI;

use common::rel_err;
use magkernel::exactkern::{ab_kernel, ab_limit_constant, free_kernel, mode_kernel_exact, KernelPoint};
use magkernel::quad::integrate;
use magkernel::specfun::{bessel_j, gamma_fn, BesselOrder};
use num_complex::Complex64;
use proptest::prelude::*;

fn pt(r: f64, rp: f64, th: f64, t: f64) -> KernelPoint {
    KernelPoint::new(r, rp, th, t).unwrap()
}

#[test]
fn kernel_point_validation() {
    assert!(KernelPoint::new(1.0, 1.0, 0.0, 0.0).is_err());
    assert!(KernelPoint::new(-1.0, 1.0, 0.0, 1.0).is_err());
    assert!(KernelPoint::new(1.0, 1.0, f64::NAN, 1.0).is_err());
    // angles are wrapped into (-pi, pi]
    let p = pt(1.0, 1.0, 3.0 * PI, 1.0);
    assert!((p.dtheta - PI).abs() < 1e-12);
    let p = pt(1.0, 1.0, -PI, 1.0);
    assert!((p.dtheta - PI).abs() < 1e-12);
}

#[test]
fn free_kernel_examples() {
    assert!((free_kernel(&pt(0.0, 0.0, 2.0, 1.0)) - 1.0 / (4.0 * PI)).abs() < 1e-17);
    assert!((free_kernel(&pt(1.0, 1.0, 0.0, 1.0)) - 1.0 / (4.0 * PI)).abs() < 1e-17);
    assert!((free_kernel(&pt(1.0, 0.0, 0.0, 0.25)) - (-1f64).exp() / PI).abs() < 1e-16);
    assert!((free_kernel(&pt(1.0, 0.0, 0.0, 0.25)) - 0.117099).abs() < 1e-6);
}

#[test]
fn mode_kernel_examples() {
    assert!((mode_kernel_exact(0.0, 1e-9, 1e-9, 1.0).unwrap() - 0.5).abs() < 1e-15);
    let v = mode_kernel_exact(0.5, 1.0, 1.0, 1.0).unwrap();
    let closed = 0.5 * (2.0 / (PI * 0.5f64)).sqrt() * 0.5f64.sinh() * (-0.5f64).exp();
    assert!(rel_err(v, closed) < 1e-14);
    assert!((v - 0.1783179).abs() < 1e-7);
    let t: f64 = 1e9;
    assert!((t * mode_kernel_exact(0.0, 1.0, 1.0, t).unwrap() - 0.5).abs() < 1e-8);
    assert!(mode_kernel_exact(0.0, 0.0, 1.0, 1.0).is_err());
    assert!(mode_kernel_exact(0.0, 1.0, 1.0, -1.0).is_err());
    // only beta^2 matters
    assert_eq!(mode_kernel_exact(-1.3, 0.7, 1.1, 0.4).unwrap(), mode_kernel_exact(1.3, 0.7, 1.1, 0.4).unwrap());
}

#[test]
fn mode_kernel_against_oracle() {
    for &beta in &[0.0, 0.3, 0.5, 1.0, 2.0, 5.5] {
        for &r in &[0.05, 0.4, 1.0, 2.2, 4.0] {
            for &rp in &[0.1, 1.0, 3.0] {
                for &t in &[0.05, 0.3, 1.0, 10.0, 1e3] {
                    let o = common::mode_kernel(beta, r, rp, t);
                    if o < 1e-280 {
                        continue;
                    }
                    let z = r * rp / (2.0 * t);
                    let tol = if z <= 30.0 { 1e-12 } else { 1e-10 };
                    let v = mode_kernel_exact(beta, r, rp, t).unwrap();
                    // the Gaussian factor carries ~|(r-r')^2/4t| ulps of rounding
                    let expo = ((r - rp).powi(2) / (4.0 * t)).max(1.0);
                    assert!(rel_err(v, o) <= tol * expo, "beta={beta} r={r} r'={rp} t={t}: {v} vs {o}");
                }
            }
        }
    }
}

#[test]
fn hankel_transform_reproduces_mode_kernel() {
    // p_beta(r, r', t) = int_0^inf exp(-t k^2) J_beta(k r) J_beta(k r') k dk
    let (r, rp, t) = (0.8, 1.5, 0.6);
    for &beta in &[0.0, 0.5, 1.0, 2.5] {
        let order = BesselOrder::new(beta).unwrap();
        let f = |k: f64| (-t * k * k).exp() * bessel_j(order, k * r).unwrap() * bessel_j(order, k * rp).unwrap() * k;
        let cut = (40.0 / t).sqrt();
        let mut total = 0.0;
        let pieces = 32;
        for i in 0..pieces {
            let a = cut * i as f64 / pieces as f64;
            let b = cut * (i + 1) as f64 / pieces as f64;
            total += integrate(f, a, b, 1e-16, 1e-13).value;
        }
        let exact = mode_kernel_exact(beta, r, rp, t).unwrap();
        assert!(rel_err(total, exact) < 1e-9, "beta={beta}: {total} vs {exact}");
    }
}

#[test]
fn per_mode_semigroup() {
    let cases = [(0.0, 0.7, 1.2, 0.3, 0.5), (0.5, 1.0, 0.4, 1.0, 0.25), (1.3, 2.0, 2.5, 0.8, 1.7), (3.0, 0.3, 1.9, 2.0, 2.0)];
    for &(beta, r, rp, t1, t2) in &cases {
        let f = |s: f64| mode_kernel_exact(beta, r, s, t1).unwrap() * mode_kernel_exact(beta, s, rp, t2).unwrap() * s;
        let top = r.max(rp) + 14.0 * (t1 + t2).sqrt();
        let lhs: f64 = (0..64)
            .map(|i| {
                let a = 1e-12 + top * i as f64 / 64.0;
                let b = 1e-12 + top * (i + 1) as f64 / 64.0;
                integrate(f, a, b, 1e-18, 1e-13).value
            })
            .sum();
        let rhs = mode_kernel_exact(beta, r, rp, t1 + t2).unwrap();
        assert!((lhs - rhs).abs() <= 1e-8 * rhs.max(1e-3), "beta={beta}: {lhs} vs {rhs}");
    }
}

#[test]
fn mode_term_large_time_limit() {
    for &nu in &[0.0, 0.3, 0.7, 1.3, 2.0] {
        let (r, rp): (f64, f64) = (1.2, 0.8);
        let t: f64 = 1e8;
        let lim = (r * rp).powf(nu) / (2f64.powf(2.0 * nu + 1.0) * gamma_fn(1.0 + nu).unwrap());
        let v = t.powf(1.0 + nu) * mode_kernel_exact(nu, r, rp, t).unwrap();
        assert!(rel_err(v, lim) < 1e-6, "nu={nu}: {v} vs {lim}");
    }
}

#[test]
fn ab_integer_flux_examples() {
    let p = pt(1.0, 1.0, PI / 3.0, 1.0);
    let tol = 1e-14;
    let v0 = ab_kernel(0.0, &p, tol).unwrap();
    assert!((v0.value - free_kernel(&p)).norm() <= tol + 1e-16);
    let v1 = ab_kernel(1.0, &p, tol).unwrap();
    assert!((v1.value.norm() - free_kernel(&p)).abs() <= tol + 1e-16);
    let phase = Complex64::from_polar(1.0, -p.dtheta);
    assert!((v1.value - phase * free_kernel(&p)).norm() <= tol + 1e-16);
    let v2 = ab_kernel(-2.0, &p, tol).unwrap();
    assert!((v2.value - Complex64::from_polar(free_kernel(&p), 2.0 * p.dtheta)).norm() <= tol + 1e-16);
}

#[test]
fn ab_half_flux_asymptote() {
    let t: f64 = 1e4;
    let v = ab_kernel(0.5, &pt(1.0, 1.0, 0.0, t), 1e-20).unwrap();
    let target = 2.0 * 0.5 / (4.0 * PI * gamma_fn(1.5).unwrap());
    assert!((target - 0.08979).abs() < 1e-5);
    assert!(rel_err(v.value.re * t.powf(1.5), target) < 0.01);
    assert!(v.value.im.abs() < 1e-25);
}

#[test]
fn ab_zero_radius_and_errors() {
    let p = pt(0.0, 1.3, 0.4, 0.7);
    let v = ab_kernel(0.3, &p, 1e-10).unwrap();
    assert_eq!(v.value, Complex64::new(0.0, 0.0));
    assert_eq!(v.tail_bound, 0.0);
    let v = ab_kernel(2.0, &p, 1e-10).unwrap();
    assert!(rel_err(v.value.norm(), free_kernel(&p)) < 1e-14);
    assert!(ab_kernel(0.3, &pt(1.0, 1.0, 0.0, 1.0), 0.0).is_err());
    assert!(ab_kernel(0.3, &pt(1.0, 1.0, 0.0, 1.0), -1.0).is_err());
    assert!(ab_kernel(f64::NAN, &pt(1.0, 1.0, 0.0, 1.0), 1e-9).is_err());
}

#[test]
fn ab_limit_examples() {
    for &(r, rp) in &[(1.0, 1.0), (0.3, 4.0), (2.0, 7.0)] {
        let c = ab_limit_constant(0.0, r, rp, 0.4).unwrap();
        assert!((c - 1.0 / (4.0 * PI)).norm() < 1e-16);
    }
    let c = ab_limit_constant(0.3, 2.0, 2.0, 0.0).unwrap();
    assert!(rel_err(c.re, 1.0 / (4.0 * PI * common::gamma(1.3))) < 1e-13);
    assert!((c.re - 0.0886686).abs() < 1e-7);
    assert!(ab_limit_constant(0.5, 1.0, 1.0, PI).unwrap().norm() < 1e-16);
    assert!(ab_limit_constant(-0.5, 1.0, 1.0, PI).unwrap().norm() < 1e-16);
    assert!(ab_limit_constant(0.6, 1.0, 1.0, 0.0).is_err());
    // alpha = 1/2 limit is genuinely complex off the diagonal ray
    let c = ab_limit_constant(0.5, 1.0, 1.0, 1.0).unwrap();
    assert!(c.im.abs() > 1e-3);
}

#[test]
fn ab_limit_matches_series() {
    for &alpha in &[-0.5, -0.2, 0.5] {
        for &th in &[0.0, 1.0, 2.5] {
            let t: f64 = 1e10;
            let v = ab_kernel(alpha, &pt(1.3, 0.9, th, t), 1e-30).unwrap().value * t.powf(1.0 + alpha.abs());
            let c = ab_limit_constant(alpha, 1.3, 0.9, th).unwrap();
            assert!((v - c).norm() <= 1e-3 * c.norm().max(1e-3), "alpha={alpha} th={th}: {v} vs {c}");
        }
    }
}

#[test]
fn tail_bound_is_monotone_and_certified() {
    let p = pt(2.0, 1.5, 0.8, 0.2);
    let reference = ab_kernel(0.37, &p, 1e-30).unwrap();
    let mut last = (0usize, f64::INFINITY);
    for k in 2..=16 {
        let tol = 10f64.powi(-k);
        let v = ab_kernel(0.37, &p, tol).unwrap();
        assert!(v.tail_bound <= tol);
        assert!(v.modes_used >= last.0);
        assert!(v.tail_bound <= last.1);
        assert!((v.value - reference.value).norm() <= v.tail_bound + 1e-15);
        last = (v.modes_used, v.tail_bound);
    }
}

proptest! {
    #[test]
    fn ab_hermitian(alpha in -2.0f64..2.0, r in 0.01f64..4.0, rp in 0.01f64..4.0, th in -3.1f64..3.1, t in 0.05f64..50.0) {
        let tol = 1e-12;
        let a = ab_kernel(alpha, &pt(r, rp, th, t), tol).unwrap().value;
        let b = ab_kernel(alpha, &pt(rp, r, -th, t), tol).unwrap().value;
        prop_assert!((a - b.conj()).norm() <= 2.0 * tol);
    }

    #[test]
    fn ab_diamagnetic(alpha in -2.0f64..2.0, r in 0.0f64..4.0, rp in 0.0f64..4.0, th in -3.1f64..3.1, t in 0.05f64..50.0) {
        let tol = 1e-12;
        let p = pt(r, rp, th, t);
        let v = ab_kernel(alpha, &p, tol).unwrap();
        prop_assert!(v.value.norm() <= free_kernel(&p) + tol + 1e-15);
    }

    #[test]
    fn ab_integer_collapse(n in -3i32..=3, r in 0.0f64..3.0, rp in 0.0f64..3.0, th in -3.1f64..3.1, t in 0.1f64..10.0) {
        let tol = 1e-10;
        let p = pt(r, rp, th, t);
        let v = ab_kernel(n as f64, &p, tol).unwrap();
        prop_assert!((v.value.norm() - free_kernel(&p)).abs() <= tol);
    }

    #[test]
    fn mode_kernel_positive(beta in 0.0f64..30.0, r in 1e-3f64..20.0, rp in 1e-3f64..20.0, t in 1e-2f64..1e4) {
        let v = mode_kernel_exact(beta, r, rp, t).unwrap();
        let o = common::mode_kernel(beta, r, rp, t);
        prop_assert!(v >= 0.0);
        prop_assert!(o <= 1e-300 || v > 0.0);
    }
}
