mod common;

use common::rel_err;
use magkernel::exactkern::mode_kernel_exact;
use magkernel::field::{flux_profile, make_bump_field, mode_potential, FluxProfile, RadialField, Shape, Variant};
use magkernel::radial::eigen::tridiag_eigen;
use magkernel::radial::{
    discretize_mode, ground_state, mode_heat_kernel, psi_comparison, ExteriorFit, GridPolicy, RadialGrid, SemigroupFactor,
};
use proptest::prelude::*;

fn zero() -> FluxProfile {
    flux_profile(&RadialField::zero())
}

fn bump(alpha: f64) -> FluxProfile {
    flux_profile(&make_bump_field(alpha, 1.0, Shape::CosineBump).unwrap())
}

fn free(beta: f64, grid: &RadialGrid) -> magkernel::radial::DiscreteMode {
    discretize_mode(&mode_potential(&zero(), 0, Variant::FreeBeta(beta)), grid).unwrap()
}

#[test]
fn grid_basics() {
    let g = RadialGrid::new(10.0, 100).unwrap();
    assert!((g.h - 10.0 / 100.5).abs() < 1e-15);
    assert!(g.node(0) > 0.0 && g.node(99) < 10.0);
    assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
    assert!(RadialGrid::new(10.0, 63).is_err());
    assert!(RadialGrid::new(0.0, 100).is_err());

    let p = GridPolicy::default();
    let g = p.grid(1.0, 2.0, 1.0, 100.0).unwrap();
    assert!(g.r_max >= 80.0);
    assert!(g.h <= 0.05 + 1e-12);
    let g = p.grid(1.0, 0.5, 1e-4, 1e-4).unwrap();
    assert!(g.n >= 64);
    assert!(g.h <= 1e-2 / 8.0 + 1e-15);
    let g = GridPolicy::fixed(2048, 40.0).grid(1.0, 100.0, 1e-6, 1e6).unwrap();
    assert_eq!((g.n, g.r_max), (2048, 40.0));
}

#[test]
fn eigen_solver_on_toeplitz() {
    let n = 200;
    let (vals, vecs) = tridiag_eigen(&vec![2.0; n], &vec![-1.0; n - 1], true).unwrap();
    let vecs = vecs.unwrap();
    for (k, &v) in vals.iter().enumerate() {
        let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
        assert!((v - exact).abs() < 1e-12, "k={k}");
    }
    for a in 0..n {
        for b in a..n {
            let dot: f64 = (0..n).map(|i| vecs[a * n + i] * vecs[b * n + i]).sum();
            let expect = if a == b { 1.0 } else { 0.0 };
            assert!((dot - expect).abs() < 1e-10);
        }
    }
}

#[test]
fn free_half_order_is_dirichlet_laplacian() {
    let grid = RadialGrid::new(std::f64::consts::PI, 2048).unwrap();
    let dm = free(0.5, &grid);
    assert_eq!(dm.gamma, 0.5);
    // no potential term left after factoring r^{1/2}
    let h = grid.h;
    for k in 1..grid.n - 1 {
        let w = |j: usize| (j as f64 * h).powi(2);
        let stiff = (w(k) + w(k + 1)) / h / dm.mass[k];
        assert!(rel_err(dm.diag[k], stiff) < 1e-13);
    }
    let spec = dm.spectrum().unwrap();
    assert!((spec.values[0] - 1.0).abs() < 1e-3, "{}", spec.values[0]);
    assert!((spec.values[1] - 4.0).abs() < 4e-3);
}

#[test]
fn magnetic_zero_field_equals_free() {
    let grid = RadialGrid::new(20.0, 400).unwrap();
    for m in [1i64, -1, 3] {
        let a = discretize_mode(&mode_potential(&zero(), m, Variant::Magnetic), &grid).unwrap();
        let b = free(m.abs() as f64, &grid);
        assert_eq!(a.diag, b.diag);
        assert_eq!(a.off, b.off);
    }
}

#[test]
fn nonfinite_potential_is_rejected() {
    let grid = RadialGrid::new(20.0, 400).unwrap();
    let spec = mode_potential(&zero(), 0, Variant::FreeBeta(f64::INFINITY));
    assert!(discretize_mode(&spec, &grid).is_err());
}

#[test]
fn table_examples() {
    let grid = RadialGrid::new(30.0, 1000).unwrap();
    let t0 = mode_heat_kernel(&free(0.0, &grid), &[0.5, 1.0]).unwrap();
    assert!(t0.back_transform);
    // nodes are cell centres; interpolate to r = 1 through the column API instead
    let dm = free(0.0, &grid);
    let v = dm.propagator(1.0).column(1.0).eval(1.0);
    let exact = mode_kernel_exact(0.0, 1.0, 1.0, 1.0).unwrap();
    assert!((exact - 0.3225176).abs() < 1e-7);
    assert!(rel_err(v, exact) < 1e-3, "{v} vs {exact}");

    let dm1 = free(1.0, &grid);
    let v = dm1.propagator(0.5).column(2.0).eval(1.0);
    assert!(rel_err(v, mode_kernel_exact(1.0, 1.0, 2.0, 0.5).unwrap()) < 1e-3);

    // table entries agree with the column path at nodes
    let prop = dm.propagator(1.0);
    for &j in &[3usize, 50, 200] {
        let col = prop.column(grid.node(j));
        for &i in &[0usize, 10, 51, 300] {
            let (a, b) = (t0.get(1, i, j), col.at_node(i));
            assert!((a - b).abs() <= 1e-8 * b + 1e-13, "i={i} j={j}: {a} vs {b}");
        }
    }
}

#[test]
fn short_time_locality() {
    let grid = RadialGrid::new(2.0, 2400).unwrap();
    let t: f64 = 1e-4;
    for (m, variant) in [(0, Variant::Magnetic), (2, Variant::Magnetic), (0, Variant::FreeBeta(3.0))] {
        let dm = discretize_mode(&mode_potential(&bump(0.3), m, variant), &grid).unwrap();
        let v = dm.propagator(t).column(1.0).eval(1.0) * 2.0 * (std::f64::consts::PI * t).sqrt();
        assert!((v - 1.0).abs() < 0.1, "m={m}: {v}");
    }
}

// Pairs deeper than four diffusion lengths apart are skipped: there the kernel is
// below e^{-16} of its peak and every second-order grid has O(1) relative error.
fn max_oracle_error(r_max: f64, n: usize) -> f64 {
    let grid = RadialGrid::new(r_max, n).unwrap();
    let pts = common::linspace(0.2, r_max / 4.0, 13);
    let mut worst = 0.0f64;
    for &beta in &[0.0, 0.5, 1.0, 2.0] {
        let dm = free(beta, &grid);
        for &t in &[0.5, 2.0, r_max * r_max / 64.0] {
            let prop = dm.propagator(t);
            for &rp in &pts {
                let col = prop.column(rp);
                for &r in pts.iter().filter(|&&r| (r - rp).powi(2) <= 16.0 * t) {
                    let e = mode_kernel_exact(beta, r, rp, t).unwrap();
                    worst = worst.max(rel_err(col.eval(r), e));
                }
            }
        }
    }
    worst
}

#[test]
fn oracle_equivalence_and_convergence() {
    let e1 = max_oracle_error(20.0, 2048);
    let e2 = max_oracle_error(20.0, 4096);
    assert!(e1 <= 1e-3, "{e1}");
    assert!(e2 <= 1e-4, "{e2}");
    assert!(e1 / e2 >= 2.0, "observed order below 1: {e1} -> {e2}");
}

#[test]
fn tables_are_symmetric_nonnegative_and_submarkovian() {
    let grid = RadialGrid::new(25.0, 600).unwrap();
    let fp = bump(0.3);
    let times = [0.1, 1.0, 10.0];
    for m in -3i64..=3 {
        for variant in [Variant::Magnetic, Variant::Comparison, Variant::Screened] {
            let dm = discretize_mode(&mode_potential(&fp, m, variant), &grid).unwrap();
            let tab = mode_heat_kernel(&dm, &times).unwrap();
            assert!(tab.min_raw >= -1e-9);
            let n = grid.n;
            for (ti, _) in times.iter().enumerate() {
                for i in 0..n {
                    let mut mass = 0.0;
                    for j in 0..n {
                        let v = tab.get(ti, i, j);
                        assert!(v >= 0.0);
                        assert_eq!(v, tab.get(ti, j, i));
                        mass += v * grid.node(j) * grid.h;
                    }
                    assert!(mass <= 1.0 + 1e-6, "m={m} {variant:?} t={} i={i}: {mass}", times[ti]);
                }
            }
        }
    }
}

#[test]
fn contour_path_matches_eigen_path() {
    let fp = bump(0.75);
    let grid = RadialGrid::new(12.0, 300).unwrap();
    for m in [-1i64, 0, 2] {
        let dm = discretize_mode(&mode_potential(&fp, m, Variant::Magnetic), &grid).unwrap();
        // r_max >= 8 sqrt(t), as the grid policy guarantees
        for &t in &[0.01, 0.3, 1.0, 2.25] {
            let tab = mode_heat_kernel(&dm, &[t]).unwrap();
            let mat = dm.propagator(t).matrix();
            let diag = dm.propagator(t).diagonal();
            let n = grid.n;
            let scale = (0..n).map(|i| tab.get(0, i, i)).fold(0.0, f64::max);
            for i in 0..n {
                assert!((diag[i] - tab.get(0, i, i)).abs() <= 1e-9 * scale);
                for j in 0..n {
                    assert!((mat[i * n + j] - tab.get(0, i, j)).abs() <= 1e-9 * scale, "m={m} t={t} ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn discrete_semigroup_identity() {
    let fp = bump(0.3);
    let grid = RadialGrid::new(15.0, 400).unwrap();
    for (m, variant) in [(0, Variant::Magnetic), (1, Variant::Magnetic), (0, Variant::FreeBeta(0.7))] {
        let dm = discretize_mode(&mode_potential(&fp, m, variant), &grid).unwrap();
        let tab = mode_heat_kernel(&dm, &[0.4, 0.9, 1.3]).unwrap();
        // weights that make the node kernel an exact semigroup: M_j / r_j^{2 gamma}
        let w: Vec<f64> = (0..grid.n).map(|j| dm.mass[j] / grid.node(j).powf(2.0 * dm.gamma)).collect();
        for &(i, k) in &[(5usize, 40usize), (60, 61), (120, 30)] {
            let lhs: f64 = (0..grid.n).map(|j| tab.get(0, i, j) * tab.get(1, j, k) * w[j]).sum();
            assert!(rel_err(lhs, tab.get(2, i, k)) < 1e-10, "m={m}");
        }
    }
}

#[test]
fn trotter_domination() {
    let fp = bump(0.3);
    assert!(fp.sup_abs_b < 0.5);
    let grid = RadialGrid::new(30.0, 1500).unwrap();
    for m in [-3i64, -2, -1, 1, 2, 3] {
        let dm = discretize_mode(&mode_potential(&fp, m, Variant::Magnetic), &grid).unwrap();
        let df = free(m as f64 / 2.0, &grid);
        for &t in &[0.05, 0.2, 1.0, 5.0] {
            let (pm, pf) = (dm.propagator(t), df.propagator(t));
            for &rp in &[0.3, 1.0, 2.5] {
                let (cm, cf) = (pm.column(rp), pf.column(rp));
                for &r in &[0.1, 0.5, 1.0, 2.0, 4.0, 6.0] {
                    // same discretization on both sides
                    assert!(cm.eval(r) <= cf.eval(r) + 1e-8, "m={m} t={t} r={r} r'={rp}");
                    // against the exact majorant where discretization error is small
                    if (r - rp).powi(2) <= 4.0 * t {
                        let bound = mode_kernel_exact(m as f64 / 2.0, r, rp, t).unwrap();
                        assert!(cm.eval(r) <= bound + 1e-8, "m={m} t={t} r={r} r'={rp}");
                    }
                }
            }
        }
    }
}

#[test]
fn truncation_sensitivity() {
    let fp = bump(0.3);
    let (r, rp, t) = (1.0, 1.5, 1.0);
    let policy = GridPolicy::default();
    let g1 = policy.grid(1.0, rp, t, t).unwrap();
    let g2 = RadialGrid::new(2.0 * g1.r_max, 2 * g1.n).unwrap();
    for m in [0i64, -1, 2] {
        let spec = mode_potential(&fp, m, Variant::Magnetic);
        let a = discretize_mode(&spec, &g1).unwrap().propagator(t).column(rp).eval(r);
        let b = discretize_mode(&spec, &g2).unwrap().propagator(t).column(rp).eval(r);
        assert!(rel_err(a, b) < 1e-6, "m={m}: {a} vs {b}");
    }
}

#[test]
fn table_rejects_bad_input() {
    let grid = RadialGrid::new(10.0, 100).unwrap();
    let dm = free(1.0, &grid);
    assert!(mode_heat_kernel(&dm, &[1.0, 0.5]).is_err());
    assert!(mode_heat_kernel(&dm, &[0.0]).is_err());
    let big = RadialGrid::new(10.0, 9000).unwrap();
    assert!(mode_heat_kernel(&free(1.0, &big), &[1.0]).is_err());
}

#[test]
fn ground_state_examples() {
    let gs = ground_state(&zero(), 50.0).unwrap();
    for (_, h) in gs.samples() {
        assert!((h - 1.0).abs() < 1e-12);
    }
    match gs.fit {
        ExteriorFit::Log { c, d } => assert!((c - 1.0).abs() < 1e-9 && d.abs() < 1e-9),
        other => panic!("{other:?}"),
    }

    let fp = bump(0.3);
    let gs = ground_state(&fp, 100.0).unwrap();
    assert!(gs.fit_residual <= 1e-6);
    match gs.fit {
        ExteriorFit::Power { sigma, a, .. } => {
            assert!((sigma - 0.3).abs() < 1e-12);
            assert!(a > 0.0);
        }
        other => panic!("{other:?}"),
    }

    let an = flux_profile(&make_bump_field(0.0, 1.0, Shape::Annulus).unwrap());
    let gs = ground_state(&an, 100.0).unwrap();
    assert!(gs.fit_residual <= 1e-6);
    assert!(matches!(gs.fit, ExteriorFit::Log { d, .. } if d > 0.0));

    assert!(ground_state(&fp, 1.2).is_err());
}

#[test]
fn ground_state_solves_its_ode() {
    for fp in [bump(0.3), bump(-1.4), flux_profile(&make_bump_field(0.0, 2.0, Shape::Annulus).unwrap())] {
        let gs = ground_state(&fp, 80.0).unwrap();
        let pts: Vec<(f64, f64)> = gs.samples().collect();
        assert!(pts.iter().all(|p| p.1 > 0.0));
        assert!(pts.windows(2).all(|w| w[1].1 >= w[0].1));
        // independent fixed-step RK4 for h_ss = b(e^s)^2 h in s = ln r
        let rhs = |s: f64, y: [f64; 2]| {
            let b = fp.b(s.exp());
            [y[1], b * b * y[0]]
        };
        let (mut s, mut y) = ((1e-4f64).ln(), [1.0, 0.0]);
        let ds = 1e-3;
        let mut next_check = 0.05f64;
        while s < 79f64.ln() {
            let k1 = rhs(s, y);
            let k2 = rhs(s + 0.5 * ds, [y[0] + 0.5 * ds * k1[0], y[1] + 0.5 * ds * k1[1]]);
            let k3 = rhs(s + 0.5 * ds, [y[0] + 0.5 * ds * k2[0], y[1] + 0.5 * ds * k2[1]]);
            let k4 = rhs(s + ds, [y[0] + ds * k3[0], y[1] + ds * k3[1]]);
            for i in 0..2 {
                y[i] += ds / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            s += ds;
            if s.exp() >= next_check {
                let r = s.exp();
                assert!(rel_err(gs.eval(r), y[0]) < 1e-8, "alpha={} r={r}: {} vs {}", fp.alpha, gs.eval(r), y[0]);
                next_check *= 1.3;
            }
        }
    }
}

#[test]
fn psi_examples() {
    let fp = bump(0.3);
    for m in -3..=3 {
        assert_eq!(psi_comparison(&fp, m, 1.0).unwrap(), 1.0);
        assert_eq!(psi_comparison(&fp, m, 0.5).unwrap(), 1.0);
    }
    let v = psi_comparison(&fp, 0, 2.0).unwrap();
    assert!((v - 0.5 * (2f64.powf(0.3) + 2f64.powf(-0.3))).abs() < 1e-15);
    assert!((v - 1.021698).abs() < 1e-6);
    assert_eq!(psi_comparison(&zero(), 0, 5.0).unwrap(), 1.0);
    assert!(psi_comparison(&fp, 0, 0.0).is_err());
}

proptest! {
    #[test]
    fn psi_solves_screened_equation(alpha in -2.0f64..2.0, m in -4i64..=4, r in 0.05f64..30.0) {
        let fp = flux_profile(&make_bump_field(alpha, 1.0, Shape::QuadraticBump).unwrap());
        prop_assume!((r - 1.0).abs() > 0.01);
        let d = 1e-3 * r;
        let psi = |x: f64| psi_comparison(&fp, m, x).unwrap();
        // (r psi')' by a five-point stencil on r psi'
        let flux = |x: f64| x * (psi(x - 2.0 * d) - 8.0 * psi(x - d) + 8.0 * psi(x + d) - psi(x + 2.0 * d)) / (12.0 * d);
        let div = (flux(r - 2.0 * d) - 8.0 * flux(r - d) + 8.0 * flux(r + d) - flux(r + 2.0 * d)) / (12.0 * d);
        let pot = if r > 1.0 { (fp.b(r) + m as f64).powi(2) / r } else { 0.0 };
        prop_assert!((pot * psi(r) - div).abs() <= 1e-8 * psi(r).max(1.0) * (1.0 + pot));
    }

    #[test]
    fn semigroup_factor_matches_eigen(seed in 0u64..1000, t in 1e-3f64..50.0) {
        // random diagonally dominant M-matrix
        let n = 80;
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || { x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (x >> 11) as f64 / (1u64 << 53) as f64 };
        let off: Vec<f64> = (0..n - 1).map(|_| -0.2 - 2.0 * next()).collect();
        let diag: Vec<f64> = (0..n).map(|i| {
            let l = if i > 0 { -off[i - 1] } else { 0.0 };
            let r = if i + 1 < n { -off[i] } else { 0.0 };
            l + r + 0.5 * next()
        }).collect();
        let (lam, vecs) = tridiag_eigen(&diag, &off, true).unwrap();
        let vecs = vecs.unwrap();
        let f = SemigroupFactor::new(&diag, &off, t);
        let d = f.diagonal();
        for j in [0usize, 17, 79] {
            let col = f.apply_local(j, &[1.0]);
            for i in 0..n {
                let e: f64 = (0..n).map(|k| (-t * lam[k]).exp() * vecs[k * n + i] * vecs[k * n + j]).sum();
                prop_assert!((col[i] - e).abs() <= 1e-10);
                if i == j {
                    prop_assert!((d[i] - e).abs() <= 1e-10);
                }
            }
        }
    }
}
