mod common;

use common::characteristics_oracle;
use kdv_core::burgers::*;
use kdv_core::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn implicit_solver_matches_characteristics() {
    let p = AnalyticProfile::sine(0.1, 1.0);
    for &t in &[0.1, 0.5, 1.0, 2.0] {
        for j in 0..12 {
            let z = c(0.5 * j as f64, 0.05 * (j as f64 - 6.0));
            let s = solve_implicit(&p, z, t, 0.0, 1e-15).unwrap();
            assert!(s.converged);
            let o = characteristics_oracle(&p, z, t, 0.0, 4000);
            assert!((s.v - o).norm() < 1e-8, "t={t} z={z}: {}", (s.v - o).norm());
        }
    }
    // rotating case as well
    let s = solve_implicit(&p, c(1.0, 0.1), 1.3, 3.0, 1e-15).unwrap();
    assert!((s.v - characteristics_oracle(&p, c(1.0, 0.1), 1.3, 3.0, 4000)).norm() < 1e-8);
}

#[test]
fn rotating_equation_residual() {
    // u = e^{i Omega t} v must satisfy u_t + u u_z = i Omega u
    let p = AnalyticProfile::trig(vec![(1, c(0.1, 0.05)), (-1, c(0.1, -0.05)), (2, c(0.03, 0.0))], 1.0);
    let omega = 2.5;
    let h = 1e-5;
    for &(z, t) in &[(c(0.3, 0.1), 0.4), (c(2.0, -0.2), 1.1), (c(-1.0, 0.0), 2.7)] {
        let u = |s: f64| u_value(&solve_implicit(&p, z, s, omega, 1e-15).unwrap(), s, omega);
        let sol = solve_implicit(&p, z, t, omega, 1e-15).unwrap();
        let ut = (u(t + h) - u(t - h)) / (2.0 * h);
        let u0 = u(t);
        let uz = Complex64::new(0.0, omega * t).exp() * sol.dz_v;
        let res = ut + u0 * uz - Complex64::new(0.0, omega) * u0;
        assert!(res.norm() < 1e-6, "{res}");
    }
}

#[test]
fn linear_data_blows_up_at_one() {
    let p = AnalyticProfile::linear(c(-1.0, 0.0), c(0.0, 0.0));
    let zs: Vec<Complex64> = (0..9).map(|j| c(j as f64 * 0.25 - 1.0, 0.1)).collect();
    let scan = blowup_scan(&p, 0.0, &zs, 2.0).unwrap();
    let ev = scan.event.expect("blow-up expected");
    assert!((ev.t_star - 1.0).abs() <= 1e-6, "{}", ev.t_star);
    assert!(ev.t_threshold < 1.0 && ev.t_threshold > 0.998);
}

#[test]
fn negative_sine_blows_up_near_one() {
    let p = AnalyticProfile::sine(-1.0, 0.5);
    let zs: Vec<Complex64> = (0..64).map(|j| c(2.0 * std::f64::consts::PI * j as f64 / 64.0, 0.0)).collect();
    let ev = blowup_scan(&p, 0.0, &zs, 3.0).unwrap().event.expect("blow-up expected");
    assert!((ev.t_star - 1.0).abs() < 1e-4, "{}", ev.t_star);
    assert!(ev.z.norm() < 1e-12, "witness {}", ev.z);
}

#[test]
fn decreasing_real_data_blow_up_time() {
    // phi = -0.5 sin z - 0.2 sin 2z: max(-phi') = 0.5 + 0.4 = 0.9 at z = 0
    let p = AnalyticProfile::trig(vec![(1, c(0.0, 0.25)), (-1, c(0.0, -0.25)), (2, c(0.0, 0.1)), (-2, c(0.0, -0.1))], 0.5);
    let zs: Vec<Complex64> = (0..128).map(|j| c(2.0 * std::f64::consts::PI * j as f64 / 128.0, 0.0)).collect();
    let ev = blowup_scan(&p, 0.0, &zs, 3.0).unwrap().event.unwrap();
    let expect = 1.0 / 0.9;
    assert!((ev.t_star - expect).abs() / expect < 1e-4, "{}", ev.t_star);
}

#[test]
fn fast_rotation_prevents_blowup() {
    // |phi'| = 0.5 |cos z| <= 0.5 cosh(Im z), so sup over |Im z| < acosh 2 is 1
    let d = 2f64.acosh();
    let p = AnalyticProfile::sine(0.5, d);
    assert!(p.sup_dphi() >= 1.0);
    let zs: Vec<Complex64> = (0..32)
        .map(|j| c(2.0 * std::f64::consts::PI * j as f64 / 32.0, if j % 2 == 0 { 0.0 } else { 0.3 }))
        .collect();
    let scan = blowup_scan(&p, 4.0, &zs, 100.0).unwrap();
    assert!(scan.event.is_none());
    assert!(scan.min_denominator >= 0.5, "{}", scan.min_denominator);
}

#[test]
fn faster_rotation_is_safer() {
    let p = AnalyticProfile::sine(0.5, 1.0);
    let zs: Vec<Complex64> = (0..16).map(|j| c(0.4 * j as f64, 0.0)).collect();
    let mins: Vec<f64> = [2.0, 4.0, 8.0, 16.0]
        .iter()
        .map(|&w| blowup_scan(&p, w, &zs, 2.0 * std::f64::consts::PI).unwrap().min_denominator)
        .collect();
    let violations = mins.windows(2).filter(|w| w[1] < w[0]).count();
    eprintln!("min denominators {mins:?}, monotonicity violations {violations}");
    for (&w, &m) in [2.0, 4.0, 8.0, 16.0].iter().zip(&mins) {
        assert!(m >= 1.0 - p.sup_dphi() * 2.0 / w - 1e-12);
    }
}

#[test]
fn scan_rejects_bad_input() {
    let p = AnalyticProfile::sine(0.5, 1.0);
    assert!(blowup_scan(&p, 0.0, &[], 1.0).is_err());
    assert!(blowup_scan(&p, 0.0, &[c(0.0, 2.0)], 1.0).is_err());
}

proptest! {
    #[test]
    fn linear_profiles_exact(a_re in -2.0f64..2.0, a_im in -2.0f64..2.0, b_re in -1.0f64..1.0,
                             z_re in -3.0f64..3.0, z_im in -1.0f64..1.0, t in 0.0f64..3.0, omega in -5.0f64..5.0) {
        let a = c(a_re, a_im);
        let b = c(b_re, 0.3);
        let z = c(z_re, z_im);
        let p = AnalyticProfile::linear(a, b);
        let den = 1.0 + lambda(t, omega) * a;
        prop_assume!(den.norm() > 0.05);
        let s = solve_implicit(&p, z, t, omega, 1e-15).unwrap();
        prop_assert!(s.converged);
        let exact = (a * z + b) / den;
        prop_assert!((s.v - exact).norm() <= 1e-12 * exact.norm().max(1.0));
    }

    #[test]
    fn lambda_bounded(t in -50.0f64..50.0, omega in 0.01f64..20.0) {
        prop_assert!(lambda(t, omega).norm() <= 2.0 / omega + 1e-12);
    }
}
