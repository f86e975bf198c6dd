mod common;

use common::{all, quad, tri, Tri};
use kdv_core::operators::*;
use kdv_core::spectrum::{project, random_state, sobolev_norm_sq, Side};
use kdv_core::{Complex64, FourierState};
use proptest::prelude::*;

const TOL: f64 = 1e-14;

fn complex_state(seed: u64, m: i64) -> FourierState {
    // non-Hermitian input: rotate the negative modes independently
    let a = random_state(seed, m, 0.0, 1.0);
    let b = random_state(seed ^ 0x9e37, m, 0.0, 1.0);
    let pos = project(&a, 0, Side::High);
    FourierState::from_pairs(
        pos.iter()
            .map(|(k, z)| if k > 0 { (k, z) } else { (k, b.get(k) * Complex64::new(0.0, 1.0)) }),
    )
    .unwrap()
}

#[test]
fn oracle_equivalence_m12() {
    for trial in 0..50u64 {
        let m = 12;
        let t = [0.0, 0.013, 0.7, 3.3, 17.25][trial as usize % 5];
        let u = random_state(100 + trial, m, 0.0, 1.0);
        let v = complex_state(200 + trial, m);
        let w = random_state(300 + trial, m, 1.0, 1.0);
        let f = random_state(400 + trial, m, -0.5, 1.0);
        assert!(b1(&u, &v, t).rel_diff(&common::b1(&u, &v, t)) < TOL);
        assert!(b2(&u, &v, t).rel_diff(&common::b2(&u, &v, t)) < TOL);
        assert!(r3(&u, &v, &w, t).rel_diff(&tri(&u, &v, &w, t, Tri::All, all)) < TOL);
        let (res, nres) = resonance_split(&u, &v, &w, t);
        assert!(res.rel_diff(&tri(&u, &v, &w, t, Tri::Res, all)) < TOL);
        assert!(nres.rel_diff(&tri(&u, &v, &w, t, Tri::Nres, all)) < TOL);
        assert!(b3(&u, &v, &w, t).rel_diff(&tri(&u, &v, &w, t, Tri::B3, all)) < TOL);
        assert!(b4_1(&u, &v, &w, &f, t).rel_diff(&quad(&u, &v, &w, &f, t, 1, all, all, all)) < TOL);
        assert!(b4_2(&u, &v, &w, &f, t).rel_diff(&quad(&u, &v, &w, &f, t, 2, all, all, all)) < TOL);
    }
}

#[test]
fn windowed_kernels_match_filtered_loops() {
    let m = 7;
    for trial in 0..10u64 {
        let t = 0.37 * trial as f64;
        let u = random_state(10 + trial, m, 0.0, 1.0);
        let v = random_state(20 + trial, m, 0.0, 1.0);
        let w = random_state(30 + trial, m, 0.0, 1.0);
        let f = random_state(40 + trial, m, 0.0, 1.0);
        let pw = Window::between(0, 5);
        let keep = |q: i64| q != 0 && q.abs() <= 5;
        assert!(r3_windowed(&u, &v, &w, t, pw).rel_diff(&tri(&u, &v, &w, t, Tri::All, keep)) < TOL);
        assert!(r3_res_windowed(&u, &v, &w, pw).rel_diff(&tri(&u, &v, &w, t, Tri::Res, keep)) < TOL);
        assert!(b3_windowed(&u, &v, &w, t, pw).rel_diff(&tri(&u, &v, &w, t, Tri::B3, keep)) < TOL);
        let w1 = QuadWindow { s12: Window::upto(6), s34: Window::between(0, 6), s234: Window::ALL };
        let w2 = QuadWindow { s12: Window::ALL, s34: Window::between(2, 6), s234: Window::upto(6) };
        let p = b4_parts_windowed(&u, &v, &w, &f, t, w1, w2);
        let o1 = quad(&u, &v, &w, &f, t, 1, |x| x.abs() <= 6, |x| x != 0 && x.abs() <= 6, all);
        let o2 = quad(&u, &v, &w, &f, t, 2, all, |x| x.abs() > 2 && x.abs() <= 6, |x| x.abs() <= 6);
        assert!(p.b4_1.rel_diff(&o1) < TOL);
        assert!(p.b4_2.rel_diff(&o2) < TOL);
    }
}

#[test]
fn split_family_matches_expansion() {
    let m = 9;
    for n in [1i64, 2, 4, 8] {
        let v = random_state(70 + n as u64, m, 0.0, 1.0);
        let t = 0.61;
        let lo = project(&v, n, Side::Low);
        let hi = project(&v, n, Side::High);
        let all_nres = tri(&v, &v, &v, t, Tri::Nres, all);
        // R3nres1: at least one of slots 2, 3 is a low mode
        let expect1 = tri(&v, &lo, &v, t, Tri::Nres, all).add(&tri(&v, &hi, &lo, t, Tri::Nres, all));
        assert!(r3_nres1_n(&v, &v, &v, t, n).rel_diff(&expect1) < TOL);
        let sum = r3_nres0_n(&v, &v, &v, t, n).add(&r3_nres1_n(&v, &v, &v, t, n));
        assert!(sum.rel_diff(&all_nres) < TOL);
        assert!(b30_n(&v, &v, &v, t, n).rel_diff(&tri(&v, &hi, &hi, t, Tri::B3, all)) < TOL);
        let e1 = quad(&hi, &hi, &v, &v, t, 1, all, all, all);
        let e2 = quad(&v, &hi, &v, &v, t, 2, all, |q| q.abs() > n, all);
        assert!(b40_1_n(&v, &v, &v, &v, t, n).rel_diff(&e1) < TOL);
        assert!(b40_2_n(&v, &v, &v, &v, t, n).rel_diff(&e2) < TOL);
        let tot = e1.axpby(Complex64::new(0.5, 0.0), &e2, Complex64::new(1.0, 0.0));
        assert!(b40_n(&v, &v, &v, &v, t, n).rel_diff(&tot) < TOL);
    }
}

#[test]
fn a_res_matches_six_classes() {
    for seed in 0..20u64 {
        let v = random_state(seed, 10, 0.0, 1.0 + seed as f64 * 0.1);
        let e = sobolev_norm_sq(&v, 0.0);
        let brute = common::res_by_classes(&v, 10);
        assert!(a_res(&v, e).rel_diff(&brute) < TOL, "seed {seed}");
    }
}

#[test]
fn b4_output_symmetry_on_real_input() {
    // The B4 weights are odd under k -> -k, so B4 of a real state is
    // anti-Hermitian and i*B4 (the term entering the equation) is real-valued.
    let v = random_state(9, 8, 0.0, 1.0);
    let o = b4(&v, &v, &v, &v, 0.77);
    let plain = o.hermitian_defect() / o.max_abs();
    let rotated = o.scale(Complex64::new(0.0, 1.0));
    let defect = rotated.hermitian_defect() / o.max_abs();
    println!("B4 hermitian defect {plain:e}, i*B4 hermitian defect {defect:e}");
    assert!(plain > 0.1);
    assert!(defect < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn b1_is_energy_neutral(seed in 0u64..10_000, m in 1i64..10, t in -5.0f64..5.0) {
        let v = random_state(seed, m, 0.0, 1.0);
        let z = b1(&v, &v, t).inner(&v);
        prop_assert!(z.re.abs() < 1e-13);
    }

    #[test]
    fn b2_symmetric(seed in 0u64..10_000, m in 1i64..10, t in -5.0f64..5.0) {
        let u = random_state(seed, m, 0.0, 1.0);
        let v = complex_state(seed + 1, m);
        prop_assert!(b2(&u, &v, t).rel_diff(&b2(&v, &u, t)) < 1e-14);
    }

    #[test]
    fn b4_symmetric_in_last_pair(seed in 0u64..10_000, m in 1i64..6, t in -2.0f64..2.0) {
        let u = random_state(seed, m, 0.0, 1.0);
        let v = random_state(seed + 1, m, 0.0, 1.0);
        let w = complex_state(seed + 2, m);
        let f = random_state(seed + 3, m, 0.0, 1.0);
        prop_assert!(b4(&u, &v, &w, &f, t).rel_diff(&b4(&u, &v, &f, &w, t)) < 1e-13);
    }

    #[test]
    fn resonance_partition(seed in 0u64..10_000, m in 1i64..9, t in -5.0f64..5.0) {
        let v = random_state(seed, m, 0.0, 1.0);
        let (res, nres) = resonance_split(&v, &v, &v, t);
        prop_assert!(res.add(&nres).rel_diff(&r3(&v, &v, &v, t)) < 1e-14);
    }

    #[test]
    fn split_partition(seed in 0u64..10_000, m in 1i64..9, n in 0i64..10, t in -5.0f64..5.0) {
        let v = random_state(seed, m, 0.0, 1.0);
        let (_, nres) = resonance_split(&v, &v, &v, t);
        let sum = r3_nres0_n(&v, &v, &v, t, n).add(&r3_nres1_n(&v, &v, &v, t, n));
        prop_assert!(sum.max_diff(&nres) <= 1e-14 * nres.max_abs().max(1.0));
    }

    #[test]
    fn t_zero_phases_are_one(seed in 0u64..10_000, m in 1i64..6) {
        let v = random_state(seed, m, 0.0, 1.0);
        let o = b3(&v, &v, &v, 0.0);
        // at t = 0 a real Hermitian input with real coefficients gives real output
        let vr = FourierState::hermitian(v.iter().filter(|(k, _)| *k > 0).map(|(k, z)| (k, Complex64::new(z.norm(), 0.0)))).unwrap();
        let or = b3(&vr, &vr, &vr, 0.0);
        prop_assert!(or.iter().all(|(_, z)| z.im.abs() <= 1e-15 * or.max_abs().max(1.0)));
        prop_assert!(o.is_real_valued() || o.is_empty());
    }

    #[test]
    fn cubic_identity(k1 in -1000i64..1000, k2 in -1000i64..1000, k3 in -1000i64..1000) {
        let k = k1 + k2 + k3;
        prop_assert_eq!(cubic_phase(k1, k2, k3), k.pow(3) - k1.pow(3) - k2.pow(3) - k3.pow(3));
    }

    #[test]
    fn quartic_permutation_invariance(k in proptest::array::uniform4(-200i64..200)) {
        let base = quartic_phase(k[0], k[1], k[2], k[3]);
        prop_assert_eq!(base, quartic_phase(k[3], k[1], k[0], k[2]));
        prop_assert_eq!(base, quartic_phase(k[1], k[2], k[3], k[0]));
        prop_assert_eq!(base, quartic_phase(k[2], k[0], k[1], k[3]));
    }
}
