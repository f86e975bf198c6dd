//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use common::{all, characteristics_oracle, quad, tri, Tri};
use kdv_core::burgers::{blowup_scan, solve_implicit, AnalyticProfile};
use kdv_core::estimates::*;
use kdv_core::galerkin::*;
use kdv_core::inverse::{invert_dense, invert_explicit};
use kdv_core::operators::*;
use kdv_core::spectrum::{project, random_state, sobolev_norm, sobolev_norm_sq, Side};
use kdv_core::{Complex64, FourierState};
use std::panic;
use std::time::Instant;

type Outcome = (bool, String);

fn pair(a: f64) -> FourierState {
    FourierState::hermitian([(1, Complex64::new(a, 0.0))]).unwrap()
}

fn c1() -> Outcome {
    let v0 = random_state(2024, 32, 0.0, 1.0);
    let cfg = SimConfig { m: 32, dt: 1e-4, t_end: 1.0, n: 0, record_stride: 100, substeps: None };
    let drift = integrate(&v0, &cfg).unwrap().max_energy_drift;
    // halving at a fixed substep count halves the inner step
    let fixed = |dt: f64| {
        let c = SimConfig { dt, substeps: Some(1), ..cfg.clone() };
        integrate(&v0, &c).unwrap().max_energy_drift
    };
    let (d1, d2) = (fixed(1e-4), fixed(5e-5));
    let ratio = d1 / d2;
    let ok = drift < 1e-8 && (10.0..=100.0).contains(&ratio);
    (ok, format!("drift {drift:.2e} (substeps {}), halving {d1:.2e} -> {d2:.2e} = {ratio:.1}x", cfg.effective_substeps()))
}

fn c2() -> Outcome {
    let mut count = 0u64;
    let mut bad = 0u64;
    for k1 in -50i64..=50 {
        for k2 in -50i64..=50 {
            let k = k1 + k2;
            if k * k * k - k1 * k1 * k1 - k2 * k2 * k2 != quadratic_phase(k1, k2) {
                bad += 1;
            }
            for k3 in -50i64..=50 {
                let s = k1 + k2 + k3;
                count += 1;
                if s * s * s - k1 * k1 * k1 - k2 * k2 * k2 - k3 * k3 * k3 != cubic_phase(k1, k2, k3) {
                    bad += 1;
                }
            }
        }
    }
    // quartic phase through two cubic splittings: X = k1+k2, Y = k3+k4
    let r = 50i64;
    for k1 in -r..=r {
        for k2 in -r..=r {
            for k3 in -r..=r {
                for k4 in -r..=r {
                    let (x, y) = (k1 + k2, k3 + k4);
                    let expect = 3 * x * y * (x + y) + 3 * k1 * k2 * x + 3 * k3 * k4 * y;
                    if quartic_phase(k1, k2, k3, k4) != expect {
                        bad += 1;
                    }
                }
            }
        }
    }
    (bad == 0, format!("{count} triples and 101^4 quadruples, {bad} mismatches"))
}

/// Direct triple loop over the support, testing `(k1+k2)(k2+k3)(k3+k1) = 0`.
fn resonant_brute(v: &FourierState) -> (FourierState, [usize; 6]) {
    let mut acc = std::collections::BTreeMap::<i64, Complex64>::new();
    let mut counts = [0usize; 6];
    let modes: Vec<(i64, Complex64)> = v.iter().collect();
    for &(k1, a) in &modes {
        for &(k2, b) in &modes {
            for &(k3, c) in &modes {
                let k = k1 + k2 + k3;
                if k == 0 || (k1 + k2) * (k2 + k3) * (k3 + k1) != 0 {
                    continue;
                }
                let z = (k1 + k2 == 0, k2 + k3 == 0, k3 + k1 == 0);
                let class = match z {
                    (true, true, _) => 0,
                    (true, false, true) => 1,
                    (false, true, true) => 2,
                    (true, false, false) => 3,
                    (false, true, false) => 4,
                    _ => 5,
                };
                counts[class] += 1;
                *acc.entry(k).or_default() += a * b * c / k1 as f64;
            }
        }
    }
    (common::to_state(acc), counts)
}

fn c3() -> Outcome {
    let mut worst = 0.0f64;
    let mut counts = [0usize; 6];
    for seed in 0..100u64 {
        let v = random_state(3000 + seed, 32, 0.0, 0.5 + 0.01 * seed as f64);
        let e = sobolev_norm_sq(&v, 0.0);
        let (brute, cnt) = resonant_brute(&v);
        worst = worst.max(a_res(&v, e).rel_diff(&brute));
        for (a, b) in counts.iter_mut().zip(cnt) {
            *a += b;
        }
    }
    (worst <= 1e-14, format!("max rel {worst:.2e}; class sizes S1..S6 {counts:?}"))
}

fn c4() -> Outcome {
    let cfg = SimConfig { m: 16, dt: 1e-4, t_end: 0.5, n: 0, record_stride: 1, substeps: None };
    let tr = integrate(&pair(0.5), &cfg).unwrap();
    let samples = tr.times.len();
    let r1 = residual_first_form(&tr).unwrap();
    let r2 = residual_second_form(&tr).unwrap();
    let r30 = residual_third_form(&tr, 0).unwrap();
    let r3n: Vec<f64> = [2, 4, 8].iter().map(|&n| residual_third_form(&tr, n).unwrap()).collect();
    let ok = samples >= 1000 && r1 < 1e-6 && r2 < 1e-6 && r3n.iter().all(|&r| r < 1e-6) && (r30 - r2).abs() <= 1e-12;
    (
        ok,
        format!(
            "{samples} samples; first {r1:.2e}, second {r2:.2e}, third n=2,4,8 {:.2e} {:.2e} {:.2e}, |third(0) - second| {:.1e}",
            r3n[0],
            r3n[1],
            r3n[2],
            (r30 - r2).abs()
        ),
    )
}

fn complex_state(seed: u64, m: i64) -> FourierState {
    let a = random_state(seed, m, 0.0, 1.0);
    let b = random_state(seed ^ 0x9e37, m, 0.0, 1.0);
    FourierState::from_pairs(
        a.iter().map(|(k, z)| if k > 0 { (k, z) } else { (k, b.get(k) * Complex64::new(0.0, 1.0)) }),
    )
    .unwrap()
}

fn c5() -> Outcome {
    let mut worst = 0.0f64;
    let mut track = |x: f64| worst = worst.max(x);
    let m = 12;
    for trial in 0..50u64 {
        let t = [0.0, 0.013, 0.7, 3.3, 17.25][trial as usize % 5];
        let u = random_state(100 + trial, m, 0.0, 1.0);
        let v = complex_state(200 + trial, m);
        let w = random_state(300 + trial, m, 1.0, 1.0);
        let f = random_state(400 + trial, m, -0.5, 1.0);
        track(b1(&u, &v, t).rel_diff(&common::b1(&u, &v, t)));
        track(b2(&u, &v, t).rel_diff(&common::b2(&u, &v, t)));
        track(r3(&u, &v, &w, t).rel_diff(&tri(&u, &v, &w, t, Tri::All, all)));
        let (res, nres) = resonance_split(&u, &v, &w, t);
        track(res.rel_diff(&tri(&u, &v, &w, t, Tri::Res, all)));
        track(nres.rel_diff(&tri(&u, &v, &w, t, Tri::Nres, all)));
        track(b3(&u, &v, &w, t).rel_diff(&tri(&u, &v, &w, t, Tri::B3, all)));
        track(b4_1(&u, &v, &w, &f, t).rel_diff(&quad(&u, &v, &w, &f, t, 1, all, all, all)));
        track(b4_2(&u, &v, &w, &f, t).rel_diff(&quad(&u, &v, &w, &f, t, 2, all, all, all)));
        track(b4(&u, &v, &w, &f, t).rel_diff(&common::b4(&u, &v, &w, &f, t)));
        let n = 1 + (trial as i64 % 6);
        let (lo, hi) = (project(&v, n, Side::Low), project(&v, n, Side::High));
        let hw = project(&w, n, Side::High);
        let nres1 = tri(&u, &lo, &w, t, Tri::Nres, all).add(&tri(&u, &hi, &project(&w, n, Side::Low), t, Tri::Nres, all));
        track(r3_nres1_n(&u, &v, &w, t, n).rel_diff(&nres1));
        track(b30_n(&u, &v, &w, t, n).rel_diff(&tri(&u, &hi, &hw, t, Tri::B3, all)));
        track(b40_1_n(&u, &v, &w, &f, t, n).rel_diff(&quad(&project(&u, n, Side::High), &hi, &w, &f, t, 1, all, all, all)));
        let e2 = quad(&u, &hi, &w, &f, t, 2, all, |q| q.abs() > n, all);
        track(b40_2_n(&u, &v, &w, &f, t, n).rel_diff(&e2));
        let real = random_state(500 + trial, m, 0.0, 1.0);
        track(a_res(&real, sobolev_norm_sq(&real, 0.0)).rel_diff(&common::res_by_classes(&real, m)));
    }
    (worst <= 1e-14, format!("50 inputs at m=12, 14 operators, max rel {worst:.2e}"))
}

fn c6() -> Outcome {
    let mut agree = 0.0f64;
    let mut resid = 0.0f64;
    for seed in 0..50u64 {
        let phi = random_state(seed, 16, 0.0, 0.5 + 0.02 * seed as f64);
        let f = random_state(seed + 700, 16, 0.0, 1.0);
        let t = 0.173 * seed as f64;
        let e = invert_explicit(&phi, &f, t, 1.0 / 3.0, 256).unwrap();
        let d = invert_dense(&phi, &f, t, 1.0 / 3.0, 96).unwrap();
        agree = agree.max(sobolev_norm(&e.v.sub(&d.v), 0.0));
        resid = resid.max(e.residual).max(d.residual);
    }
    let f = random_state(1, 16, 0.0, 1.0);
    let zero = FourierState::new();
    let ident = invert_explicit(&zero, &f, 0.4, 1.0 / 3.0, 256).unwrap().v == f
        && invert_dense(&zero, &f, 0.4, 1.0 / 3.0, 32).unwrap().v == f;
    (agree < 1e-8 && resid < 1e-8 && ident, format!("max ||explicit - dense||_0 {agree:.2e}, max residual {resid:.2e}, phi=0 identity {ident}"))
}

fn c7() -> Outcome {
    // ||v0||_1 = 0.1
    let v0 = pair(0.1 / 2f64.sqrt());
    let mut msgs = Vec::new();
    let mut ok = true;
    for (label, cfg) in [
        ("first form", ContractionConfig::for_regularity(1.0, 0.05, 16, 2)),
        ("third form n=2", ContractionConfig::for_regularity(0.25, 0.05, 16, 2)),
    ] {
        let r = contraction_solve(&v0, &cfg).unwrap();
        let sim = SimConfig { m: 16, dt: 0.05 / cfg.intervals as f64, t_end: 0.05, n: 0, record_stride: 1, substeps: None };
        let tr = integrate(&v0, &sim).unwrap();
        let err = r.states.iter().zip(&tr.states).map(|(a, b)| sobolev_norm(&a.sub(b), 1.0)).fold(0.0, f64::max);
        ok &= r.converged && err < 1e-6 && r.max_ratio() < 0.5;
        msgs.push(format!("{label}: {} iterations, factor {:.1e}, H1 error {err:.1e}", r.iterations, r.max_ratio()));
    }
    (ok, msgs.join("; "))
}

fn c8() -> Outcome {
    let mut ok = true;
    let mut worst = (0.0f64, String::new());
    for m in [8, 16, 32] {
        for spec in appendix_default_specs() {
            let r = empirical_ratio(&spec, 1000, m, 8).unwrap();
            if let ConstantValue::Known(c) = r.constant {
                if r.max_ratio / c > worst.0 {
                    worst = (r.max_ratio / c, format!("{} m={m}", spec.label()));
                }
            }
            if !r.pass {
                ok = false;
                println!("  FAIL {} m={m}: {:.4} vs {:?}", spec.label(), r.max_ratio, r.constant);
            }
        }
    }
    let d = b30_decay(1.0, 2, 16, 1000, 32, 8).unwrap();
    ok &= d.pass;
    (
        ok,
        format!(
            "13 specs x m in {{8,16,32}} x 1000 trials; tightest {} at {:.3} of constant; B30 ratio(16)/ratio(2) {:.4} <= {:.4}",
            worst.1, worst.0, d.observed, d.predicted
        ),
    )
}

fn c9() -> Outcome {
    let grid = [0.2, 0.45, 0.7, 0.95, 1.2];
    let mut points: Vec<(f64, f64)> = grid.iter().flat_map(|&g| grid.iter().map(move |&d| (g, d))).collect();
    let t = 5.0 / 3.0;
    points.push((0.5 * 0.95 * t, 0.5 * 0.95 * t));
    points.push((0.5 * 1.05 * t, 0.5 * 1.05 * t));
    let (mut checked, mut skipped, mut wrong) = (0, 0, Vec::new());
    for p in [0.0, 1.0] {
        for &(g, d) in &points {
            let r = k3_verdict(p, g, d, 32).unwrap();
            if ((g + d) - t).abs() / t < K3_MARGIN - 1e-12 {
                skipped += 1;
                if r.verdict != Verdict::Inconclusive {
                    wrong.push(format!("p={p} g={g} d={d}: expected inconclusive"));
                }
                continue;
            }
            checked += 1;
            let expect = if g + d < t { Verdict::Converging } else { Verdict::Diverging };
            if r.verdict != expect {
                wrong.push(format!("p={p} g={g} d={d}: {:?} (ratio {:.3})", r.verdict, r.increment_ratio));
            }
        }
    }
    (wrong.is_empty(), format!("{checked} verdicts at cutoffs 32/64/128, {skipped} inconclusive points skipped; wrong: {wrong:?}"))
}

fn c10() -> Outcome {
    let c = Complex64::new;
    let lin = AnalyticProfile::linear(c(-1.0, 0.0), c(0.0, 0.0));
    let zs: Vec<Complex64> = (0..9).map(|j| c(j as f64 * 0.25 - 1.0, 0.1)).collect();
    let t_star = blowup_scan(&lin, 0.0, &zs, 2.0).unwrap().event.map(|e| e.t_star).unwrap_or(f64::NAN);
    let blow = (t_star - 1.0).abs() <= 1e-6;

    let d = 2f64.acosh();
    let rot = AnalyticProfile::sine(0.5, d);
    let zs: Vec<Complex64> = (0..32)
        .map(|j| c(2.0 * std::f64::consts::PI * j as f64 / 32.0, if j % 2 == 0 { 0.0 } else { 0.3 }))
        .collect();
    let scan = blowup_scan(&rot, 4.0, &zs, 100.0).unwrap();
    let finite = scan.event.is_none() && scan.min_denominator >= 0.5;

    let sine = AnalyticProfile::sine(0.1, 1.0);
    let mut err = 0.0f64;
    for &t in &[0.1, 0.5, 1.0, 2.0] {
        for j in 0..12 {
            let z = c(0.5 * j as f64, 0.05 * (j as f64 - 6.0));
            let s = solve_implicit(&sine, z, t, 0.0, 1e-15).unwrap();
            err = err.max((s.v - characteristics_oracle(&sine, z, t, 0.0, 4000)).norm());
        }
    }
    (
        blow && finite && err < 1e-8,
        format!(
            "phi=-z t* = {t_star:.9}; sup|phi'|=1, Omega=4: min|1+lambda phi'| = {:.4} over T=100; implicit vs characteristics {err:.1e}",
            scan.min_denominator
        ),
    )
}

fn c11() -> Outcome {
    let cfg = SimConfig { m: 16, dt: 1e-3, t_end: 1.0, n: 0, record_stride: 10, substeps: None };
    let windows = 4usize;
    let mut lines = Vec::new();
    let mut ok = true;
    for theta in [-0.5, 0.0, 1.0] {
        let series: Vec<LipschitzSeries> = (0..4u64)
            .map(|j| {
                let v0 = random_state(40 + j, 16, 0.0, 1.0);
                let w0 = v0.add(&random_state(90 + j, 16, theta, 1e-6));
                lipschitz_probe(&v0, &w0, theta, &cfg).unwrap()
            })
            .collect();
        // per-window maxima over all data pairs
        let mut wmax = vec![0.0f64; windows];
        for s in &series {
            for (t, r) in s.times.iter().zip(&s.ratios) {
                let w = ((t * windows as f64).ceil() as usize).clamp(1, windows) - 1;
                wmax[w] = wmax[w].max(*r);
            }
        }
        let l1 = wmax[0];
        let within = wmax.iter().enumerate().all(|(w, &x)| x.is_finite() && x <= l1.powi(w as i32 + 1) * (1.0 + 1e-9));
        ok &= within;
        let rates: Vec<String> = series.iter().map(|s| format!("{:.2}", s.growth_rate())).collect();
        lines.push(format!("theta={theta}: window maxima {wmax:.3?} vs L1^w, L1={l1:.3}, growth rates [{}]", rates.join(", ")));
    }
    (ok, lines.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("energy conservation", c1),
        ("phase identities", c2),
        ("resonant closed form", c3),
        ("form equivalence", c4),
        ("oracle equivalence", c5),
        ("L_phi inversion", c6),
        ("contraction solver", c7),
        ("operator bounds", c8),
        ("K3 summability", c9),
        ("Burgers model", c10),
        ("Lipschitz dependence", c11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = panic::catch_unwind(f).unwrap_or_else(|_| (false, "panicked".to_string()));
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {name}: {} [{:.1}s] {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
