//! Naive nested-loop oracles. Each term carries its own phase `e^{i Theta t}`.
#![allow(dead_code)]

use kdv_core::burgers::{lambda, AnalyticProfile, Profile};
use kdv_core::phase::cis_int;
use kdv_core::{Complex64, FourierState};
use std::collections::BTreeMap;

pub type Map = BTreeMap<i64, Complex64>;

pub fn to_state(m: Map) -> FourierState {
    FourierState::from_pairs(m.into_iter().filter(|(k, _)| *k != 0)).unwrap()
}

fn add(m: &mut Map, k: i64, z: Complex64) {
    *m.entry(k).or_default() += z;
}

pub fn all(_: i64) -> bool {
    true
}

pub fn b1(u: &FourierState, v: &FourierState, t: f64) -> FourierState {
    let mut o = Map::new();
    for (k1, a) in u.iter() {
        for (k2, b) in v.iter() {
            let k = k1 + k2;
            if k == 0 {
                continue;
            }
            let z = Complex64::new(0.0, 0.5 * k as f64) * cis_int(3 * k * k1 * k2, t) * a * b;
            add(&mut o, k, z);
        }
    }
    to_state(o)
}

pub fn b2(u: &FourierState, v: &FourierState, t: f64) -> FourierState {
    let mut o = Map::new();
    for (k1, a) in u.iter() {
        for (k2, b) in v.iter() {
            let k = k1 + k2;
            if k == 0 {
                continue;
            }
            add(&mut o, k, cis_int(3 * k * k1 * k2, t) * a * b / (k1 * k2) as f64);
        }
    }
    to_state(o)
}

#[derive(Clone, Copy, PartialEq)]
pub enum Tri {
    All,
    Res,
    Nres,
    B3,
}

/// Trilinear sums over `(k1,k2,k3)` with `pair(k2+k3)` filtering.
pub fn tri(u: &FourierState, v: &FourierState, w: &FourierState, t: f64, kind: Tri, pair: impl Fn(i64) -> bool) -> FourierState {
    let mut o = Map::new();
    for (k1, a) in u.iter() {
        for (k2, b) in v.iter() {
            for (k3, c) in w.iter() {
                let k = k1 + k2 + k3;
                if k == 0 || !pair(k2 + k3) {
                    continue;
                }
                let p = (k1 + k2) * (k2 + k3) * (k3 + k1);
                let z = match kind {
                    Tri::All => cis_int(3 * p, t) * a * b * c / k1 as f64,
                    Tri::Res if p == 0 => a * b * c / k1 as f64,
                    Tri::Nres if p != 0 => cis_int(3 * p, t) * a * b * c / k1 as f64,
                    Tri::B3 if p != 0 => cis_int(3 * p, t) * a * b * c / (k1 * p) as f64,
                    _ => continue,
                };
                add(&mut o, k, z);
            }
        }
    }
    to_state(o)
}

/// Quadrilinear sum; `which = 1` for `B4^1`, `2` for `B4^2`.
/// Filters act on `k1+k2`, `k3+k4`, `k2+k3+k4`.
pub fn quad(
    u: &FourierState,
    v: &FourierState,
    w: &FourierState,
    f: &FourierState,
    t: f64,
    which: u8,
    s12: impl Fn(i64) -> bool,
    s34: impl Fn(i64) -> bool,
    s234: impl Fn(i64) -> bool,
) -> FourierState {
    let mut o = Map::new();
    for (k1, a) in u.iter() {
        for (k2, b) in v.iter() {
            for (k3, c) in w.iter() {
                for (k4, d) in f.iter() {
                    let k = k1 + k2 + k3 + k4;
                    if k == 0 {
                        continue;
                    }
                    let den = (k1 + k2) * (k1 + k3 + k4) * (k2 + k3 + k4);
                    if den == 0 || !s12(k1 + k2) || !s34(k3 + k4) || !s234(k2 + k3 + k4) {
                        continue;
                    }
                    let phase = k.pow(3) - k1.pow(3) - k2.pow(3) - k3.pow(3) - k4.pow(3);
                    let wgt = if which == 1 {
                        1.0 / den as f64
                    } else {
                        (k3 + k4) as f64 / (k1 * den) as f64
                    };
                    add(&mut o, k, cis_int(phase, t) * a * b * c * d * wgt);
                }
            }
        }
    }
    to_state(o)
}

pub fn b4(u: &FourierState, v: &FourierState, w: &FourierState, f: &FourierState, t: f64) -> FourierState {
    let p1 = quad(u, v, w, f, t, 1, all, all, all);
    let p2 = quad(u, v, w, f, t, 2, all, all, all);
    p1.axpby(Complex64::new(0.5, 0.0), &p2, Complex64::new(1.0, 0.0))
}

/// Resonant sum by explicit enumeration of the six classes S1..S6.
pub fn res_by_classes(v: &FourierState, support: i64) -> FourierState {
    let mut o = Map::new();
    for k in -3 * support..=3 * support {
        if k == 0 {
            continue;
        }
        for r in kdv_core::operators::enumerate_resonant(k, support) {
            let z = v.get(r.k1) * v.get(r.k2) * v.get(r.k3) / r.k1 as f64;
            add(&mut o, k, z);
        }
    }
    to_state(o)
}

pub fn max_rel(a: &FourierState, b: &FourierState) -> f64 {
    a.rel_diff(b)
}

/// Foot of the characteristic through `z`: `zeta' = -lambda'(t) phi(zeta) / (1 + lambda phi'(zeta))`,
/// `zeta(0) = z`, integrated by RK4; then `v = phi(zeta(t))`.
pub fn characteristics_oracle(p: &AnalyticProfile, z: Complex64, t: f64, omega: f64, steps: usize) -> Complex64 {
    let rhs = |s: f64, zeta: Complex64| {
        let dl = Complex64::new(0.0, omega * s).exp();
        -dl * p.eval(zeta) / (1.0 + lambda(s, omega) * p.deriv(zeta))
    };
    let h = t / steps as f64;
    let mut zeta = z;
    for j in 0..steps {
        let s = j as f64 * h;
        let k1 = rhs(s, zeta);
        let k2 = rhs(s + h / 2.0, zeta + h / 2.0 * k1);
        let k3 = rhs(s + h / 2.0, zeta + h / 2.0 * k2);
        let k4 = rhs(s + h, zeta + h * k3);
        zeta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    p.eval(zeta)
}
