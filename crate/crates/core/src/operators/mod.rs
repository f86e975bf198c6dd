//! Multilinear convolution operators on finitely supported states.
//!
//! Every phase `3(k1+k2)(k2+k3)(k3+k1)` or `(sum k)^3 - sum k^3` equals
//! `k^3 - sum_i k_i^3`, so each operator is a plain convolution of the
//! gauge variables `e^{-i k^3 t} v_k` followed by multiplication with
//! `e^{i k^3 t}`. The bilinear operators and `R3` cost `O(S^2)`, `B4` costs
//! `O(S^3)` by aggregating pair sums `k3 + k4`, and `B3` is a triple loop.

mod higher;
mod resonance;
mod split;

pub use higher::{b3, b3_windowed, b4, b4_1, b4_2, b4_parts_windowed, B4Parts, QuadWindow};
pub use resonance::{
    a_res, enumerate_resonant, r3_nres_windowed, r3_res_windowed, resonance_split, ResonantClass,
    ResonantTriple,
};
pub use split::{b30_n, b40_1_n, b40_2_n, b40_n, r3_nres0_n, r3_nres1_n};

use crate::phase::PhaseCache;
use crate::spectrum::FourierState;
use num_complex::Complex64;

/// `3(k1+k2)(k2+k3)(k3+k1)`.
pub fn cubic_phase(k1: i64, k2: i64, k3: i64) -> i64 {
    3 * (k1 + k2) * (k2 + k3) * (k3 + k1)
}

/// `(k1+k2+k3+k4)^3 - k1^3 - k2^3 - k3^3 - k4^3`.
pub fn quartic_phase(k1: i64, k2: i64, k3: i64, k4: i64) -> i64 {
    let k = k1 + k2 + k3 + k4;
    k * k * k - k1 * k1 * k1 - k2 * k2 * k2 - k3 * k3 * k3 - k4 * k4 * k4
}

/// `3 k k1 k2` with `k = k1 + k2`.
pub fn quadratic_phase(k1: i64, k2: i64) -> i64 {
    3 * (k1 + k2) * k1 * k2
}

/// Keeps `lo < |x| <= hi`; missing bounds are open.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Window {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl Window {
    pub const ALL: Window = Window { lo: None, hi: None };

    pub fn new(lo: Option<i64>, hi: Option<i64>) -> Self {
        Window { lo, hi }
    }

    /// `|x| <= hi`
    pub fn upto(hi: i64) -> Self {
        Window { lo: None, hi: Some(hi) }
    }

    /// `lo < |x| <= hi`
    pub fn between(lo: i64, hi: i64) -> Self {
        Window { lo: Some(lo), hi: Some(hi) }
    }

    #[inline]
    pub fn keeps(&self, x: i64) -> bool {
        let a = x.abs();
        self.lo.map_or(true, |l| a > l) && self.hi.map_or(true, |h| a <= h)
    }
}

/// Sparse list of gauge variables `(k, e^{-i k^3 t} x_k / k^p)`.
pub(crate) fn gauged(x: &FourierState, cache: &mut PhaseCache, inv_k: bool) -> Vec<(i64, Complex64)> {
    x.iter()
        .map(|(k, z)| {
            let mut g = cache.get(-k * k * k) * z;
            if inv_k {
                g /= k as f64;
            }
            (k, g)
        })
        .collect()
}

/// Dense accumulator over `-bound..=bound`.
pub(crate) struct Acc {
    bound: i64,
    c: Vec<Complex64>,
}

impl Acc {
    pub(crate) fn new(bound: i64) -> Self {
        Acc { bound, c: vec![Complex64::new(0.0, 0.0); (2 * bound + 1) as usize] }
    }

    #[inline]
    pub(crate) fn add(&mut self, k: i64, z: Complex64) {
        self.c[(k + self.bound) as usize] += z;
    }

    #[inline]
    pub(crate) fn get(&self, k: i64) -> Complex64 {
        if k.abs() > self.bound {
            Complex64::new(0.0, 0.0)
        } else {
            self.c[(k + self.bound) as usize]
        }
    }

    /// Multiplies entry `k` by `e^{i k^3 t} f(k)` and drops `k = 0` and exact zeros.
    pub(crate) fn finish(self, cache: &mut PhaseCache, f: impl Fn(i64) -> Complex64) -> FourierState {
        let mut out = FourierState::new();
        for (i, z) in self.c.into_iter().enumerate() {
            let k = i as i64 - self.bound;
            if k == 0 || z == Complex64::new(0.0, 0.0) {
                continue;
            }
            out.put(k, cache.get(k * k * k) * f(k) * z);
        }
        out
    }
}

fn one(_: i64) -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn bilinear(u: &FourierState, v: &FourierState, t: f64, inv_k: bool, f: impl Fn(i64) -> Complex64) -> FourierState {
    let mut cache = PhaseCache::new(t);
    let gu = gauged(u, &mut cache, inv_k);
    let gv = gauged(v, &mut cache, inv_k);
    let mut acc = Acc::new(u.support_bound() + v.support_bound());
    for &(k1, a) in &gu {
        for &(k2, b) in &gv {
            acc.add(k1 + k2, a * b);
        }
    }
    acc.finish(&mut cache, f)
}

/// `B1(u,v)_k = (ik/2) sum_{k1+k2=k} e^{i 3 k k1 k2 t} u_{k1} v_{k2}`.
pub fn b1(u: &FourierState, v: &FourierState, t: f64) -> FourierState {
    bilinear(u, v, t, false, |k| Complex64::new(0.0, 0.5 * k as f64))
}

/// `B2(u,v)_k = sum_{k1+k2=k} e^{i 3 k k1 k2 t} u_{k1} v_{k2} / (k1 k2)`.
pub fn b2(u: &FourierState, v: &FourierState, t: f64) -> FourierState {
    bilinear(u, v, t, true, one)
}

/// Explicit time derivative of `B2` at frozen arguments:
/// `sum 3 k k1 k2 e^{i 3 k k1 k2 t} u_{k1} v_{k2} / (k1 k2) = 3k sum e^{..} u v`.
pub fn b2_dt(u: &FourierState, v: &FourierState, t: f64) -> FourierState {
    bilinear(u, v, t, false, |k| Complex64::new(0.0, 3.0 * k as f64))
}

/// `R3(u,v,w)_k = sum_{k1+k2+k3=k} e^{i cubic_phase t} u_{k1} v_{k2} w_{k3} / k1`.
pub fn r3(u: &FourierState, v: &FourierState, w: &FourierState, t: f64) -> FourierState {
    r3_windowed(u, v, w, t, Window::ALL)
}

/// `R3` restricted to triples whose pair sum `k2 + k3` passes `pair`.
pub fn r3_windowed(u: &FourierState, v: &FourierState, w: &FourierState, t: f64, pair: Window) -> FourierState {
    let mut cache = PhaseCache::new(t);
    let gu = gauged(u, &mut cache, true);
    let gv = gauged(v, &mut cache, false);
    let gw = gauged(w, &mut cache, false);
    let qb = v.support_bound() + w.support_bound();
    let mut pairs = Acc::new(qb);
    for &(k2, b) in &gv {
        for &(k3, c) in &gw {
            pairs.add(k2 + k3, b * c);
        }
    }
    let mut acc = Acc::new(u.support_bound() + qb);
    for q in -qb..=qb {
        if !pair.keeps(q) {
            continue;
        }
        let p = pairs.get(q);
        if p == Complex64::new(0.0, 0.0) {
            continue;
        }
        for &(k1, a) in &gu {
            acc.add(k1 + q, a * p);
        }
    }
    acc.finish(&mut cache, one)
}
