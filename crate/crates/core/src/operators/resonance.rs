use super::{r3_windowed, Window};
use crate::spectrum::FourierState;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The six disjoint pieces of the resonant set `(k1+k2)(k2+k3)(k3+k1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ResonantClass {
    /// `k1+k2 = 0` and `k2+k3 = 0`
    S1,
    /// `k1+k2 = 0` and `k3+k1 = 0`
    S2,
    /// `k2+k3 = 0` and `k3+k1 = 0`
    S3,
    /// only `k1+k2 = 0`
    S4,
    /// only `k2+k3 = 0`
    S5,
    /// only `k3+k1 = 0`
    S6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResonantTriple {
    pub k1: i64,
    pub k2: i64,
    pub k3: i64,
    pub class: ResonantClass,
}

impl ResonantTriple {
    /// Classifies a triple; `None` when it is nonresonant or sums to zero.
    pub fn classify(k1: i64, k2: i64, k3: i64) -> Option<Self> {
        if k1 + k2 + k3 == 0 {
            return None;
        }
        let (a, b, c) = (k1 + k2 == 0, k2 + k3 == 0, k3 + k1 == 0);
        let class = match (a, b, c) {
            (true, true, _) => ResonantClass::S1,
            (true, false, true) => ResonantClass::S2,
            (false, true, true) => ResonantClass::S3,
            (true, false, false) => ResonantClass::S4,
            (false, true, false) => ResonantClass::S5,
            (false, false, true) => ResonantClass::S6,
            (false, false, false) => return None,
        };
        Some(ResonantTriple { k1, k2, k3, class })
    }
}

/// All resonant triples with `k1+k2+k3 = k` and `0 < |ki| <= support`.
pub fn enumerate_resonant(k: i64, support: i64) -> Vec<ResonantTriple> {
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    for k1 in -support..=support {
        for k2 in -support..=support {
            let k3 = k - k1 - k2;
            if k1 == 0 || k2 == 0 || k3 == 0 || k3.abs() > support {
                continue;
            }
            if let Some(r) = ResonantTriple::classify(k1, k2, k3) {
                out.push(r);
            }
        }
    }
    out
}

/// `A_res(v)_k = (v_k / k)(energy - |v_k|^2)`.
pub fn a_res(v: &FourierState, energy: f64) -> FourierState {
    let mut out = FourierState::new();
    for (k, z) in v.iter() {
        out.put(k, z / k as f64 * (energy - z.norm_sqr()));
    }
    out.pruned()
}

/// Resonant part of `R3(u,v,w)` (no exponentials) over triples whose pair
/// sum `k2+k3` passes `pair`. Inclusion-exclusion over the three lines
/// `k1+k2 = 0`, `k2+k3 = 0`, `k3+k1 = 0`; the three cannot vanish together.
pub fn r3_res_windowed(u: &FourierState, v: &FourierState, w: &FourierState, pair: Window) -> FourierState {
    let bound = u.support_bound().max(v.support_bound()).max(w.support_bound());
    let mut out = FourierState::new();
    let vw0: Complex64 = if pair.keeps(0) {
        v.iter().map(|(j, z)| z * w.get(-j)).sum()
    } else {
        Complex64::new(0.0, 0.0)
    };
    for k in -bound..=bound {
        if k == 0 {
            continue;
        }
        let kf = k as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        // k1 + k2 = 0: (j, -j, k), pair k - j
        let wk = w.get(k);
        if wk != Complex64::new(0.0, 0.0) {
            let s: Complex64 = u
                .iter()
                .filter(|&(j, _)| pair.keeps(k - j))
                .map(|(j, a)| a * v.get(-j) / j as f64)
                .sum();
            acc += wk * s;
        }
        // k2 + k3 = 0: (k, j, -j), pair 0
        acc += u.get(k) / kf * vw0;
        // k3 + k1 = 0: (j, k, -j), pair k - j
        let vk = v.get(k);
        if vk != Complex64::new(0.0, 0.0) {
            let s: Complex64 = u
                .iter()
                .filter(|&(j, _)| pair.keeps(k - j))
                .map(|(j, a)| a * w.get(-j) / j as f64)
                .sum();
            acc += vk * s;
        }
        // pairwise intersections
        if pair.keeps(0) {
            acc -= u.get(k) * v.get(-k) * w.get(k) / kf;
            acc -= u.get(k) * v.get(k) * w.get(-k) / kf;
        }
        if pair.keeps(2 * k) {
            acc -= u.get(-k) * v.get(k) * w.get(k) / (-kf);
        }
        if acc != Complex64::new(0.0, 0.0) {
            out.put(k, acc);
        }
    }
    out
}

/// Nonresonant part of `R3` (with exponentials), same pair window.
pub fn r3_nres_windowed(u: &FourierState, v: &FourierState, w: &FourierState, t: f64, pair: Window) -> FourierState {
    // resonant phases are identically 1, so the full sum minus the resonant sum is exact
    r3_windowed(u, v, w, t, pair).sub(&r3_res_windowed(u, v, w, pair)).pruned()
}

/// `(res, nres)` with `res + nres = R3(u,v,w,t)`.
pub fn resonance_split(u: &FourierState, v: &FourierState, w: &FourierState, t: f64) -> (FourierState, FourierState) {
    let res = r3_res_windowed(u, v, w, Window::ALL);
    let nres = r3_nres_windowed(u, v, w, t, Window::ALL);
    (res, nres)
}
