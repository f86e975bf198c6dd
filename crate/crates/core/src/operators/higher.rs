use super::{gauged, Acc, Window};
use crate::phase::PhaseCache;
use crate::spectrum::FourierState;
use num_complex::Complex64;

/// `B3(u,v,w)_k = sum^{nonres} e^{i cubic_phase t} u v w / (k1 (k1+k2)(k2+k3)(k3+k1))`.
pub fn b3(u: &FourierState, v: &FourierState, w: &FourierState, t: f64) -> FourierState {
    b3_windowed(u, v, w, t, Window::ALL)
}

/// `B3` restricted to triples whose pair sum `k2+k3` passes `pair`.
pub fn b3_windowed(u: &FourierState, v: &FourierState, w: &FourierState, t: f64, pair: Window) -> FourierState {
    let mut cache = PhaseCache::new(t);
    let gu = gauged(u, &mut cache, true);
    let gv = gauged(v, &mut cache, false);
    let gw = gauged(w, &mut cache, false);
    let mut acc = Acc::new(u.support_bound() + v.support_bound() + w.support_bound());
    for &(k2, b) in &gv {
        for &(k3, c) in &gw {
            let l2 = k2 + k3;
            if l2 == 0 || !pair.keeps(l2) {
                continue;
            }
            let bc = b * c;
            for &(k1, a) in &gu {
                let l1 = k1 + k2;
                let l3 = k3 + k1;
                if l1 == 0 || l3 == 0 {
                    continue;
                }
                acc.add(k1 + l2, a * bc / (l1 * l2 * l3) as f64);
            }
        }
    }
    acc.finish(&mut cache, |_| Complex64::new(1.0, 0.0))
}

/// Windows on the partial sums of a quadrilinear term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadWindow {
    /// on `k1 + k2`
    pub s12: Window,
    /// on `k3 + k4`
    pub s34: Window,
    /// on `k2 + k3 + k4`
    pub s234: Window,
}

impl QuadWindow {
    pub const ALL: QuadWindow = QuadWindow { s12: Window::ALL, s34: Window::ALL, s234: Window::ALL };
}

/// The two quadrilinear sums making up `B4 = B4^1 / 2 + B4^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct B4Parts {
    pub b4_1: FourierState,
    pub b4_2: FourierState,
}

impl B4Parts {
    pub fn total(&self) -> FourierState {
        self.b4_1.axpby(Complex64::new(0.5, 0.0), &self.b4_2, Complex64::new(1.0, 0.0)).pruned()
    }
}

/// Both parts of `B4` with independent windows.
///
/// `B4^1` has weight `1/((k1+k2)(k1+k3+k4)(k2+k3+k4))`, `B4^2` has weight
/// `(k3+k4)/(k1 (k1+k2)(k1+k3+k4)(k2+k3+k4))`, both with phase
/// `quartic_phase`, summed where the three denominator factors are nonzero.
/// The inner pair `k3+k4 = q` is aggregated first.
pub fn b4_parts_windowed(
    u: &FourierState,
    v: &FourierState,
    w: &FourierState,
    f: &FourierState,
    t: f64,
    win1: QuadWindow,
    win2: QuadWindow,
) -> B4Parts {
    let mut cache = PhaseCache::new(t);
    let gu = gauged(u, &mut cache, false);
    let gv = gauged(v, &mut cache, false);
    let gw = gauged(w, &mut cache, false);
    let gf = gauged(f, &mut cache, false);
    let qb = w.support_bound() + f.support_bound();
    let mut pairs = Acc::new(qb);
    for &(k3, c) in &gw {
        for &(k4, d) in &gf {
            pairs.add(k3 + k4, c * d);
        }
    }
    let bound = u.support_bound() + v.support_bound() + qb;
    let mut acc1 = Acc::new(bound);
    let mut acc2 = Acc::new(bound);
    for q in -qb..=qb {
        let p = pairs.get(q);
        let use1 = win1.s34.keeps(q);
        let use2 = q != 0 && win2.s34.keeps(q);
        if p == Complex64::new(0.0, 0.0) || !(use1 || use2) {
            continue;
        }
        for &(k2, b) in &gv {
            let l3 = k2 + q;
            if l3 == 0 {
                continue;
            }
            let bp = b * p;
            let w1_234 = use1 && win1.s234.keeps(l3);
            let w2_234 = use2 && win2.s234.keeps(l3);
            if !(w1_234 || w2_234) {
                continue;
            }
            for &(k1, a) in &gu {
                let l1 = k1 + k2;
                let l2 = k1 + q;
                if l1 == 0 || l2 == 0 {
                    continue;
                }
                let d = (l1 * l2 * l3) as f64;
                let term = a * bp;
                let k = l1 + q;
                if w1_234 && win1.s12.keeps(l1) {
                    acc1.add(k, term / d);
                }
                if w2_234 && win2.s12.keeps(l1) {
                    acc2.add(k, term * (q as f64 / (k1 as f64 * d)));
                }
            }
        }
    }
    let one = |_| Complex64::new(1.0, 0.0);
    B4Parts {
        b4_1: acc1.finish(&mut cache, one),
        b4_2: acc2.finish(&mut cache, one),
    }
}

pub fn b4_1(u: &FourierState, v: &FourierState, w: &FourierState, f: &FourierState, t: f64) -> FourierState {
    b4_parts_windowed(u, v, w, f, t, QuadWindow::ALL, QuadWindow::ALL).b4_1
}

pub fn b4_2(u: &FourierState, v: &FourierState, w: &FourierState, f: &FourierState, t: f64) -> FourierState {
    b4_parts_windowed(u, v, w, f, t, QuadWindow::ALL, QuadWindow::ALL).b4_2
}

/// `B4 = B4^1 / 2 + B4^2`.
pub fn b4(u: &FourierState, v: &FourierState, w: &FourierState, f: &FourierState, t: f64) -> FourierState {
    b4_parts_windowed(u, v, w, f, t, QuadWindow::ALL, QuadWindow::ALL).total()
}
