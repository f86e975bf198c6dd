//! Operators with high-mode projections `Pi_{-n}` on selected arguments.

use super::{b3, b4_parts_windowed, r3_nres_windowed, QuadWindow, Window};
use crate::spectrum::{project, FourierState, Side};
use num_complex::Complex64;

fn hi(x: &FourierState, n: i64) -> FourierState {
    project(x, n, Side::High)
}

/// `R3nres(u, Pi_{-n} v, Pi_{-n} w)`.
pub fn r3_nres0_n(u: &FourierState, v: &FourierState, w: &FourierState, t: f64, n: i64) -> FourierState {
    r3_nres_windowed(u, &hi(v, n), &hi(w, n), t, Window::ALL)
}

/// `R3nres(u,v,w) - R3nres0`: the terms with at least one low mode in slots 2, 3.
pub fn r3_nres1_n(u: &FourierState, v: &FourierState, w: &FourierState, t: f64, n: i64) -> FourierState {
    r3_nres_windowed(u, v, w, t, Window::ALL)
        .sub(&r3_nres0_n(u, v, w, t, n))
        .pruned()
}

/// `B3(u, Pi_{-n} v, Pi_{-n} w)`.
pub fn b30_n(u: &FourierState, v: &FourierState, w: &FourierState, t: f64, n: i64) -> FourierState {
    b3(u, &hi(v, n), &hi(w, n), t)
}

/// `B4^1(Pi_{-n} u, Pi_{-n} v, w, f)`.
pub fn b40_1_n(u: &FourierState, v: &FourierState, w: &FourierState, f: &FourierState, t: f64, n: i64) -> FourierState {
    b4_parts_windowed(&hi(u, n), &hi(v, n), w, f, t, QuadWindow::ALL, QuadWindow::ALL).b4_1
}

/// `B4^2(u, Pi_{-n} v, w, f)` keeping only pairs `|k3+k4| > n`.
pub fn b40_2_n(u: &FourierState, v: &FourierState, w: &FourierState, f: &FourierState, t: f64, n: i64) -> FourierState {
    let win = QuadWindow { s34: Window::new(Some(n), None), ..QuadWindow::ALL };
    b4_parts_windowed(u, &hi(v, n), w, f, t, QuadWindow::ALL, win).b4_2
}

/// `B40 = B40^1 / 2 + B40^2`.
pub fn b40_n(u: &FourierState, v: &FourierState, w: &FourierState, f: &FourierState, t: f64, n: i64) -> FourierState {
    b40_1_n(u, v, w, f, t, n)
        .axpby(Complex64::new(0.5, 0.0), &b40_2_n(u, v, w, f, t, n), Complex64::new(1.0, 0.0))
        .pruned()
}
