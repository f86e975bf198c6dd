//! Browser bindings: a KdV profile, the Burgers denominator curve and
//! operator-bound ratios. The plain functions are native and tested; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use kdv_core::burgers::{lambda, AnalyticProfile, Profile};
use kdv_core::estimates::{empirical_ratio, BoundSpec, ConstantValue};
use kdv_core::galerkin::{integrate, SimConfig};
use kdv_core::spectrum::{to_physical, v_to_u};
use kdv_core::{Complex64, FourierState};
use wasm_bindgen::prelude::*;

/// Largest cutoff the page may request; keeps a run under a second.
pub const MAX_M: i64 = 16;

/// `u(x_j, t)` for the datum `amp cos x`, truncated at `m`, on `grid` points.
pub fn profile_samples(amp: f64, m: i64, t: f64, grid: usize) -> Result<Vec<f64>, String> {
    if !(1..=MAX_M).contains(&m) {
        return Err(format!("m must lie in 1..={MAX_M}"));
    }
    if !(0.0..=10.0).contains(&t) {
        return Err("t must lie in [0, 10]".into());
    }
    let v0 = FourierState::hermitian([(1, Complex64::new(0.5 * amp, 0.0))]).map_err(|e| e.to_string())?;
    let mut cfg = SimConfig { m, dt: 1e-3, t_end: t, n: 0, record_stride: 1, substeps: None };
    // record only the last step
    cfg.record_stride = cfg.steps().max(1);
    let tr = integrate(&v0, &cfg).map_err(|e| e.to_string())?;
    let t_final = *tr.times.last().expect("initial sample");
    let u = v_to_u(tr.final_state(), t_final);
    Ok(to_physical(&u, grid).map_err(|e| e.to_string())?.values)
}

/// `min_x |1 + lambda(t) phi'(x)|` for `phi = amp sin x` at `samples` times on `[0, t_end]`.
pub fn denominator_curve(amp: f64, omega: f64, t_end: f64, samples: usize) -> Result<Vec<f64>, String> {
    if samples < 2 || !(t_end > 0.0) {
        return Err("need t_end > 0 and at least two samples".into());
    }
    let p = AnalyticProfile::sine(amp, 1.0);
    let xs: Vec<Complex64> = (0..128).map(|j| Complex64::new(std::f64::consts::TAU * j as f64 / 128.0, 0.0)).collect();
    Ok((0..samples)
        .map(|i| {
            let t = t_end * i as f64 / (samples - 1) as f64;
            let l = lambda(t, omega);
            xs.iter().map(|&x| (1.0 + l * p.deriv(x)).norm()).fold(f64::INFINITY, f64::min)
        })
        .collect())
}

/// Ratios of one named bound over `trials` draws; the closed constant comes
/// first (`NaN` when none is known).
pub fn ratios(op: &str, s: f64, m: i64, trials: usize, seed: u64) -> Result<Vec<f64>, String> {
    if !(1..=2 * MAX_M).contains(&m) || trials == 0 || trials > 2000 {
        return Err(format!("need 1 <= m <= {} and 1 <= trials <= 2000", 2 * MAX_M));
    }
    let spec = match op {
        "b2" => BoundSpec::b2(s),
        "b3" => BoundSpec::b3(s),
        "r3" => BoundSpec::r3(s),
        "ares" => BoundSpec::ares(s),
        _ => return Err(format!("unknown operator {op:?} (b2, b3, r3, ares)")),
    }
    .map_err(|e| e.to_string())?;
    let r = empirical_ratio(&spec, trials, m, seed).map_err(|e| e.to_string())?;
    let head = match r.constant {
        ConstantValue::Known(c) => c,
        ConstantValue::Empirical => f64::NAN,
    };
    Ok(std::iter::once(head).chain(r.ratios).collect())
}

#[wasm_bindgen(js_name = kdvProfile)]
pub fn kdv_profile(amp: f64, m: i32, t: f64, grid: u32) -> Result<Vec<f64>, JsError> {
    profile_samples(amp, m as i64, t, grid as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = burgersDenominator)]
pub fn burgers_denominator(amp: f64, omega: f64, t_end: f64, samples: u32) -> Result<Vec<f64>, JsError> {
    denominator_curve(amp, omega, t_end, samples as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = boundRatios)]
pub fn bound_ratios(op: &str, s: f64, m: i32, trials: u32, seed: u32) -> Result<Vec<f64>, JsError> {
    ratios(op, s, m as i64, trials as usize, seed as u64).map_err(|e| JsError::new(&e))
}
