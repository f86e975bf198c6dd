//! Rotating complex Burgers equation `u_t + u u_z = i Omega u`.
//!
//! With `v = e^{-i Omega t} u` the solution is given implicitly by
//! `v = phi(z - lambda(t) v)`, `lambda(t) = (e^{i Omega t} - 1)/(i Omega)`, and
//! `dz v = phi'(zeta) / (1 + lambda phi'(zeta))` at the foot `zeta = z - lambda v`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const BLOWUP_THRESHOLD: f64 = 1e-3;
const SINGULAR_DENOMINATOR: f64 = 1e-8;
const MAX_ITER: usize = 200;
/// Fixed-point steps allowed before switching to Newton regardless of contraction.
const FIXED_POINT_BUDGET: usize = 50;
const T_RESOLUTION: f64 = 1e-6;

/// Analytic initial datum on the strip `|Im z| < d`.
pub trait Profile {
    fn eval(&self, z: Complex64) -> Complex64;
    fn deriv(&self, z: Complex64) -> Complex64;
    fn strip_halfwidth(&self) -> f64;
    /// Upper bound of `|phi|` on the strip (may be infinite).
    fn sup_phi(&self) -> f64;
    /// Upper bound of `|phi'|` on the strip (may be infinite).
    fn sup_dphi(&self) -> f64;
}

/// `phi(z) = a z + b + sum_k c_k e^{ikz}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticProfile {
    pub linear: Complex64,
    pub constant: Complex64,
    pub modes: Vec<(i64, Complex64)>,
    pub strip_halfwidth: f64,
}

impl AnalyticProfile {
    pub fn linear(a: Complex64, b: Complex64) -> Self {
        AnalyticProfile { linear: a, constant: b, modes: vec![], strip_halfwidth: f64::INFINITY }
    }

    /// `amp sin z` on `|Im z| < d`.
    pub fn sine(amp: f64, d: f64) -> Self {
        let c = Complex64::new(0.0, -0.5 * amp);
        Self::trig(vec![(1, c), (-1, -c)], d)
    }

    /// `amp cos z` on `|Im z| < d`.
    pub fn cosine(amp: f64, d: f64) -> Self {
        let c = Complex64::new(0.5 * amp, 0.0);
        Self::trig(vec![(1, c), (-1, c)], d)
    }

    pub fn trig(modes: Vec<(i64, Complex64)>, d: f64) -> Self {
        AnalyticProfile { linear: Complex64::default(), constant: Complex64::default(), modes, strip_halfwidth: d }
    }

    /// Max relative gap between `deriv` and a central difference of `eval`.
    pub fn derivative_defect(&self, samples: &[Complex64]) -> f64 {
        let h = 1e-5;
        samples
            .iter()
            .map(|&z| {
                let fd = (self.eval(z + h) - self.eval(z - h)) / (2.0 * h);
                let d = self.deriv(z);
                (fd - d).norm() / d.norm().max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

impl Profile for AnalyticProfile {
    fn eval(&self, z: Complex64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        self.linear * z + self.constant + self.modes.iter().map(|&(k, c)| c * (i * k as f64 * z).exp()).sum::<Complex64>()
    }

    fn deriv(&self, z: Complex64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        self.linear + self.modes.iter().map(|&(k, c)| i * k as f64 * c * (i * k as f64 * z).exp()).sum::<Complex64>()
    }

    fn strip_halfwidth(&self) -> f64 {
        self.strip_halfwidth
    }

    fn sup_phi(&self) -> f64 {
        if self.linear != Complex64::default() {
            return f64::INFINITY;
        }
        let d = self.strip_halfwidth;
        self.constant.norm() + self.modes.iter().map(|&(k, c)| c.norm() * (k.abs() as f64 * d).exp()).sum::<f64>()
    }

    fn sup_dphi(&self) -> f64 {
        let d = self.strip_halfwidth;
        self.linear.norm()
            + self.modes.iter().map(|&(k, c)| k.abs() as f64 * c.norm() * (k.abs() as f64 * d).exp()).sum::<f64>()
    }
}

/// `(e^{i Omega t} - 1)/(i Omega)`, with the Taylor series for small `|Omega t|`.
pub fn lambda(t: f64, omega: f64) -> Complex64 {
    let x = omega * t;
    if x.abs() < 1e-6 {
        return Complex64::new(t - omega * omega * t * t * t / 6.0, omega * t * t / 2.0);
    }
    let half = (0.5 * x).sin();
    Complex64::new(x.sin() / omega, 2.0 * half * half / omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicSolution {
    pub v: Complex64,
    pub dz_v: Complex64,
    /// `1 + lambda phi'(zeta)`
    pub denominator: Complex64,
    pub iterations: usize,
    pub converged: bool,
    pub used_newton: bool,
}

fn check_strip(p: &dyn Profile, z: Complex64) -> Result<()> {
    if z.im.abs() >= p.strip_halfwidth() {
        return Err(Error::OutOfRange(format!("Im z = {} outside strip of half-width {}", z.im, p.strip_halfwidth())));
    }
    Ok(())
}

/// Solves `v = phi(z - lambda v)` by fixed-point iteration from `guess`
/// (default `phi(z)`), switching to damped Newton after three steps that
/// fail to contract by 0.9 (or after a fixed budget of steps).
pub fn solve_from(
    p: &dyn Profile,
    z: Complex64,
    t: f64,
    omega: f64,
    tol: f64,
    guess: Option<Complex64>,
) -> Result<CharacteristicSolution> {
    check_strip(p, z)?;
    let lam = lambda(t, omega);
    let map = |v: Complex64| p.eval(z - lam * v);
    let mut v = guess.unwrap_or_else(|| p.eval(z));
    let mut iterations = 0;
    let mut converged = false;
    let mut used_newton = false;
    let mut prev_step = f64::INFINITY;
    let mut slow = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        let residual = v - map(v);
        if residual.norm() <= tol * v.norm().max(1.0) {
            converged = true;
            break;
        }
        if !used_newton {
            let step = residual.norm();
            slow = if step > 0.9 * prev_step { slow + 1 } else { 0 };
            prev_step = step;
            if slow >= 3 || iterations > FIXED_POINT_BUDGET {
                used_newton = true;
            } else {
                v -= residual;
                if !v.re.is_finite() || !v.im.is_finite() {
                    break;
                }
                continue;
            }
        }
        let jac = 1.0 + lam * p.deriv(z - lam * v);
        if jac.norm() < SINGULAR_DENOMINATOR {
            break;
        }
        let delta = residual / jac;
        if delta.norm() <= 4.0 * f64::EPSILON * v.norm().max(1.0) {
            v -= delta;
            converged = true;
            break;
        }
        let mut damp = 1.0;
        let r0 = residual.norm();
        loop {
            let trial = v - damp * delta;
            if (trial - map(trial)).norm() < r0 || damp < 1e-6 {
                v = trial;
                break;
            }
            damp *= 0.5;
        }
    }
    let zeta = z - lam * v;
    let dphi = p.deriv(zeta);
    let denominator = 1.0 + lam * dphi;
    if denominator.norm() < SINGULAR_DENOMINATOR {
        converged = false;
    }
    Ok(CharacteristicSolution { v, dz_v: dphi / denominator, denominator, iterations, converged, used_newton })
}

pub fn solve_implicit(p: &dyn Profile, z: Complex64, t: f64, omega: f64, tol: f64) -> Result<CharacteristicSolution> {
    solve_from(p, z, t, omega, tol, None)
}

/// `u = e^{i Omega t} v`.
pub fn u_value(sol: &CharacteristicSolution, t: f64, omega: f64) -> Complex64 {
    Complex64::new(0.0, omega * t).exp() * sol.v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupEvent {
    /// first time `min |1 + lambda phi'| < threshold` (bisected to 1e-6)
    pub t_threshold: f64,
    /// zero of the denominator extrapolated from the crossing
    pub t_star: f64,
    pub z: Complex64,
    pub denominator: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupScan {
    pub event: Option<BlowupEvent>,
    /// smallest `|1 + lambda phi'|` seen before any event
    pub min_denominator: f64,
    pub min_at_t: f64,
    pub min_at_z: Complex64,
    pub steps: usize,
}

struct Probe<'a> {
    p: &'a dyn Profile,
    omega: f64,
    zs: &'a [Complex64],
}

impl Probe<'_> {
    /// `(min |D|, index)` at time `t`; a failed solve counts as `|D| = 0`.
    fn min_den(&self, t: f64, warm: &mut [Option<Complex64>]) -> Result<(f64, usize)> {
        let mut best = (f64::INFINITY, 0);
        for (j, &z) in self.zs.iter().enumerate() {
            let sol = solve_from(self.p, z, t, self.omega, 1e-13, warm[j])?;
            let d = if sol.converged { sol.denominator.norm() } else { 0.0 };
            warm[j] = if sol.converged { Some(sol.v) } else { None };
            if d < best.0 {
                best = (d, j);
            }
        }
        Ok(best)
    }

    fn den_at(&self, t: f64, j: usize) -> Result<f64> {
        let sol = solve_implicit(self.p, self.zs[j], t, self.omega, 1e-14)?;
        Ok(if sol.converged { sol.denominator.norm() } else { 0.0 })
    }
}

/// Marches `t` over `[0, T]` and reports the first time the denominator
/// `min_z |1 + lambda phi'(zeta)|` falls below `BLOWUP_THRESHOLD`.
pub fn blowup_scan(p: &dyn Profile, omega: f64, z_samples: &[Complex64], t_end: f64) -> Result<BlowupScan> {
    if z_samples.is_empty() {
        return Err(Error::Invalid("no z samples".into()));
    }
    for &z in z_samples {
        check_strip(p, z)?;
    }
    let probe = Probe { p, omega, zs: z_samples };
    let mut h = (t_end / 2000.0).min(1e-2);
    if omega != 0.0 {
        h = h.min(2.0 * std::f64::consts::PI / omega.abs() / 64.0);
    }
    let mut warm = vec![None; z_samples.len()];
    let (d0, j0) = probe.min_den(0.0, &mut warm)?;
    let mut scan = BlowupScan { event: None, min_denominator: d0, min_at_t: 0.0, min_at_z: z_samples[j0], steps: 0 };
    let mut t = 0.0;
    while t < t_end {
        let t_next = (t + h).min(t_end);
        scan.steps += 1;
        let (d, j) = probe.min_den(t_next, &mut warm)?;
        if d < BLOWUP_THRESHOLD {
            let (mut lo, mut hi) = (t, t_next);
            let mut jw = j;
            while hi - lo > T_RESOLUTION * 0.5 {
                let mid = 0.5 * (lo + hi);
                let mut w = vec![None; z_samples.len()];
                let (dm, jm) = probe.min_den(mid, &mut w)?;
                if dm < BLOWUP_THRESHOLD {
                    hi = mid;
                    jw = jm;
                } else {
                    lo = mid;
                }
            }
            let dc = probe.den_at(lo, jw)?;
            let back = (lo - 1e-4).max(0.0);
            let db = probe.den_at(back, jw)?;
            let slope = (db - dc) / (lo - back);
            let t_star = if slope > 0.0 { lo + dc / slope } else { hi };
            scan.event = Some(BlowupEvent { t_threshold: hi, t_star, z: z_samples[jw], denominator: dc });
            return Ok(scan);
        }
        if d < scan.min_denominator {
            scan.min_denominator = d;
            scan.min_at_t = t_next;
            scan.min_at_z = z_samples[j];
        }
        t = t_next;
    }
    Ok(scan)
}
