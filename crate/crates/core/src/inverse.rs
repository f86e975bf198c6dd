//! Inversion of `L_phi v = v - c B2(phi, v)`.
//!
//! In gauge variables `u_k = e^{-ik^3 t} v_k` the equation becomes the
//! periodic first-order problem `w' + a w = g + c~` with `w' = u`,
//! `a = c xi`, `xi' = psi`, `G' = g` and `c~ = mean(a w)`. Its solution is
//! `w = G + (C - int_0^x G a e^A + c~ int_0^x e^A) e^{-A}`, `A = int_0^x a`,
//! where `c~` makes `w` periodic and `C` makes it mean-free.

use crate::error::{Error, Result};
use crate::operators::b2;
use crate::phase::{cis_cube, cis_int};
use crate::spectrum::{sobolev_norm, FourierState};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const DENOM_FLOOR: f64 = 1e-30;
const PERIODICITY_TOL: f64 = 1e-10;

/// `v - c B2(phi, v, t)`.
pub fn apply_l(phi: &FourierState, v: &FourierState, t: f64, c: f64) -> FourierState {
    v.axpby(Complex64::new(1.0, 0.0), &b2(phi, v, t), Complex64::new(-c, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Explicit,
    Dense,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionReport {
    pub v: FourierState,
    pub c_tilde: Complex64,
    #[serde(rename = "C_const")]
    pub c_const: Complex64,
    /// `||L_phi v - f||_0`
    pub residual: f64,
    pub method: Method,
    /// 1-norm condition number (dense only)
    pub condition: Option<f64>,
    /// `|A(2 pi) - A(0)|` and `|w(2 pi) - w(0)|` (explicit only)
    pub periodicity_defect: f64,
    /// `|mean w|`
    pub mean_defect: f64,
    /// `|mean(a w) - c~|`
    pub c_tilde_defect: f64,
    /// set when `f` has modes beyond the dense cutoff
    pub tail_dropped: bool,
}

/// Recovers `c~ = mean(a w)` and `C = w(0)` from a solution `v`.
fn gauge_constants(phi: &FourierState, v: &FourierState, t: f64, c: f64) -> (Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let w = |k: i64| cis_cube(k, t).conj() * v.get(k) / (i * k as f64);
    let mut ct = Complex64::default();
    for (k, p) in phi.iter() {
        let a = c * cis_cube(k, t).conj() * p / (i * k as f64);
        ct += a * w(-k);
    }
    let c0 = v.iter().map(|(k, _)| w(k)).sum();
    (ct, c0)
}

struct Grid {
    n: usize,
    planner: FftPlanner<f64>,
}

impl Grid {
    fn new(n: usize) -> Self {
        Grid { n, planner: FftPlanner::new() }
    }

    fn wavenumber(&self, j: usize) -> i64 {
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    fn index(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// Samples `sum_k x_k e^{ikx}` on the grid.
    fn synth(&mut self, coeffs: impl Iterator<Item = (i64, Complex64)>) -> Vec<Complex64> {
        let mut buf = vec![Complex64::default(); self.n];
        for (k, z) in coeffs {
            buf[self.index(k)] += z;
        }
        self.planner.plan_fft_inverse(self.n).process(&mut buf);
        buf
    }

    /// Fourier coefficients of grid samples.
    fn analyze(&mut self, samples: &[Complex64]) -> Vec<Complex64> {
        let mut buf = samples.to_vec();
        self.planner.plan_fft_forward(self.n).process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|z| *z *= scale);
        buf
    }

    /// `int_0^x h - x mean(h)` on the grid (periodic part of the antiderivative).
    fn periodic_antiderivative(&mut self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        let n = self.n;
        let terms: Vec<(i64, Complex64)> = (0..n)
            .filter(|&j| j != 0 && !(n % 2 == 0 && j == n / 2))
            .map(|j| {
                let k = self.wavenumber(j);
                (k, coeffs[j] / (i * k as f64))
            })
            .collect();
        let mut out = self.synth(terms.iter().copied());
        let at0 = out[0];
        out.iter_mut().for_each(|z| *z -= at0);
        out
    }

    fn mean(&self, samples: &[Complex64]) -> Complex64 {
        samples.iter().sum::<Complex64>() / self.n as f64
    }
}

/// Explicit solution via the integrating factor on a uniform grid of `grid` points.
pub fn invert_explicit(phi: &FourierState, f: &FourierState, t: f64, c: f64, grid: usize) -> Result<InversionReport> {
    if !phi.is_real_valued() {
        return Err(Error::NotReal(phi.hermitian_defect()));
    }
    if !f.is_real_valued() {
        return Err(Error::NotReal(f.hermitian_defect()));
    }
    let need = 4 * (phi.support_bound() + f.support_bound());
    if (grid as i64) <= need {
        return Err(Error::Invalid(format!("grid {grid} must exceed {need}")));
    }
    if phi.is_empty() || c == 0.0 {
        // L is the identity; skip the grid roundoff
        return Ok(InversionReport {
            v: f.clone(),
            c_tilde: Complex64::default(),
            c_const: Complex64::default(),
            residual: 0.0,
            method: Method::Explicit,
            condition: None,
            periodicity_defect: 0.0,
            mean_defect: 0.0,
            c_tilde_defect: 0.0,
            tail_dropped: false,
        });
    }
    let i = Complex64::new(0.0, 1.0);
    let mut g = Grid::new(grid);
    let a = g.synth(phi.iter().map(|(k, p)| (k, c * cis_cube(k, t).conj() * p / (i * k as f64))));
    let a_coeffs = g.analyze(&a);
    let periodicity_a = (2.0 * PI * a_coeffs[0]).norm();
    if periodicity_a > PERIODICITY_TOL {
        return Err(Error::Invalid(format!("antiderivative of xi not periodic: defect {periodicity_a:e}")));
    }
    let big_a = g.periodic_antiderivative(&a_coeffs);
    let gg = g.synth(f.iter().map(|(k, z)| (k, cis_cube(k, t).conj() * z)));
    let g_c = g.analyze(&gg);
    let big_g = g.periodic_antiderivative(&g_c);
    let ea: Vec<Complex64> = big_a.iter().map(|z| z.exp()).collect();
    let ema: Vec<Complex64> = big_a.iter().map(|z| (-z).exp()).collect();
    let h: Vec<Complex64> = (0..grid).map(|j| big_g[j] * a[j] * ea[j]).collect();
    let h_c = g.analyze(&h);
    let q_c = g.analyze(&ea);
    if q_c[0].norm() < DENOM_FLOOR {
        return Err(Error::Singular("quadrature denominator of c~ vanishes".into()));
    }
    // P(2 pi) = 2 pi h_0 and Q(2 pi) = 2 pi q_0
    let c_tilde = h_c[0] / q_c[0];
    let r_c: Vec<Complex64> = h_c.iter().zip(&q_c).map(|(h, q)| h - c_tilde * q).collect();
    let r_lin = r_c[0];
    let r = g.periodic_antiderivative(&r_c);
    let den = g.mean(&ema);
    if den.norm() < DENOM_FLOOR {
        return Err(Error::Singular("quadrature denominator of C vanishes".into()));
    }
    let rema: Vec<Complex64> = (0..grid).map(|j| r[j] * ema[j]).collect();
    let c_const = (g.mean(&rema) - g.mean(&big_g)) / den;
    let w: Vec<Complex64> = (0..grid).map(|j| big_g[j] + (c_const - r[j]) * ema[j]).collect();
    let w_c = g.analyze(&w);
    let aw: Vec<Complex64> = (0..grid).map(|j| a[j] * w[j]).collect();
    let c_tilde_defect = (g.mean(&aw) - c_tilde).norm();
    let mut v = FourierState::new();
    for j in 1..grid {
        if grid % 2 == 0 && j == grid / 2 {
            continue;
        }
        let k = g.wavenumber(j);
        let z = cis_cube(k, t) * i * k as f64 * w_c[j];
        if z != Complex64::default() {
            v.put(k, z);
        }
    }
    let residual = sobolev_norm(&apply_l(phi, &v, t, c).sub(f), 0.0);
    Ok(InversionReport {
        v,
        c_tilde,
        c_const,
        residual,
        method: Method::Explicit,
        condition: None,
        periodicity_defect: periodicity_a.max(2.0 * PI * r_lin.norm()),
        mean_defect: w_c[0].norm(),
        c_tilde_defect,
        tail_dropped: false,
    })
}

/// LU-factored matrix of `L_phi` on modes `0 < |k| <= M`.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    m: i64,
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    condition: f64,
}

impl DenseOperator {
    fn slot(m: i64, k: i64) -> usize {
        if k < 0 {
            (k + m) as usize
        } else {
            (k + m - 1) as usize
        }
    }

    fn mode(m: i64, j: usize) -> i64 {
        let j = j as i64;
        if j < m {
            j - m
        } else {
            j - m + 1
        }
    }

    pub fn matrix(phi: &FourierState, t: f64, c: f64, m: i64) -> Result<DMatrix<Complex64>> {
        if m < 1 {
            return Err(Error::Invalid(format!("M must be >= 1, got {m}")));
        }
        let dim = 2 * m as usize;
        let mut a = DMatrix::<Complex64>::identity(dim, dim);
        for row in 0..dim {
            let k = Self::mode(m, row);
            for (k1, p) in phi.iter() {
                let k2 = k - k1;
                if k2 == 0 || k2.abs() > m {
                    continue;
                }
                let ph = cis_int(3 * k * k1 * k2, t);
                a[(row, Self::slot(m, k2))] -= c * ph * p / (k1 * k2) as f64;
            }
        }
        Ok(a)
    }

    pub fn assemble(phi: &FourierState, t: f64, c: f64, m: i64) -> Result<Self> {
        let a = Self::matrix(phi, t, c, m)?;
        let norm1 = |x: &DMatrix<Complex64>| {
            x.column_iter().map(|col| col.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
        };
        let lu = a.clone().lu();
        let inv = lu.try_inverse().ok_or_else(|| Error::Singular("L_phi matrix is singular".into()))?;
        let condition = norm1(&a) * norm1(&inv);
        if !condition.is_finite() || condition > 1e14 {
            return Err(Error::Singular(format!("condition estimate {condition:e}")));
        }
        Ok(DenseOperator { m, lu, condition })
    }

    pub fn cutoff(&self) -> i64 {
        self.m
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Solves on `0 < |k| <= M`; modes of `rhs` beyond `M` are ignored.
    pub fn solve(&self, rhs: &FourierState) -> Result<FourierState> {
        let m = self.m;
        let mut b = DVector::<Complex64>::zeros(2 * m as usize);
        for (k, z) in rhs.iter() {
            if k.abs() <= m {
                b[Self::slot(m, k)] = z;
            }
        }
        let x = self.lu.solve(&b).ok_or_else(|| Error::Singular("LU solve failed".into()))?;
        let mut out = FourierState::new();
        for (j, z) in x.iter().enumerate() {
            if *z != Complex64::default() {
                out.put(Self::mode(m, j), *z);
            }
        }
        Ok(out)
    }
}

/// Direct solve of the truncated system on `0 < |k| <= M`.
pub fn invert_dense(phi: &FourierState, f: &FourierState, t: f64, c: f64, m: i64) -> Result<InversionReport> {
    if m < phi.support_bound() {
        return Err(Error::Invalid(format!("M = {m} below the support of phi")));
    }
    let op = DenseOperator::assemble(phi, t, c, m)?;
    let v = op.solve(f)?;
    let tail_dropped = f.support_bound() > m;
    let residual = sobolev_norm(&apply_l(phi, &v, t, c).sub(f), 0.0);
    let (c_tilde, c_const) = gauge_constants(phi, &v, t, c);
    Ok(InversionReport {
        v,
        c_tilde,
        c_const,
        residual,
        method: Method::Dense,
        condition: Some(op.condition()),
        periodicity_defect: 0.0,
        mean_defect: 0.0,
        c_tilde_defect: 0.0,
        tail_dropped,
    })
}
