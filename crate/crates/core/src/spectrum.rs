//! Zero-mean Fourier states, homogeneous Sobolev norms, projections and the
//! `u <-> v` gauge `v_k = e^{i k^3 t} u_k`.

use crate::error::{Error, Result};
use crate::phase::cis_cube;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Finitely supported map `k -> amplitude` on `k != 0`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Mode>", try_from = "Vec<Mode>")]
pub struct FourierState {
    entries: BTreeMap<i64, Complex64>,
}

/// Serialized form of one coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: i64,
    pub re: f64,
    pub im: f64,
}

impl From<FourierState> for Vec<Mode> {
    fn from(s: FourierState) -> Self {
        s.entries
            .iter()
            .map(|(&k, z)| Mode { k, re: z.re, im: z.im })
            .collect()
    }
}

impl TryFrom<Vec<Mode>> for FourierState {
    type Error = Error;
    fn try_from(modes: Vec<Mode>) -> Result<Self> {
        FourierState::from_pairs(modes.into_iter().map(|m| (m.k, Complex64::new(m.re, m.im))))
    }
}

/// Which side of a projection to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `|k| <= m`
    Low,
    /// `|k| > m`
    High,
    /// the `k = 0` coefficient
    Zero,
}

impl FourierState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a state, summing repeated keys. Rejects `k = 0` and non-finite values.
    pub fn from_pairs<I: IntoIterator<Item = (i64, Complex64)>>(pairs: I) -> Result<Self> {
        let mut s = FourierState::new();
        for (k, z) in pairs {
            if k == 0 {
                return Err(Error::ZeroMode);
            }
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite(k));
            }
            *s.entries.entry(k).or_insert(Complex64::new(0.0, 0.0)) += z;
        }
        Ok(s)
    }

    /// Real-valued state from amplitudes at positive `k`; `v_{-k}` is the conjugate.
    pub fn hermitian<I: IntoIterator<Item = (i64, Complex64)>>(positive: I) -> Result<Self> {
        let mut s = FourierState::new();
        for (k, z) in positive {
            if k <= 0 {
                return Err(Error::Invalid(format!("hermitian() takes k > 0, got {k}")));
            }
            s.set(k, z)?;
            s.set(-k, z.conj())?;
        }
        Ok(s)
    }

    pub fn set(&mut self, k: i64, z: Complex64) -> Result<()> {
        if k == 0 {
            return Err(Error::ZeroMode);
        }
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite(k));
        }
        self.entries.insert(k, z);
        Ok(())
    }

    /// Insert without validation; callers guarantee `k != 0`.
    pub(crate) fn put(&mut self, k: i64, z: Complex64) {
        debug_assert!(k != 0);
        self.entries.insert(k, z);
    }

    pub fn get(&self, k: i64) -> Complex64 {
        self.entries.get(&k).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.entries.iter().map(|(&k, &z)| (k, z))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest `|k|` carrying an entry (0 for the empty state).
    pub fn support_bound(&self) -> i64 {
        let lo = self.entries.keys().next().map_or(0, |k| k.abs());
        let hi = self.entries.keys().next_back().map_or(0, |k| k.abs());
        lo.max(hi)
    }

    /// `max_k |v_{-k} - conj(v_k)|`.
    pub fn hermitian_defect(&self) -> f64 {
        self.entries
            .iter()
            .map(|(&k, z)| (self.get(-k) - z.conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Hermitian up to `1e-12` relative to the largest amplitude.
    pub fn is_real_valued(&self) -> bool {
        self.hermitian_defect() <= 1e-12 * self.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Drops exact zeros.
    pub fn pruned(mut self) -> Self {
        self.entries.retain(|_, z| *z != Complex64::new(0.0, 0.0));
        self
    }

    pub fn scale(&self, c: Complex64) -> Self {
        FourierState {
            entries: self.entries.iter().map(|(&k, &z)| (k, c * z)).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `a*self + b*other`
    pub fn axpby(&self, a: Complex64, other: &Self, b: Complex64) -> Self {
        let mut out = self.scale(a);
        for (k, z) in other.iter() {
            *out.entries.entry(k).or_default() += b * z;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpby(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpby(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    /// `sum_k conj(self_k) other_k`
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.entries.iter().map(|(&k, z)| z.conj() * other.get(k)).sum()
    }

    /// `max_k |self_k - other_k|`
    pub fn max_diff(&self, other: &Self) -> f64 {
        let a = self.entries.iter().map(|(&k, z)| (z - other.get(k)).norm());
        let b = other.entries.iter().map(|(&k, z)| (self.get(k) - z).norm());
        a.chain(b).fold(0.0, f64::max)
    }

    /// Normwise relative difference `max|a-b| / max|b|` (absolute when `b = 0`).
    pub fn rel_diff(&self, reference: &Self) -> f64 {
        let d = self.max_diff(reference);
        let r = reference.max_abs();
        if r == 0.0 {
            d
        } else {
            d / r
        }
    }
}

/// `(sum_k |k|^{2s} |v_k|^2)^{1/2}`.
pub fn sobolev_norm(state: &FourierState, s: f64) -> f64 {
    sobolev_norm_sq(state, s).sqrt()
}

pub fn sobolev_norm_sq(state: &FourierState, s: f64) -> f64 {
    state
        .iter()
        .map(|(k, z)| (k.abs() as f64).powf(2.0 * s) * z.norm_sqr())
        .sum()
}

/// Fourier projection: `Low` keeps `|k| <= m`, `High` keeps `|k| > m`,
/// `Zero` returns the (always empty) mean.
pub fn project(state: &FourierState, m: i64, side: Side) -> FourierState {
    let keep = |k: i64| match side {
        Side::Low => k.abs() <= m,
        Side::High => k.abs() > m,
        Side::Zero => false,
    };
    FourierState {
        entries: state
            .entries
            .iter()
            .filter(|(&k, _)| keep(k))
            .map(|(&k, &z)| (k, z))
            .collect(),
    }
}

/// `v_k = e^{i k^3 t} u_k`.
pub fn u_to_v(state: &FourierState, t: f64) -> FourierState {
    gauge(state, t)
}

/// `u_k = e^{-i k^3 t} v_k`.
pub fn v_to_u(state: &FourierState, t: f64) -> FourierState {
    gauge(state, -t)
}

fn gauge(state: &FourierState, t: f64) -> FourierState {
    FourierState {
        entries: state
            .entries
            .iter()
            .map(|(&k, &z)| (k, cis_cube(k, t) * z))
            .collect(),
    }
}

/// Samples of a real-valued state on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalSamples {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    /// largest imaginary part discarded while summing
    pub max_imag: f64,
}

/// `sum_k v_k e^{i k x_j}` at `x_j = 2 pi j / grid`, by direct summation.
pub fn to_physical(state: &FourierState, grid: usize) -> Result<PhysicalSamples> {
    if !state.is_real_valued() {
        return Err(Error::NotReal(state.hermitian_defect()));
    }
    if (grid as i64) <= 2 * state.support_bound() {
        return Err(Error::Invalid(format!(
            "grid {grid} must exceed twice the support bound {}",
            state.support_bound()
        )));
    }
    let n = grid as i64;
    let mut x = Vec::with_capacity(grid);
    let mut values = Vec::with_capacity(grid);
    let mut max_imag: f64 = 0.0;
    for j in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, z) in state.iter() {
            // k j mod n keeps the angle argument small and exact
            let r = (k * j).rem_euclid(n) as f64;
            let th = 2.0 * std::f64::consts::PI * r / n as f64;
            acc += z * Complex64::new(th.cos(), th.sin());
        }
        x.push(2.0 * std::f64::consts::PI * j as f64 / n as f64);
        values.push(acc.re);
        max_imag = max_imag.max(acc.im.abs());
    }
    Ok(PhysicalSamples { x, values, max_imag })
}

/// Hermitian Gaussian state on `1 <= |k| <= m` with `|k|^{-s-1/2}` decay,
/// rescaled so that `sobolev_norm(., s) = target_norm`. Deterministic in `seed`.
pub fn random_state(seed: u64, m: i64, s: f64, target_norm: f64) -> FourierState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = FourierState::new();
    for k in 1..=m.max(1) {
        let a: f64 = StandardNormal.sample(&mut rng);
        let b: f64 = StandardNormal.sample(&mut rng);
        let w = (k as f64).powf(-s - 0.5);
        let z = Complex64::new(a, b) * w;
        st.put(k, z);
        st.put(-k, z.conj());
    }
    let nrm = sobolev_norm(&st, s);
    if nrm > 0.0 {
        st = st.scale_re(target_norm / nrm);
    }
    st
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn norm_examples() {
        let a = FourierState::from_pairs([(1, c(1.0, 0.0)), (-1, c(1.0, 0.0))]).unwrap();
        assert_relative_eq!(sobolev_norm(&a, 0.0), 2f64.sqrt());
        let b = FourierState::from_pairs([(2, c(0.0, 3.0)), (-2, c(0.0, -3.0))]).unwrap();
        assert_relative_eq!(sobolev_norm(&b, 1.0), 6.0 * 2f64.sqrt());
        let d = FourierState::from_pairs([(2, c(1.0, 0.0)), (-2, c(1.0, 0.0))]).unwrap();
        assert_relative_eq!(sobolev_norm(&d, -1.0), 0.5f64.sqrt());
        assert_eq!(sobolev_norm(&FourierState::new(), 3.0), 0.0);
    }

    #[test]
    fn rejects_zero_mode_and_nan() {
        assert!(matches!(
            FourierState::from_pairs([(0, c(1.0, 0.0))]),
            Err(Error::ZeroMode)
        ));
        assert!(matches!(
            FourierState::from_pairs([(3, c(f64::NAN, 0.0))]),
            Err(Error::NonFinite(3))
        ));
    }

    #[test]
    fn projection_examples() {
        let s = FourierState::hermitian([(1, c(1.0, 0.5)), (3, c(-2.0, 1.0))]).unwrap();
        let lo = project(&s, 2, Side::Low);
        let hi = project(&s, 2, Side::High);
        assert_eq!(lo.iter().map(|(k, _)| k).collect::<Vec<_>>(), vec![-1, 1]);
        assert_eq!(hi.iter().map(|(k, _)| k).collect::<Vec<_>>(), vec![-3, 3]);
        assert_eq!(project(&s, 3, Side::Low), s);
        assert!(project(&s, 0, Side::Zero).is_empty());
    }

    #[test]
    fn gauge_examples() {
        let s = FourierState::from_pairs([(1, c(1.0, 0.0))]).unwrap();
        assert_eq!(u_to_v(&s, 0.0), s);
        let r = u_to_v(&s, std::f64::consts::PI);
        assert!((r.get(1) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn physical_cosine() {
        let s = FourierState::from_pairs([(1, c(0.5, 0.0)), (-1, c(0.5, 0.0))]).unwrap();
        let p = to_physical(&s, 8).unwrap();
        for (x, y) in p.x.iter().zip(&p.values) {
            assert!((x.cos() - y).abs() < 1e-15);
        }
        let z = to_physical(&FourierState::new(), 8).unwrap();
        assert!(z.values.iter().all(|&y| y == 0.0));
    }

    #[test]
    fn physical_rejects_complex_state() {
        let s = FourierState::from_pairs([(1, c(1.0, 0.0))]).unwrap();
        assert!(matches!(to_physical(&s, 8), Err(Error::NotReal(_))));
    }

    #[test]
    fn random_state_examples() {
        let a = random_state(1, 8, 0.0, 1.0);
        assert!((sobolev_norm(&a, 0.0) - 1.0).abs() < 1e-12);
        assert_eq!(a, random_state(1, 8, 0.0, 1.0));
        assert_ne!(a, random_state(2, 8, 0.0, 1.0));
        assert!(a.is_real_valued());
        assert_eq!(a.support_bound(), 8);
    }

    #[test]
    fn json_round_trip() {
        let a = random_state(5, 4, 1.0, 2.0);
        let txt = serde_json::to_string(&a).unwrap();
        let b: FourierState = serde_json::from_str(&txt).unwrap();
        assert_eq!(a, b);
        assert!(serde_json::from_str::<FourierState>(r#"[{"k":0,"re":1,"im":0}]"#).is_err());
    }
}
