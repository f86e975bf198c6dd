//! Galerkin-truncated system `dv/dt = Pi_m B1(Pi_m v, Pi_m v)` and the
//! integrated averaged forms it satisfies.
//!
//! The truncated forms need pair windows on the inner sums so that every
//! intermediate wavenumber produced by differentiating by parts stays in
//! `|k| <= m`. Triples with `k2 + k3 = 0` never arise from the first
//! differentiation and are excluded from `R3*` and from `B4^1`.

use crate::error::{Error, Result};
use crate::inverse::DenseOperator;
use crate::operators::{
    a_res, b1, b2, b3_windowed, b4_parts_windowed, r3_nres_windowed, r3_windowed, QuadWindow, Window,
};
use crate::phase::cis_cube;
use crate::spectrum::{project, sobolev_norm, sobolev_norm_sq, FourierState, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const GUARD: f64 = 1e12;
/// Largest `omega * h` tolerated inside an RK4 stage.
const PHASE_STEP: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub m: i64,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub n: i64,
    pub record_stride: usize,
    /// RK4 substeps per outer step; `None` picks `ceil(omega_max dt / 0.25)`.
    pub substeps: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { m: 16, dt: 1e-4, t_end: 0.5, n: 0, record_stride: 1, substeps: None }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::Invalid(format!("m must be >= 1, got {}", self.m)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::Invalid(format!("T must be >= 0, got {}", self.t_end)));
        }
        if self.n < 0 {
            return Err(Error::Invalid(format!("n must be >= 0, got {}", self.n)));
        }
        if self.record_stride == 0 {
            return Err(Error::Invalid("record_stride must be >= 1".into()));
        }
        if self.substeps == Some(0) {
            return Err(Error::Invalid("substeps must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of outer steps (`T / dt` rounded).
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn effective_substeps(&self) -> usize {
        self.substeps.unwrap_or_else(|| {
            ((max_phase_rate(self.m) * self.dt / PHASE_STEP).ceil() as usize).max(1)
        })
    }
}

/// `max |3 k k1 k2|` over `k = k1 + k2` with all three in `1 <= |.| <= m`.
pub fn max_phase_rate(m: i64) -> f64 {
    let mut best = 0i64;
    for k1 in 1..=m {
        for k2 in -m..=m {
            let k = k1 + k2;
            if k2 != 0 && k != 0 && k.abs() <= m {
                best = best.max((3 * k * k1 * k2).abs());
            }
        }
    }
    best as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub config: SimConfig,
    pub times: Vec<f64>,
    pub states: Vec<FourierState>,
    /// `||v(t)||_0^2` per recorded sample
    pub energy_series: Vec<f64>,
    /// max over every step of `| ||v(t)||_0 - ||v0||_0 | / ||v0||_0`
    pub max_energy_drift: f64,
    pub substeps: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &FourierState {
        self.states.last().expect("trajectory has at least one sample")
    }

    /// Relative drift of `||v||_0` over the recorded samples.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energy_series[0].sqrt();
        if e0 == 0.0 {
            return 0.0;
        }
        self.energy_series
            .iter()
            .map(|e| (e.sqrt() - e0).abs() / e0)
            .fold(0.0, f64::max)
    }
}

/// `Pi_m B1(Pi_m v, Pi_m v)`.
pub fn rhs_truncated(v: &FourierState, t: f64, m: i64) -> FourierState {
    let vm = project(v, m, Side::Low);
    project(&b1(&vm, &vm, t), m, Side::Low)
}

/// Hermitian engine on modes `1..=m`; `v_{-k} = conj(v_k)`.
struct Engine {
    m: usize,
    g: Vec<Complex64>,
    ph: Vec<Complex64>,
}

impl Engine {
    fn new(m: usize) -> Self {
        Engine { m, g: vec![Complex64::default(); 2 * m + 1], ph: vec![Complex64::default(); m + 1] }
    }

    fn rhs(&mut self, x: &[Complex64], t: f64, out: &mut [Complex64]) {
        let m = self.m as i64;
        for k in 1..=m {
            let p = cis_cube(k, t);
            self.ph[k as usize] = p;
            let gk = p.conj() * x[k as usize];
            self.g[(m + k) as usize] = gk;
            self.g[(m - k) as usize] = gk.conj();
        }
        self.g[m as usize] = Complex64::default();
        for k in 1..=m {
            let mut c = Complex64::default();
            for k1 in (k - m)..=m {
                c += self.g[(k1 + m) as usize] * self.g[(k - k1 + m) as usize];
            }
            out[k as usize] = Complex64::new(0.0, 0.5 * k as f64) * self.ph[k as usize] * c;
        }
    }
}

fn rk4_step(eng: &mut Engine, x: &mut [Complex64], t: f64, h: f64, s: &mut [Vec<Complex64>; 5]) {
    let n = x.len();
    let [k1, k2, k3, k4, tmp] = s;
    eng.rhs(x, t, k1);
    for i in 1..n {
        tmp[i] = x[i] + 0.5 * h * k1[i];
    }
    eng.rhs(tmp, t + 0.5 * h, k2);
    for i in 1..n {
        tmp[i] = x[i] + 0.5 * h * k2[i];
    }
    eng.rhs(tmp, t + 0.5 * h, k3);
    for i in 1..n {
        tmp[i] = x[i] + h * k3[i];
    }
    eng.rhs(tmp, t + h, k4);
    for i in 1..n {
        x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Classical RK4 on the truncated system. Modes `|k| > m` are frozen.
pub fn integrate(v0: &FourierState, cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if !v0.is_real_valued() {
        return Err(Error::NotReal(v0.hermitian_defect()));
    }
    let m = cfg.m as usize;
    let tail = project(v0, cfg.m, Side::High);
    let mut x = vec![Complex64::default(); m + 1];
    for k in 1..=m {
        x[k] = v0.get(k as i64);
    }
    let assemble = |x: &[Complex64]| {
        let mut s = tail.clone();
        for (k, &z) in x.iter().enumerate().skip(1) {
            if z != Complex64::default() {
                s.put(k as i64, z);
                s.put(-(k as i64), z.conj());
            }
        }
        s
    };
    let tail_energy = sobolev_norm_sq(&tail, 0.0);
    let energy = |x: &[Complex64]| tail_energy + 2.0 * x.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let e0 = energy(&x);
    let steps = cfg.steps();
    let sub = cfg.effective_substeps();
    let h = cfg.dt / sub as f64;
    let mut eng = Engine::new(m);
    let mut scratch: [Vec<Complex64>; 5] = std::array::from_fn(|_| vec![Complex64::default(); m + 1]);
    let mut traj = Trajectory {
        config: cfg.clone(),
        times: vec![0.0],
        states: vec![assemble(&x)],
        energy_series: vec![e0],
        max_energy_drift: 0.0,
        substeps: sub,
    };
    for step in 0..steps {
        let t0 = step as f64 * cfg.dt;
        for j in 0..sub {
            rk4_step(&mut eng, &mut x, t0 + j as f64 * h, h, &mut scratch);
        }
        let t = (step + 1) as f64 * cfg.dt;
        let amp = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(amp <= GUARD) {
            return Err(Error::Diverged { t, amp });
        }
        let e = energy(&x);
        if e0 > 0.0 {
            traj.max_energy_drift = traj.max_energy_drift.max((e.sqrt() - e0.sqrt()).abs() / e0.sqrt());
        }
        if (step + 1) % cfg.record_stride == 0 {
            traj.times.push(t);
            traj.states.push(assemble(&x));
            traj.energy_series.push(e);
        }
    }
    Ok(traj)
}

/// Galerkin-truncated operators of the averaged forms at cutoff `m`.
/// Inputs are projected to `|k| <= m`; outputs likewise.
#[derive(Debug, Clone, Copy)]
pub struct Truncated {
    pub m: i64,
}

impl Truncated {
    pub fn new(m: i64) -> Self {
        Truncated { m }
    }

    fn low(&self, v: &FourierState) -> FourierState {
        project(v, self.m, Side::Low)
    }

    fn pair(&self) -> Window {
        Window::between(0, self.m)
    }

    pub fn b2(&self, v: &FourierState, t: f64) -> FourierState {
        let vm = self.low(v);
        self.low(&b2(&vm, &vm, t))
    }

    pub fn b2_pair(&self, u: &FourierState, v: &FourierState, t: f64) -> FourierState {
        self.low(&b2(&self.low(u), &self.low(v), t))
    }

    /// `R3*`: all triples with `0 < |k2+k3| <= m`.
    pub fn r3_star(&self, v: &FourierState, t: f64) -> FourierState {
        let vm = self.low(v);
        self.low(&r3_windowed(&vm, &vm, &vm, t, self.pair()))
    }

    /// Resonant part of `R3*` as `A_res(v; energy) - (||v||^2/k) v + edge`,
    /// where `edge` collects the resonant pairs cut off by the window.
    /// With `energy = ||Pi_m v||^2` this equals the windowed resonant sum.
    pub fn resonant(&self, v: &FourierState, energy: f64) -> FourierState {
        let vm = self.low(v);
        let e_now = sobolev_norm_sq(&vm, 0.0);
        let m = self.m;
        let mut out = a_res(&vm, energy);
        for (k, z) in vm.iter() {
            let kf = k as f64;
            let mut edge = Complex64::default();
            if 2 * k.abs() > m {
                edge += z * z.norm_sqr() / kf;
            }
            let mut s = Complex64::default();
            for (j, y) in vm.iter() {
                if j.abs() != k.abs() && (k - j).abs() <= m {
                    s += y * vm.get(-j) / j as f64;
                }
            }
            edge += 2.0 * z * s;
            let cur = out.get(k);
            out.put(k, cur - e_now / kf * z + edge);
        }
        out
    }

    pub fn b3(&self, v: &FourierState, t: f64) -> FourierState {
        let vm = self.low(v);
        self.low(&b3_windowed(&vm, &vm, &vm, t, self.pair()))
    }

    fn quad_windows(&self, n: i64) -> (QuadWindow, QuadWindow) {
        let m = self.m;
        let w1 = QuadWindow { s12: Window::upto(m), s34: Window::between(0, m), s234: Window::ALL };
        let w2 = QuadWindow { s12: Window::ALL, s34: Window::between(n, m), s234: Window::upto(m) };
        (w1, w2)
    }

    pub fn b4(&self, v: &FourierState, t: f64) -> FourierState {
        self.b40(v, t, 0)
    }

    /// `B30^(n)`: slots 2, 3 projected to `|k| > n`.
    pub fn b30(&self, v: &FourierState, t: f64, n: i64) -> FourierState {
        let vm = self.low(v);
        let hi = project(&vm, n, Side::High);
        self.low(&b3_windowed(&vm, &hi, &hi, t, self.pair()))
    }

    /// `R3nres(v,v,v) - R3nres(v, Pi_{-n} v, Pi_{-n} v)`, windowed.
    pub fn r3_nres1(&self, v: &FourierState, t: f64, n: i64) -> FourierState {
        let vm = self.low(v);
        let hi = project(&vm, n, Side::High);
        let full = r3_nres_windowed(&vm, &vm, &vm, t, self.pair());
        let part = r3_nres_windowed(&vm, &hi, &hi, t, self.pair());
        self.low(&full.sub(&part))
    }

    /// `B40^(n) = B4^1(Pi_{-n} v, Pi_{-n} v, v, v)/2 + B4^2(v, Pi_{-n} v, v, v)|_{|k3+k4|>n}`.
    pub fn b40(&self, v: &FourierState, t: f64, n: i64) -> FourierState {
        let vm = self.low(v);
        let hi = project(&vm, n, Side::High);
        let (w1, w2) = self.quad_windows(n);
        let p1 = b4_parts_windowed(&hi, &hi, &vm, &vm, t, w1, QuadWindow::ALL).b4_1;
        let p2 = b4_parts_windowed(&vm, &hi, &vm, &vm, t, QuadWindow::ALL, w2).b4_2;
        self.low(&p1.axpby(Complex64::new(0.5, 0.0), &p2, Complex64::new(1.0, 0.0)))
    }
}

/// Cumulative integrals `int_0^{t_j}` on a uniform grid: composite Simpson,
/// a 3/8 panel at the end for odd `j`, and the quadratic through the first
/// three samples for `j = 1`.
pub fn cumulative_simpson(values: &[FourierState], h: f64) -> Result<Vec<FourierState>> {
    let n = values.len();
    if n < 3 {
        return Err(Error::TooFewSamples(n));
    }
    let c = |x: f64| Complex64::new(x, 0.0);
    let lin = |terms: &[(f64, usize)]| {
        let mut acc = FourierState::new();
        for &(w, i) in terms {
            acc = acc.axpby(c(1.0), &values[i], c(w * h));
        }
        acc
    };
    let mut even = vec![FourierState::new(); n];
    let mut out = vec![FourierState::new(); n];
    // even[j] = Simpson over [0, j] for even j
    let mut j = 2;
    while j < n {
        even[j] = even[j - 2].add(&lin(&[(1.0 / 3.0, j - 2), (4.0 / 3.0, j - 1), (1.0 / 3.0, j)]));
        j += 2;
    }
    for j in 1..n {
        out[j] = if j % 2 == 0 {
            even[j].clone()
        } else if j == 1 {
            lin(&[(5.0 / 12.0, 0), (8.0 / 12.0, 1), (-1.0 / 12.0, 2)])
        } else {
            even[j - 3].add(&lin(&[(3.0 / 8.0, j - 3), (9.0 / 8.0, j - 2), (9.0 / 8.0, j - 1), (3.0 / 8.0, j)]))
        };
    }
    Ok(out)
}

fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 3 {
        return Err(Error::TooFewSamples(times.len()));
    }
    let h = times[1] - times[0];
    for w in times.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1e-300) {
            return Err(Error::Invalid("recorded samples are not uniformly spaced".into()));
        }
    }
    Ok(h)
}

/// `max_j || [L(v)](t_j) - [L(v)](0) - int_0^{t_j} R(v) ||_0` over the recorded samples.
pub fn form_residual_series(
    traj: &Trajectory,
    lhs: impl Fn(&FourierState, f64) -> FourierState,
    rhs: impl Fn(&FourierState, f64) -> FourierState,
) -> Result<Vec<f64>> {
    let h = uniform_step(&traj.times)?;
    let m = traj.config.m;
    let ls: Vec<FourierState> = traj.times.iter().zip(&traj.states).map(|(&t, v)| lhs(v, t)).collect();
    let rs: Vec<FourierState> = traj.times.iter().zip(&traj.states).map(|(&t, v)| rhs(v, t)).collect();
    let ints = cumulative_simpson(&rs, h)?;
    Ok((0..ls.len())
        .map(|j| {
            let d = ls[j].sub(&ls[0]).sub(&ints[j]);
            sobolev_norm(&project(&d, m, Side::Low), 0.0)
        })
        .collect())
}

fn max_of(v: Vec<f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn ci(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// First form: `v - B2/6` changes by `-(i/6) int R3*`.
pub fn residual_first_form(traj: &Trajectory) -> Result<f64> {
    let op = Truncated::new(traj.config.m);
    let lhs = |v: &FourierState, t: f64| project(v, op.m, Side::Low).axpby(ci(1.0, 0.0), &op.b2(v, t), ci(-1.0 / 6.0, 0.0));
    let rhs = |v: &FourierState, t: f64| op.r3_star(v, t).scale(ci(0.0, -1.0 / 6.0));
    form_residual_series(traj, lhs, rhs).map(max_of)
}

/// Initial truncated energy `||Pi_m v(0)||^2`.
pub fn initial_energy(traj: &Trajectory) -> f64 {
    sobolev_norm_sq(&project(&traj.states[0], traj.config.m, Side::Low), 0.0)
}

/// Second form with the resonant energy argument supplied explicitly.
pub fn residual_second_form_with_energy(traj: &Trajectory, energy: f64) -> Result<f64> {
    let op = Truncated::new(traj.config.m);
    let lhs = |v: &FourierState, t: f64| {
        project(v, op.m, Side::Low)
            .axpby(ci(1.0, 0.0), &op.b2(v, t), ci(-1.0 / 6.0, 0.0))
            .axpby(ci(1.0, 0.0), &op.b3(v, t), ci(1.0 / 18.0, 0.0))
    };
    let rhs = |v: &FourierState, t: f64| {
        op.resonant(v, energy)
            .axpby(ci(0.0, -1.0 / 6.0), &op.b4(v, t), ci(0.0, 1.0 / 18.0))
    };
    form_residual_series(traj, lhs, rhs).map(max_of)
}

/// Second form: `v - B2/6 + B3/18` changes by `int -(i/6) R3*res + (i/18) B4`,
/// with `A_res` at the initial energy.
pub fn residual_second_form(traj: &Trajectory) -> Result<f64> {
    residual_second_form_with_energy(traj, initial_energy(traj))
}

/// Third form at split index `n`.
pub fn residual_third_form(traj: &Trajectory, n: i64) -> Result<f64> {
    if n < 0 {
        return Err(Error::Invalid(format!("n must be >= 0, got {n}")));
    }
    let op = Truncated::new(traj.config.m);
    let e0 = initial_energy(traj);
    let lhs = |v: &FourierState, t: f64| {
        project(v, op.m, Side::Low)
            .axpby(ci(1.0, 0.0), &op.b2(v, t), ci(-1.0 / 6.0, 0.0))
            .axpby(ci(1.0, 0.0), &op.b30(v, t, n), ci(1.0 / 18.0, 0.0))
    };
    let rhs = |v: &FourierState, t: f64| {
        op.resonant(v, e0)
            .add(&op.r3_nres1(v, t, n))
            .axpby(ci(0.0, -1.0 / 6.0), &op.b40(v, t, n), ci(0.0, 1.0 / 18.0))
    };
    form_residual_series(traj, lhs, rhs).map(max_of)
}

/// Which integral equation the contraction solver iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContractionForm {
    First,
    Third { n: i64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionConfig {
    pub m: i64,
    pub t_star: f64,
    /// recorded intervals on `[0, T*]` (even)
    pub intervals: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub form: ContractionForm,
}

impl ContractionConfig {
    /// Picks the first form for `s > 1/2` and the third form (`n`) otherwise.
    pub fn for_regularity(s: f64, t_star: f64, m: i64, n: i64) -> Self {
        let form = if s > 0.5 { ContractionForm::First } else { ContractionForm::Third { n } };
        ContractionConfig { m, t_star, intervals: 200, tol: 1e-10, max_iter: 100, form }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionResult {
    pub times: Vec<f64>,
    /// `v = v0 + y` at each time
    pub states: Vec<FourierState>,
    pub iterations: usize,
    /// successive sup-in-time `H^0` differences
    pub differences: Vec<f64>,
    /// `differences[j+1] / differences[j]`
    pub ratios: Vec<f64>,
    pub converged: bool,
}

impl ContractionResult {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

/// Picard iteration `y <- F(y)` for `y = v - v0` on a uniform grid over `[0, T*]`.
///
/// First form:
/// `L y = B2(y,y)/6 + (B2(v0,v0,t) - B2(v0,v0,0))/6 - (i/6) int R3*(v0+y)`,
/// with `L y = y - B2(v0, y)/3`, inverted by the dense truncated solver.
/// Third form adds `-(B30(v,t) - B30(v0,0))/18` and replaces `R3*` by
/// `R3*res + R3nres1 - B40/3`.
pub fn contraction_solve(v0: &FourierState, cfg: &ContractionConfig) -> Result<ContractionResult> {
    if !(cfg.t_star > 0.0) || cfg.intervals < 2 || cfg.intervals % 2 != 0 {
        return Err(Error::Invalid("need T* > 0 and an even number of intervals >= 2".into()));
    }
    let op = Truncated::new(cfg.m);
    let v0 = project(v0, cfg.m, Side::Low);
    let h = cfg.t_star / cfg.intervals as f64;
    let times: Vec<f64> = (0..=cfg.intervals).map(|j| j as f64 * h).collect();
    let zero_like = || vec![FourierState::new(); times.len()];
    if v0.is_empty() {
        return Ok(ContractionResult {
            states: zero_like(),
            times,
            iterations: 1,
            differences: vec![0.0],
            ratios: vec![],
            converged: true,
        });
    }
    let e0 = sobolev_norm_sq(&v0, 0.0);
    let b2_00 = op.b2(&v0, 0.0);
    let b30_00 = match cfg.form {
        ContractionForm::Third { n } => op.b30(&v0, 0.0, n),
        ContractionForm::First => FourierState::new(),
    };
    let solvers: Vec<DenseOperator> = times
        .iter()
        .map(|&t| DenseOperator::assemble(&v0, t, 1.0 / 3.0, cfg.m))
        .collect::<Result<_>>()?;
    let inhom: Vec<FourierState> = times
        .iter()
        .map(|&t| op.b2(&v0, t).sub(&b2_00).scale_re(1.0 / 6.0))
        .collect();
    let mut y = zero_like();
    let mut differences = Vec::new();
    let mut ratios = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..cfg.max_iter {
        iterations += 1;
        let vs: Vec<FourierState> = y.iter().map(|yj| v0.add(yj)).collect();
        let integrand: Vec<FourierState> = times
            .iter()
            .zip(&vs)
            .map(|(&t, v)| match cfg.form {
                ContractionForm::First => op.r3_star(v, t).scale(ci(0.0, -1.0 / 6.0)),
                ContractionForm::Third { n } => op
                    .resonant(v, e0)
                    .add(&op.r3_nres1(v, t, n))
                    .axpby(ci(0.0, -1.0 / 6.0), &op.b40(v, t, n), ci(0.0, 1.0 / 18.0)),
            })
            .collect();
        let ints = cumulative_simpson(&integrand, h)?;
        let mut next = Vec::with_capacity(times.len());
        for (j, &t) in times.iter().enumerate() {
            let mut rhs = op.b2(&y[j], t).scale_re(1.0 / 6.0).add(&inhom[j]).add(&ints[j]);
            if let ContractionForm::Third { n } = cfg.form {
                rhs = rhs.axpby(ci(1.0, 0.0), &op.b30(&vs[j], t, n).sub(&b30_00), ci(-1.0 / 18.0, 0.0));
            }
            next.push(if j == 0 { FourierState::new() } else { solvers[j].solve(&rhs)? });
        }
        let diff = next
            .iter()
            .zip(&y)
            .map(|(a, b)| sobolev_norm(&a.sub(b), 0.0))
            .fold(0.0, f64::max);
        if let Some(&prev) = differences.last() {
            if prev > 0.0 {
                ratios.push(diff / prev);
            }
        }
        differences.push(diff);
        y = next;
        if diff < cfg.tol {
            converged = true;
            break;
        }
        if let Some(&r) = ratios.last() {
            if r >= 1.0 && differences.len() > 3 {
                return Err(Error::NotContracting(r));
            }
        }
    }
    let states = y.iter().map(|yj| v0.add(yj).pruned()).collect();
    Ok(ContractionResult { times, states, iterations, differences, ratios, converged })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzSeries {
    pub theta: f64,
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
    /// set when the two initial states coincide (ratios are then zero)
    pub degenerate: bool,
}

impl LipschitzSeries {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest `C` with `ratio(t) <= e^{C t}` on the recorded samples.
    pub fn growth_rate(&self) -> f64 {
        self.times
            .iter()
            .zip(&self.ratios)
            .filter(|(t, r)| **t > 0.0 && **r > 0.0)
            .map(|(t, r)| r.ln() / t)
            .fold(0.0, f64::max)
    }
}

/// `||v(t) - w(t)||_theta / ||v0 - w0||_theta` along both trajectories.
pub fn lipschitz_probe(v0: &FourierState, w0: &FourierState, theta: f64, cfg: &SimConfig) -> Result<LipschitzSeries> {
    let d0 = sobolev_norm(&v0.sub(w0), theta);
    let a = integrate(v0, cfg)?;
    if d0 == 0.0 {
        return Ok(LipschitzSeries {
            theta,
            ratios: vec![0.0; a.times.len()],
            times: a.times,
            degenerate: true,
        });
    }
    let b = integrate(w0, cfg)?;
    let ratios = a
        .states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| sobolev_norm(&x.sub(y), theta) / d0)
        .collect();
    Ok(LipschitzSeries { theta, times: a.times, ratios, degenerate: false })
}
