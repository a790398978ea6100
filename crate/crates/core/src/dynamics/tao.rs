//! Tao's extended-phase-space integrator.
//!
//! Writing `psi = q + i p`, the flow is Hamiltonian with `K(q, p) = F(psi) / 2`
//! and `dK/dq = Re g`, `dK/dp = Im g` where `g = dF/d(conj psi)`. Two copies
//! `(q, p)` and `(x, y)` evolve under
//!
//! ```text
//! K(q, y) + K(x, p) + omega/2 (|q - x|^2 + |p - y|^2)
//! ```
//!
//! whose three pieces each have an explicit exact flow. The base step is the
//! palindrome `A(h/2) B(h/2) C(h) B(h/2) A(h/2)`.

use num_complex::Complex64 as C64;

use super::{observe, IntegratorConfig, IntegratorOrder, NonlinearHamiltonian, Trajectory};
use crate::error::{Error, Result};
use crate::model::StateVector;

/// Two real phase-space copies of the state: `q + i p` and `x + i y`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl ExtendedState {
    pub fn from_state(psi: &StateVector) -> Self {
        let q: Vec<f64> = psi.amplitudes().iter().map(|a| a.re).collect();
        let p: Vec<f64> = psi.amplitudes().iter().map(|a| a.im).collect();
        Self { x: q.clone(), y: p.clone(), q, p }
    }

    /// Overwrites both copies with `psi`.
    pub fn reset_to(&mut self, psi: &StateVector) {
        for (i, a) in psi.amplitudes().iter().enumerate() {
            self.q[i] = a.re;
            self.x[i] = a.re;
            self.p[i] = a.im;
            self.y[i] = a.im;
        }
    }

    /// The first copy `q + i p`, which is the one observed.
    pub fn primary(&self) -> StateVector {
        StateVector::from_amplitudes(self.q.iter().zip(&self.p).map(|(&q, &p)| C64::new(q, p)).collect())
    }

    /// `||(q, p) - (x, y)||`.
    pub fn divergence(&self) -> f64 {
        let dq: f64 = self.q.iter().zip(&self.x).map(|(a, b)| (a - b) * (a - b)).sum();
        let dp: f64 = self.p.iter().zip(&self.y).map(|(a, b)| (a - b) * (a - b)).sum();
        (dq + dp).sqrt()
    }

    /// Largest component-wise difference to another extended state.
    pub fn max_abs_diff(&self, other: &ExtendedState) -> f64 {
        [(&self.q, &other.q), (&self.p, &other.p), (&self.x, &other.x), (&self.y, &other.y)]
            .iter()
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(u, v)| (u - v).abs()))
            .fold(0.0, f64::max)
    }
}

/// Triple-jump weights for the fourth-order composition.
fn triple_jump() -> [f64; 3] {
    let cbrt2 = 2f64.cbrt();
    let outer = 1.0 / (2.0 - cbrt2);
    [outer, -cbrt2 * outer, outer]
}

/// Stepper with preallocated scratch space.
pub struct TaoIntegrator<'a> {
    ham: &'a NonlinearHamiltonian,
    omega: f64,
    order: IntegratorOrder,
    psi: Vec<C64>,
    grad: Vec<C64>,
}

impl<'a> TaoIntegrator<'a> {
    pub fn new(ham: &'a NonlinearHamiltonian, omega: f64, order: IntegratorOrder) -> Self {
        let dim = ham.dim();
        Self { ham, omega, order, psi: vec![C64::new(0.0, 0.0); dim], grad: vec![C64::new(0.0, 0.0); dim] }
    }

    pub fn from_config(ham: &'a NonlinearHamiltonian, cfg: &IntegratorConfig) -> Self {
        Self::new(ham, cfg.omega_binding, cfg.order)
    }

    fn gradient_at(&mut self, re: &[f64], im: &[f64]) {
        for ((z, &a), &b) in self.psi.iter_mut().zip(re).zip(im) {
            *z = C64::new(a, b);
        }
        self.ham.gradient_into(&self.psi, &mut self.grad);
    }

    /// Flow of `K(q, y)`: moves `p` and `x`.
    fn flow_a(&mut self, s: &mut ExtendedState, h: f64) {
        self.gradient_at(&s.q, &s.y);
        for ((p, x), g) in s.p.iter_mut().zip(s.x.iter_mut()).zip(&self.grad) {
            *p -= h * g.re;
            *x += h * g.im;
        }
    }

    /// Flow of `K(x, p)`: moves `q` and `y`.
    fn flow_b(&mut self, s: &mut ExtendedState, h: f64) {
        self.gradient_at(&s.x, &s.p);
        for ((q, y), g) in s.q.iter_mut().zip(s.y.iter_mut()).zip(&self.grad) {
            *q += h * g.im;
            *y -= h * g.re;
        }
    }

    /// Exact flow of the binding term: rotates `(q - x, p - y)` by `2 omega h`.
    fn flow_c(&self, s: &mut ExtendedState, h: f64) {
        let (sin, cos) = (2.0 * self.omega * h).sin_cos();
        for i in 0..s.q.len() {
            let (sq, sp) = (s.q[i] + s.x[i], s.p[i] + s.y[i]);
            let (dq, dp) = (s.q[i] - s.x[i], s.p[i] - s.y[i]);
            let dq2 = cos * dq + sin * dp;
            let dp2 = -sin * dq + cos * dp;
            s.q[i] = 0.5 * (sq + dq2);
            s.p[i] = 0.5 * (sp + dp2);
            s.x[i] = 0.5 * (sq - dq2);
            s.y[i] = 0.5 * (sp - dp2);
        }
    }

    fn strang(&mut self, s: &mut ExtendedState, h: f64) {
        self.flow_a(s, h / 2.0);
        self.flow_b(s, h / 2.0);
        self.flow_c(s, h);
        self.flow_b(s, h / 2.0);
        self.flow_a(s, h / 2.0);
    }

    /// One step of size `h` (negative `h` steps backward).
    pub fn step(&mut self, s: &mut ExtendedState, h: f64) {
        match self.order {
            IntegratorOrder::Second => self.strang(s, h),
            IntegratorOrder::Fourth => {
                for c in triple_jump() {
                    self.strang(s, c * h);
                }
            }
        }
    }
}

/// Phase of the first component carrying at least half the largest weight.
///
/// The splitting mixes real and imaginary parts of the two copies, so a step
/// does not commute with a global phase. Runs start from `psi0` rotated by
/// minus this phase, which makes whole runs phase-equivariant.
pub(crate) fn canonical_phase(psi: &StateVector) -> f64 {
    let amps = psi.amplitudes();
    let max = amps.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    amps.iter().find(|a| a.norm_sqr() >= 0.5 * max).map_or(0.0, |a| a.arg())
}

/// One integrator step; fails if the copies drift apart beyond the bound.
pub fn tao_step(
    s: &ExtendedState,
    dt: f64,
    ham: &NonlinearHamiltonian,
    cfg: &IntegratorConfig,
) -> Result<ExtendedState> {
    let mut next = s.clone();
    TaoIntegrator::from_config(ham, cfg).step(&mut next, dt);
    let divergence = next.divergence();
    if divergence.is_nan() || divergence > cfg.divergence_bound {
        return Err(Error::StepFailure { t: dt, divergence, bound: cfg.divergence_bound });
    }
    Ok(next)
}

/// Runs `n_steps` steps of size `dt` starting at time `t0`, calling
/// `on_step(step_index, state)` after each one.
pub(crate) fn run_steps(
    ext: &mut ExtendedState,
    ham: &NonlinearHamiltonian,
    cfg: &IntegratorConfig,
    t0: f64,
    dt: f64,
    n_steps: usize,
    mut on_step: impl FnMut(usize, &mut ExtendedState) -> Result<()>,
) -> Result<()> {
    let mut stepper = TaoIntegrator::from_config(ham, cfg);
    for k in 1..=n_steps {
        stepper.step(ext, dt);
        let divergence = ext.divergence();
        if divergence.is_nan() || divergence > cfg.divergence_bound {
            return Err(Error::StepFailure { t: t0 + k as f64 * dt, divergence, bound: cfg.divergence_bound });
        }
        on_step(k, ext)?;
    }
    Ok(())
}

/// Integrates from `psi0` to `cfg.t_end`, sampling copy `(q, p)` every
/// `cfg.sample_every` steps. The norm is recorded, never restored.
pub fn integrate(psi0: &StateVector, ham: &NonlinearHamiltonian, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if psi0.dim() != ham.dim() {
        return Err(Error::DimensionMismatch { expected: ham.dim(), got: psi0.dim() });
    }
    let mut ext = ExtendedState::from_state(&psi0.phase_rotated(-canonical_phase(psi0)));
    let mut traj = Trajectory::default();
    traj.samples.push(observe(0.0, psi0.amplitudes(), ham)?);
    run_steps(&mut ext, ham, cfg, 0.0, cfg.dt, cfg.n_steps(), |k, s| {
        if k % cfg.sample_every == 0 {
            traj.samples.push(observe(k as f64 * cfg.dt, s.primary().amplitudes(), ham)?);
        }
        Ok(())
    })?;
    Ok(traj)
}

/// State at `cfg.t_end` (copy `(q, p)`), without sampling.
pub fn evolve(psi0: &StateVector, ham: &NonlinearHamiltonian, cfg: &IntegratorConfig) -> Result<StateVector> {
    cfg.validate()?;
    if psi0.dim() != ham.dim() {
        return Err(Error::DimensionMismatch { expected: ham.dim(), got: psi0.dim() });
    }
    let phase = canonical_phase(psi0);
    let mut ext = ExtendedState::from_state(&psi0.phase_rotated(-phase));
    run_steps(&mut ext, ham, cfg, 0.0, cfg.dt, cfg.n_steps(), |_, _| Ok(()))?;
    Ok(ext.primary().phase_rotated(phase))
}

/// Integrates to `t_total`, then back with step `-dt`; returns `||psi_back - psi0||`.
pub fn reversibility_defect(
    psi0: &StateVector,
    ham: &NonlinearHamiltonian,
    cfg: &IntegratorConfig,
    t_total: f64,
) -> Result<f64> {
    cfg.validate()?;
    let n = (t_total / cfg.dt).round() as usize;
    if n == 0 || (n as f64 * cfg.dt - t_total).abs() > 1e-9 * t_total.abs().max(1.0) {
        return Err(Error::invalid("T", format!("{t_total} is not a positive multiple of dt = {}", cfg.dt)));
    }
    let phase = canonical_phase(psi0);
    let mut ext = ExtendedState::from_state(&psi0.phase_rotated(-phase));
    run_steps(&mut ext, ham, cfg, 0.0, cfg.dt, n, |_, _| Ok(()))?;
    run_steps(&mut ext, ham, cfg, t_total, -cfg.dt, n, |_, _| Ok(()))?;
    Ok(ext.primary().phase_rotated(phase).distance(psi0))
}
