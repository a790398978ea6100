//! Collapse dynamics: continuous (diffusive) collapse, GRW-style jumps and
//! the Diósi–Penrose time estimate.
//!
//! Both stochastic models localize the collective `J_z`. They run on the
//! linear Hamiltonian only; any nonlinear coupling in the model is ignored.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::dynamics::tao::{canonical_phase, run_steps};
use crate::dynamics::{observe, ExtendedState, IntegratorConfig, NonlinearHamiltonian, Trajectory};
use crate::error::{Error, Result};
use crate::model::{ModelParams, StateVector};

/// Reduced Planck constant in J s.
pub const HBAR: f64 = 1.054571817e-34;

const SEED_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug, PartialEq)]
pub struct CollapseParams {
    /// Collapse rate per macro constituent, 1/time.
    pub rate_lambda: f64,
    /// Localization width `r_C` in jz units.
    pub localization_width: f64,
    pub rng_seed: u64,
}

impl Default for CollapseParams {
    fn default() -> Self {
        Self { rate_lambda: 0.1, localization_width: 1.0, rng_seed: 0 }
    }
}

impl CollapseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate_lambda.is_finite() && self.rate_lambda >= 0.0) {
            return Err(Error::invalid("rate_lambda", format!("must be finite and >= 0, got {}", self.rate_lambda)));
        }
        if self.localization_width.is_nan() || self.localization_width <= 0.0 {
            return Err(Error::invalid(
                "localization_width",
                format!("must be > 0, got {}", self.localization_width),
            ));
        }
        Ok(())
    }

    pub fn with_seed(&self, rng_seed: u64) -> Self {
        Self { rng_seed, ..self.clone() }
    }
}

/// Seed of trajectory `index` in an ensemble started from `base`.
pub fn trajectory_seed(base: u64, index: u64) -> u64 {
    base ^ index.wrapping_mul(SEED_MIX)
}

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One Euler–Maruyama step of
/// `dpsi = -i H psi dt + sqrt(lambda) (J_z - <J_z>) psi dW - lambda/2 (J_z - <J_z>)^2 psi dt`,
/// followed by renormalization. Only the linear part of `ham` is used.
pub fn cc_step(
    psi: &StateVector,
    ham: &NonlinearHamiltonian,
    cp: &CollapseParams,
    dw: f64,
    dt: f64,
) -> Result<StateVector> {
    let amps = psi.amplitudes();
    let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if n == 0.0 {
        return Err(Error::ZeroState);
    }
    let mean: f64 = amps.iter().zip(&ham.jz_diag).map(|(a, m)| a.norm_sqr() * m).sum::<f64>() / n;
    let h_psi = ham.h_lin.apply(amps);
    let lam = cp.rate_lambda;
    let noise = lam.sqrt() * dw;
    let next = amps
        .iter()
        .zip(&h_psi)
        .zip(&ham.jz_diag)
        .map(|((&a, &h), &m)| {
            let d = m - mean;
            a - num_complex::Complex64::i() * h * dt + a * (noise * d - 0.5 * lam * d * d * dt)
        })
        .collect();
    StateVector::normalized(next)
}

/// Continuous-collapse trajectory from `psi0`, sampled like [`crate::dynamics::integrate`].
pub fn cc_run(
    psi0: &StateVector,
    model: &ModelParams,
    cp: &CollapseParams,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cp.validate()?;
    cfg.validate()?;
    let ham = NonlinearHamiltonian::from_model(&model.with_w(0.0))?;
    check_dim(psi0, &ham)?;
    let mut rng = rng_from_seed(cp.rng_seed);
    let sqrt_dt = cfg.dt.sqrt();
    let mut psi = psi0.clone();
    psi.normalize()?;
    let mut traj = Trajectory::default();
    traj.samples.push(observe(0.0, psi.amplitudes(), &ham)?);
    for k in 1..=cfg.n_steps() {
        let z: f64 = rng.sample(StandardNormal);
        psi = cc_step(&psi, &ham, cp, z * sqrt_dt, cfg.dt)?;
        if k % cfg.sample_every == 0 {
            traj.samples.push(observe(k as f64 * cfg.dt, psi.amplitudes(), &ham)?);
        }
    }
    Ok(traj)
}

/// A GRW jump: when it was applied and where it was centred.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jump {
    pub t: f64,
    pub center: f64,
}

fn localization_factor(m: f64, center: f64, r_c: f64) -> f64 {
    (-(m - center) * (m - center) / (4.0 * r_c * r_c)).exp()
}

/// Jump-centre probabilities `||L_c psi||^2`, normalized, for each `c` in `centers`.
pub fn jump_center_weights(psi: &StateVector, jz_diag: &[f64], centers: &[f64], r_c: f64) -> Vec<f64> {
    let mut w: Vec<f64> = centers
        .iter()
        .map(|&c| {
            psi.amplitudes()
                .iter()
                .zip(jz_diag)
                .map(|(a, &m)| a.norm_sqr() * localization_factor(m, c, r_c).powi(2))
                .sum()
        })
        .collect();
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.iter_mut().for_each(|x| *x /= total);
    }
    w
}

/// Draws a jump centre from the jz spectrum `centers`.
pub fn sample_jump_center<R: Rng + ?Sized>(
    psi: &StateVector,
    jz_diag: &[f64],
    centers: &[f64],
    r_c: f64,
    rng: &mut R,
) -> f64 {
    let weights = jump_center_weights(psi, jz_diag, centers, r_c);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (&c, &w) in centers.iter().zip(&weights) {
        acc += w;
        if u < acc {
            return c;
        }
    }
    *centers.last().expect("nonempty spectrum")
}

/// `L_c psi / ||L_c psi||` with `L_c = exp(-(J_z - c)^2 / (4 r_C^2))`.
pub fn apply_jump(psi: &StateVector, jz_diag: &[f64], center: f64, r_c: f64) -> Result<StateVector> {
    let amps = psi.amplitudes().iter().zip(jz_diag).map(|(&a, &m)| a * localization_factor(m, center, r_c)).collect();
    StateVector::normalized(amps)
}

/// Linear evolution interrupted by jumps at Poisson times of total rate
/// `rate_lambda * n_macro`. Jumps take effect at the first step boundary at
/// or after their drawn time; the recorded time is that boundary.
pub fn sc_run(
    psi0: &StateVector,
    model: &ModelParams,
    cp: &CollapseParams,
    cfg: &IntegratorConfig,
) -> Result<(Trajectory, Vec<Jump>)> {
    cp.validate()?;
    cfg.validate()?;
    let ham = NonlinearHamiltonian::from_model(&model.with_w(0.0))?;
    check_dim(psi0, &ham)?;
    let mut rng = rng_from_seed(cp.rng_seed);
    let rate = cp.rate_lambda * model.n_macro as f64;
    let waiting = if rate > 0.0 { Some(Exp::new(rate).map_err(|e| Error::invalid("rate_lambda", e.to_string()))?) } else { None };
    let mut next_jump = waiting.as_ref().map_or(f64::INFINITY, |d| d.sample(&mut rng));

    let mut ext = ExtendedState::from_state(&psi0.phase_rotated(-canonical_phase(psi0)));
    let mut traj = Trajectory::default();
    let mut jumps = Vec::new();
    traj.samples.push(observe(0.0, psi0.amplitudes(), &ham)?);
    let r_c = cp.localization_width;
    run_steps(&mut ext, &ham, cfg, 0.0, cfg.dt, cfg.n_steps(), |k, s| {
        let t = k as f64 * cfg.dt;
        if next_jump <= t {
            let mut psi = s.primary();
            while next_jump <= t {
                let center = sample_jump_center(&psi, &ham.jz_diag, &ham.m_values, r_c, &mut rng);
                psi = apply_jump(&psi, &ham.jz_diag, center, r_c)?;
                jumps.push(Jump { t, center });
                next_jump += waiting.as_ref().map_or(f64::INFINITY, |d| d.sample(&mut rng));
            }
            s.reset_to(&psi);
        }
        if k % cfg.sample_every == 0 {
            traj.samples.push(observe(t, s.primary().amplitudes(), &ham)?);
        }
        Ok(())
    })?;
    Ok((traj, jumps))
}

fn check_dim(psi: &StateVector, ham: &NonlinearHamiltonian) -> Result<()> {
    if psi.dim() != ham.dim() {
        return Err(Error::DimensionMismatch { expected: ham.dim(), got: psi.dim() });
    }
    Ok(())
}

/// Diósi–Penrose collapse time `hbar / delta_e` in seconds, `delta_e` in joules.
pub fn dp_collapse_time(delta_e: f64) -> Result<f64> {
    if delta_e.is_nan() || delta_e <= 0.0 {
        return Err(Error::invalid("delta_e", format!("must be > 0, got {delta_e}")));
    }
    Ok(HBAR / delta_e)
}
