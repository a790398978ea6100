//! Nonlinear Hamiltonian evolution of the state.
//!
//! The flow `i psi' = dH/d(conj psi)` is integrated with Tao's explicit
//! symplectic method for nonseparable Hamiltonians ([`tao`]); a classic RK4
//! integrator ([`rk4`]) serves as an independent reference.

mod functional;
pub mod rk4;
pub mod tao;

pub use functional::{effective_gradient, hamiltonian_functional, NonlinearHamiltonian};
pub use rk4::{rk4_final_state, rk4_reference};
pub use tao::{evolve, integrate, reversibility_defect, tao_step, ExtendedState, TaoIntegrator};

use std::sync::atomic::{AtomicBool, Ordering};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::observables::{jz_moments, variance_from_moments};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegratorOrder {
    /// One palindromic Strang step.
    Second,
    /// Symmetric triple-jump composition of three Strang steps.
    Fourth,
}

impl IntegratorOrder {
    pub fn as_u32(self) -> u32 {
        match self {
            IntegratorOrder::Second => 2,
            IntegratorOrder::Fourth => 4,
        }
    }

    pub fn from_u32(order: u32) -> Option<Self> {
        match order {
            2 => Some(IntegratorOrder::Second),
            4 => Some(IntegratorOrder::Fourth),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Strength of the harmonic binding between the two phase-space copies.
    pub omega_binding: f64,
    /// Record one sample every this many steps.
    pub sample_every: usize,
    pub order: IntegratorOrder,
    /// Largest tolerated distance between the two phase-space copies.
    pub divergence_bound: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 10.0,
            omega_binding: 10.0,
            sample_every: 100,
            order: IntegratorOrder::Fourth,
            divergence_bound: 1e-3,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dt", format!("must be finite and > 0, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::invalid("t_end", format!("must be finite and > 0, got {}", self.t_end)));
        }
        if !(self.omega_binding.is_finite() && self.omega_binding > 0.0) {
            return Err(Error::invalid("omega_binding", format!("must be finite and > 0, got {}", self.omega_binding)));
        }
        if self.sample_every == 0 {
            return Err(Error::invalid("sample_every", "must be >= 1"));
        }
        if self.divergence_bound.is_nan() || self.divergence_bound <= 0.0 {
            return Err(Error::invalid("divergence_bound", "must be > 0"));
        }
        if self.n_steps() == 0 {
            return Err(Error::invalid("t_end", "shorter than one step"));
        }
        static WARNED: AtomicBool = AtomicBool::new(false);
        if self.dt * self.omega_binding >= 2.0 && !WARNED.swap(true, Ordering::Relaxed) {
            log::warn!(
                "dt * omega_binding = {} >= 2; the copy-binding rotation is poorly resolved",
                self.dt * self.omega_binding
            );
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// One recorded point of a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub norm: f64,
    pub energy: f64,
    pub mean_jz: f64,
    pub dispersion: f64,
    /// Probability per jz eigenvalue (ascending), micro index summed out.
    pub density: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn final_sample(&self) -> Option<&Sample> {
        self.samples.last()
    }
}

/// Observables of `psi` under `ham`; expectations are normalized, `norm` is not.
pub(crate) fn observe(t: f64, psi: &[C64], ham: &NonlinearHamiltonian) -> Result<Sample> {
    let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let energy = ham.hamiltonian_functional(psi)?;
    let (mean, mean_sq) = jz_moments(psi, &ham.jz_diag);
    let mut density = vec![0.0; ham.m_values.len()];
    for (a, &k) in psi.iter().zip(&ham.m_index) {
        density[k] += a.norm_sqr();
    }
    let total = norm * norm;
    density.iter_mut().for_each(|d| *d /= total);
    Ok(Sample { t, norm, energy, mean_jz: mean, dispersion: variance_from_moments(mean, mean_sq).sqrt(), density })
}
