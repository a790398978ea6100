use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{build_collective_operators, ModelParams, StateVector};
use crate::model::spin::linear_hamiltonian_from_ops;
use crate::observables::{jz_moments, variance_from_moments};
use crate::operator::HermitianOperator;

/// Energy functional `<H_lin> + w D_eps(Var J_z)` together with the data the
/// integrators need to evaluate it.
///
/// `D_eps(v) = sqrt(v + eps^2) - eps` vanishes at zero variance, and so does
/// its contribution to the gradient, so jz eigenstates of a diagonal
/// `H_lin` stay exactly stationary.
#[derive(Clone, Debug)]
pub struct NonlinearHamiltonian {
    pub h_lin: HermitianOperator,
    /// Diagonal of `J_z` in the working basis.
    pub jz_diag: Vec<f64>,
    pub w: f64,
    pub epsilon: f64,
    /// Distinct jz eigenvalues, ascending.
    pub m_values: Vec<f64>,
    pub m_index: Vec<usize>,
}

impl NonlinearHamiltonian {
    pub fn new(h_lin: HermitianOperator, jz_diag: Vec<f64>, w: f64, epsilon: f64) -> Result<Self> {
        if jz_diag.len() != h_lin.dim() {
            return Err(Error::DimensionMismatch { expected: h_lin.dim(), got: jz_diag.len() });
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid("disp_epsilon", format!("must be finite and > 0, got {epsilon}")));
        }
        let mut m_values = jz_diag.clone();
        m_values.sort_by(f64::total_cmp);
        m_values.dedup();
        let m_index = jz_diag
            .iter()
            .map(|m| m_values.binary_search_by(|v| v.total_cmp(m)).expect("value present"))
            .collect();
        Ok(Self { h_lin, jz_diag, w, epsilon, m_values, m_index })
    }

    pub fn from_model(params: &ModelParams) -> Result<Self> {
        let ops = build_collective_operators(params)?;
        let h = linear_hamiltonian_from_ops(params, &ops);
        Self::new(h, ops.jz_diag, params.w, params.disp_epsilon)
    }

    /// Same system with a different nonlinear coupling.
    pub fn with_w(&self, w: f64) -> Self {
        Self { w, ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.jz_diag.len()
    }

    fn dispersion_penalty(&self, var: f64) -> f64 {
        // sqrt(v + e^2) - e without cancellation
        var / ((var + self.epsilon * self.epsilon).sqrt() + self.epsilon)
    }

    /// `<psi|H_lin|psi>/<psi|psi> + w D_eps(Var)`, the reported energy.
    pub fn hamiltonian_functional(&self, psi: &[C64]) -> Result<f64> {
        let n: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if n == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(self.h_lin.quadratic_form(psi).re / n + self.nonlinear_energy(psi))
    }

    /// `<psi|H_lin|psi> + w D_eps(Var)` with the linear part unnormalized.
    /// Equal to [`Self::hamiltonian_functional`] on the unit sphere; this is
    /// the function whose conjugate derivative is [`Self::effective_gradient`].
    pub fn generator(&self, psi: &[C64]) -> f64 {
        self.h_lin.quadratic_form(psi).re + self.nonlinear_energy(psi)
    }

    fn nonlinear_energy(&self, psi: &[C64]) -> f64 {
        if self.w == 0.0 {
            return 0.0;
        }
        let (m1, m2) = jz_moments(psi, &self.jz_diag);
        self.w * self.dispersion_penalty(variance_from_moments(m1, m2))
    }

    /// `dH/d(conj psi)`; the equation of motion is `i psi' = effective_gradient(psi)`.
    pub fn effective_gradient(&self, psi: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); psi.len()];
        self.gradient_into(psi, &mut out);
        out
    }

    pub fn gradient_into(&self, psi: &[C64], out: &mut [C64]) {
        self.h_lin.apply_into(psi, out);
        if self.w == 0.0 {
            return;
        }
        let mut norm = 0.0;
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for (a, &m) in psi.iter().zip(&self.jz_diag) {
            let p = a.norm_sqr();
            norm += p;
            s1 += p * m;
            s2 += p * m * m;
        }
        if norm == 0.0 {
            return;
        }
        let mean = s1 / norm;
        let var = (s2 / norm - mean * mean).max(0.0);
        // d Var / d conj(psi_k) = ((m_k - <m>)^2 - Var) psi_k / N
        let coef = self.w / (2.0 * (var + self.epsilon * self.epsilon).sqrt()) / norm;
        for ((o, a), &m) in out.iter_mut().zip(psi).zip(&self.jz_diag) {
            let d = m - mean;
            *o += a * (coef * (d * d - var));
        }
    }
}

/// See [`NonlinearHamiltonian::hamiltonian_functional`].
pub fn hamiltonian_functional(psi: &StateVector, ham: &NonlinearHamiltonian) -> Result<f64> {
    ham.hamiltonian_functional(psi.amplitudes())
}

/// See [`NonlinearHamiltonian::effective_gradient`].
pub fn effective_gradient(psi: &StateVector, ham: &NonlinearHamiltonian) -> Vec<C64> {
    ham.effective_gradient(psi.amplitudes())
}
