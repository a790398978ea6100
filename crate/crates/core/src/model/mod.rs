//! Hilbert space, collective operators, and states for one micro qubit
//! coupled to `n_macro` macro qubits in a double-well potential.
//!
//! Basis ordering is macro ⊗ micro: index `2 * macro_index + s`, with micro
//! `s = 0` the σ_z = +1 ("up") state. In the symmetric sector the macro index
//! `k` labels the Dicke state with `m = -J + k`. In the full sector it is a
//! bitstring whose bit `i` set means macro qubit `i` points down.

mod ground;
mod potential;
pub(crate) mod spin;
mod state;

pub use ground::{ground_state, GroundState};
pub use potential::{
    potential_eval, potential_piecewise, PotentialParams, PotentialVariant, PIECEWISE_OUTER_HEIGHT, PIECEWISE_WIDTH,
};
pub use spin::{build_collective_operators, build_linear_hamiltonian, dicke_embedding, CollectiveOps};
pub use state::{make_initial_state, StateVector};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sector {
    /// Permutation-symmetric (Dicke) subspace of the macro qubits.
    Symmetric,
    /// All `2^n_macro` macro configurations.
    Full,
}

impl Sector {
    pub fn as_str(self) -> &'static str {
        match self {
            Sector::Symmetric => "symmetric",
            Sector::Full => "full",
        }
    }
}

impl std::str::FromStr for Sector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "symmetric" => Ok(Sector::Symmetric),
            "full" => Ok(Sector::Full),
            other => Err(format!("expected `symmetric` or `full`, got `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub n_macro: usize,
    /// Nonlinear coupling.
    pub w: f64,
    /// Micro–macro coupling.
    pub alpha: f64,
    /// Macro kinetic coefficient (multiplies J_x).
    pub b: f64,
    /// Optional micro self-term coefficient (multiplies σ_x of the micro qubit).
    pub micro_field: f64,
    pub potential: PotentialParams,
    pub sector: Sector,
    /// Regularizer of the dispersion functional.
    pub disp_epsilon: f64,
    pub initial_band_halfwidth: usize,
    /// Largest `n_macro` accepted in the full sector.
    pub max_full_n_macro: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            n_macro: 8,
            w: 2.2,
            alpha: 0.5,
            b: 0.5,
            micro_field: 0.0,
            potential: PotentialParams::default(),
            sector: Sector::Symmetric,
            disp_epsilon: 0.1,
            initial_band_halfwidth: 0,
            max_full_n_macro: 12,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_macro == 0 {
            return Err(Error::invalid("n_macro", "must be >= 1"));
        }
        if !(self.w.is_finite() && self.w >= 0.0) {
            return Err(Error::invalid("w", format!("must be finite and >= 0, got {}", self.w)));
        }
        for (name, v) in [("alpha", self.alpha), ("b", self.b), ("micro_field", self.micro_field)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if !(self.disp_epsilon.is_finite() && self.disp_epsilon > 0.0) {
            return Err(Error::invalid("disp_epsilon", format!("must be finite and > 0, got {}", self.disp_epsilon)));
        }
        self.potential.validate()?;
        if self.sector == Sector::Full && self.n_macro > self.max_full_n_macro {
            return Err(Error::DimensionTooLarge { dim: self.dim_unchecked(), limit: 1 << (self.max_full_n_macro + 1) });
        }
        Ok(())
    }

    /// Total spin `J = n_macro / 2` of the macro system.
    pub fn total_spin(&self) -> f64 {
        self.n_macro as f64 / 2.0
    }

    pub fn macro_dim(&self) -> usize {
        match self.sector {
            Sector::Symmetric => self.n_macro + 1,
            Sector::Full => 1usize.checked_shl(self.n_macro as u32).unwrap_or(usize::MAX),
        }
    }

    fn dim_unchecked(&self) -> usize {
        self.macro_dim().saturating_mul(2)
    }

    /// Hilbert dimension: `2 (n_macro + 1)` or `2^(n_macro + 1)`.
    pub fn dim(&self) -> usize {
        self.dim_unchecked()
    }

    pub fn with_height(&self, height: f64) -> Self {
        let mut p = self.clone();
        p.potential.height = height;
        p
    }

    pub fn with_w(&self, w: f64) -> Self {
        ModelParams { w, ..self.clone() }
    }
}
