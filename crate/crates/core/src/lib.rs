//! Simulation toolkit for a micro qubit coupled to a small macro spin system
//! in a double-well potential.
//!
//! The macro system's collective `J_z` plays the role of a needle position.
//! Its dispersion is tracked under three kinds of dynamics:
//!
//! * a norm-conserving nonlinear Hamiltonian flow whose energy functional
//!   penalizes `J_z` dispersion with strength `w` ([`dynamics`]),
//! * continuous and jump-type spontaneous collapse ([`collapse`]),
//! * plain linear Schrödinger evolution (`w = 0`).
//!
//! [`experiments`] sweeps the hill height of the potential and fits the
//! resulting peak-dispersion curves with a two-segment model.

pub mod collapse;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod model;
pub mod observables;
pub mod operator;

#[cfg(test)]
pub(crate) mod oracle;

pub use error::{Error, Result};
pub use model::{ModelParams, StateVector};
pub use operator::HermitianOperator;

#[cfg(test)]
impl oracle::Entries for HermitianOperator {
    fn dense_real(&self) -> oracle::Dense {
        oracle::real_dense_from_entries(self.dim(), self.entries())
    }
}
