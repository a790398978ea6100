use num_complex::Complex64 as C64;

use super::{spin::dicke_embedding, ModelParams, Sector};
use crate::error::{Error, Result};

/// Complex amplitude vector over the model Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(Vec<C64>);

impl StateVector {
    /// Wraps amplitudes as given, without normalizing.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Self {
        StateVector(amplitudes)
    }

    /// Wraps and normalizes to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let mut s = StateVector(amplitudes);
        s.normalize()?;
        Ok(s)
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[index] = C64::new(1.0, 0.0);
        StateVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.0
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.0
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroState);
        }
        self.0.iter_mut().for_each(|a| *a /= n);
        Ok(())
    }

    /// `e^{i theta} psi`.
    pub fn phase_rotated(&self, theta: f64) -> Self {
        let ph = C64::from_polar(1.0, theta);
        StateVector(self.0.iter().map(|a| a * ph).collect())
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Macro band of jz eigenstates `|m| <= halfwidth` with uniform amplitude,
/// tensored with the micro state `(|up> + |down>)/sqrt(2)`.
pub fn make_initial_state(params: &ModelParams) -> Result<StateVector> {
    params.validate()?;
    let j = params.total_spin();
    let hw = params.initial_band_halfwidth as f64;
    if params.n_macro % 2 == 1 && params.initial_band_halfwidth == 0 {
        return Err(Error::invalid(
            "initial_band_halfwidth",
            "odd n_macro has no m = 0 state; use halfwidth >= 1 or an even n_macro",
        ));
    }
    if hw > j {
        return Err(Error::invalid("initial_band_halfwidth", format!("{hw} exceeds total spin {j}")));
    }
    let sym_dim = params.n_macro + 1;
    let band: Vec<f64> = (0..sym_dim)
        .map(|k| if (-j + k as f64).abs() <= hw + 1e-12 { 1.0 } else { 0.0 })
        .collect();
    let count: f64 = band.iter().sum();
    let macro_sym: Vec<f64> = band.iter().map(|b| b / count.sqrt()).collect();

    let macro_amps = match params.sector {
        Sector::Symmetric => macro_sym,
        Sector::Full => dicke_embedding(params.n_macro, &macro_sym),
    };
    let micro = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = Vec::with_capacity(2 * macro_amps.len());
    for a in macro_amps {
        amps.push(C64::new(a * micro, 0.0));
        amps.push(C64::new(a * micro, 0.0));
    }
    StateVector::normalized(amps)
}
