#![allow(dead_code)]

use catsim::dynamics::NonlinearHamiltonian;
use catsim::model::{PotentialParams, PotentialVariant, Sector};
use catsim::{ModelParams, StateVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random small model: n_macro in 1..=4, either sector, random couplings.
pub fn random_model(rng: &mut ChaCha8Rng, w: Option<f64>) -> ModelParams {
    let n_macro = rng.random_range(1..=4);
    ModelParams {
        n_macro,
        w: w.unwrap_or_else(|| rng.random_range(0.0..3.0)),
        alpha: rng.random_range(-1.0..1.0),
        b: rng.random_range(0.0..1.0),
        micro_field: rng.random_range(-0.5..0.5),
        potential: PotentialParams {
            height: rng.random_range(0.0..10.0),
            width: rng.random_range(1.0..4.0),
            variant: if rng.random_bool(0.5) { PotentialVariant::Standard } else { PotentialVariant::Piecewise },
        },
        sector: if n_macro <= 3 && rng.random_bool(0.3) { Sector::Full } else { Sector::Symmetric },
        ..Default::default()
    }
}

pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
    let amps = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::normalized(amps).unwrap()
}

pub fn random_instance(seed: u64, w: Option<f64>) -> (ModelParams, NonlinearHamiltonian, StateVector) {
    let mut r = rng(seed);
    let p = random_model(&mut r, w);
    let ham = NonlinearHamiltonian::from_model(&p).unwrap();
    let psi = random_state(&mut r, p.dim());
    (p, ham, psi)
}
