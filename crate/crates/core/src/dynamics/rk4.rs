use num_complex::Complex64 as C64;

use super::{observe, NonlinearHamiltonian, Trajectory};
use crate::error::{Error, Result};
use crate::model::StateVector;

struct Rk4<'a> {
    ham: &'a NonlinearHamiltonian,
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
}

impl<'a> Rk4<'a> {
    fn new(ham: &'a NonlinearHamiltonian) -> Self {
        let z = vec![C64::default(); ham.dim()];
        Self { ham, k: [z.clone(), z.clone(), z.clone(), z.clone()], tmp: z }
    }

    /// One step of `psi' = -i g(psi)`, then renormalization.
    fn step(&mut self, psi: &mut StateVector, dt: f64) -> Result<()> {
        let y = psi.amplitudes();
        for stage in 0..4 {
            let scale = [0.0, dt / 2.0, dt / 2.0, dt][stage];
            if stage == 0 {
                self.tmp.copy_from_slice(y);
            } else {
                let prev = &self.k[stage - 1];
                self.tmp.iter_mut().zip(y).zip(prev).for_each(|((t, a), k)| *t = a + k * scale);
            }
            self.ham.gradient_into(&self.tmp, &mut self.k[stage]);
            self.k[stage].iter_mut().for_each(|z| *z *= -C64::i());
        }
        let k = &self.k;
        for (i, a) in psi.amplitudes_mut().iter_mut().enumerate() {
            *a += (k[0][i] + k[1][i] * 2.0 + k[2][i] * 2.0 + k[3][i]) * (dt / 6.0);
        }
        psi.normalize()
    }
}

fn check(psi0: &StateVector, ham: &NonlinearHamiltonian, dt: f64, t_end: f64) -> Result<StateVector> {
    if !(dt > 0.0 && t_end > 0.0) {
        return Err(Error::invalid("dt", "dt and t_end must be > 0"));
    }
    if psi0.dim() != ham.dim() {
        return Err(Error::DimensionMismatch { expected: ham.dim(), got: psi0.dim() });
    }
    let mut psi = psi0.clone();
    psi.normalize()?;
    Ok(psi)
}

/// Classic RK4 on `i psi' = g(psi)`, renormalizing after every step.
/// Samples every `sample_every` steps, like [`super::integrate`].
pub fn rk4_reference(
    psi0: &StateVector,
    ham: &NonlinearHamiltonian,
    dt: f64,
    t_end: f64,
    sample_every: usize,
) -> Result<Trajectory> {
    let mut psi = check(psi0, ham, dt, t_end)?;
    let sample_every = sample_every.max(1);
    let mut traj = Trajectory::default();
    traj.samples.push(observe(0.0, psi.amplitudes(), ham)?);
    let mut rk = Rk4::new(ham);
    for step in 1..=(t_end / dt).round() as usize {
        rk.step(&mut psi, dt)?;
        if step % sample_every == 0 {
            traj.samples.push(observe(step as f64 * dt, psi.amplitudes(), ham)?);
        }
    }
    Ok(traj)
}

/// Final state of an RK4 run, without sampling.
pub fn rk4_final_state(psi0: &StateVector, ham: &NonlinearHamiltonian, dt: f64, t_end: f64) -> Result<StateVector> {
    let mut psi = check(psi0, ham, dt, t_end)?;
    let mut rk = Rk4::new(ham);
    for _ in 0..(t_end / dt).round() as usize {
        rk.step(&mut psi, dt)?;
    }
    Ok(psi)
}
