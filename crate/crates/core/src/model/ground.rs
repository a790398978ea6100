use num_complex::Complex64 as C64;

use super::StateVector;
use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, HERMITIAN_TOL};

/// Dense diagonalization is refused above this dimension.
pub const MAX_DENSE_DIM: usize = 4096;

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    /// Set when the lowest level is (numerically) degenerate; `state` is then
    /// one arbitrary vector of the ground eigenspace.
    pub degenerate: bool,
    /// Gap to the next eigenvalue (0 for a one-dimensional space).
    pub gap: f64,
}

pub fn ground_state(h: &HermitianOperator) -> Result<GroundState> {
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    if h.dim() > MAX_DENSE_DIM {
        return Err(Error::DimensionTooLarge { dim: h.dim(), limit: MAX_DENSE_DIM });
    }
    if h.dim() == 0 {
        return Err(Error::invalid("h", "empty operator"));
    }
    let eig = h.to_dense().symmetric_eigen();
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let k = order[0];
    let energy = eig.eigenvalues[k];
    let gap = order.get(1).map_or(0.0, |&k2| eig.eigenvalues[k2] - energy);
    let degenerate = order.len() > 1 && gap <= 1e-9 * energy.abs().max(1.0);

    let mut amps: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
    // fix the global phase: largest component real and positive
    if let Some(big) = amps.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) {
        if big.norm() > 0.0 {
            let ph = big.conj() / big.norm();
            amps.iter_mut().for_each(|a| *a *= ph);
        }
    }
    Ok(GroundState { energy, state: StateVector::normalized(amps)?, degenerate, gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_collective_operators, build_linear_hamiltonian, ModelParams, PotentialParams};
    use crate::observables::density_histogram;
    use crate::oracle::{self, Entries};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn residual(h: &HermitianOperator, g: &GroundState) -> f64 {
        let hv = h.apply(g.state.amplitudes());
        hv.iter().zip(g.state.amplitudes()).map(|(a, b)| (a - b * g.energy).norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn single_qubit_minus_sigma_x() {
        let h = HermitianOperator::from_triplets(2, vec![(0, 1, c(-1.0, 0.0)), (1, 0, c(-1.0, 0.0))]).unwrap();
        let g = ground_state(&h).unwrap();
        assert!((g.energy + 1.0).abs() < 1e-12);
        assert!(!g.degenerate);
        let plus = StateVector::from_amplitudes(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let overlap = plus.inner(&g.state).norm() / 2f64.sqrt();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_hermitian_input() {
        // sigma_y has ground state (|0> - i|1>)/sqrt2 with energy -1
        let h = HermitianOperator::from_triplets(2, vec![(0, 1, c(0.0, -1.0)), (1, 0, c(0.0, 1.0))]).unwrap();
        let g = ground_state(&h).unwrap();
        assert!((g.energy + 1.0).abs() < 1e-12);
        assert!(residual(&h, &g) < 1e-9);
    }

    #[test]
    fn non_hermitian_rejected() {
        let h = HermitianOperator::from_triplets_unchecked(2, vec![(0, 1, c(1.0, 0.0))]);
        assert!(matches!(ground_state(&h), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn pure_potential_ground_state_sits_in_the_wells() {
        let p = ModelParams { alpha: 0.0, b: 0.0, potential: PotentialParams::standard(10.0, 4.0), ..Default::default() };
        let h = build_linear_hamiltonian(&p).unwrap();
        let g = ground_state(&h).unwrap();
        assert!(g.energy.abs() < 1e-12);
        assert!(g.degenerate);
        let ops = build_collective_operators(&p).unwrap();
        let hist = density_histogram(&g.state, &ops);
        let wells: f64 = hist.m_values.iter().zip(&hist.mass).filter(|(m, _)| m.abs() == 4.0).map(|(_, w)| w).sum();
        assert!((wells - 1.0).abs() < 1e-12);
    }

    #[test]
    fn double_well_ground_state_matches_oracle_and_is_bimodal() {
        let p = ModelParams { b: 1.0, alpha: 0.0, potential: PotentialParams::standard(10.0, 4.0), ..Default::default() };
        let h = build_linear_hamiltonian(&p).unwrap();
        let g = ground_state(&h).unwrap();
        let (e_min, _) = oracle::min_eigenpair(&h.dense_real());
        let rayleigh = h.quadratic_form(g.state.amplitudes()).re / g.state.norm_sqr();
        assert!((rayleigh - e_min).abs() < 1e-10, "{rayleigh} vs {e_min}");
        assert!((g.energy - e_min).abs() < 1e-10);
        assert!(residual(&h, &g) < 1e-9);
        // micro qubit decouples at alpha = 0, so the level is doubly degenerate
        assert!(g.degenerate);

        let hist = density_histogram(&g.state, &build_collective_operators(&p).unwrap());
        let centre = hist.mass[4];
        let left = hist.mass[..4].iter().cloned().fold(0.0, f64::max);
        let right = hist.mass[5..].iter().cloned().fold(0.0, f64::max);
        assert!(left > 2.0 * centre && right > 2.0 * centre, "{:?}", hist.mass);
        assert!((left - right).abs() < 1e-6);
    }

    #[test]
    fn residual_small_for_coupled_model() {
        let p = ModelParams { b: 0.7, alpha: 0.4, micro_field: 0.3, ..Default::default() };
        let h = build_linear_hamiltonian(&p).unwrap();
        let g = ground_state(&h).unwrap();
        assert!(residual(&h, &g) < 1e-9);
        assert!((g.state.norm() - 1.0).abs() < 1e-12);
    }
}
