//! Expectations, the center-of-total-spin dispersion, density histograms and
//! the cat criterion.

use num_complex::Complex64 as C64;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::model::{CollectiveOps, StateVector};
use crate::operator::HermitianOperator;

/// Default "physical size" of the device: one jz step.
pub const DEFAULT_CAT_THRESHOLD: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityHistogram {
    pub m_values: Vec<f64>,
    pub mass: Vec<f64>,
}

/// `<psi|A|psi> / <psi|psi>`; the imaginary residue is discarded.
pub fn expectation(psi: &StateVector, a: &HermitianOperator) -> Result<f64> {
    let n = psi.norm_sqr();
    if n == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(a.quadratic_form(psi.amplitudes()).re / n)
}

/// Normalized `(<J_z>, <J_z^2>)` for a diagonal `J_z`.
pub fn jz_moments(amps: &[C64], jz_diag: &[f64]) -> (f64, f64) {
    let mut norm = 0.0;
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (a, &m) in amps.iter().zip(jz_diag) {
        let p = a.norm_sqr();
        norm += p;
        m1 += p * m;
        m2 += p * m * m;
    }
    if norm == 0.0 {
        return (0.0, 0.0);
    }
    (m1 / norm, m2 / norm)
}

pub(crate) fn variance_from_moments(mean: f64, mean_sq: f64) -> f64 {
    (mean_sq - mean * mean).max(0.0)
}

/// `sqrt(<J_z^2> - <J_z>^2)`, clamped at zero.
pub fn dispersion(psi: &StateVector, ops: &CollectiveOps) -> f64 {
    let (m1, m2) = jz_moments(psi.amplitudes(), &ops.jz_diag);
    variance_from_moments(m1, m2).sqrt()
}

/// Probability per jz eigenvalue, micro index summed out.
pub fn density_histogram(psi: &StateVector, ops: &CollectiveOps) -> DensityHistogram {
    let mut mass = vec![0.0; ops.m_values.len()];
    let norm = psi.norm_sqr();
    for (a, &k) in psi.amplitudes().iter().zip(&ops.m_index) {
        mass[k] += a.norm_sqr();
    }
    if norm > 0.0 {
        mass.iter_mut().for_each(|w| *w /= norm);
    }
    DensityHistogram { m_values: ops.m_values.clone(), mass }
}

/// Largest recorded dispersion with `lo <= t <= hi`; ties resolve to the
/// earliest sample. Returns `(peak, t_peak)`.
pub fn peak_dispersion(traj: &Trajectory, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for s in traj.samples.iter().filter(|s| s.t >= lo - 1e-9 && s.t <= hi + 1e-9) {
        match best {
            Some((d, _)) if s.dispersion <= d => {}
            _ => best = Some((s.dispersion, s.t)),
        }
    }
    best.ok_or(Error::EmptyWindow { lo, hi })
}

/// A cat: dispersion strictly larger than the device size.
pub fn is_cat(psi: &StateVector, ops: &CollectiveOps, size_threshold: f64) -> bool {
    dispersion(psi, ops) > size_threshold
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Sample;
    use crate::model::{build_collective_operators, make_initial_state, ModelParams, Sector};
    use proptest::prelude::*;

    fn ops8() -> CollectiveOps {
        build_collective_operators(&ModelParams::default()).unwrap()
    }

    /// Macro amplitudes over m = -4..=4 with the micro qubit in |up>.
    fn macro_state(weights: &[(i32, f64)]) -> StateVector {
        let mut amps = vec![C64::new(0.0, 0.0); 18];
        for &(m, a) in weights {
            amps[2 * (m + 4) as usize] = C64::new(a, 0.0);
        }
        StateVector::normalized(amps).unwrap()
    }

    fn cat() -> StateVector {
        macro_state(&[(-4, 1.0), (4, 1.0)])
    }

    #[test]
    fn expectation_basics() {
        let ops = ops8();
        let psi = cat();
        assert!((expectation(&psi, &HermitianOperator::identity(18)).unwrap() - 1.0).abs() < 1e-15);
        assert!(expectation(&psi, &ops.jz).unwrap().abs() < 1e-15);
        assert!((expectation(&psi, &ops.jz_sq).unwrap() - 16.0).abs() < 1e-12);
        let eig = macro_state(&[(3, 1.0)]);
        assert!((expectation(&eig, &ops.jz).unwrap() - 3.0).abs() < 1e-15);
        let zero = StateVector::from_amplitudes(vec![C64::new(0.0, 0.0); 18]);
        assert!(matches!(expectation(&zero, &ops.jz), Err(Error::ZeroState)));
    }

    #[test]
    fn dispersion_values() {
        let ops = ops8();
        assert_eq!(dispersion(&macro_state(&[(2, 1.0)]), &ops), 0.0);
        assert!((dispersion(&cat(), &ops) - 4.0).abs() < 1e-12);
        let uniform: Vec<(i32, f64)> = (-4..=4).map(|m| (m, 1.0)).collect();
        // sum of m^2 over -4..4 is 60
        assert!((dispersion(&macro_state(&uniform), &ops) - (60.0f64 / 9.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn initial_band_observables() {
        let ops = ops8();
        let p = ModelParams { initial_band_halfwidth: 1, ..Default::default() };
        let psi = make_initial_state(&p).unwrap();
        assert!(expectation(&psi, &ops.jz).unwrap().abs() < 1e-15);
        assert!((dispersion(&psi, &ops) - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        let hist = density_histogram(&psi, &ops);
        for (m, w) in hist.m_values.iter().zip(&hist.mass) {
            let want = if m.abs() <= 1.0 { 1.0 / 3.0 } else { 0.0 };
            assert!((w - want).abs() < 1e-12);
        }
        let psi0 = make_initial_state(&ModelParams::default()).unwrap();
        assert_eq!(dispersion(&psi0, &ops), 0.0);
        let h0 = density_histogram(&psi0, &ops);
        assert!((h0.mass[4] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn full_sector_initial_state_matches_symmetric() {
        for n in [2usize, 4] {
            let sym = ModelParams { n_macro: n, initial_band_halfwidth: 1, ..Default::default() };
            let full = ModelParams { sector: Sector::Full, ..sym.clone() };
            let (ps, pf) = (make_initial_state(&sym).unwrap(), make_initial_state(&full).unwrap());
            let (os, of) = (build_collective_operators(&sym).unwrap(), build_collective_operators(&full).unwrap());
            assert!((dispersion(&ps, &os) - dispersion(&pf, &of)).abs() < 1e-12);
            let (hs, hf) = (density_histogram(&ps, &os), density_histogram(&pf, &of));
            for (a, b) in hs.mass.iter().zip(&hf.mass) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn initial_state_errors() {
        let odd = ModelParams { n_macro: 7, potential: crate::model::PotentialParams::standard(1.0, 3.5), ..Default::default() };
        assert!(make_initial_state(&odd).is_err());
        assert!(make_initial_state(&ModelParams { initial_band_halfwidth: 1, ..odd }).is_ok());
        assert!(make_initial_state(&ModelParams { initial_band_halfwidth: 5, ..Default::default() }).is_err());
    }

    #[test]
    fn cat_criterion() {
        let ops = ops8();
        assert!(!is_cat(&macro_state(&[(0, 1.0)]), &ops, DEFAULT_CAT_THRESHOLD));
        assert!(is_cat(&cat(), &ops, DEFAULT_CAT_THRESHOLD));
        // m = 0, 2 with equal weight has dispersion exactly 1
        let edge = macro_state(&[(0, 1.0), (2, 1.0)]);
        assert!((dispersion(&edge, &ops) - 1.0).abs() < 1e-15);
        assert!(!is_cat(&edge, &ops, 1.0));
    }

    fn synthetic(disp: &[f64]) -> Trajectory {
        Trajectory {
            samples: disp
                .iter()
                .enumerate()
                .map(|(i, &d)| Sample { t: i as f64 * 0.5, norm: 1.0, energy: 0.0, mean_jz: 0.0, dispersion: d, density: vec![] })
                .collect(),
        }
    }

    #[test]
    fn peak_search() {
        let flat = synthetic(&[2.0; 21]);
        assert_eq!(peak_dispersion(&flat, 1.0, 10.0).unwrap(), (2.0, 1.0));
        let bump = synthetic(&[0.0, 5.0, 1.0, 2.0, 3.0, 2.5, 1.0]);
        // the sample at t = 0.5 is outside the window
        assert_eq!(peak_dispersion(&bump, 1.0, 3.0).unwrap(), (3.0, 2.0));
        let falling: Vec<f64> = (0..21).map(|i| 10.0 - i as f64).collect();
        assert_eq!(peak_dispersion(&synthetic(&falling), 1.0, 10.0).unwrap(), (8.0, 1.0));
        assert!(matches!(peak_dispersion(&flat, 20.0, 30.0), Err(Error::EmptyWindow { .. })));
    }

    fn random_state(seed: u64, dim: usize) -> StateVector {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        StateVector::normalized((0..dim).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()).unwrap()
    }

    proptest! {
        #[test]
        fn variance_identity(seed in any::<u64>()) {
            let ops = ops8();
            let psi = random_state(seed, 18);
            let d = dispersion(&psi, &ops);
            let mean = expectation(&psi, &ops.jz).unwrap();
            let sq = expectation(&psi, &ops.jz_sq).unwrap();
            prop_assert!((d * d + mean * mean - sq).abs() < 1e-10);
        }

        #[test]
        fn dispersion_ignores_phase_and_micro_unitaries(seed in any::<u64>(), theta in 0.0f64..6.3, phi in 0.0f64..6.3) {
            let ops = ops8();
            let psi = random_state(seed, 18);
            let d = dispersion(&psi, &ops);
            prop_assert!((dispersion(&psi.phase_rotated(theta), &ops) - d).abs() < 1e-12);
            // micro rotation exp(-i phi sigma_x / 2) on each macro block
            let (s, c) = (phi / 2.0).sin_cos();
            let a = psi.amplitudes();
            let rotated: Vec<C64> = (0..9)
                .flat_map(|k| {
                    let (u, v) = (a[2 * k], a[2 * k + 1]);
                    [u * c - C64::i() * s * v, v * c - C64::i() * s * u]
                })
                .collect();
            let rotated = StateVector::from_amplitudes(rotated);
            prop_assert!((rotated.norm() - 1.0).abs() < 1e-12);
            prop_assert!((dispersion(&rotated, &ops) - d).abs() < 1e-10);
        }
    }

    #[test]
    fn histogram_matches_spectral_projectors() {
        let ops = ops8();
        for seed in 0..3 {
            let psi = random_state(seed, 18);
            let hist = density_histogram(&psi, &ops);
            assert!((hist.mass.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            for (k, &m) in ops.m_values.iter().enumerate() {
                let proj = HermitianOperator::from_diagonal(
                    &ops.jz_diag.iter().map(|&z| if z == m { 1.0 } else { 0.0 }).collect::<Vec<_>>(),
                );
                assert!((expectation(&psi, &proj).unwrap() - hist.mass[k]).abs() < 1e-12);
            }
        }
    }
}
