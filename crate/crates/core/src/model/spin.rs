use num_complex::Complex64 as C64;

use super::{ModelParams, Sector};
use crate::error::Result;
use crate::operator::HermitianOperator;

/// Collective macro operators (identity on the micro qubit) and micro Pauli
/// operators (identity on the macro part).
#[derive(Clone, Debug)]
pub struct CollectiveOps {
    pub sector: Sector,
    pub n_macro: usize,
    pub jz: HermitianOperator,
    pub jx: HermitianOperator,
    pub jz_sq: HermitianOperator,
    pub v_of_jz: HermitianOperator,
    pub sigma_z_micro: HermitianOperator,
    pub sigma_x_micro: HermitianOperator,
    /// Diagonal of `jz` (the basis is a jz eigenbasis in both sectors).
    pub jz_diag: Vec<f64>,
    /// Distinct jz eigenvalues, ascending: `-J, -J + 1, ..., J`.
    pub m_values: Vec<f64>,
    /// For each basis index, the position of its jz eigenvalue in `m_values`.
    pub m_index: Vec<usize>,
}

impl CollectiveOps {
    pub fn dim(&self) -> usize {
        self.jz_diag.len()
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Lifts a macro operator given as entries to `macro ⊗ 1_micro`.
fn lift_macro(macro_entries: &[(usize, usize, f64)], macro_dim: usize) -> HermitianOperator {
    let entries = macro_entries
        .iter()
        .flat_map(|&(r, k, v)| (0..2).map(move |s| (2 * r + s, 2 * k + s, c(v))));
    HermitianOperator::from_triplets_unchecked(2 * macro_dim, entries.collect::<Vec<_>>())
}

pub fn build_collective_operators(params: &ModelParams) -> Result<CollectiveOps> {
    params.validate()?;
    let n = params.n_macro;
    let j = params.total_spin();
    let macro_dim = params.macro_dim();

    // (jz diagonal on the macro part, jx entries on the macro part)
    let (jz_macro, jx_entries): (Vec<f64>, Vec<(usize, usize, f64)>) = match params.sector {
        Sector::Symmetric => {
            let jz: Vec<f64> = (0..macro_dim).map(|k| -j + k as f64).collect();
            let mut jx = Vec::new();
            for (k, &m) in jz.iter().enumerate().take(macro_dim - 1) {
                let raise = (j * (j + 1.0) - m * (m + 1.0)).sqrt() / 2.0;
                jx.push((k + 1, k, raise));
                jx.push((k, k + 1, raise));
            }
            (jz, jx)
        }
        Sector::Full => {
            let jz = (0..macro_dim).map(|b| j - (b as u64).count_ones() as f64).collect();
            let mut jx = Vec::with_capacity(macro_dim * n);
            for b in 0..macro_dim {
                for i in 0..n {
                    jx.push((b ^ (1 << i), b, 0.5));
                }
            }
            (jz, jx)
        }
    };

    let jz_entries: Vec<_> = jz_macro.iter().enumerate().map(|(k, &m)| (k, k, m)).collect();
    let v_entries: Vec<_> = jz_macro.iter().enumerate().map(|(k, &m)| (k, k, params.potential.value(m))).collect();

    let jz = lift_macro(&jz_entries, macro_dim);
    let jx = lift_macro(&jx_entries, macro_dim);
    let jz_sq = jz.compose(&jz);
    let v_of_jz = lift_macro(&v_entries, macro_dim);

    let dim = 2 * macro_dim;
    let sigma_z_micro = HermitianOperator::from_diagonal(
        &(0..dim).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect::<Vec<_>>(),
    );
    let sigma_x_micro = HermitianOperator::from_triplets_unchecked(
        dim,
        (0..macro_dim).flat_map(|k| [(2 * k, 2 * k + 1, c(1.0)), (2 * k + 1, 2 * k, c(1.0))]).collect::<Vec<_>>(),
    );

    let jz_diag: Vec<f64> = (0..dim).map(|i| jz_macro[i / 2]).collect();
    let m_values: Vec<f64> = (0..=n).map(|k| -j + k as f64).collect();
    let m_index = jz_diag.iter().map(|&m| (m + j).round() as usize).collect();

    Ok(CollectiveOps {
        sector: params.sector,
        n_macro: n,
        jz,
        jx,
        jz_sq,
        v_of_jz,
        sigma_z_micro,
        sigma_x_micro,
        jz_diag,
        m_values,
        m_index,
    })
}

/// `H_lin = b J_x + V(J_z) + alpha sigma_z^micro J_x + micro_field sigma_x^micro`.
pub fn build_linear_hamiltonian(params: &ModelParams) -> Result<HermitianOperator> {
    let ops = build_collective_operators(params)?;
    Ok(linear_hamiltonian_from_ops(params, &ops))
}

pub(crate) fn linear_hamiltonian_from_ops(params: &ModelParams, ops: &CollectiveOps) -> HermitianOperator {
    let coupling = ops.sigma_z_micro.compose(&ops.jx);
    HermitianOperator::linear_combination(&[
        (params.b, &ops.jx),
        (1.0, &ops.v_of_jz),
        (params.alpha, &coupling),
        (params.micro_field, &ops.sigma_x_micro),
    ])
}

/// Maps symmetric-sector macro amplitudes (indexed by `m = -J + k`) to the
/// full `2^n` macro basis through normalized Dicke states.
pub fn dicke_embedding(n_macro: usize, symmetric: &[f64]) -> Vec<f64> {
    assert_eq!(symmetric.len(), n_macro + 1);
    let binom = |n: usize, k: usize| -> f64 { (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64) };
    (0..1usize << n_macro)
        .map(|b| {
            let downs = (b as u64).count_ones() as usize;
            let k = n_macro - downs;
            symmetric[k] / binom(n_macro, downs).sqrt()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PotentialParams, PotentialVariant};
    use crate::oracle::{self, Entries};

    fn params(n: usize, sector: Sector) -> ModelParams {
        ModelParams { n_macro: n, sector, ..Default::default() }
    }

    #[test]
    fn symmetric_dimensions_and_spectrum() {
        let ops = build_collective_operators(&params(8, Sector::Symmetric)).unwrap();
        assert_eq!(ops.dim(), 18);
        assert_eq!(ops.jz.dim(), 18);
        let mut spectrum = ops.jz_diag.clone();
        spectrum.sort_by(f64::total_cmp);
        let expected: Vec<f64> = (-4..=4).flat_map(|m| [m as f64, m as f64]).collect();
        assert_eq!(spectrum, expected);
    }

    #[test]
    fn full_sector_two_spins() {
        let ops = build_collective_operators(&params(2, Sector::Full)).unwrap();
        assert_eq!(ops.dim(), 8);
        let mut macro_spectrum: Vec<f64> = ops.jz_diag.iter().step_by(2).copied().collect();
        macro_spectrum.sort_by(f64::total_cmp);
        assert_eq!(macro_spectrum, vec![-1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn symmetric_spectrum_is_subset_of_full() {
        let sym = build_collective_operators(&params(2, Sector::Symmetric)).unwrap();
        let full = build_collective_operators(&params(2, Sector::Full)).unwrap();
        let (sym_eigs, _) = oracle::jacobi_eigen(&sym.jz.dense_real());
        let (full_eigs, _) = oracle::jacobi_eigen(&full.jz.dense_real());
        for e in sym_eigs {
            assert!(full_eigs.iter().any(|f| (f - e).abs() < 1e-12), "{e} missing from full spectrum");
        }
    }

    #[test]
    fn operator_identities() {
        for sector in [Sector::Symmetric, Sector::Full] {
            let p = ModelParams { potential: PotentialParams::standard(7.0, 1.5), ..params(4, sector) };
            let ops = build_collective_operators(&p).unwrap();
            for op in [&ops.jz, &ops.jx, &ops.jz_sq, &ops.v_of_jz, &ops.sigma_z_micro, &ops.sigma_x_micro] {
                assert!(op.hermiticity_defect() < 1e-12);
            }
            assert_eq!(ops.jz_sq, ops.jz.compose(&ops.jz));
            let comm = ops.jz.compose(&ops.v_of_jz).to_dense() - ops.v_of_jz.compose(&ops.jz).to_dense();
            assert_eq!(comm.norm(), 0.0);
            // Casimir check in the symmetric sector: Jx^2 has the right trace
            if sector == Sector::Symmetric {
                let j = p.total_spin();
                let jx2 = ops.jx.compose(&ops.jx).to_dense();
                let tr: f64 = (0..ops.dim()).map(|i| jx2[(i, i)].re).sum();
                // tr(Jx^2) over spin-J rep = J(J+1)(2J+1)/3, doubled by the micro factor
                assert!((tr - 2.0 * j * (j + 1.0) * (2.0 * j + 1.0) / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hamiltonian_is_hermitian_and_diagonal_without_kinetics() {
        let p = ModelParams { alpha: 0.0, b: 0.0, ..params(8, Sector::Symmetric) };
        let h = build_linear_hamiltonian(&p).unwrap();
        assert!(h.as_real_diagonal().is_some());
        for sector in [Sector::Symmetric, Sector::Full] {
            let p = ModelParams { alpha: 0.7, b: 1.3, micro_field: 0.2, ..params(3, sector) };
            let h = build_linear_hamiltonian(&p).unwrap();
            assert!(h.hermiticity_defect() < 1e-12);
        }
    }

    #[test]
    fn hamiltonian_eigenvalues_match_oracle() {
        let p = ModelParams {
            n_macro: 2,
            alpha: 1.0,
            b: 1.0,
            potential: PotentialParams::standard(1.0, 1.0),
            ..Default::default()
        };
        let h = build_linear_hamiltonian(&p).unwrap();
        // independent construction of the same matrix from spin-1 matrices
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let jx = [[0.0, s, 0.0], [s, 0.0, s], [0.0, s, 0.0]];
        let v = [0.0, 1.0, 0.0]; // V(-1), V(0), V(1) with height 1, width 1
        let mut dense = vec![vec![0.0; 6]; 6];
        for r in 0..3 {
            for k in 0..3 {
                for sidx in 0..2 {
                    let sz = if sidx == 0 { 1.0 } else { -1.0 };
                    dense[2 * r + sidx][2 * k + sidx] += (1.0 + sz) * jx[r][k];
                }
            }
            dense[2 * r][2 * r] += v[r];
            dense[2 * r + 1][2 * r + 1] += v[r];
        }
        let (mut want, _) = oracle::jacobi_eigen(&dense);
        let (mut got, _) = oracle::jacobi_eigen(&h.dense_real());
        want.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (a, b) in want.iter().zip(&got) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        let via_nalgebra = h.to_dense().symmetric_eigen().eigenvalues;
        let mut nal: Vec<f64> = via_nalgebra.iter().copied().collect();
        nal.sort_by(f64::total_cmp);
        for (a, b) in want.iter().zip(&nal) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn symmetric_hamiltonian_is_restriction_of_full() {
        for n in 1..=4 {
            let base = ModelParams {
                n_macro: n,
                alpha: 0.8,
                b: 1.1,
                micro_field: 0.3,
                potential: PotentialParams { height: 3.0, width: n as f64 / 2.0, variant: PotentialVariant::Standard },
                ..Default::default()
            };
            let sym = build_linear_hamiltonian(&base).unwrap().to_dense();
            let full = build_linear_hamiltonian(&ModelParams { sector: Sector::Full, ..base.clone() })
                .unwrap()
                .to_dense();
            // columns of the isometry: Dicke state k tensored with micro s
            let sym_dim = 2 * (n + 1);
            let full_dim = 2 << n;
            let mut iso = nalgebra::DMatrix::<C64>::zeros(full_dim, sym_dim);
            for k in 0..=n {
                let mut e = vec![0.0; n + 1];
                e[k] = 1.0;
                let col = dicke_embedding(n, &e);
                for (b, a) in col.iter().enumerate() {
                    for s in 0..2 {
                        iso[(2 * b + s, 2 * k + s)] = c(*a);
                    }
                }
            }
            let projected = iso.adjoint() * full * &iso;
            let diff = (projected - sym).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(diff < 1e-10, "n = {n}: max entry difference {diff}");
        }
    }
}
