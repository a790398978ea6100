//! Independent numerical oracles for tests: a cyclic Jacobi eigensolver for
//! real symmetric matrices and an eigendecomposition-based propagator.
//! Nothing here touches the production linear algebra path.

#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64 as C64;

pub type Dense = Vec<Vec<f64>>;

/// Real part of a matrix given by entries; panics if any entry has an imaginary part.
pub fn real_dense_from_entries(dim: usize, entries: impl Iterator<Item = (usize, usize, C64)>) -> Dense {
    let mut m = vec![vec![0.0; dim]; dim];
    for (r, c, v) in entries {
        assert!(v.im == 0.0, "oracle expects a real matrix");
        m[r][c] += v.re;
    }
    m
}

/// Real symmetric embedding `[[A, -B], [B, A]]` of a Hermitian `A + iB`.
pub fn realified(dim: usize, entries: impl Iterator<Item = (usize, usize, C64)>) -> Dense {
    let mut m = vec![vec![0.0; 2 * dim]; 2 * dim];
    for (r, c, v) in entries {
        m[r][c] += v.re;
        m[r + dim][c + dim] += v.re;
        m[r][c + dim] -= v.im;
        m[r + dim][c] += v.im;
    }
    m
}

/// Cyclic Jacobi rotations. Returns eigenvalues and eigenvectors (as columns of `vecs`).
pub fn jacobi_eigen(a: &Dense) -> (Vec<f64>, Dense) {
    let n = a.len();
    let mut a = a.clone();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// `exp(-i H t) psi` for Hermitian `H` given by entries.
pub fn propagate(dim: usize, entries: impl Iterator<Item = (usize, usize, C64)>, psi: &[C64], t: f64) -> Vec<C64> {
    let m = realified(dim, entries);
    let (eigs, vecs) = jacobi_eigen(&m);
    let n2 = 2 * dim;
    let x: Vec<f64> = psi.iter().map(|z| z.re).chain(psi.iter().map(|z| z.im)).collect();
    // coefficients in the eigenbasis
    let coef: Vec<f64> = (0..n2).map(|k| (0..n2).map(|i| vecs[i][k] * x[i]).sum()).collect();
    let mut cos_part = vec![0.0; n2];
    let mut sin_part = vec![0.0; n2];
    for k in 0..n2 {
        let (s, c) = (eigs[k] * t).sin_cos();
        for i in 0..n2 {
            cos_part[i] += vecs[i][k] * c * coef[k];
            sin_part[i] += vecs[i][k] * s * coef[k];
        }
    }
    // cos(Ht) psi - i sin(Ht) psi, with the realified sin part (a, b) -> -i(a + ib) = b - ia
    (0..dim)
        .map(|i| C64::new(cos_part[i] + sin_part[i + dim], cos_part[i + dim] - sin_part[i]))
        .collect()
}

/// Smallest eigenvalue of a real symmetric matrix, with its eigenvector.
pub fn min_eigenpair(a: &Dense) -> (f64, Vec<f64>) {
    let (eigs, vecs) = jacobi_eigen(a);
    let k = (0..eigs.len()).min_by(|&i, &j| eigs[i].total_cmp(&eigs[j])).unwrap();
    (eigs[k], vecs.iter().map(|row| row[k]).collect())
}

/// Dense real view of an operator, implemented by the crate under test.
pub trait Entries {
    fn dense_real(&self) -> Dense;
}
