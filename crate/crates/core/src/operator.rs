//! Sparse complex operators on the model Hilbert space.
//!
//! Storage is compressed sparse rows. All operators built by the model are
//! Hermitian; [`HermitianOperator::from_triplets_unchecked`] exists for callers
//! that need to feed arbitrary matrices to routines which validate their input.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Entry-wise tolerance used when validating hermiticity.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl HermitianOperator {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, row_ptr: vec![0; dim + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![1.0; dim])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        Self {
            dim,
            row_ptr: (0..=dim).collect(),
            cols: (0..dim).collect(),
            vals: diag.iter().map(|&d| C64::new(d, 0.0)).collect(),
        }
    }

    /// Builds an operator from `(row, col, value)` entries, summing duplicates,
    /// and checks that the result is Hermitian.
    pub fn from_triplets<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let op = Self::from_triplets_unchecked(dim, entries);
        let defect = op.hermiticity_defect();
        if defect > HERMITIAN_TOL * op.max_abs().max(1.0) {
            return Err(Error::NotHermitian { defect });
        }
        Ok(op)
    }

    pub fn from_triplets_unchecked<I>(dim: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
        for (r, c, v) in entries {
            assert!(r < dim && c < dim, "entry ({r}, {c}) out of bounds for dim {dim}");
            rows[r].push((c, v));
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let mut iter = row.into_iter().peekable();
            while let Some((c, mut v)) = iter.next() {
                while let Some(&(c2, v2)) = iter.peek() {
                    if c2 != c {
                        break;
                    }
                    v += v2;
                    iter.next();
                }
                if v != C64::new(0.0, 0.0) {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { dim, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[span.clone()].binary_search(&col) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// `out = self * x`.
    pub fn apply_into(&self, x: &[C64], out: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.apply_into(x, &mut out);
        out
    }

    /// `<x|self|x>` without normalization.
    pub fn quadratic_form(&self, x: &[C64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..self.dim {
            let mut row = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                row += self.vals[k] * x[self.cols[k]];
            }
            acc += x[r].conj() * row;
        }
        acc
    }

    /// Sparse product `self * rhs`.
    pub fn compose(&self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.dim, rhs.dim);
        let mut entries = Vec::new();
        for (r, k, a) in self.entries() {
            for j in rhs.row_ptr[k]..rhs.row_ptr[k + 1] {
                entries.push((r, rhs.cols[j], a * rhs.vals[j]));
            }
        }
        Self::from_triplets_unchecked(self.dim, entries)
    }

    pub fn scaled(&self, factor: f64) -> HermitianOperator {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= factor);
        out
    }

    /// Linear combination `sum_i c_i * op_i`; all operators must share a dimension.
    pub fn linear_combination(terms: &[(f64, &HermitianOperator)]) -> HermitianOperator {
        let dim = terms.first().map_or(0, |(_, op)| op.dim);
        let entries = terms.iter().flat_map(|&(c, op)| {
            assert_eq!(op.dim, dim);
            op.entries().map(move |(r, k, v)| (r, k, v * c))
        });
        Self::from_triplets_unchecked(dim, entries.collect::<Vec<_>>())
    }

    pub fn adjoint(&self) -> HermitianOperator {
        Self::from_triplets_unchecked(self.dim, self.entries().map(|(r, c, v)| (c, r, v.conj())).collect::<Vec<_>>())
    }

    /// Largest entry of `|H - H^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.entries()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Returns the diagonal if the operator has no off-diagonal entries.
    pub fn as_real_diagonal(&self) -> Option<Vec<f64>> {
        let mut diag = vec![0.0; self.dim];
        for (r, c, v) in self.entries() {
            if r != c || v.im != 0.0 {
                return None;
            }
            diag[r] = v.re;
        }
        Some(diag)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }
}
