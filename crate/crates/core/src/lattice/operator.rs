//! Compressed sparse row operator with complex entries.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rayon::prelude::*;

use crate::scalar::{modulus, Cplx, Real};

/// Rows above this size are multiplied in parallel.
const PARALLEL_MATVEC_DIM: usize = 1 << 14;

/// Square sparse operator in row-major compressed form.
///
/// Entries are sorted by `(row, col)`, duplicates are summed and exact
/// zeros are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator<R> {
    dimension: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Cplx<R>>,
    /// Total M of the sector this operator acts on, if restricted.
    pub sector_label: Option<i64>,
}

impl<R: Real> SparseOperator<R> {
    /// Assembles from unordered `(row, col, value)` triplets.
    ///
    /// # Panics
    /// If an index is out of range.
    pub fn from_triplets(dimension: usize, mut triplets: Vec<(usize, usize, Cplx<R>)>) -> Self {
        triplets.par_sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dimension + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Cplx<R>> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < dimension && c < dimension, "index ({r}, {c}) out of range {dimension}");
            if last == Some((r, c)) {
                *vals.last_mut().expect("previous entry") += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..dimension {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut op = Self {
            dimension,
            row_ptr,
            cols,
            vals,
            sector_label: None,
        };
        op.prune();
        op
    }

    pub fn identity(dimension: usize) -> Self {
        let one = Cplx::new(R::one(), R::zero());
        Self::from_triplets(dimension, (0..dimension).map(|i| (i, i, one)).collect())
    }

    pub fn diagonal(values: &[R]) -> Self {
        Self::from_triplets(
            values.len(),
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i, i, Cplx::new(v, R::zero())))
                .collect(),
        )
    }

    /// Drops entries that cancelled to (numerically) zero.
    fn prune(&mut self) {
        let threshold = R::eps();
        if self.vals.iter().all(|v| modulus(*v) > threshold) {
            return;
        }
        let mut row_ptr = vec![0usize; self.dimension + 1];
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for r in 0..self.dimension {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if modulus(self.vals[k]) > threshold {
                    cols.push(self.cols[k]);
                    vals.push(self.vals[k]);
                }
            }
            row_ptr[r + 1] = cols.len();
        }
        self.row_ptr = row_ptr;
        self.cols = cols;
        self.vals = vals;
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn with_sector_label(mut self, label: Option<i64>) -> Self {
        self.sector_label = label;
        self
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Cplx<R>)> + '_ {
        (0..self.dimension).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Cplx<R>)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> Cplx<R> {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => Cplx::zero(),
        }
    }

    /// True when every stored value has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == R::zero())
    }

    /// True when only diagonal entries are stored.
    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(r, c, _)| r == c)
    }

    /// Diagonal as real parts.
    pub fn diagonal_values(&self) -> Vec<R> {
        (0..self.dimension).map(|i| self.get(i, i).re).collect()
    }

    /// `max |A_rc − conj(A_cr)|` over all stored entries.
    pub fn hermiticity_error(&self) -> R {
        self.entries()
            .map(|(r, c, v)| modulus(v - self.get(c, r).conj()))
            .fold(R::zero(), |a, b| a.max(b))
    }

    /// `y = A x`.
    pub fn apply_into(&self, x: &[Cplx<R>], y: &mut [Cplx<R>]) {
        assert_eq!(x.len(), self.dimension);
        assert_eq!(y.len(), self.dimension);
        let row_dot = |r: usize| {
            let mut acc = Cplx::zero();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            acc
        };
        if self.dimension >= PARALLEL_MATVEC_DIM {
            y.par_iter_mut().enumerate().for_each(|(r, out)| *out = row_dot(r));
        } else {
            for (r, out) in y.iter_mut().enumerate() {
                *out = row_dot(r);
            }
        }
    }

    pub fn apply(&self, x: &[Cplx<R>]) -> Vec<Cplx<R>> {
        let mut y = vec![Cplx::zero(); self.dimension];
        self.apply_into(x, &mut y);
        y
    }

    pub fn apply_vector(&self, x: &DVector<Cplx<R>>) -> DVector<Cplx<R>> {
        DVector::from_vec(self.apply(x.as_slice()))
    }

    /// ⟨x|A|x⟩.
    pub fn expectation(&self, x: &[Cplx<R>]) -> Cplx<R> {
        let ax = self.apply(x);
        x.iter().zip(&ax).fold(Cplx::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn to_dense(&self) -> DMatrix<Cplx<R>> {
        let mut m = DMatrix::zeros(self.dimension, self.dimension);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// Real part as a dense matrix; only meaningful if [`Self::is_real`].
    pub fn to_dense_real(&self) -> DMatrix<R> {
        let mut m = DMatrix::zeros(self.dimension, self.dimension);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v.re;
        }
        m
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, other: &Self, factor: Cplx<R>) -> Self {
        assert_eq!(self.dimension, other.dimension);
        let triplets = self
            .entries()
            .chain(other.entries().map(|(r, c, v)| (r, c, v * factor)))
            .collect();
        Self::from_triplets(self.dimension, triplets).with_sector_label(self.sector_label)
    }

    pub fn scaled(&self, factor: Cplx<R>) -> Self {
        let triplets = self.entries().map(|(r, c, v)| (r, c, v * factor)).collect();
        Self::from_triplets(self.dimension, triplets).with_sector_label(self.sector_label)
    }

    /// `P A P` for the coordinate projector onto the sorted `indices`.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let triplets = indices
            .iter()
            .enumerate()
            .flat_map(|(local_r, &r)| {
                self.row(r).filter_map(move |(c, v)| {
                    indices.binary_search(&c).ok().map(|local_c| (local_r, local_c, v))
                })
            })
            .collect();
        Self::from_triplets(indices.len(), triplets)
    }
}
