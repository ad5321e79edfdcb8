//! Single-rotor basis and one-site operators.
//!
//! States are spherical harmonics |ℓ, m⟩ (Condon-Shortley phase) with
//! 0 ≤ ℓ ≤ l_max, ordered lexicographically by (ℓ, m). The index of
//! (ℓ, m) is ℓ² + ℓ + m.

use nalgebra::DMatrix;
use num_traits::Zero;

use crate::scalar::{Cplx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteState {
    pub l: u32,
    pub m: i32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteBasis {
    l_max: u32,
    states: Vec<SiteState>,
}

impl SiteBasis {
    pub fn new(l_max: u32) -> Self {
        let states = (0..=l_max)
            .flat_map(|l| (-(l as i32)..=l as i32).map(move |m| SiteState { l, m }))
            .collect();
        Self { l_max, states }
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn states(&self) -> &[SiteState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, l: u32, m: i32) -> Option<usize> {
        if l > self.l_max || m.unsigned_abs() > l {
            return None;
        }
        Some((i64::from(l * l + l) + i64::from(m)) as usize)
    }

    /// Eigenvalues ℓ(ℓ+1) of L², in basis order.
    pub fn l_squared_eigenvalues(&self) -> Vec<u32> {
        self.states.iter().map(|s| s.l * (s.l + 1)).collect()
    }

    /// Eigenvalues m of L_z, in basis order.
    pub fn lz_eigenvalues(&self) -> Vec<i32> {
        self.states.iter().map(|s| s.m).collect()
    }
}

/// Sparse operator on one site, stored by column: `columns[c]` lists
/// `(row, ⟨row|O|c⟩)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteOperator<R> {
    dim: usize,
    columns: Vec<Vec<(usize, Cplx<R>)>>,
}

impl<R: Real> SiteOperator<R> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            columns: vec![Vec::new(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, c: usize) -> &[(usize, Cplx<R>)] {
        &self.columns[c]
    }

    /// Accumulates `value` into ⟨row|O|col⟩.
    pub fn add(&mut self, row: usize, col: usize, value: Cplx<R>) {
        if value.is_zero() {
            return;
        }
        let column = &mut self.columns[col];
        match column.iter_mut().find(|(r, _)| *r == row) {
            Some((_, v)) => *v += value,
            None => {
                column.push((row, value));
                column.sort_by_key(|(r, _)| *r);
            }
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Cplx<R> {
        self.columns[col]
            .iter()
            .find(|(r, _)| *r == row)
            .map(|(_, v)| *v)
            .unwrap_or_else(Cplx::zero)
    }

    pub fn to_dense(&self) -> DMatrix<Cplx<R>> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                m[(r, c)] += v;
            }
        }
        m
    }

    pub fn from_dense(m: &DMatrix<Cplx<R>>) -> Self {
        let mut op = Self::zeros(m.nrows());
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                op.add(r, c, m[(r, c)]);
            }
        }
        op
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                out.add(c, r, v.conj());
            }
        }
        out
    }

    /// `self · rhs` in the truncated space.
    pub fn matmul(&self, rhs: &Self) -> Self {
        Self::from_dense(&(self.to_dense() * rhs.to_dense()))
    }

    pub fn scale(&self, factor: Cplx<R>) -> Self {
        let mut out = Self::zeros(self.dim);
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                out.add(r, c, v * factor);
            }
        }
        out
    }

    pub fn plus(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (c, col) in rhs.columns.iter().enumerate() {
            for &(r, v) in col {
                out.add(r, c, v);
            }
        }
        out
    }

    /// True when the operator only has entries on the diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.columns
            .iter()
            .enumerate()
            .all(|(c, col)| col.iter().all(|&(r, _)| r == c))
    }
}

/// Components of the unit direction operator n = r/ρ.
#[derive(Debug, Clone)]
pub struct DirectionMatrices<R> {
    pub n_z: SiteOperator<R>,
    /// n_x + i n_y
    pub n_plus: SiteOperator<R>,
    /// n_x − i n_y
    pub n_minus: SiteOperator<R>,
}

impl<R: Real> DirectionMatrices<R> {
    /// `n·n'` is `n_z n_z' + (n₊ n₋' + n₋ n₊')/2`; this is the single-site
    /// `n·n` evaluated with truncated matrix products.
    pub fn norm_squared(&self) -> SiteOperator<R> {
        let half = Cplx::new(R::lit(0.5), R::zero());
        let zz = self.n_z.matmul(&self.n_z);
        let pm = self.n_plus.matmul(&self.n_minus);
        let mp = self.n_minus.matmul(&self.n_plus);
        zz.plus(&pm.plus(&mp).scale(half))
    }
}

/// Matrix elements of cos θ, sin θ e^{iφ} and sin θ e^{−iφ} between
/// spherical harmonics up to `l_max`. Couplings to ℓ = l_max + 1 are
/// dropped.
pub fn direction_matrices<R: Real>(l_max: u32) -> DirectionMatrices<R> {
    let basis = SiteBasis::new(l_max);
    let dim = basis.len();
    let mut n_z = SiteOperator::zeros(dim);
    let mut n_plus = SiteOperator::zeros(dim);

    let real = |x: f64| Cplx::new(R::lit(x), R::zero());

    for (col, s) in basis.states().iter().enumerate() {
        let l = f64::from(s.l);
        let m = f64::from(s.m);
        let up = s.l + 1;
        // ⟨ℓ+1, m| cos θ |ℓ, m⟩ and its transpose
        if let Some(row) = basis.index_of(up, s.m) {
            let v = (((l + 1.0) * (l + 1.0) - m * m) / ((2.0 * l + 1.0) * (2.0 * l + 3.0))).sqrt();
            n_z.add(row, col, real(v));
            n_z.add(col, row, real(v));
        }
        // ⟨ℓ+1, m+1| sin θ e^{iφ} |ℓ, m⟩
        if let Some(row) = basis.index_of(up, s.m + 1) {
            let v = -(((l + m + 1.0) * (l + m + 2.0)) / ((2.0 * l + 1.0) * (2.0 * l + 3.0))).sqrt();
            n_plus.add(row, col, real(v));
        }
        // ⟨ℓ−1, m+1| sin θ e^{iφ} |ℓ, m⟩
        if s.l >= 1 {
            if let Some(row) = basis.index_of(s.l - 1, s.m + 1) {
                let v = (((l - m) * (l - m - 1.0)) / ((2.0 * l - 1.0) * (2.0 * l + 1.0))).sqrt();
                n_plus.add(row, col, real(v));
            }
        }
    }
    let n_minus = n_plus.adjoint();
    DirectionMatrices { n_z, n_plus, n_minus }
}

/// L_z, L₊ and L₋ on one site (ħ = 1).
pub fn angular_momentum<R: Real>(l_max: u32) -> (SiteOperator<R>, SiteOperator<R>, SiteOperator<R>) {
    let basis = SiteBasis::new(l_max);
    let dim = basis.len();
    let mut lz = SiteOperator::zeros(dim);
    let mut lp = SiteOperator::zeros(dim);
    for (col, s) in basis.states().iter().enumerate() {
        lz.add(col, col, Cplx::new(R::from_int(i64::from(s.m)), R::zero()));
        if let Some(row) = basis.index_of(s.l, s.m + 1) {
            let l = i64::from(s.l);
            let m = i64::from(s.m);
            let v = R::from_int(l * (l + 1) - m * (m + 1)).sqrt();
            lp.add(row, col, Cplx::new(v, R::zero()));
        }
    }
    let lm = lp.adjoint();
    (lz, lp, lm)
}

/// `axis · L` on one site for a unit axis.
pub fn axis_angular_momentum<R: Real>(l_max: u32, axis: [R; 3]) -> SiteOperator<R> {
    let (lz, lp, lm) = angular_momentum::<R>(l_max);
    let half = R::lit(0.5);
    // L_x = (L₊ + L₋)/2, L_y = −i(L₊ − L₋)/2
    let lx = lp.plus(&lm).scale(Cplx::new(half, R::zero()));
    let ly = lp
        .plus(&lm.scale(Cplx::new(-R::one(), R::zero())))
        .scale(Cplx::new(R::zero(), -half));
    let [ax, ay, az] = axis;
    lx.scale(Cplx::new(ax, R::zero()))
        .plus(&ly.scale(Cplx::new(ay, R::zero())))
        .plus(&lz.scale(Cplx::new(az, R::zero())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_enumeration() {
        let b = SiteBasis::new(1);
        let got: Vec<(u32, i32)> = b.states().iter().map(|s| (s.l, s.m)).collect();
        assert_eq!(got, vec![(0, 0), (1, -1), (1, 0), (1, 1)]);
        let b2 = SiteBasis::new(2);
        assert_eq!(b2.len(), 9);
        assert_eq!(b2.l_squared_eigenvalues(), vec![0, 2, 2, 2, 6, 6, 6, 6, 6]);
        for (i, s) in b2.states().iter().enumerate() {
            assert_eq!(b2.index_of(s.l, s.m), Some(i));
        }
        assert_eq!(b2.index_of(3, 0), None);
        assert_eq!(b2.index_of(1, 2), None);
    }

    #[test]
    fn selection_rules() {
        let d = direction_matrices::<f64>(3);
        let b = SiteBasis::new(3);
        let s0 = b.index_of(0, 0).unwrap();
        let s10 = b.index_of(1, 0).unwrap();
        let s11 = b.index_of(1, 1).unwrap();
        assert!((d.n_z.get(s10, s0).re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(d.n_z.get(s11, s0).norm(), 0.0);
        for (op, dm) in [(&d.n_z, 0), (&d.n_plus, 1), (&d.n_minus, -1)] {
            for c in 0..b.len() {
                for &(r, _) in op.column(c) {
                    let (sr, sc) = (b.states()[r], b.states()[c]);
                    assert_eq!((sr.l as i32 - sc.l as i32).abs(), 1);
                    assert_eq!(sr.m - sc.m, dm);
                }
            }
        }
        assert_eq!(d.n_minus, d.n_plus.adjoint());
        assert_eq!(d.n_z, d.n_z.adjoint());
    }

    #[test]
    fn untruncated_rows_have_unit_norm() {
        // Σ over ℓ' of |⟨ℓ'|n|ℓ⟩|² = 1 whenever ℓ+1 ≤ l_max.
        let l_max = 4;
        let d = direction_matrices::<f64>(l_max);
        let n2 = d.norm_squared();
        let b = SiteBasis::new(l_max);
        for (i, s) in b.states().iter().enumerate() {
            let v = n2.get(i, i).re;
            if s.l < l_max {
                assert!((v - 1.0).abs() < 1e-14, "{s:?} {v}");
            } else {
                assert!(v < 1.0);
            }
        }
    }

    #[test]
    fn angular_momentum_commutator() {
        // [L₊, L₋] = 2 L_z within each ℓ shell
        let (lz, lp, lm) = angular_momentum::<f64>(3);
        let comm = lp.to_dense() * lm.to_dense() - lm.to_dense() * lp.to_dense();
        let diff = comm - lz.to_dense() * Cplx::new(2.0, 0.0);
        assert!(diff.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn rotated_axis_spectrum_is_integer() {
        let axis = [0.6, 0.0, 0.8];
        let op = axis_angular_momentum::<f64>(2, axis).to_dense();
        assert!((op.clone() - op.adjoint()).iter().all(|z| z.norm() < 1e-14));
        let eig = op.symmetric_eigen();
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let expected = [-2.0, -1.0, -1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 2.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
