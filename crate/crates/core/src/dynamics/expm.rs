//! Action of `exp(−iτH)` on a state for Hermitian `H`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use crate::error::{Error, Result};
use crate::lattice::SparseOperator;
use crate::scalar::{Cplx, Real};

/// Largest dimension handled by full diagonalization.
pub const DENSE_EXP_DIM: usize = 512;
const KRYLOV_MAX: usize = 60;

/// `exp(−iτH) ψ` through the eigendecomposition of a dense `H`.
pub fn expm_dense<R: Real>(h: &DMatrix<Cplx<R>>, tau: R, psi: &DVector<Cplx<R>>) -> DVector<Cplx<R>> {
    let eig = SymmetricEigen::new(h.clone());
    apply_eigen_exp(&eig.eigenvalues, &eig.eigenvectors, tau, psi)
}

/// Same as [`expm_dense`] for a real symmetric `H`.
pub fn expm_dense_real<R: Real>(h: DMatrix<R>, tau: R, psi: &DVector<Cplx<R>>) -> DVector<Cplx<R>> {
    let eig = SymmetricEigen::new(h);
    let vectors = eig.eigenvectors.map(|v| Cplx::new(v, R::zero()));
    apply_eigen_exp(&eig.eigenvalues, &vectors, tau, psi)
}

pub(crate) fn apply_eigen_exp<R: Real>(
    values: &DVector<R>,
    vectors: &DMatrix<Cplx<R>>,
    tau: R,
    psi: &DVector<Cplx<R>>,
) -> DVector<Cplx<R>> {
    let mut coeffs = vectors.adjoint() * psi;
    for (c, &e) in coeffs.iter_mut().zip(values.iter()) {
        let phase = -(e * tau);
        *c *= Cplx::new(phase.cos(), phase.sin());
    }
    vectors * coeffs
}

/// `exp(−iτH) ψ` on a Lanczos subspace, grown until the coefficient of the
/// next Krylov vector drops below `tol`.
pub fn expm_krylov<R: Real>(h: &SparseOperator<R>, tau: R, psi: &DVector<Cplx<R>>, tol: R) -> Result<DVector<Cplx<R>>> {
    let dim = h.dimension();
    let psi_norm = psi.norm();
    if psi_norm == R::zero() {
        return Ok(psi.clone());
    }
    let max_m = KRYLOV_MAX.min(dim);
    let mut basis: Vec<DVector<Cplx<R>>> = vec![psi.unscale(psi_norm)];
    let mut alphas: Vec<R> = Vec::new();
    let mut betas: Vec<R> = Vec::new();
    let mut last_err = f64::INFINITY;
    for j in 0..max_m {
        let mut w = h.apply_vector(&basis[j]);
        let alpha = basis[j].dotc(&w).re;
        alphas.push(alpha);
        w -= &basis[j] * Cplx::new(alpha, R::zero());
        if j > 0 {
            w -= &basis[j - 1] * Cplx::new(betas[j - 1], R::zero());
        }
        for q in &basis {
            let c = q.dotc(&w);
            w -= q * c;
        }
        let beta = w.norm();

        let m = alphas.len();
        let mut t = DMatrix::<Cplx<R>>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = Cplx::new(alphas[i], R::zero());
            if i + 1 < m {
                t[(i, i + 1)] = Cplx::new(betas[i], R::zero());
                t[(i + 1, i)] = Cplx::new(betas[i], R::zero());
            }
        }
        let mut e1 = DVector::<Cplx<R>>::zeros(m);
        e1[0] = Cplx::new(R::one(), R::zero());
        let small = expm_dense(&t, tau, &e1);
        let err = beta * small[m - 1].norm_sqr().sqrt();
        last_err = err.to_f64_lossy();
        if err < tol || beta <= R::lit(1e-14) || m == dim {
            let mut out = DVector::<Cplx<R>>::zeros(dim);
            for (c, v) in small.iter().zip(&basis) {
                out += v * *c;
            }
            return Ok(out * Cplx::new(psi_norm, R::zero()));
        }
        betas.push(beta);
        basis.push(w.unscale(beta));
    }
    Err(Error::NonConvergence {
        iterations: max_m,
        residual: last_err,
    })
}

#[cfg(test)]
fn zeros<R: Real>(n: usize) -> DVector<Cplx<R>> {
    DVector::from_element(n, Cplx::new(R::zero(), R::zero()))
}
