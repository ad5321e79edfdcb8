//! Lowest eigenpairs of Hermitian sparse operators.
//!
//! Small operators go through a dense Hermitian eigensolver. Larger ones use
//! Lanczos with full reorthogonalization and locking: each pass converges the
//! lowest eigenpair orthogonal to everything already locked, so degenerate
//! multiplets are recovered one member per pass. Every pass starts from a
//! pseudo-random vector drawn from a ChaCha8 stream with a fixed seed, which
//! makes results reproducible run to run.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::SparseOperator;
use crate::scalar::{Cplx, Real};

/// Operators up to this dimension are diagonalized densely in `Auto` mode.
pub const DENSE_CROSSOVER: usize = 2048;

/// Seed of the start-vector stream.
pub const START_VECTOR_SEED: u64 = 0x5EED_0003;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SolverMethod {
    #[default]
    Auto,
    Dense,
    Iterative,
}

impl std::str::FromStr for SolverMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SolverMethod::Auto),
            "dense" => Ok(SolverMethod::Dense),
            "iterative" => Ok(SolverMethod::Iterative),
            other => Err(Error::domain("method", format!("expected auto|dense|iterative, got `{other}`"))),
        }
    }
}

impl std::fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverMethod::Auto => "auto",
            SolverMethod::Dense => "dense",
            SolverMethod::Iterative => "iterative",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub method: SolverMethod,
    /// Required residual norm ‖Hv − Ev‖ per eigenpair.
    pub tol: f64,
    /// Cap on operator applications across all Lanczos passes.
    pub max_iterations: usize,
    /// Largest Krylov basis before an explicit restart.
    pub krylov_dim: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: SolverMethod::Auto,
            tol: 1e-9,
            max_iterations: 200_000,
            krylov_dim: 300,
        }
    }
}

impl SolverOptions {
    pub fn with_method(mut self, method: SolverMethod) -> Self {
        self.method = method;
        self
    }

    fn resolve(&self, dimension: usize) -> SolverMethod {
        match self.method {
            SolverMethod::Auto if dimension <= DENSE_CROSSOVER => SolverMethod::Dense,
            SolverMethod::Auto => SolverMethod::Iterative,
            m => m,
        }
    }
}

/// Low-lying eigenpairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult<R: nalgebra::Scalar> {
    /// Ascending, units of E₀.
    pub eigenvalues: Vec<R>,
    /// Total M of each eigenvector when known.
    pub sector_labels: Vec<Option<i64>>,
    pub residual_norms: Vec<R>,
    /// `dense` or `iterative`.
    pub method: SolverMethod,
    pub converged: bool,
    #[serde(skip)]
    pub eigenvectors: Vec<DVector<Cplx<R>>>,
}

impl<R: Real> SpectrumResult<R> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Keeps the `k` lowest entries of several results, ordered by energy
    /// (ties broken by sector label).
    pub fn merge(parts: Vec<SpectrumResult<R>>, k: usize) -> SpectrumResult<R> {
        let method = if parts.iter().any(|p| p.method == SolverMethod::Iterative) {
            SolverMethod::Iterative
        } else {
            SolverMethod::Dense
        };
        let converged = parts.iter().all(|p| p.converged);
        let mut items: Vec<(R, Option<i64>, R, DVector<Cplx<R>>)> = parts
            .into_iter()
            .flat_map(|p| {
                let vecs = if p.eigenvectors.len() == p.eigenvalues.len() {
                    p.eigenvectors
                } else {
                    vec![DVector::zeros(0); p.eigenvalues.len()]
                };
                p.eigenvalues
                    .into_iter()
                    .zip(p.sector_labels)
                    .zip(p.residual_norms)
                    .zip(vecs)
                    .map(|(((e, s), r), v)| (e, s, r, v))
                    .collect::<Vec<_>>()
            })
            .collect();
        items.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalue").then(a.1.cmp(&b.1)));
        items.truncate(k);
        let mut out = SpectrumResult {
            eigenvalues: Vec::with_capacity(items.len()),
            sector_labels: Vec::with_capacity(items.len()),
            residual_norms: Vec::with_capacity(items.len()),
            method,
            converged,
            eigenvectors: Vec::with_capacity(items.len()),
        };
        for (e, s, r, v) in items {
            out.eigenvalues.push(e);
            out.sector_labels.push(s);
            out.residual_norms.push(r);
            out.eigenvectors.push(v);
        }
        out
    }
}

/// The `k` lowest eigenpairs of a Hermitian operator.
///
/// `Auto` picks the dense solver up to [`DENSE_CROSSOVER`]. Requires
/// `1 ≤ k ≤ dimension`.
pub fn lowest_eigenpairs<R: Real>(op: &SparseOperator<R>, k: usize, opts: &SolverOptions) -> Result<SpectrumResult<R>> {
    let dim = op.dimension();
    if k == 0 || k > dim {
        return Err(Error::domain("k", format!("need 1 <= k <= dimension ({dim}), got {k}")));
    }
    let (values, vectors, method) = match opts.resolve(dim) {
        SolverMethod::Dense => {
            let (v, x) = dense_lowest(op, k);
            (v, x, SolverMethod::Dense)
        }
        _ => {
            let (v, x) = lanczos_lowest(op, k, opts)?;
            (v, x, SolverMethod::Iterative)
        }
    };
    let residual_norms: Vec<R> = values.iter().zip(&vectors).map(|(&e, v)| residual(op, e, v)).collect();
    let converged = method == SolverMethod::Dense || residual_norms.iter().all(|r| r.to_f64_lossy() < opts.tol);
    Ok(SpectrumResult {
        sector_labels: vec![op.sector_label; values.len()],
        eigenvalues: values,
        residual_norms,
        method,
        converged,
        eigenvectors: vectors,
    })
}

/// ‖A v − e v‖.
pub fn residual<R: Real>(op: &SparseOperator<R>, e: R, v: &DVector<Cplx<R>>) -> R {
    let av = op.apply(v.as_slice());
    av.iter()
        .zip(v.iter())
        .map(|(a, x)| (*a - *x * e).norm_sqr())
        .fold(R::zero(), |s, x| s + x)
        .sqrt()
}

/// All eigenvalues and eigenvectors of a dense Hermitian matrix, ascending.
pub fn dense_hermitian_eigen<R: Real>(op: &SparseOperator<R>) -> (Vec<R>, Vec<DVector<Cplx<R>>>) {
    let (values, vectors) = dense_lowest(op, op.dimension());
    (values, vectors)
}

fn dense_lowest<R: Real>(op: &SparseOperator<R>, k: usize) -> (Vec<R>, Vec<DVector<Cplx<R>>>) {
    if op.is_real() {
        let eig = SymmetricEigen::new(op.to_dense_real());
        let order = ascending_order(eig.eigenvalues.as_slice());
        let values = order.iter().take(k).map(|&i| eig.eigenvalues[i]).collect();
        let vectors = order
            .iter()
            .take(k)
            .map(|&i| eig.eigenvectors.column(i).map(|x| Cplx::new(x, R::zero())))
            .collect();
        (values, vectors)
    } else {
        let eig = SymmetricEigen::new(op.to_dense());
        let order = ascending_order(eig.eigenvalues.as_slice());
        let values = order.iter().take(k).map(|&i| eig.eigenvalues[i]).collect();
        let vectors = order.iter().take(k).map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
        (values, vectors)
    }
}

fn ascending_order<R: Real>(values: &[R]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite eigenvalue"));
    order
}

fn dot<R: Real>(a: &[Cplx<R>], b: &[Cplx<R>]) -> Cplx<R> {
    a.iter().zip(b).fold(Cplx::zero(), |acc, (x, y)| acc + x.conj() * y)
}

fn norm<R: Real>(a: &[Cplx<R>]) -> R {
    a.iter().fold(R::zero(), |s, x| s + x.norm_sqr()).sqrt()
}

/// `w ← w − Σ_q ⟨q|w⟩ q`, two passes.
fn orthogonalize<R: Real>(w: &mut [Cplx<R>], basis: &[Vec<Cplx<R>>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= *qi * c;
            }
        }
    }
}

fn random_vector<R: Real>(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Cplx<R>> {
    (0..dim)
        .map(|_| Cplx::new(R::lit(rng.random::<f64>() - 0.5), R::lit(rng.random::<f64>() - 0.5)))
        .collect()
}

fn lanczos_lowest<R: Real>(
    op: &SparseOperator<R>,
    k: usize,
    opts: &SolverOptions,
) -> Result<(Vec<R>, Vec<DVector<Cplx<R>>>)> {
    let dim = op.dimension();
    let tol = R::lit(opts.tol);
    let mut rng = ChaCha8Rng::seed_from_u64(START_VECTOR_SEED);
    let mut locked: Vec<Vec<Cplx<R>>> = Vec::with_capacity(k);
    let mut locked_values: Vec<R> = Vec::with_capacity(k);
    let mut applications = 0usize;
    let mut restart: Option<Vec<Cplx<R>>> = None;

    while locked.len() < k {
        let remaining = dim - locked.len();
        let max_basis = opts.krylov_dim.max(2).min(remaining);
        let mut start = restart.take().unwrap_or_else(|| random_vector(&mut rng, dim));
        orthogonalize(&mut start, &locked);
        let mut start_norm = norm(&start);
        if start_norm <= R::eps() {
            start = random_vector(&mut rng, dim);
            orthogonalize(&mut start, &locked);
            start_norm = norm(&start);
        }
        start.iter_mut().for_each(|x| *x /= Cplx::new(start_norm, R::zero()));

        let mut basis: Vec<Vec<Cplx<R>>> = vec![start];
        let mut alphas: Vec<R> = Vec::new();
        let mut betas: Vec<R> = Vec::new();
        let mut w = vec![Cplx::zero(); dim];
        let mut outcome: Option<(R, Vec<Cplx<R>>)> = None;
        let mut best: Option<Vec<Cplx<R>>> = None;

        for j in 0..max_basis {
            op.apply_into(&basis[j], &mut w);
            applications += 1;
            let alpha = dot(&basis[j], &w).re;
            alphas.push(alpha);
            for (wi, vi) in w.iter_mut().zip(&basis[j]) {
                *wi -= *vi * alpha;
            }
            if j > 0 {
                let b = betas[j - 1];
                for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                    *wi -= *vi * b;
                }
            }
            orthogonalize(&mut w, &locked);
            orthogonalize(&mut w, &basis);
            let beta = norm(&w);
            let exhausted = beta <= R::lit(1e-12) * (R::one() + alpha.abs()) || j + 1 == max_basis;
            let check = exhausted || j < 8 || j % 4 == 3;

            if check {
                let (theta, y) = lowest_tridiagonal(&alphas, &betas);
                let estimate = beta * y[j].abs();
                if estimate <= tol * R::lit(0.1) || exhausted {
                    let mut x = vec![Cplx::zero(); dim];
                    for (coef, v) in y.iter().zip(&basis) {
                        for (xi, vi) in x.iter_mut().zip(v) {
                            *xi += *vi * *coef;
                        }
                    }
                    orthogonalize(&mut x, &locked);
                    let n = norm(&x);
                    x.iter_mut().for_each(|xi| *xi /= Cplx::new(n, R::zero()));
                    let r = residual(op, theta, &DVector::from_column_slice(&x));
                    if r < tol {
                        outcome = Some((theta, x));
                        break;
                    }
                    best = Some(x);
                    if exhausted {
                        break;
                    }
                }
            }
            if applications >= opts.max_iterations {
                break;
            }
            betas.push(beta);
            let inv = Cplx::new(R::one() / beta, R::zero());
            basis.push(w.iter().map(|x| *x * inv).collect());
        }

        match outcome {
            Some((theta, x)) => {
                locked_values.push(theta);
                locked.push(x);
            }
            None => {
                let (theta, y) = lowest_tridiagonal(&alphas, &betas);
                let x = best.unwrap_or_else(|| {
                    let mut x = vec![Cplx::zero(); dim];
                    for (coef, v) in y.iter().zip(&basis) {
                        for (xi, vi) in x.iter_mut().zip(v) {
                            *xi += *vi * *coef;
                        }
                    }
                    x
                });
                if applications >= opts.max_iterations {
                    let n = norm(&x);
                    let unit = DVector::from_iterator(dim, x.iter().map(|xi| *xi / Cplx::new(n, R::zero())));
                    return Err(Error::NonConvergence {
                        iterations: applications,
                        residual: residual(op, theta, &unit).to_f64_lossy(),
                    });
                }
                restart = Some(x);
            }
        }
    }

    // Locking order is ascending up to round-off; sort to be safe.
    let order = ascending_order(&locked_values);
    let values = order.iter().map(|&i| locked_values[i]).collect();
    let vectors = order.iter().map(|&i| DVector::from_column_slice(&locked[i])).collect();
    Ok((values, vectors))
}

/// Lowest eigenpair of the real symmetric tridiagonal matrix.
fn lowest_tridiagonal<R: Real>(alphas: &[R], betas: &[R]) -> (R, Vec<R>) {
    let m = alphas.len();
    let mut t = DMatrix::<R>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let i = ascending_order(eig.eigenvalues.as_slice())[0];
    (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect())
}
