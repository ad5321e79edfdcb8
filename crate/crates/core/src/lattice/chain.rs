//! Many-body operators of the rotor chain.
//!
//! Energies are in units of E₀ = ħ²/(2mρ²). The Hamiltonian is
//!
//! ```text
//! H = Σ_i L_i² + κ Σ_bonds (2 − 2 n_i·n_j)
//! ```
//!
//! on the tensor product of truncated spherical-harmonic bases, site 0
//! being the slowest-varying index.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{axis_angular_momentum, direction_matrices, SiteBasis, SiteOperator};
use super::operator::SparseOperator;
use crate::error::{Error, Result};
use crate::scalar::{modulus, Cplx, Real};

pub const DEFAULT_DIMENSION_CAP: usize = 1 << 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

impl std::str::FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(Boundary::Open),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::domain("boundary", format!("expected open|periodic, got `{other}`"))),
        }
    }
}

/// Dimensionless description of the rotor chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec<R> {
    pub n_sites: usize,
    pub l_max: u32,
    /// Rotor coupling κ = 2Kmρ⁴/ħ².
    pub kappa: R,
    pub boundary: Boundary,
    /// Chemical potential μ_eff/E₀.
    pub mu_tilde: R,
    /// Unit axis of the Noether charge.
    pub charge_axis: [R; 3],
    pub dimension_cap: usize,
}

impl<R: Real> ChainSpec<R> {
    /// Open chain with μ̃ = 0 and charge along z.
    pub fn new(n_sites: usize, l_max: u32, kappa: R) -> Self {
        Self {
            n_sites,
            l_max,
            kappa,
            boundary: Boundary::Open,
            mu_tilde: R::zero(),
            charge_axis: [R::zero(), R::zero(), R::one()],
            dimension_cap: DEFAULT_DIMENSION_CAP,
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_mu(mut self, mu_tilde: R) -> Self {
        self.mu_tilde = mu_tilde;
        self
    }

    pub fn with_kappa(mut self, kappa: R) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_axis(mut self, axis: [R; 3]) -> Self {
        self.charge_axis = axis;
        self
    }

    pub fn with_dimension_cap(mut self, cap: usize) -> Self {
        self.dimension_cap = cap;
        self
    }

    pub fn site_dimension(&self) -> usize {
        ((self.l_max + 1) * (self.l_max + 1)) as usize
    }

    /// Full Hilbert space dimension, or `None` on overflow.
    pub fn dimension(&self) -> Option<u128> {
        (self.site_dimension() as u128).checked_pow(u32::try_from(self.n_sites).ok()?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 1 {
            return Err(Error::domain("n_sites", "must be >= 1"));
        }
        if self.l_max < 1 {
            return Err(Error::domain("l_max", "must be >= 1"));
        }
        if !self.kappa.is_finite_value() || self.kappa < R::zero() {
            return Err(Error::domain("kappa", "must be finite and >= 0"));
        }
        if !self.mu_tilde.is_finite_value() {
            return Err(Error::domain("mu_tilde", "must be finite"));
        }
        if self.boundary == Boundary::Periodic && self.n_sites < 3 {
            return Err(Error::domain("boundary", "periodic chains need at least 3 sites"));
        }
        let [x, y, z] = self.charge_axis;
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite_value() || (norm - R::one()).abs() > R::lit(1e-6) {
            return Err(Error::domain("charge_axis", "must be a unit vector"));
        }
        Ok(())
    }

    /// Validates and checks the dimension against the cap.
    pub fn checked_dimension(&self) -> Result<usize> {
        self.validate()?;
        match self.dimension() {
            Some(d) if d <= self.dimension_cap as u128 => Ok(d as usize),
            Some(d) => Err(Error::DimensionCap {
                dimension: d,
                cap: self.dimension_cap,
            }),
            None => Err(Error::DimensionCap {
                dimension: u128::MAX,
                cap: self.dimension_cap,
            }),
        }
    }

    /// Nearest-neighbour bonds.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n_sites;
        let mut bonds: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic && n >= 3 {
            bonds.push((n - 1, 0));
        }
        bonds
    }

    pub fn is_z_axis(&self) -> bool {
        let [x, y, _] = self.charge_axis;
        x == R::zero() && y == R::zero()
    }

    /// Per-site basis indices of a global index.
    pub fn decode(&self, index: usize) -> Vec<usize> {
        let d = self.site_dimension();
        let mut digits = vec![0; self.n_sites];
        let mut rest = index;
        for slot in digits.iter_mut().rev() {
            *slot = rest % d;
            rest /= d;
        }
        digits
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        let d = self.site_dimension();
        digits.iter().fold(0, |acc, &s| acc * d + s)
    }
}

/// Product of one-site factors times a coefficient; an empty factor list is
/// the identity.
struct Term<'a, R> {
    coefficient: Cplx<R>,
    factors: Vec<(usize, &'a SiteOperator<R>)>,
}

/// Assembles `Σ terms` on the given basis subset (sorted global indices),
/// or on the full space when `subset` is `None`. Matrix elements leaving the
/// subset are discarded.
fn assemble<R: Real>(
    spec: &ChainSpec<R>,
    terms: &[Term<'_, R>],
    subset: Option<&[usize]>,
) -> Result<SparseOperator<R>> {
    let full_dim = spec.checked_dimension()?;
    let dim = subset.map_or(full_dim, <[usize]>::len);
    let global = |local: usize| subset.map_or(local, |s| s[local]);
    let local_of = |g: usize| match subset {
        Some(s) => s.binary_search(&g).ok(),
        None => Some(g),
    };

    let triplets: Vec<(usize, usize, Cplx<R>)> = (0..dim)
        .into_par_iter()
        .flat_map_iter(|col| {
            let digits = spec.decode(global(col));
            let mut out = Vec::new();
            for term in terms {
                // expand the product of factors acting on this column
                let mut partial: Vec<(Vec<usize>, Cplx<R>)> = vec![(digits.clone(), term.coefficient)];
                for &(site, op) in &term.factors {
                    let mut next = Vec::new();
                    for (state, amp) in &partial {
                        for &(row, v) in op.column(state[site]) {
                            let mut s = state.clone();
                            s[site] = row;
                            next.push((s, *amp * v));
                        }
                    }
                    partial = next;
                    if partial.is_empty() {
                        break;
                    }
                }
                for (state, amp) in partial {
                    if let Some(row) = local_of(spec.encode(&state)) {
                        out.push((row, col, amp));
                    }
                }
            }
            out
        })
        .collect();
    Ok(SparseOperator::from_triplets(dim, triplets))
}

fn real<R: Real>(x: R) -> Cplx<R> {
    Cplx::new(x, R::zero())
}

struct SiteOps<R> {
    l_squared: SiteOperator<R>,
    n_z: SiteOperator<R>,
    n_plus: SiteOperator<R>,
    n_minus: SiteOperator<R>,
}

impl<R: Real> SiteOps<R> {
    fn new(l_max: u32) -> Self {
        let basis = SiteBasis::new(l_max);
        let mut l_squared = SiteOperator::zeros(basis.len());
        for (i, v) in basis.l_squared_eigenvalues().into_iter().enumerate() {
            l_squared.add(i, i, real(R::from_int(i64::from(v))));
        }
        let dir = direction_matrices::<R>(l_max);
        Self {
            l_squared,
            n_z: dir.n_z,
            n_plus: dir.n_plus,
            n_minus: dir.n_minus,
        }
    }
}

/// `kinetic · Σ L² + bond · Σ_bonds (2 − 2 n·n)`.
fn chain_terms<'a, R: Real>(spec: &ChainSpec<R>, ops: &'a SiteOps<R>, kinetic: R, bond: R) -> Vec<Term<'a, R>> {
    let mut terms = Vec::new();
    if kinetic != R::zero() {
        for i in 0..spec.n_sites {
            terms.push(Term {
                coefficient: real(kinetic),
                factors: vec![(i, &ops.l_squared)],
            });
        }
    }
    let bonds = spec.bonds();
    if bond != R::zero() && !bonds.is_empty() {
        terms.push(Term {
            coefficient: real(R::lit(2.0) * bond * R::from_int(bonds.len() as i64)),
            factors: vec![],
        });
        for (i, j) in bonds {
            terms.extend(dot_terms(i, j, ops, -R::lit(2.0) * bond));
        }
    }
    terms
}

/// `scale · n_i·n_j` for i ≠ j.
fn dot_terms<'a, R: Real>(i: usize, j: usize, ops: &'a SiteOps<R>, scale: R) -> Vec<Term<'a, R>> {
    let half = scale * R::lit(0.5);
    vec![
        Term {
            coefficient: real(scale),
            factors: vec![(i, &ops.n_z), (j, &ops.n_z)],
        },
        Term {
            coefficient: real(half),
            factors: vec![(i, &ops.n_plus), (j, &ops.n_minus)],
        },
        Term {
            coefficient: real(half),
            factors: vec![(i, &ops.n_minus), (j, &ops.n_plus)],
        },
    ]
}

/// Chain Hamiltonian `Σ L² + κ Σ_bonds (2 − 2 n·n)` in units of E₀.
pub fn build_hamiltonian<R: Real>(spec: &ChainSpec<R>) -> Result<SparseOperator<R>> {
    build_hamiltonian_on(spec, None)
}

pub(crate) fn build_hamiltonian_on<R: Real>(
    spec: &ChainSpec<R>,
    subset: Option<&[usize]>,
) -> Result<SparseOperator<R>> {
    let ops = SiteOps::new(spec.l_max);
    let terms = chain_terms(spec, &ops, R::one(), spec.kappa);
    assemble(spec, &terms, subset)
}

/// `Σ L²` alone (κ-independent part).
pub fn build_kinetic<R: Real>(spec: &ChainSpec<R>, subset: Option<&[usize]>) -> Result<SparseOperator<R>> {
    let ops = SiteOps::new(spec.l_max);
    let terms = chain_terms(spec, &ops, R::one(), R::zero());
    assemble(spec, &terms, subset)
}

/// `Σ_bonds (2 − 2 n·n)`, the derivative of H with respect to κ.
pub fn build_bond_operator<R: Real>(spec: &ChainSpec<R>, subset: Option<&[usize]>) -> Result<SparseOperator<R>> {
    let ops = SiteOps::new(spec.l_max);
    let terms = chain_terms(spec, &ops, R::zero(), R::one());
    assemble(spec, &terms, subset)
}

/// Noether charge `Σ_i axis · L_i` in units of ħ.
pub fn build_charge<R: Real>(spec: &ChainSpec<R>) -> Result<SparseOperator<R>> {
    build_charge_on(spec, None)
}

pub(crate) fn build_charge_on<R: Real>(spec: &ChainSpec<R>, subset: Option<&[usize]>) -> Result<SparseOperator<R>> {
    let site = axis_angular_momentum(spec.l_max, spec.charge_axis);
    let terms: Vec<Term<'_, R>> = (0..spec.n_sites)
        .map(|i| Term {
            coefficient: real(R::one()),
            factors: vec![(i, &site)],
        })
        .collect();
    assemble(spec, &terms, subset)
}

/// `H − μ̃ Q`. Positive μ̃ favours positive charge.
pub fn build_grand_canonical<R: Real>(spec: &ChainSpec<R>) -> Result<SparseOperator<R>> {
    build_grand_canonical_on(spec, None)
}

pub(crate) fn build_grand_canonical_on<R: Real>(
    spec: &ChainSpec<R>,
    subset: Option<&[usize]>,
) -> Result<SparseOperator<R>> {
    let h = build_hamiltonian_on(spec, subset)?;
    if spec.mu_tilde == R::zero() {
        return Ok(h);
    }
    let q = build_charge_on(spec, subset)?;
    Ok(h.add_scaled(&q, real(-spec.mu_tilde)))
}

/// `n_i · n_j`; for i = j the truncated single-site `n·n`.
pub fn build_direction_correlator<R: Real>(
    spec: &ChainSpec<R>,
    i: usize,
    j: usize,
    subset: Option<&[usize]>,
) -> Result<SparseOperator<R>> {
    for (name, v) in [("i", i), ("j", j)] {
        if v >= spec.n_sites {
            return Err(Error::domain(name, format!("site {v} out of range for {} sites", spec.n_sites)));
        }
    }
    let ops = SiteOps::new(spec.l_max);
    if i == j {
        let n2 = direction_matrices::<R>(spec.l_max).norm_squared();
        let terms = [Term {
            coefficient: real(R::one()),
            factors: vec![(i, &n2)],
        }];
        assemble(spec, &terms, subset)
    } else {
        assemble(spec, &dot_terms(i, j, &ops, R::one()), subset)
    }
}

/// Partition of the product basis by total M = Σ m_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorMap {
    sectors: BTreeMap<i64, Vec<usize>>,
}

impl SectorMap {
    pub fn sectors(&self) -> &BTreeMap<i64, Vec<usize>> {
        &self.sectors
    }

    pub fn indices(&self, total_m: i64) -> Option<&[usize]> {
        self.sectors.get(&total_m).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    pub fn sizes(&self) -> Vec<(i64, usize)> {
        self.sectors.iter().map(|(&m, v)| (m, v.len())).collect()
    }
}

/// Groups basis states by total M. Requires the charge axis to be z.
pub fn sector_decompose<R: Real>(spec: &ChainSpec<R>) -> Result<SectorMap> {
    let dim = spec.checked_dimension()?;
    if !spec.is_z_axis() {
        return Err(Error::UnsupportedAxis);
    }
    let basis = SiteBasis::new(spec.l_max);
    let m_of: Vec<i64> = basis.lz_eigenvalues().into_iter().map(i64::from).collect();
    let mut sectors: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for index in 0..dim {
        let total: i64 = spec.decode(index).into_iter().map(|s| m_of[s]).sum();
        sectors.entry(total).or_default().push(index);
    }
    Ok(SectorMap { sectors })
}

/// Hamiltonian block of one total-M sector.
pub fn build_sector_hamiltonian<R: Real>(
    spec: &ChainSpec<R>,
    sectors: &SectorMap,
    total_m: i64,
) -> Result<SparseOperator<R>> {
    let indices = sectors
        .indices(total_m)
        .ok_or_else(|| Error::domain("sector", format!("no states with total M = {total_m}")))?;
    Ok(build_hamiltonian_on(spec, Some(indices))?.with_sector_label(Some(total_m)))
}

/// Grand-canonical block of one total-M sector.
pub fn build_sector_grand_canonical<R: Real>(
    spec: &ChainSpec<R>,
    sectors: &SectorMap,
    total_m: i64,
) -> Result<SparseOperator<R>> {
    if !spec.is_z_axis() {
        return Err(Error::UnsupportedAxis);
    }
    let indices = sectors
        .indices(total_m)
        .ok_or_else(|| Error::domain("sector", format!("no states with total M = {total_m}")))?;
    Ok(build_grand_canonical_on(spec, Some(indices))?.with_sector_label(Some(total_m)))
}

impl<R: Real> SparseOperator<R> {
    /// `max |[A, B]_rc|` via dense products; for small test operators.
    pub fn commutator_max(&self, other: &Self) -> R {
        let a = self.to_dense();
        let b = other.to_dense();
        let c = &a * &b - &b * &a;
        c.iter().fold(R::zero(), |m, z| m.max(modulus(*z)))
    }
}

/// Returns true if `op` maps no state of one sector into another.
pub fn is_block_diagonal<R: Real>(op: &SparseOperator<R>, spec: &ChainSpec<R>) -> bool {
    let basis = SiteBasis::new(spec.l_max);
    let m_of = basis.lz_eigenvalues();
    let total = |i: usize| -> i64 { spec.decode(i).into_iter().map(|s| i64::from(m_of[s])).sum() };
    op.entries().all(|(r, c, v)| v.is_zero() || total(r) == total(c))
}
