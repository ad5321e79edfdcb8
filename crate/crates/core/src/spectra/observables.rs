//! Chain-level spectral quantities: sector-resolved spectra, mass gap,
//! charge scans and direction correlations.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use super::eigen::{lowest_eigenpairs, SolverOptions, SpectrumResult};
use crate::error::{Error, Result};
use crate::lattice::{
    build_direction_correlator, build_sector_grand_canonical, sector_decompose, Boundary, ChainSpec, SectorMap,
};
use crate::scalar::{Cplx, Real};

/// Levels closer than this (in E₀) count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-6;
/// Width of the bracket left by the level-crossing bisection.
pub const CROSSING_TOL: f64 = 1e-10;
/// Minimum r² for reporting a correlation length.
pub const FIT_QUALITY_MIN: f64 = 0.9;

/// The charge axis does not enter H at μ̃ = 0, so sectors can always be
/// taken along z there.
fn z_axis_spec<R: Real>(spec: &ChainSpec<R>) -> Result<ChainSpec<R>> {
    if spec.is_z_axis() {
        Ok(spec.clone())
    } else if spec.mu_tilde == R::zero() {
        Ok(spec.clone().with_axis([R::zero(), R::zero(), R::one()]))
    } else {
        Err(Error::UnsupportedAxis)
    }
}

fn require_zero_mu<R: Real>(spec: &ChainSpec<R>) -> Result<()> {
    if spec.mu_tilde != R::zero() {
        return Err(Error::domain("mu_tilde", "this observable is defined at zero chemical potential"));
    }
    Ok(())
}

/// Lowest `k` eigenpairs of each listed sector of `H − μ̃Q`.
fn sector_spectra<R: Real>(
    spec: &ChainSpec<R>,
    sectors: &SectorMap,
    which: &[(i64, usize)],
    opts: &SolverOptions,
) -> Result<Vec<SpectrumResult<R>>> {
    which
        .par_iter()
        .map(|&(m, k)| {
            let block = build_sector_grand_canonical(spec, sectors, m)?;
            let k = k.min(block.dimension());
            lowest_eigenpairs(&block, k, opts)
        })
        .collect()
}

/// The `k` lowest levels of `H − μ̃Q` over all total-M sectors, labelled by
/// sector. Eigenvectors are in sector-local coordinates.
pub fn chain_spectrum<R: Real>(spec: &ChainSpec<R>, k: usize, opts: &SolverOptions) -> Result<SpectrumResult<R>> {
    let dim = spec.checked_dimension()?;
    if k == 0 || k > dim {
        return Err(Error::domain("k", format!("need 1 <= k <= dimension ({dim}), got {k}")));
    }
    let spec = z_axis_spec(spec)?;
    let sectors = sector_decompose(&spec)?;
    let which: Vec<(i64, usize)> = sectors.sectors().keys().map(|&m| (m, k)).collect();
    let parts = sector_spectra(&spec, &sectors, &which, opts)?;
    Ok(SpectrumResult::merge(parts, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassGap<R> {
    pub ground_energy: R,
    pub first_excited: R,
    /// E₁ − E₀ in units of E₀.
    pub gap: R,
    /// Number of levels within [`DEGENERACY_TOL`] of E₁.
    pub degeneracy: usize,
}

/// Gap between the two lowest levels of the full spectrum and the
/// multiplicity of the upper one.
pub fn mass_gap<R: Real>(spec: &ChainSpec<R>, opts: &SolverOptions) -> Result<MassGap<R>> {
    require_zero_mu(spec)?;
    let dim = spec.checked_dimension()?;
    if dim < 2 {
        return Err(Error::domain("dimension", "need at least two states"));
    }
    let spec = z_axis_spec(spec)?;
    let sectors = sector_decompose(&spec)?;
    let tol = R::lit(DEGENERACY_TOL);
    let mut per_sector: BTreeMap<i64, usize> = sectors.sectors().keys().map(|&m| (m, 4)).collect();
    loop {
        let which: Vec<(i64, usize)> = per_sector.iter().map(|(&m, &k)| (m, k)).collect();
        let parts = sector_spectra(&spec, &sectors, &which, opts)?;
        let mut all: Vec<R> = parts.iter().flat_map(|p| p.eigenvalues.iter().copied()).collect();
        all.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalue"));
        let (e0, e1) = (all[0], all[1]);
        // a sector whose whole returned window sits inside the multiplet may
        // hide further members
        let mut grow = false;
        for part in &parts {
            let m = part.sector_labels[0].expect("sector label");
            let size = sectors.indices(m).map_or(0, <[usize]>::len);
            let top = *part.eigenvalues.last().expect("non-empty");
            if part.len() < size && top <= e1 + tol {
                per_sector.insert(m, (part.len() * 2).min(size));
                grow = true;
            }
        }
        if !grow {
            let degeneracy = all.iter().filter(|&&e| (e - e1).abs() <= tol).count();
            return Ok(MassGap {
                ground_energy: e0,
                first_excited: e1,
                gap: e1 - e0,
                degeneracy,
            });
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChargeScan<R> {
    pub mu_values: Vec<R>,
    /// Total M of the grand-canonical ground state at each μ̃.
    pub ground_charge: Vec<i64>,
    pub ground_energy: Vec<R>,
    /// Smallest μ̃ at which the ground state carries charge, refined by
    /// bisection on the level crossing.
    pub critical_mu: Option<R>,
}

/// Lowest energy in each sector of `H − μ̃Q`.
fn sector_minima<R: Real>(
    spec: &ChainSpec<R>,
    sectors: &SectorMap,
    mu: R,
    opts: &SolverOptions,
) -> Result<Vec<(i64, R)>> {
    let shifted = spec.clone().with_mu(mu);
    let which: Vec<(i64, usize)> = sectors.sectors().keys().map(|&m| (m, 1)).collect();
    let parts = sector_spectra(&shifted, sectors, &which, opts)?;
    Ok(parts
        .into_iter()
        .map(|p| (p.sector_labels[0].expect("sector label"), p.eigenvalues[0]))
        .collect())
}

/// Ground sector and energy; ties go to the smaller |M|, then smaller M.
fn ground_of<R: Real>(minima: &[(i64, R)]) -> (i64, R) {
    let emin = minima
        .iter()
        .map(|&(_, e)| e)
        .fold(minima[0].1, |a, b| if b < a { b } else { a });
    minima
        .iter()
        .filter(|&&(_, e)| e == emin)
        .map(|&(m, _)| m)
        .min_by_key(|&m| (m.abs(), m))
        .map(|m| (m, emin))
        .expect("non-empty")
}

/// Sweeps μ̃ over an ascending, non-negative grid and tracks the charge of
/// the grand-canonical ground state.
pub fn charge_scan<R: Real>(spec: &ChainSpec<R>, mu_grid: &[R], opts: &SolverOptions) -> Result<ChargeScan<R>> {
    if mu_grid.is_empty() {
        return Err(Error::domain("mu_grid", "must not be empty"));
    }
    if mu_grid.iter().any(|&m| !m.is_finite_value() || m < R::zero()) {
        return Err(Error::domain("mu_grid", "values must be finite and >= 0"));
    }
    if mu_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("mu_grid", "must be strictly ascending"));
    }
    spec.checked_dimension()?;
    if !spec.is_z_axis() {
        return Err(Error::UnsupportedAxis);
    }
    let sectors = sector_decompose(spec)?;

    let points: Vec<(i64, R)> = mu_grid
        .par_iter()
        .map(|&mu| sector_minima(spec, &sectors, mu, opts).map(|m| ground_of(&m)))
        .collect::<Result<_>>()?;

    let ground_charge: Vec<i64> = points.iter().map(|p| p.0).collect();
    let ground_energy: Vec<R> = points.iter().map(|p| p.1).collect();

    let critical_mu = match ground_charge.iter().position(|&q| q >= 1) {
        None => None,
        Some(i) => {
            let lo = if i > 0 {
                Some(mu_grid[i - 1])
            } else if mu_grid[0] > R::zero() {
                let (q0, _) = ground_of(&sector_minima(spec, &sectors, R::zero(), opts)?);
                (q0 < 1).then(R::zero)
            } else {
                None
            };
            match lo {
                Some(lo) => Some(refine_crossing(spec, &sectors, lo, mu_grid[i], opts)?),
                None => Some(mu_grid[i]),
            }
        }
    };

    Ok(ChargeScan {
        mu_values: mu_grid.to_vec(),
        ground_charge,
        ground_energy,
        critical_mu,
    })
}

/// Bisection on the sign of `min_{M≥1} E(M) − min_{M≤0} E(M)` between a
/// neutral `lo` and a charged `hi`.
fn refine_crossing<R: Real>(
    spec: &ChainSpec<R>,
    sectors: &SectorMap,
    mut lo: R,
    mut hi: R,
    opts: &SolverOptions,
) -> Result<R> {
    let tol = R::lit(CROSSING_TOL);
    while hi - lo > tol {
        let mid = (lo + hi) * R::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let minima = sector_minima(spec, sectors, mid, opts)?;
        let best = |keep: &dyn Fn(i64) -> bool| {
            minima
                .iter()
                .filter(|(m, _)| keep(*m))
                .map(|&(_, e)| e)
                .fold(None, |acc: Option<R>, e| Some(acc.map_or(e, |a| a.min(e))))
        };
        let charged = best(&|m| m >= 1);
        let neutral = best(&|m| m <= 0);
        match (charged, neutral) {
            (Some(c), Some(n)) if c < n => hi = mid,
            _ => lo = mid,
        }
    }
    Ok((lo + hi) * R::lit(0.5))
}

/// Global ground state at μ̃ = 0 with its sector and sector-local indices.
pub struct GroundState<'a, R: nalgebra::Scalar> {
    pub energy: R,
    pub sector: i64,
    pub indices: &'a [usize],
    pub vector: DVector<Cplx<R>>,
}

pub fn ground_state<'a, R: Real>(
    spec: &ChainSpec<R>,
    sectors: &'a SectorMap,
    opts: &SolverOptions,
) -> Result<GroundState<'a, R>> {
    let which: Vec<(i64, usize)> = sectors.sectors().keys().map(|&m| (m, 1)).collect();
    let parts = sector_spectra(spec, sectors, &which, opts)?;
    let minima: Vec<(i64, R)> = parts
        .iter()
        .map(|p| (p.sector_labels[0].expect("sector label"), p.eigenvalues[0]))
        .collect();
    let (sector, energy) = ground_of(&minima);
    let part = parts
        .into_iter()
        .find(|p| p.sector_labels[0] == Some(sector))
        .expect("ground sector present");
    Ok(GroundState {
        energy,
        sector,
        indices: sectors.indices(sector).expect("sector exists"),
        vector: part.eigenvectors.into_iter().next().expect("eigenvector"),
    })
}

/// ⟨gs| n_i·n_j |gs⟩ at μ̃ = 0.
pub fn correlation<R: Real>(spec: &ChainSpec<R>, i: usize, j: usize, opts: &SolverOptions) -> Result<R> {
    Ok(correlations(spec, &[(i, j)], opts)?[0])
}

/// Several correlators from a single ground-state solve.
pub fn correlations<R: Real>(spec: &ChainSpec<R>, pairs: &[(usize, usize)], opts: &SolverOptions) -> Result<Vec<R>> {
    require_zero_mu(spec)?;
    spec.checked_dimension()?;
    let spec = z_axis_spec(spec)?;
    let sectors = sector_decompose(&spec)?;
    let gs = ground_state(&spec, &sectors, opts)?;
    pairs
        .iter()
        .map(|&(i, j)| {
            let op = build_direction_correlator(&spec, i, j, Some(gs.indices))?;
            let value = op.expectation(gs.vector.as_slice());
            debug_assert!(value.im.abs().to_f64_lossy() < 1e-10);
            Ok(value.re)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationProfile<R> {
    /// Reference site the distances are measured from.
    pub center: usize,
    pub distances: Vec<usize>,
    pub values: Vec<R>,
    /// Correlation length in lattice units.
    pub fitted_xi: Option<R>,
    /// r² of the log-linear fit, when a fit was possible.
    pub fit_quality: Option<R>,
}

/// Correlations from the site `(n_sites − 1) / 2` towards the right end,
/// with an exponential fit over distances ≥ 1.
pub fn correlation_profile<R: Real>(spec: &ChainSpec<R>, opts: &SolverOptions) -> Result<CorrelationProfile<R>> {
    if spec.n_sites < 4 {
        return Err(Error::domain("n_sites", "correlation profile needs at least 4 sites"));
    }
    if spec.boundary != Boundary::Open {
        return Err(Error::domain("boundary", "correlation profile requires an open chain"));
    }
    let center = (spec.n_sites - 1) / 2;
    let distances: Vec<usize> = (0..spec.n_sites - center).collect();
    let pairs: Vec<(usize, usize)> = distances.iter().map(|&d| (center, center + d)).collect();
    let values = correlations(spec, &pairs, opts)?;
    let (fitted_xi, fit_quality) = match exponential_fit(&distances[1..], &values[1..]) {
        Some((xi, r2)) if r2 >= R::lit(FIT_QUALITY_MIN) => (Some(xi), Some(r2)),
        Some((_, r2)) => (None, Some(r2)),
        None => (None, None),
    };
    Ok(CorrelationProfile {
        center,
        distances,
        values,
        fitted_xi,
        fit_quality,
    })
}

/// Least-squares fit of `ln|v| = a − d/ξ`. Returns `(ξ, r²)`, or `None` if a
/// value vanishes, fewer than two points exist, or the profile does not
/// decay.
pub fn exponential_fit<R: Real>(distances: &[usize], values: &[R]) -> Option<(R, R)> {
    if distances.len() < 2 || values.iter().any(|v| v.abs() <= R::lit(1e-300) || !v.is_finite_value()) {
        return None;
    }
    let n = R::from_int(distances.len() as i64);
    let xs: Vec<R> = distances.iter().map(|&d| R::from_int(d as i64)).collect();
    let ys: Vec<R> = values.iter().map(|v| v.abs().ln()).collect();
    let mx = xs.iter().fold(R::zero(), |a, &b| a + b) / n;
    let my = ys.iter().fold(R::zero(), |a, &b| a + b) / n;
    let sxx = xs.iter().fold(R::zero(), |a, &x| a + (x - mx) * (x - mx));
    let sxy = xs.iter().zip(&ys).fold(R::zero(), |a, (&x, &y)| a + (x - mx) * (y - my));
    let syy = ys.iter().fold(R::zero(), |a, &y| a + (y - my) * (y - my));
    let slope = sxy / sxx;
    if !(slope < R::zero()) {
        return None;
    }
    let r2 = if syy > R::zero() { sxy * sxy / (sxx * syy) } else { R::one() };
    Some((-R::one() / slope, r2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_fit_recovers_length() {
        let d = [1usize, 2, 3, 4];
        let v: Vec<f64> = d.iter().map(|&x| 0.7 * (-(x as f64) / 2.5).exp()).collect();
        let (xi, r2) = exponential_fit(&d, &v).unwrap();
        assert!((xi - 2.5).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
        assert!(exponential_fit(&d, &[0.0, 0.0, 0.0, 0.0]).is_none());
        assert!(exponential_fit(&d, &[0.1, 0.2, 0.3, 0.4]).is_none());
    }

    #[test]
    fn ground_tie_prefers_neutral() {
        assert_eq!(ground_of(&[(-1, 1.0), (0, 1.0), (1, 1.0)]).0, 0);
        assert_eq!(ground_of(&[(-1, 2.0), (0, 1.0), (1, 0.5)]).0, 1);
    }

    #[test]
    fn charge_scan_rejects_bad_grid() {
        let spec = ChainSpec::new(1, 1, 0.0);
        let o = SolverOptions::default();
        assert!(charge_scan(&spec, &[], &o).is_err());
        assert!(charge_scan(&spec, &[1.0, 0.5], &o).is_err());
        assert!(charge_scan(&spec, &[-1.0, 0.5], &o).is_err());
    }

    #[test]
    fn observables_require_zero_mu() {
        let spec = ChainSpec::new(2, 1, 0.3).with_mu(0.2);
        let o = SolverOptions::default();
        assert!(mass_gap(&spec, &o).is_err());
        assert!(correlation(&spec, 0, 1, &o).is_err());
    }

    #[test]
    fn profile_preconditions() {
        let o = SolverOptions::default();
        assert!(correlation_profile(&ChainSpec::new(3, 1, 1.0), &o).is_err());
        let periodic = ChainSpec::new(4, 1, 1.0).with_boundary(Boundary::Periodic);
        assert!(correlation_profile(&periodic, &o).is_err());
    }
}
