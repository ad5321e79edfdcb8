//! Real-time evolution of the rotor chain through a coupling ramp
//! `κ(t) = κ₀ + (κ₁ − κ₀) s(t/T)` and the adiabatic criterion along it.
//!
//! Time is measured in units of ħ/E₀. The state is propagated inside the
//! total-M sector of the initial ground state, which the ramp conserves.

mod expm;

use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

pub use expm::{expm_dense, expm_dense_real, expm_krylov, DENSE_EXP_DIM};

use crate::design::{Constants, Geometry};
use crate::error::{Error, Result};
use crate::lattice::{build_bond_operator, build_kinetic, sector_decompose, ChainSpec, SparseOperator};
use crate::scalar::{modulus, Cplx, Real};
use crate::spectra::{ground_state, lowest_eigenpairs, SolverOptions, DENSE_CROSSOVER};

/// Largest Hilbert space accepted for time evolution.
pub const DYNAMICS_DIMENSION_CAP: usize = 1 << 16;
/// Step-doubling error above which a step is rejected.
pub const STEP_ERROR_THRESHOLD: f64 = 1e-8;
/// Gaps below this make the adiabatic ratio undefined.
pub const DEGENERATE_GAP_TOL: f64 = 1e-9;
/// Excited levels examined per sample when the sector is too large for
/// full diagonalization.
pub const ADIABATIC_LEVELS: usize = 16;

const KRYLOV_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RampShape {
    Linear,
    /// `3s² − 2s³`, with vanishing slope at both ends.
    Smoothstep,
}

impl RampShape {
    pub fn as_str(self) -> &'static str {
        match self {
            RampShape::Linear => "linear",
            RampShape::Smoothstep => "smoothstep",
        }
    }

    fn value<R: Real>(self, s: R) -> R {
        match self {
            RampShape::Linear => s,
            RampShape::Smoothstep => s * s * (R::lit(3.0) - R::lit(2.0) * s),
        }
    }

    fn slope<R: Real>(self, s: R) -> R {
        match self {
            RampShape::Linear => R::one(),
            RampShape::Smoothstep => R::lit(6.0) * s * (R::one() - s),
        }
    }
}

impl FromStr for RampShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(RampShape::Linear),
            "smoothstep" => Ok(RampShape::Smoothstep),
            other => Err(Error::domain("shape", format!("expected linear|smoothstep, got `{other}`"))),
        }
    }
}

impl std::fmt::Display for RampShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampSchedule<R> {
    pub kappa_start: R,
    pub kappa_end: R,
    /// Units of ħ/E₀.
    pub duration: R,
    pub shape: RampShape,
}

impl<R: Real> RampSchedule<R> {
    pub fn new(kappa_start: R, kappa_end: R, duration: R, shape: RampShape) -> Result<Self> {
        let s = Self {
            kappa_start,
            kappa_end,
            duration,
            shape,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("kappa_start", self.kappa_start), ("kappa_end", self.kappa_end)] {
            if !v.is_finite_value() || v < R::zero() {
                return Err(Error::domain(name, "must be finite and non-negative"));
            }
        }
        if !self.duration.is_finite_value() || self.duration <= R::zero() {
            return Err(Error::domain("duration", "must be finite and positive"));
        }
        Ok(())
    }

    fn progress(&self, t: R) -> R {
        (t / self.duration).max(R::zero()).min(R::one())
    }

    pub fn kappa(&self, t: R) -> R {
        self.kappa_start + (self.kappa_end - self.kappa_start) * self.shape.value(self.progress(t))
    }

    /// dκ/dt.
    pub fn kappa_rate(&self, t: R) -> R {
        (self.kappa_end - self.kappa_start) / self.duration * self.shape.slope(self.progress(t))
    }
}

/// Numerical controls for [`propagate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagateOptions {
    /// Nominal step, rounded down so that it divides the duration.
    pub dt: f64,
    /// Number of evenly spaced time-series samples, endpoints included;
    /// zero disables the series.
    pub record_points: usize,
    /// Sample count for the adiabatic ratio.
    pub adiabatic_samples: usize,
    pub dimension_cap: usize,
    /// Sectors up to this size are exponentiated by full diagonalization,
    /// larger ones on a Krylov subspace.
    pub dense_limit: usize,
    pub solver: SolverOptions,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self {
            dt: 0.02,
            record_points: 0,
            adiabatic_samples: 101,
            dimension_cap: DYNAMICS_DIMENSION_CAP,
            dense_limit: DENSE_EXP_DIM,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSample<R> {
    pub time: R,
    pub kappa: R,
    /// Overlap with the lowest state of the evolving sector at this κ.
    pub fidelity: R,
    pub norm: R,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionResult<R> {
    /// |⟨gs(κ_end)|ψ(T)⟩|²; zero when the final ground state lies in a
    /// different sector.
    pub final_fidelity: R,
    /// max_t |‖ψ(t)‖ − 1|.
    pub norm_drift: R,
    pub max_adiabatic_ratio: R,
    pub step_count: usize,
    pub dt: R,
    /// Largest accepted step-doubling estimate.
    pub max_step_error: R,
    pub sector: i64,
    pub time_series: Vec<TimeSample<R>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdiabaticRatio<R> {
    pub max_ratio: R,
    /// Time at which the maximum occurs.
    pub time: R,
}

/// Ramp duration in seconds for a device with the given geometry.
pub fn physical_ramp_time<R: Real>(constants: &Constants<R>, geom: &Geometry<R>, duration: R) -> R {
    let e0 = (constants.hbar() / geom.insulating_sphere_radius)
        * (constants.hbar() / (R::lit(2.0) * constants.electron_mass() * geom.insulating_sphere_radius));
    duration * (constants.hbar() / e0)
}

/// `H(κ) = h0 + κ dh` restricted to one sector.
struct SectorRamp<R: Real> {
    h0: SparseOperator<R>,
    dh: SparseOperator<R>,
    dense: Option<Dense<R>>,
}

enum Dense<R: Real> {
    Real(DMatrix<R>, DMatrix<R>),
    Complex(DMatrix<Cplx<R>>, DMatrix<Cplx<R>>),
}

impl<R: Real> SectorRamp<R> {
    fn new(h0: SparseOperator<R>, dh: SparseOperator<R>, dense_limit: usize) -> Self {
        let dense = (h0.dimension() <= dense_limit).then(|| {
            if h0.is_real() && dh.is_real() {
                Dense::Real(h0.to_dense_real(), dh.to_dense_real())
            } else {
                Dense::Complex(h0.to_dense(), dh.to_dense())
            }
        });
        Self { h0, dh, dense }
    }

    fn at(&self, kappa: R) -> SparseOperator<R> {
        self.h0.add_scaled(&self.dh, Cplx::new(kappa, R::zero()))
    }

    fn exp_apply(&self, kappa: R, tau: R, psi: &DVector<Cplx<R>>) -> Result<DVector<Cplx<R>>> {
        match &self.dense {
            Some(Dense::Real(h0, dh)) => Ok(expm_dense_real(h0 + dh * kappa, tau, psi)),
            Some(Dense::Complex(h0, dh)) => Ok(expm_dense(&(h0 + dh * Cplx::new(kappa, R::zero())), tau, psi)),
            None => expm_krylov(&self.at(kappa), tau, psi, R::lit(KRYLOV_TOL)),
        }
    }

    /// One fourth-order commutator-free Magnus step from `t` to `t + h`.
    fn step(&self, schedule: &RampSchedule<R>, t: R, h: R, psi: &DVector<Cplx<R>>) -> Result<DVector<Cplx<R>>> {
        let sqrt3 = R::lit(3.0).sqrt();
        let half = R::lit(0.5);
        let k1 = schedule.kappa(t + h * (half - sqrt3 / R::lit(6.0)));
        let k2 = schedule.kappa(t + h * (half + sqrt3 / R::lit(6.0)));
        let a = R::lit(0.25) + sqrt3 / R::lit(6.0);
        let b = R::lit(0.25) - sqrt3 / R::lit(6.0);
        let first = R::lit(2.0) * (a * k1 + b * k2);
        let second = R::lit(2.0) * (b * k1 + a * k2);
        let mid = self.exp_apply(first, h * half, psi)?;
        self.exp_apply(second, h * half, &mid)
    }

    fn lowest(&self, kappa: R, opts: &SolverOptions) -> Result<DVector<Cplx<R>>> {
        let spec = lowest_eigenpairs(&self.at(kappa), 1, opts)?;
        Ok(spec.eigenvectors.into_iter().next().expect("one eigenvector"))
    }
}

fn overlap_squared<R: Real>(a: &DVector<Cplx<R>>, b: &DVector<Cplx<R>>) -> R {
    a.dotc(b).norm_sqr() / (a.norm_squared() * b.norm_squared())
}

struct Setup<R: Real> {
    ramp: SectorRamp<R>,
    sector: i64,
    indices: Vec<usize>,
    initial: DVector<Cplx<R>>,
}

fn setup<R: Real>(
    spec: &ChainSpec<R>,
    schedule: &RampSchedule<R>,
    cap: usize,
    dense_limit: usize,
    opts: &SolverOptions,
) -> Result<Setup<R>> {
    schedule.validate()?;
    spec.clone().with_dimension_cap(cap.min(spec.dimension_cap)).checked_dimension()?;
    let spec = if spec.is_z_axis() || spec.mu_tilde == R::zero() {
        spec.clone().with_axis([R::zero(), R::zero(), R::one()])
    } else {
        return Err(Error::UnsupportedAxis);
    };
    let start = spec.clone().with_kappa(schedule.kappa_start);
    let sectors = sector_decompose(&start)?;
    let gs = ground_state(&start, &sectors, opts)?;
    let indices = gs.indices.to_vec();
    let shift = -(spec.mu_tilde * R::from_int(gs.sector));
    let kinetic = build_kinetic(&spec, Some(&indices))?;
    let h0 = kinetic.add_scaled(&SparseOperator::identity(indices.len()), Cplx::new(shift, R::zero()));
    let dh = build_bond_operator(&spec, Some(&indices))?;
    Ok(Setup {
        ramp: SectorRamp::new(h0, dh, dense_limit),
        sector: gs.sector,
        indices,
        initial: gs.vector,
    })
}

/// Starts in the ground state at `kappa_start` and integrates the
/// Schrödinger equation to `duration`.
///
/// Every step is compared against two half steps; the half-step result is
/// kept and a difference above [`STEP_ERROR_THRESHOLD`] aborts with
/// [`Error::StepRejected`].
pub fn propagate<R: Real>(
    spec: &ChainSpec<R>,
    schedule: &RampSchedule<R>,
    options: &PropagateOptions,
) -> Result<EvolutionResult<R>> {
    if !(options.dt.is_finite() && options.dt > 0.0) {
        return Err(Error::domain("dt", "must be finite and positive"));
    }
    let setup = setup(spec, schedule, options.dimension_cap, options.dense_limit, &options.solver)?;
    let ramp = &setup.ramp;
    let steps = (schedule.duration.to_f64_lossy() / options.dt).ceil().max(1.0) as usize;
    let h = schedule.duration / R::from_int(steps as i64);
    let half = h * R::lit(0.5);

    let record_at: Vec<usize> = match options.record_points {
        0 => Vec::new(),
        1 => vec![steps],
        n => (0..n).map(|i| (i * steps + (n - 1) / 2) / (n - 1)).collect(),
    };
    let mut series = Vec::with_capacity(record_at.len());
    let mut next_record = 0;
    let mut record = |step: usize, psi: &DVector<Cplx<R>>, series: &mut Vec<TimeSample<R>>| -> Result<()> {
        while next_record < record_at.len() && record_at[next_record] == step {
            let t = h * R::from_int(step as i64);
            let kappa = schedule.kappa(t);
            let gs = ramp.lowest(kappa, &options.solver)?;
            series.push(TimeSample {
                time: t,
                kappa,
                fidelity: overlap_squared(&gs, psi),
                norm: psi.norm(),
            });
            next_record += 1;
        }
        Ok(())
    };

    let mut psi = setup.initial.clone();
    let mut norm_drift = (psi.norm() - R::one()).abs();
    let mut max_err = R::zero();
    record(0, &psi, &mut series)?;
    for n in 0..steps {
        let t = h * R::from_int(n as i64);
        let full = ramp.step(schedule, t, h, &psi)?;
        let mid = ramp.step(schedule, t, half, &psi)?;
        let fine = ramp.step(schedule, t + half, half, &mid)?;
        let err = (&full - &fine).norm();
        if err.to_f64_lossy() > STEP_ERROR_THRESHOLD || !err.is_finite_value() {
            return Err(Error::StepRejected {
                time: t.to_f64_lossy(),
                estimate: err.to_f64_lossy(),
                threshold: STEP_ERROR_THRESHOLD,
            });
        }
        max_err = max_err.max(err);
        psi = fine;
        norm_drift = norm_drift.max((psi.norm() - R::one()).abs());
        record(n + 1, &psi, &mut series)?;
    }

    let end = spec.clone().with_kappa(schedule.kappa_end).with_axis([R::zero(), R::zero(), R::one()]);
    let sectors = sector_decompose(&end)?;
    let final_gs = ground_state(&end, &sectors, &options.solver)?;
    let final_fidelity = if final_gs.sector == setup.sector && final_gs.indices == setup.indices.as_slice() {
        overlap_squared(&final_gs.vector, &psi)
    } else {
        R::zero()
    };

    let ratio = if options.adiabatic_samples > 0 {
        sector_adiabatic_ratio(
            &setup.ramp.h0,
            &setup.ramp.dh,
            schedule,
            options.adiabatic_samples,
            &options.solver,
        )?
        .max_ratio
    } else {
        R::zero()
    };

    Ok(EvolutionResult {
        final_fidelity,
        norm_drift,
        max_adiabatic_ratio: ratio,
        step_count: steps,
        dt: h,
        max_step_error: max_err,
        sector: setup.sector,
        time_series: series,
    })
}

/// `max_t max_k |⟨ψ₀|∂ₜH|ψₖ⟩| / (Eₖ − E₀)²` over `samples` evenly spaced
/// times, within the sector of the initial ground state.
pub fn adiabatic_ratio<R: Real>(
    spec: &ChainSpec<R>,
    schedule: &RampSchedule<R>,
    samples: usize,
    opts: &SolverOptions,
) -> Result<AdiabaticRatio<R>> {
    let setup = setup(spec, schedule, spec.dimension_cap, 0, opts)?;
    sector_adiabatic_ratio(&setup.ramp.h0, &setup.ramp.dh, schedule, samples, opts)
}

/// The adiabatic ratio for `H(t) = h0 + κ(t) dh`.
///
/// All excited states are scanned because the lowest excitation in a
/// symmetric sector is often uncoupled.
pub fn sector_adiabatic_ratio<R: Real>(
    h0: &SparseOperator<R>,
    dh: &SparseOperator<R>,
    schedule: &RampSchedule<R>,
    samples: usize,
    opts: &SolverOptions,
) -> Result<AdiabaticRatio<R>> {
    schedule.validate()?;
    if samples < 2 {
        return Err(Error::domain("samples", "need at least two samples"));
    }
    let dim = h0.dimension();
    let mut best = AdiabaticRatio {
        max_ratio: R::zero(),
        time: R::zero(),
    };
    if dim < 2 {
        return Ok(best);
    }
    let dense = (dim <= DENSE_CROSSOVER).then(|| (h0.to_dense(), dh.to_dense()));
    for s in 0..samples {
        let t = schedule.duration * R::from_int(s as i64) / R::from_int(samples as i64 - 1);
        let rate = schedule.kappa_rate(t);
        let kappa = schedule.kappa(t);
        let (values, vectors) = match &dense {
            Some((a, b)) => {
                let eig = SymmetricEigen::new(a + b * Cplx::new(kappa, R::zero()));
                let mut order: Vec<usize> = (0..dim).collect();
                order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).expect("finite"));
                (
                    order.iter().map(|&i| eig.eigenvalues[i]).collect::<Vec<R>>(),
                    order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>(),
                )
            }
            None => {
                let op = h0.add_scaled(dh, Cplx::new(kappa, R::zero()));
                let k = (ADIABATIC_LEVELS + 1).min(dim);
                let sp = lowest_eigenpairs(&op, k, opts)?;
                (sp.eigenvalues, sp.eigenvectors)
            }
        };
        let gap = values[1] - values[0];
        if gap.to_f64_lossy() < DEGENERATE_GAP_TOL {
            return Err(Error::DegenerateGap {
                time: t.to_f64_lossy(),
                gap: gap.to_f64_lossy(),
            });
        }
        if rate == R::zero() {
            continue;
        }
        let coupled = dh.apply_vector(&vectors[0]);
        let ratio = (1..values.len())
            .map(|k| {
                let element = modulus(vectors[k].dotc(&coupled)) * rate.abs();
                let de = values[k] - values[0];
                element / (de * de)
            })
            .fold(R::zero(), |a, b| a.max(b));
        if ratio > best.max_ratio {
            best = AdiabaticRatio { max_ratio: ratio, time: t };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_hit_endpoints() {
        for shape in [RampShape::Linear, RampShape::Smoothstep] {
            let s = RampSchedule::<f64>::new(0.0, 2.0, 10.0, shape).unwrap();
            assert_eq!(s.kappa(0.0), 0.0);
            assert!((s.kappa(10.0) - 2.0).abs() < 1e-15);
        }
        let s = RampSchedule::<f64>::new(0.0, 2.0, 10.0, RampShape::Smoothstep).unwrap();
        assert_eq!(s.kappa_rate(0.0), 0.0);
        assert_eq!(s.kappa_rate(10.0), 0.0);
        assert!((s.kappa_rate(5.0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn frozen_coupling_keeps_ground_state() {
        let spec = ChainSpec::<f64>::new(2, 1, 0.5);
        let schedule = RampSchedule::new(0.5, 0.5, 3.0, RampShape::Linear).unwrap();
        let out = propagate(&spec, &schedule, &PropagateOptions::default()).unwrap();
        assert!((out.final_fidelity - 1.0).abs() < 1e-10);
        assert!(out.norm_drift < 1e-10);
        assert_eq!(out.max_adiabatic_ratio, 0.0);
    }

    #[test]
    fn invalid_schedule() {
        assert!(RampSchedule::new(0.0, 1.0, 0.0, RampShape::Linear).is_err());
        assert!(RampSchedule::new(-1.0, 1.0, 1.0, RampShape::Linear).is_err());
        assert!("cubic".parse::<RampShape>().is_err());
    }
}
