//! Device design calculator.
//!
//! Maps the five length scales of the electron-on-spheres chain (wire radius,
//! insulating and conducting sphere radii, sphere gap and lattice spacing)
//! to the effective parameters of the O(3) sigma model it emulates, and grades
//! every validity condition of the mapping as pass / warn / fail.
//!
//! All inputs and outputs are SI. The dynamical scale uses the one-loop
//! lattice-cutoff form `Λ = exp(-2π/g²)/Δx`; every quantity derived from it
//! (gap energy, gap temperature, critical field) is scheme dependent.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Physical constants, CODATA 2018.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants<R> {
    electron_charge: R,
    electron_mass: R,
    hbar: R,
    vacuum_permittivity: R,
    light_speed: R,
    boltzmann: R,
}

impl<R: Real> Constants<R> {
    pub fn codata2018() -> Self {
        Self {
            electron_charge: R::lit(1.602_176_634e-19),
            electron_mass: R::lit(9.109_383_701_5e-31),
            hbar: R::lit(1.054_571_817e-34),
            vacuum_permittivity: R::lit(8.854_187_812_8e-12),
            light_speed: R::lit(299_792_458.0),
            boltzmann: R::lit(1.380_649e-23),
        }
    }

    /// Test hook: arbitrary constants. Production code always uses
    /// [`Constants::codata2018`].
    #[doc(hidden)]
    pub fn with_values(
        electron_charge: R,
        electron_mass: R,
        hbar: R,
        vacuum_permittivity: R,
        light_speed: R,
        boltzmann: R,
    ) -> Result<Self> {
        let all = [
            ("electron_charge", electron_charge),
            ("electron_mass", electron_mass),
            ("hbar", hbar),
            ("vacuum_permittivity", vacuum_permittivity),
            ("light_speed", light_speed),
            ("boltzmann", boltzmann),
        ];
        for (name, v) in all {
            if !(v > R::zero()) || !v.is_finite_value() {
                return Err(Error::domain(name, "must be finite and strictly positive"));
            }
        }
        Ok(Self {
            electron_charge,
            electron_mass,
            hbar,
            vacuum_permittivity,
            light_speed,
            boltzmann,
        })
    }

    pub fn electron_charge(&self) -> R {
        self.electron_charge
    }
    pub fn electron_mass(&self) -> R {
        self.electron_mass
    }
    pub fn hbar(&self) -> R {
        self.hbar
    }
    pub fn vacuum_permittivity(&self) -> R {
        self.vacuum_permittivity
    }
    pub fn light_speed(&self) -> R {
        self.light_speed
    }
    pub fn boltzmann(&self) -> R {
        self.boltzmann
    }

    /// `4π ε₀`
    fn coulomb_denominator(&self) -> R {
        R::lit(4.0) * R::pi() * self.vacuum_permittivity
    }
}

impl<R: Real> Default for Constants<R> {
    fn default() -> Self {
        Self::codata2018()
    }
}

/// Device length scales in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry<R> {
    /// Superconducting wire radius δ.
    pub wire_radius: R,
    /// Insulating (electron-carrying) sphere radius ρ.
    pub insulating_sphere_radius: R,
    /// Superconducting sphere radius α.
    pub conducting_sphere_radius: R,
    /// Distance γ between insulating and conducting spheres.
    pub sphere_gap: R,
    /// Lattice spacing Δx.
    pub lattice_spacing: R,
}

impl<R: Real> Geometry<R> {
    /// Validating constructor, arguments in the order δ, ρ, α, γ, Δx.
    pub fn new(delta: R, rho: R, alpha: R, gamma: R, dx: R) -> Result<Self> {
        let g = Self {
            wire_radius: delta,
            insulating_sphere_radius: rho,
            conducting_sphere_radius: alpha,
            sphere_gap: gamma,
            lattice_spacing: dx,
        };
        g.validate()?;
        Ok(g)
    }

    /// Micrometre-scale parameter set (reachable at ~10 μK).
    pub fn micro() -> Self {
        Self::new(
            R::lit(100e-9),
            R::lit(400e-9),
            R::lit(500e-9),
            R::lit(2.5e-6),
            R::lit(12.5e-6),
        )
        .expect("valid preset")
    }

    /// Nanowire-scale parameter set.
    pub fn nano() -> Self {
        Self::new(
            R::lit(1e-9),
            R::lit(12e-9),
            R::lit(5e-9),
            R::lit(25e-9),
            R::lit(125e-9),
        )
        .expect("valid preset")
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("delta_m", self.wire_radius),
            ("rho_m", self.insulating_sphere_radius),
            ("alpha_m", self.conducting_sphere_radius),
            ("gamma_m", self.sphere_gap),
            ("dx_m", self.lattice_spacing),
        ];
        for (name, v) in fields {
            if !v.is_finite_value() || !(v > R::zero()) {
                return Err(Error::domain(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.lattice_spacing > self.wire_radius) {
            return Err(Error::domain(
                "dx_m",
                "lattice spacing must exceed the wire radius (ln(dx/delta) > 0)",
            ));
        }
        Ok(())
    }

    /// Every length multiplied by `s`.
    pub fn scaled(&self, s: R) -> Self {
        Self {
            wire_radius: self.wire_radius * s,
            insulating_sphere_radius: self.insulating_sphere_radius * s,
            conducting_sphere_radius: self.conducting_sphere_radius * s,
            sphere_gap: self.sphere_gap * s,
            lattice_spacing: self.lattice_spacing * s,
        }
    }
}

/// Laboratory conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment<R> {
    /// Kelvin.
    pub temperature: R,
    /// Tesla.
    pub magnetic_field: R,
}

impl<R: Real> Environment<R> {
    pub fn new(temperature: R, magnetic_field: R) -> Result<Self> {
        let env = Self {
            temperature,
            magnetic_field,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.temperature.is_finite_value() || self.temperature < R::zero() {
            return Err(Error::domain("temperature_K", "must be finite and >= 0"));
        }
        if !self.magnetic_field.is_finite_value() || self.magnetic_field < R::zero() {
            return Err(Error::domain("magnetic_field_T", "must be finite and >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Warn,
    Fail,
}

impl Verdict {
    /// Grades a quantity that must be much smaller than one.
    pub fn small(ratio: f64, pass_below: f64, warn_below: f64) -> Self {
        if ratio < pass_below {
            Verdict::Pass
        } else if ratio < warn_below {
            Verdict::Warn
        } else {
            Verdict::Fail
        }
    }

    /// Grades a quantity that must be much larger than one.
    pub fn large(ratio: f64, pass_from: f64, warn_from: f64) -> Self {
        if ratio >= pass_from {
            Verdict::Pass
        } else if ratio >= warn_from {
            Verdict::Warn
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Warn => "warn",
            Verdict::Fail => "fail",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Hierarchy ratios must reach this to pass...
pub const HIERARCHY_PASS: f64 = 3.0;
/// ...and this to warn.
pub const HIERARCHY_WARN: f64 = 2.0;
pub const INDUCTANCE_PASS: f64 = 0.01;
pub const INDUCTANCE_WARN: f64 = 0.1;
pub const TEMPERATURE_PASS: f64 = 0.1;
pub const TEMPERATURE_WARN: f64 = 0.5;
pub const ZEEMAN_PASS: f64 = 0.01;
pub const ZEEMAN_WARN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveParams<R> {
    /// K in J/m², `V = K (r' - r)²`.
    pub interaction_strength: R,
    /// m/s.
    pub effective_speed: R,
    pub effective_coupling: R,
    /// Λ_σ in 1/m.
    pub dynamical_scale: R,
    /// E₀ = ħ²/(2mρ²) in J.
    pub rotational_quantum: R,
    /// κ = 2Kmρ⁴/ħ².
    pub rotor_coupling: R,
    /// ħ c_eff Λ_σ in J.
    pub gap_energy: R,
    /// Gap energy over k_B, in K.
    pub gap_temperature: R,
    /// Order-of-magnitude estimate m c_eff Λ_σ / e, in T.
    pub critical_field: R,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyEntry<R> {
    pub name: String,
    pub ratio: R,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport<R> {
    pub effective: EffectiveParams<R>,
    pub hierarchy_ratios: Vec<HierarchyEntry<R>>,
    pub inductance_ratio: R,
    pub inductance_verdict: Verdict,
    pub temperature_ratio: R,
    pub temperature_verdict: Verdict,
    /// μ_eff in J.
    pub chemical_potential: R,
    pub second_order_zeeman_ratio: R,
    pub second_order_zeeman_verdict: Verdict,
    /// Quantities whose prefactor is only known to order of magnitude.
    pub order_estimates: Vec<String>,
    pub overall_verdict: Verdict,
}

impl<R> FeasibilityReport<R> {
    pub fn verdicts(&self) -> impl Iterator<Item = Verdict> + '_ {
        self.hierarchy_ratios
            .iter()
            .map(|h| h.verdict)
            .chain([
                self.inductance_verdict,
                self.temperature_verdict,
                self.second_order_zeeman_verdict,
            ])
    }
}

/// Evaluates the design formulas for a fixed set of physical constants.
#[derive(Debug, Clone, Copy)]
pub struct Designer<R> {
    pub constants: Constants<R>,
}

impl<R: Real> Default for Designer<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> Designer<R> {
    pub fn new() -> Self {
        Self {
            constants: Constants::codata2018(),
        }
    }

    pub fn with_constants(constants: Constants<R>) -> Self {
        Self { constants }
    }

    /// `4α + Δx / ln(Δx/δ)`, in metres. Combines the sphere and wire
    /// capacitances.
    pub fn capacitance_denominator(&self, geom: &Geometry<R>) -> Result<R> {
        geom.validate()?;
        Ok(Self::capacitance_unchecked(geom))
    }

    fn capacitance_unchecked(geom: &Geometry<R>) -> R {
        let log = (geom.lattice_spacing / geom.wire_radius).ln();
        R::lit(4.0) * geom.conducting_sphere_radius + geom.lattice_spacing / log
    }

    /// Coefficient K of the nearest-neighbour image-charge potential.
    pub fn interaction_strength(&self, geom: &Geometry<R>) -> Result<R> {
        let denom = self.capacitance_denominator(geom)?;
        let c = &self.constants;
        let alpha = geom.conducting_sphere_radius;
        // grouped so every intermediate stays representable in f32
        let q = c.electron_charge / (geom.sphere_gap * geom.sphere_gap);
        Ok(q * q * (alpha * alpha) / (c.coulomb_denominator() * denom))
    }

    /// Effective propagation speed, evaluated in the classical-electron-radius
    /// form (independent of [`Designer::interaction_strength`]).
    pub fn effective_speed(&self, geom: &Geometry<R>) -> Result<R> {
        let denom = self.capacitance_denominator(geom)?;
        let c = &self.constants;
        let c0 = c.light_speed;
        let electron_radius = (c.electron_charge / (c.coulomb_denominator() * c0))
            * (c.electron_charge / (c.electron_mass * c0));
        let alpha = geom.conducting_sphere_radius;
        let dx = geom.lattice_spacing;
        let gamma2 = geom.sphere_gap * geom.sphere_gap;
        let geometric = R::lit(2.0) * alpha * alpha * dx * dx / (gamma2 * gamma2);
        Ok(c0 * (electron_radius * geometric / denom).sqrt())
    }

    /// Effective sigma-model coupling for N = 3.
    pub fn effective_coupling(&self, geom: &Geometry<R>) -> Result<R> {
        let denom = self.capacitance_denominator(geom)?;
        let c = &self.constants;
        let alpha = geom.conducting_sphere_radius;
        // classical electron radius over the fine structure constant squared
        let bohr = (c.coulomb_denominator() * (c.hbar / c.electron_mass) / c.electron_charge)
            * (c.hbar / c.electron_charge);
        let inner = bohr * denom / (R::lit(2.0) * alpha * alpha);
        Ok(R::lit(3.0).sqrt() * geom.sphere_gap / geom.insulating_sphere_radius * inner.sqrt().sqrt())
    }

    /// Λ_σ = exp(-2π/g²)/Δx in 1/m.
    pub fn dynamical_scale(&self, geom: &Geometry<R>) -> Result<R> {
        let g = self.effective_coupling(geom)?;
        Ok(Self::dynamical_scale_from(g, geom.lattice_spacing))
    }

    pub fn dynamical_scale_from(coupling: R, lattice_spacing: R) -> R {
        (-R::two_pi() / (coupling * coupling)).exp() / lattice_spacing
    }

    /// E₀ = ħ²/(2mρ²).
    pub fn rotational_quantum(&self, geom: &Geometry<R>) -> R {
        let c = &self.constants;
        let rho = geom.insulating_sphere_radius;
        (c.hbar / rho) * (c.hbar / (R::lit(2.0) * c.electron_mass * rho))
    }

    /// Returns `(ħ c_eff Λ_σ, ħ c_eff Λ_σ / k_B)`.
    pub fn gap_energy_and_temperature(&self, geom: &Geometry<R>) -> Result<(R, R)> {
        let speed = self.effective_speed(geom)?;
        let scale = self.dynamical_scale(geom)?;
        let energy = self.constants.hbar * speed * scale;
        Ok((energy, energy / self.constants.boltzmann))
    }

    /// Single-sphere level E_ℓ = ħ² ℓ(ℓ+1) / (2mρ²).
    pub fn energy_level(&self, l: u32, geom: &Geometry<R>) -> R {
        let l = i64::from(l);
        R::from_int(l * (l + 1)) * self.rotational_quantum(geom)
    }

    /// μ_eff = eħB/(3m). Independent of the geometry.
    pub fn chemical_potential(&self, magnetic_field: R) -> Result<R> {
        if !magnetic_field.is_finite_value() || magnetic_field < R::zero() {
            return Err(Error::domain("magnetic_field_T", "must be finite and >= 0"));
        }
        let c = &self.constants;
        Ok((c.electron_charge / c.electron_mass) * c.hbar * magnetic_field / R::lit(3.0))
    }

    /// Order estimate m c_eff Λ_σ / e (prefactor 1).
    pub fn critical_field(&self, geom: &Geometry<R>) -> Result<R> {
        let speed = self.effective_speed(geom)?;
        let scale = self.dynamical_scale(geom)?;
        let c = &self.constants;
        Ok((c.electron_mass / c.electron_charge) * speed * scale)
    }

    /// `4 (α/Δx) (c_eff/c₀)² ln(Δx/δ)`; wire inductance is negligible when ≪ 1.
    pub fn inductance_ratio(&self, geom: &Geometry<R>) -> Result<R> {
        let speed = self.effective_speed(geom)?;
        let beta = speed / self.constants.light_speed;
        let dx = geom.lattice_spacing;
        Ok(R::lit(4.0) * geom.conducting_sphere_radius / dx * beta * beta * (dx / geom.wire_radius).ln())
    }

    /// Diamagnetic term e²A²/(2m) with |A| ≈ Bρ/3, relative to the gap energy.
    pub fn second_order_zeeman_ratio(&self, magnetic_field: R, geom: &Geometry<R>) -> Result<R> {
        if !magnetic_field.is_finite_value() || magnetic_field < R::zero() {
            return Err(Error::domain("magnetic_field_T", "must be finite and >= 0"));
        }
        let (gap, _) = self.gap_energy_and_temperature(geom)?;
        let c = &self.constants;
        let potential = magnetic_field * geom.insulating_sphere_radius / R::lit(3.0);
        // (eA)²/(2m) / gap, factored to avoid f32 underflow
        let momentum = c.electron_charge * potential;
        Ok((momentum / gap) * (c.electron_charge / c.electron_mass) * potential / R::lit(2.0))
    }

    pub fn hierarchy_report(&self, geom: &Geometry<R>) -> Result<Vec<HierarchyEntry<R>>> {
        let scale = self.dynamical_scale(geom)?;
        let wavelength = R::one() / scale;
        let g = geom;
        let entries = [
            ("lambda/dx", wavelength / g.lattice_spacing),
            ("dx/gamma", g.lattice_spacing / g.sphere_gap),
            ("gamma/rho", g.sphere_gap / g.insulating_sphere_radius),
            ("gamma/alpha", g.sphere_gap / g.conducting_sphere_radius),
            ("rho/delta", g.insulating_sphere_radius / g.wire_radius),
            ("alpha/delta", g.conducting_sphere_radius / g.wire_radius),
        ];
        Ok(entries
            .into_iter()
            .map(|(name, ratio)| HierarchyEntry {
                name: name.to_string(),
                ratio,
                verdict: Verdict::large(ratio.to_f64_lossy(), HIERARCHY_PASS, HIERARCHY_WARN),
            })
            .collect())
    }

    pub fn effective_params(&self, geom: &Geometry<R>) -> Result<EffectiveParams<R>> {
        let interaction_strength = self.interaction_strength(geom)?;
        let effective_speed = self.effective_speed(geom)?;
        let effective_coupling = self.effective_coupling(geom)?;
        let dynamical_scale = Self::dynamical_scale_from(effective_coupling, geom.lattice_spacing);
        let rotational_quantum = self.rotational_quantum(geom);
        let c = &self.constants;
        let rho2 = geom.insulating_sphere_radius * geom.insulating_sphere_radius;
        let rotor_coupling = R::lit(2.0)
            * interaction_strength
            * (c.electron_mass / c.hbar)
            * (rho2 / c.hbar)
            * rho2;
        let gap_energy = c.hbar * effective_speed * dynamical_scale;
        Ok(EffectiveParams {
            interaction_strength,
            effective_speed,
            effective_coupling,
            dynamical_scale,
            rotational_quantum,
            rotor_coupling,
            gap_energy,
            gap_temperature: gap_energy / c.boltzmann,
            critical_field: (c.electron_mass / c.electron_charge) * effective_speed * dynamical_scale,
        })
    }

    pub fn feasibility(&self, geom: &Geometry<R>, env: &Environment<R>) -> Result<FeasibilityReport<R>> {
        geom.validate()?;
        env.validate()?;
        let effective = self.effective_params(geom)?;
        let hierarchy_ratios = self.hierarchy_report(geom)?;
        let inductance_ratio = self.inductance_ratio(geom)?;
        let temperature_ratio = self.constants.boltzmann * env.temperature / effective.gap_energy;
        let chemical_potential = self.chemical_potential(env.magnetic_field)?;
        let zeeman = self.second_order_zeeman_ratio(env.magnetic_field, geom)?;

        let mut report = FeasibilityReport {
            effective,
            hierarchy_ratios,
            inductance_ratio,
            inductance_verdict: Verdict::small(inductance_ratio.to_f64_lossy(), INDUCTANCE_PASS, INDUCTANCE_WARN),
            temperature_ratio,
            temperature_verdict: Verdict::small(
                temperature_ratio.to_f64_lossy(),
                TEMPERATURE_PASS,
                TEMPERATURE_WARN,
            ),
            chemical_potential,
            second_order_zeeman_ratio: zeeman,
            second_order_zeeman_verdict: Verdict::small(zeeman.to_f64_lossy(), ZEEMAN_PASS, ZEEMAN_WARN),
            order_estimates: vec![
                "critical_field".to_string(),
                "second_order_zeeman_ratio".to_string(),
                "dynamical_scale".to_string(),
            ],
            overall_verdict: Verdict::Pass,
        };
        report.overall_verdict = report.verdicts().max().unwrap_or(Verdict::Pass);
        Ok(report)
    }

    /// Sweeps one parameter over `[start, end]` and reports one summary row
    /// per step, in input order.
    ///
    /// Spacing is geometric; a sweep of temperature or field that starts at
    /// zero uses linear spacing instead.
    pub fn scan(
        &self,
        geom: &Geometry<R>,
        env: &Environment<R>,
        parameter: ScanParameter,
        start: R,
        end: R,
        steps: usize,
    ) -> Result<Vec<ScanRow<R>>> {
        let values = scan_values(parameter, start, end, steps)?;
        values
            .par_iter()
            .map(|&value| {
                let (g, e) = parameter.apply(geom, env, value);
                let report = self.feasibility(&g, &e)?;
                Ok(ScanRow::from_report(value, &report))
            })
            .collect()
    }
}

/// Grid used by [`Designer::scan`].
pub fn scan_values<R: Real>(parameter: ScanParameter, start: R, end: R, steps: usize) -> Result<Vec<R>> {
    if steps < 2 {
        return Err(Error::domain("steps", "need at least 2 steps"));
    }
    if !start.is_finite_value() || !end.is_finite_value() {
        return Err(Error::domain("range", "bounds must be finite"));
    }
    if !(end > start) {
        return Err(Error::domain("range", "end must be greater than start"));
    }
    let last = steps - 1;
    let denom = R::from_int(last as i64);
    if start > R::zero() {
        let ratio = end / start;
        Ok((0..steps)
            .map(|i| match i {
                0 => start,
                i if i == last => end,
                i => start * ratio.powf(R::from_int(i as i64) / denom),
            })
            .collect())
    } else if start == R::zero() && !parameter.is_length() {
        Ok((0..steps)
            .map(|i| match i {
                0 => start,
                i if i == last => end,
                i => end * R::from_int(i as i64) / denom,
            })
            .collect())
    } else {
        Err(Error::domain("range", "range must be positive"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanParameter {
    Delta,
    Rho,
    Alpha,
    Gamma,
    Dx,
    Temperature,
    MagneticField,
}

impl ScanParameter {
    pub fn is_length(self) -> bool {
        !matches!(self, ScanParameter::Temperature | ScanParameter::MagneticField)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScanParameter::Delta => "delta_m",
            ScanParameter::Rho => "rho_m",
            ScanParameter::Alpha => "alpha_m",
            ScanParameter::Gamma => "gamma_m",
            ScanParameter::Dx => "dx_m",
            ScanParameter::Temperature => "temperature_K",
            ScanParameter::MagneticField => "magnetic_field_T",
        }
    }

    fn apply<R: Real>(self, geom: &Geometry<R>, env: &Environment<R>, value: R) -> (Geometry<R>, Environment<R>) {
        let mut g = *geom;
        let mut e = *env;
        match self {
            ScanParameter::Delta => g.wire_radius = value,
            ScanParameter::Rho => g.insulating_sphere_radius = value,
            ScanParameter::Alpha => g.conducting_sphere_radius = value,
            ScanParameter::Gamma => g.sphere_gap = value,
            ScanParameter::Dx => g.lattice_spacing = value,
            ScanParameter::Temperature => e.temperature = value,
            ScanParameter::MagneticField => e.magnetic_field = value,
        }
        (g, e)
    }
}

impl FromStr for ScanParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "delta" | "delta_m" => ScanParameter::Delta,
            "rho" | "rho_m" => ScanParameter::Rho,
            "alpha" | "alpha_m" => ScanParameter::Alpha,
            "gamma" | "gamma_m" => ScanParameter::Gamma,
            "dx" | "dx_m" => ScanParameter::Dx,
            "temperature" | "temperature_K" | "T" => ScanParameter::Temperature,
            "magnetic_field" | "magnetic_field_T" | "B" => ScanParameter::MagneticField,
            other => {
                return Err(Error::domain(
                    "parameter",
                    format!("unknown scan parameter `{other}` (expected one of delta, rho, alpha, gamma, dx, temperature, magnetic_field)"),
                ))
            }
        })
    }
}

impl fmt::Display for ScanParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of a design scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow<R> {
    pub value: R,
    pub effective_coupling: R,
    pub effective_speed: R,
    pub dynamical_length: R,
    pub gap_temperature: R,
    pub critical_field: R,
    pub rotor_coupling: R,
    pub inductance_ratio: R,
    pub temperature_ratio: R,
    pub chemical_potential: R,
    pub second_order_zeeman_ratio: R,
    pub overall_verdict: Verdict,
}

impl<R: Real> ScanRow<R> {
    pub fn from_report(value: R, report: &FeasibilityReport<R>) -> Self {
        let e = &report.effective;
        Self {
            value,
            effective_coupling: e.effective_coupling,
            effective_speed: e.effective_speed,
            dynamical_length: R::one() / e.dynamical_scale,
            gap_temperature: e.gap_temperature,
            critical_field: e.critical_field,
            rotor_coupling: e.rotor_coupling,
            inductance_ratio: report.inductance_ratio,
            temperature_ratio: report.temperature_ratio,
            chemical_potential: report.chemical_potential,
            second_order_zeeman_ratio: report.second_order_zeeman_ratio,
            overall_verdict: report.overall_verdict,
        }
    }

    pub const HEADER: [&'static str; 12] = [
        "value",
        "g_eff",
        "c_eff_m_per_s",
        "lambda_inv_m",
        "gap_temperature_K",
        "critical_field_T",
        "kappa",
        "inductance_ratio",
        "temperature_ratio",
        "mu_eff_J",
        "second_order_zeeman_ratio",
        "verdict",
    ];

    pub fn numbers(&self) -> [R; 11] {
        [
            self.value,
            self.effective_coupling,
            self.effective_speed,
            self.dynamical_length,
            self.gap_temperature,
            self.critical_field,
            self.rotor_coupling,
            self.inductance_ratio,
            self.temperature_ratio,
            self.chemical_potential,
            self.second_order_zeeman_ratio,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn d() -> Designer<f64> {
        Designer::new()
    }

    #[test]
    fn capacitance_denominator_presets() {
        let micro = d().capacitance_denominator(&Geometry::micro()).unwrap();
        let nano = d().capacitance_denominator(&Geometry::nano()).unwrap();
        assert_relative_eq!(micro, 4.589e-6, max_relative = 1e-3);
        assert_relative_eq!(nano, 4.589e-8, max_relative = 1e-3);
    }

    #[test]
    fn capacitance_denominator_unit_log() {
        // Δx = e·δ makes the logarithm exactly one; tiny α leaves Δx.
        let delta = 1e-9;
        let dx = delta * std::f64::consts::E;
        let g = Geometry::new(delta, 1e-9, 1e-30, 1e-8, dx).unwrap();
        assert_relative_eq!(d().capacitance_denominator(&g).unwrap(), dx, max_relative = 1e-12);
    }

    #[test]
    fn dx_not_above_delta_is_domain_error() {
        let g = Geometry {
            wire_radius: 1e-6,
            insulating_sphere_radius: 1e-6,
            conducting_sphere_radius: 1e-6,
            sphere_gap: 1e-6,
            lattice_spacing: 1e-6,
        };
        for r in [
            d().capacitance_denominator(&g).map(|_| ()),
            d().interaction_strength(&g).map(|_| ()),
            d().effective_speed(&g).map(|_| ()),
            d().effective_coupling(&g).map(|_| ()),
        ] {
            assert!(matches!(r, Err(Error::Domain { ref field, .. }) if field == "dx_m"));
        }
        assert!(Geometry::new(1.0, 1.0, 1.0, 1.0, -1.0).is_err());
        assert!(Geometry::new(1.0, f64::NAN, 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn interaction_strength_gamma_scaling() {
        let g = Geometry::<f64>::micro();
        let mut g2 = g;
        g2.sphere_gap *= 2.0;
        let k1 = d().interaction_strength(&g).unwrap();
        let k2 = d().interaction_strength(&g2).unwrap();
        assert_relative_eq!(k1 / k2, 16.0, max_relative = 1e-12);
        assert_relative_eq!(k1, 3.2176e-13, max_relative = 1e-4);
    }

    #[test]
    fn speed_matches_reference_scale() {
        let c_micro = d().effective_speed(&Geometry::micro()).unwrap();
        let c_nano = d().effective_speed(&Geometry::nano()).unwrap();
        assert_relative_eq!(c_micro, 1.0506e4, max_relative = 1e-3);
        assert_relative_eq!(c_nano, 1.0506e5, max_relative = 1e-3);
        assert!(c_micro / 299_792_458.0 < 1e-3);
        assert!(c_nano / 299_792_458.0 < 1e-3);
    }

    #[test]
    fn coupling_presets() {
        assert_relative_eq!(d().effective_coupling(&Geometry::micro()).unwrap(), 1.607, max_relative = 1e-3);
        assert_relative_eq!(d().effective_coupling(&Geometry::nano()).unwrap(), 1.694, max_relative = 1e-3);
    }

    #[test]
    fn dynamical_scale_micro() {
        let g = Geometry::micro();
        let lam = d().dynamical_scale(&g).unwrap();
        assert_relative_eq!(1.0 / lam, 142.4e-6, max_relative = 1e-3);
        assert_relative_eq!(lam * g.lattice_spacing, 0.0878, max_relative = 1e-3);
        // asymptotic freedom: Λ vanishes as g → 0
        let weak = Designer::<f64>::dynamical_scale_from(0.1, 1.0);
        assert!(weak < 1e-200);
    }

    #[test]
    fn gap_temperature_presets() {
        let (e_micro, t_micro) = d().gap_energy_and_temperature(&Geometry::micro()).unwrap();
        let (_, t_nano) = d().gap_energy_and_temperature(&Geometry::nano()).unwrap();
        assert!(t_micro > 300e-6 && t_micro < 1200e-6, "{t_micro}");
        assert!(t_nano > 0.5 && t_nano < 2.0, "{t_nano}");
        let e0 = d().rotational_quantum(&Geometry::micro());
        let ratio = e_micro / e0;
        assert!(ratio > 0.05 && ratio < 0.5, "{ratio}");
    }

    #[test]
    fn energy_levels() {
        let g = Geometry::micro();
        assert_eq!(d().energy_level(0, &g), 0.0);
        let e1 = d().energy_level(1, &g);
        assert_relative_eq!(e1, 7.63e-26, max_relative = 2e-3);
        assert_relative_eq!(e1 / 1.380649e-23, 5.53e-3, max_relative = 2e-3);
        let mut other = g;
        other.insulating_sphere_radius = 3.3e-8;
        assert_relative_eq!(d().energy_level(2, &other) / d().energy_level(1, &other), 3.0, max_relative = 1e-14);
    }

    #[test]
    fn chemical_potential_values() {
        assert_eq!(d().chemical_potential(0.0).unwrap(), 0.0);
        assert_relative_eq!(d().chemical_potential(1e-3).unwrap(), 6.1827e-27, max_relative = 1e-4);
        assert!(d().chemical_potential(-1.0).is_err());
        let g = Geometry::micro();
        let b = d().critical_field(&g).unwrap();
        let (gap, _) = d().gap_energy_and_temperature(&g).unwrap();
        let mu = d().chemical_potential(b).unwrap();
        assert!(mu / gap > 0.1 && mu / gap < 10.0);
    }

    #[test]
    fn critical_field_micro_and_linearity() {
        let g = Geometry::micro();
        let b = d().critical_field(&g).unwrap();
        assert!(b > 0.1e-3 && b < 10e-3, "{b}");
        assert_relative_eq!(b, 4.195e-4, max_relative = 1e-3);
        // B = m c Λ / e is linear in c at fixed Λ
        let speed = d().effective_speed(&g).unwrap();
        let lam = d().dynamical_scale(&g).unwrap();
        let c = Constants::<f64>::codata2018();
        assert_relative_eq!(b, c.electron_mass() * speed * lam / c.electron_charge(), max_relative = 1e-14);
    }

    #[test]
    fn inductance_ratio_values() {
        let micro = d().inductance_ratio(&Geometry::micro()).unwrap();
        let nano = d().inductance_ratio(&Geometry::nano()).unwrap();
        assert_relative_eq!(micro, 9.488e-10, max_relative = 1e-3);
        assert!(nano < 1e-6);
        // huge image-charge coupling pushes c_eff toward c₀
        let g = Geometry::new(1e-9, 1e-9, 1e-6, 1e-12, 1e-6).unwrap();
        let r = d().inductance_ratio(&g).unwrap();
        assert_eq!(Verdict::small(r, INDUCTANCE_PASS, INDUCTANCE_WARN), Verdict::Fail);
    }

    #[test]
    fn zeeman_ratio_scales_quadratically() {
        let g = Geometry::micro();
        assert_eq!(d().second_order_zeeman_ratio(0.0, &g).unwrap(), 0.0);
        let b = d().critical_field(&g).unwrap();
        let r = d().second_order_zeeman_ratio(b, &g).unwrap();
        assert!(r <= 1e-2, "{r}");
        let r2 = d().second_order_zeeman_ratio(2.0 * b, &g).unwrap();
        assert_relative_eq!(r2 / r, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn hierarchy_presets() {
        let micro = d().hierarchy_report(&Geometry::micro()).unwrap();
        assert!(micro.iter().all(|h| h.verdict == Verdict::Pass), "{micro:?}");
        let rho_delta = micro.iter().find(|h| h.name == "rho/delta").unwrap();
        assert_relative_eq!(rho_delta.ratio, 4.0, max_relative = 1e-12);
        let lam = micro.iter().find(|h| h.name == "lambda/dx").unwrap();
        assert!((lam.ratio - 11.4).abs() < 0.1, "{}", lam.ratio);

        let nano = d().hierarchy_report(&Geometry::nano()).unwrap();
        let get = |n: &str| nano.iter().find(|h| h.name == n).unwrap().clone();
        assert_eq!(get("rho/delta").verdict, Verdict::Pass);
        assert_relative_eq!(get("gamma/rho").ratio, 25.0 / 12.0, max_relative = 1e-12);
        assert_eq!(get("gamma/rho").verdict, Verdict::Warn);

        let mut bad = Geometry::micro();
        bad.sphere_gap = bad.insulating_sphere_radius;
        let r = d().hierarchy_report(&bad).unwrap();
        assert_eq!(r.iter().find(|h| h.name == "gamma/rho").unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn feasibility_verdicts() {
        let micro = Geometry::micro();
        let cold = d().feasibility(&micro, &Environment::new(10e-6, 0.0).unwrap()).unwrap();
        assert_eq!(cold.overall_verdict, Verdict::Pass);
        let warm = d().feasibility(&micro, &Environment::new(10e-3, 0.0).unwrap()).unwrap();
        assert_eq!(warm.temperature_verdict, Verdict::Fail);
        assert_eq!(warm.overall_verdict, Verdict::Fail);
        assert!((warm.temperature_ratio - 17.7).abs() < 0.2);
        let nano = d().feasibility(&Geometry::nano(), &Environment::new(50e-3, 0.0).unwrap()).unwrap();
        assert_ne!(nano.overall_verdict, Verdict::Fail);
        assert!(Environment::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn scan_gamma_and_field() {
        let g = Geometry::micro();
        let env = Environment::new(10e-6, 0.0).unwrap();
        let rho = g.insulating_sphere_radius;
        let rows = d().scan(&g, &env, ScanParameter::Gamma, 2.0 * rho, 20.0 * rho, 10).unwrap();
        assert_eq!(rows.len(), 10);
        assert!(rows.windows(2).all(|w| w[1].effective_coupling > w[0].effective_coupling));
        let mut wide = g;
        wide.sphere_gap = 20.0 * rho;
        let last = d().feasibility(&wide, &env).unwrap();
        assert_eq!(rows[9].gap_temperature, last.effective.gap_temperature);

        let b_crit = d().critical_field(&g).unwrap();
        let rows = d().scan(&g, &env, ScanParameter::MagneticField, 0.0, 2.0 * b_crit, 5).unwrap();
        let slope = rows[4].chemical_potential / rows[4].value;
        for r in &rows[1..] {
            assert_relative_eq!(r.chemical_potential / r.value, slope, max_relative = 1e-12);
        }
        assert_eq!(rows[0].chemical_potential, 0.0);
    }

    #[test]
    fn scan_errors() {
        let g = Geometry::micro();
        let env = Environment::new(0.0, 0.0).unwrap();
        assert!(d().scan(&g, &env, ScanParameter::Gamma, 0.0, 1e-6, 4).is_err());
        assert!(d().scan(&g, &env, ScanParameter::Gamma, 2e-6, 1e-6, 4).is_err());
        assert!(d().scan(&g, &env, ScanParameter::Gamma, 1e-6, 2e-6, 1).is_err());
        assert!("wavelength".parse::<ScanParameter>().is_err());
        assert_eq!("gamma".parse::<ScanParameter>().unwrap(), ScanParameter::Gamma);
    }

    #[test]
    fn single_precision_agrees() {
        let p32 = Designer::<f32>::new().effective_params(&Geometry::micro()).unwrap();
        let p64 = d().effective_params(&Geometry::micro()).unwrap();
        assert_relative_eq!(f64::from(p32.effective_speed), p64.effective_speed, max_relative = 1e-4);
        assert_relative_eq!(f64::from(p32.effective_coupling), p64.effective_coupling, max_relative = 1e-4);
    }
}
