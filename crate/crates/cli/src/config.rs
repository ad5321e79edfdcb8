//! Input documents. Every struct rejects unknown keys.

use std::path::Path;

use o3sim::design::{Environment, Geometry, ScanParameter};
use o3sim::dynamics::{PropagateOptions, RampSchedule, RampShape, DYNAMICS_DIMENSION_CAP};
use o3sim::lattice::{Boundary, ChainSpec, DEFAULT_DIMENSION_CAP};
use o3sim::spectra::{SolverMethod, SolverOptions};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::Failure;

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

/// Top-level object of an optional JSON file; empty when no file is given.
pub fn object(path: Option<&Path>) -> Result<Map<String, Value>, Failure> {
    match path {
        None => Ok(Map::new()),
        Some(p) => match load::<Value>(p)? {
            Value::Object(m) => Ok(m),
            _ => Err(Failure::Invalid(format!("{}: expected a JSON object", p.display()))),
        },
    }
}

/// Deserializes a merged document, reporting failures as invalid input.
pub fn parse<T: DeserializeOwned>(map: Map<String, Value>, what: &str) -> Result<T, Failure> {
    serde_json::from_value(Value::Object(map)).map_err(|e| Failure::Invalid(format!("{what}: {e}")))
}

/// Sets `path` inside nested objects, creating them as needed.
pub fn set(map: &mut Map<String, Value>, path: &[&str], value: Value) -> Result<(), Failure> {
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut cur = map;
    for key in parents {
        cur = cur
            .entry(key.to_string())
            .or_insert_with(|| Value::Object(Map::new()))
            .as_object_mut()
            .ok_or_else(|| Failure::Invalid(format!("{key}: expected an object")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

/// Geometry and environment in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    pub delta_m: f64,
    pub rho_m: f64,
    pub alpha_m: f64,
    pub gamma_m: f64,
    pub dx_m: f64,
    #[serde(rename = "temperature_K", default)]
    pub temperature_k: f64,
    #[serde(rename = "magnetic_field_T", default)]
    pub magnetic_field_t: f64,
}

impl DesignConfig {
    pub fn geometry(&self) -> Result<Geometry<f64>, Failure> {
        Ok(Geometry::new(self.delta_m, self.rho_m, self.alpha_m, self.gamma_m, self.dx_m)?)
    }

    pub fn environment(&self) -> Result<Environment<f64>, Failure> {
        Ok(Environment::new(self.temperature_k, self.magnetic_field_t)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub parameter: ScanParameter,
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainConfig {
    pub sites: usize,
    pub l_max: u32,
    pub kappa: f64,
    pub mu_tilde: f64,
    pub boundary: Boundary,
    pub charge_axis: [f64; 3],
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            sites: 2,
            l_max: 1,
            kappa: 0.0,
            mu_tilde: 0.0,
            boundary: Boundary::Open,
            charge_axis: [0.0, 0.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MuGrid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Default for MuGrid {
    fn default() -> Self {
        Self {
            start: 0.0,
            end: 4.0,
            steps: 41,
        }
    }
}

impl MuGrid {
    pub fn values(&self) -> Result<Vec<f64>, Failure> {
        if self.steps < 2 || !(self.end > self.start) || !self.start.is_finite() || !self.end.is_finite() {
            return Err(Failure::Invalid(
                "mu_grid: need finite start < end and at least 2 steps".into(),
            ));
        }
        let last = (self.steps - 1) as f64;
        Ok((0..self.steps)
            .map(|i| match i {
                0 => self.start,
                i if i == self.steps - 1 => self.end,
                i => self.start + (self.end - self.start) * i as f64 / last,
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RampConfig {
    pub kappa_start: f64,
    pub kappa_end: f64,
    pub duration: f64,
    pub shape: RampShape,
    pub dt: f64,
    pub record_points: usize,
    pub adiabatic_samples: usize,
}

impl Default for RampConfig {
    fn default() -> Self {
        let p = PropagateOptions::default();
        Self {
            kappa_start: 0.0,
            kappa_end: 0.5,
            duration: 100.0,
            shape: RampShape::Linear,
            dt: p.dt,
            record_points: 101,
            adiabatic_samples: p.adiabatic_samples,
        }
    }
}

/// Everything a `sim` subcommand may need; unused sections are ignored by
/// the command but still echoed in its output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub chain: ChainConfig,
    pub solver: SolverOptions,
    pub levels: usize,
    pub mu_grid: MuGrid,
    pub ramp: RampConfig,
    pub dimension_cap: usize,
    /// Geometry the coupling was derived from, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<DesignConfig>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            chain: ChainConfig::default(),
            solver: SolverOptions::default(),
            levels: 6,
            mu_grid: MuGrid::default(),
            ramp: RampConfig::default(),
            dimension_cap: DEFAULT_DIMENSION_CAP,
            geometry: None,
        }
    }
}

impl SimConfig {
    pub fn chain_spec(&self) -> ChainSpec<f64> {
        ChainSpec::new(self.chain.sites, self.chain.l_max, self.chain.kappa)
            .with_boundary(self.chain.boundary)
            .with_mu(self.chain.mu_tilde)
            .with_axis(self.chain.charge_axis)
            .with_dimension_cap(self.dimension_cap)
    }

    pub fn schedule(&self) -> Result<RampSchedule<f64>, Failure> {
        Ok(RampSchedule::new(
            self.ramp.kappa_start,
            self.ramp.kappa_end,
            self.ramp.duration,
            self.ramp.shape,
        )?)
    }

    pub fn propagate_options(&self) -> PropagateOptions {
        PropagateOptions {
            dt: self.ramp.dt,
            record_points: self.ramp.record_points,
            adiabatic_samples: self.ramp.adiabatic_samples,
            dimension_cap: self.dimension_cap.min(DYNAMICS_DIMENSION_CAP),
            solver: self.solver,
            ..PropagateOptions::default()
        }
    }
}

/// Solver method names accepted on the command line.
pub fn parse_method(s: &str) -> Result<SolverMethod, String> {
    s.parse().map_err(|e: o3sim::Error| e.to_string())
}
