use o3sim::design::Designer;
use o3sim::dynamics::{physical_ramp_time, propagate, EvolutionResult};
use o3sim::io;
use o3sim::spectra::{chain_spectrum, charge_scan, correlation_profile, mass_gap};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{object, parse, set, SimConfig};
use crate::design::resolve_design;
use crate::output::{self, num, Table};
use crate::{Failure, GeometryFlags, SimArgs, MAX_DIM_ENV};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Spectrum,
    Gap,
    ChargeScan,
    Correlation,
    Ramp,
}

/// Couplings implied by a geometry document.
fn derive_from_geometry(map: &mut Map<String, Value>, args: &SimArgs) -> Result<(), Failure> {
    let Some(path) = &args.from_geometry else {
        return Ok(());
    };
    let design = resolve_design(Some(path), &GeometryFlags::default())?;
    let designer = Designer::<f64>::new();
    let eff = designer.effective_params(&design.geometry()?)?;
    let g = eff.effective_coupling;
    let kappa = 9.0 / g.powi(4);
    let mu_eff = designer.chemical_potential(design.environment()?.magnetic_field)?;
    let mu_tilde = mu_eff / eff.rotational_quantum;
    println!("g_eff = {}", num(g));
    println!("kappa = 9/g_eff^4 = {}", num(kappa));
    println!("mu_eff = {} J", num(mu_eff));
    println!("E0 = {} J", num(eff.rotational_quantum));
    println!("mu_tilde = mu_eff/E0 = {}", num(mu_tilde));
    set(map, &["chain", "kappa"], json!(kappa))?;
    set(map, &["chain", "mu_tilde"], json!(mu_tilde))?;
    set(map, &["ramp", "kappa_end"], json!(kappa))?;
    map.insert("geometry".into(), serde_json::to_value(design).expect("geometry serializes"));
    Ok(())
}

fn apply_flags(map: &mut Map<String, Value>, args: &SimArgs) -> Result<(), Failure> {
    let mut put = |path: &[&str], v: Option<Value>| match v {
        Some(v) => set(map, path, v),
        None => Ok(()),
    };
    put(&["chain", "sites"], args.sites.map(|v| json!(v)))?;
    put(&["chain", "l_max"], args.lmax.map(|v| json!(v)))?;
    put(&["chain", "kappa"], args.kappa.map(|v| json!(v)))?;
    put(&["chain", "mu_tilde"], args.mu.map(|v| json!(v)))?;
    put(&["chain", "boundary"], args.boundary.map(|v| json!(v)))?;
    put(&["solver", "method"], args.method.map(|v| json!(v)))?;
    put(&["solver", "tol"], args.tol.map(|v| json!(v)))?;
    put(&["solver", "max_iterations"], args.max_iterations.map(|v| json!(v)))?;
    put(&["levels"], args.levels.map(|v| json!(v)))?;
    put(&["mu_grid", "start"], args.mu_start.map(|v| json!(v)))?;
    put(&["mu_grid", "end"], args.mu_end.map(|v| json!(v)))?;
    put(&["mu_grid", "steps"], args.mu_steps.map(|v| json!(v)))?;
    put(&["ramp", "kappa_start"], args.kappa_start.map(|v| json!(v)))?;
    put(&["ramp", "kappa_end"], args.kappa_end.map(|v| json!(v)))?;
    put(&["ramp", "duration"], args.duration.map(|v| json!(v)))?;
    put(&["ramp", "shape"], args.shape.map(|v| json!(v)))?;
    put(&["ramp", "dt"], args.dt.map(|v| json!(v)))?;
    put(&["ramp", "record_points"], args.record_points.map(|v| json!(v)))?;
    Ok(())
}

/// Merged simulation config: file, then geometry-derived couplings, then
/// flags, then the dimension-cap override from the environment.
fn resolve(args: &SimArgs) -> Result<SimConfig, Failure> {
    let mut map = object(args.config.as_deref())?;
    derive_from_geometry(&mut map, args)?;
    apply_flags(&mut map, args)?;
    let mut cfg: SimConfig = parse(map, "config")?;
    if let Ok(raw) = std::env::var(MAX_DIM_ENV) {
        cfg.dimension_cap = raw
            .trim()
            .parse()
            .map_err(|_| Failure::Invalid(format!("{MAX_DIM_ENV}: expected a positive integer, got {raw:?}")))?;
    }
    Ok(cfg)
}

#[derive(Serialize)]
struct RampOutput<'a> {
    #[serde(flatten)]
    evolution: &'a EvolutionResult<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    physical_duration_s: Option<f64>,
}

pub fn run(kind: Kind, args: &SimArgs) -> Result<(), Failure> {
    let cfg = resolve(args)?;
    let spec = cfg.chain_spec();
    let solver = cfg.solver;
    let out = &args.output;
    match kind {
        Kind::Spectrum => {
            let r = chain_spectrum(&spec, cfg.levels, &solver)?;
            let rows = (0..r.eigenvalues.len())
                .map(|i| {
                    vec![
                        i.to_string(),
                        num(r.eigenvalues[i]),
                        r.sector_labels[i].map_or(String::new(), |m| m.to_string()),
                        num(r.residual_norms[i]),
                    ]
                })
                .collect();
            let table = Table {
                header: vec!["index", "energy", "sector", "residual"],
                rows,
            };
            let doc = io::document("spectrum", &cfg, &r)?;
            output::write(&out.out, "spectrum", out.format, &cfg, &doc, &table)?;
            println!("ground energy {} ({} levels, {})", num(r.eigenvalues[0]), r.eigenvalues.len(), r.method);
        }
        Kind::Gap => {
            let g = mass_gap(&spec, &solver)?;
            let table = Table {
                header: vec!["ground_energy", "first_excited", "gap", "degeneracy"],
                rows: vec![vec![
                    num(g.ground_energy),
                    num(g.first_excited),
                    num(g.gap),
                    g.degeneracy.to_string(),
                ]],
            };
            let doc = io::document("mass_gap", &cfg, &g)?;
            output::write(&out.out, "gap", out.format, &cfg, &doc, &table)?;
            println!("gap {} (degeneracy {})", num(g.gap), g.degeneracy);
        }
        Kind::ChargeScan => {
            let grid = cfg.mu_grid.values()?;
            let s = charge_scan(&spec, &grid, &solver)?;
            let rows = (0..s.mu_values.len())
                .map(|i| vec![num(s.mu_values[i]), s.ground_charge[i].to_string(), num(s.ground_energy[i])])
                .collect();
            let table = Table {
                header: vec!["mu", "Q", "energy"],
                rows,
            };
            let doc = io::document("charge_scan", &cfg, &s)?;
            output::write(&out.out, "charge_scan", out.format, &cfg, &doc, &table)?;
            match s.critical_mu {
                Some(mu) => println!("critical_mu {}", num(mu)),
                None => println!("no condensation on this grid"),
            }
        }
        Kind::Correlation => {
            let p = correlation_profile(&spec, &solver)?;
            let rows = p.distances.iter().zip(&p.values).map(|(d, v)| vec![d.to_string(), num(*v)]).collect();
            let table = Table {
                header: vec!["distance", "value"],
                rows,
            };
            let doc = io::document("correlation", &cfg, &p)?;
            output::write(&out.out, "correlation", out.format, &cfg, &doc, &table)?;
            match p.fitted_xi {
                Some(xi) => println!("correlation length {} sites", num(xi)),
                None => println!("no exponential fit"),
            }
        }
        Kind::Ramp => {
            let schedule = cfg.schedule()?;
            let e = propagate(&spec, &schedule, &cfg.propagate_options())?;
            let physical_duration_s = match &cfg.geometry {
                Some(d) => Some(physical_ramp_time(&Designer::<f64>::new().constants, &d.geometry()?, schedule.duration)),
                None => None,
            };
            let rows = e
                .time_series
                .iter()
                .map(|s| vec![num(s.time), num(s.fidelity), num(s.norm), num(s.kappa)])
                .collect();
            let table = Table {
                header: vec!["t", "fidelity_to_instantaneous_gs", "norm", "kappa"],
                rows,
            };
            let result = RampOutput {
                evolution: &e,
                physical_duration_s,
            };
            let doc = io::document("ramp", &cfg, &result)?;
            output::write(&out.out, "ramp", out.format, &cfg, &doc, &table)?;
            println!(
                "final fidelity {}, max adiabatic ratio {}, {} steps",
                num(e.final_fidelity),
                num(e.max_adiabatic_ratio),
                e.step_count
            );
        }
    }
    Ok(())
}
