use std::path::Path;

use o3sim::design::{Designer, FeasibilityReport, ScanParameter, ScanRow, Verdict};
use o3sim::io;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{object, parse, DesignConfig, ScanConfig};
use crate::output::{self, num, Table};
use crate::{Failure, GeometryFlags, ReportArgs, ScanArgs};

fn apply_geometry_flags(map: &mut Map<String, Value>, flags: &GeometryFlags) {
    let pairs = [
        ("delta_m", flags.delta_m),
        ("rho_m", flags.rho_m),
        ("alpha_m", flags.alpha_m),
        ("gamma_m", flags.gamma_m),
        ("dx_m", flags.dx_m),
        ("temperature_K", flags.temperature_k),
        ("magnetic_field_T", flags.magnetic_field_t),
    ];
    for (key, value) in pairs {
        if let Some(v) = value {
            map.insert(key.into(), json!(v));
        }
    }
}

/// Geometry document from an optional file plus flag overrides.
pub fn resolve_design(path: Option<&Path>, flags: &GeometryFlags) -> Result<DesignConfig, Failure> {
    let mut map = object(path)?;
    apply_geometry_flags(&mut map, flags);
    parse(map, "geometry")
}

fn report_table(r: &FeasibilityReport<f64>) -> Table {
    let e = &r.effective;
    let mut rows: Vec<Vec<String>> = [
        ("interaction_strength", e.interaction_strength),
        ("effective_speed", e.effective_speed),
        ("effective_coupling", e.effective_coupling),
        ("dynamical_scale", e.dynamical_scale),
        ("rotational_quantum", e.rotational_quantum),
        ("rotor_coupling", e.rotor_coupling),
        ("gap_energy", e.gap_energy),
        ("gap_temperature", e.gap_temperature),
        ("critical_field", e.critical_field),
        ("chemical_potential", r.chemical_potential),
    ]
    .into_iter()
    .map(|(k, v)| vec![k.to_string(), num(v), String::new()])
    .collect();
    for h in &r.hierarchy_ratios {
        rows.push(vec![h.name.clone(), num(h.ratio), h.verdict.as_str().into()]);
    }
    for (k, v, verdict) in [
        ("inductance_ratio", r.inductance_ratio, r.inductance_verdict),
        ("temperature_ratio", r.temperature_ratio, r.temperature_verdict),
        ("second_order_zeeman_ratio", r.second_order_zeeman_ratio, r.second_order_zeeman_verdict),
    ] {
        rows.push(vec![k.into(), num(v), verdict.as_str().into()]);
    }
    rows.push(vec!["overall".into(), String::new(), r.overall_verdict.as_str().into()]);
    Table {
        header: vec!["quantity", "value", "verdict"],
        rows,
    }
}

pub fn report(args: &ReportArgs) -> Result<(), Failure> {
    let cfg = resolve_design(args.config.as_deref(), &args.geometry)?;
    let report = Designer::<f64>::new().feasibility(&cfg.geometry()?, &cfg.environment()?)?;
    let doc = io::document("feasibility_report", &cfg, &report)?;
    output::write(&args.output.out, "report", args.output.format, &cfg, &doc, &report_table(&report))?;
    let e = &report.effective;
    println!(
        "overall_verdict {}: g_eff {}, c_eff {} m/s, gap temperature {} K",
        report.overall_verdict.as_str(),
        num(e.effective_coupling),
        num(e.effective_speed),
        num(e.gap_temperature)
    );
    match report.overall_verdict {
        Verdict::Fail => Err(Failure::Infeasible("at least one validity condition fails".into())),
        Verdict::Warn if args.strict => Err(Failure::Infeasible("warnings are fatal with --strict".into())),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct ScanEcho {
    #[serde(flatten)]
    design: DesignConfig,
    scan: ScanConfig,
}

pub fn scan(args: &ScanArgs) -> Result<(), Failure> {
    let mut map = object(args.config.as_deref())?;
    let mut scan = match map.remove("scan") {
        Some(Value::Object(m)) => m,
        Some(_) => return Err(Failure::Invalid("scan: expected an object".into())),
        None => Map::new(),
    };
    apply_geometry_flags(&mut map, &args.geometry);
    if let Some(p) = &args.parameter {
        let parsed: ScanParameter = p.parse()?;
        scan.insert("parameter".into(), serde_json::to_value(parsed).expect("enum serializes"));
    }
    for (key, value) in [("start", args.start), ("end", args.end)] {
        if let Some(v) = value {
            scan.insert(key.into(), json!(v));
        }
    }
    if let Some(n) = args.steps {
        scan.insert("steps".into(), json!(n));
    }
    let design: DesignConfig = parse(map, "geometry")?;
    let scan: ScanConfig = parse(scan, "scan")?;

    let rows = Designer::<f64>::new().scan(
        &design.geometry()?,
        &design.environment()?,
        scan.parameter,
        scan.start,
        scan.end,
        scan.steps,
    )?;
    let echo = ScanEcho { design, scan };
    let doc = io::document("design_scan", &echo, &rows)?;
    let mut header = ScanRow::<f64>::HEADER.to_vec();
    header[0] = scan.parameter.as_str();
    let table = Table {
        header,
        rows: rows
            .iter()
            .map(|r| {
                let mut cells = io::cells(&r.numbers());
                cells.push(r.overall_verdict.as_str().into());
                cells
            })
            .collect(),
    };
    output::write(&args.output.out, "scan", args.output.format, &echo, &doc, &table)?;
    println!("{} rows over {}", rows.len(), scan.parameter.as_str());
    Ok(())
}
