//! Acceptance run over the ten headline criteria. Prints one PASS/FAIL line
//! per criterion with its runtime and exits non-zero if any fails.

#[path = "../../core/tests/common/quadrature.rs"]
mod quadrature;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use o3sim::design::{Constants, Designer, Geometry};
use o3sim::dynamics::{physical_ramp_time, propagate, PropagateOptions, RampSchedule, RampShape};
use o3sim::lattice::{
    build_charge, build_hamiltonian, build_sector_hamiltonian, direction_matrices, sector_decompose, Boundary,
    ChainSpec, SiteBasis,
};
use o3sim::spectra::{
    chain_spectrum, charge_scan, ground_state, lowest_eigenpairs, mass_gap, SolverMethod, SolverOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within_factor(x: f64, target: f64, factor: f64) -> bool {
    x >= target / factor && x <= target * factor
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn micro_set() -> Check {
    let eff = Designer::<f64>::new().effective_params(&Geometry::micro()).map_err(fail)?;
    let c = eff.effective_speed;
    let g = eff.effective_coupling;
    let inv_lambda = 1.0 / eff.dynamical_scale;
    let t_gap = eff.gap_temperature;
    ensure!((0.7e4..=1.5e4).contains(&c), "c_eff {c} m/s");
    ensure!((1.0..=3.0).contains(&g), "g_eff {g}");
    ensure!(within_factor(inv_lambda, 125e-6, 2.0), "1/Lambda {inv_lambda} m");
    ensure!(within_factor(t_gap, 600e-6, 2.0), "gap temperature {t_gap} K");
    Ok(format!(
        "c_eff {c:.4e} m/s, g_eff {g:.4}, 1/Lambda {:.1} um, T_gap {:.0} uK",
        inv_lambda * 1e6,
        t_gap * 1e6
    ))
}

fn nano_set() -> Check {
    let eff = Designer::<f64>::new().effective_params(&Geometry::nano()).map_err(fail)?;
    let c = eff.effective_speed;
    let t_gap = eff.gap_temperature;
    ensure!((0.7e5..=1.5e5).contains(&c), "c_eff {c} m/s");
    ensure!((0.5..=3.0).contains(&t_gap), "gap temperature {t_gap} K");
    Ok(format!("c_eff {c:.4e} m/s, T_gap {t_gap:.3} K"))
}

fn field_and_inductance() -> Check {
    let d = Designer::<f64>::new();
    let b = d.critical_field(&Geometry::micro()).map_err(fail)?;
    ensure!((0.1e-3..=10e-3).contains(&b), "micro B_crit {b} T");
    let mut ratios = Vec::new();
    for geom in [Geometry::micro(), Geometry::nano()] {
        let r = d.inductance_ratio(&geom).map_err(fail)?;
        ensure!(r < 1e-6, "inductance ratio {r}");
        ratios.push(r);
    }
    Ok(format!(
        "B_crit {:.3} mT, inductance ratios {:.2e} / {:.2e}",
        b * 1e3,
        ratios[0],
        ratios[1]
    ))
}

/// Log-uniform geometry with every hierarchy ratio between 2 and 10.
fn random_geometry(rng: &mut ChaCha8Rng) -> Geometry<f64> {
    let mut ratio = || 10f64.powf(rng.random_range(0.30103..1.0));
    let delta = 1e-9 * 10f64.powf(2.0 * (ratio().log10() - 0.30103) / 0.69897);
    let rho = delta * ratio();
    let alpha = delta * ratio();
    let gamma = rho.max(alpha) * ratio();
    let dx = gamma * ratio();
    Geometry::new(delta, rho, alpha, gamma, dx).expect("valid geometry")
}

fn identities() -> Check {
    let d = Designer::<f64>::new();
    let mass = d.constants.electron_mass();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut worst_kappa, mut worst_c) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let geom = random_geometry(&mut rng);
        let eff = d.effective_params(&geom).map_err(fail)?;
        let kg4 = eff.rotor_coupling * eff.effective_coupling.powi(4);
        let c_ref = geom.lattice_spacing * (2.0 * eff.interaction_strength / mass).sqrt();
        worst_kappa = worst_kappa.max((kg4 - 9.0).abs());
        worst_c = worst_c.max(((eff.effective_speed - c_ref) / c_ref).abs());
    }
    ensure!(worst_kappa < 1e-9, "max |kappa g^4 - 9| = {worst_kappa:e}");
    ensure!(worst_c < 1e-12, "max relative c_eff error {worst_c:e}");
    Ok(format!("100 geometries: |kappa g^4 - 9| <= {worst_kappa:.1e}, c_eff rel. err <= {worst_c:.1e}"))
}

fn free_rotor_levels() -> Check {
    let d = Designer::<f64>::new();
    let geom = Geometry::micro();
    let e0 = d.rotational_quantum(&geom);
    for l_max in 1..=4u32 {
        let spec = ChainSpec::<f64>::new(1, l_max, 0.0);
        let s = chain_spectrum(&spec, spec.site_dimension(), &opts()).map_err(fail)?;
        let mut want: Vec<f64> = (0..=l_max)
            .flat_map(|l| std::iter::repeat_n(f64::from(l * (l + 1)), (2 * l + 1) as usize))
            .collect();
        want.sort_by(f64::total_cmp);
        ensure!(s.eigenvalues == want, "l_max {l_max}: {:?}", s.eigenvalues);
        for l in 0..=l_max {
            let physical = d.energy_level(l, &geom);
            let expect = e0 * f64::from(l * (l + 1));
            ensure!((physical - expect).abs() <= 1e-12 * e0, "E_{l} {physical} vs {expect}");
        }
    }
    for n in 1..=4 {
        for l_max in [1, 2] {
            if n == 4 && l_max == 2 {
                continue;
            }
            let g = mass_gap(&ChainSpec::new(n, l_max, 0.0), &opts()).map_err(fail)?;
            ensure!(g.gap == 2.0 && g.degeneracy == 3 * n, "n {n} l_max {l_max}: {g:?}");
        }
    }
    Ok("single-site levels exact for l_max 1..4; gap 2 E0 with degeneracy 3n for n 1..4".into())
}

fn oracle_equivalence() -> Check {
    let spec = ChainSpec::<f64>::new(5, 1, 0.8);
    let h = build_hamiltonian(&spec).map_err(fail)?;
    ensure!(h.dimension() == 1024, "dimension {}", h.dimension());
    let dense = lowest_eigenpairs(&h, 5, &opts().with_method(SolverMethod::Dense)).map_err(fail)?;
    let iter = lowest_eigenpairs(&h, 5, &opts().with_method(SolverMethod::Iterative)).map_err(fail)?;
    let solver_gap = dense
        .eigenvalues
        .iter()
        .zip(&iter.eigenvalues)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    ensure!(solver_gap < 1e-8, "dense vs iterative differ by {solver_gap:e}");

    let mut quad_gap = 0.0f64;
    for l_max in 0..=3 {
        let exact = quadrature::quadrature_elements(l_max);
        let ops = direction_matrices::<f64>(l_max);
        let d = SiteBasis::new(l_max).len();
        for (which, op) in [&ops.n_z, &ops.n_plus, &ops.n_minus].into_iter().enumerate() {
            for r in 0..d {
                for c in 0..d {
                    quad_gap = quad_gap.max((op.get(r, c) - exact[which][r][c]).norm());
                }
            }
        }
    }
    ensure!(quad_gap < 1e-10, "direction matrices off quadrature by {quad_gap:e}");

    let kappa = 0.1f64;
    let perturbative = 2.0 * kappa - kappa * kappa / 3.0;
    let e0 = chain_spectrum(&ChainSpec::new(2, 3, kappa), 1, &opts()).map_err(fail)?.eigenvalues[0];
    ensure!((e0 - 0.196667).abs() < 1e-3, "two-site ground energy {e0}");
    ensure!((perturbative - 0.196667).abs() < 1e-6, "perturbative value {perturbative}");
    Ok(format!(
        "solvers agree to {solver_gap:.1e}; quadrature to {quad_gap:.1e}; E0(kappa=0.1) = {e0:.6}"
    ))
}

fn symmetries() -> Check {
    let mut worst = 0.0f64;
    for n in 1..=3 {
        for l_max in 1..=2 {
            for boundary in [Boundary::Open, Boundary::Periodic] {
                if boundary == Boundary::Periodic && n < 3 {
                    continue;
                }
                let spec = ChainSpec::new(n, l_max, 1.3).with_boundary(boundary);
                let h = build_hamiltonian(&spec).map_err(fail)?;
                for axis in [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.48, -0.6, 0.64]] {
                    let q = build_charge(&spec.clone().with_axis(axis)).map_err(fail)?;
                    worst = worst.max(h.commutator_max(&q));
                }
            }
        }
    }
    ensure!(worst < 1e-12, "max |[H, Q]| = {worst:e}");
    for n in 2..=4 {
        for kappa in [0.5, 1.0, 2.0] {
            let g = mass_gap(&ChainSpec::new(n, 2, kappa), &opts()).map_err(fail)?;
            ensure!(g.degeneracy == 3, "n {n} kappa {kappa}: degeneracy {}", g.degeneracy);
        }
    }
    let mut max_charge = 0.0f64;
    for (n, l_max, kappa) in [(2, 2, 0.5), (3, 2, 1.0), (4, 2, 2.0)] {
        let spec = ChainSpec::new(n, l_max, kappa);
        let sectors = sector_decompose(&spec).map_err(fail)?;
        let gs = ground_state(&spec, &sectors, &opts()).map_err(fail)?;
        let q = build_charge(&spec).map_err(fail)?.restrict(gs.indices);
        max_charge = max_charge.max(q.expectation(gs.vector.as_slice()).norm());
    }
    ensure!(max_charge < 1e-10, "ground-state charge {max_charge:e}");
    Ok(format!("|[H,Q]| <= {worst:.1e}; triplets for 9 chains; |<Q>| <= {max_charge:.1e}"))
}

fn sector_min(spec: &ChainSpec<f64>, m: i64) -> Result<f64, String> {
    let sectors = sector_decompose(spec).map_err(fail)?;
    let h = build_sector_hamiltonian(spec, &sectors, m).map_err(fail)?;
    let s = lowest_eigenpairs(&h, 1, &opts().with_method(SolverMethod::Dense)).map_err(fail)?;
    Ok(s.eigenvalues[0])
}

fn phase_transition() -> Check {
    let mut worst = 0.0f64;
    let mut found = Vec::new();
    for (n, l_max, kappa) in [(1, 1, 0.0), (2, 2, 1.0), (3, 1, 0.5)] {
        let spec = ChainSpec::new(n, l_max, kappa);
        let expect = sector_min(&spec, 1)? - sector_min(&spec, 0)?;
        let grid: Vec<f64> = (0..=40).map(|i| 0.1 * f64::from(i)).collect();
        let scan = charge_scan(&spec, &grid, &opts()).map_err(fail)?;
        let mu = scan.critical_mu.ok_or("no crossing on the grid")?;
        worst = worst.max((mu - expect).abs());
        found.push(format!("{mu:.6}"));
    }
    ensure!(worst < 1e-10, "critical_mu off sector difference by {worst:e}");
    Ok(format!("critical_mu {} (max deviation {worst:.1e})", found.join(", ")))
}

fn dynamics() -> Check {
    let spec = ChainSpec::<f64>::new(2, 1, 0.0);
    let opts = PropagateOptions::default();
    let mut fidelities = Vec::new();
    let mut drift = 0.0f64;
    for duration in [1.0, 10.0, 100.0, 1000.0] {
        let schedule = RampSchedule::new(0.0, 0.5, duration, RampShape::Linear).map_err(fail)?;
        let r = propagate(&spec, &schedule, &opts).map_err(fail)?;
        fidelities.push(r.final_fidelity);
        drift = drift.max(r.norm_drift);
    }
    ensure!(drift < 1e-9, "norm drift {drift:e}");
    ensure!(fidelities.windows(2).all(|w| w[1] >= w[0]), "ladder not monotone: {fidelities:?}");
    ensure!(fidelities[3] > 0.999, "fidelity at T=1000 is {}", fidelities[3]);
    let t = physical_ramp_time(&Constants::codata2018(), &Geometry::nano(), 1.0);
    ensure!((1e-12..=10e-12).contains(&t), "nano ramp unit {t} s");
    Ok(format!(
        "fidelities {:.6?}, drift {drift:.1e}, nano time unit {:.2} ps",
        fidelities,
        t * 1e12
    ))
}

fn run_cli(args: &[&str], out: &Path, max_dim: Option<&str>) -> Result<i32, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_o3sim"));
    cmd.args(args).arg("--out").arg(out).env_remove("O3SIM_MAX_DIM");
    if let Some(v) = max_dim {
        cmd.env("O3SIM_MAX_DIM", v);
    }
    let o = cmd.output().map_err(fail)?;
    o.status.code().ok_or_else(|| "killed by signal".to_string())
}

fn manifest(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel).to_string_lossy().into_owned()
}

fn cli_contract() -> Check {
    let dir = tempfile::tempdir().map_err(fail)?;
    for set in ["micro", "nano"] {
        let golden = std::fs::read(manifest(&format!("tests/golden/{set}_report.json"))).map_err(fail)?;
        for run in 0..2 {
            let out = dir.path().join(format!("{set}{run}"));
            let config = manifest(&format!("configs/{set}.json"));
            let code = run_cli(&["design", "report", "--config", &config, "--format", "json"], &out, None)?;
            ensure!(code == 0, "{set} report exited {code}");
            let bytes = std::fs::read(out.join("report.json")).map_err(fail)?;
            ensure!(bytes == golden, "{set} report differs from golden on run {run}");
        }
    }
    let fixture = |name: &str| manifest(&format!("tests/fixtures/{name}.json"));
    let (unknown, hot, stalled, large) =
        (fixture("unknown_key"), fixture("hot_micro"), fixture("stalled_solver"), fixture("large_chain"));
    let cases: [(Vec<&str>, Option<&str>, i32); 5] = [
        (vec!["sim", "gap", "--sites", "2", "--lmax", "1"], None, 0),
        (vec!["design", "report", "--config", &unknown], None, 2),
        (vec!["design", "report", "--config", &hot], None, 3),
        (vec!["sim", "spectrum", "--config", &stalled], None, 4),
        (vec!["sim", "gap", "--config", &large], Some("1000"), 5),
    ];
    let mut codes = Vec::new();
    for (args, max_dim, want) in &cases {
        let code = run_cli(args, &dir.path().join("fixtures"), *max_dim)?;
        ensure!(code == *want, "{args:?} exited {code}, want {want}");
        codes.push(code.to_string());
    }
    Ok(format!("golden reports byte-identical; exit codes {}", codes.join("/")))
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Check,
}

fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { name: "micro parameter set", budget: secs(1), run: micro_set },
        Criterion { name: "nano parameter set", budget: secs(1), run: nano_set },
        Criterion { name: "critical field and inductance", budget: secs(1), run: field_and_inductance },
        Criterion { name: "design identities", budget: secs(1), run: identities },
        Criterion { name: "free rotor levels and gap", budget: secs(10), run: free_rotor_levels },
        Criterion { name: "oracle equivalence", budget: secs(60), run: oracle_equivalence },
        Criterion { name: "symmetry suite", budget: secs(120), run: symmetries },
        Criterion { name: "charge condensation threshold", budget: secs(60), run: phase_transition },
        Criterion { name: "ramp dynamics", budget: secs(300), run: dynamics },
        Criterion { name: "command-line contract", budget: secs(30), run: cli_contract },
    ];
    let mut failures = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > c.budget => Err(format!("{detail}; over the {:?} budget", c.budget)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {} [{:.2}s] {detail}", i + 1, c.name, took.as_secs_f64()),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {} [{:.2}s] {why}", i + 1, c.name, took.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
