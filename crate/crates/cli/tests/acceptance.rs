//! Acceptance suite: one pass/fail line per criterion. Runs the shipped
//! configs through the binary and checks library-level oracles.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

use thermo_lindblad::composite::{
    direct_reduced_evolution, higher_order_terms, random_resonant_model, reduced_map, resonant_exchange_model,
    seeded_system_state, sigma_x_coupled_model, CompositeModel,
};
use thermo_lindblad::dynamics::{
    propagate, relative_entropy, steady_state, transport_steady_report, BathRates, BathSpec, TransportModel,
};
use thermo_lindblad::generator::{
    build_restricted_generator, dephasing_from_alpha, gks_from_map, projector_dephasing, GKLSGenerator, RateFunction,
    ThermoSpec,
};
use thermo_lindblad::linalg::{c64, diag, from_real, random_complex_gaussian, random_density, thermal_state};
use thermo_lindblad::liouville::{assemble_superop, hamiltonian_superop, SuperOpKind};
use thermo_lindblad::validator::{
    check_commutation, check_cptp, check_detailed_balance, check_spectral, check_structure_support, spohn_monitor,
    Thresholds,
};
use thermo_lindblad::{presets, vectorize, Execution, Operator, SuperOperator};

const BIN: &str = env!("CARGO_BIN_EXE_thermo-lindblad");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

struct Cli {
    dir: TempDir,
}

impl Cli {
    fn new() -> Self {
        Cli { dir: TempDir::new().expect("temp dir") }
    }

    /// Runs `command` on a shipped config and returns the exit code and report.
    fn run(&self, command: &str, config: &str) -> (i32, Value) {
        let config_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/configs").join(config);
        let out: PathBuf = self.dir.path().join(config.trim_end_matches(".json"));
        let mut out_arg = out.clone().into_os_string();
        out_arg.push("/");
        let status = Command::new(BIN)
            .arg(command)
            .arg("--config")
            .arg(&config_path)
            .arg("--out")
            .arg(out_arg)
            .output()
            .expect("binary runs");
        let text = std::fs::read_to_string(out.join("report.json")).expect("report written");
        (status.status.code().unwrap_or(-1), serde_json::from_str(&text).expect("report parses"))
    }
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .and_then(|checks| checks.iter().find(|c| c["name"] == name))
        .unwrap_or_else(|| panic!("report has no check `{name}`"))
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn restricted(h: Operator, beta: f64, rates: RateFunction, alpha: Option<f64>) -> GKLSGenerator {
    let n = h.nrows();
    let mut spec = ThermoSpec::new(h, beta).with_rate_function(&rates).expect("valid rates");
    if let Some(a) = alpha {
        spec = spec.with_alpha(DMatrix::identity(n, n) * a);
    }
    build_restricted_generator(&spec).expect("generator builds")
}

/// Every single-bath generator the suite exercises, with its inverse temperature.
fn constructed() -> Vec<(String, GKLSGenerator, f64)> {
    let flat = RateFunction::Flat { kappa: 1.0 };
    let ohmic = RateFunction::Ohmic { kappa: 0.5 };
    let mut out = Vec::new();
    for beta in [0.0, 0.5, 1.0, 5.0] {
        out.push((format!("qubit flat β={beta}"), restricted(presets::qubit(1.0), beta, flat.clone(), None), beta));
        out.push((
            format!("qutrit flat β={beta}"),
            restricted(presets::qutrit([0.0, 1.0, 3.0]), beta, flat.clone(), Some(0.2)),
            beta,
        ));
        if beta > 0.0 {
            out.push((
                format!("qutrit ohmic β={beta}"),
                restricted(presets::qutrit([0.0, 1.0, 3.0]), beta, ohmic.clone(), None),
                beta,
            ));
        }
    }
    out.push((
        "coupled qubits global β=1".into(),
        restricted(presets::coupled_qubits(1.0, 1.0, 0.2), 1.0, flat.clone(), None),
        1.0,
    ));
    let s = 0.5f64.sqrt();
    let mixed = ThermoSpec::new(diag(&[0.0, 1.0, 2.0]), 1.0)
        .with_rate(1, 0, 1.0)
        .with_rate(2, 1, 0.5)
        .with_rate(2, 0, 0.3)
        .with_mixing(1.0, from_real(2, 2, &[s, s, s, -s]));
    out.push(("degenerate ladder with mixing".into(), build_restricted_generator(&mixed).expect("builds"), 1.0));
    out
}

fn transport_generators() -> Vec<(String, SuperOperator)> {
    let h = presets::qutrit([0.0, 1.0, 3.0]);
    let hot_cold = vec![
        BathSpec::new("hot", 0.5, BathRates::Function(RateFunction::Flat { kappa: 1.0 })),
        BathSpec::new("cold", 1.0, BathRates::Function(RateFunction::Flat { kappa: 1.0 })),
    ];
    let model = TransportModel::new(&h, hot_cold, None).expect("transport model");
    vec![("two-bath qutrit".into(), model.total)]
}

fn criterion_1() -> Outcome {
    let cli = Cli::new();
    let mut worst: f64 = 0.0;
    for config in ["theorem1_strict.json", "theorem1_strict_qutrit.json"] {
        let (code, r) = cli.run("theorem1", config);
        let defect = f(&r["results"]["max_defect"]);
        let models = r["results"]["models"].as_array().map_or(0, Vec::len);
        ensure(code == 0 && defect < 1e-10 && models >= 20, || {
            format!("{config}: exit {code}, {models} models, max defect {defect:.3e}")
        })?;
        worst = worst.max(defect);
    }
    let mut witnesses = Vec::new();
    for config in ["theorem1_nonconserving.json", "theorem1_non_stationary.json"] {
        let (code, r) = cli.run("theorem1", config);
        let defect = f(&r["results"]["min_defect"]);
        ensure(code == 1 && defect > 1e-6, || format!("{config}: exit {code}, min defect {defect:.3e}"))?;
        witnesses.push(defect);
    }
    Ok(format!(
        "strict max defect {worst:.2e} < 1e-10; witnesses min defect {:.2e}, {:.2e} > 1e-6",
        witnesses[0], witnesses[1]
    ))
}

fn criterion_2() -> Outcome {
    let mut worst_comm: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    let mut worst_support: f64 = 0.0;
    for (label, gen, _) in constructed() {
        let d = &gen.dissipator;
        let d_norm = d.norm();
        let h_tilde = hamiltonian_superop(&gen.hamiltonian).map_err(|e| e.to_string())?;
        let comm = h_tilde.commutator(d).map_err(|e| e.to_string())?.norm() / d_norm;
        ensure(comm < 1e-12, || format!("{label}: commutator ratio {comm:.3e}"))?;
        worst_comm = worst_comm.max(comm);

        let nondegenerate = gen.basis.groups.iter().all(|g| g.members.len() == 1);
        if nondegenerate {
            for t in &gen.basis.transitions {
                let v = vectorize(&t.operator);
                let dv = d.matrix() * &v;
                let c = v.dotc(&dv) / v.dotc(&v);
                let residual = (&dv - &v * c).norm() / d_norm;
                ensure(residual < 1e-12, || format!("{label}: D F_{} off-axis by {residual:.3e}", t.label()))?;
                worst_eig = worst_eig.max(residual);
            }
        }
        let support = check_structure_support(d, &gen.basis, 1e-10).map_err(|e| e.to_string())?;
        ensure(support.defect < 1e-10, || format!("{label}: structure support defect {:.3e}", support.defect))?;
        worst_support = worst_support.max(support.defect);
    }
    Ok(format!(
        "commutator ratio {worst_comm:.2e} < 1e-12, eigenoperator residual {worst_eig:.2e} < 1e-12, support {worst_support:.2e} < 1e-10"
    ))
}

fn criterion_3() -> Outcome {
    let mut worst_fixed: f64 = 0.0;
    let mut worst_db: f64 = 0.0;
    let mut cases = 0;
    for (label, gen, beta) in constructed() {
        if !(label.starts_with("qubit") || label.starts_with("qutrit")) {
            continue;
        }
        let gibbs = thermal_state(&gen.hamiltonian, beta);
        let fixed = gen.superoperator.apply(&gibbs).map_err(|e| e.to_string())?.norm();
        let db = check_detailed_balance(&gen, beta, 1e-12);
        ensure(fixed < 1e-12 && db.defect < 1e-12, || {
            format!("{label}: ‖L[thermal]‖ {fixed:.3e}, detailed-balance defect {:.3e}", db.defect)
        })?;
        worst_fixed = worst_fixed.max(fixed);
        worst_db = worst_db.max(db.defect);
        cases += 1;
    }
    Ok(format!("{cases} specs: ‖L[thermal]‖ {worst_fixed:.2e} < 1e-12, detailed-balance defect {worst_db:.2e} < 1e-12"))
}

fn criterion_4() -> Outcome {
    let times = [1e-3, 1e-1, 1.0, 10.0, 100.0];
    let mut generators: Vec<(String, SuperOperator)> =
        constructed().into_iter().map(|(l, g, _)| (l, g.superoperator)).collect();
    generators.extend(transport_generators());
    let mut min_choi = f64::INFINITY;
    let mut worst_tp: f64 = 0.0;
    for (label, l) in &generators {
        for &t in &times {
            let r = check_cptp(l, t, 1e-10).map_err(|e| e.to_string())?;
            let choi = r.detail_f64("choi_min_eigenvalue").unwrap_or(f64::NAN);
            let tp = r.detail_f64("trace_defect").unwrap_or(f64::NAN);
            ensure(choi >= -1e-10 && tp < 1e-10, || format!("{label} t={t}: Choi min {choi:.3e}, TP defect {tp:.3e}"))?;
            min_choi = min_choi.min(choi);
            worst_tp = worst_tp.max(tp);
        }
    }
    let h = presets::qubit(1.0);
    let negative = &hamiltonian_superop(&h).map_err(|e| e.to_string())?
        - &assemble_superop(SuperOpKind::DissipatorTerm, &presets::sigma_minus(), None).map_err(|e| e.to_string())?;
    let r = check_cptp(&negative, 0.01, 1e-10).map_err(|e| e.to_string())?;
    let counter = r.detail_f64("choi_min_eigenvalue").unwrap_or(f64::NAN);
    ensure(!r.passed && counter < -1e-3, || format!("negative-rate generator not detected: Choi min {counter:.3e}"))?;
    Ok(format!(
        "{} generators x 5 times: Choi min {min_choi:.2e} >= -1e-10, TP defect {worst_tp:.2e} < 1e-10; negative rate gives Choi min {counter:.3e}",
        generators.len()
    ))
}

fn criterion_5() -> Outcome {
    let times: Vec<f64> = (0..200).map(|k| 0.1 * k as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_step: f64 = 0.0;
    let mut worst_contraction = f64::NEG_INFINITY;
    let mut trajectories = 0;
    for (label, gen, _) in constructed() {
        let l = &gen.superoperator;
        let n = gen.hamiltonian.nrows();
        let reference = steady_state(l).map_err(|e| e.to_string())?.state;
        for _ in 0..20 {
            let rho0 = random_density(&mut rng, n);
            let traj = propagate(l, &rho0, &times, Execution::default()).map_err(|e| e.to_string())?;
            let report = spohn_monitor(&traj, &reference, 1e-9).map_err(|e| e.to_string())?;
            let step = report.check.defect;
            ensure(report.check.passed && !report.check.inconclusive, || {
                format!("{label}: relative entropy rose by {step:.3e}")
            })?;
            worst_step = worst_step.max(step);
            trajectories += 1;
        }
        let map = l.exp(0.7);
        for _ in 0..50 {
            let rho = random_density(&mut rng, n);
            let sigma = random_density(&mut rng, n);
            let before = relative_entropy(&rho, &sigma).map_err(|e| e.to_string())?;
            let after = relative_entropy(&map.apply(&rho).map_err(|e| e.to_string())?, &map.apply(&sigma).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            ensure(after <= before + 1e-9, || format!("{label}: S grew from {before:.6} to {after:.6}"))?;
            worst_contraction = worst_contraction.max(after - before);
        }
    }
    Ok(format!(
        "{trajectories} trajectories: worst step increase {worst_step:.2e} <= 1e-9; map contraction worst ΔS {worst_contraction:.2e}"
    ))
}

fn criterion_6() -> Outcome {
    let cli = Cli::new();
    let (code, r) = cli.run("tau-scan", "tau_scan_sigma_x.json");
    let scan = &r["results"]["scan"];
    let slope = f(&scan["fitted_slope"]);
    let mismatch = f(&scan["tau3_relative_mismatch"]);
    ensure(code == 0 && (slope - 3.0).abs() <= 0.05 && mismatch <= 1e-6, || {
        format!("σx⊗σx: exit {code}, slope {slope:.6}, τ³ mismatch {mismatch:.3e}")
    })?;

    // Independent trace-formula evaluation for the same model and state.
    let model = sigma_x_coupled_model(1.0, 0.5, 1.0).map_err(|e| e.to_string())?;
    let (upsilon, _) = higher_order_terms(&model, &seeded_system_state(2, f(&r["seed"]) as u64));
    let fitted = f(&scan["tau3_coefficient"]);
    let independent = (fitted - upsilon.norm()).abs() / upsilon.norm();
    ensure(independent <= 1e-6, || format!("fitted {fitted:.9e} vs ‖Υ‖ {:.9e}", upsilon.norm()))?;

    let (code, r) = cli.run("tau-scan", "tau_scan_strict.json");
    let defects: Vec<f64> = r["results"]["scan"]["defects"].as_array().map(|d| d.iter().map(f).collect()).unwrap_or_default();
    let max_strict = defects.iter().copied().fold(0.0, f64::max);
    ensure(code == 0 && defects.len() == 8 && max_strict < 1e-13, || {
        format!("strict: exit {code}, {} defects, max {max_strict:.3e}", defects.len())
    })?;
    Ok(format!(
        "slope {slope:.5} (3 ± 0.05), τ³ coefficient mismatch {mismatch:.2e} <= 1e-6; strict max defect {max_strict:.2e} < 1e-13"
    ))
}

fn criterion_7() -> Outcome {
    let cli = Cli::new();
    let (code, r) = cli.run("transport", "transport_hot_cold.json");
    let t = &r["results"]["transport"];
    let coherence = f(&t["max_coherence"]);
    let sum = f(&t["current_sum"]);
    let currents: Vec<f64> = t["currents"].as_array().map(|c| c.iter().map(f).collect()).unwrap_or_default();
    ensure(code == 0 && coherence < 1e-10 && sum.abs() < 1e-10 && currents.len() == 2, || {
        format!("hot/cold: exit {code}, coherence {coherence:.3e}, ΣQ {sum:.3e}")
    })?;
    ensure(currents[0] > 0.0 && currents[1] < 0.0, || format!("currents hot {:.3e}, cold {:.3e}", currents[0], currents[1]))?;

    let (code, r) = cli.run("transport", "transport_equal.json");
    let eq = check(&r, "equilibrium");
    let deviation = f(&eq["details"]["state_deviation"]);
    let max_current = f(&eq["details"]["max_current"]);
    ensure(code == 0 && deviation < 1e-10 && max_current < 1e-10, || {
        format!("equal temperatures: exit {code}, ‖ρ − thermal‖ {deviation:.3e}, max |Q| {max_current:.3e}")
    })?;

    // Baths on disjoint transitions: no cycle, and still no coherence.
    let h = presets::qutrit([0.0, 1.0, 3.0]);
    let a = BathSpec::new("A", 1.0, BathRates::Explicit(BTreeMap::from([((1, 0), 1.0)])));
    let b = BathSpec::new("B", 0.5, BathRates::Explicit(BTreeMap::from([((2, 0), 1.0)])));
    let split = transport_steady_report(&TransportModel::new(&h, vec![a, b], None).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure(split.max_coherence < 1e-10, || format!("split baths coherence {:.3e}", split.max_coherence))?;
    Ok(format!(
        "coherence {coherence:.2e}, ΣQ {sum:.2e}, Q_hot {:.4e} > 0 > Q_cold {:.4e}; equal-β deviation {deviation:.2e}",
        currents[0], currents[1]
    ))
}

fn criterion_8() -> Outcome {
    let thresholds = Thresholds::default();
    let mut generators: Vec<(String, SuperOperator, Option<thermo_lindblad::EigenoperatorBasis>)> = constructed()
        .into_iter()
        .map(|(l, g, _)| (l, g.superoperator, Some(g.basis)))
        .collect();
    let h = presets::qutrit([0.0, 1.0, 3.0]);
    let basis = thermo_lindblad::eigenoperator_basis(&h, None).map_err(|e| e.to_string())?;
    generators.extend(transport_generators().into_iter().map(|(l, s)| (l, s, Some(basis.clone()))));
    let mut worst_cond: f64 = 0.0;
    let mut worst_imag: f64 = 0.0;
    for (label, l, basis) in &generators {
        let r = check_spectral(l, basis.as_ref(), &thresholds);
        let cond = r.detail_f64("condition_number").unwrap_or(f64::INFINITY);
        let imag = r.detail_f64("population_max_imag").unwrap_or(f64::INFINITY);
        ensure(cond < 1e6 && imag < 1e-9, || format!("{label}: cond {cond:.3e}, population Im {imag:.3e}"))?;
        worst_cond = worst_cond.max(cond);
        worst_imag = worst_imag.max(imag);
    }
    let mut jordan = Operator::zeros(4, 4);
    jordan[(0, 1)] = c64(1.0, 0.0);
    let r = check_spectral(&SuperOperator::from_matrix(jordan).map_err(|e| e.to_string())?, None, &thresholds);
    ensure(!r.passed && r.detail_bool("near_defective") == Some(true), || "Jordan block not flagged".into())?;
    Ok(format!(
        "{} generators: cond {worst_cond:.2e} < 1e6, population Im {worst_imag:.2e} < 1e-9; Jordan block flagged",
        generators.len()
    ))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut models: Vec<CompositeModel> =
        (0..4).map(|s| random_resonant_model(3, 4, 1.0, 1.0, 90 + s)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    models.push(sigma_x_coupled_model(1.0, 0.5, 1.0).map_err(|e| e.to_string())?);
    models.push(resonant_exchange_model(1.0, 0.5, 0.3).map_err(|e| e.to_string())?);
    let mut worst_map: f64 = 0.0;
    for (k, model) in models.iter().enumerate() {
        let n = model.dims().0;
        for t in [0.1, 1.0, 10.0] {
            let lambda = reduced_map(model, t).map_err(|e| e.to_string())?;
            for _ in 0..20 {
                let rho = random_density(&mut rng, n);
                let via_map = lambda.superoperator.apply(&rho).map_err(|e| e.to_string())?;
                let direct = direct_reduced_evolution(model, &rho, t).map_err(|e| e.to_string())?;
                let gap = (via_map - direct).norm();
                ensure(gap < 1e-10, || format!("model {k} t={t}: reduced map off by {gap:.3e}"))?;
                worst_map = worst_map.max(gap);
            }
        }
    }

    let gen = restricted(presets::qutrit([0.0, 1.0, 3.0]), 0.8, RateFunction::Ohmic { kappa: 0.5 }, Some(0.1));
    let l = gen.superoperator.clone();
    let coeffs = gks_from_map(|t| l.exp(t), &gen.basis, 1e-5).map_err(|e| e.to_string())?;
    let mut worst_rate: f64 = 0.0;
    for term in &gen.jump_terms {
        let k = gen
            .basis
            .transitions
            .iter()
            .position(|t| (&t.operator - &term.operator).norm() < 1e-12)
            .ok_or("jump is not a transition operator")?;
        let rel = (coeffs.transition_rate(k) / term.rate - 1.0).abs();
        ensure(rel < 1e-4, || format!("transition {}: recovered {:.8e} vs {:.8e}", k, coeffs.transition_rate(k), term.rate))?;
        worst_rate = worst_rate.max(rel);
    }

    let h = diag(&[0.0, 0.7, 2.1]);
    let basis = thermo_lindblad::eigenoperator_basis(&h, None).map_err(|e| e.to_string())?;
    let m = random_complex_gaussian(&mut rng, 3, 3).map(|z| z.re);
    let alpha = &m * m.transpose();
    let terms = dephasing_from_alpha(&alpha, &basis.projectors).map_err(|e| e.to_string())?;
    let oracle = projector_dephasing(&alpha, &basis.projectors).map_err(|e| e.to_string())?;
    let mut worst_deph: f64 = 0.0;
    for _ in 0..20 {
        let x = random_complex_gaussian(&mut rng, 3, 3);
        let mut double = Operator::zeros(3, 3);
        for t in &terms {
            let v = &t.operator;
            let vx = v * &x - &x * v;
            double -= (v * &vx - &vx * v) * c64(0.5 * t.weight, 0.0);
        }
        let gap = (double - oracle.apply(&x).map_err(|e| e.to_string())?).norm();
        ensure(gap < 1e-10, || format!("dephasing forms differ by {gap:.3e}"))?;
        worst_deph = worst_deph.max(gap);
    }
    Ok(format!(
        "reduced map vs partial trace {worst_map:.2e} < 1e-10; GKS rate round trip {worst_rate:.2e} < 1e-4; dephasing forms {worst_deph:.2e} < 1e-10"
    ))
}

fn criterion_10() -> Outcome {
    let cli = Cli::new();
    let (code, local) = cli.run("validate", "local_coupled_qubits.json");
    let comm = f(&check(&local, "local:commutation")["defect"]);
    let support = f(&check(&local, "local:structure_support")["defect"]);
    ensure(code == 1 && comm > 1e-3 && support > 1e-3, || {
        format!("local jump: exit {code}, commutation {comm:.3e}, structure support {support:.3e}")
    })?;
    let (code, global) = cli.run("validate", "global_coupled_qubits.json");
    let failed: Vec<String> = global["checks"]
        .as_array()
        .map(|c| c.iter().filter(|c| c["passed"] != true).map(|c| c["name"].to_string()).collect())
        .unwrap_or_default();
    ensure(code == 0 && global["overall"] == true && failed.is_empty(), || {
        format!("global: exit {code}, failed {failed:?}")
    })?;

    // Library cross-check of the same contrast.
    let h = presets::coupled_qubits(1.0, 1.0, 0.2);
    let local_gen = GKLSGenerator::from_terms(h.clone(), vec![(presets::local_lowering(0), 1.0)], vec![])
        .map_err(|e| e.to_string())?;
    let lib_comm = check_commutation(&local_gen.superoperator, &h, 1e-10).map_err(|e| e.to_string())?;
    ensure(!lib_comm.passed, || "library commutation check passed for the local jump".into())?;
    Ok(format!(
        "local: commutation {comm:.3e}, structure support {support:.3e} (> 1e-3); global: all {} checks pass",
        global["checks"].as_array().map_or(0, Vec::len)
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("maps commute under strict coupling", criterion_1),
        ("generator structure", criterion_2),
        ("thermal fixed point and detailed balance", criterion_3),
        ("complete positivity and trace preservation", criterion_4),
        ("relative-entropy monotonicity", criterion_5),
        ("short-interval expansion", criterion_6),
        ("two-bath transport", criterion_7),
        ("no exceptional points", criterion_8),
        ("oracle equivalences", criterion_9),
        ("global versus local jumps", criterion_10),
    ];
    let start = Instant::now();
    let mut failures = 0;
    panic::set_hook(Box::new(|_| {}));
    for (k, (name, criterion)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(criterion))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        match outcome {
            Ok(summary) => println!("[PASS] criterion {}: {name}: {summary}", k + 1),
            Err(reason) => {
                failures += 1;
                println!("[FAIL] criterion {}: {name}: {reason}", k + 1);
            }
        }
    }
    println!("acceptance: {} of 10 passed in {:.1}s", 10 - failures, start.elapsed().as_secs_f64());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
