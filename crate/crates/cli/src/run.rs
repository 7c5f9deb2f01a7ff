//! Experiment drivers. Each returns its results and checks; [`run`] wraps
//! them into `report.json` plus any CSV artifacts.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use thermo_lindblad::composite::{
    build_strict_coupling, default_tau_grid, random_resonant_model, resonant_exchange_model,
    seeded_system_state, sigma_x_coupled_model, tau_expansion, theorem1_sweep, CompositeModel,
};
use thermo_lindblad::dynamics::{self, propagate, relative_entropy, steady_state, TransportModel};
use thermo_lindblad::linalg::{self, c64, random_density, random_hermitian, thermal_state, HermitianEigen};
use thermo_lindblad::liouville::hamiltonian_superop;
use thermo_lindblad::validator::{
    check_commutation, check_cptp_grid, check_spectral, spohn_monitor, validate_generator, CheckResult,
    Thresholds, ValidationOptions,
};
use thermo_lindblad::{eigenoperator_basis, Execution, Operator, Spectrum, SuperOperator};

use crate::config::{
    artifact_path, resolve_hamiltonian, CouplingKind, Experiment, Resolved, ResolvedSystem, StateSpec, TauModel,
    TimeGrid,
};
use crate::error::{exit, CliError, CliResult};
use crate::output::{matrix_json, write_csv, write_json};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Results of one experiment before they are written out.
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Map<String, Value>,
    pub checks: Vec<CheckResult>,
    pub csv: Vec<(String, Vec<String>, Vec<Vec<f64>>)>,
}

impl Outcome {
    fn insert(&mut self, key: &str, value: Value) {
        self.results.insert(key.to_string(), value);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// What [`run`] wrote and the exit code it implies.
#[derive(Debug)]
pub struct RunSummary {
    pub exit_code: i32,
    pub report_path: PathBuf,
    pub report: Value,
    pub artifacts: Vec<PathBuf>,
}

fn thresholds(r: &Resolved) -> Thresholds {
    let t = &r.tolerances;
    Thresholds {
        commutation: t.get("commutation"),
        fixed_point: t.get("fixed_point"),
        cptp: t.get("cptp"),
        structure_support: t.get("structure_support"),
        detailed_balance: t.get("detailed_balance"),
        spohn_slack: t.get("spohn_slack"),
        near_defective_cond: t.get("near_defective_cond"),
        stability: t.get("stability"),
        population_imag: t.get("population_imag"),
        null_space_rel: t.get("null_space_rel"),
    }
}

fn system(r: &Resolved) -> &ResolvedSystem {
    r.system.as_ref().expect("resolve() guarantees a system for this experiment")
}

fn total_generator(sys: &ResolvedSystem) -> CliResult<SuperOperator> {
    let mut total = hamiltonian_superop(&sys.hamiltonian).map_err(|e| CliError::at("system", e))?;
    for b in &sys.baths {
        total = &total + &b.generator.dissipator;
    }
    Ok(total)
}

fn complex_list(values: impl IntoIterator<Item = thermo_lindblad::Complex64>) -> Value {
    Value::Array(values.into_iter().map(|z| json!([z.re, z.im])).collect())
}

fn build(r: &Resolved) -> CliResult<Outcome> {
    let sys = system(r);
    let basis = eigenoperator_basis(&sys.hamiltonian, sys.degeneracy_tol).map_err(|e| CliError::at("system", e))?;
    let total = total_generator(sys)?;
    let eig = linalg::eig(total.matrix()).map_err(|e| CliError::Numerical(e.to_string()))?;
    let baths: Vec<Value> = sys
        .baths
        .iter()
        .map(|b| {
            json!({
                "label": b.label,
                "beta": b.beta,
                "restricted": b.spec.is_some(),
                "jumps": b.generator.jump_terms.iter().map(|j| json!({
                    "omega": j.omega,
                    "rate": j.rate,
                    "operator": matrix_json(&j.operator),
                })).collect::<Vec<_>>(),
                "dephasing": b.generator.dephasing_terms.iter().map(|d| json!({
                    "weight": d.weight,
                    "operator": matrix_json(&d.operator),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut out = Outcome::default();
    out.insert("hilbert_dim", json!(sys.hamiltonian.nrows()));
    out.insert("energies", json!(basis.spectrum.energies));
    out.insert("bohr_frequencies", json!(basis.bohr_frequencies()));
    out.insert("bohr_groups", serde_json::to_value(&basis.groups).unwrap_or(Value::Null));
    out.insert("baths", Value::Array(baths));
    out.insert(
        "generator",
        json!({
            "matrix": matrix_json(total.matrix()),
            "eigenvalues": complex_list(eig.values.iter().copied()),
            "condition_number": eig.condition_number(),
        }),
    );
    Ok(out)
}

fn validation_options(r: &Resolved) -> ValidationOptions {
    let mut options = ValidationOptions { thresholds: thresholds(r), ..ValidationOptions::default() };
    if let Some(times) = &r.config.params.cptp_times {
        options.cptp_times = times.clone();
    }
    if let Some(grid) = &r.config.params.spohn_times {
        options.spohn_times = grid.values();
    }
    options
}

fn prefixed(label: &str, mut check: CheckResult) -> CheckResult {
    check.name = format!("{label}:{}", check.name);
    check
}

fn validate(r: &Resolved, exec: Execution) -> CliResult<Outcome> {
    let sys = system(r);
    let options = validation_options(r);
    if options.cptp_times.is_empty() || options.cptp_times.iter().any(|t| t.is_nan() || *t < 0.0) {
        return Err(CliError::schema("params.cptp_times", "need at least one non-negative time"));
    }
    let mut out = Outcome::default();
    let mut reports = Vec::new();
    for b in &sys.baths {
        let report = validate_generator(&b.label, &b.generator, b.beta, &options, exec)
            .map_err(|e| CliError::at(format!("bath `{}`", b.label), e))?;
        out.checks.extend(report.checks.iter().cloned().map(|c| prefixed(&b.label, c)));
        reports.push(report);
    }
    if sys.baths.len() > 1 {
        let total = total_generator(sys)?;
        let th = &options.thresholds;
        let basis =
            eigenoperator_basis(&sys.hamiltonian, sys.degeneracy_tol).map_err(|e| CliError::at("system", e))?;
        let to_cli = |e| CliError::at("combined generator", e);
        let checks = vec![
            check_commutation(&total, &sys.hamiltonian, th.commutation).map_err(to_cli)?,
            check_cptp_grid(&total, &options.cptp_times, th.cptp, exec).map_err(to_cli)?,
            check_spectral(&total, Some(&basis), th),
        ];
        out.checks.extend(checks.iter().cloned().map(|c| prefixed("combined", c)));
        reports.push(thermo_lindblad::validator::ValidationReport::new("combined", checks));
    }
    out.insert("reports", serde_json::to_value(&reports).unwrap_or(Value::Null));
    Ok(out)
}

fn initial_state(r: &Resolved, sys: &ResolvedSystem) -> CliResult<Operator> {
    let path = "params.initial_state";
    let h = &sys.hamiltonian;
    let n = h.nrows();
    let spec = r.config.params.initial_state.clone().unwrap_or(StateSpec::Named("excited".into()));
    let rho = match spec {
        StateSpec::Named(name) => match name.as_str() {
            "ground" | "excited" => {
                let spectrum = Spectrum::new(h, sys.degeneracy_tol).map_err(|e| CliError::at(path, e))?;
                spectrum.projector(if name == "ground" { 0 } else { n - 1 })
            }
            "maximally_mixed" => Operator::identity(n, n) / c64(n as f64, 0.0),
            "thermal" => thermal_state(h, sys.baths[0].beta),
            "random" => random_density(&mut ChaCha8Rng::seed_from_u64(r.seed), n),
            other => return Err(CliError::schema(path, format!("unknown initial state `{other}`"))),
        },
        StateSpec::Literal(rows) => {
            let m = resolve_hamiltonian(&crate::config::MatrixSpec::Literal(rows), path, r.tolerances.get("hermiticity"))?;
            if m.nrows() != n {
                return Err(CliError::schema(path, format!("state must be {n}x{n}")));
            }
            m
        }
    };
    linalg::validate_density(&rho, linalg::StateTolerance::default()).map_err(|e| CliError::at(path, e))?;
    Ok(rho)
}

fn element_header(n: usize) -> Vec<String> {
    let sep = if n > 10 { "_" } else { "" };
    let mut header = vec!["t".to_string()];
    for i in 0..n {
        for j in 0..n {
            header.push(format!("rho_re_{i}{sep}{j}"));
            header.push(format!("rho_im_{i}{sep}{j}"));
        }
    }
    header.push("S_rel".into());
    header.push("trace_defect".into());
    header
}

fn evolve(r: &Resolved, exec: Execution) -> CliResult<Outcome> {
    let sys = system(r);
    let total = total_generator(sys)?;
    let rho0 = initial_state(r, sys)?;
    let times = r.config.params.times.clone().unwrap_or(TimeGrid::Range { start: 0.0, stop: 20.0, points: 200 }).values();
    let reference = steady_state(&total).map_err(|e| CliError::at("steady state", e))?;
    let traj = propagate(&total, &rho0, &times, exec).map_err(|e| CliError::at("params", e))?;
    let spohn = spohn_monitor(&traj, &reference.state, r.tolerances.get("spohn_slack"))
        .map_err(|e| CliError::at("trajectory", e))?;
    let trace_defects = traj.trace_defects();
    let n = rho0.nrows();
    let rows: Vec<Vec<f64>> = traj
        .states
        .iter()
        .enumerate()
        .map(|(k, rho)| {
            let mut row = vec![traj.times[k]];
            for i in 0..n {
                for j in 0..n {
                    row.push(rho[(i, j)].re);
                    row.push(rho[(i, j)].im);
                }
            }
            row.push(spohn.series[k].1.unwrap_or(f64::INFINITY));
            row.push(trace_defects[k]);
            row
        })
        .collect();

    let mut out = Outcome::default();
    let max_trace = traj.max_trace_defect();
    let max_pos = traj.max_positivity_defect();
    let max_herm = traj.hermiticity_defects.iter().copied().fold(0.0, f64::max);
    out.checks.push(CheckResult::new("trace", max_trace, r.tolerances.get("trace")));
    out.checks.push(CheckResult::new("positivity", max_pos, r.tolerances.get("positivity")));
    out.checks.push(spohn.check.clone());
    out.insert("points", json!(traj.times.len()));
    out.insert("max_trace_defect", json!(max_trace));
    out.insert("max_positivity_defect", json!(max_pos));
    out.insert("max_hermiticity_defect", json!(max_herm));
    out.insert("steady_state", matrix_json(&reference.state));
    out.insert("steady_state_unique", json!(reference.unique));
    out.insert("final_state", matrix_json(traj.states.last().expect("non-empty trajectory")));
    out.insert(
        "relative_entropy",
        Value::Array(spohn.series.iter().map(|(t, s)| json!([t, s])).collect()),
    );
    let initial_entropy = relative_entropy(&rho0, &reference.state).map_err(|e| CliError::at("initial state", e))?;
    out.insert("initial_relative_entropy", json!(initial_entropy));
    out.csv.push(("trajectory.csv".into(), element_header(n), rows));
    Ok(out)
}

fn coherent_state(h: &Operator) -> Operator {
    let eig = HermitianEigen::new(h);
    let m = h.nrows();
    let psi = eig.vectors.column_sum() / c64((m as f64).sqrt(), 0.0);
    &psi * psi.adjoint()
}

fn random_coupling(dim: usize, strength: f64, seed: u64) -> Operator {
    let g = random_hermitian(&mut ChaCha8Rng::seed_from_u64(seed), dim);
    let norm = g.norm();
    g * c64(strength / norm, 0.0)
}

fn theorem1_models(r: &Resolved) -> CliResult<Vec<CompositeModel>> {
    let p = &r.config.params.theorem1;
    let path = "params.theorem1";
    if p.models == 0 {
        return Err(CliError::schema(format!("{path}.models"), "need at least one model"));
    }
    if !p.beta.is_finite() || p.beta < 0.0 {
        return Err(CliError::physics(format!("{path}.beta"), "inverse temperature must be >= 0"));
    }
    if !p.strength.is_finite() || p.strength < 0.0 {
        return Err(CliError::physics(format!("{path}.strength"), "coupling strength must be >= 0"));
    }
    let mut models = Vec::with_capacity(p.models);
    for k in 0..p.models {
        let seed = r.seed.wrapping_add(k as u64);
        let base = match &r.system {
            Some(sys) => {
                let h_e = match &p.environment {
                    Some(spec) => resolve_hamiltonian(spec, &format!("{path}.environment"), r.tolerances.get("hermiticity"))?,
                    None => sys.hamiltonian.clone(),
                };
                let coupling = build_strict_coupling(&sys.hamiltonian, &h_e, p.strength, seed)
                    .map_err(|e| CliError::at(path, e))?;
                let rho_e = thermal_state(&h_e, p.beta);
                CompositeModel::new(sys.hamiltonian.clone(), h_e, coupling.h_se, rho_e)
                    .map_err(|e| CliError::at(path, e))?
            }
            None => {
                if p.system_dim == 0 || p.env_dim == 0 {
                    return Err(CliError::schema(path, "dimensions must be positive"));
                }
                random_resonant_model(p.system_dim, p.env_dim, p.beta, p.strength, seed)
                    .map_err(|e| CliError::at(path, e))?
            }
        };
        let (n, m) = base.dims();
        let model = match p.coupling {
            CouplingKind::Strict => base,
            CouplingKind::Nonconserving => CompositeModel {
                h_se: random_coupling(n * m, p.strength, seed ^ 0x9e37_79b9_7f4a_7c15),
                ..base
            },
            CouplingKind::NonStationary => CompositeModel { rho_e: coherent_state(&base.h_e), ..base },
        };
        models.push(model);
    }
    Ok(models)
}

fn theorem1(r: &Resolved, exec: Execution) -> CliResult<Outcome> {
    let p = &r.config.params.theorem1;
    if p.times.is_empty() || p.times.iter().any(|t| !t.is_finite()) {
        return Err(CliError::schema("params.theorem1.times", "need at least one finite time"));
    }
    let models = theorem1_models(r)?;
    let points = theorem1_sweep(&models, &p.times, exec).map_err(|e| CliError::at("theorem1", e))?;
    let max_defect = points.iter().map(|pt| pt.defect).fold(0.0, f64::max);
    let min_defect = points.iter().map(|pt| pt.defect).fold(f64::INFINITY, f64::min);
    let model_info: Vec<Value> = models
        .iter()
        .map(|m| {
            json!({
                "dims": [m.dims().0, m.dims().1],
                "conservation_defect": m.conservation_defect(),
                "stationarity_defect": m.stationarity_defect(),
            })
        })
        .collect();
    let mut out = Outcome::default();
    out.checks.push(
        CheckResult::new("theorem1", max_defect, r.tolerances.get("theorem1"))
            .with_detail("coupling", p.coupling)
            .with_detail("min_defect", min_defect),
    );
    out.insert("coupling", serde_json::to_value(p.coupling).unwrap_or(Value::Null));
    out.insert("max_defect", json!(max_defect));
    out.insert("min_defect", json!(min_defect));
    out.insert("points", serde_json::to_value(&points).unwrap_or(Value::Null));
    out.insert("models", Value::Array(model_info));
    Ok(out)
}

fn tau_scan(r: &Resolved, exec: Execution) -> CliResult<Outcome> {
    let p = &r.config.params.tau_scan;
    let path = "params.tau_scan";
    let model = match p.model {
        TauModel::SigmaX => sigma_x_coupled_model(p.omega, p.g, p.beta),
        TauModel::ResonantExchange => resonant_exchange_model(p.omega, p.g, p.beta),
    }
    .map_err(|e| CliError::at(path, e))?;
    let taus = p.taus.clone().unwrap_or_else(default_tau_grid);
    let rho_s = seeded_system_state(2, r.seed);
    let scan = tau_expansion(&model, &rho_s, &taus, exec).map_err(|e| CliError::at(format!("{path}.taus"), e))?;
    let mut out = Outcome::default();
    let max_defect = scan.defects.iter().copied().fold(0.0, f64::max);
    if scan.strict_conserving || p.model == TauModel::ResonantExchange {
        out.checks.push(CheckResult::new("strict_defects", max_defect, r.tolerances.get("strict_defect")));
    } else {
        let slope_check = match scan.fitted_slope {
            Some(s) => CheckResult::new("tau_slope", (s - 3.0).abs(), r.tolerances.get("tau_slope"))
                .with_detail("fitted_slope", s),
            None => CheckResult::inconclusive("tau_slope", r.tolerances.get("tau_slope"), "slope undefined"),
        };
        out.checks.push(slope_check);
        let coeff_check = match scan.tau3_relative_mismatch {
            Some(m) => CheckResult::new("tau3_coefficient", m, r.tolerances.get("tau3_relative"))
                .with_detail("fitted", scan.tau3_coefficient)
                .with_detail("upsilon_norm", scan.upsilon_norm),
            None => CheckResult::inconclusive("tau3_coefficient", r.tolerances.get("tau3_relative"), "no fit"),
        };
        out.checks.push(coeff_check);
    }
    out.insert("scan", serde_json::to_value(&scan).unwrap_or(Value::Null));
    out.insert("upsilon", matrix_json(&scan.upsilon));
    out.insert("xi", matrix_json(&scan.xi));
    out.insert("rho_s", matrix_json(&rho_s));
    let rows = scan.taus.iter().zip(&scan.defects).map(|(&t, &d)| vec![t, d]).collect();
    out.csv.push(("tauscan.csv".into(), vec!["tau".into(), "defect".into()], rows));
    Ok(out)
}

fn transport(r: &Resolved) -> CliResult<Outcome> {
    let sys = system(r);
    let baths = sys.baths.iter().map(|b| b.spec.clone().expect("checked in resolve")).collect();
    let model =
        TransportModel::new(&sys.hamiltonian, baths, sys.degeneracy_tol).map_err(|e| CliError::at("baths", e))?;
    let report = dynamics::transport_steady_report(&model).map_err(|e| CliError::at("steady state", e))?;
    let t = &r.tolerances;
    let mut out = Outcome::default();
    out.checks.push(
        CheckResult::new("steady_residual", report.residual, t.get("steady_residual")).with_detail("unique", report.unique),
    );
    out.checks.push(CheckResult::new("coherence", report.max_coherence, t.get("coherence")));
    out.checks.push(CheckResult::new("first_law", report.current_sum.abs(), t.get("first_law")));

    let betas: Vec<f64> = sys.baths.iter().map(|b| b.beta).collect();
    let all_equal = betas.windows(2).all(|w| w[0] == w[1]);
    if all_equal {
        let thermal = thermal_state(&sys.hamiltonian, betas[0]);
        let deviation = (&report.steady_state - thermal).norm();
        let max_current = report.currents.iter().fold(0.0f64, |a, q| a.max(q.abs()));
        out.checks.push(
            CheckResult::new("equilibrium", deviation.max(max_current), t.get("equilibrium"))
                .with_detail("state_deviation", deviation)
                .with_detail("max_current", max_current),
        );
    } else {
        let hot = (0..betas.len()).min_by(|&a, &b| betas[a].total_cmp(&betas[b])).expect("two baths");
        let cold = (0..betas.len()).max_by(|&a, &b| betas[a].total_cmp(&betas[b])).expect("two baths");
        let (q_hot, q_cold) = (report.currents[hot], report.currents[cold]);
        // Currents within the first-law tolerance of zero carry no sign.
        let floor = t.get("first_law");
        let violation = (floor - q_hot).max(q_cold + floor).max(0.0);
        let mut check = CheckResult::new("heat_flow_direction", violation, 0.0)
            .with_detail("hot_bath", &sys.baths[hot].label)
            .with_detail("cold_bath", &sys.baths[cold].label)
            .with_detail("q_hot", q_hot)
            .with_detail("q_cold", q_cold)
            .with_detail("noise_floor", floor);
        check.passed = q_hot > floor && q_cold < -floor;
        out.checks.push(check);
    }
    out.insert("transport", serde_json::to_value(&report).unwrap_or(Value::Null));
    out.insert("steady_state", matrix_json(&report.steady_state));
    out.insert("betas", json!(betas));
    Ok(out)
}

pub fn execute(r: &Resolved, exec: Execution) -> CliResult<Outcome> {
    match r.experiment {
        Experiment::Build => build(r),
        Experiment::Validate => validate(r, exec),
        Experiment::Evolve => evolve(r, exec),
        Experiment::Theorem1 => theorem1(r, exec),
        Experiment::TauScan => tau_scan(r, exec),
        Experiment::Transport => transport(r),
    }
}

fn report_header(r: &Resolved) -> Map<String, Value> {
    let mut report = Map::new();
    report.insert("version".into(), json!(VERSION));
    report.insert("experiment".into(), json!(r.experiment.name()));
    report.insert("seed".into(), json!(r.seed));
    report.insert("config".into(), serde_json::to_value(&r.config).unwrap_or(Value::Null));
    report.insert("tolerances".into(), serde_json::to_value(r.tolerances.as_map()).unwrap_or(Value::Null));
    report
}

/// Runs the experiment and writes its artifacts. Failures after resolution
/// still produce a report carrying the error.
pub fn run(r: &Resolved, exec: Execution) -> CliResult<RunSummary> {
    let report_path = artifact_path(&r.output, "report.json");
    let mut report = report_header(r);
    let mut artifacts = Vec::new();
    let exit_code = match execute(r, exec) {
        Ok(outcome) => {
            let passed = outcome.passed();
            for (name, header, rows) in &outcome.csv {
                let path = artifact_path(&r.output, name);
                write_csv(&path, header, rows)?;
                artifacts.push(path);
            }
            report.insert("results".into(), Value::Object(outcome.results));
            report.insert("checks".into(), serde_json::to_value(&outcome.checks).unwrap_or(Value::Null));
            report.insert("overall".into(), json!(passed));
            if passed {
                exit::PASS
            } else {
                exit::CHECK_FAILED
            }
        }
        Err(err) => {
            report.insert("error".into(), json!(err.to_string()));
            report.insert("overall".into(), json!(false));
            err.exit_code()
        }
    };
    report.insert("exit_code".into(), json!(exit_code));
    let report = Value::Object(report);
    write_json(&report_path, &report)?;
    Ok(RunSummary { exit_code, report_path, report, artifacts })
}
