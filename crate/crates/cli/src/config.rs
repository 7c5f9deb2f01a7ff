//! Run configuration: JSON schema, defaults and resolution into validated
//! physical objects.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use thermo_lindblad::dynamics::{BathRates, BathSpec};
use thermo_lindblad::generator::{build_restricted_generator, DegenerateMixing, GKLSGenerator, RateFunction};
use thermo_lindblad::linalg::{c64, hermiticity_defect, Operator};
use thermo_lindblad::presets;
use thermo_lindblad::Complex64;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Build,
    Validate,
    Evolve,
    Theorem1,
    TauScan,
    Transport,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Build => "build",
            Experiment::Validate => "validate",
            Experiment::Evolve => "evolve",
            Experiment::Theorem1 => "theorem1",
            Experiment::TauScan => "tau-scan",
            Experiment::Transport => "transport",
        }
    }
}

/// One matrix entry: a real number, `[re, im]` or `{"re": .., "im": ..}`.
#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Pair([f64; 2]),
    Complex { re: f64, im: f64 },
}

impl Entry {
    fn value(self) -> Complex64 {
        match self {
            Entry::Real(x) => c64(x, 0.0),
            Entry::Pair([re, im]) | Entry::Complex { re, im } => c64(re, im),
        }
    }
}

/// A preset call such as `"qubit(1.0)"` or a row-major matrix literal.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Preset(String),
    Literal(Vec<Vec<Entry>>),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub hamiltonian: MatrixSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degeneracy_tol: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RatesConfig {
    /// Same emission rate on every energy-lowering transition.
    Flat(f64),
    /// `κω/(1 − e^{−βω})`.
    Ohmic(f64),
    /// Emission rates keyed by `"from->to"` level indices (ascending energy).
    Explicit(BTreeMap<String, f64>),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MixingConfig {
    pub omega: f64,
    pub matrix: Vec<Vec<Entry>>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct JumpConfig {
    pub operator: MatrixSpec,
    pub rate: f64,
}

/// A thermal bath. Either `rates` (thermodynamically restricted generator) or
/// `jumps` (arbitrary GKLS terms, for audits) must be given.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<RatesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mixing: Vec<MixingConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub jumps: Vec<JumpConfig>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum TimeGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, points: usize },
}

impl TimeGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            TimeGrid::List(v) => v.clone(),
            TimeGrid::Range { start, stop, points } => match points {
                0 => Vec::new(),
                1 => vec![*start],
                _ => (0..*points).map(|k| start + (stop - start) * k as f64 / (*points - 1) as f64).collect(),
            },
        }
    }
}

/// Initial state: `ground`, `excited`, `maximally_mixed`, `thermal`,
/// `random`, or a density-matrix literal.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Literal(Vec<Vec<Entry>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    /// Random coupling commuting with the free Hamiltonian.
    Strict,
    /// Random coupling without the conservation constraint.
    Nonconserving,
    /// Strict coupling with a coherent (non-stationary) environment state.
    NonStationary,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Theorem1Params {
    pub coupling: CouplingKind,
    pub models: usize,
    /// Used when no `system` is configured.
    pub system_dim: usize,
    pub env_dim: usize,
    /// Environment Hamiltonian when a `system` is configured; defaults to a
    /// copy of the system Hamiltonian.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub environment: Option<MatrixSpec>,
    pub beta: f64,
    pub strength: f64,
    pub times: Vec<f64>,
}

impl Default for Theorem1Params {
    fn default() -> Self {
        Theorem1Params {
            coupling: CouplingKind::Strict,
            models: 20,
            system_dim: 3,
            env_dim: 4,
            environment: None,
            beta: 1.0,
            strength: 1.0,
            times: vec![0.1, 1.0, 10.0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TauModel {
    /// Two qubits coupled by `g σx⊗σx`.
    SigmaX,
    /// Two qubits coupled by `g (σ₊⊗σ₋ + σ₋⊗σ₊)`.
    ResonantExchange,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct TauScanParams {
    pub model: TauModel,
    pub omega: f64,
    pub g: f64,
    pub beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub taus: Option<Vec<f64>>,
}

impl Default for TauScanParams {
    fn default() -> Self {
        TauScanParams { model: TauModel::SigmaX, omega: 1.0, g: 0.5, beta: 1.0, taus: None }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times: Option<TimeGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<StateSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cptp_times: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spohn_times: Option<TimeGrid>,
    pub theorem1: Theorem1Params,
    pub tau_scan: TauScanParams,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemConfig>,
    #[serde(default)]
    pub baths: Vec<BathConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    parse_config(&text)
}

/// Named numerical tolerances with their defaults.
#[derive(Clone, Debug, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        let entries: &[(&str, f64)] = &[
            ("commutation", 1e-10),
            ("coherence", 1e-10),
            ("cptp", 1e-10),
            ("detailed_balance", 1e-10),
            ("equilibrium", 1e-10),
            ("first_law", 1e-10),
            ("fixed_point", 1e-10),
            ("hermiticity", 1e-12),
            ("near_defective_cond", 1e8),
            ("null_space_rel", 1e-10),
            ("population_imag", 1e-9),
            ("positivity", 1e-9),
            ("spohn_slack", 1e-9),
            ("stability", 1e-10),
            ("steady_residual", 1e-10),
            ("strict_defect", 1e-13),
            ("structure_support", 1e-10),
            ("tau3_relative", 1e-6),
            ("tau_slope", 0.05),
            ("theorem1", 1e-10),
            ("trace", 1e-10),
        ];
        Tolerances(entries.iter().map(|&(k, v)| (k.to_string(), v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        *self.0.get(name).unwrap_or_else(|| panic!("unknown tolerance `{name}`"))
    }

    pub fn set(&mut self, name: &str, value: f64, origin: &str) -> CliResult<()> {
        if !self.0.contains_key(name) {
            let known: Vec<&str> = self.0.keys().map(String::as_str).collect();
            return Err(CliError::schema(origin, format!("unknown tolerance `{name}` (known: {})", known.join(", "))));
        }
        if !value.is_finite() || value <= 0.0 {
            return Err(CliError::schema(origin, format!("tolerance `{name}` must be positive, got {value}")));
        }
        self.0.insert(name.to_string(), value);
        Ok(())
    }

    pub fn as_map(&self) -> &BTreeMap<String, f64> {
        &self.0
    }
}

/// Parses `name=value`.
pub fn parse_tol_override(arg: &str) -> CliResult<(String, f64)> {
    let (name, value) =
        arg.split_once('=').ok_or_else(|| CliError::schema("--tol", format!("expected name=value, got `{arg}`")))?;
    let value: f64 =
        value.trim().parse().map_err(|_| CliError::schema("--tol", format!("`{value}` is not a number")))?;
    Ok((name.trim().to_string(), value))
}

fn parse_call(text: &str, path: &str) -> CliResult<(String, Vec<f64>)> {
    let text = text.trim();
    let Some(open) = text.find('(') else {
        return Ok((text.to_string(), Vec::new()));
    };
    let inner = text[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| CliError::schema(path, format!("unbalanced parentheses in `{text}`")))?;
    let args = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|a| a.trim().parse::<f64>().map_err(|_| CliError::schema(path, format!("`{a}` is not a number"))))
            .collect::<CliResult<Vec<_>>>()?
    };
    Ok((text[..open].trim().to_string(), args))
}

fn expect_args(name: &str, args: &[f64], n: usize, path: &str) -> CliResult<()> {
    if args.len() != n {
        return Err(CliError::schema(path, format!("`{name}` takes {n} argument(s), got {}", args.len())));
    }
    Ok(())
}

fn literal(rows: &[Vec<Entry>], path: &str) -> CliResult<Operator> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::schema(path, "matrix literal must be square and non-empty"));
    }
    let m = Operator::from_fn(n, n, |i, j| rows[i][j].value());
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CliError::schema(path, "matrix literal has non-finite entries"));
    }
    Ok(m)
}

/// Hamiltonian presets: `qubit(ω)`, `qutrit(ε₁,ε₂,ε₃)`, `coupled_qubits(ω₁,ω₂,g)`.
pub fn resolve_hamiltonian(spec: &MatrixSpec, path: &str, tol: f64) -> CliResult<Operator> {
    let h = match spec {
        MatrixSpec::Literal(rows) => literal(rows, path)?,
        MatrixSpec::Preset(text) => {
            let (name, args) = parse_call(text, path)?;
            match name.as_str() {
                "qubit" => {
                    expect_args(&name, &args, 1, path)?;
                    presets::qubit(args[0])
                }
                "qutrit" => {
                    expect_args(&name, &args, 3, path)?;
                    presets::qutrit([args[0], args[1], args[2]])
                }
                "coupled_qubits" => {
                    expect_args(&name, &args, 3, path)?;
                    presets::coupled_qubits(args[0], args[1], args[2])
                }
                _ => return Err(CliError::schema(path, format!("unknown Hamiltonian preset `{name}`"))),
            }
        }
    };
    let defect = hermiticity_defect(&h);
    if defect > tol * h.norm().max(1.0) {
        return Err(CliError::physics(path, format!("Hamiltonian is not Hermitian (defect {defect:.3e})")));
    }
    Ok(h)
}

/// Jump-operator presets: `sigma_minus`, `sigma_plus`, `sigma_x`, `sigma_y`,
/// `sigma_z`, `local_lowering(site)`.
pub fn resolve_operator(spec: &MatrixSpec, path: &str) -> CliResult<Operator> {
    match spec {
        MatrixSpec::Literal(rows) => literal(rows, path),
        MatrixSpec::Preset(text) => {
            let (name, args) = parse_call(text, path)?;
            let no_args = |op: Operator| expect_args(&name, &args, 0, path).map(|_| op);
            match name.as_str() {
                "sigma_minus" => no_args(presets::sigma_minus()),
                "sigma_plus" => no_args(presets::sigma_plus()),
                "sigma_x" => no_args(presets::sigma_x()),
                "sigma_y" => no_args(presets::sigma_y()),
                "sigma_z" => no_args(presets::sigma_z()),
                "local_lowering" => {
                    expect_args(&name, &args, 1, path)?;
                    if args[0] != 0.0 && args[0] != 1.0 {
                        return Err(CliError::schema(path, "local_lowering site must be 0 or 1"));
                    }
                    Ok(presets::local_lowering(args[0] as usize))
                }
                _ => Err(CliError::schema(path, format!("unknown operator preset `{name}`"))),
            }
        }
    }
}

/// A bath resolved against the system Hamiltonian, with its generator built.
#[derive(Clone, Debug)]
pub struct ResolvedBath {
    pub label: String,
    pub beta: f64,
    /// Present for restricted baths, absent for explicit-jump baths.
    pub spec: Option<BathSpec>,
    pub generator: GKLSGenerator,
}

#[derive(Clone, Debug)]
pub struct ResolvedSystem {
    pub hamiltonian: Operator,
    pub degeneracy_tol: Option<f64>,
    pub baths: Vec<ResolvedBath>,
}

fn parse_transition_key(key: &str, path: &str) -> CliResult<(usize, usize)> {
    let parsed = key.split_once("->").and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
    parsed.ok_or_else(|| CliError::schema(path, format!("transition key `{key}` is not of the form `from->to`")))
}

fn resolve_bath(
    index: usize,
    bath: &BathConfig,
    h: &Operator,
    degeneracy_tol: Option<f64>,
) -> CliResult<ResolvedBath> {
    let path = format!("baths[{index}]");
    let label = bath.label.clone().unwrap_or_else(|| format!("bath{index}"));
    if !bath.beta.is_finite() || bath.beta < 0.0 {
        return Err(CliError::physics(format!("{path}.beta"), format!("inverse temperature must be >= 0, got {}", bath.beta)));
    }
    let alpha = match &bath.alpha {
        Some(rows) => {
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(CliError::schema(format!("{path}.alpha"), "alpha must be a square matrix"));
            }
            if n != h.nrows() {
                return Err(CliError::schema(format!("{path}.alpha"), format!("alpha must be {0}x{0}", h.nrows())));
            }
            Some(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
        }
        None => None,
    };
    match (&bath.rates, bath.jumps.is_empty()) {
        (Some(_), false) => {
            Err(CliError::schema(&path, "give either `rates` or `jumps`, not both"))
        }
        (None, true) => Err(CliError::schema(&path, "missing `rates` or `jumps`")),
        (Some(rates), true) => {
            let rates = match rates {
                RatesConfig::Flat(k) | RatesConfig::Ohmic(k) if !k.is_finite() || *k < 0.0 => {
                    return Err(CliError::physics(format!("{path}.rates"), format!("rate constant must be >= 0, got {k}")));
                }
                RatesConfig::Flat(k) => BathRates::Function(RateFunction::Flat { kappa: *k }),
                RatesConfig::Ohmic(k) => BathRates::Function(RateFunction::Ohmic { kappa: *k }),
                RatesConfig::Explicit(map) => {
                    let mut out = BTreeMap::new();
                    for (key, &gamma) in map {
                        let field = format!("{path}.rates.explicit.{key}");
                        let pair = parse_transition_key(key, &field)?;
                        if !gamma.is_finite() || gamma < 0.0 {
                            return Err(CliError::physics(field, format!("rate must be >= 0, got {gamma}")));
                        }
                        out.insert(pair, gamma);
                    }
                    BathRates::Explicit(out)
                }
            };
            let mut degenerate_mixing = Vec::new();
            for (k, m) in bath.mixing.iter().enumerate() {
                let matrix = literal(&m.matrix, &format!("{path}.mixing[{k}].matrix"))?;
                degenerate_mixing.push(DegenerateMixing { omega: m.omega, matrix });
            }
            let spec = BathSpec { label: label.clone(), beta: bath.beta, rates, alpha, degenerate_mixing };
            let thermo = spec.thermo_spec(h, degeneracy_tol).map_err(|e| CliError::at(&path, e))?;
            let generator = build_restricted_generator(&thermo).map_err(|e| CliError::at(&path, e))?;
            Ok(ResolvedBath { label, beta: bath.beta, spec: Some(spec), generator })
        }
        (None, false) => {
            if !bath.mixing.is_empty() {
                return Err(CliError::schema(format!("{path}.mixing"), "mixing applies only to `rates` baths"));
            }
            let mut jumps = Vec::new();
            for (k, j) in bath.jumps.iter().enumerate() {
                let field = format!("{path}.jumps[{k}]");
                let op = resolve_operator(&j.operator, &format!("{field}.operator"))?;
                if op.nrows() != h.nrows() {
                    return Err(CliError::schema(format!("{field}.operator"), format!("operator must be {0}x{0}", h.nrows())));
                }
                if !j.rate.is_finite() || j.rate < 0.0 {
                    return Err(CliError::physics(format!("{field}.rate"), format!("rate must be >= 0, got {}", j.rate)));
                }
                jumps.push((op, j.rate));
            }
            let basis = thermo_lindblad::eigenoperator_basis(h, degeneracy_tol).map_err(|e| CliError::at(&path, e))?;
            let dephasing = match &alpha {
                Some(a) => thermo_lindblad::generator::dephasing_from_alpha(a, &basis.projectors)
                    .map_err(|e| CliError::at(format!("{path}.alpha"), e))?,
                None => Vec::new(),
            };
            let generator =
                GKLSGenerator::from_terms(h.clone(), jumps, dephasing).map_err(|e| CliError::at(&path, e))?;
            Ok(ResolvedBath { label, beta: bath.beta, spec: None, generator })
        }
    }
}

pub fn resolve_system(config: &RunConfig, tolerances: &Tolerances) -> CliResult<Option<ResolvedSystem>> {
    let Some(system) = &config.system else {
        if !config.baths.is_empty() {
            return Err(CliError::schema("system", "baths require a system Hamiltonian"));
        }
        return Ok(None);
    };
    if let Some(tol) = system.degeneracy_tol {
        if !tol.is_finite() || tol <= 0.0 {
            return Err(CliError::schema("system.degeneracy_tol", "must be positive"));
        }
    }
    let h = resolve_hamiltonian(&system.hamiltonian, "system.hamiltonian", tolerances.get("hermiticity"))?;
    let baths = config
        .baths
        .iter()
        .enumerate()
        .map(|(i, b)| resolve_bath(i, b, &h, system.degeneracy_tol))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Some(ResolvedSystem { hamiltonian: h, degeneracy_tol: system.degeneracy_tol, baths }))
}

/// Fully validated run inputs.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub experiment: Experiment,
    pub config: RunConfig,
    pub system: Option<ResolvedSystem>,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub output: PathBuf,
}

/// Command-line overrides applied on top of the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub experiment: Option<Experiment>,
    pub output: Option<PathBuf>,
    pub tolerances: Vec<(String, f64)>,
    pub seed: Option<u64>,
}

pub const DEFAULT_OUTPUT: &str = "thermo-lindblad-out/";

pub fn resolve(config: RunConfig, overrides: &Overrides) -> CliResult<Resolved> {
    let experiment = match (overrides.experiment, config.experiment) {
        (Some(cmd), Some(cfg)) if cmd != cfg => {
            return Err(CliError::schema(
                "experiment",
                format!("config requests `{}` but the command is `{}`", cfg.name(), cmd.name()),
            ))
        }
        (Some(e), _) | (None, Some(e)) => e,
        (None, None) => return Err(CliError::schema("experiment", "no experiment given in config or command")),
    };
    let mut tolerances = Tolerances::default();
    for (name, &value) in &config.tolerances {
        tolerances.set(name, value, &format!("tolerances.{name}"))?;
    }
    for (name, value) in &overrides.tolerances {
        tolerances.set(name, *value, "--tol")?;
    }
    let system = resolve_system(&config, &tolerances)?;
    let needs_system = matches!(
        experiment,
        Experiment::Build | Experiment::Validate | Experiment::Evolve | Experiment::Transport
    );
    if needs_system {
        let Some(sys) = &system else {
            return Err(CliError::schema("system", format!("`{}` needs a system", experiment.name())));
        };
        if sys.baths.is_empty() {
            return Err(CliError::schema("baths", format!("`{}` needs at least one bath", experiment.name())));
        }
    }
    if experiment == Experiment::Transport && system.as_ref().is_some_and(|s| s.baths.len() < 2) {
        return Err(CliError::schema("baths", "transport needs at least two baths"));
    }
    if experiment == Experiment::Transport && system.as_ref().is_some_and(|s| s.baths.iter().any(|b| b.spec.is_none())) {
        return Err(CliError::schema("baths", "transport baths must use `rates`"));
    }
    let seed = overrides.seed.or(config.seed).unwrap_or(0);
    let output = overrides
        .output
        .clone()
        .or_else(|| config.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    let mut config = config;
    config.experiment = Some(experiment);
    config.seed = Some(seed);
    Ok(Resolved { experiment, config, system, tolerances, seed, output })
}

/// Artifact path for `name` under an output prefix. A prefix that is an
/// existing directory or ends in a separator is used as a directory;
/// otherwise `name` is appended with a `_` separator.
pub fn artifact_path(prefix: &Path, name: &str) -> PathBuf {
    let text = prefix.to_string_lossy();
    if prefix.is_dir() || text.ends_with('/') || text.ends_with(std::path::MAIN_SEPARATOR) {
        prefix.join(name)
    } else {
        PathBuf::from(format!("{text}_{name}"))
    }
}
