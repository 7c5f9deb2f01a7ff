//! Audits of a generator against the thermodynamic requirements: commutation
//! with free evolution, thermal fixed point, complete positivity, spectral
//! regularity, eigenoperator support, detailed balance and monotone relative
//! entropy along trajectories.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dynamics::{self, Trajectory};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::generator::GKLSGenerator;
use crate::linalg::{self, ensure_square, thermal_state, HermitianEigen, Operator};
use crate::liouville::{
    assemble_superop, choi_matrix, hs, vectorize, EigenoperatorBasis, Sector, SuperOpKind, SuperOperator,
};

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Set when the check could not be evaluated; such a check never passes.
    pub inconclusive: bool,
    pub defect: f64,
    pub threshold: f64,
    pub details: BTreeMap<String, Value>,
}

impl CheckResult {
    pub fn new(name: &str, defect: f64, threshold: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: defect <= threshold,
            inconclusive: false,
            defect,
            threshold,
            details: BTreeMap::new(),
        }
    }

    pub fn inconclusive(name: &str, threshold: f64, reason: impl Into<String>) -> Self {
        let mut out = CheckResult::new(name, f64::INFINITY, threshold);
        out.passed = false;
        out.inconclusive = true;
        out.details.insert("reason".into(), Value::String(reason.into()));
        out
    }

    pub fn with_detail(mut self, key: &str, value: impl Serialize) -> Self {
        self.details.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn detail_f64(&self, key: &str) -> Option<f64> {
        self.details.get(key).and_then(Value::as_f64)
    }

    pub fn detail_bool(&self, key: &str) -> Option<bool> {
        self.details.get(key).and_then(Value::as_bool)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub generator_label: String,
    pub checks: Vec<CheckResult>,
    pub overall: bool,
}

impl ValidationReport {
    /// Orders checks by name so reports are independent of evaluation order.
    pub fn new(generator_label: impl Into<String>, mut checks: Vec<CheckResult>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let overall = checks.iter().all(|c| c.passed);
        ValidationReport { generator_label: generator_label.into(), checks, overall }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Pass/fail limits for every check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Thresholds {
    pub commutation: f64,
    pub fixed_point: f64,
    pub cptp: f64,
    pub structure_support: f64,
    pub detailed_balance: f64,
    pub spohn_slack: f64,
    /// Eigenvector condition number above which a generator is near-defective.
    pub near_defective_cond: f64,
    pub stability: f64,
    pub population_imag: f64,
    /// Singular values below this fraction of the largest count as null.
    pub null_space_rel: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            commutation: 1e-10,
            fixed_point: 1e-10,
            cptp: 1e-10,
            structure_support: 1e-10,
            detailed_balance: 1e-10,
            spohn_slack: 1e-9,
            near_defective_cond: 1e8,
            stability: 1e-10,
            population_imag: 1e-9,
            null_space_rel: 1e-10,
        }
    }
}

fn check_hilbert_dim(l: &SuperOperator, h: &Operator) -> Result<()> {
    let n = ensure_square(h)?;
    if l.dim() != n {
        return Err(Error::dim(n, l.dim()));
    }
    Ok(())
}

/// `‖[H̃, L̃]‖_F / ‖L̃‖_F` with `H̃ = [H, •]`.
pub fn check_commutation(l: &SuperOperator, h: &Operator, threshold: f64) -> Result<CheckResult> {
    check_hilbert_dim(l, h)?;
    let h_super = assemble_superop(SuperOpKind::Commutator, h, None)?;
    let raw = h_super.commutator(l)?.norm();
    let norm = l.norm();
    let defect = if norm == 0.0 { 0.0 } else { raw / norm };
    Ok(CheckResult::new("commutation", defect, threshold).with_detail("absolute_defect", raw))
}

/// Number of singular values of `l` below `rel · σ_max`.
pub fn null_space_dimension(l: &SuperOperator, rel: f64) -> usize {
    let s = linalg::singular_values(l.matrix());
    let max = s.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return s.len();
    }
    s.iter().filter(|&&x| x < rel * max).count()
}

pub fn check_fixed_point(l: &SuperOperator, h: &Operator, beta: f64, thresholds: &Thresholds) -> Result<CheckResult> {
    check_hilbert_dim(l, h)?;
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::InvalidArgument(format!("inverse temperature must be non-negative, got {beta}")));
    }
    let rho = thermal_state(h, beta);
    let defect = l.apply_vec(&vectorize(&rho))?.norm();
    let null_dim = null_space_dimension(l, thresholds.null_space_rel);
    Ok(CheckResult::new("fixed_point", defect, thresholds.fixed_point)
        .with_detail("beta", beta)
        .with_detail("null_space_dim", null_dim)
        .with_detail("unique", null_dim == 1))
}

/// Choi positivity and trace preservation of `exp(L t)`.
pub fn check_cptp(l: &SuperOperator, t: f64, threshold: f64) -> Result<CheckResult> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
    }
    let map = l.exp(t);
    let choi = choi_matrix(&map);
    let herm_defect = linalg::hermiticity_defect(&choi);
    let min_eig = HermitianEigen::new(&choi).min();
    let id = vectorize(&Operator::identity(l.dim(), l.dim()));
    let trace_defect = (map.adjoint().matrix() * &id - &id).norm();
    let positivity_defect = (-min_eig).max(0.0);
    let defect = positivity_defect.max(trace_defect).max(herm_defect);
    Ok(CheckResult::new("cptp", defect, threshold)
        .with_detail("t", t)
        .with_detail("choi_min_eigenvalue", min_eig)
        .with_detail("choi_hermiticity_defect", herm_defect)
        .with_detail("trace_defect", trace_defect))
}

/// CPTP check over several times; the reported defect is the worst one.
pub fn check_cptp_grid(l: &SuperOperator, times: &[f64], threshold: f64, exec: Execution) -> Result<CheckResult> {
    let results = exec::map(exec, times, |&t| check_cptp(l, t, threshold));
    let mut worst: Option<CheckResult> = None;
    let mut per_time = Vec::with_capacity(times.len());
    for r in results {
        let r = r?;
        per_time.push(json!({
            "t": r.detail_f64("t"),
            "choi_min_eigenvalue": r.detail_f64("choi_min_eigenvalue"),
            "trace_defect": r.detail_f64("trace_defect"),
        }));
        if worst.as_ref().is_none_or(|w| r.defect > w.defect) {
            worst = Some(r);
        }
    }
    let worst = worst.ok_or_else(|| Error::InvalidArgument("empty time grid".into()))?;
    Ok(worst.with_detail("per_time", per_time))
}

/// Diagonalizability, stability and (given the eigenoperator basis) reality of
/// the population-sector spectrum.
///
/// The scalar defect is the largest of three normalized violations
/// (`cond / cond_limit`, `max Re λ / stability`, `max |Im| / population_imag`),
/// so the check passes exactly when the defect is at most 1.
pub fn check_spectral(l: &SuperOperator, basis: Option<&EigenoperatorBasis>, thresholds: &Thresholds) -> CheckResult {
    let eig = match linalg::eig(l.matrix()) {
        Ok(e) => e,
        Err(err) => return CheckResult::inconclusive("spectral", 1.0, err.to_string()),
    };
    let cond = eig.condition_number();
    let max_re = eig.values.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let mut out = CheckResult::new("spectral", 0.0, 1.0);
    let mut defect = (cond / thresholds.near_defective_cond).max(max_re.max(0.0) / thresholds.stability);
    if !cond.is_finite() {
        defect = f64::INFINITY;
    }
    if let Some(basis) = basis {
        match population_block_eigenvalues(l, basis) {
            Ok(values) => {
                let max_imag = values.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
                defect = defect.max(max_imag / thresholds.population_imag);
                out = out.with_detail("population_max_imag", max_imag);
            }
            Err(err) => return CheckResult::inconclusive("spectral", 1.0, err.to_string()),
        }
    }
    out.defect = defect;
    out.passed = defect <= out.threshold;
    let eigenvalues: Vec<[f64; 2]> = eig.values.iter().map(|z| [z.re, z.im]).collect();
    out.with_detail("condition_number", cond)
        .with_detail("near_defective", cond > thresholds.near_defective_cond)
        .with_detail("max_real_part", max_re)
        .with_detail("eigenvalues", eigenvalues)
}

/// Eigenvalues of `L` restricted to the zero-frequency sector (populations
/// plus any zero-frequency coherences).
pub fn population_block_eigenvalues(l: &SuperOperator, basis: &EigenoperatorBasis) -> Result<Vec<Complex64>> {
    let sector: Vec<Operator> = basis
        .orthonormal_basis()
        .into_iter()
        .filter(|e| e.sector == Sector::Invariant)
        .map(|e| e.operator)
        .collect();
    let images: Vec<Operator> = sector.iter().map(|s| l.apply(s)).collect::<Result<_>>()?;
    let m = sector.len();
    let block = Operator::from_fn(m, m, |i, j| hs(&sector[i], &images[j]));
    Ok(linalg::eigenvalues(&block)?.iter().copied().collect())
}

/// Matrix elements `d_ij = ⟨S_i, D[S_j]⟩` that fall outside the support
/// allowed by commutation with free evolution.
pub fn check_structure_support(d: &SuperOperator, basis: &EigenoperatorBasis, threshold: f64) -> Result<CheckResult> {
    if d.dim() != basis.dim() {
        return Err(Error::dim(basis.dim(), d.dim()));
    }
    let elements = basis.orthonormal_basis();
    let images: Vec<Operator> = elements.iter().map(|e| d.apply(&e.operator)).collect::<Result<_>>()?;
    let group_size = |s: Sector| match s {
        Sector::Bohr(g) => basis.groups[g].members.len(),
        Sector::Invariant => usize::MAX,
    };
    let mut sum = 0.0;
    let mut worst = (0.0, String::new(), String::new());
    let mut cross_sector = 0.0;
    for (i, si) in elements.iter().enumerate() {
        for (j, sj) in elements.iter().enumerate() {
            let allowed = si.sector == sj.sector && (i == j || group_size(si.sector) > 1);
            if allowed {
                continue;
            }
            let v = hs(&si.operator, &images[j]).norm();
            sum += v * v;
            if si.sector != sj.sector {
                cross_sector = f64::max(cross_sector, v);
            }
            if v > worst.0 {
                worst = (v, si.label.clone(), sj.label.clone());
            }
        }
    }
    let defect = sum.sqrt();
    Ok(CheckResult::new("structure_support", defect, threshold)
        .with_detail("max_off_support", worst.0)
        .with_detail("max_cross_sector", cross_sector)
        .with_detail("worst_entry", [worst.1, worst.2]))
}

/// Rate ratio of every emission/absorption pair against `e^{−βω}`.
pub fn check_detailed_balance(gen: &GKLSGenerator, beta: f64, threshold: f64) -> CheckResult {
    const FLOOR: f64 = 1e-300;
    let tol = gen.basis.degeneracy_tol().max(1e-12);
    let mut defect: f64 = 0.0;
    let mut unpaired = Vec::new();
    let mut pairs = 0usize;
    for (k, jump) in gen.jump_terms.iter().enumerate() {
        let Some(omega) = jump.omega else {
            unpaired.push(k);
            continue;
        };
        if omega.abs() <= tol {
            continue;
        }
        let scale = jump.operator.norm().max(FLOOR);
        let adj = jump.operator.adjoint();
        let partner = gen.jump_terms.iter().enumerate().find(|(p, other)| {
            *p != k
                && other.omega.is_some_and(|w| (w + omega).abs() <= tol)
                && (&other.operator - &adj).norm() <= 1e-12 * scale
        });
        let Some((_, partner)) = partner else {
            unpaired.push(k);
            continue;
        };
        if omega > 0.0 {
            pairs += 1;
            let expected = jump.rate * (-beta * omega).exp();
            defect = defect.max((partner.rate - expected).abs() / jump.rate.max(FLOOR));
        }
    }
    let mut out = CheckResult::new("detailed_balance", defect, threshold)
        .with_detail("pairs", pairs)
        .with_detail("beta", beta);
    if !unpaired.is_empty() {
        out.passed = false;
        out.defect = f64::INFINITY;
        out = out.with_detail("unpaired_jumps", unpaired);
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SpohnReport {
    /// `(t, S(ρ_t‖σ))`; `None` marks an infinite (support-violating) entry.
    pub series: Vec<(f64, Option<f64>)>,
    pub check: CheckResult,
}

/// Relative entropy to `reference` along a trajectory; passes when the series
/// never increases by more than `slack` between consecutive finite entries.
pub fn spohn_monitor(trajectory: &Trajectory, reference: &Operator, slack: f64) -> Result<SpohnReport> {
    let mut series = Vec::with_capacity(trajectory.states.len());
    for (&t, rho) in trajectory.times.iter().zip(&trajectory.states) {
        let s = dynamics::relative_entropy(rho, reference)?;
        series.push((t, s.is_finite().then_some(s)));
    }
    let mut worst_increase: f64 = 0.0;
    let mut inconclusive_steps = Vec::new();
    for (k, w) in series.windows(2).enumerate() {
        match (w[0].1, w[1].1) {
            (Some(a), Some(b)) => worst_increase = worst_increase.max(b - a),
            _ => inconclusive_steps.push(k + 1),
        }
    }
    let mut check = CheckResult::new("spohn", worst_increase, slack)
        .with_detail("max_increase", worst_increase)
        .with_detail("steps", series.len().saturating_sub(1));
    if !inconclusive_steps.is_empty() {
        check = check.with_detail("inconclusive_steps", inconclusive_steps);
    }
    Ok(SpohnReport { series, check })
}

#[derive(Clone, Debug)]
pub struct ValidationOptions {
    pub thresholds: Thresholds,
    pub cptp_times: Vec<f64>,
    /// Time grid for the relative-entropy monitor, started from the most
    /// excited energy eigenstate.
    pub spohn_times: Vec<f64>,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            thresholds: Thresholds::default(),
            cptp_times: vec![1e-3, 1e-1, 1.0, 10.0, 100.0],
            spohn_times: (0..=50).map(|k| 0.2 * k as f64).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum CheckKind {
    Commutation,
    FixedPoint,
    Cptp,
    Spectral,
    StructureSupport,
    DetailedBalance,
    Spohn,
}

/// Runs every check on a structured generator at inverse temperature `beta`.
pub fn validate_generator(
    label: &str,
    gen: &GKLSGenerator,
    beta: f64,
    options: &ValidationOptions,
    exec: Execution,
) -> Result<ValidationReport> {
    use CheckKind::*;
    let th = &options.thresholds;
    let kinds = [Commutation, FixedPoint, Cptp, Spectral, StructureSupport, DetailedBalance, Spohn];
    let results = exec::map(exec, &kinds, |kind| -> Result<CheckResult> {
        match kind {
            Commutation => check_commutation(&gen.superoperator, &gen.hamiltonian, th.commutation),
            FixedPoint => check_fixed_point(&gen.superoperator, &gen.hamiltonian, beta, th),
            Cptp => check_cptp_grid(&gen.superoperator, &options.cptp_times, th.cptp, Execution::Sequential),
            Spectral => Ok(check_spectral(&gen.superoperator, Some(&gen.basis), th)),
            StructureSupport => check_structure_support(&gen.dissipator, &gen.basis, th.structure_support),
            DetailedBalance => Ok(check_detailed_balance(gen, beta, th.detailed_balance)),
            Spohn => {
                let n = gen.dim();
                let excited = gen.basis.projectors[n - 1].clone();
                let traj =
                    dynamics::propagate(&gen.superoperator, &excited, &options.spohn_times, Execution::Sequential)?;
                let reference = thermal_state(&gen.hamiltonian, beta);
                Ok(spohn_monitor(&traj, &reference, th.spohn_slack)?.check)
            }
        }
    });
    let checks = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ValidationReport::new(label, checks))
}
