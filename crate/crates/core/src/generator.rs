//! Construction of thermodynamically restricted GKLS generators and recovery
//! of GKS coefficient matrices from dynamical maps.
//!
//! Jump operators are the transition eigenoperators `F = |to⟩⟨from|` of the
//! system Hamiltonian (or, inside a degenerate Bohr group, fixed linear
//! combinations of them). Each energy-lowering jump with rate `γ↓` is paired
//! with its adjoint at rate `γ↑ = γ↓·e^{−βω}`. Pure dephasing is built from a
//! real symmetric PSD matrix over the energy projectors.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, ensure_hermitian, ensure_square, Operator};
use crate::liouville::{
    assemble_superop, eigenoperator_basis, hamiltonian_superop, hs, EigenoperatorBasis, SuperOpKind, SuperOperator,
};

/// Emission/absorption rates for one positive Bohr frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatePair {
    pub omega: f64,
    pub gamma_down: f64,
    pub gamma_up: f64,
}

pub fn fix_detailed_balance(gamma_down: f64, omega: f64, beta: f64) -> Result<RatePair> {
    if !gamma_down.is_finite() || gamma_down < 0.0 {
        return Err(Error::InvalidRate { what: "gamma_down".into(), value: gamma_down });
    }
    if !omega.is_finite() || omega <= 0.0 {
        return Err(Error::InvalidArgument(format!("Bohr frequency must be positive, got {omega}")));
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidArgument(format!("inverse temperature must be non-negative, got {beta}")));
    }
    Ok(RatePair { omega, gamma_down, gamma_up: gamma_down * (-beta * omega).exp() })
}

/// Emission rate as a function of the Bohr frequency.
#[derive(Clone)]
pub enum RateFunction {
    /// `γ(ω) = κ`
    Flat { kappa: f64 },
    /// `γ(ω) = κω / (1 − e^{−βω})`
    Ohmic { kappa: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for RateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateFunction::Flat { kappa } => write!(f, "Flat {{ kappa: {kappa} }}"),
            RateFunction::Ohmic { kappa } => write!(f, "Ohmic {{ kappa: {kappa} }}"),
            RateFunction::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl RateFunction {
    pub fn eval(&self, omega: f64, beta: f64) -> f64 {
        match self {
            RateFunction::Flat { kappa } => *kappa,
            RateFunction::Ohmic { kappa } => kappa * omega / -(-beta * omega).exp_m1(),
            RateFunction::Custom(f) => f(omega),
        }
    }
}

pub fn kms_rates(rate_function: &RateFunction, omega: f64, beta: f64) -> Result<RatePair> {
    let gamma = rate_function.eval(omega, beta);
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidRate { what: format!("{rate_function:?} at omega = {omega}"), value: gamma });
    }
    fix_detailed_balance(gamma, omega, beta)
}

/// Hermitian dephasing operator `V` with weight `λ ≥ 0`.
#[derive(Clone, Debug)]
pub struct DephasingTerm {
    pub operator: Operator,
    pub weight: f64,
}

impl DephasingTerm {
    /// `λ (V•V − ½{V², •}) = −(λ/2)[V, [V, •]]`.
    pub fn superoperator(&self) -> Result<SuperOperator> {
        Ok(&assemble_superop(SuperOpKind::DissipatorTerm, &self.operator, None)? * self.weight)
    }
}

/// Diagonalizes `alpha` orthogonally and returns `V_n = Σ_i Q_in Π_i` with the
/// eigenvalues `λ_n` as weights, largest first.
pub fn dephasing_from_alpha(alpha: &DMatrix<f64>, projectors: &[Operator]) -> Result<Vec<DephasingTerm>> {
    let n = projectors.len();
    if alpha.nrows() != alpha.ncols() {
        return Err(Error::InvalidAlpha(format!("{}x{} matrix is not square", alpha.nrows(), alpha.ncols())));
    }
    if alpha.nrows() != n {
        return Err(Error::dim(n, alpha.nrows()));
    }
    if alpha.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidAlpha("non-finite entry".into()));
    }
    let asym = (alpha - alpha.transpose()).norm();
    if asym > 1e-12 * alpha.norm().max(1.0) {
        return Err(Error::InvalidAlpha(format!("not symmetric (defect {asym:.3e})")));
    }
    let sym = (alpha + alpha.transpose()) * 0.5;

    let off_diagonal = (0..n).any(|i| (0..n).any(|j| i != j && sym[(i, j)] != 0.0));
    let (values, vectors): (Vec<f64>, DMatrix<f64>) = if off_diagonal {
        let eig = SymmetricEigen::new(sym);
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    } else {
        ((0..n).map(|i| sym[(i, i)]).collect(), DMatrix::identity(n, n))
    };
    if let Some(&min) = values.iter().min_by(|a, b| a.total_cmp(b)) {
        if min < -1e-10 {
            return Err(Error::InvalidAlpha(format!("not positive semidefinite (eigenvalue {min:.3e})")));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    Ok(order
        .into_iter()
        .map(|col| {
            let mut v = Operator::zeros(n, n);
            for (i, p) in projectors.iter().enumerate() {
                v += p * c64(vectors[(i, col)], 0.0);
            }
            DephasingTerm { operator: linalg::hermitian_part(&v), weight: values[col].max(0.0) }
        })
        .collect())
}

/// The dephasing dissipator written directly over projector pairs,
/// `Σ α_ij (Π_i • Π_j − ½{Π_i Π_j, •})`.
pub fn projector_dephasing(alpha: &DMatrix<f64>, projectors: &[Operator]) -> Result<SuperOperator> {
    let n = projectors.len();
    if alpha.nrows() != n || alpha.ncols() != n {
        return Err(Error::dim(n, alpha.nrows()));
    }
    let mut total = SuperOperator::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if alpha[(i, j)] == 0.0 {
                continue;
            }
            let pp = &projectors[i] * &projectors[j];
            let term = &assemble_superop(SuperOpKind::Sandwich, &projectors[i], Some(&projectors[j]))?
                - &(&assemble_superop(SuperOpKind::Anticommutator, &pp, None)? * 0.5);
            total = &total + &(&term * alpha[(i, j)]);
        }
    }
    Ok(total)
}

/// Mixing matrix `y` for the Bohr group at frequency `omega`:
/// jump `k` becomes `Y_k = Σ_i y_ki F_i` over the group members.
#[derive(Clone, Debug)]
pub struct DegenerateMixing {
    pub omega: f64,
    pub matrix: Operator,
}

/// Input to [`build_restricted_generator`].
#[derive(Clone, Debug)]
pub struct ThermoSpec {
    pub hamiltonian: Operator,
    pub beta: f64,
    /// Emission rates keyed by `(from, to)` energy-level indices (ascending
    /// energy order) of an energy-lowering transition.
    pub downward_rates: BTreeMap<(usize, usize), f64>,
    /// Dephasing matrix over the energy projectors.
    pub alpha: Option<DMatrix<f64>>,
    pub degenerate_mixing: Vec<DegenerateMixing>,
    pub degeneracy_tol: Option<f64>,
}

impl ThermoSpec {
    pub fn new(hamiltonian: Operator, beta: f64) -> Self {
        ThermoSpec {
            hamiltonian,
            beta,
            downward_rates: BTreeMap::new(),
            alpha: None,
            degenerate_mixing: Vec::new(),
            degeneracy_tol: None,
        }
    }

    pub fn with_rate(mut self, from: usize, to: usize, gamma_down: f64) -> Self {
        self.downward_rates.insert((from, to), gamma_down);
        self
    }

    /// Fills the emission rate of every energy-lowering transition from a
    /// spectral rate function.
    pub fn with_rate_function(mut self, rate_function: &RateFunction) -> Result<Self> {
        let basis = eigenoperator_basis(&self.hamiltonian, self.degeneracy_tol)?;
        for (_, t) in basis.positive_transitions() {
            let pair = kms_rates(rate_function, t.omega, self.beta)?;
            self.downward_rates.insert((t.from, t.to), pair.gamma_down);
        }
        Ok(self)
    }

    pub fn with_alpha(mut self, alpha: DMatrix<f64>) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_mixing(mut self, omega: f64, matrix: Operator) -> Self {
        self.degenerate_mixing.push(DegenerateMixing { omega, matrix });
        self
    }
}

/// One GKLS jump channel `γ (J•J† − ½{J†J, •})`.
#[derive(Clone, Debug)]
pub struct JumpTerm {
    pub operator: Operator,
    pub rate: f64,
    /// Bohr frequency when the jump is an eigenoperator of free evolution.
    pub omega: Option<f64>,
}

/// A GKLS generator with its structured terms and assembled superoperators.
#[derive(Clone, Debug)]
pub struct GKLSGenerator {
    pub basis: EigenoperatorBasis,
    pub jump_terms: Vec<JumpTerm>,
    pub dephasing_terms: Vec<DephasingTerm>,
    pub hamiltonian: Operator,
    /// `−i[H, •] + D`.
    pub superoperator: SuperOperator,
    /// Dissipative part `D` alone.
    pub dissipator: SuperOperator,
}

impl GKLSGenerator {
    /// Assembles a generator from explicit terms. Jumps need not be
    /// eigenoperators; their Bohr frequency is recorded when they are.
    pub fn from_terms(
        hamiltonian: Operator,
        jumps: Vec<(Operator, f64)>,
        dephasing_terms: Vec<DephasingTerm>,
    ) -> Result<Self> {
        let basis = eigenoperator_basis(&hamiltonian, None)?;
        let jump_terms = jumps
            .into_iter()
            .map(|(operator, rate)| {
                let omega = eigen_frequency(&hamiltonian, &operator);
                JumpTerm { operator, rate, omega }
            })
            .collect();
        Self::assemble(basis, hamiltonian, jump_terms, dephasing_terms)
    }

    fn assemble(
        basis: EigenoperatorBasis,
        hamiltonian: Operator,
        jump_terms: Vec<JumpTerm>,
        dephasing_terms: Vec<DephasingTerm>,
    ) -> Result<Self> {
        let n = ensure_square(&hamiltonian)?;
        let mut dissipator = SuperOperator::zeros(n);
        for (k, jump) in jump_terms.iter().enumerate() {
            if !jump.rate.is_finite() || jump.rate < 0.0 {
                return Err(Error::InvalidRate { what: format!("jump term {k}"), value: jump.rate });
            }
            if jump.operator.nrows() != n || jump.operator.ncols() != n {
                return Err(Error::dim(n, jump.operator.nrows()));
            }
            if jump.rate > 0.0 {
                let term = assemble_superop(SuperOpKind::DissipatorTerm, &jump.operator, None)?;
                dissipator = &dissipator + &(&term * jump.rate);
            }
        }
        for (k, deph) in dephasing_terms.iter().enumerate() {
            if !deph.weight.is_finite() || deph.weight < 0.0 {
                return Err(Error::InvalidRate { what: format!("dephasing term {k}"), value: deph.weight });
            }
            ensure_hermitian(&deph.operator, "dephasing operator", 1e-12)?;
            if deph.operator.nrows() != n {
                return Err(Error::dim(n, deph.operator.nrows()));
            }
            if deph.weight > 0.0 {
                dissipator = &dissipator + &deph.superoperator()?;
            }
        }
        let superoperator = &hamiltonian_superop(&hamiltonian)? + &dissipator;
        Ok(GKLSGenerator { basis, jump_terms, dephasing_terms, hamiltonian, superoperator, dissipator })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Rebuilds `−i[H,•] + Σγ(J•J†−½{J†J,•}) − Σ(λ/2)[V,[V,•]]` term by term
    /// without going through the superoperator assembly routines.
    pub fn apply_terms(&self, x: &Operator) -> Operator {
        let i = c64(0.0, 1.0);
        let mut out = (&self.hamiltonian * x - x * &self.hamiltonian) * (-i);
        for j in &self.jump_terms {
            let jd = j.operator.adjoint();
            let jdj = &jd * &j.operator;
            out += (&j.operator * x * &jd - (&jdj * x + x * &jdj) * c64(0.5, 0.0)) * c64(j.rate, 0.0);
        }
        for d in &self.dephasing_terms {
            let v = &d.operator;
            let vx = v * x - x * v;
            let vvx = v * &vx - &vx * v;
            out -= vvx * c64(0.5 * d.weight, 0.0);
        }
        out
    }
}

/// `ω` with `[H, J] = −ωJ` if `J` is an eigenoperator of `[H, •]`.
fn eigen_frequency(h: &Operator, j: &Operator) -> Option<f64> {
    let norm2 = j.norm_squared();
    if norm2 == 0.0 {
        return None;
    }
    let comm = h * j - j * h;
    let coeff = hs(j, &comm) / norm2;
    let residual = (&comm - j * coeff).norm();
    let omega = -coeff.re;
    (residual <= 1e-10 * (h.norm() * j.norm()).max(1e-300) && coeff.im.abs() <= 1e-10 * h.norm().max(1.0))
        .then_some(omega)
}

pub fn build_restricted_generator(spec: &ThermoSpec) -> Result<GKLSGenerator> {
    if !spec.beta.is_finite() || spec.beta < 0.0 {
        return Err(Error::InvalidArgument(format!("inverse temperature must be non-negative, got {}", spec.beta)));
    }
    let basis = eigenoperator_basis(&spec.hamiltonian, spec.degeneracy_tol)?;
    let n = basis.dim();

    let mut rates: BTreeMap<usize, f64> = BTreeMap::new();
    for (&(from, to), &gamma) in &spec.downward_rates {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidRate { what: format!("transition {from}->{to}"), value: gamma });
        }
        let k = basis
            .transition(from, to)
            .filter(|&k| basis.groups[basis.transitions[k].group].omega > 0.0)
            .ok_or(Error::UnknownTransition { from, to })?;
        rates.insert(k, gamma);
    }

    let mut mixing: BTreeMap<usize, &Operator> = BTreeMap::new();
    for m in &spec.degenerate_mixing {
        let g = basis
            .group_for_omega(m.omega)
            .filter(|&g| basis.groups[g].omega > 0.0)
            .ok_or_else(|| Error::InvalidArgument(format!("no positive Bohr frequency {} to mix", m.omega)))?;
        let size = basis.groups[g].members.len();
        if m.matrix.nrows() != size || m.matrix.ncols() != size {
            return Err(Error::dim(size, m.matrix.nrows()));
        }
        mixing.insert(g, &m.matrix);
    }

    let mut jump_terms = Vec::new();
    let mut push_pair = |op: Operator, gamma: f64, omega: f64| -> Result<()> {
        let pair = fix_detailed_balance(gamma, omega, spec.beta)?;
        let up = op.adjoint();
        jump_terms.push(JumpTerm { operator: op, rate: pair.gamma_down, omega: Some(omega) });
        jump_terms.push(JumpTerm { operator: up, rate: pair.gamma_up, omega: Some(-omega) });
        Ok(())
    };
    for (g, group) in basis.groups.iter().enumerate().filter(|(_, g)| g.omega > 0.0) {
        match mixing.get(&g) {
            Some(y) => {
                for (row, &member) in group.members.iter().enumerate() {
                    let Some(&gamma) = rates.get(&member) else { continue };
                    let mut op = Operator::zeros(n, n);
                    for (col, &fi) in group.members.iter().enumerate() {
                        op += &basis.transitions[fi].operator * y[(row, col)];
                    }
                    push_pair(op, gamma, group.omega)?;
                }
            }
            None => {
                for &member in &group.members {
                    if let Some(&gamma) = rates.get(&member) {
                        let t = &basis.transitions[member];
                        push_pair(t.operator.clone(), gamma, t.omega)?;
                    }
                }
            }
        }
    }

    let dephasing_terms = match &spec.alpha {
        Some(alpha) => dephasing_from_alpha(alpha, &basis.projectors)?,
        None => Vec::new(),
    };
    GKLSGenerator::assemble(basis, spec.hamiltonian.clone(), jump_terms, dephasing_terms)
}

/// GKS decomposition `L[X] = −i[H, X] + Σ a_ij (S_i X S_j† − ½{S_j† S_i, X})`
/// over the traceless eigenoperator basis `S_i`.
#[derive(Clone, Debug)]
pub struct GksCoefficients {
    pub labels: Vec<String>,
    pub a: Operator,
    pub hamiltonian: Operator,
    /// Smallest eigenvalue of the Hermitian part of `a`.
    pub min_eigenvalue: f64,
    pub hermiticity_defect: f64,
}

impl GksCoefficients {
    pub fn entry(&self, row: &str, col: &str) -> Option<Complex64> {
        let i = self.labels.iter().position(|l| l == row)?;
        let j = self.labels.iter().position(|l| l == col)?;
        Some(self.a[(i, j)])
    }

    /// Diagonal coefficient of transition `k` (its GKS rate).
    pub fn transition_rate(&self, k: usize) -> f64 {
        self.a[(k, k)].re
    }
}

/// Projects a generator onto the GKS sandwich basis built from `basis`.
pub fn gks_from_generator(generator: &SuperOperator, basis: &EigenoperatorBasis) -> Result<GksCoefficients> {
    let n = basis.dim();
    if generator.dim() != n {
        return Err(Error::dim(n, generator.dim()));
    }
    let traceless = basis.traceless_basis();
    let mut columns = vec![crate::vectorize(&basis.identity)];
    columns.extend(traceless.iter().map(|e| crate::vectorize(&e.operator)));
    let b = Operator::from_columns(&columns);
    let choi = crate::liouville::choi_matrix(generator);
    let c = b.adjoint() * choi * &b;

    let nn = n as f64;
    let mut f = Operator::identity(n, n) * (c[(0, 0)] / (2.0 * nn));
    for (i, e) in traceless.iter().enumerate() {
        f += &e.operator * (c[(i + 1, 0)] / nn.sqrt());
    }
    let hamiltonian = (f.adjoint() - &f) / c64(0.0, 2.0);
    let m = traceless.len();
    let a = c.view((1, 1), (m, m)).into_owned();
    let hermiticity_defect = (&a - a.adjoint()).norm();
    let min_eigenvalue = linalg::HermitianEigen::new(&a).min();
    Ok(GksCoefficients {
        labels: traceless.into_iter().map(|e| e.label).collect(),
        a,
        hamiltonian,
        min_eigenvalue,
        hermiticity_defect,
    })
}

/// Estimates the generator of a map family by central differences at `ε`
/// and `ε/2` with Richardson extrapolation, then extracts its GKS matrix.
pub fn gks_from_map<F>(map_family: F, basis: &EigenoperatorBasis, epsilon: f64) -> Result<GksCoefficients>
where
    F: Fn(f64) -> SuperOperator,
{
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let n = basis.dim();
    let at_zero = map_family(0.0);
    if at_zero.dim() != n {
        return Err(Error::dim(n, at_zero.dim()));
    }
    let defect = (&at_zero - &SuperOperator::identity(n)).norm();
    if defect > 1e-10 * (n * n) as f64 {
        return Err(Error::NonIdentityMap(defect));
    }
    let central = |h: f64| &(&map_family(h) - &map_family(-h)) * (0.5 / h);
    let coarse = central(epsilon);
    let fine = central(0.5 * epsilon);
    let generator = &(&(&fine * 4.0) - &coarse) * (1.0 / 3.0);
    gks_from_generator(&generator, basis)
}
