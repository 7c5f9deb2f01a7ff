//! Time evolution, steady states, relative entropy and multi-bath transport.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::generator::{build_restricted_generator, DegenerateMixing, GKLSGenerator, RateFunction, ThermoSpec};
use crate::linalg::{
    self, c64, ensure_hermitian, ensure_square, hermitian_part, validate_density, HermitianEigen, Operator,
    StateTolerance,
};
use crate::liouville::{devectorize, hamiltonian_superop, vectorize, Spectrum, SuperOperator};
use crate::LiouvilleVector;

use nalgebra::DMatrix;
use std::collections::BTreeMap;

/// Tolerance used to accept states produced by numerical evolution.
pub const EVOLVED_STATE_TOL: StateTolerance = StateTolerance { trace: 1e-9, hermiticity: 1e-9, positivity: 1e-9 };

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Operator>,
    /// Hermiticity defect of each state before symmetrization.
    pub hermiticity_defects: Vec<f64>,
}

impl Trajectory {
    pub fn trace_defects(&self) -> Vec<f64> {
        self.states.iter().map(|s| (linalg::trace(s) - c64(1.0, 0.0)).norm()).collect()
    }

    pub fn max_trace_defect(&self) -> f64 {
        self.trace_defects().into_iter().fold(0.0, f64::max)
    }

    /// Most negative eigenvalue over all states, clamped at zero.
    pub fn max_positivity_defect(&self) -> f64 {
        self.states.iter().map(|s| (-HermitianEigen::new(s).min()).max(0.0)).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PropagatorMethod {
    /// `V e^{Λt} V⁻¹` from a dense eigendecomposition.
    Eigen,
    /// Padé scaling-and-squaring.
    Pade,
}

#[derive(Clone, Debug)]
struct EigenFactors {
    values: DVector<Complex64>,
    vectors: Operator,
    inverse: Operator,
}

/// `t ↦ exp(L t)` for a fixed generator.
#[derive(Clone, Debug)]
pub struct Propagator {
    generator: SuperOperator,
    method: PropagatorMethod,
    eigen: Option<EigenFactors>,
    condition_number: f64,
}

impl Propagator {
    pub const DEFAULT_COND_LIMIT: f64 = 1e8;

    /// Eigen path when the eigenvector matrix is better conditioned than
    /// `cond_limit`, Padé otherwise.
    pub fn new(generator: &SuperOperator, cond_limit: f64) -> Self {
        match Self::eigen_factors(generator) {
            Ok((factors, cond)) if cond < cond_limit => Propagator {
                generator: generator.clone(),
                method: PropagatorMethod::Eigen,
                eigen: Some(factors),
                condition_number: cond,
            },
            Ok((_, cond)) => Self::pade(generator, cond),
            Err(_) => Self::pade(generator, f64::INFINITY),
        }
    }

    pub fn with_method(generator: &SuperOperator, method: PropagatorMethod) -> Result<Self> {
        match method {
            PropagatorMethod::Eigen => {
                let (factors, cond) = Self::eigen_factors(generator)?;
                Ok(Propagator {
                    generator: generator.clone(),
                    method,
                    eigen: Some(factors),
                    condition_number: cond,
                })
            }
            PropagatorMethod::Pade => Ok(Self::pade(generator, f64::NAN)),
        }
    }

    fn pade(generator: &SuperOperator, cond: f64) -> Self {
        Propagator { generator: generator.clone(), method: PropagatorMethod::Pade, eigen: None, condition_number: cond }
    }

    fn eigen_factors(generator: &SuperOperator) -> Result<(EigenFactors, f64)> {
        let mut eig = linalg::eig(generator.matrix())?;
        let cond = eig.condition_number();
        // Stationary eigenvalues are exactly zero; rounding must not make them grow.
        let zero_tol = 64.0 * f64::EPSILON * generator.norm();
        for z in eig.values.iter_mut() {
            if z.norm() <= zero_tol {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        let inverse = eig
            .vectors
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("eigenvector matrix is singular".into()))?;
        Ok((EigenFactors { values: eig.values, vectors: eig.vectors, inverse }, cond))
    }

    pub fn method(&self) -> PropagatorMethod {
        self.method
    }

    /// Eigenvector condition number (`NaN` when the Padé path was forced).
    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    pub fn map(&self, t: f64) -> SuperOperator {
        match &self.eigen {
            Some(f) => {
                let n = f.values.len();
                let scaled = Operator::from_fn(n, n, |r, c| f.vectors[(r, c)] * (f.values[c] * t).exp());
                SuperOperator::from_matrix(scaled * &f.inverse).expect("square by construction")
            }
            None => self.generator.exp(t),
        }
    }

    pub fn apply(&self, v: &LiouvilleVector, t: f64) -> Result<LiouvilleVector> {
        if v.len() != self.generator.matrix().nrows() {
            return Err(Error::dim(self.generator.matrix().nrows(), v.len()));
        }
        match &self.eigen {
            Some(f) => {
                let mut w = &f.inverse * v;
                for (wi, &lam) in w.iter_mut().zip(f.values.iter()) {
                    *wi *= (lam * t).exp();
                }
                Ok(&f.vectors * w)
            }
            None => self.generator.exp(t).apply_vec(v),
        }
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    if times.iter().any(|t| !t.is_finite()) || times[0] < 0.0 {
        return Err(Error::InvalidArgument("times must be finite and non-negative".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("times must be ascending".into()));
    }
    Ok(())
}

/// Evolves `rho0` under `L`, symmetrizing each state and logging the
/// Hermiticity defect it had before symmetrization.
pub fn propagate(l: &SuperOperator, rho0: &Operator, times: &[f64], exec: Execution) -> Result<Trajectory> {
    validate_density(rho0, StateTolerance::default())?;
    if ensure_square(rho0)? != l.dim() {
        return Err(Error::dim(l.dim(), rho0.nrows()));
    }
    check_times(times)?;
    let propagator = Propagator::new(l, Propagator::DEFAULT_COND_LIMIT);
    propagate_with(&propagator, rho0, times, exec)
}

pub fn propagate_with(propagator: &Propagator, rho0: &Operator, times: &[f64], exec: Execution) -> Result<Trajectory> {
    check_times(times)?;
    let v0 = vectorize(rho0);
    let points = exec::map(exec, times, |&t| -> Result<(Operator, f64)> {
        if t == 0.0 {
            return Ok((rho0.clone(), linalg::hermiticity_defect(rho0)));
        }
        let rho = devectorize(&propagator.apply(&v0, t)?)?;
        let defect = linalg::hermiticity_defect(&rho);
        Ok((hermitian_part(&rho), defect))
    });
    let mut states = Vec::with_capacity(times.len());
    let mut hermiticity_defects = Vec::with_capacity(times.len());
    for p in points {
        let (rho, defect) = p?;
        states.push(rho);
        hermiticity_defects.push(defect);
    }
    Ok(Trajectory { times: times.to_vec(), states, hermiticity_defects })
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub state: Operator,
    pub unique: bool,
    pub null_space_dim: usize,
    pub residual: f64,
}

/// Relative singular-value cutoff for the null space of a generator.
pub const NULL_SPACE_REL_TOL: f64 = 1e-10;

/// Stationary state from the null space of `L`. With a degenerate null space
/// the maximally mixed state is projected onto it.
pub fn steady_state(l: &SuperOperator) -> Result<SteadyState> {
    let n = l.dim();
    let svd = l.matrix().clone().svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Numerical("SVD did not return right singular vectors".into()))?;
    let s = &svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[i].total_cmp(&s[j]));
    let s_max = s.iter().copied().fold(0.0, f64::max);
    let null: Vec<usize> = order.iter().copied().filter(|&i| s[i] <= NULL_SPACE_REL_TOL * s_max).collect();
    let residual_tol = 1e-10 * s_max.max(1.0);
    if null.is_empty() {
        return Err(Error::NoStationaryState(s[order[0]]));
    }
    let vectors: Vec<LiouvilleVector> = null.iter().map(|&i| v_t.row(i).adjoint()).collect();
    let candidate = if vectors.len() == 1 {
        vectors[0].clone()
    } else {
        let target = vectorize(&(Operator::identity(n, n) / c64(n as f64, 0.0)));
        let projected = vectors.iter().fold(LiouvilleVector::zeros(n * n), |acc, v| acc + v * v.dotc(&target));
        if linalg::trace(&devectorize(&projected)?).norm() > 1e-8 {
            projected
        } else {
            vectors
                .iter()
                .max_by(|a, b| {
                    let ta = linalg::trace(&devectorize(a).unwrap()).norm();
                    let tb = linalg::trace(&devectorize(b).unwrap()).norm();
                    ta.total_cmp(&tb)
                })
                .cloned()
                .expect("non-empty null space")
        }
    };
    let rho = devectorize(&candidate)?;
    let tr = linalg::trace(&rho);
    if tr.norm() < 1e-12 {
        return Err(Error::NoStationaryState(s[order[0]]));
    }
    let state = hermitian_part(&(rho / tr));
    let residual = l.apply_vec(&vectorize(&state))?.norm();
    if residual > residual_tol {
        return Err(Error::NoStationaryState(residual));
    }
    Ok(SteadyState { state, unique: null.len() == 1, null_space_dim: null.len(), residual })
}

/// Support cutoff for relative entropy.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// `S(ρ‖σ) = tr ρ(ln ρ − ln σ)`; `+∞` when the support of ρ is not contained
/// in that of σ.
pub fn relative_entropy(rho: &Operator, sigma: &Operator) -> Result<f64> {
    validate_density(rho, EVOLVED_STATE_TOL)?;
    validate_density(sigma, EVOLVED_STATE_TOL)?;
    if rho.nrows() != sigma.nrows() {
        return Err(Error::dim(sigma.nrows(), rho.nrows()));
    }
    let er = HermitianEigen::new(rho);
    let es = HermitianEigen::new(sigma);
    let entropy_term: f64 = er.values.iter().filter(|&&p| p > 0.0).map(|&p| p * p.max(1e-300).ln()).sum();
    let rho_in_sigma = es.vectors.adjoint() * hermitian_part(rho) * &es.vectors;
    let mut cross = 0.0;
    for (j, &q) in es.values.iter().enumerate() {
        let weight = rho_in_sigma[(j, j)].re;
        if q <= SUPPORT_CUTOFF {
            if weight > SUPPORT_CUTOFF {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += weight * q.max(1e-300).ln();
    }
    Ok(entropy_term - cross)
}

/// Emission rates of one bath.
#[derive(Clone, Debug)]
pub enum BathRates {
    /// Keyed by `(from, to)` level pair of an energy-lowering transition.
    Explicit(BTreeMap<(usize, usize), f64>),
    Function(RateFunction),
}

#[derive(Clone, Debug)]
pub struct BathSpec {
    pub label: String,
    pub beta: f64,
    pub rates: BathRates,
    pub alpha: Option<DMatrix<f64>>,
    pub degenerate_mixing: Vec<DegenerateMixing>,
}

impl BathSpec {
    pub fn new(label: impl Into<String>, beta: f64, rates: BathRates) -> Self {
        BathSpec { label: label.into(), beta, rates, alpha: None, degenerate_mixing: Vec::new() }
    }

    pub fn thermo_spec(&self, h: &Operator, degeneracy_tol: Option<f64>) -> Result<ThermoSpec> {
        let mut spec = ThermoSpec::new(h.clone(), self.beta);
        spec.degeneracy_tol = degeneracy_tol;
        spec.alpha = self.alpha.clone();
        spec.degenerate_mixing = self.degenerate_mixing.clone();
        match &self.rates {
            BathRates::Explicit(map) => spec.downward_rates = map.clone(),
            BathRates::Function(f) => spec = spec.with_rate_function(f)?,
        }
        Ok(spec)
    }
}

/// A system coupled additively to several thermal baths.
#[derive(Clone, Debug)]
pub struct TransportModel {
    pub h_s: Operator,
    pub baths: Vec<BathSpec>,
    pub generators: Vec<GKLSGenerator>,
    pub per_bath_dissipators: Vec<SuperOperator>,
    /// `−i[H_S, •] + Σ_b D_b`.
    pub total: SuperOperator,
}

impl TransportModel {
    pub fn new(h_s: &Operator, baths: Vec<BathSpec>, degeneracy_tol: Option<f64>) -> Result<Self> {
        ensure_hermitian(h_s, "system Hamiltonian", 1e-12)?;
        let generators = baths
            .iter()
            .map(|b| build_restricted_generator(&b.thermo_spec(h_s, degeneracy_tol)?))
            .collect::<Result<Vec<_>>>()?;
        let per_bath_dissipators: Vec<SuperOperator> = generators.iter().map(|g| g.dissipator.clone()).collect();
        let mut total = hamiltonian_superop(h_s)?;
        for d in &per_bath_dissipators {
            total = &total + d;
        }
        Ok(TransportModel { h_s: h_s.clone(), baths, generators, per_bath_dissipators, total })
    }

    pub fn labels(&self) -> Vec<String> {
        self.baths.iter().map(|b| b.label.clone()).collect()
    }
}

/// `Q̇_b = tr(H_S D_b[ρ])`, positive when energy flows from bath `b` into the
/// system.
pub fn heat_current(model: &TransportModel, rho: &Operator) -> Result<Vec<f64>> {
    validate_density(rho, EVOLVED_STATE_TOL)?;
    model
        .per_bath_dissipators
        .iter()
        .map(|d| Ok(linalg::trace(&(&model.h_s * d.apply(rho)?)).re))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportReport {
    pub labels: Vec<String>,
    #[serde(skip)]
    pub steady_state: Operator,
    pub unique: bool,
    pub residual: f64,
    pub currents: Vec<f64>,
    pub current_sum: f64,
    /// Largest off-diagonal modulus of the steady state in the energy basis.
    pub max_coherence: f64,
    pub populations: Vec<f64>,
}

pub fn transport_steady_report(model: &TransportModel) -> Result<TransportReport> {
    if model.baths.len() < 2 {
        return Err(Error::InvalidArgument(format!("transport needs at least two baths, got {}", model.baths.len())));
    }
    let ss = steady_state(&model.total)?;
    let currents = heat_current(model, &ss.state)?;
    let spectrum = Spectrum::new(&model.h_s, None)?;
    let in_energy = spectrum.to_energy_basis(&ss.state);
    let n = in_energy.nrows();
    let mut max_coherence: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                max_coherence = max_coherence.max(in_energy[(i, j)].norm());
            }
        }
    }
    Ok(TransportReport {
        labels: model.labels(),
        unique: ss.unique,
        residual: ss.residual,
        current_sum: currents.iter().sum(),
        currents,
        max_coherence,
        populations: (0..n).map(|i| in_energy[(i, i)].re).collect(),
        steady_state: ss.state,
    })
}
