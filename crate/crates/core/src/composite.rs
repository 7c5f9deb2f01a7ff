//! Finite system + environment models evolved exactly: strict-energy-conserving
//! couplings, reduced maps in Kraus form, the commutation of reduced maps with
//! free system evolution, and the short-time expansion of that commutator for
//! general couplings.
//!
//! Tensor products put the system factor first (system index slowest).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::linalg::{
    self, c64, commutator, ensure_hermitian, ensure_square, kron, partial_trace_env, random_hermitian,
    thermal_state, unitary_propagator, validate_density, HermitianEigen, Operator, StateTolerance,
};
use crate::liouville::{conjugation_superop, SuperOperator};
use crate::presets;

/// Hamiltonian and stationary-state data of a system coupled to a finite
/// environment.
#[derive(Clone, Debug)]
pub struct CompositeModel {
    pub h_s: Operator,
    pub h_e: Operator,
    /// Interaction on the product space.
    pub h_se: Operator,
    pub rho_e: Operator,
}

impl CompositeModel {
    /// Validates Hermiticity and dimensions. A non-stationary `rho_e` or a
    /// non-conserving coupling is accepted; see the defect accessors.
    pub fn new(h_s: Operator, h_e: Operator, h_se: Operator, rho_e: Operator) -> Result<Self> {
        let n = ensure_square(&h_s)?;
        let m = ensure_square(&h_e)?;
        ensure_hermitian(&h_s, "system Hamiltonian", 1e-12)?;
        ensure_hermitian(&h_e, "environment Hamiltonian", 1e-12)?;
        if ensure_square(&h_se)? != n * m {
            return Err(Error::dim(n * m, h_se.nrows()));
        }
        ensure_hermitian(&h_se, "interaction Hamiltonian", 1e-12)?;
        if ensure_square(&rho_e)? != m {
            return Err(Error::dim(m, rho_e.nrows()));
        }
        validate_density(&rho_e, StateTolerance::default())?;
        Ok(CompositeModel { h_s, h_e, h_se, rho_e })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.h_s.nrows(), self.h_e.nrows())
    }

    /// `H_S⊗I + I⊗H_E`.
    pub fn free_hamiltonian(&self) -> Operator {
        let (n, m) = self.dims();
        kron(&self.h_s, &Operator::identity(m, m)) + kron(&Operator::identity(n, n), &self.h_e)
    }

    pub fn total_hamiltonian(&self) -> Operator {
        self.free_hamiltonian() + &self.h_se
    }

    /// `H_S⊗I`.
    pub fn system_hamiltonian_lifted(&self) -> Operator {
        let m = self.dims().1;
        kron(&self.h_s, &Operator::identity(m, m))
    }

    /// `‖[ρ_E, H_E]‖_F`.
    pub fn stationarity_defect(&self) -> f64 {
        commutator(&self.rho_e, &self.h_e).norm()
    }

    /// `‖[H_SE, H_S⊗I + I⊗H_E]‖_F`.
    pub fn conservation_defect(&self) -> f64 {
        commutator(&self.h_se, &self.free_hamiltonian()).norm()
    }

    pub fn is_strict(&self, tol: f64) -> bool {
        self.conservation_defect() <= tol
    }

    pub fn lift_state(&self, rho_s: &Operator) -> Operator {
        kron(rho_s, &self.rho_e)
    }
}

/// Output of [`build_strict_coupling`].
#[derive(Clone, Debug)]
pub struct StrictCoupling {
    pub h_se: Operator,
    /// `‖[H_SE, H_S⊗I + I⊗H_E]‖_F`.
    pub conservation_defect: f64,
    /// Set when the coupling commutes with `H_S⊗I`, so it cannot move
    /// population between system levels (pure dephasing at most).
    pub no_transitions: bool,
}

/// Random interaction commuting with `H_S⊗I + I⊗H_E`, with Frobenius norm
/// `strength` and no identity component.
pub fn build_strict_coupling(h_s: &Operator, h_e: &Operator, strength: f64, seed: u64) -> Result<StrictCoupling> {
    ensure_hermitian(h_s, "system Hamiltonian", 1e-12)?;
    ensure_hermitian(h_e, "environment Hamiltonian", 1e-12)?;
    if !strength.is_finite() || strength < 0.0 {
        return Err(Error::InvalidArgument(format!("coupling strength must be non-negative, got {strength}")));
    }
    let (n, m) = (h_s.nrows(), h_e.nrows());
    let dim = n * m;
    let h0 = kron(h_s, &Operator::identity(m, m)) + kron(&Operator::identity(n, n), h_e);
    let eig = HermitianEigen::new(&h0);
    let scale = eig.values.iter().fold(1.0f64, |a, &e| a.max(e.abs()));
    let tol = 1e-9 * scale;
    let mut cluster = vec![0usize; dim];
    for k in 1..dim {
        cluster[k] = cluster[k - 1] + usize::from(eig.values[k] - eig.values[k - 1] > tol);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_hermitian(&mut rng, dim);
    let w = &eig.vectors;
    let mut block = w.adjoint() * g * w;
    for i in 0..dim {
        for j in 0..dim {
            if cluster[i] != cluster[j] {
                block[(i, j)] = c64(0.0, 0.0);
            }
        }
    }
    let mean = block.trace() / c64(dim as f64, 0.0);
    for i in 0..dim {
        block[(i, i)] -= mean;
    }
    let mut h_se = linalg::hermitian_part(&(w * block * w.adjoint()));
    let norm = h_se.norm();
    if norm > 0.0 {
        h_se *= c64(strength / norm, 0.0);
    }
    let conservation_defect = commutator(&h_se, &h0).norm();
    let lifted = kron(h_s, &Operator::identity(m, m));
    let no_transitions = commutator(&h_se, &lifted).norm() <= 1e-12 * strength.max(1.0) * scale;
    Ok(StrictCoupling { h_se, conservation_defect, no_transitions })
}

#[derive(Clone, Debug)]
pub struct KrausSet {
    pub operators: Vec<Operator>,
    /// `‖Σ K†K − I‖_F`.
    pub completeness_defect: f64,
}

impl KrausSet {
    pub fn apply(&self, rho: &Operator) -> Operator {
        let n = rho.nrows();
        self.operators.iter().fold(Operator::zeros(n, n), |acc, k| acc + k * rho * k.adjoint())
    }
}

#[derive(Clone, Debug)]
pub struct ReducedMap {
    pub kraus: KrausSet,
    /// `Σ conj(K)⊗K`.
    pub superoperator: SuperOperator,
}

/// Exact reduced map at time `t` from `K_ij = √λ_i ⟨χ_j|U|χ_i⟩`, where
/// `ρ_E = Σ λ_i |χ_i⟩⟨χ_i|` and `U = e^{−iHt}`.
pub fn reduced_map(model: &CompositeModel, t: f64) -> Result<ReducedMap> {
    let u = unitary_propagator(&HermitianEigen::new(&model.total_hamiltonian()), t);
    Ok(reduced_map_from_unitary(model, &u))
}

fn reduced_map_from_unitary(model: &CompositeModel, u: &Operator) -> ReducedMap {
    let (n, m) = model.dims();
    let env = HermitianEigen::new(&model.rho_e);
    let mut operators = Vec::new();
    for (i, &lambda) in env.values.iter().enumerate() {
        if lambda <= 0.0 {
            continue;
        }
        let weight = lambda.sqrt();
        let chi_i = env.vectors.column(i);
        for j in 0..m {
            let chi_j = env.vectors.column(j);
            let k = Operator::from_fn(n, n, |s, sp| {
                let mut acc = c64(0.0, 0.0);
                for e in 0..m {
                    for ep in 0..m {
                        acc += chi_j[e].conj() * u[(s * m + e, sp * m + ep)] * chi_i[ep];
                    }
                }
                acc * weight
            });
            operators.push(k);
        }
    }
    let gram = operators.iter().fold(Operator::zeros(n, n), |acc, k| acc + k.adjoint() * k);
    let completeness_defect = (gram - Operator::identity(n, n)).norm();
    let matrix = operators
        .iter()
        .fold(Operator::zeros(n * n, n * n), |acc, k| acc + kron(&k.map(|z| z.conj()), k));
    let superoperator = SuperOperator::from_matrix(matrix).expect("square by construction");
    ReducedMap { kraus: KrausSet { operators, completeness_defect }, superoperator }
}

/// `tr_E(U (ρ_S⊗ρ_E) U†)` computed on the full product space.
pub fn direct_reduced_evolution(model: &CompositeModel, rho_s: &Operator, t: f64) -> Result<Operator> {
    let (n, m) = model.dims();
    if ensure_square(rho_s)? != n {
        return Err(Error::dim(n, rho_s.nrows()));
    }
    let u = unitary_propagator(&HermitianEigen::new(&model.total_hamiltonian()), t);
    let full = &u * model.lift_state(rho_s) * u.adjoint();
    Ok(partial_trace_env(&full, n, m))
}

/// `‖Λ̃_t Ũ_S(t) − Ũ_S(t) Λ̃_t‖_F`.
pub fn theorem1_defect(model: &CompositeModel, t: f64) -> Result<f64> {
    let lambda = reduced_map(model, t)?.superoperator;
    let u_s = conjugation_superop(&unitary_propagator(&HermitianEigen::new(&model.h_s), t))?;
    Ok(lambda.commutator(&u_s)?.norm())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Theorem1Point {
    pub model: usize,
    pub t: f64,
    pub defect: f64,
}

/// Evaluates every `(model, t)` pair; output is in model-major order.
pub fn theorem1_sweep(models: &[CompositeModel], times: &[f64], exec: Execution) -> Result<Vec<Theorem1Point>> {
    let jobs: Vec<(usize, f64)> = (0..models.len()).flat_map(|i| times.iter().map(move |&t| (i, t))).collect();
    exec::map(exec, &jobs, |&(model, t)| Ok(Theorem1Point { model, t, defect: theorem1_defect(&models[model], t)? }))
        .into_iter()
        .collect()
}

/// Two qubits with gap `omega` each, coupled by `g (σ₊⊗σ₋ + σ₋⊗σ₊)`, thermal
/// environment at `beta`.
pub fn resonant_exchange_model(omega: f64, g: f64, beta: f64) -> Result<CompositeModel> {
    let exchange =
        kron(&presets::sigma_plus(), &presets::sigma_minus()) + kron(&presets::sigma_minus(), &presets::sigma_plus());
    let h_e = presets::qubit(omega);
    let rho_e = thermal_state(&h_e, beta);
    CompositeModel::new(presets::qubit(omega), h_e, exchange * c64(g, 0.0), rho_e)
}

/// Two qubits with gap `omega` coupled by `g σx⊗σx`, which does not conserve
/// the free energy.
pub fn sigma_x_coupled_model(omega: f64, g: f64, beta: f64) -> Result<CompositeModel> {
    let h_e = presets::qubit(omega);
    let rho_e = thermal_state(&h_e, beta);
    CompositeModel::new(
        presets::qubit(omega),
        h_e,
        kron(&presets::sigma_x(), &presets::sigma_x()) * c64(g, 0.0),
        rho_e,
    )
}

/// Random model whose system and environment spectra are integer multiples of
/// a common gap (so strict couplings can exchange energy), in random bases,
/// with a strict coupling and a thermal environment.
pub fn random_resonant_model(n: usize, m: usize, beta: f64, strength: f64, seed: u64) -> Result<CompositeModel> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("dimensions must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gap: f64 = rng.random_range(0.5..1.5);
    let ladder = |k: usize, rng: &mut ChaCha8Rng| -> Operator {
        let mut levels = vec![0.0; k];
        for i in 1..k {
            levels[i] = levels[i - 1] + gap * rng.random_range(1..=2) as f64;
        }
        let rotation = unitary_propagator(&HermitianEigen::new(&random_hermitian(rng, k)), 1.0);
        linalg::hermitian_part(&(&rotation * linalg::diag(&levels) * rotation.adjoint()))
    };
    let h_s = ladder(n, &mut rng);
    let h_e = ladder(m, &mut rng);
    let coupling = build_strict_coupling(&h_s, &h_e, strength, rng.random())?;
    let rho_e = thermal_state(&h_e, beta);
    CompositeModel::new(h_s, h_e, coupling.h_se, rho_e)
}

/// Short-time commutator scan of a (generally non-conserving) model.
#[derive(Clone, Debug, Serialize)]
pub struct TauScan {
    pub taus: Vec<f64>,
    pub defects: Vec<f64>,
    /// Log-log slope over the interior of the grid; absent for strictly
    /// conserving models.
    pub fitted_slope: Option<f64>,
    /// Grid indices used for the slope fit.
    pub slope_points: Vec<usize>,
    /// `lim defect/τ³` from a quadratic fit in τ over the four largest τ.
    pub tau3_coefficient: Option<f64>,
    pub upsilon_norm: f64,
    pub xi_norm: f64,
    /// `‖[H', H_S⊗I]‖_F`.
    pub x_norm: f64,
    /// `‖tr_E(ρX − Xρ)‖_F`, the second-order coefficient. It vanishes when the
    /// coupling has no environment mean field; otherwise the defect is O(τ²).
    pub tau2_norm: f64,
    /// Relative mismatch between the fitted τ³ coefficient and `‖Υ‖`.
    pub tau3_relative_mismatch: Option<f64>,
    pub strict_conserving: bool,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub upsilon: Operator,
    #[serde(skip)]
    pub xi: Operator,
}

/// Defects below this are treated as exact commutation.
pub const STRICT_DEFECT_FLOOR: f64 = 1e-14;

/// Eight geometric points from 1e-2 down to 1e-4.
pub fn default_tau_grid() -> Vec<f64> {
    (0..8).map(|k| 10f64.powf(-2.0 - 2.0 * k as f64 / 7.0)).collect()
}

/// Third- and fourth-order coefficients of the commutator defect, with
/// `K = H' + H_S⊗I`, `X = [H', H_S⊗I]`, `ρ = ρ_S⊗ρ_E`:
/// `Υ = −i tr_E(KρX + XρK)` and `Ξ = tr_E(XρH'H_S − H_S H'ρX − XρX)`.
pub fn higher_order_terms(model: &CompositeModel, rho_s: &Operator) -> (Operator, Operator) {
    let (n, m) = model.dims();
    let h = model.total_hamiltonian();
    let hs = model.system_hamiltonian_lifted();
    let rho = model.lift_state(rho_s);
    let x = commutator(&h, &hs);
    let k = &h + &hs;
    let minus_i = c64(0.0, -1.0);
    let upsilon = (&k * &rho * &x + &x * &rho * &k) * minus_i;
    let xi = &x * &rho * &h * &hs - &hs * &h * &rho * &x - &x * &rho * &x;
    (partial_trace_env(&upsilon, n, m), partial_trace_env(&xi, n, m))
}

/// `tr_E(ρX − Xρ)` with `X = [H', H_S⊗I]`.
pub fn second_order_term(model: &CompositeModel, rho_s: &Operator) -> Operator {
    let (n, m) = model.dims();
    let x = commutator(&model.total_hamiltonian(), &model.system_hamiltonian_lifted());
    let rho = model.lift_state(rho_s);
    partial_trace_env(&(&rho * &x - &x * &rho), n, m)
}

fn scan_defect(model: &CompositeModel, h_eig: &HermitianEigen, hs_eig: &HermitianEigen, rho_s: &Operator, tau: f64) -> f64 {
    let u = unitary_propagator(h_eig, tau);
    let u_s = unitary_propagator(hs_eig, tau);
    let map = reduced_map_from_unitary(model, &u).kraus;
    let rotated = &u_s * rho_s * u_s.adjoint();
    let lhs = map.apply(&rotated);
    let rhs = &u_s * map.apply(rho_s) * u_s.adjoint();
    (lhs - rhs).norm()
}

/// Least-squares polynomial fit `y ≈ Σ c_k x^k`, returning the coefficients.
fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Option<Vec<f64>> {
    let rows = x.len();
    let cols = degree + 1;
    if rows < cols {
        return None;
    }
    let a = nalgebra::DMatrix::from_fn(rows, cols, |r, c| x[r].powi(c as i32));
    let b = nalgebra::DVector::from_column_slice(y);
    let sol = a.svd(true, true).solve(&b, 1e-14).ok()?;
    Some(sol.iter().copied().collect())
}

pub fn tau_expansion(model: &CompositeModel, rho_s: &Operator, taus: &[f64], exec: Execution) -> Result<TauScan> {
    let (n, _) = model.dims();
    if ensure_square(rho_s)? != n {
        return Err(Error::dim(n, rho_s.nrows()));
    }
    validate_density(rho_s, StateTolerance::default())?;
    if taus.is_empty() || taus.iter().any(|&t| !t.is_finite() || t <= 0.0) {
        return Err(Error::InvalidArgument("tau grid must be non-empty and positive".into()));
    }
    if taus.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("tau grid must be strictly decreasing".into()));
    }
    let h = model.total_hamiltonian();
    let h_eig = HermitianEigen::new(&h);
    let hs_eig = HermitianEigen::new(&model.h_s);
    let mut warnings = Vec::new();
    let h_scale = h_eig.values.iter().fold(0.0f64, |a, &e| a.max(e.abs()));
    if taus[0] * h_scale > 0.1 {
        warnings.push(format!("largest tau {:.3e} is not small against 1/‖H‖ = {:.3e}", taus[0], 1.0 / h_scale));
    }
    if model.stationarity_defect() > 1e-12 {
        warnings.push("environment state is not stationary".into());
    }

    let defects = exec::map(exec, taus, |&tau| scan_defect(model, &h_eig, &hs_eig, rho_s, tau));
    let strict_conserving = defects.iter().all(|&d| d < STRICT_DEFECT_FLOOR);

    let slope_points: Vec<usize> =
        if taus.len() >= 4 { (1..taus.len() - 1).collect() } else { (0..taus.len()).collect() };
    let fitted_slope = if strict_conserving || slope_points.len() < 2 {
        None
    } else {
        let lx: Vec<f64> = slope_points.iter().map(|&i| taus[i].ln()).collect();
        let ly: Vec<f64> = slope_points.iter().map(|&i| defects[i].max(f64::MIN_POSITIVE).ln()).collect();
        polyfit(&lx, &ly, 1).map(|c| c[1])
    };

    let tau3_coefficient = if strict_conserving || taus.len() < 4 {
        None
    } else {
        let x: Vec<f64> = taus[..4].to_vec();
        let y: Vec<f64> = (0..4).map(|i| defects[i] / taus[i].powi(3)).collect();
        polyfit(&x, &y, 2).map(|c| c[0])
    };

    let (upsilon, xi) = higher_order_terms(model, rho_s);
    let tau2_norm = second_order_term(model, rho_s).norm();
    if tau2_norm > 1e-12 {
        warnings.push(format!("second-order term is non-zero ({tau2_norm:.3e}); leading order is tau^2"));
    }
    let upsilon_norm = upsilon.norm();
    let tau3_relative_mismatch = match tau3_coefficient {
        Some(c) if upsilon_norm > 0.0 => Some((c - upsilon_norm).abs() / upsilon_norm),
        _ => None,
    };
    Ok(TauScan {
        taus: taus.to_vec(),
        defects,
        fitted_slope,
        slope_points,
        tau3_coefficient,
        upsilon_norm,
        xi_norm: xi.norm(),
        x_norm: commutator(&h, &model.system_hamiltonian_lifted()).norm(),
        tau2_norm,
        tau3_relative_mismatch,
        strict_conserving,
        warnings,
        upsilon,
        xi,
    })
}

/// Seeded random system state for experiments.
pub fn seeded_system_state(n: usize, seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    linalg::random_density(&mut rng, n)
}
