//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here works on `nalgebra::DMatrix<Complex64>`. Hermitian problems
//! go through `SymmetricEigen`; general (non-normal) spectra come from the
//! complex Schur form followed by triangular back-substitution.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// A Hilbert-space operator (state, Hamiltonian, jump operator).
pub type Operator = DMatrix<Complex64>;

/// Column-stacked image of an operator in Liouville space.
pub type LiouvilleVector = DVector<Complex64>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> Operator {
    Operator::identity(n, n)
}

pub fn dagger(a: &Operator) -> Operator {
    a.adjoint()
}

pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a * b - b * a
}

pub fn anticommutator(a: &Operator, b: &Operator) -> Operator {
    a * b + b * a
}

pub fn kron(a: &Operator, b: &Operator) -> Operator {
    a.kronecker(b)
}

/// Frobenius norm.
pub fn frobenius(a: &Operator) -> f64 {
    a.norm()
}

pub fn hermiticity_defect(a: &Operator) -> f64 {
    (a - a.adjoint()).norm()
}

pub fn hermitian_part(a: &Operator) -> Operator {
    (a + a.adjoint()).scale(0.5)
}

pub fn trace(a: &Operator) -> Complex64 {
    a.trace()
}

/// Builds a real diagonal operator.
pub fn diag(values: &[f64]) -> Operator {
    let n = values.len();
    Operator::from_fn(n, n, |i, j| if i == j { c64(values[i], 0.0) } else { c64(0.0, 0.0) })
}

pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Operator {
    Operator::from_fn(rows, cols, |i, j| c64(data[i * cols + j], 0.0))
}

/// `|a⟩⟨b|` for two column vectors.
pub fn outer(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Operator {
    a * b.adjoint()
}

pub(crate) fn ensure_square(a: &Operator) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::dim(a.nrows(), a.ncols()));
    }
    Ok(a.nrows())
}

pub(crate) fn ensure_same_dim(a: &Operator, b: &Operator) -> Result<usize> {
    let n = ensure_square(a)?;
    let m = ensure_square(b)?;
    if n != m {
        return Err(Error::dim(n, m));
    }
    Ok(n)
}

pub(crate) fn ensure_finite(a: &Operator, what: &str) -> Result<()> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("{what} has non-finite entries")));
    }
    Ok(())
}

pub(crate) fn ensure_hermitian(a: &Operator, what: &str, tol: f64) -> Result<()> {
    ensure_square(a)?;
    ensure_finite(a, what)?;
    let defect = hermiticity_defect(a);
    if defect > tol {
        return Err(Error::NotHermitian { what: what.to_string(), defect });
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian operator with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the orthonormal eigenvectors, in the order of `values`.
    pub vectors: Operator,
}

impl HermitianEigen {
    pub fn new(a: &Operator) -> Self {
        let n = a.nrows();
        let eig = SymmetricEigen::new(hermitian_part(a));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = Operator::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        HermitianEigen { values, vectors }
    }

    /// Rebuilds `Σ f(λ_i) |i⟩⟨i|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Operator {
        let n = self.values.len();
        let scaled = Operator::from_fn(n, n, |r, c| self.vectors[(r, c)] * f(self.values[c]));
        scaled * self.vectors.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Eigen-decomposition of a general square matrix, `A V = V diag(values)`.
#[derive(Clone, Debug)]
pub struct Eigendecomposition {
    pub values: DVector<Complex64>,
    /// Unit-norm right eigenvectors as columns.
    pub vectors: Operator,
}

impl Eigendecomposition {
    /// Condition number of the eigenvector matrix. Large values signal a
    /// (nearly) defective matrix.
    pub fn condition_number(&self) -> f64 {
        condition_number(&self.vectors)
    }
}

/// General eigen-decomposition through the complex Schur form.
///
/// Near-coincident diagonal entries of the triangular factor are perturbed to
/// `eps·‖A‖` during back-substitution, so a defective matrix returns nearly
/// parallel eigenvectors instead of NaNs.
pub fn eig(a: &Operator) -> Result<Eigendecomposition> {
    let n = ensure_square(a)?;
    ensure_finite(a, "matrix")?;
    if n == 0 {
        return Ok(Eigendecomposition { values: DVector::zeros(0), vectors: Operator::zeros(0, 0) });
    }
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 1000 * n)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let smin = f64::EPSILON * scale;
    const BIG: f64 = 1e150;

    let mut x = Operator::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        x[(k, k)] = c64(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = c64(0.0, 0.0);
            for j in (i + 1)..=k {
                s += t[(i, j)] * x[(j, k)];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = c64(smin, 0.0);
            }
            x[(i, k)] = -s / d;
            let mag = x[(i, k)].norm();
            if mag > BIG {
                for r in i..=k {
                    x[(r, k)] /= mag;
                }
            }
        }
    }
    let mut vectors = q * x;
    for mut col in vectors.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= c64(norm, 0.0);
        }
    }
    let values = DVector::from_fn(n, |i, _| t[(i, i)]);
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    Ok(Eigendecomposition { values, vectors })
}

/// Eigenvalues only (complex Schur diagonal).
pub fn eigenvalues(a: &Operator) -> Result<DVector<Complex64>> {
    let n = ensure_square(a)?;
    ensure_finite(a, "matrix")?;
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 1000 * n.max(1))
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok(DVector::from_fn(n, |i, _| t[(i, i)]))
}

/// Singular values in descending order.
pub fn singular_values(a: &Operator) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Spectral condition number `σ_max / σ_min`.
pub fn condition_number(a: &Operator) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Matrix exponential by Padé scaling-and-squaring.
pub fn expm(a: &Operator) -> Operator {
    if a.nrows() == 0 {
        return a.clone();
    }
    a.exp()
}

/// `exp(-i H t)` for Hermitian `H`, using its spectral decomposition.
pub fn unitary_propagator(h: &HermitianEigen, t: f64) -> Operator {
    let n = h.values.len();
    let phased =
        Operator::from_fn(n, n, |r, c| h.vectors[(r, c)] * Complex64::from_polar(1.0, -h.values[c] * t));
    phased * h.vectors.adjoint()
}

/// Gibbs state `e^{-βH}/Z`, computed with the ground energy shifted to zero.
pub fn thermal_state(h: &Operator, beta: f64) -> Operator {
    let eig = HermitianEigen::new(h);
    let e0 = eig.min();
    let weights: Vec<f64> = eig.values.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let n = eig.values.len();
    let scaled = Operator::from_fn(n, n, |r, c| eig.vectors[(r, c)] * (weights[c] / z));
    scaled * eig.vectors.adjoint()
}

/// Traces out the second (environment) factor of a `dim_s·dim_e` operator,
/// with the system index running slowest.
pub fn partial_trace_env(rho: &Operator, dim_s: usize, dim_e: usize) -> Operator {
    Operator::from_fn(dim_s, dim_s, |s, sp| (0..dim_e).map(|e| rho[(s * dim_e + e, sp * dim_e + e)]).sum())
}

/// Traces out the first (system) factor.
pub fn partial_trace_sys(rho: &Operator, dim_s: usize, dim_e: usize) -> Operator {
    Operator::from_fn(dim_e, dim_e, |e, ep| (0..dim_s).map(|s| rho[(s * dim_e + e, s * dim_e + ep)]).sum())
}

/// Tolerances used to accept an operator as a density matrix.
#[derive(Clone, Copy, Debug)]
pub struct StateTolerance {
    pub trace: f64,
    pub hermiticity: f64,
    pub positivity: f64,
}

impl Default for StateTolerance {
    fn default() -> Self {
        StateTolerance { trace: 1e-12, hermiticity: 1e-12, positivity: 1e-10 }
    }
}

pub fn validate_density(rho: &Operator, tol: StateTolerance) -> Result<()> {
    ensure_square(rho)?;
    ensure_finite(rho, "density matrix")?;
    let herm = hermiticity_defect(rho);
    if herm > tol.hermiticity {
        return Err(Error::InvalidState(format!("hermiticity defect {herm:.3e}")));
    }
    let tr = rho.trace();
    if (tr - c64(1.0, 0.0)).norm() > tol.trace {
        return Err(Error::InvalidState(format!("trace {:.12} differs from 1", tr.re)));
    }
    let min = HermitianEigen::new(rho).min();
    if min < -tol.positivity {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

pub fn random_complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Operator {
    Operator::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im)
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Operator {
    hermitian_part(&random_complex_gaussian(rng, n, n))
}

/// Full-rank density matrix from the Ginibre ensemble.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Operator {
    let g = random_complex_gaussian(rng, n, n);
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    hermitian_part(&rho.unscale(tr))
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Operator {
    let psi = random_complex_gaussian(rng, n, 1);
    let norm = psi.norm();
    let psi = psi.unscale(norm);
    &psi * psi.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eig_reconstructs_random_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_complex_gaussian(&mut rng, 9, 9);
        let e = eig(&a).unwrap();
        let lhs = &a * &e.vectors;
        let rhs = &e.vectors * Operator::from_diagonal(&e.values);
        assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn eig_of_repeated_diagonal_is_well_conditioned() {
        let a = diag(&[-1.0, -1.0, -0.5, 0.0, -1.0]);
        let e = eig(&a).unwrap();
        assert!(e.condition_number() < 1.0 + 1e-8);
    }

    #[test]
    fn jordan_block_is_ill_conditioned() {
        let a = from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let e = eig(&a).unwrap();
        assert!(e.condition_number() > 1e8);
    }

    #[test]
    fn thermal_state_of_qubit() {
        let rho = thermal_state(&diag(&[-0.5, 0.5]), 1.0);
        let p0 = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((rho[(0, 0)].re - p0).abs() < 1e-15);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_traces_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_density(&mut rng, 2);
        let b = random_density(&mut rng, 3);
        let ab = kron(&a, &b);
        assert!((partial_trace_env(&ab, 2, 3) - &a).norm() < 1e-14);
        assert!((partial_trace_sys(&ab, 2, 3) - &b).norm() < 1e-14);
    }

    #[test]
    fn validate_density_rejects_bad_states() {
        assert!(validate_density(&diag(&[0.5, 0.5]), StateTolerance::default()).is_ok());
        assert!(validate_density(&diag(&[0.6, 0.5]), StateTolerance::default()).is_err());
        assert!(validate_density(&diag(&[1.5, -0.5]), StateTolerance::default()).is_err());
        let mut nonherm = diag(&[0.5, 0.5]);
        nonherm[(0, 1)] = c64(0.1, 0.0);
        assert!(validate_density(&nonherm, StateTolerance::default()).is_err());
    }
}
