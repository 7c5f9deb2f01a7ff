//! Liouville-space machinery: vectorization, the Hilbert–Schmidt inner
//! product, superoperator assembly and the eigenoperator basis of a system
//! Hamiltonian.
//!
//! Vectorization is column-stacking: element `(i, j)` of an `N×N` operator
//! lands at index `i + N·j`. With this convention
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`, and every assembly kind below is derived
//! from that identity.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, ensure_hermitian, ensure_same_dim, ensure_square, LiouvilleVector, Operator};

pub fn vectorize(a: &Operator) -> LiouvilleVector {
    // nalgebra stores matrices column-major, which is exactly column stacking.
    DVector::from_column_slice(a.as_slice())
}

pub fn devectorize(v: &LiouvilleVector) -> Result<Operator> {
    let n = perfect_sqrt(v.len()).ok_or(Error::NotSquareLength(v.len()))?;
    Ok(Operator::from_column_slice(n, n, v.as_slice()))
}

fn perfect_sqrt(len: usize) -> Option<usize> {
    let n = (len as f64).sqrt().round() as usize;
    (n * n == len).then_some(n)
}

/// Hilbert–Schmidt inner product `tr(A†B)`.
pub fn hs_inner(a: &Operator, b: &Operator) -> Result<Complex64> {
    ensure_same_dim(a, b)?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

pub(crate) fn hs(a: &Operator, b: &Operator) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// An `N²×N²` matrix acting on column-stacked operators.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    matrix: Operator,
}

impl SuperOperator {
    pub fn from_matrix(matrix: Operator) -> Result<Self> {
        let rows = ensure_square(&matrix)?;
        let dim = perfect_sqrt(rows).ok_or(Error::NotSquareLength(rows))?;
        Ok(SuperOperator { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        SuperOperator { dim, matrix: Operator::identity(dim * dim, dim * dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        SuperOperator { dim, matrix: Operator::zeros(dim * dim, dim * dim) }
    }

    /// Dimension `N` of the underlying Hilbert space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn into_matrix(self) -> Operator {
        self.matrix
    }

    pub fn apply_vec(&self, v: &LiouvilleVector) -> Result<LiouvilleVector> {
        if v.len() != self.matrix.ncols() {
            return Err(Error::dim(self.matrix.ncols(), v.len()));
        }
        Ok(&self.matrix * v)
    }

    pub fn apply(&self, a: &Operator) -> Result<Operator> {
        if a.nrows() != self.dim || a.ncols() != self.dim {
            return Err(Error::dim(self.dim, a.nrows()));
        }
        devectorize(&(&self.matrix * vectorize(a)))
    }

    /// `self ∘ other`, i.e. `other` acts first.
    pub fn compose(&self, other: &SuperOperator) -> Result<SuperOperator> {
        self.check_dim(other)?;
        Ok(SuperOperator { dim: self.dim, matrix: &self.matrix * &other.matrix })
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &SuperOperator) -> Result<SuperOperator> {
        self.check_dim(other)?;
        Ok(SuperOperator {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        })
    }

    pub fn scale(&self, factor: Complex64) -> SuperOperator {
        SuperOperator { dim: self.dim, matrix: &self.matrix * factor }
    }

    /// Adjoint with respect to the Hilbert–Schmidt product (Heisenberg picture).
    pub fn adjoint(&self) -> SuperOperator {
        SuperOperator { dim: self.dim, matrix: self.matrix.adjoint() }
    }

    /// Frobenius norm of the `N²×N²` matrix.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// `exp(self · t)` via Padé scaling-and-squaring.
    pub fn exp(&self, t: f64) -> SuperOperator {
        SuperOperator { dim: self.dim, matrix: linalg::expm(&(&self.matrix * c64(t, 0.0))) }
    }

    fn check_dim(&self, other: &SuperOperator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::dim(self.dim, other.dim));
        }
        Ok(())
    }
}

impl Add for &SuperOperator {
    type Output = SuperOperator;

    fn add(self, rhs: &SuperOperator) -> SuperOperator {
        assert_eq!(self.dim, rhs.dim, "superoperator dimensions differ");
        SuperOperator { dim: self.dim, matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &SuperOperator {
    type Output = SuperOperator;

    fn sub(self, rhs: &SuperOperator) -> SuperOperator {
        assert_eq!(self.dim, rhs.dim, "superoperator dimensions differ");
        SuperOperator { dim: self.dim, matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul<f64> for &SuperOperator {
    type Output = SuperOperator;

    fn mul(self, rhs: f64) -> SuperOperator {
        self.scale(c64(rhs, 0.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuperOpKind {
    /// `X ↦ A X`
    Left,
    /// `X ↦ X A`
    Right,
    /// `X ↦ A X B`
    Sandwich,
    /// `X ↦ [A, X]`
    Commutator,
    /// `X ↦ {A, X}`
    Anticommutator,
    /// `X ↦ A X A† − ½{A†A, X}`
    DissipatorTerm,
}

impl SuperOpKind {
    fn name(self) -> &'static str {
        match self {
            SuperOpKind::Left => "left",
            SuperOpKind::Right => "right",
            SuperOpKind::Sandwich => "sandwich",
            SuperOpKind::Commutator => "commutator",
            SuperOpKind::Anticommutator => "anticommutator",
            SuperOpKind::DissipatorTerm => "dissipator_term",
        }
    }
}

impl fmt::Display for SuperOpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn assemble_superop(kind: SuperOpKind, a: &Operator, b: Option<&Operator>) -> Result<SuperOperator> {
    let n = ensure_square(a)?;
    let id = Operator::identity(n, n);
    let left = |x: &Operator| id.kronecker(x);
    let right = |x: &Operator| x.transpose().kronecker(&id);
    let matrix = match kind {
        SuperOpKind::Left => left(a),
        SuperOpKind::Right => right(a),
        SuperOpKind::Sandwich => {
            let b = b.ok_or(Error::MissingOperand(kind.name()))?;
            ensure_same_dim(a, b)?;
            b.transpose().kronecker(a)
        }
        SuperOpKind::Commutator => left(a) - right(a),
        SuperOpKind::Anticommutator => left(a) + right(a),
        SuperOpKind::DissipatorTerm => {
            let ada = a.adjoint() * a;
            a.conjugate().kronecker(a) - (left(&ada) + right(&ada)) * c64(0.5, 0.0)
        }
    };
    Ok(SuperOperator { dim: n, matrix })
}

/// `−i[H, •]`, the generator of free evolution.
pub fn hamiltonian_superop(h: &Operator) -> Result<SuperOperator> {
    Ok(assemble_superop(SuperOpKind::Commutator, h, None)?.scale(c64(0.0, -1.0)))
}

/// `X ↦ U X U†`.
pub fn conjugation_superop(u: &Operator) -> Result<SuperOperator> {
    assemble_superop(SuperOpKind::Sandwich, u, Some(&u.adjoint()))
}

/// Choi matrix `Σ_kl |k⟩⟨l| ⊗ S(|k⟩⟨l|)`: row `i + N·k`, column `j + N·l`
/// holds element `(i, j)` of the image of `|k⟩⟨l|`. Positive semidefinite
/// exactly when the map is completely positive.
pub fn choi_matrix(s: &SuperOperator) -> Operator {
    let n = s.dim();
    let m = s.matrix();
    Operator::from_fn(n * n, n * n, |row, col| {
        let (i, k) = (row % n, row / n);
        let (j, l) = (col % n, col / n);
        m[(i + n * j, k + n * l)]
    })
}

/// Energy eigen-decomposition of a system Hamiltonian.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending energies `ε_n`.
    pub energies: Vec<f64>,
    /// Columns are `|n⟩`, phase-fixed so the largest component is real positive.
    pub eigenvectors: Operator,
    pub degeneracy_tol: f64,
}

impl Spectrum {
    pub fn new(h: &Operator, degeneracy_tol: Option<f64>) -> Result<Self> {
        let n = ensure_square(h)?;
        ensure_hermitian(h, "Hamiltonian", 1e-12 * h.norm().max(1.0))?;
        let eig = linalg::HermitianEigen::new(h);
        let mut vectors = eig.vectors;
        for mut col in vectors.column_iter_mut() {
            let mut best = 0;
            let mut best_mag = -1.0;
            for (i, z) in col.iter().enumerate() {
                if z.norm() > best_mag * (1.0 + 1e-12) {
                    best = i;
                    best_mag = z.norm();
                }
            }
            let phase = col[best].conj() / best_mag;
            col *= phase;
        }
        let scale = eig.values.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let tol = degeneracy_tol.unwrap_or(1e-9 * if scale > 0.0 { scale } else { 1.0 });
        debug_assert_eq!(eig.values.len(), n);
        Ok(Spectrum { energies: eig.values, eigenvectors: vectors, degeneracy_tol: tol })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn ket(&self, n: usize) -> DVector<Complex64> {
        self.eigenvectors.column(n).into_owned()
    }

    /// `|n⟩⟨m|`.
    pub fn ket_bra(&self, n: usize, m: usize) -> Operator {
        linalg::outer(&self.ket(n), &self.ket(m))
    }

    pub fn projector(&self, n: usize) -> Operator {
        self.ket_bra(n, n)
    }

    /// `Σ ε_n Π_n`.
    pub fn reconstruct(&self) -> Operator {
        let n = self.dim();
        let scaled = Operator::from_fn(n, n, |r, c| self.eigenvectors[(r, c)] * self.energies[c]);
        scaled * self.eigenvectors.adjoint()
    }

    /// Matrix of `op` in the energy eigenbasis, `⟨n|op|m⟩`.
    pub fn to_energy_basis(&self, op: &Operator) -> Operator {
        self.eigenvectors.adjoint() * op * &self.eigenvectors
    }

    pub fn from_energy_basis(&self, op: &Operator) -> Operator {
        &self.eigenvectors * op * self.eigenvectors.adjoint()
    }
}

/// Transition operator `F = |to⟩⟨from|` with Bohr frequency `ε_from − ε_to`.
#[derive(Clone, Debug)]
pub struct Transition {
    pub to: usize,
    pub from: usize,
    pub omega: f64,
    pub operator: Operator,
    /// Index of `F†` in the transition list.
    pub conjugate: usize,
    /// Index of the Bohr-frequency group this transition belongs to.
    pub group: usize,
}

impl Transition {
    pub fn label(&self) -> String {
        format!("{}->{}", self.from, self.to)
    }
}

/// Transitions sharing one Bohr frequency (within the degeneracy tolerance).
#[derive(Clone, Debug, Serialize)]
pub struct BohrGroup {
    pub omega: f64,
    pub members: Vec<usize>,
}

/// Which invariant subspace of free evolution a basis operator lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sector {
    /// Operators left unchanged by free evolution (projectors, zero-frequency transitions).
    Invariant,
    /// Bohr-frequency group with nonzero frequency.
    Bohr(usize),
}

#[derive(Clone, Debug)]
pub struct BasisElement {
    pub operator: Operator,
    pub sector: Sector,
    pub label: String,
}

/// Eigenoperators of free evolution generated by a system Hamiltonian.
#[derive(Clone, Debug)]
pub struct EigenoperatorBasis {
    pub spectrum: Spectrum,
    pub projectors: Vec<Operator>,
    pub transitions: Vec<Transition>,
    /// Traceless, orthonormal diagonal Gell-Mann operators in the energy basis.
    pub invariants: Vec<Operator>,
    /// `I/√N`.
    pub identity: Operator,
    pub groups: Vec<BohrGroup>,
}

pub fn eigenoperator_basis(h: &Operator, degeneracy_tol: Option<f64>) -> Result<EigenoperatorBasis> {
    let spectrum = Spectrum::new(h, degeneracy_tol)?;
    let n = spectrum.dim();
    let tol = spectrum.degeneracy_tol;

    let projectors: Vec<Operator> = (0..n).map(|k| spectrum.projector(k)).collect();

    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1));
    for to in 0..n {
        for from in 0..n {
            if to != from {
                pairs.push((to, from));
            }
        }
    }
    let index_of = |to: usize, from: usize| pairs.iter().position(|&p| p == (to, from)).unwrap();

    let mut order: Vec<usize> = (0..pairs.len()).collect();
    let omega_of = |k: usize| spectrum.energies[pairs[k].1] - spectrum.energies[pairs[k].0];
    order.sort_by(|&a, &b| omega_of(a).total_cmp(&omega_of(b)));
    let mut groups: Vec<BohrGroup> = Vec::new();
    let mut group_of = vec![0usize; pairs.len()];
    let mut last: Option<f64> = None;
    for &k in &order {
        let w = omega_of(k);
        match last {
            Some(prev) if (w - prev).abs() <= tol => {
                groups.last_mut().unwrap().members.push(k);
            }
            _ => groups.push(BohrGroup { omega: 0.0, members: vec![k] }),
        }
        last = Some(w);
        group_of[k] = groups.len() - 1;
    }
    for g in &mut groups {
        g.members.sort_unstable();
        let mean = g.members.iter().map(|&k| omega_of(k)).sum::<f64>() / g.members.len() as f64;
        g.omega = if mean.abs() <= tol { 0.0 } else { mean };
    }

    let transitions = pairs
        .iter()
        .enumerate()
        .map(|(k, &(to, from))| Transition {
            to,
            from,
            omega: omega_of(k),
            operator: spectrum.ket_bra(to, from),
            conjugate: index_of(from, to),
            group: group_of[k],
        })
        .collect();

    let invariants = (1..n)
        .map(|l| {
            let norm = ((l * (l + 1)) as f64).sqrt();
            let mut g = Operator::zeros(n, n);
            for p in projectors.iter().take(l) {
                g += p;
            }
            g -= &projectors[l] * c64(l as f64, 0.0);
            g.unscale(norm)
        })
        .collect();
    let identity = Operator::identity(n, n).unscale((n as f64).sqrt());

    Ok(EigenoperatorBasis { spectrum, projectors, transitions, invariants, identity, groups })
}

impl EigenoperatorBasis {
    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.spectrum.degeneracy_tol
    }

    /// Index of `F = |to⟩⟨from|`.
    pub fn transition(&self, from: usize, to: usize) -> Option<usize> {
        self.transitions.iter().position(|t| t.from == from && t.to == to)
    }

    pub fn is_zero_frequency(&self, k: usize) -> bool {
        self.groups[self.transitions[k].group].omega == 0.0
    }

    /// Transitions with strictly positive Bohr frequency (energy-lowering jumps).
    pub fn positive_transitions(&self) -> impl Iterator<Item = (usize, &Transition)> {
        self.transitions.iter().enumerate().filter(|(_, t)| self.groups[t.group].omega > 0.0)
    }

    pub fn group_for_omega(&self, omega: f64) -> Option<usize> {
        let tol = self.degeneracy_tol().max(1e-12);
        self.groups.iter().position(|g| (g.omega - omega).abs() <= tol)
    }

    pub fn sector_of_transition(&self, k: usize) -> Sector {
        let g = self.transitions[k].group;
        if self.groups[g].omega == 0.0 {
            Sector::Invariant
        } else {
            Sector::Bohr(g)
        }
    }

    /// The complete orthonormal operator basis: normalized identity, the
    /// invariant Gell-Mann operators, then all transitions.
    pub fn orthonormal_basis(&self) -> Vec<BasisElement> {
        let mut out = Vec::with_capacity(self.dim() * self.dim());
        out.push(BasisElement { operator: self.identity.clone(), sector: Sector::Invariant, label: "I".into() });
        out.extend(self.invariants.iter().enumerate().map(|(l, g)| BasisElement {
            operator: g.clone(),
            sector: Sector::Invariant,
            label: format!("G{}", l + 1),
        }));
        out.extend(self.transitions.iter().enumerate().map(|(k, t)| BasisElement {
            operator: t.operator.clone(),
            sector: self.sector_of_transition(k),
            label: format!("F{}", t.label()),
        }));
        out
    }

    /// Traceless part of the basis in GKS order: transitions first, then the
    /// invariant operators.
    pub fn traceless_basis(&self) -> Vec<BasisElement> {
        let mut basis = self.orthonormal_basis();
        let identity = basis.remove(0);
        debug_assert_eq!(identity.label, "I");
        let invariants: Vec<_> = basis.drain(..self.invariants.len()).collect();
        basis.extend(invariants);
        basis
    }

    pub fn bohr_frequencies(&self) -> Vec<f64> {
        self.transitions.iter().map(|t| t.omega).collect()
    }
}
