//! Standard operators and the preset Hamiltonians used by the examples and
//! the command-line front end.

use crate::linalg::{c64, diag, from_real, kron, Operator};

pub fn sigma_x() -> Operator {
    from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn sigma_y() -> Operator {
    Operator::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)])
}

pub fn sigma_z() -> Operator {
    diag(&[1.0, -1.0])
}

/// `|0⟩⟨1|`
pub fn sigma_minus() -> Operator {
    from_real(2, 2, &[0.0, 1.0, 0.0, 0.0])
}

/// `|1⟩⟨0|`
pub fn sigma_plus() -> Operator {
    from_real(2, 2, &[0.0, 0.0, 1.0, 0.0])
}

/// Qubit with gap `omega`, `diag(−ω/2, ω/2)`; `|0⟩` is the ground state.
pub fn qubit(omega: f64) -> Operator {
    diag(&[-0.5 * omega, 0.5 * omega])
}

pub fn qutrit(levels: [f64; 3]) -> Operator {
    diag(&levels)
}

/// `ω₁/2 σz⊗I + ω₂/2 I⊗σz + g σx⊗σx`.
pub fn coupled_qubits(omega1: f64, omega2: f64, g: f64) -> Operator {
    let id = Operator::identity(2, 2);
    kron(&sigma_z(), &id) * c64(0.5 * omega1, 0.0)
        + kron(&id, &sigma_z()) * c64(0.5 * omega2, 0.0)
        + kron(&sigma_x(), &sigma_x()) * c64(g, 0.0)
}

/// Site-local lowering operator for [`coupled_qubits`], where `|0⟩` is the
/// upper level of each `½ωσz` term: `|1⟩⟨0|` on one site.
pub fn local_lowering(site: usize) -> Operator {
    let id = Operator::identity(2, 2);
    let lower = sigma_plus();
    match site {
        0 => kron(&lower, &id),
        _ => kron(&id, &lower),
    }
}
