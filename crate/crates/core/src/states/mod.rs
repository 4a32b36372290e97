//! The two families of PPT bound-entangled states on `(2d)×(2d)` systems,
//! their building blocks, and the operators used to probe them.
//!
//! All states are built in the subsystem order `A B A' B'` (two qubits `A`, `B`
//! followed by two `d`-dimensional parts `A'`, `B'`) and reordered on request.

mod f1;
mod f2;
mod four_by_four;
mod operators;
mod private_bit;
mod qfamily;
mod unitary;

use std::fmt;

pub use f1::build_rho_f1;
pub use f2::{build_rho_f2, default_q_family, f2_supported, rho_f2, F2_SUPPORTED};
pub use four_by_four::{
    build_rho_4x4, four_by_four_dims, hamiltonian_4x4, psi_states, relabel_to_4x4,
    relabel_vector_to_4x4,
};
pub use operators::{
    flip_operator, hamiltonian_for, hamiltonian_h, local_hamiltonians, local_terms_for,
    maximally_entangled_state, reorder_subsystems, sym_antisym_split, white_noise_mix,
    SymmetrySplit,
};
pub use private_bit::{
    build_private_bit, f1_from_private_bits, shield_x, shield_y, trace_norm, KeyFlip,
};
pub use qfamily::{p_family, p_matrices, q_family_d3, QFamily, QKind};
pub use unitary::{fourier_unitary, hadamard_unitary};

use crate::error::{Error, Result};
use crate::linalg::{permute_vector, ComplexMatrix, SubsystemDims, C64};

/// `p₁ = √d/(1+√d)`.
pub fn p1(d: usize) -> f64 {
    let s = (d as f64).sqrt();
    s / (1.0 + s)
}

/// `p₂ = 1 − p₁ = 1/(1+√d)`.
pub fn p2(d: usize) -> f64 {
    1.0 / (1.0 + (d as f64).sqrt())
}

/// Index of the basis ket `|a b i j⟩` in the `A B A' B'` order.
pub(crate) fn ket_index(d: usize, a: usize, b: usize, i: usize, j: usize) -> usize {
    ((a * 2 + b) * d + i) * d + j
}

pub(crate) fn ket(d: usize, a: usize, b: usize, i: usize, j: usize) -> Vec<C64> {
    crate::linalg::basis_vector(4 * d * d, ket_index(d, a, b, i, j))
}

/// Choice of the flat unitary `u` in the first family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitaryKind {
    Fourier,
    /// Real symmetric Hadamard; requires `d` a power of two.
    Hadamard,
}

impl fmt::Display for UnitaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitaryKind::Fourier => "fourier",
            UnitaryKind::Hadamard => "hadamard",
        })
    }
}

/// Parameters of a first-family state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct F1Spec {
    pub d: usize,
    pub unitary: UnitaryKind,
}

impl F1Spec {
    pub fn new(d: usize, unitary: UnitaryKind) -> Result<Self> {
        let spec = Self { d, unitary };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fourier(d: usize) -> Self {
        Self {
            d,
            unitary: UnitaryKind::Fourier,
        }
    }

    /// Hadamard when `d` is a power of two (the flip-invariant choice), Fourier otherwise.
    pub fn permutation_invariant_if_possible(d: usize) -> Self {
        let unitary = if d.is_power_of_two() {
            UnitaryKind::Hadamard
        } else {
            UnitaryKind::Fourier
        };
        Self { d, unitary }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::UnsupportedDimension {
                d: self.d,
                family: "F1",
                supported: "d >= 2",
            });
        }
        if self.unitary == UnitaryKind::Hadamard && !self.d.is_power_of_two() {
            return Err(Error::UnsupportedDimension {
                d: self.d,
                family: "F1 with Hadamard unitary",
                supported: "d = 2^n, n >= 1",
            });
        }
        Ok(())
    }

    pub fn unitary_matrix(&self) -> ComplexMatrix {
        match self.unitary {
            UnitaryKind::Fourier => fourier_unitary(self.d),
            UnitaryKind::Hadamard => hadamard_unitary(self.d.trailing_zeros()),
        }
    }
}

/// Subsystem order of an emitted state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubsystemOrder {
    /// `A B A' B'`.
    #[default]
    KeyShield,
    /// `A A' B B'`, grouping each party's qubit with its qudit.
    Bipartite,
}

impl SubsystemOrder {
    pub fn dims(&self, d: usize) -> SubsystemDims {
        match self {
            SubsystemOrder::KeyShield => SubsystemDims::key_shield(d),
            SubsystemOrder::Bipartite => SubsystemDims::bipartite(d),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            SubsystemOrder::KeyShield => "ABA'B'",
            SubsystemOrder::Bipartite => "AA'BB'",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    F1(UnitaryKind),
    F2,
    FourByFour,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::F1(u) => write!(f, "F1({u})"),
            Family::F2 => f.write_str("F2"),
            Family::FourByFour => f.write_str("4x4"),
        }
    }
}

/// A named vector with its documented eigenvalue.
#[derive(Debug, Clone)]
pub struct LabeledVector {
    pub label: String,
    pub eigenvalue: f64,
    pub vector: Vec<C64>,
}

impl LabeledVector {
    fn new(label: impl Into<String>, eigenvalue: f64, vector: Vec<C64>) -> Self {
        Self {
            label: label.into(),
            eigenvalue,
            vector,
        }
    }

    /// `‖ρψ − λψ‖`.
    pub fn eigen_residual(&self, rho: &ComplexMatrix) -> f64 {
        let rv = rho.mat_vec(&self.vector);
        rv.iter()
            .zip(&self.vector)
            .map(|(a, b)| (a - b * self.eigenvalue).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// A constructed state with its dimensions and documented eigenvectors.
#[derive(Debug, Clone)]
pub struct StateBundle {
    pub rho: ComplexMatrix,
    pub dims: SubsystemDims,
    pub family: Family,
    /// Eigenvectors with nonzero eigenvalue (`v_ij`, `w_i` or `z_ij`, `s_i`, `|10ii⟩`).
    pub eigvecs_nonzero: Vec<LabeledVector>,
    /// Named eigenvectors with zero eigenvalue (`v⁻_ij`, `w⁻_i` or `z⁻_ij`).
    pub eigvecs_zero_named: Vec<LabeledVector>,
}

impl StateBundle {
    pub fn find(&self, label: &str) -> Option<&LabeledVector> {
        self.eigvecs_nonzero
            .iter()
            .chain(&self.eigvecs_zero_named)
            .find(|v| v.label == label)
    }

    /// Reorders the matrix and all labelled vectors into `order`.
    pub(crate) fn reordered(mut self, d: usize, order: SubsystemOrder) -> Result<Self> {
        let target = order.dims(d);
        if target == self.dims {
            return Ok(self);
        }
        let perm = self.dims.permutation_to(&target)?;
        let (rho, dims) = crate::linalg::permute_subsystems(&self.rho, &self.dims, &perm)?;
        for v in self
            .eigvecs_nonzero
            .iter_mut()
            .chain(self.eigvecs_zero_named.iter_mut())
        {
            v.vector = permute_vector(&v.vector, &self.dims, &perm)?;
        }
        self.rho = rho;
        self.dims = dims;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        for d in 1..50 {
            assert!((p1(d) + p2(d) - 1.0).abs() < 1e-15);
            assert!((p1(d) / (d as f64).sqrt() - p2(d)).abs() < 1e-15);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(F1Spec::new(1, UnitaryKind::Fourier).is_err());
        assert!(F1Spec::new(3, UnitaryKind::Hadamard).is_err());
        assert!(F1Spec::new(8, UnitaryKind::Hadamard).is_ok());
        assert_eq!(
            F1Spec::permutation_invariant_if_possible(4).unitary,
            UnitaryKind::Hadamard
        );
        assert_eq!(
            F1Spec::permutation_invariant_if_possible(6).unitary,
            UnitaryKind::Fourier
        );
    }
}
