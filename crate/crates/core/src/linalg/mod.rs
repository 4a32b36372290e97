//! Dense complex linear algebra: tensor products, partial transposes,
//! Hermitian eigendecomposition and matrix functions.

mod dims;
mod eig;
mod matrix;
pub mod random;

pub use dims::{partial_transpose, permute_subsystems, permute_vector, Party, SubsystemDims};
pub(crate) use eig::rank_of;
pub use eig::{hermitian_eig, hermitian_exp, is_psd, matrix_rank, unitarity_residual, EigenSystem};
pub use matrix::{basis_vector, inner, kron_vec, norm, ComplexMatrix, C64, I, ONE, ZERO};
pub use random::{gaussian_hermitian, haar_unitary, random_density, random_pure};

/// Default relative cutoff for ranks.
pub const RANK_TOL: f64 = 1e-10;
/// Default tolerance for positive semidefiniteness.
pub const PSD_TOL: f64 = 1e-10;

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca, rb, cb) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let x = a[(i, j)];
            if x == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of several factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[1.0, -1.0])
}
