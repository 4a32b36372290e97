use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron_all, pauli_x, ComplexMatrix, C64};
use crate::states::{p1, p2, F1Spec};

const TRACE_NORM_TOL: f64 = 1e-8;

fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(m)?.map_values(|x| C64::new(x.max(0.0).sqrt(), 0.0)))
}

/// Sum of singular values.
pub fn trace_norm(x: &ComplexMatrix) -> Result<f64> {
    let g = x.adjoint().matmul(x);
    Ok(hermitian_eig(&g)?
        .values
        .iter()
        .map(|s| s.max(0.0).sqrt())
        .sum())
}

/// `½[[√(XX†),0,0,X],[0,0,0,0],[0,0,0,0],[X†,0,0,√(X†X)]]` on key `AB` ⊗ shield.
pub fn build_private_bit(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = x.ensure_square()?;
    let tn = trace_norm(x)?;
    if (tn - 1.0).abs() > TRACE_NORM_TOL {
        return Err(Error::TraceNorm { trace_norm: tn });
    }
    let xxd = psd_sqrt(&x.matmul(&x.adjoint()))?;
    let xdx = psd_sqrt(&x.adjoint().matmul(x))?;
    let xd = x.adjoint();
    let mut out = ComplexMatrix::zeros(4 * n, 4 * n);
    let blocks: [(usize, usize, &ComplexMatrix); 4] =
        [(0, 0, &xxd), (0, 3, x), (3, 0, &xd), (3, 3, &xdx)];
    for (br, bc, b) in blocks {
        for r in 0..n {
            for c in 0..n {
                out[(br * n + r, bc * n + c)] = b[(r, c)] * 0.5;
            }
        }
    }
    Ok(out.hermitian_part())
}

/// `X = (1/(d√d)) Σ u_ij |ij⟩⟨ji|` on `A'B'`.
pub fn shield_x(u: &ComplexMatrix) -> ComplexMatrix {
    let d = u.rows();
    let s = 1.0 / (d as f64 * (d as f64).sqrt());
    let mut x = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            x[(i * d + j, j * d + i)] = u[(i, j)] * s;
        }
    }
    x
}

/// `Y = (1/d) Σ u_ij |ii⟩⟨jj|` on `A'B'`.
pub fn shield_y(u: &ComplexMatrix) -> ComplexMatrix {
    let d = u.rows();
    let s = 1.0 / d as f64;
    let mut y = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            y[(i * d + i, j * d + j)] = u[(i, j)] * s;
        }
    }
    y
}

/// Which key qubit is flipped to make the second private bit orthogonal to the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyFlip {
    /// `σ^x_A`; reproduces the first family only for Hermitian `u`.
    A,
    /// `σ^x_B`; reproduces the first family for every `u`.
    B,
}

/// `p₁ ρ(X) + p₂ (σ^x ⊗ 1) ρ(Y) (σ^x ⊗ 1)` in the `A B A' B'` order.
pub fn f1_from_private_bits(spec: F1Spec, flip: KeyFlip) -> Result<ComplexMatrix> {
    spec.validate()?;
    let d = spec.d;
    let u = spec.unitary_matrix();
    let bit_x = build_private_bit(&shield_x(&u))?;
    let bit_y = build_private_bit(&shield_y(&u))?;
    let id2 = ComplexMatrix::identity(2);
    let x = pauli_x();
    let shield = ComplexMatrix::identity(d * d);
    let sigma = match flip {
        KeyFlip::A => kron_all([&x, &id2, &shield]),
        KeyFlip::B => kron_all([&id2, &x, &shield]),
    };
    let flipped = bit_y.conjugate_by(&sigma);
    let mut rho = bit_x.scale(p1(d));
    rho.add_scaled(&flipped, C64::new(p2(d), 0.0));
    Ok(rho.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_psd, PSD_TOL};
    use crate::states::{build_rho_f1, SubsystemOrder, UnitaryKind};

    #[test]
    fn trivial_shield_gives_bell_state() {
        let x = ComplexMatrix::from_real(1, 1, &[1.0]).unwrap();
        let rho = build_private_bit(&x).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [h, 0.0, 0.0, h].map(|v| C64::new(v, 0.0));
        assert!(rho.distance(&ComplexMatrix::projector(&phi)) < 1e-15);
    }

    #[test]
    fn rejects_wrong_trace_norm() {
        let x = ComplexMatrix::identity(2);
        assert!(matches!(
            build_private_bit(&x),
            Err(Error::TraceNorm { .. })
        ));
    }

    #[test]
    fn shield_matrices_have_unit_trace_norm() {
        for d in 2..6 {
            let u = crate::states::fourier_unitary(d);
            for m in [shield_x(&u), shield_y(&u)] {
                assert!((trace_norm(&m).unwrap() - 1.0).abs() < 1e-10);
                let bit = build_private_bit(&m).unwrap();
                assert!((bit.trace().re - 1.0).abs() < 1e-12);
                assert!(is_psd(&bit, PSD_TOL).unwrap());
            }
        }
    }

    #[test]
    fn flip_b_matches_direct_construction() {
        for spec in [
            F1Spec::fourier(2),
            F1Spec::fourier(3),
            F1Spec::fourier(4),
            F1Spec {
                d: 4,
                unitary: UnitaryKind::Hadamard,
            },
        ] {
            let direct = build_rho_f1(spec, SubsystemOrder::KeyShield).unwrap().rho;
            let via = f1_from_private_bits(spec, KeyFlip::B).unwrap();
            assert!(via.max_abs_diff(&direct) < 1e-12);
        }
    }

    #[test]
    fn flip_a_needs_hermitian_unitary() {
        let had = F1Spec {
            d: 4,
            unitary: UnitaryKind::Hadamard,
        };
        let direct = build_rho_f1(had, SubsystemOrder::KeyShield).unwrap().rho;
        assert!(
            f1_from_private_bits(had, KeyFlip::A)
                .unwrap()
                .max_abs_diff(&direct)
                < 1e-12
        );

        let four = F1Spec::fourier(3);
        let direct = build_rho_f1(four, SubsystemOrder::KeyShield).unwrap().rho;
        assert!(
            f1_from_private_bits(four, KeyFlip::A)
                .unwrap()
                .max_abs_diff(&direct)
                > 1e-3
        );
    }
}
