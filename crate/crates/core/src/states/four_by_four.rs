use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Party, SubsystemDims, C64, ONE};
use crate::states::{Family, LabeledVector, StateBundle};

/// Two four-level parties.
pub fn four_by_four_dims() -> SubsystemDims {
    SubsystemDims::new(vec![4, 4], vec![Party::A, Party::B]).expect("valid literal dims")
}

fn ab(a: usize, b: usize) -> usize {
    4 * a + b
}

/// `Ψ₁ … Ψ₆`, with `|a,b⟩` at index `4a + b`.
pub fn psi_states() -> Vec<Vec<C64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let terms: [&[(usize, usize, f64)]; 6] = [
        &[(0, 1, h), (2, 3, h)],
        &[(1, 0, h), (3, 2, h)],
        &[(1, 1, h), (2, 2, h)],
        &[(0, 0, h), (3, 3, -h)],
        &[(0, 3, 0.5), (1, 2, 0.5), (2, 1, h)],
        &[(0, 3, -0.5), (1, 2, 0.5), (3, 0, h)],
    ];
    terms
        .iter()
        .map(|t| {
            let mut v = vec![C64::new(0.0, 0.0); 16];
            for &(a, b, c) in t.iter() {
                v[ab(a, b)] = C64::new(c, 0.0);
            }
            v
        })
        .collect()
}

/// `p Σ_{n≤4} |Ψ_n⟩⟨Ψ_n| + q Σ_{n=5,6} |Ψ_n⟩⟨Ψ_n|`, `q = (√2−1)/2`, `p = (1−2q)/4`.
pub fn build_rho_4x4() -> StateBundle {
    let q = (2f64.sqrt() - 1.0) / 2.0;
    let p = (1.0 - 2.0 * q) / 4.0;
    let eigvecs: Vec<LabeledVector> = psi_states()
        .into_iter()
        .enumerate()
        .map(|(k, v)| LabeledVector::new(format!("Psi_{}", k + 1), if k < 4 { p } else { q }, v))
        .collect();
    let mut rho = ComplexMatrix::zeros(16, 16);
    for v in &eigvecs {
        rho.add_outer(&v.vector, &v.vector, ONE * v.eigenvalue);
    }
    StateBundle {
        rho: rho.hermitian_part(),
        dims: four_by_four_dims(),
        family: Family::FourByFour,
        eigvecs_nonzero: eigvecs,
        eigvecs_zero_named: Vec::new(),
    }
}

/// `D ⊗ 1 + 1 ⊗ D`, `D = diag(1, 1, −1, −1)`.
pub fn hamiltonian_4x4() -> ComplexMatrix {
    let dd = [1.0, 1.0, -1.0, -1.0];
    let diag: Vec<f64> = (0..16).map(|k| dd[k / 4] + dd[k % 4]).collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// Two-qubit to four-level relabelling `|00⟩→1, |01⟩→0, |10⟩→2, |11⟩→3`.
const QUBIT_PAIR_MAP: [usize; 4] = [1, 0, 2, 3];

/// Index map from `A B A' B'` (d = 2) to the 4×4 system: `BB'` becomes the
/// first four-level party and `AA'` the second.
fn relabel_index(old: usize) -> usize {
    let (a, b, i, j) = ((old >> 3) & 1, (old >> 2) & 1, (old >> 1) & 1, old & 1);
    4 * QUBIT_PAIR_MAP[2 * b + j] + QUBIT_PAIR_MAP[2 * a + i]
}

fn check16(n: usize) -> Result<()> {
    if n != 16 {
        return Err(Error::DimensionMismatch {
            expected: 16,
            got: n,
        });
    }
    Ok(())
}

/// Relabels a `d = 2` operator in `A B A' B'` order onto the 4×4 system.
pub fn relabel_to_4x4(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check16(m.ensure_square()?)?;
    let mut out = ComplexMatrix::zeros(16, 16);
    for r in 0..16 {
        for c in 0..16 {
            out[(relabel_index(r), relabel_index(c))] = m[(r, c)];
        }
    }
    Ok(out)
}

pub fn relabel_vector_to_4x4(v: &[C64]) -> Result<Vec<C64>> {
    check16(v.len())?;
    let mut out = vec![C64::new(0.0, 0.0); 16];
    for (k, &z) in v.iter().enumerate() {
        out[relabel_index(k)] = z;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, inner};
    use crate::states::{
        build_rho_f1, flip_operator, hamiltonian_h, F1Spec, SubsystemOrder, UnitaryKind,
    };

    #[test]
    fn psi_states_are_orthonormal() {
        let psi = psi_states();
        for (a, x) in psi.iter().enumerate() {
            for (b, y) in psi.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((inner(x, y).re - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn trace_and_flip_invariance() {
        let b = build_rho_4x4();
        assert!((b.rho.trace().re - 1.0).abs() < 1e-14);
        let f = flip_operator(&b.dims).unwrap();
        assert!(b.rho.conjugate_by(&f).distance(&b.rho) < 1e-14);
    }

    #[test]
    fn hamiltonian_spectrum() {
        let e = hermitian_eig(&hamiltonian_4x4()).unwrap();
        assert_eq!(e.max(), 2.0);
        assert_eq!(e.min(), -2.0);
        assert_eq!(
            relabel_to_4x4(&hamiltonian_h(2)).unwrap(),
            hamiltonian_4x4()
        );
    }

    #[test]
    fn relabelled_f1_is_the_4x4_state() {
        let f1 = build_rho_f1(
            F1Spec {
                d: 2,
                unitary: UnitaryKind::Hadamard,
            },
            SubsystemOrder::KeyShield,
        )
        .unwrap();
        let mapped = relabel_to_4x4(&f1.rho).unwrap();
        assert!(mapped.max_abs_diff(&build_rho_4x4().rho) < 1e-15);
        let psi = psi_states();
        for (label, k) in [("w_0", 4), ("w_1", 5), ("v_00", 2), ("v_11", 3)] {
            let v = relabel_vector_to_4x4(&f1.find(label).unwrap().vector).unwrap();
            assert!((inner(&v, &psi[k]).norm() - 1.0).abs() < 1e-14, "{label}");
        }
    }

    #[test]
    fn relabel_rejects_wrong_size() {
        assert!(relabel_to_4x4(&ComplexMatrix::identity(8)).is_err());
    }
}
