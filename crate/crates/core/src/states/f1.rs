use crate::error::Result;
use crate::linalg::{ComplexMatrix, SubsystemDims, C64};
use crate::states::{
    ket, ket_index, p1, p2, F1Spec, Family, LabeledVector, StateBundle, SubsystemOrder,
};

/// First-family state assembled term by term from its four sums, with the
/// eigenvectors `v_ij`, `w_i` (nonzero) and `v⁻_ij`, `w⁻_i` (zero) attached.
pub fn build_rho_f1(spec: F1Spec, order: SubsystemOrder) -> Result<StateBundle> {
    spec.validate()?;
    let d = spec.d;
    let u = spec.unitary_matrix();
    let (p1, p2) = (p1(d), p2(d));
    let df = d as f64;
    let n = 4 * d * d;
    let idx = |a, b, i, j| ket_index(d, a, b, i, j);

    let mut rho = ComplexMatrix::zeros(n, n);
    let diag_v = C64::new(p1 / (2.0 * df * df), 0.0);
    let coh_v = p1 / (2.0 * df * df.sqrt());
    let w_term = p2 / (2.0 * df);
    for i in 0..d {
        for j in 0..d {
            rho[(idx(0, 0, i, j), idx(0, 0, i, j))] += diag_v;
            rho[(idx(1, 1, i, j), idx(1, 1, i, j))] += diag_v;
            let uij = u[(i, j)];
            rho[(idx(0, 0, i, j), idx(1, 1, j, i))] += uij * coh_v;
            rho[(idx(1, 1, j, i), idx(0, 0, i, j))] += uij.conj() * coh_v;
            rho[(idx(0, 1, i, i), idx(1, 0, j, j))] += uij * w_term;
            rho[(idx(1, 0, j, j), idx(0, 1, i, i))] += uij.conj() * w_term;
        }
        rho[(idx(0, 1, i, i), idx(0, 1, i, i))] += C64::new(w_term, 0.0);
        rho[(idx(1, 0, i, i), idx(1, 0, i, i))] += C64::new(w_term, 0.0);
    }
    let rho = rho.hermitian_part();

    let lambda_v = p1 / (df * df);
    let lambda_w = p2 / df;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut nonzero = Vec::with_capacity(d * d + d);
    let mut zero = Vec::with_capacity(d * d + d);
    for i in 0..d {
        for j in 0..d {
            let coeff = u[(i, j)].conj() * df.sqrt();
            let plus = combine(&ket(d, 0, 0, i, j), &ket(d, 1, 1, j, i), coeff, s);
            let minus = combine(&ket(d, 0, 0, i, j), &ket(d, 1, 1, j, i), -coeff, s);
            nonzero.push(LabeledVector::new(format!("v_{i}{j}"), lambda_v, plus));
            zero.push(LabeledVector::new(format!("v-_{i}{j}"), 0.0, minus));
        }
    }
    for i in 0..d {
        let mut plus = ket(d, 0, 1, i, i);
        let mut minus = plus.clone();
        for j in 0..d {
            let c = u[(i, j)].conj();
            plus[idx(1, 0, j, j)] += c;
            minus[idx(1, 0, j, j)] -= c;
        }
        plus.iter_mut()
            .chain(minus.iter_mut())
            .for_each(|z| *z *= s);
        nonzero.push(LabeledVector::new(format!("w_{i}"), lambda_w, plus));
        zero.push(LabeledVector::new(format!("w-_{i}"), 0.0, minus));
    }

    StateBundle {
        rho,
        dims: SubsystemDims::key_shield(d),
        family: Family::F1(spec.unitary),
        eigvecs_nonzero: nonzero,
        eigvecs_zero_named: zero,
    }
    .reordered(d, order)
}

/// `s·(a + c·b)`.
fn combine(a: &[C64], b: &[C64], c: C64, s: f64) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| (x + c * y) * s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, matrix_rank, partial_transpose, Party, RANK_TOL};
    use crate::states::UnitaryKind;

    #[test]
    fn d2_hadamard_spectrum() {
        let b = build_rho_f1(
            F1Spec::new(2, UnitaryKind::Hadamard).unwrap(),
            SubsystemOrder::KeyShield,
        )
        .unwrap();
        let e = hermitian_eig(&b.rho).unwrap();
        let lv = (2f64.sqrt() - 1.0) / (2.0 * 2f64.sqrt());
        let lw = (2f64.sqrt() - 1.0) / 2.0;
        let mut expected = vec![lw, lw, lv, lv, lv, lv];
        expected.extend(std::iter::repeat_n(0.0, 10));
        for (a, b) in e.values.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn trace_rank_and_self_duality() {
        for (d, kind) in [
            (2, UnitaryKind::Fourier),
            (3, UnitaryKind::Fourier),
            (4, UnitaryKind::Hadamard),
            (5, UnitaryKind::Fourier),
        ] {
            let b = build_rho_f1(F1Spec::new(d, kind).unwrap(), SubsystemOrder::KeyShield).unwrap();
            assert!((b.rho.trace().re - 1.0).abs() < 1e-12);
            assert_eq!(matrix_rank(&b.rho, RANK_TOL).unwrap(), d * d + d);
            let pt = partial_transpose(&b.rho, &b.dims, &[Party::B, Party::BPrime]).unwrap();
            assert!(pt.max_abs_diff(&b.rho) < 1e-14);
        }
    }

    #[test]
    fn labelled_vectors_are_eigenvectors() {
        let b = build_rho_f1(F1Spec::fourier(3), SubsystemOrder::KeyShield).unwrap();
        assert_eq!(b.eigvecs_nonzero.len(), 12);
        assert_eq!(b.eigvecs_zero_named.len(), 12);
        for v in b.eigvecs_nonzero.iter().chain(&b.eigvecs_zero_named) {
            assert!(v.eigen_residual(&b.rho) < 1e-12, "{}", v.label);
            assert!((crate::linalg::norm(&v.vector) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bipartite_order_is_a_relabelling() {
        let ks = build_rho_f1(F1Spec::fourier(3), SubsystemOrder::KeyShield).unwrap();
        let bp = build_rho_f1(F1Spec::fourier(3), SubsystemOrder::Bipartite).unwrap();
        assert_eq!(bp.dims, SubsystemDims::bipartite(3));
        let a = hermitian_eig(&ks.rho).unwrap().values;
        let b = hermitian_eig(&bp.rho).unwrap().values;
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-13));
        for v in &bp.eigvecs_nonzero {
            assert!(v.eigen_residual(&bp.rho) < 1e-12);
        }
    }

    #[test]
    fn invalid_spec_is_rejected() {
        let bad = F1Spec {
            d: 3,
            unitary: UnitaryKind::Hadamard,
        };
        assert!(build_rho_f1(bad, SubsystemOrder::KeyShield).is_err());
    }
}
