use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, SubsystemDims, C64, ONE};
use crate::states::qfamily::{p_family, q_family_d3, QFamily};
use crate::states::{ket, ket_index, p1, p2, Family, LabeledVector, StateBundle, SubsystemOrder};

/// Human-readable list of dimensions the second family is built for.
pub const F2_SUPPORTED: &str = "{3} and powers of two {2, 4, 8, 16, ...}";

pub fn f2_supported(d: usize) -> bool {
    d == 3 || (d >= 2 && d.is_power_of_two())
}

/// The `Q` family used for dimension `d`: rotations for `d = 3`, permutations for `d = 2^n`.
pub fn default_q_family(d: usize) -> Result<QFamily> {
    if d == 3 {
        Ok(q_family_d3(0.0))
    } else if f2_supported(d) {
        Ok(p_family(d.trailing_zeros()))
    } else {
        Err(unsupported(d))
    }
}

fn unsupported(d: usize) -> Error {
    Error::UnsupportedDimension {
        d,
        family: "F2",
        supported: F2_SUPPORTED,
    }
}

/// `build_rho_f2` with the default family for `d`.
pub fn rho_f2(d: usize, order: SubsystemOrder) -> Result<StateBundle> {
    build_rho_f2(d, &default_q_family(d)?, order)
}

/// Second-family state
/// `p₁/d² Σ|z_ij⟩⟨z_ij| + p₂/(2d) Σ|s_i⟩⟨s_i| + p₂/(2d) Σ|10ii⟩⟨10ii|`.
pub fn build_rho_f2(d: usize, family: &QFamily, order: SubsystemOrder) -> Result<StateBundle> {
    if !f2_supported(d) {
        return Err(unsupported(d));
    }
    if family.d != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: family.d,
        });
    }
    let s_vecs = family.s_vectors()?;
    let (p1, p2) = (p1(d), p2(d));
    let df = d as f64;
    let n = 4 * d * d;
    let h = std::f64::consts::FRAC_1_SQRT_2;

    let mut nonzero = Vec::with_capacity(d * d + 2 * d);
    let mut zero = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut plus = vec![C64::new(0.0, 0.0); n];
            plus[ket_index(d, 0, 0, i, j)] = C64::new(h, 0.0);
            let mut minus = plus.clone();
            for k in 0..d {
                let c = family.q(j, i, k) * h;
                plus[ket_index(d, 1, 1, j, k)] += c;
                minus[ket_index(d, 1, 1, j, k)] -= c;
            }
            nonzero.push(LabeledVector::new(
                format!("z_{i}{j}"),
                p1 / (df * df),
                plus,
            ));
            zero.push(LabeledVector::new(format!("z-_{i}{j}"), 0.0, minus));
        }
    }
    for (i, s) in s_vecs.into_iter().enumerate() {
        nonzero.push(LabeledVector::new(format!("s_{i}"), p2 / (2.0 * df), s));
    }
    for i in 0..d {
        nonzero.push(LabeledVector::new(
            format!("e10_{i}{i}"),
            p2 / (2.0 * df),
            ket(d, 1, 0, i, i),
        ));
    }

    let mut rho = ComplexMatrix::zeros(n, n);
    for v in &nonzero {
        rho.add_outer(&v.vector, &v.vector, ONE * v.eigenvalue);
    }

    StateBundle {
        rho: rho.hermitian_part(),
        dims: SubsystemDims::key_shield(d),
        family: Family::F2,
        eigvecs_nonzero: nonzero,
        eigvecs_zero_named: zero,
    }
    .reordered(d, order)
}
