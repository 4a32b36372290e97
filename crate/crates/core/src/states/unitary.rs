use std::f64::consts::PI;

use crate::linalg::{ComplexMatrix, C64};

/// Discrete Fourier matrix `u_jk = exp(2πi·jk/d)/√d`.
pub fn fourier_unitary(d: usize) -> ComplexMatrix {
    let norm = 1.0 / (d as f64).sqrt();
    ComplexMatrix::from_fn(d, d, |j, k| {
        let angle = 2.0 * PI * ((j * k) % d) as f64 / d as f64;
        C64::from_polar(norm, angle)
    })
}

/// Normalised Sylvester–Hadamard matrix `2^{-n/2} [[1,1],[1,-1]]^{⊗n}` of size `2^n`.
pub fn hadamard_unitary(n: u32) -> ComplexMatrix {
    let d = 1usize << n;
    let norm = 1.0 / (d as f64).sqrt();
    ComplexMatrix::from_fn(d, d, |i, j| {
        let sign = if (i & j).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        C64::new(sign * norm, 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, unitarity_residual, ONE};

    #[test]
    fn fourier_small_cases() {
        assert_eq!(fourier_unitary(1), ComplexMatrix::identity(1));
        let h = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, -1.0])
            .unwrap()
            .scale(1.0 / 2f64.sqrt());
        assert!(fourier_unitary(2).max_abs_diff(&h) < 1e-15);
    }

    #[test]
    fn fourier_entries_have_flat_modulus() {
        for d in 2..9 {
            let u = fourier_unitary(d);
            let target = 1.0 / (d as f64).sqrt();
            assert!(u
                .as_slice()
                .iter()
                .all(|z| (z.norm() - target).abs() < 1e-15));
            assert!(unitarity_residual(&u) < 1e-12);
        }
    }

    #[test]
    fn hadamard_matches_tensor_power() {
        let h1 = hadamard_unitary(1);
        let mut expected = ComplexMatrix::identity(1);
        for n in 1..=4 {
            expected = kron(&expected, &h1);
            let h = hadamard_unitary(n);
            assert!(h.max_abs_diff(&expected) < 1e-15);
            assert_eq!(h, h.transpose());
            assert!(
                h.matmul(&h.transpose())
                    .distance(&ComplexMatrix::identity(1 << n))
                    < 1e-12
            );
        }
        assert_eq!(hadamard_unitary(0)[(0, 0)], ONE);
    }
}
