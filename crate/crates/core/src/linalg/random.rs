//! Seeded random matrices.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::matrix::{ComplexMatrix, C64};

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `(G + G†)/2` with i.i.d. complex Gaussian `G`.
pub fn gaussian_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| gaussian_c64(rng));
    g.hermitian_part()
}

/// Ginibre-induced random density matrix `G G† / tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| gaussian_c64(rng));
    let rho = g.matmul(&g.adjoint());
    let tr = rho.trace().re;
    rho.scale(1.0 / tr).hermitian_part()
}

/// Random pure state of dimension `n`.
pub fn random_pure<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| gaussian_c64(rng)).collect();
    let nrm = crate::linalg::norm(&v);
    v.into_iter().map(|z| z / nrm).collect()
}

/// Haar-random unitary via Gram–Schmidt on a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| gaussian_c64(rng)).collect();
        for c in &cols {
            let proj = crate::linalg::inner(c, &v);
            for (x, y) in v.iter_mut().zip(c) {
                *x -= proj * y;
            }
        }
        let nrm = crate::linalg::norm(&v);
        if nrm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / nrm).collect());
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}
