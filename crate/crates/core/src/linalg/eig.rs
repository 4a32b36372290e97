//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, C64, ZERO};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-13;

/// Real spectrum (descending) with orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Largest eigenvalue magnitude.
    pub fn spectral_radius(&self) -> f64 {
        self.max().abs().max(self.min().abs())
    }

    /// `V · diag(f(λ)) · V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let scaled = ComplexMatrix::from_fn(n, n, |i, k| v[(i, k)] * f(self.values[k]));
        scaled.matmul(&v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_values(|x| C64::new(x, 0.0))
    }
}

/// Eigendecomposition of the Hermitian part `(M + M†)/2` of a square matrix.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenSystem> {
    let n = m.ensure_square()?;
    let mut a = m.hermitian_part().into_vec();
    // Rows of `vt` are the conjugated eigenvectors, so every update is contiguous.
    let mut vt = ComplexMatrix::identity(n).into_vec();
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n <= 1 || norm == 0.0 {
        return Ok(sorted(n, &a, &vt));
    }
    let skip = 1e-18 * norm / n as f64;
    let target = OFF_DIAGONAL_TOL * norm;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(n, &a);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::EigenNotConverged {
                off_norm: off,
                sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let g = a[p * n + q];
                let mag = g.norm();
                if mag <= skip {
                    continue;
                }
                rotate(n, &mut a, &mut vt, p, q, g, mag);
            }
        }
    }
    Ok(sorted(n, &a, &vt))
}

fn off_diagonal_norm(n: usize, a: &[C64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for (j, z) in a[i * n..(i + 1) * n].iter().enumerate() {
            if i != j {
                s += z.norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Applies `A ← U†AU`, `V ← VU` with `U` zeroing the `(p, q)` entry.
///
/// `U = D·J`: `D` rotates the phase of column `q` so that `a_pq` becomes real,
/// then `J` is the real Jacobi rotation for the resulting symmetric 2x2 block.
fn rotate(n: usize, a: &mut [C64], vt: &mut [C64], p: usize, q: usize, g: C64, mag: f64) {
    let phase = (g / mag).conj();
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let pc = phase.conj();

    {
        // Rows p and q: a_pk ← c a_pk − s conj(φ) a_qk, a_qk ← s a_pk + c conj(φ) a_qk.
        let (lo, hi) = a.split_at_mut(q * n);
        let row_p = &mut lo[p * n..(p + 1) * n];
        let row_q = &mut hi[..n];
        for k in 0..n {
            let akp = row_p[k];
            let akq = row_q[k] * pc;
            row_p[k] = akp * c - akq * s;
            row_q[k] = akp * s + akq * c;
        }
    }
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        a[k * n + p] = a[p * n + k].conj();
        a[k * n + q] = a[q * n + k].conj();
    }
    a[p * n + p] = C64::new(app - t * mag, 0.0);
    a[q * n + q] = C64::new(aqq + t * mag, 0.0);
    a[p * n + q] = ZERO;
    a[q * n + p] = ZERO;

    let (lo, hi) = vt.split_at_mut(q * n);
    let row_p = &mut lo[p * n..(p + 1) * n];
    let row_q = &mut hi[..n];
    for k in 0..n {
        let vkp = row_p[k];
        let vkq = row_q[k] * pc;
        row_p[k] = vkp * c - vkq * s;
        row_q[k] = vkp * s + vkq * c;
    }
}

fn sorted(n: usize, a: &[C64], vt: &[C64]) -> EigenSystem {
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| vt[order[k] * n + i].conj());
    EigenSystem { values, vectors }
}

/// Count of eigenvalues with `|λ| > rel_tol · max|λ|`.
pub fn matrix_rank(m: &ComplexMatrix, rel_tol: f64) -> Result<usize> {
    let eig = hermitian_eig(m)?;
    Ok(rank_of(&eig.values, rel_tol))
}

pub(crate) fn rank_of(values: &[f64], rel_tol: f64) -> usize {
    let scale = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0;
    }
    values.iter().filter(|x| x.abs() > rel_tol * scale).count()
}

/// `λ_min ≥ −tol · max(1, max|λ|)`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    let eig = hermitian_eig(m)?;
    Ok(eig.min() >= -tol * eig.spectral_radius().max(1.0))
}

/// `exp(−i·K·t)` for Hermitian `K`.
pub fn hermitian_exp(k: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    k.ensure_square()?;
    let residual = k.hermitian_residual();
    if residual > 1e-10 * k.max_abs().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    if t == 0.0 {
        return Ok(ComplexMatrix::identity(k.rows()));
    }
    let eig = hermitian_eig(k)?;
    Ok(eig.map_values(|x| C64::from_polar(1.0, -x * t)))
}

/// Identity-check helper: `‖U†U − I‖_F`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    u.adjoint()
        .matmul(u)
        .distance(&ComplexMatrix::identity(u.cols()))
}
