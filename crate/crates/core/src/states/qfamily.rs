use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{kron_all, pauli_x, ComplexMatrix, C64};
use crate::states::ket;

const STRUCT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QKind {
    /// The rotation family for `d = 3` with offset angle `φ₀`.
    D3 {
        phi0: f64,
    },
    /// Permutation matrices for `d = 2^n`.
    P {
        n: u32,
    },
    Custom,
}

/// Orthogonal matrices `Q^j` with the derived objects `q_ij`, `q̄_m`, `Ξ_m`,
/// `S_ij`, `D_m`, `N_m`.
#[derive(Debug, Clone)]
pub struct QFamily {
    pub d: usize,
    pub kind: QKind,
    /// `q_mats[j][(i, k)] = Q^j_ik`.
    pub q_mats: Vec<ComplexMatrix>,
    /// `q_vecs[i][j]` holds the coefficients of `q_ij` on `|10kk⟩`, `k = 0..d`.
    pub q_vecs: Vec<Vec<Vec<f64>>>,
    /// `Ξ_m`, in row-major order.
    pub xi_sets: Vec<Vec<(usize, usize)>>,
    /// `S_ij`, zero when `q_ij = 0`.
    pub s_factors: Vec<Vec<f64>>,
    /// `μ_ij`, `None` when `q_ij = 0`.
    pub mu: Vec<Vec<Option<usize>>>,
    pub d_consts: Vec<f64>,
    pub n_counts: Vec<usize>,
    /// `q̄_m` as coefficients on `|10kk⟩`.
    pub qbar_basis: Vec<Vec<f64>>,
}

impl QFamily {
    /// Derives all objects from the matrices and checks the structural requirements.
    ///
    /// Nonzero `q_ij` are grouped by direction in row-major order; the first
    /// member of each group fixes the orientation of `q̄_m`.
    pub fn from_matrices(q_mats: Vec<ComplexMatrix>, kind: QKind) -> Result<Self> {
        let d = q_mats.len();
        if d == 0 {
            return Err(Error::InvalidConstruction("empty Q family".into()));
        }
        for (j, q) in q_mats.iter().enumerate() {
            if q.rows() != d || q.cols() != d {
                return Err(Error::InvalidConstruction(format!(
                    "Q^{j} is {}x{}, expected {d}x{d}",
                    q.rows(),
                    q.cols()
                )));
            }
            if q.as_slice().iter().any(|z| z.im != 0.0) {
                return Err(Error::InvalidConstruction(format!("Q^{j} is not real")));
            }
            let res = q
                .transpose()
                .matmul(q)
                .distance(&ComplexMatrix::identity(d));
            if res > STRUCT_TOL {
                return Err(Error::InvalidConstruction(format!(
                    "Q^{j} not orthogonal (residual {res:.3e})"
                )));
            }
        }

        let q_vecs: Vec<Vec<Vec<f64>>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).map(|k| q_mats[k][(i, j)].re).collect())
                    .collect()
            })
            .collect();

        let mut qbar_basis: Vec<Vec<f64>> = Vec::new();
        let mut xi_sets: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut s_factors = vec![vec![0.0; d]; d];
        let mut mu = vec![vec![None; d]; d];
        for i in 0..d {
            for j in 0..d {
                let q = &q_vecs[i][j];
                let nrm = dot(q, q).sqrt();
                if nrm <= STRUCT_TOL {
                    continue;
                }
                let found = qbar_basis.iter().position(|b| {
                    let c = dot(b, q);
                    (c.abs() - nrm).abs() <= STRUCT_TOL * nrm.max(1.0)
                });
                let m = match found {
                    Some(m) => m,
                    None => {
                        if let Some(b) = qbar_basis.iter().find(|b| dot(b, q).abs() > STRUCT_TOL) {
                            return Err(Error::InvalidConstruction(format!(
                                "q_{i}{j} is neither parallel nor orthogonal to q̄ (overlap {:.3e})",
                                dot(b, q)
                            )));
                        }
                        qbar_basis.push(q.iter().map(|x| x / nrm).collect());
                        xi_sets.push(Vec::new());
                        qbar_basis.len() - 1
                    }
                };
                s_factors[i][j] = dot(&qbar_basis[m], q);
                mu[i][j] = Some(m);
                xi_sets[m].push((i, j));
            }
        }
        if qbar_basis.len() != d {
            return Err(Error::InvalidConstruction(format!(
                "q vectors span {} directions, expected {d}",
                qbar_basis.len()
            )));
        }
        let n_counts: Vec<usize> = xi_sets.iter().map(Vec::len).collect();
        let d_consts: Vec<f64> = n_counts
            .iter()
            .map(|&n| (d as f64 / n as f64).sqrt())
            .collect();
        for (m, xi) in xi_sets.iter().enumerate() {
            for &(i, j) in xi {
                let r = (s_factors[i][j].abs() - d_consts[m]).abs();
                if r > STRUCT_TOL * d_consts[m] {
                    return Err(Error::InvalidConstruction(format!(
                        "|S_{i}{j}| = {} differs from D_{m} = {}",
                        s_factors[i][j].abs(),
                        d_consts[m]
                    )));
                }
            }
        }

        Ok(Self {
            d,
            kind,
            q_mats,
            q_vecs,
            xi_sets,
            s_factors,
            mu,
            d_consts,
            n_counts,
            qbar_basis,
        })
    }

    /// `Q^j_ik`.
    pub fn q(&self, j: usize, i: usize, k: usize) -> f64 {
        self.q_mats[j][(i, k)].re
    }

    /// `q̄_m` embedded in the full `A B A' B'` space.
    pub fn qbar_vector(&self, m: usize) -> Vec<C64> {
        let d = self.d;
        let mut v = vec![C64::new(0.0, 0.0); 4 * d * d];
        for (k, &c) in self.qbar_basis[m].iter().enumerate() {
            v[super::ket_index(d, 1, 0, k, k)] = C64::new(c, 0.0);
        }
        v
    }

    /// `t_m = (1/√d) Σ_{Ξ_m} S_ij |01ij⟩`.
    pub fn t_vector(&self, m: usize) -> Vec<C64> {
        let d = self.d;
        let scale = 1.0 / (d as f64).sqrt();
        let mut v = vec![C64::new(0.0, 0.0); 4 * d * d];
        for &(i, j) in &self.xi_sets[m] {
            v[super::ket_index(d, 0, 1, i, j)] += C64::new(self.s_factors[i][j] * scale, 0.0);
        }
        v
    }

    pub fn t_vectors(&self) -> Vec<Vec<C64>> {
        (0..self.d).map(|m| self.t_vector(m)).collect()
    }

    /// The vectors `s_i` on `|01⟩_{AB}` whose projector sum has `Σ|t_m⟩⟨t_m|` as partial transpose.
    pub fn s_vectors(&self) -> Result<Vec<Vec<C64>>> {
        match self.kind {
            QKind::P { .. } => Ok(self.t_vectors()),
            QKind::D3 { .. } => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let pair = |a: (usize, usize), b: (usize, usize), sign: f64| {
                    ket(3, 0, 1, a.0, a.1)
                        .into_iter()
                        .zip(ket(3, 0, 1, b.0, b.1))
                        .map(|(x, y)| (x + y * sign) * h)
                        .collect::<Vec<_>>()
                };
                Ok(vec![
                    pair((0, 0), (1, 1), 1.0),
                    pair((0, 1), (1, 0), -1.0),
                    ket(3, 0, 1, 2, 2),
                ])
            }
            QKind::Custom => Err(Error::InvalidConstruction(
                "s vectors are only known for the d = 3 and d = 2^n families".into(),
            )),
        }
    }

    /// `max_j ‖(Q^j)ᵀQ^j − I‖_F`.
    pub fn orthogonality_residual(&self) -> f64 {
        let id = ComplexMatrix::identity(self.d);
        self.q_mats
            .iter()
            .map(|q| q.transpose().matmul(q).distance(&id))
            .fold(0.0, f64::max)
    }

    /// `max ‖q_ij − S_ij q̄_{μ_ij}‖` over nonzero `q_ij`.
    pub fn qbar_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.d {
            for j in 0..self.d {
                if let Some(m) = self.mu[i][j] {
                    let s = self.s_factors[i][j];
                    let r = self.q_vecs[i][j]
                        .iter()
                        .zip(&self.qbar_basis[m])
                        .map(|(q, b)| (q - s * b).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    worst = worst.max(r);
                }
            }
        }
        worst
    }

    /// `|Σ_ij ⟨q_ij|q_ij⟩ − d²|`.
    pub fn consistency_residual(&self) -> f64 {
        let total: f64 = self.q_vecs.iter().flatten().map(|q| dot(q, q)).sum();
        (total - (self.d * self.d) as f64).abs()
    }

    /// `‖B Bᵀ − I‖_F` for the matrix `B` whose rows are `q̄_m`.
    pub fn qbar_orthonormality_residual(&self) -> f64 {
        let mut acc = 0.0;
        for (a, x) in self.qbar_basis.iter().enumerate() {
            for (b, y) in self.qbar_basis.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                acc += (dot(x, y) - target).powi(2);
            }
        }
        acc.sqrt()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The `d = 3` family `Q^k = [[cos φ_k, sin φ_k, 0], [sin φ_k, −cos φ_k, 0], [0, 0, 1]]`,
/// `φ_k = 2πk/3 + φ₀`.
pub fn q_family_d3(phi0: f64) -> QFamily {
    let mats = (0..3)
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / 3.0 + phi0;
            let (s, c) = phi.sin_cos();
            ComplexMatrix::from_real(3, 3, &[c, s, 0.0, s, -c, 0.0, 0.0, 0.0, 1.0])
                .expect("3x3 literal")
        })
        .collect();
    QFamily::from_matrices(mats, QKind::D3 { phi0 }).expect("d = 3 family is valid for every phi0")
}

/// `P^k(n) = X^{k_{n−1}} ⊗ … ⊗ X^{k_0}`, i.e. `P^k_ij = 1` iff `i ⊕ j = k`.
pub fn p_matrices(n: u32) -> Vec<ComplexMatrix> {
    let d = 1usize << n;
    let id = ComplexMatrix::identity(2);
    let x = pauli_x();
    (0..d)
        .map(|k| {
            let factors: Vec<ComplexMatrix> = (0..n)
                .rev()
                .map(|bit| {
                    if (k >> bit) & 1 == 1 {
                        x.clone()
                    } else {
                        id.clone()
                    }
                })
                .collect();
            kron_all(&factors)
        })
        .collect()
}

/// The permutation family for `d = 2^n`.
pub fn p_family(n: u32) -> QFamily {
    QFamily::from_matrices(p_matrices(n), QKind::P { n }).expect("P family is valid for every n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    /// Block recursion `P^k(n+1) = diag(P^k, P^k)`, `P^{k+2^n}(n+1) = antidiag(P^k, P^k)`.
    fn p_recursive(n: u32) -> Vec<ComplexMatrix> {
        let mut mats = vec![ComplexMatrix::identity(1)];
        for level in 0..n {
            let h = 1usize << level;
            let mut next = Vec::with_capacity(2 * h);
            for off in [false, true] {
                for p in &mats {
                    next.push(ComplexMatrix::from_fn(2 * h, 2 * h, |r, c| {
                        let same_block = (r < h) == (c < h);
                        if same_block != off {
                            p[(r % h, c % h)]
                        } else {
                            C64::new(0.0, 0.0)
                        }
                    }));
                }
            }
            mats = next;
        }
        mats
    }

    #[test]
    fn p_matrices_match_recursion() {
        for n in 1..=4 {
            assert_eq!(p_matrices(n), p_recursive(n));
        }
    }

    #[test]
    fn p_n1_is_identity_and_x() {
        let p = p_matrices(1);
        assert_eq!(p[0], ComplexMatrix::identity(2));
        assert_eq!(p[1], pauli_x());
    }

    #[test]
    fn p_entries_are_xor_pattern() {
        let n = 3;
        let p = p_matrices(n);
        for (k, m) in p.iter().enumerate() {
            for i in 0..8 {
                for j in 0..8 {
                    let want = if i ^ j == k { ONE } else { C64::new(0.0, 0.0) };
                    assert_eq!(m[(i, j)], want);
                }
            }
            assert_eq!(m[(0, k)], ONE);
            assert_eq!(m[(k, 0)], ONE);
        }
    }

    #[test]
    fn p_family_derived_objects() {
        for n in 1..=3 {
            let f = p_family(n);
            let d = 1 << n;
            assert_eq!(f.n_counts, vec![d; d]);
            assert!(f
                .s_factors
                .iter()
                .flatten()
                .all(|&s| (s - 1.0).abs() < 1e-15));
            for m in 0..d {
                let mut e = vec![0.0; d];
                e[m] = 1.0;
                assert_eq!(f.qbar_basis[m], e);
            }
            assert!(f.consistency_residual() < 1e-10);
        }
    }

    #[test]
    fn d3_family_groups() {
        let f = q_family_d3(0.0);
        assert_eq!(f.n_counts, vec![2, 2, 1]);
        let r = (1.5f64).sqrt();
        assert!((f.d_consts[0] - r).abs() < 1e-15);
        assert!((f.d_consts[2] - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(f.xi_sets[0], vec![(0, 0), (1, 1)]);
        assert_eq!(f.xi_sets[1], vec![(0, 1), (1, 0)]);
        assert_eq!(f.xi_sets[2], vec![(2, 2)]);
        assert!((f.s_factors[0][0] - r).abs() < 1e-12);
        assert!((f.s_factors[1][1] + r).abs() < 1e-12);
        assert!((f.s_factors[1][0] - r).abs() < 1e-12);
        for (i, j) in [(0, 2), (1, 2), (2, 0), (2, 1)] {
            assert!(f.mu[i][j].is_none());
        }
        assert!(f.qbar_orthonormality_residual() < 1e-12);
        assert!(f.qbar_residual() < 1e-12);
        assert!((f.consistency_residual()) < 1e-10);
    }

    #[test]
    fn d3_t_vectors_do_not_depend_on_phi0() {
        let a = q_family_d3(0.0).t_vectors();
        let b = q_family_d3(0.37).t_vectors();
        for (x, y) in a.iter().zip(&b) {
            assert!(x.iter().zip(y).all(|(p, q)| (p - q).norm() < 1e-12));
        }
    }

    #[test]
    fn rejects_non_orthogonal_and_inconsistent() {
        let bad = vec![ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap(); 2];
        assert!(QFamily::from_matrices(bad, QKind::Custom).is_err());
        let same = vec![ComplexMatrix::identity(2); 2];
        assert!(QFamily::from_matrices(same, QKind::Custom).is_err());
    }
}
