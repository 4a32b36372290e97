use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;

/// Subsystem label. `A`, `B` are the qubits, `A'`, `B'` the d-dimensional parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    A,
    B,
    APrime,
    BPrime,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::A => "A",
            Party::B => "B",
            Party::APrime => "A'",
            Party::BPrime => "B'",
        })
    }
}

/// Ordered tensor factorisation of a Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemDims {
    dims: Vec<usize>,
    labels: Vec<Party>,
}

impl SubsystemDims {
    pub fn new(dims: Vec<usize>, labels: Vec<Party>) -> Result<Self> {
        if dims.len() != labels.len() {
            return Err(Error::InvalidSubsystems(format!(
                "{} dimensions but {} labels",
                dims.len(),
                labels.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidSubsystems(
                "zero-dimensional subsystem".into(),
            ));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidSubsystems(format!("label {l} repeated")));
            }
        }
        Ok(Self { dims, labels })
    }

    /// `[2, 2, d, d]` in the order A, B, A', B'.
    pub fn key_shield(d: usize) -> Self {
        Self {
            dims: vec![2, 2, d, d],
            labels: vec![Party::A, Party::B, Party::APrime, Party::BPrime],
        }
    }

    /// `[2, d, 2, d]` in the order A, A', B, B'.
    pub fn bipartite(d: usize) -> Self {
        Self {
            dims: vec![2, d, 2, d],
            labels: vec![Party::A, Party::APrime, Party::B, Party::BPrime],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[Party] {
        &self.labels
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn position(&self, party: Party) -> Option<usize> {
        self.labels.iter().position(|&l| l == party)
    }

    pub fn dim_of(&self, party: Party) -> Option<usize> {
        self.position(party).map(|p| self.dims[p])
    }

    /// Splits a flat index into per-subsystem digits (most significant first).
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&x, &d)| acc * d + x)
    }

    /// Dimensions after reordering: new slot `i` holds old subsystem `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.dims.len())?;
        Ok(Self {
            dims: perm.iter().map(|&p| self.dims[p]).collect(),
            labels: perm.iter().map(|&p| self.labels[p]).collect(),
        })
    }

    /// Permutation taking `self`'s order to `target`'s, in the convention of [`Self::permuted`].
    pub fn permutation_to(&self, target: &SubsystemDims) -> Result<Vec<usize>> {
        let perm = target
            .labels
            .iter()
            .map(|l| {
                self.position(*l).ok_or_else(|| {
                    Error::InvalidSubsystems(format!("label {l} missing from source order"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if self.permuted(&perm)? != *target {
            return Err(Error::InvalidSubsystems(
                "source and target orders disagree on dimensions".into(),
            ));
        }
        Ok(perm)
    }

    fn check_matrix(&self, m: &ComplexMatrix) -> Result<usize> {
        let n = m.ensure_square()?;
        if n != self.total() {
            return Err(Error::DimensionMismatch {
                expected: self.total(),
                got: n,
            });
        }
        Ok(n)
    }
}

impl fmt::Display for SubsystemDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.labels {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::InvalidSubsystems(format!(
            "permutation of length {} for {} subsystems",
            perm.len(),
            n
        )));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidSubsystems(format!(
                "{perm:?} is not a permutation"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Partial transpose over the listed subsystems.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: &SubsystemDims,
    parties: &[Party],
) -> Result<ComplexMatrix> {
    let n = dims.check_matrix(m)?;
    let positions = parties
        .iter()
        .map(|&p| {
            dims.position(p)
                .ok_or_else(|| Error::InvalidSubsystems(format!("no subsystem {p} in {dims}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let digits: Vec<Vec<usize>> = (0..n).map(|i| dims.digits(i)).collect();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut r = vec![0; dims.dims.len()];
    let mut c = vec![0; dims.dims.len()];
    for row in 0..n {
        for col in 0..n {
            let z = m[(row, col)];
            if z.re == 0.0 && z.im == 0.0 {
                continue;
            }
            r.copy_from_slice(&digits[row]);
            c.copy_from_slice(&digits[col]);
            for &p in &positions {
                std::mem::swap(&mut r[p], &mut c[p]);
            }
            out[(dims.index(&r), dims.index(&c))] = z;
        }
    }
    Ok(out)
}

/// Reorders the tensor factors; new slot `i` holds old subsystem `perm[i]`.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    dims: &SubsystemDims,
    perm: &[usize],
) -> Result<(ComplexMatrix, SubsystemDims)> {
    let n = dims.check_matrix(m)?;
    let target = dims.permuted(perm)?;
    let map: Vec<usize> = (0..n)
        .map(|i| {
            let old = dims.digits(i);
            let new: Vec<usize> = perm.iter().map(|&p| old[p]).collect();
            target.index(&new)
        })
        .collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for row in 0..n {
        for col in 0..n {
            out[(map[row], map[col])] = m[(row, col)];
        }
    }
    Ok((out, target))
}

/// Same reordering applied to a state vector.
pub fn permute_vector(
    v: &[crate::linalg::C64],
    dims: &SubsystemDims,
    perm: &[usize],
) -> Result<Vec<crate::linalg::C64>> {
    if v.len() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            got: v.len(),
        });
    }
    let target = dims.permuted(perm)?;
    let mut out = vec![crate::linalg::ZERO; v.len()];
    for (i, &z) in v.iter().enumerate() {
        let old = dims.digits(i);
        let new: Vec<usize> = perm.iter().map(|&p| old[p]).collect();
        out[target.index(&new)] = z;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, C64};

    #[test]
    fn digits_roundtrip() {
        let dims = SubsystemDims::key_shield(3);
        for i in 0..dims.total() {
            assert_eq!(dims.index(&dims.digits(i)), i);
        }
        assert_eq!(dims.digits(9 + 8), vec![0, 1, 2, 2]);
        assert_eq!(dims.digits(35), vec![1, 1, 2, 2]);
    }

    #[test]
    fn new_rejects_bad_input() {
        assert!(SubsystemDims::new(vec![2, 2], vec![Party::A]).is_err());
        assert!(SubsystemDims::new(vec![2, 0], vec![Party::A, Party::B]).is_err());
        assert!(SubsystemDims::new(vec![2, 2], vec![Party::A, Party::A]).is_err());
    }

    #[test]
    fn product_state_transposes_factorwise() {
        let ra = ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(0.7, 0.0),
                C64::new(0.1, 0.2),
                C64::new(0.1, -0.2),
                C64::new(0.3, 0.0),
            ],
        )
        .unwrap();
        let rb = ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(0.4, 0.0),
                C64::new(0.0, 0.3),
                C64::new(0.0, -0.3),
                C64::new(0.6, 0.0),
            ],
        )
        .unwrap();
        let dims = SubsystemDims::new(vec![2, 2], vec![Party::A, Party::B]).unwrap();
        let pt = partial_transpose(&kron(&ra, &rb), &dims, &[Party::B]).unwrap();
        assert!(pt.max_abs_diff(&kron(&ra, &rb.transpose())) < 1e-16);
    }

    #[test]
    fn transposing_everything_is_full_transpose() {
        let dims = SubsystemDims::new(vec![2, 3], vec![Party::A, Party::B]).unwrap();
        let m = ComplexMatrix::from_fn(6, 6, |i, j| C64::new(i as f64, j as f64));
        let pt = partial_transpose(&m, &dims, &[Party::A, Party::B]).unwrap();
        assert_eq!(pt, m.transpose());
    }

    #[test]
    fn partial_transpose_rejects_unknown_party_and_size() {
        let dims = SubsystemDims::new(vec![2, 2], vec![Party::A, Party::B]).unwrap();
        let m = ComplexMatrix::identity(4);
        assert!(partial_transpose(&m, &dims, &[Party::APrime]).is_err());
        assert!(partial_transpose(&ComplexMatrix::identity(5), &dims, &[Party::A]).is_err());
    }

    #[test]
    fn permutation_to_bipartite_and_back() {
        let ks = SubsystemDims::key_shield(3);
        let bp = SubsystemDims::bipartite(3);
        let perm = ks.permutation_to(&bp).unwrap();
        assert_eq!(perm, vec![0, 2, 1, 3]);
        assert_eq!(ks.permuted(&perm).unwrap(), bp);
    }
}
