use crate::error::{Error, Result};
use crate::linalg::{
    kron, pauli_z, permute_subsystems, ComplexMatrix, Party, SubsystemDims, C64, ONE,
};

/// `σ^z_A + σ^z_B` on `A B A' B'`, diagonal with entries in `{2, 0, −2}`.
pub fn hamiltonian_h(d: usize) -> ComplexMatrix {
    hamiltonian_for(&SubsystemDims::key_shield(d)).expect("key/shield dims carry A and B")
}

/// The local terms `σ^z ⊗ 1_d` acting on `AA'` and on `BB'`.
pub fn local_hamiltonians(d: usize) -> (ComplexMatrix, ComplexMatrix) {
    let h = kron(&pauli_z(), &ComplexMatrix::identity(d));
    (h.clone(), h)
}

/// The Hamiltonian for any factorisation containing `A` and `B`.
///
/// `A` and `B` each contribute `diag(1,…,1,−1,…,−1)`: `σ^z` for qubits,
/// `diag(1,1,−1,−1)` for the four-level parties of the 4×4 state.
pub fn hamiltonian_for(dims: &SubsystemDims) -> Result<ComplexMatrix> {
    let mut slots = Vec::with_capacity(2);
    for party in [Party::A, Party::B] {
        let p = dims
            .position(party)
            .ok_or_else(|| Error::InvalidSubsystems(format!("no subsystem {party} in {dims}")))?;
        let dim = dims.dims()[p];
        if !dim.is_multiple_of(2) {
            return Err(Error::InvalidSubsystems(format!(
                "subsystem {party} has odd dimension {dim}"
            )));
        }
        slots.push((p, dim / 2));
    }
    let n = dims.total();
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            let digits = dims.digits(i);
            slots
                .iter()
                .map(|&(p, half)| if digits[p] < half { 1.0 } else { -1.0 })
                .sum()
        })
        .collect();
    Ok(ComplexMatrix::from_diagonal(&diag))
}

/// `p ρ + (1 − p) I/n`.
pub fn white_noise_mix(rho: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    let n = rho.ensure_square()?;
    let mut out = rho.scale(p);
    let shift = (1.0 - p) / n as f64;
    for k in 0..n {
        out[(k, k)] += shift;
    }
    Ok(out)
}

/// Local terms `(H_A, H_B)` of [`hamiltonian_for`] on `AA'` and `BB'`, each in the order key then shield.
pub fn local_terms_for(dims: &SubsystemDims) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let local = |key: Party, shield: Party| -> Result<ComplexMatrix> {
        let k = dims
            .dim_of(key)
            .ok_or_else(|| Error::InvalidSubsystems(format!("{dims} lacks {key}")))?;
        let s = dims.dim_of(shield).unwrap_or(1);
        let diag: Vec<f64> = (0..k * s)
            .map(|x| if x / s < k / 2 { 1.0 } else { -1.0 })
            .collect();
        Ok(ComplexMatrix::from_diagonal(&diag))
    };
    Ok((
        local(Party::A, Party::APrime)?,
        local(Party::B, Party::BPrime)?,
    ))
}

/// Reorders the tensor factors; new slot `i` holds old subsystem `perm[i]`.
pub fn reorder_subsystems(
    rho: &ComplexMatrix,
    dims: &SubsystemDims,
    perm: &[usize],
) -> Result<ComplexMatrix> {
    permute_subsystems(rho, dims, perm).map(|(m, _)| m)
}

fn partner(p: Party) -> Party {
    match p {
        Party::A => Party::B,
        Party::B => Party::A,
        Party::APrime => Party::BPrime,
        Party::BPrime => Party::APrime,
    }
}

/// Permutation matrix exchanging `A ↔ B` and `A' ↔ B'`.
pub fn flip_operator(dims: &SubsystemDims) -> Result<ComplexMatrix> {
    let labels = dims.labels();
    let target: Vec<usize> = labels
        .iter()
        .map(|&l| {
            let q = dims.position(partner(l)).ok_or_else(|| {
                Error::InvalidSubsystems(format!("{l} has no partner {} in {dims}", partner(l)))
            })?;
            if dims.dim_of(l) != dims.dim_of(partner(l)) {
                return Err(Error::InvalidSubsystems(format!(
                    "{l} and {} have different dimensions",
                    partner(l)
                )));
            }
            Ok(q)
        })
        .collect::<Result<_>>()?;
    let n = dims.total();
    let mut f = ComplexMatrix::zeros(n, n);
    let mut swapped = vec![0; labels.len()];
    for col in 0..n {
        let digits = dims.digits(col);
        for (p, &q) in target.iter().enumerate() {
            swapped[q] = digits[p];
        }
        f[(dims.index(&swapped), col)] = ONE;
    }
    Ok(f)
}

/// `ρ = w_S ρ_S + w_A ρ_A` with `ρ_S`, `ρ_A` normalised on the `±1` eigenspaces of the flip.
#[derive(Debug, Clone)]
pub struct SymmetrySplit {
    pub sym: ComplexMatrix,
    pub antisym: ComplexMatrix,
    pub weight_sym: f64,
    pub weight_antisym: f64,
    /// `Π₊ = (I + F)/2`.
    pub proj_sym: ComplexMatrix,
    /// `Π₋ = (I − F)/2`.
    pub proj_antisym: ComplexMatrix,
}

const FLIP_TOL: f64 = 1e-10;

pub fn sym_antisym_split(rho: &ComplexMatrix, dims: &SubsystemDims) -> Result<SymmetrySplit> {
    let f = flip_operator(dims)?;
    let residual = rho.conjugate_by(&f).distance(rho);
    if residual > FLIP_TOL {
        return Err(Error::NotFlipInvariant { residual });
    }
    let id = ComplexMatrix::identity(f.rows());
    let proj_sym = (&id + &f).scale(0.5);
    let proj_antisym = (&id - &f).scale(0.5);
    let block = |p: &ComplexMatrix| {
        let m = p.matmul(rho).matmul(p).hermitian_part();
        let w = m.trace().re;
        let normalised = if w > 0.0 { m.scale(1.0 / w) } else { m };
        (normalised, w)
    };
    let (sym, weight_sym) = block(&proj_sym);
    let (antisym, weight_antisym) = block(&proj_antisym);
    Ok(SymmetrySplit {
        sym,
        antisym,
        weight_sym,
        weight_antisym,
        proj_sym,
        proj_antisym,
    })
}

/// `|φ₊⟩⟨φ₊|_{AB} ⊗ 1_{A'B'}/d²` on `A B A' B'`.
pub fn maximally_entangled_state(d: usize) -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let phi = [h, 0.0, 0.0, h].map(|x| C64::new(x, 0.0));
    let shield = ComplexMatrix::identity(d * d).scale(1.0 / (d * d) as f64);
    kron(&ComplexMatrix::projector(&phi), &shield)
}
