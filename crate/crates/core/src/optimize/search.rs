use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    gaussian_hermitian, hermitian_exp, kron, permute_subsystems, ComplexMatrix, SubsystemDims,
};
use crate::optimize::projection::FeasibilityResiduals;
use crate::optimize::{OptimizeTrace, SearchConfig};

const REJECTION_STREAK: usize = 50;

/// `|0⟩⟨0| ⊗ G_a + |1⟩⟨1| ⊗ G_b` with Gaussian Hermitian `d×d` blocks.
fn block_generator<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let ga = gaussian_hermitian(d, rng);
    let gb = gaussian_hermitian(d, rng);
    ComplexMatrix::from_fn(2 * d, 2 * d, |r, c| match (r / d, c / d) {
        (0, 0) => ga[(r, c)],
        (1, 1) => gb[(r - d, c - d)],
        _ => crate::linalg::ZERO,
    })
}

/// Random `K₁`, `K₂` on `AA'` and `BB'` commuting with `σ^z ⊗ 1_d`.
pub fn random_commuting_generator(d: usize, seed: u64) -> (ComplexMatrix, ComplexMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k1 = block_generator(d, &mut rng);
    let k2 = block_generator(d, &mut rng);
    (k1, k2)
}

/// `e^{−iK₁T} ⊗ e^{−iK₂T}` expressed in the subsystem order of `dims`.
pub fn local_unitary(
    k1: &ComplexMatrix,
    k2: &ComplexMatrix,
    t: f64,
    dims: &SubsystemDims,
) -> Result<ComplexMatrix> {
    let u = kron(&hermitian_exp(k1, t)?, &hermitian_exp(k2, t)?);
    let d = k1.rows() / 2;
    let bip = SubsystemDims::bipartite(d);
    if *dims == bip {
        return Ok(u);
    }
    let perm = bip.permutation_to(dims)?;
    Ok(permute_subsystems(&u, &bip, &perm)?.0)
}

fn shield_dim(dims: &SubsystemDims) -> Result<usize> {
    use crate::linalg::Party;
    let d = dims
        .dim_of(Party::APrime)
        .ok_or_else(|| Error::InvalidSubsystems(format!("{dims} has no A' subsystem")))?;
    let expected = SubsystemDims::key_shield(d).permutation_to(dims);
    if expected.is_err() {
        return Err(Error::InvalidSubsystems(format!(
            "{dims} is not a 2 x 2 x {d} x {d} factorisation"
        )));
    }
    Ok(d)
}

/// Randomised local-unitary search moving `ρ_A` towards `ρ_B`.
///
/// Each trial draws commuting generators, normalises `K = K₁⊗1 + 1⊗K₂` to unit
/// Frobenius norm and accepts `e^{−iKT} ρ e^{iKT}` only if it is strictly
/// closer to `ρ_B`. `T` shrinks by `step_decay` after every run of 50
/// consecutive rejections. `objective` holds the distance after every accepted move.
pub fn lu_equivalence_search(
    rho_a: &ComplexMatrix,
    rho_b: &ComplexMatrix,
    dims: &SubsystemDims,
    cfg: &SearchConfig,
) -> Result<OptimizeTrace> {
    cfg.validate()?;
    rho_a.ensure_same_dim(rho_b)?;
    if rho_a.rows() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            got: rho_a.rows(),
        });
    }
    let d = shield_dim(dims)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rho = rho_a.clone();
    let mut dist = rho.distance(rho_b);
    let mut objective = vec![dist];
    let mut t = cfg.time_step;
    let mut streak = 0;
    let mut accepted = 0;
    let mut decays = 0;

    for _ in 0..cfg.trials {
        if dist == 0.0 {
            break;
        }
        let k1 = block_generator(d, &mut rng);
        let k2 = block_generator(d, &mut rng);
        let side = (2 * d) as f64;
        let norm = (k1.frobenius_norm().powi(2) * side
            + k2.frobenius_norm().powi(2) * side
            + 2.0 * k1.trace().re * k2.trace().re)
            .sqrt();
        let u = local_unitary(&k1, &k2, t / norm, dims)?;
        let cand = rho.conjugate_by(&u);
        let cd = cand.distance(rho_b);
        if cd < dist {
            rho = cand;
            dist = cd;
            objective.push(dist);
            accepted += 1;
            streak = 0;
        } else {
            streak += 1;
            if streak == REJECTION_STREAK {
                t *= cfg.step_decay;
                decays += 1;
                streak = 0;
            }
        }
    }

    let residuals = FeasibilityResiduals::of(&rho, dims)?;
    Ok(OptimizeTrace {
        objective,
        final_state: rho,
        residuals,
        accepted,
        notes: vec![format!(
            "time step decayed {decays} times to {t:e} (factor {} per {REJECTION_STREAK} consecutive rejections)",
            cfg.step_decay
        )],
    })
}
