use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, partial_transpose, ComplexMatrix, Party, SubsystemDims, C64};
use crate::optimize::SeesawConfig;

/// Parties transposed by the PPT condition: `B` and everything it owns.
pub(crate) fn pt_parties(dims: &SubsystemDims) -> Vec<Party> {
    [Party::B, Party::BPrime]
        .into_iter()
        .filter(|p| dims.position(*p).is_some())
        .collect()
}

pub(crate) fn pt(m: &ComplexMatrix, dims: &SubsystemDims) -> Result<ComplexMatrix> {
    partial_transpose(m, dims, &pt_parties(dims))
}

/// Euclidean projection of a real vector onto the probability simplex.
fn simplex_projection(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    values.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Nearest density matrix in Frobenius norm.
pub fn project_density(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = hermitian_eig(m)?;
    let proj = simplex_projection(&e.values);
    let n = proj.len();
    let v = &e.vectors;
    let scaled = ComplexMatrix::from_fn(n, n, |i, k| v[(i, k)] * proj[k]);
    Ok(scaled.matmul(&v.adjoint()).hermitian_part())
}

/// `|tr ρ − 1|`, `λ_min(ρ)`, `λ_min(ρ^Γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityResiduals {
    pub trace: f64,
    pub min_eig: f64,
    pub min_eig_pt: f64,
}

impl FeasibilityResiduals {
    pub fn of(rho: &ComplexMatrix, dims: &SubsystemDims) -> Result<Self> {
        Ok(Self {
            trace: (rho.trace().re - 1.0).abs(),
            min_eig: hermitian_eig(rho)?.min(),
            min_eig_pt: hermitian_eig(&pt(rho, dims)?)?.min(),
        })
    }

    pub fn worst(&self) -> f64 {
        self.trace.max(-self.min_eig).max(-self.min_eig_pt).max(0.0)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.worst() <= tol
    }
}

/// Dykstra alternating projections onto `{ρ ≥ 0, tr ρ = 1}` and `{ρ^Γ ≥ 0, tr ρ = 1}`.
///
/// The iterate after the loop is PPT with unit trace; a final admixture of
/// `I/n` removes the remaining negative eigenvalue of `ρ` without breaking PPT.
pub fn project_density_ppt(
    m: &ComplexMatrix,
    dims: &SubsystemDims,
    cfg: &SeesawConfig,
) -> Result<ComplexMatrix> {
    let n = m.ensure_square()?;
    if n != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            got: n,
        });
    }
    let mut x = m.hermitian_part();
    let mut p = ComplexMatrix::zeros(n, n);
    let mut q = ComplexMatrix::zeros(n, n);
    let mut min_eig = f64::NEG_INFINITY;
    for _ in 0..cfg.dykstra_iters {
        let xp = &x + &p;
        let y = project_density(&xp)?;
        p = &xp - &y;
        let yq = &y + &q;
        let x_new = pt(&project_density(&pt(&yq, dims)?)?, dims)?;
        q = &yq - &x_new;
        let moved = x_new.distance(&x);
        x = x_new;
        if moved <= cfg.feas_tol {
            min_eig = hermitian_eig(&x)?.min();
            if -min_eig <= cfg.feas_tol {
                break;
            }
        }
    }
    if min_eig == f64::NEG_INFINITY {
        min_eig = hermitian_eig(&x)?.min();
    }
    if -min_eig > cfg.feas_tol.sqrt() {
        let r = FeasibilityResiduals::of(&x, dims)?;
        return Err(Error::ProjectionNotConverged {
            iterations: cfg.dykstra_iters,
            psd: -r.min_eig,
            ppt: -r.min_eig_pt,
            trace: r.trace,
        });
    }
    Ok(repair(&x, min_eig))
}

/// Mixes in just enough `I/n` to lift a small negative eigenvalue to zero.
fn repair(x: &ComplexMatrix, min_eig: f64) -> ComplexMatrix {
    let n = x.rows();
    let mut out = x.hermitian_part();
    let tr = out.trace().re;
    out = out.scale(1.0 / tr);
    let deficit = (-min_eig / tr).max(0.0);
    if deficit > 0.0 {
        let t = deficit / (deficit + 1.0 / n as f64);
        out = out.scale(1.0 - t);
        for k in 0..n {
            out[(k, k)] += C64::new(t / n as f64, 0.0);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::rho_f2;
    use crate::states::SubsystemOrder;

    #[test]
    fn simplex_projection_cases() {
        assert_eq!(simplex_projection(&[0.5, 0.5]), vec![0.5, 0.5]);
        assert_eq!(simplex_projection(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = simplex_projection(&[0.3, -0.2, 0.1]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(p.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn feasible_inputs_are_fixed_points() {
        let cfg = SeesawConfig::default();
        let b = rho_f2(2, SubsystemOrder::KeyShield).unwrap();
        let out = project_density_ppt(&b.rho, &b.dims, &cfg).unwrap();
        assert!(out.distance(&b.rho) < 1e-9);
        let mixed = ComplexMatrix::identity(16).scale(1.0 / 16.0);
        assert!(
            project_density_ppt(&mixed, &b.dims, &cfg)
                .unwrap()
                .distance(&mixed)
                < 1e-12
        );
    }

    #[test]
    fn entangled_input_becomes_ppt() {
        let cfg = SeesawConfig::default();
        let dims = SubsystemDims::key_shield(2);
        let phi = crate::states::maximally_entangled_state(2);
        let out = project_density_ppt(&phi, &dims, &cfg).unwrap();
        let r = FeasibilityResiduals::of(&out, &dims).unwrap();
        assert!(r.within(cfg.feas_tol), "{r:?}");
    }
}
