//! See-saw maximisation of the QFI over PPT states and the randomised
//! local-unitary equivalence search.
//!
//! The state step of the see-saw is a projected-gradient ascent with a Dykstra
//! feasibility projection, not an exact semidefinite program. Reported values
//! are best-found values, never bounds.

mod projection;
mod search;
mod seesaw;

pub(crate) use projection::pt;
pub use projection::{project_density, project_density_ppt, FeasibilityResiduals};
pub use search::{local_unitary, lu_equivalence_search, random_commuting_generator};
pub use seesaw::{fixed_point_residual, seesaw_maximize_qfi};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeesawConfig {
    pub max_outer_iters: usize,
    /// Step length `η = step_scale / ‖W‖_F`.
    pub step_scale: f64,
    pub dykstra_iters: usize,
    pub feas_tol: f64,
    pub objective_tol: f64,
    /// Seed for the symmetry-breaking perturbation at a vanishing SLD.
    pub seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self {
            max_outer_iters: 200,
            step_scale: 1.0,
            dykstra_iters: 500,
            feas_tol: 1e-9,
            objective_tol: 1e-7,
            seed: 0,
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_nan() || v <= 0.0 {
        return Err(Error::OutOfRange {
            name,
            value: v,
            range: "(0, inf)",
        });
    }
    Ok(())
}

impl SeesawConfig {
    pub fn validate(&self) -> Result<()> {
        positive("max_outer_iters", self.max_outer_iters as f64)?;
        positive("dykstra_iters", self.dykstra_iters as f64)?;
        positive("step_scale", self.step_scale)?;
        positive("feas_tol", self.feas_tol)?;
        positive("objective_tol", self.objective_tol)
    }
}

/// Parameters of the local-unitary search. The acceptance norm is Frobenius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub trials: usize,
    /// Evolution time `T` for a unit-norm generator.
    pub time_step: f64,
    pub step_decay: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            trials: 2000,
            time_step: 0.1,
            step_decay: 0.97,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        positive("trials", self.trials as f64)?;
        positive("time_step", self.time_step)?;
        if !(self.step_decay > 0.0 && self.step_decay <= 1.0) {
            return Err(Error::OutOfRange {
                name: "step_decay",
                value: self.step_decay,
                range: "(0, 1]",
            });
        }
        Ok(())
    }
}

/// Verbatim record of an optimiser run.
#[derive(Debug, Clone)]
pub struct OptimizeTrace {
    /// QFI per outer iteration (see-saw) or distance per accepted move (search),
    /// starting with the value at the initial state.
    pub objective: Vec<f64>,
    pub final_state: ComplexMatrix,
    pub residuals: FeasibilityResiduals,
    pub accepted: usize,
    pub notes: Vec<String>,
}

impl OptimizeTrace {
    pub fn final_objective(&self) -> f64 {
        self.objective.last().copied().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, pauli_z, SubsystemDims};
    use crate::metrology::{qfi, qfi_f1_analytic, ToleranceConfig};
    use crate::states::{build_rho_f1, hamiltonian_h, rho_f2, F1Spec, SubsystemOrder};

    #[test]
    fn config_validation() {
        assert!(SeesawConfig::default().validate().is_ok());
        assert!(SeesawConfig {
            step_scale: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SearchConfig {
            step_decay: 1.5,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SearchConfig {
            trials: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn generators_commute_with_local_hamiltonian() {
        let d = 3;
        let (k1, k2) = random_commuting_generator(d, 11);
        let z = kron(&pauli_z(), &crate::linalg::ComplexMatrix::identity(d));
        assert!(z.commutator(&k1).frobenius_norm() < 1e-12);
        assert!(z.commutator(&k2).frobenius_norm() < 1e-12);
        assert_eq!(random_commuting_generator(d, 11).0, k1);
        assert_ne!(random_commuting_generator(d, 12).0, k1);
    }

    #[test]
    fn local_unitaries_preserve_qfi() {
        let d = 2;
        let b = build_rho_f1(F1Spec::fourier(d), SubsystemOrder::KeyShield).unwrap();
        let h = hamiltonian_h(d);
        let tol = ToleranceConfig::default();
        let (k1, k2) = random_commuting_generator(d, 3);
        let u = local_unitary(&k1, &k2, 0.7, &b.dims).unwrap();
        let moved = b.rho.conjugate_by(&u);
        assert!(moved.distance(&b.rho) > 1e-3);
        let a = qfi(&b.rho, &h, &tol).unwrap();
        assert!((qfi(&moved, &h, &tol).unwrap() - a).abs() < 1e-9);
    }

    #[test]
    fn search_with_identical_states_does_nothing() {
        let b = rho_f2(2, SubsystemOrder::KeyShield).unwrap();
        let t = lu_equivalence_search(&b.rho, &b.rho, &b.dims, &SearchConfig::default()).unwrap();
        assert_eq!(t.accepted, 0);
        assert_eq!(t.final_objective(), 0.0);
    }

    #[test]
    fn search_distance_never_increases() {
        let b = rho_f2(2, SubsystemOrder::KeyShield).unwrap();
        let (k1, k2) = random_commuting_generator(2, 1);
        let u = local_unitary(&k1, &k2, 0.05, &b.dims).unwrap();
        let cfg = SearchConfig {
            trials: 300,
            ..Default::default()
        };
        let t = lu_equivalence_search(&b.rho.conjugate_by(&u), &b.rho, &b.dims, &cfg).unwrap();
        assert!(t.objective.windows(2).all(|w| w[1] < w[0]));
        assert!(t.final_objective() < t.objective[0]);
    }

    #[test]
    fn seesaw_rejects_infeasible_start() {
        let dims = SubsystemDims::key_shield(2);
        let phi = crate::states::maximally_entangled_state(2);
        let err = seesaw_maximize_qfi(&dims, &hamiltonian_h(2), &SeesawConfig::default(), &phi);
        assert!(matches!(err, Err(Error::Infeasible { .. })));
    }

    #[test]
    fn seesaw_from_f2_stays_put() {
        let b = rho_f2(2, SubsystemOrder::KeyShield).unwrap();
        let h = hamiltonian_h(2);
        let r = fixed_point_residual(&b.rho, &b.dims, &h, &SeesawConfig::default()).unwrap();
        assert!(r < 1e-2, "{r}");
    }

    #[test]
    fn seesaw_from_mixed_beats_separable_bound() {
        let dims = SubsystemDims::key_shield(2);
        let h = hamiltonian_h(2);
        let mixed = crate::linalg::ComplexMatrix::identity(16).scale(1.0 / 16.0);
        let cfg = SeesawConfig {
            max_outer_iters: 100,
            ..Default::default()
        };
        let t = seesaw_maximize_qfi(&dims, &h, &cfg, &mixed).unwrap();
        assert!(t.objective.windows(2).all(|w| w[1] >= w[0]));
        assert!(t.final_objective() > 8.0, "{:?}", t.objective);
        assert!(t.final_objective() <= qfi_f1_analytic(2).unwrap() + 1e-3);
        assert!(t.residuals.within(1e-8), "{:?}", t.residuals);
    }
}
