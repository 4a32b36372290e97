use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{gaussian_hermitian, ComplexMatrix, SubsystemDims};
use crate::metrology::{qfi, seesaw_objective, seesaw_weight, sld, ToleranceConfig};
use crate::optimize::projection::{project_density_ppt, FeasibilityResiduals};
use crate::optimize::{OptimizeTrace, SeesawConfig};

const INITIAL_FEASIBILITY: f64 = 1e-8;
const MAX_HALVINGS: usize = 30;
const ZERO_SLD: f64 = 1e-14;
const PERTURBATION_NORM: f64 = 1e-6;

/// One accepted or rejected `ρ`-step for a fixed measurement operator.
struct Step {
    state: ComplexMatrix,
    objective: f64,
    accepted: bool,
}

fn rho_step(
    rho: &ComplexMatrix,
    w: &ComplexMatrix,
    m: &ComplexMatrix,
    h: &ComplexMatrix,
    dims: &SubsystemDims,
    cfg: &SeesawConfig,
) -> Result<Step> {
    let base = seesaw_objective(rho, m, h)?;
    let wn = w.frobenius_norm();
    if wn == 0.0 {
        return Ok(Step {
            state: rho.clone(),
            objective: base,
            accepted: false,
        });
    }
    let mut eta = cfg.step_scale / wn;
    for _ in 0..MAX_HALVINGS {
        let mut trial = rho.clone();
        trial.add_scaled(w, eta.into());
        if let Ok(cand) = project_density_ppt(&trial, dims, cfg) {
            let obj = seesaw_objective(&cand, m, h)?;
            if obj > base {
                return Ok(Step {
                    state: cand,
                    objective: obj,
                    accepted: true,
                });
            }
        }
        eta *= 0.5;
    }
    Ok(Step {
        state: rho.clone(),
        objective: base,
        accepted: false,
    })
}

/// See-saw ascent of the QFI over PPT states.
///
/// Each outer iteration sets `M` to the SLD of the current state and takes one
/// projected-gradient step on `tr(ρW)`, `W = −M² + 2i[H, M]`, halving the step
/// until the objective increases. `objective` records the QFI after every
/// outer iteration, starting with the initial state.
pub fn seesaw_maximize_qfi(
    dims: &SubsystemDims,
    h: &ComplexMatrix,
    cfg: &SeesawConfig,
    initial: &ComplexMatrix,
) -> Result<OptimizeTrace> {
    cfg.validate()?;
    let r0 = FeasibilityResiduals::of(initial, dims)?;
    if !r0.within(INITIAL_FEASIBILITY) {
        return Err(Error::Infeasible {
            trace: r0.trace,
            min_eig: r0.min_eig,
            min_eig_pt: r0.min_eig_pt,
        });
    }
    let tol = ToleranceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rho = initial.hermitian_part();
    let mut current = qfi(&rho, h, &tol)?;
    let mut objective = vec![current];
    let mut notes = Vec::new();
    let mut accepted = 0;
    let mut perturbed = false;

    for outer in 0..cfg.max_outer_iters {
        let mut m = sld(&rho, h, &tol)?;
        if m.max_abs() < ZERO_SLD && !perturbed {
            let g = gaussian_hermitian(rho.rows(), &mut rng);
            m = g.scale(PERTURBATION_NORM / g.frobenius_norm());
            perturbed = true;
            notes.push(format!(
                "iteration {outer}: SLD vanishes, measurement perturbed by a random Hermitian matrix of norm {PERTURBATION_NORM:e}"
            ));
        }
        let w = seesaw_weight(&m, h);
        let step = rho_step(&rho, &w, &m, h, dims, cfg)?;
        if !step.accepted {
            notes.push(format!("iteration {outer}: no ascent step found, stopping"));
            break;
        }
        accepted += 1;
        rho = step.state;
        let next = qfi(&rho, h, &tol)?;
        debug_assert!(step.objective <= next + 1e-9);
        objective.push(next);
        let gain = next - current;
        current = next;
        if gain < cfg.objective_tol {
            break;
        }
    }

    let residuals = FeasibilityResiduals::of(&rho, dims)?;
    Ok(OptimizeTrace {
        objective,
        final_state: rho,
        residuals,
        accepted,
        notes,
    })
}

/// Frobenius distance moved by exactly one outer see-saw iteration started at `rho`.
pub fn fixed_point_residual(
    rho: &ComplexMatrix,
    dims: &SubsystemDims,
    h: &ComplexMatrix,
    cfg: &SeesawConfig,
) -> Result<f64> {
    let one = SeesawConfig {
        max_outer_iters: 1,
        ..*cfg
    };
    let trace = seesaw_maximize_qfi(dims, h, &one, rho)?;
    Ok(trace.final_state.distance(rho))
}
