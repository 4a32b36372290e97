use ppt_metrology::linalg::{random_density, SubsystemDims};
use ppt_metrology::metrology::qfi_f1_analytic;
use ppt_metrology::optimize::{
    local_unitary, lu_equivalence_search, project_density_ppt, random_commuting_generator,
    seesaw_maximize_qfi, FeasibilityResiduals, SearchConfig, SeesawConfig,
};
use ppt_metrology::states::{hamiltonian_h, rho_f2, SubsystemOrder};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_ppt_start(
    d: usize,
    seed: u64,
    cfg: &SeesawConfig,
) -> ppt_metrology::linalg::ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = random_density(4 * d * d, &mut rng);
    project_density_ppt(&r, &SubsystemDims::key_shield(d), cfg).unwrap()
}

#[test]
fn random_starts_stay_below_the_analytic_optimum() {
    let d = 2;
    let dims = SubsystemDims::key_shield(d);
    let h = hamiltonian_h(d);
    let cfg = SeesawConfig {
        max_outer_iters: 15,
        ..Default::default()
    };
    let bound = qfi_f1_analytic(d).unwrap() + 1e-3;
    for seed in 0..4 {
        let start = random_ppt_start(d, seed, &cfg);
        let t = seesaw_maximize_qfi(&dims, &h, &SeesawConfig { seed, ..cfg }, &start).unwrap();
        assert!(
            t.objective.iter().all(|&f| f <= bound),
            "seed {seed}: {:?}",
            t.objective
        );
        assert!(t.final_objective() > t.objective[0]);
        assert!(t.residuals.within(1e-8), "{:?}", t.residuals);
    }
}

#[test]
fn seesaw_is_deterministic() {
    let d = 2;
    let dims = SubsystemDims::key_shield(d);
    let cfg = SeesawConfig {
        max_outer_iters: 5,
        seed: 9,
        ..Default::default()
    };
    let start = random_ppt_start(d, 1, &cfg);
    let a = seesaw_maximize_qfi(&dims, &hamiltonian_h(d), &cfg, &start).unwrap();
    let b = seesaw_maximize_qfi(&dims, &hamiltonian_h(d), &cfg, &start).unwrap();
    assert_eq!(a.objective, b.objective);
    assert_eq!(a.final_state, b.final_state);
}

#[test]
fn projection_of_random_matrices_is_feasible() {
    let cfg = SeesawConfig::default();
    for d in [2, 3] {
        let dims = SubsystemDims::key_shield(d);
        let out = random_ppt_start(d, 5, &cfg);
        let r = FeasibilityResiduals::of(&out, &dims).unwrap();
        assert!(r.within(cfg.feas_tol), "d = {d}: {r:?}");
    }
}

#[test]
fn plant_and_recover() {
    let b = rho_f2(2, SubsystemOrder::KeyShield).unwrap();
    let (k1, k2) = random_commuting_generator(2, 7);
    let u = local_unitary(&k1, &k2, 0.3 / k1.frobenius_norm(), &b.dims).unwrap();
    let planted = b.rho.conjugate_by(&u);
    assert!(planted.distance(&b.rho) > 1e-2);
    let cfg = SearchConfig {
        trials: 20_000,
        ..Default::default()
    };
    let t = lu_equivalence_search(&planted, &b.rho, &b.dims, &cfg).unwrap();
    assert!(t.final_objective() < 1e-3, "{:?}", t.objective.last());
    assert!(t.residuals.within(1e-10));
}

#[test]
fn search_works_in_bipartite_order() {
    let b = rho_f2(2, SubsystemOrder::Bipartite).unwrap();
    let (k1, k2) = random_commuting_generator(2, 4);
    let u = local_unitary(&k1, &k2, 0.2 / k1.frobenius_norm(), &b.dims).unwrap();
    let planted = b.rho.conjugate_by(&u);
    let cfg = SearchConfig {
        trials: 20_000,
        seed: 3,
        ..Default::default()
    };
    let t = lu_equivalence_search(&planted, &b.rho, &b.dims, &cfg).unwrap();
    assert!(t.final_objective() < 1e-3, "{:?}", t.objective.last());
}
