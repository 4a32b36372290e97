//! Named numerical checks of every structural claim about the two state families.
//!
//! A check passes iff `residual ≤ tolerance`. Checks that witness an
//! inequality in the other direction (a quantity that must be large) record
//! the negated quantity and the negated threshold, so the rule stays the same.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, inner, random_density, rank_of, ComplexMatrix, Party, SubsystemDims, C64, ONE,
    RANK_TOL,
};
use crate::metrology::{
    error_propagation, expectation, gain, gain_analytic, qfi, qfi_f1_analytic, qfi_noisy_analytic,
    robustness_analytic, robustness_numeric, seesaw_objective, sep_bound, sld, variance,
    ToleranceConfig,
};
use crate::optimize::pt;
use crate::states::{
    build_rho_4x4, build_rho_f1, build_rho_f2, default_q_family, f1_from_private_bits,
    f2_supported, flip_operator, hamiltonian_for, local_terms_for, maximally_entangled_state, p1,
    p2, p_family, p_matrices, q_family_d3, relabel_to_4x4, relabel_vector_to_4x4,
    sym_antisym_split, F1Spec, Family, KeyFlip, QFamily, StateBundle, SubsystemOrder, UnitaryKind,
    F2_SUPPORTED,
};

/// Entrywise structural identities.
pub const TOL_STRUCT: f64 = 1e-12;
/// Analytic identities evaluated through an eigensolver.
pub const TOL_EIG: f64 = 1e-8;
/// Mean energy of the family states.
pub const TOL_MEAN: f64 = 1e-10;
/// Robustness bisection against the closed form.
pub const TOL_ROBUST: f64 = 1e-6;
/// Minimal flip asymmetry witnessing a non-invariant state.
pub const WITNESS_ASYMMETRY: f64 = 1e-3;
/// Flip invariance of the 4×4 state.
pub const TOL_FLIP_4X4: f64 = 1e-14;

/// Mixing weights sampled for the noise curve.
pub const NOISE_SAMPLES: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Claim verified by every check whose name starts with the given group.
pub const CLAIMS: &[(&str, &str)] = &[
    (
        "d3",
        "Q-matrix family for d = 3: zero pattern, grouping, t and s vectors",
    ),
    ("flip", "permutation invariance of the 4x4 state"),
    ("gain", "metrological gain 2√d/(1+√d)"),
    ("obs1", "Observation 1: QFI = 16√d/(1+√d)"),
    ("obs2", "Observation 2: QFI = 4 Var(H), <H> = 0"),
    ("obs3", "Observation 3: QFI of the white-noise mixture"),
    ("obs4", "Observation 4: H couples v_ij only to v⁻_ij"),
    ("obs5", "Observation 5: H couples z_ij only to z⁻_ij"),
    (
        "obs6",
        "Observation 6: flip invariance iff u is real and symmetric",
    ),
    ("obs7", "Observation 7: maximal QFI for H is 16"),
    (
        "obs8",
        "Observation 8: Σ|t_m><t_m| is invariant under partial transposition",
    ),
    (
        "pmat",
        "P-matrix construction: positions, first row, recursion, product closure",
    ),
    (
        "private_bit",
        "first family as a mixture of two private bits",
    ),
    (
        "pt",
        "partial transpose: invariance of the first family, eigendecomposition of the second",
    ),
    (
        "qfamily",
        "Q-family structure: orthogonality, q̄ grouping, normalisation",
    ),
    ("rank", "ranks of the state and of its partial transpose"),
    ("relabel", "4x4 state as a relabelled first-family state"),
    ("robustness", "critical white-noise fraction"),
    ("sepbound", "separable bound from local spectra"),
    (
        "sld",
        "SLD saturates the error-propagation formula and the see-saw objective",
    ),
    ("spectrum", "spectral decomposition of the state"),
    (
        "split",
        "symmetric/antisymmetric split of the first family at d = 2",
    ),
    ("state", "valid PPT density matrix"),
];

/// The claim a check name maps to, via its group prefix.
pub fn claim_of(name: &str) -> Option<&'static str> {
    let group = name.split('.').next()?;
    CLAIMS.iter().find(|(g, _)| *g == group).map(|(_, c)| *c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub details: String,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        residual: f64,
        tolerance: f64,
        details: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed: residual <= tolerance,
            residual,
            tolerance,
            details: details.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    /// `None` when the report spans several dimensions.
    pub d: Option<usize>,
    pub family: String,
}

impl VerificationReport {
    fn new(d: Option<usize>, family: impl Into<String>, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        Self {
            checks,
            d,
            family: family.into(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Concatenates reports; the result is re-sorted by name.
    pub fn merge(reports: impl IntoIterator<Item = VerificationReport>) -> Self {
        let mut checks = Vec::new();
        let mut families = Vec::new();
        let mut dims = Vec::new();
        for r in reports {
            checks.extend(r.checks);
            families.push(r.family);
            dims.push(r.d);
        }
        let d = match dims.first() {
            Some(&first) if dims.iter().all(|&x| x == first) => first,
            _ => None,
        };
        Self::new(d, families.join("+"), checks)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.d.map_or_else(|| "-".to_string(), |d| d.to_string());
        writeln!(f, "family {} d {d}", self.family)?;
        for c in &self.checks {
            writeln!(
                f,
                "{} {} residual={:.3e} tolerance={:.1e} {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance,
                c.details
            )?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub tol: ToleranceConfig,
    /// Seed of the random states in the maximal-QFI check.
    pub seed: u64,
    pub random_states: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            tol: ToleranceConfig::default(),
            seed: 0,
            random_states: 100,
        }
    }
}

fn vec_distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn scaled(v: &[C64], s: f64) -> Vec<C64> {
    v.iter().map(|z| z * s).collect()
}

fn combine(a: &[C64], ca: f64, b: &[C64], cb: f64) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x * ca + y * cb).collect()
}

/// `1 − |⟨a|b⟩|` for unit vectors: zero iff equal up to a phase.
fn phase_distance(a: &[C64], b: &[C64]) -> f64 {
    (1.0 - inner(a, b).norm()).abs()
}

fn gram_residual(vs: &[&[C64]]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner(a, b) - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

fn family_tag(family: Family) -> &'static str {
    match family {
        Family::F1(_) => "f1",
        Family::F2 => "f2",
        Family::FourByFour => "4x4",
    }
}

/// Builds the state of `family` at `d` in the default subsystem order.
pub fn build_family(d: usize, family: Family) -> Result<StateBundle> {
    match family {
        Family::F1(u) => build_rho_f1(F1Spec::new(d, u)?, SubsystemOrder::KeyShield),
        Family::F2 => {
            if !f2_supported(d) {
                return Err(Error::UnsupportedDimension {
                    d,
                    family: "F2",
                    supported: F2_SUPPORTED,
                });
            }
            build_rho_f2(d, &default_q_family(d)?, SubsystemOrder::KeyShield)
        }
        Family::FourByFour => {
            if d != 2 {
                return Err(Error::UnsupportedDimension {
                    d,
                    family: "4x4",
                    supported: "{2}",
                });
            }
            Ok(build_rho_4x4())
        }
    }
}

/// Runs the family checks on `family` at dimension `d`.
pub fn verify_family(d: usize, family: Family, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let bundle = build_family(d, family)?;
    verify_bundle(&bundle, d, cfg)
}

/// Runs the family checks on a given state, which is meant to be the state of
/// `bundle.family` at dimension `d`; the labelled vectors are taken from `bundle`.
pub fn verify_bundle(
    bundle: &StateBundle,
    d: usize,
    cfg: &VerifyConfig,
) -> Result<VerificationReport> {
    cfg.tol.validate()?;
    let rho = &bundle.rho;
    let dims = &bundle.dims;
    if rho.rows() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            got: rho.rows(),
        });
    }
    let h = hamiltonian_for(dims)?;
    let mut checks = Vec::new();
    let eig = hermitian_eig(rho)?;
    let rho_pt = pt(rho, dims)?;
    let eig_pt = hermitian_eig(&rho_pt)?;
    checks.push(Check::new(
        "state.trace",
        (rho.trace().re - 1.0).abs(),
        TOL_STRUCT,
        "",
    ));
    checks.push(Check::new(
        "state.hermitian",
        rho.hermitian_residual(),
        TOL_STRUCT,
        "",
    ));
    checks.push(Check::new(
        "state.psd",
        (-eig.min()).max(0.0),
        TOL_STRUCT,
        format!("min eigenvalue {:.3e}", eig.min()),
    ));
    checks.push(Check::new(
        "state.ppt",
        (-eig_pt.min()).max(0.0),
        TOL_STRUCT,
        format!("min eigenvalue of partial transpose {:.3e}", eig_pt.min()),
    ));

    let (rank_expected, rank_pt_expected) = match bundle.family {
        Family::F1(_) => (d * d + d, d * d + d),
        Family::F2 => (d * d + 2 * d, 2 * d * d + d),
        Family::FourByFour => (6, 6),
    };
    let rank = rank_of(&eig.values, RANK_TOL);
    let rank_pt = rank_of(&eig_pt.values, RANK_TOL);
    checks.push(Check::new(
        "rank.rho",
        rank.abs_diff(rank_expected) as f64,
        0.0,
        format!("rank {rank}, expected {rank_expected}"),
    ));
    checks.push(Check::new(
        "rank.pt",
        rank_pt.abs_diff(rank_pt_expected) as f64,
        0.0,
        format!("rank {rank_pt}, expected {rank_pt_expected}"),
    ));

    spectrum_checks(bundle, &eig.values, &mut checks);
    match bundle.family {
        Family::F1(_) => {
            checks.push(Check::new(
                "pt.invariance",
                rho_pt.max_abs_diff(rho),
                TOL_STRUCT,
                "max |ρ^Γ − ρ|",
            ));
            checks.push(matrix_element_check(
                bundle,
                &h,
                "obs4.matrix_elements",
                "v",
                &["w"],
            ));
        }
        Family::F2 => {
            let fam = default_q_family(d)?;
            pt_f2_checks(&fam, &rho_pt, &eig_pt.values, &mut checks)?;
            checks.push(matrix_element_check(
                bundle,
                &h,
                "obs5.matrix_elements",
                "z",
                &["s", "e10"],
            ));
        }
        Family::FourByFour => {}
    }

    let tol = &cfg.tol;
    let f = qfi(rho, &h, tol)?;
    let analytic = qfi_f1_analytic(d)?;
    checks.push(Check::new(
        "obs1.qfi",
        (f - analytic).abs(),
        TOL_EIG,
        format!("qfi {f:.12}, closed form {analytic:.12}"),
    ));
    let var = variance(rho, &h)?;
    let mean = expectation(rho, &h)?;
    checks.push(Check::new(
        "obs2.variance",
        (f - 4.0 * var).abs(),
        TOL_EIG,
        format!("4 Var(H) = {:.12}", 4.0 * var),
    ));
    checks.push(Check::new(
        "obs2.mean",
        mean.abs(),
        TOL_MEAN,
        format!("<H> = {mean:.3e}"),
    ));

    for p in NOISE_SAMPLES {
        let mixed = crate::states::white_noise_mix(rho, p)?;
        let fp = qfi(&mixed, &h, tol)?;
        let ap = qfi_noisy_analytic(d, p)?;
        checks.push(Check::new(
            format!("obs3.noise_p{p:.1}"),
            (fp - ap).abs(),
            TOL_EIG,
            format!("qfi {fp:.12}, closed form {ap:.12}"),
        ));
    }

    let (ha, hb) = local_terms_for(dims)?;
    let sep = sep_bound(&ha, &hb)?;
    checks.push(Check::new(
        "sepbound.value",
        (sep - 8.0).abs(),
        0.0,
        format!("bound {sep}"),
    ));
    let g = gain(f, sep);
    let ga = gain_analytic(d)?;
    checks.push(Check::new(
        "gain.value",
        (g - ga).abs(),
        TOL_EIG,
        format!("gain {g:.12}, closed form {ga:.12}"),
    ));
    let r = robustness_numeric(rho, &h, sep, tol)?;
    let ra = robustness_analytic(d)?;
    checks.push(Check::new(
        "robustness.bisection",
        (r - ra).abs(),
        TOL_ROBUST,
        format!("bisection {r:.10}, closed form {ra:.10}"),
    ));

    let l = sld(rho, &h, tol)?;
    let ep = error_propagation(rho, &l, &h)?;
    checks.push(Check::new(
        "sld.error_propagation",
        (ep * f - 1.0).abs(),
        TOL_EIG,
        format!("1/error = {:.12}", 1.0 / ep),
    ));
    let obj = seesaw_objective(rho, &l, &h)?;
    checks.push(Check::new(
        "sld.objective",
        (obj - f).abs() / f.max(1.0),
        TOL_EIG,
        format!("objective {obj:.12}"),
    ));

    obs7_checks(dims, &h, d, cfg, &mut checks)?;

    Ok(VerificationReport::new(
        Some(d),
        family_label(bundle.family),
        checks,
    ))
}

fn family_label(family: Family) -> String {
    match family {
        Family::F1(u) => format!("f1-{u}"),
        other => family_tag(other).to_string(),
    }
}

fn spectrum_checks(bundle: &StateBundle, values: &[f64], checks: &mut Vec<Check>) {
    let n = bundle.rho.rows();
    if bundle.eigvecs_nonzero.is_empty() {
        return;
    }
    let all: Vec<&[C64]> = bundle
        .eigvecs_nonzero
        .iter()
        .chain(&bundle.eigvecs_zero_named)
        .map(|v| v.vector.as_slice())
        .collect();
    let eig_res = bundle
        .eigvecs_nonzero
        .iter()
        .chain(&bundle.eigvecs_zero_named)
        .map(|v| v.eigen_residual(&bundle.rho))
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "spectrum.eigenvectors",
        eig_res.max(gram_residual(&all)),
        TOL_STRUCT,
        format!(
            "{} labelled vectors, max ‖ρv − λv‖ and Gram residual",
            all.len()
        ),
    ));
    let mut expected: Vec<f64> = bundle
        .eigvecs_nonzero
        .iter()
        .map(|v| v.eigenvalue)
        .collect();
    expected.resize(n, 0.0);
    expected.sort_by(|a, b| b.total_cmp(a));
    let diff = expected
        .iter()
        .zip(values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "spectrum.values",
        diff,
        TOL_EIG,
        "sorted spectrum against the labelled eigenvalues",
    ));
}

/// `‖H x_ij − 2 x⁻_ij‖` over all pairs and `‖H y‖` over the other nonzero eigenvectors.
fn matrix_element_check(
    bundle: &StateBundle,
    h: &ComplexMatrix,
    name: &str,
    paired: &str,
    annihilated: &[&str],
) -> Check {
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for v in &bundle.eigvecs_nonzero {
        let (prefix, suffix) = v.label.split_once('_').unwrap_or((&v.label, ""));
        let hv = h.mat_vec(&v.vector);
        if prefix == paired {
            if let Some(minus) = bundle.find(&format!("{paired}-_{suffix}")) {
                worst = worst.max(vec_distance(&hv, &scaled(&minus.vector, 2.0)));
                worst = worst.max((inner(&minus.vector, &hv).re - 2.0).abs());
                pairs += 1;
            } else {
                worst = f64::INFINITY;
            }
        } else if annihilated.contains(&prefix) {
            worst = worst.max(crate::linalg::norm(&hv));
        }
    }
    Check::new(
        name,
        worst,
        TOL_STRUCT,
        format!("{pairs} pairs with <x|H|x⁻> = 2, H annihilates {annihilated:?}"),
    )
}

fn pt_f2_checks(
    fam: &QFamily,
    rho_pt: &ComplexMatrix,
    values_pt: &[f64],
    checks: &mut Vec<Check>,
) -> Result<()> {
    let d = fam.d;
    let df = d as f64;
    let n = 4 * d * d;
    let mut target = ComplexMatrix::zeros(n, n);
    let w1 = C64::new(p1(d) / (2.0 * df * df), 0.0);
    for i in 0..d {
        for j in 0..d {
            let a = crate::states::ket(d, 0, 0, i, j);
            let b = crate::states::ket(d, 1, 1, j, i);
            target.add_outer(&a, &a, w1);
            target.add_outer(&b, &b, w1);
        }
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for m in 0..d {
        let v = combine(&fam.t_vector(m), h, &fam.qbar_vector(m), h);
        target.add_outer(&v, &v, C64::new(p2(d) / df, 0.0));
    }
    checks.push(Check::new(
        "pt.decomposition",
        rho_pt.max_abs_diff(&target),
        TOL_STRUCT,
        "ρ^Γ against its closed-form eigendecomposition",
    ));
    let mut expected = vec![p2(d) / df; d];
    expected.extend(std::iter::repeat_n(p1(d) / (2.0 * df * df), 2 * d * d));
    expected.resize(n, 0.0);
    let diff = expected
        .iter()
        .zip(values_pt)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "pt.spectrum",
        diff,
        TOL_EIG,
        format!("{d} x p2/d, {} x p1/(2d²)", 2 * d * d),
    ));
    Ok(())
}

fn obs7_checks(
    dims: &SubsystemDims,
    h: &ComplexMatrix,
    d: usize,
    cfg: &VerifyConfig,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let n = dims.total();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..cfg.random_states {
        let r = random_density(n, &mut rng);
        worst = worst.max(qfi(&r, h, &cfg.tol)? - 16.0);
    }
    if cfg.random_states > 0 {
        checks.push(Check::new(
            "obs7.random_states",
            worst.max(0.0),
            TOL_EIG,
            format!(
                "{} random states, max QFI − 16 = {worst:.3e}",
                cfg.random_states
            ),
        ));
    }
    if dims.dim_of(Party::APrime) == Some(d) {
        let me = maximally_entangled_state(d);
        let me = if *dims == SubsystemDims::key_shield(d) {
            me
        } else {
            let perm = SubsystemDims::key_shield(d).permutation_to(dims)?;
            crate::linalg::permute_subsystems(&me, &SubsystemDims::key_shield(d), &perm)?.0
        };
        let f = qfi(&me, h, &cfg.tol)?;
        checks.push(Check::new(
            "obs7.maximally_entangled",
            (f - 16.0).abs(),
            TOL_EIG,
            format!("qfi {f:.12}"),
        ));
    }
    Ok(())
}

/// Private-bit construction, the 4×4 relabelling and the symmetric split.
pub fn verify_equivalences(cfg: &VerifyConfig) -> Result<VerificationReport> {
    cfg.tol.validate()?;
    let mut checks = Vec::new();

    let specs = [
        F1Spec::fourier(2),
        F1Spec::fourier(3),
        F1Spec::fourier(4),
        F1Spec::new(2, UnitaryKind::Hadamard)?,
        F1Spec::new(4, UnitaryKind::Hadamard)?,
    ];
    let mut worst: f64 = 0.0;
    for spec in specs {
        let direct = build_rho_f1(spec, SubsystemOrder::KeyShield)?.rho;
        let via = f1_from_private_bits(spec, KeyFlip::B)?;
        worst = worst.max(via.max_abs_diff(&direct));
    }
    checks.push(Check::new(
        "private_bit.construction",
        worst,
        TOL_STRUCT,
        "p1 ρ(X) + p2 σx_B ρ(Y) σx_B against the direct state, d = 2, 3, 4",
    ));

    let f1 = build_rho_f1(
        F1Spec::new(2, UnitaryKind::Hadamard)?,
        SubsystemOrder::KeyShield,
    )?;
    let four = build_rho_4x4();
    let relabelled = relabel_to_4x4(&f1.rho)?;
    checks.push(Check::new(
        "relabel.state",
        relabelled.max_abs_diff(&four.rho),
        TOL_STRUCT,
        "relabelled ρ_F1(2, hadamard) against ρ_4x4",
    ));

    let psi = |k: usize| four.find(&format!("Psi_{k}")).map(|v| v.vector.clone());
    let mut worst: f64 = 0.0;
    for (label, k) in [("v_00", 3), ("v_11", 4), ("w_0", 5), ("w_1", 6)] {
        let v = relabel_vector_to_4x4(&f1.find(label).expect("labelled vector").vector)?;
        let target = psi(k).expect("Psi vector");
        worst = worst.max(phase_distance(&v, &target));
    }
    let span_f1 = {
        let mut p = ComplexMatrix::zeros(16, 16);
        for label in ["v_01", "v_10"] {
            let v = relabel_vector_to_4x4(&f1.find(label).expect("labelled vector").vector)?;
            p.add_outer(&v, &v, ONE);
        }
        p
    };
    let span_4x4 = {
        let mut p = ComplexMatrix::zeros(16, 16);
        for k in [1, 2] {
            let v = psi(k).expect("Psi vector");
            p.add_outer(&v, &v, ONE);
        }
        p
    };
    worst = worst.max(span_f1.max_abs_diff(&span_4x4));
    checks.push(Check::new(
        "relabel.eigenvectors",
        worst,
        TOL_STRUCT,
        "v00→Ψ3, v11→Ψ4, w0→Ψ5, w1→Ψ6 up to phase; span{v01, v10} = span{Ψ1, Ψ2}",
    ));
    let q = (2f64.sqrt() - 1.0) / 2.0;
    let p = (1.0 - 2.0 * q) / 4.0;
    let ev = (q - p2(2) / 2.0).abs().max((p - p1(2) / 4.0).abs());
    checks.push(Check::new(
        "relabel.eigenvalues",
        ev,
        TOL_STRUCT,
        format!("q = Λ_w = {q:.15}"),
    ));
    let flip = flip_operator(&four.dims)?;
    checks.push(Check::new(
        "flip.rho_4x4",
        four.rho.conjugate_by(&flip).max_abs_diff(&four.rho),
        TOL_FLIP_4X4,
        "max |FρF − ρ|",
    ));

    split_checks(&mut checks)?;
    Ok(VerificationReport::new(Some(2), "equivalences", checks))
}

fn split_checks(checks: &mut Vec<Check>) -> Result<()> {
    let f1 = build_rho_f1(
        F1Spec::new(2, UnitaryKind::Hadamard)?,
        SubsystemOrder::Bipartite,
    )?;
    let dims = &f1.dims;
    let flip = flip_operator(dims)?;
    let get = |l: &str| f1.find(l).expect("labelled vector").vector.clone();
    let (v00, v01, v10, v11, w0, w1) = (
        get("v_00"),
        get("v_01"),
        get("v_10"),
        get("v_11"),
        get("w_0"),
        get("w_1"),
    );
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t = 2f64.sqrt() - 1.0;
    let nt = 1.0 / (1.0 + t * t).sqrt();
    let v01p = combine(&v01, h, &v10, h);
    let v10p = combine(&v01, h, &v10, -h);
    let w0p = combine(&w0, nt, &w1, t * nt);
    let w1p = combine(&w1, nt, &w0, -t * nt);

    // |αβ⟩_{AA'}|γδ⟩_{BB'} at index 8α + 4β + 2γ + δ.
    let explicit = |terms: &[(usize, f64)]| {
        let mut v = vec![C64::new(0.0, 0.0); 16];
        for &(idx, c) in terms {
            v[idx] += C64::new(c, 0.0);
        }
        v
    };
    let cp = 0.5 * (1.0 + h).sqrt();
    let cm = 0.5 * (1.0 - h).sqrt();
    let listed_v01p = explicit(&[(0b0001, 0.5), (0b0100, 0.5), (0b1110, 0.5), (0b1011, 0.5)]);
    let listed_v10p = explicit(&[(0b0001, 0.5), (0b0100, -0.5), (0b1110, 0.5), (0b1011, -0.5)]);
    let listed_w0p = explicit(&[(0b0010, cp), (0b1000, cp), (0b0111, cm), (0b1101, cm)]);
    let listed_w1p = explicit(&[(0b0111, cp), (0b1101, -cp), (0b1000, cm), (0b0010, -cm)]);
    let listed = [
        phase_distance(&v01p, &listed_v01p),
        phase_distance(&v10p, &listed_v10p),
        phase_distance(&w0p, &listed_w0p),
        phase_distance(&w1p, &listed_w1p),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    checks.push(Check::new(
        "split.listed_vectors",
        listed,
        TOL_STRUCT,
        format!(
            "rotated eigenvectors with t = √2−1 against the c± forms, c+ = {cp:.12}, c- = {cm:.12}"
        ),
    ));

    let (a1, a2) = (p1(2), p2(2));
    let build = |vs: [(&[C64], f64); 3]| {
        let mut m = ComplexMatrix::zeros(16, 16);
        for (v, w) in vs {
            m.add_outer(v, v, C64::new(w, 0.0));
        }
        m
    };
    let rho_s = build([(&v00, a1 / 2.0), (&v01p, a1 / 2.0), (&w0p, a2)]);
    let rho_a = build([(&v11, a1 / 2.0), (&v10p, a1 / 2.0), (&w1p, a2)]);
    let mut sum = rho_s.scale(0.5);
    sum.add_scaled(&rho_a, C64::new(0.5, 0.0));
    checks.push(Check::new(
        "split.decomposition",
        sum.max_abs_diff(&f1.rho),
        TOL_STRUCT,
        "ρ = ρ_S/2 + ρ_A/2 with the listed ρ_S, ρ_A",
    ));
    let gram = gram_residual(&[&v00, &v01p, &w0p]).max(gram_residual(&[&v11, &v10p, &w1p]));
    let traces = (rho_s.trace().re - 1.0)
        .abs()
        .max((rho_a.trace().re - 1.0).abs());
    checks.push(Check::new(
        "split.spectra",
        gram.max(traces),
        TOL_STRUCT,
        "orthonormal components with weights p1/2, p1/2, p2",
    ));

    let id = ComplexMatrix::identity(16);
    let proj_sym = (&id + &flip).scale(0.5);
    let leak = rho_s.distance(&rho_s.conjugate_by(&proj_sym));
    checks.push(Check::new(
        "split.sym_leakage",
        leak,
        TOL_STRUCT,
        "‖ρ_S − Π₊ρ_SΠ₊‖",
    ));
    let parity = |v: &[C64], sign: f64| vec_distance(&flip.mat_vec(v), &scaled(v, sign));
    let par = [
        parity(&v00, 1.0),
        parity(&v01p, 1.0),
        parity(&w0p, 1.0),
        parity(&v10p, -1.0),
        parity(&w1p, -1.0),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    checks.push(Check::new(
        "split.parities",
        par,
        TOL_STRUCT,
        "v00, v01', w0' symmetric; v10', w1' antisymmetric",
    ));
    checks.push(Check::new(
        "split.v11_parity",
        parity(&v11, 1.0),
        TOL_STRUCT,
        "v11 is symmetric under the flip",
    ));
    let split = sym_antisym_split(&f1.rho, dims)?;
    let ws = 1.0 - 1.0 / (2.0 * 2f64.sqrt());
    let wr = (split.weight_sym - ws)
        .abs()
        .max((split.weight_antisym - (1.0 - ws)).abs());
    checks.push(Check::new(
        "split.true_weights",
        wr,
        TOL_STRUCT,
        format!(
            "symmetric weight {:.12}, antisymmetric weight {:.12}",
            split.weight_sym, split.weight_antisym
        ),
    ));
    Ok(())
}

/// P-matrix and Q-family structure for `n = 1..=n_max` and the `d = 3` family.
pub fn verify_qmatrix_theory(n_max: u32) -> Result<VerificationReport> {
    if n_max == 0 {
        return Err(Error::OutOfRange {
            name: "n_max",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let mut checks = Vec::new();
    for n in 1..=n_max {
        let d = 1usize << n;
        let ps = p_matrices(n);
        let is_one = |m: &ComplexMatrix, i: usize, j: usize| m[(i, j)] == ONE;

        let mut violations = 0usize;
        for i in 0..d {
            for j in 0..d {
                if ps.iter().filter(|p| is_one(p, i, j)).count() != 1 {
                    violations += 1;
                }
            }
        }
        for p in &ps {
            for i in 0..d {
                let row = (0..d).filter(|&j| is_one(p, i, j)).count();
                let col = (0..d).filter(|&j| is_one(p, j, i)).count();
                let zeros = (0..d).all(|j| is_one(p, i, j) || p[(i, j)] == C64::new(0.0, 0.0));
                violations += usize::from(row != 1) + usize::from(col != 1) + usize::from(!zeros);
            }
        }
        checks.push(Check::new(
            format!("pmat.positions_n{n}"),
            violations as f64,
            0.0,
            "one 1 per row and column, one matrix per position",
        ));

        let first = ps
            .iter()
            .enumerate()
            .filter(|(k, p)| !(is_one(p, 0, *k) && is_one(p, *k, 0)))
            .count();
        checks.push(Check::new(
            format!("pmat.first_row_n{n}"),
            first as f64,
            0.0,
            "P^k_0k = P^k_k0 = 1 for every k",
        ));

        let mut rec = vec![ComplexMatrix::identity(1)];
        for level in 0..n {
            let h = 1usize << level;
            let mut next = Vec::with_capacity(2 * h);
            for off in [false, true] {
                for p in &rec {
                    next.push(ComplexMatrix::from_fn(2 * h, 2 * h, |r, c| {
                        let same = (r < h) == (c < h);
                        if same != off {
                            p[(r % h, c % h)]
                        } else {
                            C64::new(0.0, 0.0)
                        }
                    }));
                }
            }
            rec = next;
        }
        let rec_diff = rec
            .iter()
            .zip(&ps)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max);
        checks.push(Check::new(
            format!("pmat.recursion_n{n}"),
            rec_diff,
            0.0,
            "block recursion against the tensor-product ordering",
        ));

        let mut open = 0usize;
        for a in &ps {
            for b in &ps {
                let prod = a.matmul(b);
                if !ps.iter().any(|p| p.max_abs_diff(&prod) == 0.0) {
                    open += 1;
                }
            }
        }
        checks.push(Check::new(
            format!("pmat.product_closure_n{n}"),
            open as f64,
            0.0,
            "P^a P^b is a P-matrix for every pair",
        ));

        let fam = p_family(n);
        checks.push(qfamily_check(&fam, &format!("qfamily.structure_n{n}")));
        checks.push(Check::new(
            format!("obs8.pt_invariance_n{n}"),
            t_sum_pt_residual(&fam)?,
            TOL_STRUCT,
            "max |T^Γ − T|, T = Σ|t_m><t_m|",
        ));
    }

    let fam = q_family_d3(0.0);
    checks.push(qfamily_check(&fam, "qfamily.structure_d3"));
    let mut zero = 0.0f64;
    for (i, j) in [(0, 2), (1, 2), (2, 0), (2, 1)] {
        zero = zero.max(fam.q_vecs[i][j].iter().map(|x| x * x).sum::<f64>().sqrt());
    }
    checks.push(Check::new(
        "d3.zero_pattern",
        zero,
        TOL_STRUCT,
        "q_02 = q_12 = q_20 = q_21 = 0",
    ));

    let r32 = 1.5f64.sqrt();
    let mut grouping = 0.0f64;
    for &(i, j, m, s) in &[
        (0, 0, 0, r32),
        (1, 1, 0, -r32),
        (0, 1, 1, r32),
        (1, 0, 1, r32),
        (2, 2, 2, 3f64.sqrt()),
    ] {
        if fam.mu[i][j] != Some(m) {
            grouping = f64::INFINITY;
        }
        grouping = grouping.max((fam.s_factors[i][j] - s).abs());
    }
    let phis: Vec<f64> = (0..3)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / 3.0)
        .collect();
    for (k, phi) in phis.iter().enumerate() {
        grouping = grouping.max((fam.q_vecs[0][0][k] - phi.cos()).abs());
        grouping = grouping.max((fam.q_vecs[0][1][k] - phi.sin()).abs());
        grouping = grouping.max((fam.q_vecs[2][2][k] - 1.0).abs());
    }
    checks.push(Check::new(
        "d3.grouping",
        grouping,
        TOL_STRUCT,
        "q00 = −q11 = √(3/2) q̄0, q01 = q10 = √(3/2) q̄1, q22 = √3 q̄2",
    ));

    let k = |i, j| crate::states::ket(3, 0, 1, i, j);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t_listed = [
        combine(&k(0, 0), h, &k(1, 1), -h),
        combine(&k(0, 1), h, &k(1, 0), h),
        k(2, 2),
    ];
    let t_res = (0..3)
        .map(|m| vec_distance(&fam.t_vector(m), &t_listed[m]))
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "d3.t_vectors",
        t_res,
        TOL_STRUCT,
        "t0, t1, t2 against their listed forms",
    ));

    let dims = SubsystemDims::key_shield(3);
    let s = fam.s_vectors()?;
    let mut ss = ComplexMatrix::zeros(36, 36);
    for v in &s {
        ss.add_outer(v, v, ONE);
    }
    checks.push(Check::new(
        "d3.st_relation",
        pt(&ss, &dims)?.max_abs_diff(&t_projector_sum(&fam)),
        TOL_STRUCT,
        "(Σ|s_i><s_i|)^Γ = Σ|t_i><t_i|",
    ));

    let other = q_family_d3(0.37);
    let shift = (0..3)
        .map(|m| vec_distance(&fam.t_vector(m), &other.t_vector(m)))
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "d3.phi0_independence",
        shift,
        TOL_STRUCT,
        "t vectors at φ0 = 0 and φ0 = 0.37",
    ));

    Ok(VerificationReport::new(None, "qmatrix", checks))
}

fn qfamily_check(fam: &QFamily, name: &str) -> Check {
    let r = fam
        .orthogonality_residual()
        .max(fam.qbar_residual())
        .max(fam.consistency_residual())
        .max(fam.qbar_orthonormality_residual());
    let dm = fam
        .n_counts
        .iter()
        .zip(&fam.d_consts)
        .map(|(&nm, &dc)| (dc - (fam.d as f64 / nm as f64).sqrt()).abs())
        .fold(0.0, f64::max);
    Check::new(
        name,
        r.max(dm),
        TOL_STRUCT,
        "orthogonal Q^j, q_ij = S_ij q̄_m, Σ<q|q> = d², D_m = √(d/N_m)",
    )
}

fn t_projector_sum(fam: &QFamily) -> ComplexMatrix {
    let n = 4 * fam.d * fam.d;
    let mut t = ComplexMatrix::zeros(n, n);
    for v in fam.t_vectors() {
        t.add_outer(&v, &v, ONE);
    }
    t
}

fn t_sum_pt_residual(fam: &QFamily) -> Result<f64> {
    let t = t_projector_sum(fam);
    Ok(pt(&t, &SubsystemDims::key_shield(fam.d))?.max_abs_diff(&t))
}

/// Flip invariance for Hadamard `u` and its failure for Fourier `u` at `d ≥ 3`.
pub fn verify_observation6(d_list: &[usize]) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    for &d in d_list {
        let dims = SubsystemDims::key_shield(d);
        let flip = flip_operator(&dims)?;
        let asym = |u: UnitaryKind| -> Result<f64> {
            let rho = build_rho_f1(F1Spec::new(d, u)?, SubsystemOrder::KeyShield)?.rho;
            Ok(rho.conjugate_by(&flip).max_abs_diff(&rho))
        };
        if d.is_power_of_two() {
            checks.push(Check::new(
                format!("obs6.hadamard_d{d}"),
                asym(UnitaryKind::Hadamard)?,
                TOL_STRUCT,
                "max |FρF − ρ|",
            ));
        }
        let a = asym(UnitaryKind::Fourier)?;
        if d >= 3 {
            checks.push(Check::new(
                format!("obs6.fourier_d{d}"),
                -a,
                -WITNESS_ASYMMETRY,
                format!("witness: max |FρF − ρ| = {a:.3e} must exceed {WITNESS_ASYMMETRY:e}"),
            ));
        } else {
            checks.push(Check::new(
                format!("obs6.fourier_d{d}"),
                a,
                TOL_STRUCT,
                "Fourier u is real and symmetric at d = 2",
            ));
        }
    }
    Ok(VerificationReport::new(None, "observation6", checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyConfig {
        VerifyConfig {
            random_states: 5,
            ..Default::default()
        }
    }

    fn assert_all_pass(r: &VerificationReport) {
        assert!(r.all_passed(), "{r}");
    }

    #[test]
    fn f1_hadamard_d2_passes_with_anchor_value() {
        let r = verify_family(2, Family::F1(UnitaryKind::Hadamard), &quick()).unwrap();
        assert_all_pass(&r);
        let q = r.get("obs1.qfi").unwrap();
        assert!(q.residual < 1e-8);
        assert!(r.get("obs4.matrix_elements").is_some());
    }

    #[test]
    fn f2_d3_passes() {
        let r = verify_family(3, Family::F2, &quick()).unwrap();
        assert_all_pass(&r);
        assert!(r.get("pt.spectrum").is_some());
        assert_eq!(r.get("rank.pt").unwrap().details, "rank 21, expected 21");
    }

    #[test]
    fn four_by_four_passes() {
        assert_all_pass(&verify_family(2, Family::FourByFour, &quick()).unwrap());
    }

    #[test]
    fn unsupported_dimension_is_an_error() {
        assert!(matches!(
            verify_family(7, Family::F2, &quick()),
            Err(Error::UnsupportedDimension { d: 7, .. })
        ));
        assert!(verify_family(3, Family::F1(UnitaryKind::Hadamard), &quick()).is_err());
    }

    #[test]
    fn equivalences_pass() {
        assert_all_pass(&verify_equivalences(&quick()).unwrap());
    }

    #[test]
    fn qmatrix_theory_passes() {
        let r = verify_qmatrix_theory(3).unwrap();
        assert_all_pass(&r);
        assert!(r.get("obs8.pt_invariance_n3").unwrap().residual < 1e-12);
        assert!(verify_qmatrix_theory(0).is_err());
    }

    #[test]
    fn observation6_witnesses() {
        let r = verify_observation6(&[2, 3, 4]).unwrap();
        assert_all_pass(&r);
        assert!(r.get("obs6.fourier_d4").unwrap().residual < -1e-3);
    }

    #[test]
    fn corrupted_state_fails_named_checks() {
        let mut b = build_family(2, Family::F2).unwrap();
        b.rho[(0, 0)] += C64::new(1e-3, 0.0);
        let r = verify_bundle(&b, 2, &quick()).unwrap();
        assert!(!r.all_passed());
        assert!(r.failures().any(|c| c.name == "state.trace"));
    }

    #[test]
    fn reports_are_sorted_and_deterministic() {
        let a = verify_family(2, Family::F2, &quick()).unwrap();
        let b = verify_family(2, Family::F2, &quick()).unwrap();
        assert_eq!(a, b);
        assert!(a.checks.windows(2).all(|w| w[0].name <= w[1].name));
        for c in &a.checks {
            assert_eq!(c.passed, c.residual <= c.tolerance);
        }
    }

    #[test]
    fn claim_table_covers_every_check_and_observation() {
        let reports = [
            verify_family(2, Family::F1(UnitaryKind::Hadamard), &quick()).unwrap(),
            verify_family(3, Family::F2, &quick()).unwrap(),
            verify_family(2, Family::FourByFour, &quick()).unwrap(),
            verify_equivalences(&quick()).unwrap(),
            verify_qmatrix_theory(2).unwrap(),
            verify_observation6(&[2, 3]).unwrap(),
        ];
        let mut used = std::collections::BTreeSet::new();
        for r in &reports {
            for c in &r.checks {
                assert!(claim_of(&c.name).is_some(), "unmapped check {}", c.name);
                used.insert(c.name.split('.').next().unwrap().to_string());
            }
        }
        for k in 1..=8 {
            let group = format!("obs{k}");
            assert!(claim_of(&format!("{group}.x"))
                .unwrap()
                .starts_with(&format!("Observation {k}")));
            assert!(used.contains(&group), "no check exercises {group}");
        }
        let groups: std::collections::BTreeSet<_> = CLAIMS.iter().map(|(g, _)| *g).collect();
        assert_eq!(groups.len(), CLAIMS.len());
        for g in groups {
            assert!(used.contains(g), "claim group {g} has no check");
        }
    }
}
