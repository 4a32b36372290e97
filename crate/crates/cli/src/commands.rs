use std::io::Write;
use std::path::Path;

use ppt_metrology::linalg::{
    hermitian_eig, partial_transpose, permute_subsystems, ComplexMatrix, Party, SubsystemDims, C64,
    RANK_TOL,
};
use ppt_metrology::metrology::{
    gain, qfi_f1_analytic, qfi_noisy_analytic, robustness_numeric, sep_bound, QfiKernel, QfiReport,
    ToleranceConfig,
};
use ppt_metrology::optimize::{
    fixed_point_residual, seesaw_maximize_qfi, FeasibilityResiduals, SeesawConfig,
};
use ppt_metrology::states::{
    build_rho_4x4, build_rho_f1, build_rho_f2, default_q_family, hamiltonian_for, hamiltonian_h,
    local_terms_for, q_family_d3, rho_f2, F1Spec, Family, StateBundle, SubsystemOrder, UnitaryKind,
};
use ppt_metrology::verify::{
    build_family, verify_bundle, verify_equivalences, verify_observation6, verify_qmatrix_theory,
    VerificationReport, VerifyConfig,
};
use ppt_metrology::Error;

use crate::qmx::QmxFile;
use crate::{
    CliError, CliResult, FamilyArg, FigArg, GenArgs, OptimizeArgs, OrderArg, QfiArgs, SweepArgs,
    UnitaryArg, VerifyArgs, VerifyFamilyArg,
};

/// Largest Hilbert-space dimension for which numeric columns are computed.
pub const NUMERIC_BUDGET: usize = 1024;
/// Maximal QFI of any bipartite state for the Hamiltonian used here.
pub const QFI_MAX: f64 = 16.0;
/// Relative Frobenius residual below which a Hamiltonian counts as local.
const LOCALITY_TOL: f64 = 1e-10;
/// Trace and eigenvalue slack accepted for input states.
const DENSITY_TOL: f64 = 1e-8;
/// Trace perturbation applied by the hidden `--corrupt` flag.
const CORRUPTION: f64 = 1.01;
/// Largest `n` of the `d = 2^n` permutation-matrix checks in `verify --family all`.
const QMATRIX_N_MAX: u32 = 3;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn order_of(arg: Option<OrderArg>) -> SubsystemOrder {
    match arg {
        None | Some(OrderArg::Abab) => SubsystemOrder::KeyShield,
        Some(OrderArg::Aabb) => SubsystemOrder::Bipartite,
    }
}

fn bob(dims: &SubsystemDims) -> Vec<Party> {
    [Party::B, Party::BPrime]
        .into_iter()
        .filter(|p| dims.position(*p).is_some())
        .collect()
}

fn load(path: &Path) -> CliResult<QmxFile> {
    QmxFile::read_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn min_eig(m: &ComplexMatrix) -> CliResult<f64> {
    Ok(hermitian_eig(m)?.min())
}

pub fn gen(a: &GenArgs, out: &mut dyn Write) -> CliResult<()> {
    let order = order_of(a.order);
    if a.phi0.is_some() && !(a.family == FamilyArg::F2 && a.d == Some(3)) {
        return Err(usage("--phi0 applies only to --family f2 --d 3"));
    }
    let bundle: StateBundle = match a.family {
        FamilyArg::F1 => {
            let d =
                a.d.ok_or_else(|| usage("--d is required for --family f1"))?;
            let unitary = match a.unitary {
                UnitaryArg::Fourier => UnitaryKind::Fourier,
                UnitaryArg::Hadamard => UnitaryKind::Hadamard,
            };
            build_rho_f1(F1Spec::new(d, unitary)?, order)?
        }
        FamilyArg::F2 => {
            let d =
                a.d.ok_or_else(|| usage("--d is required for --family f2"))?;
            let family = match a.phi0 {
                Some(phi0) => q_family_d3(phi0),
                None => default_q_family(d)?,
            };
            build_rho_f2(d, &family, order)?
        }
        FamilyArg::FourByFour => {
            if a.d.is_some_and(|d| d != 2) {
                return Err(usage("the 4x4 state exists only for d = 2"));
            }
            if a.order.is_some() {
                return Err(usage("the 4x4 state has the fixed order AB"));
            }
            build_rho_4x4()
        }
    };
    let rho = &bundle.rho;
    let eig = hermitian_eig(rho)?;
    let rank = eig
        .values
        .iter()
        .filter(|x| x.abs() > RANK_TOL * eig.spectral_radius())
        .count();
    let ppt_min = min_eig(&partial_transpose(rho, &bundle.dims, &bob(&bundle.dims))?)?;
    QmxFile::new(bundle.dims.clone(), rho.clone())?.write_path(&a.out)?;
    writeln!(out, "family {}", bundle.family)?;
    writeln!(out, "dims {:?} order {}", bundle.dims.dims(), bundle.dims)?;
    writeln!(out, "trace {:.12}", rho.trace().re)?;
    writeln!(out, "rank {rank}")?;
    writeln!(out, "min eigenvalue {:.12e}", eig.min())?;
    writeln!(out, "PPT min eigenvalue {ppt_min:.12e}")?;
    writeln!(out, "wrote {}", a.out.display())?;
    Ok(())
}

/// Splits `h` on `AA' ⊗ BB'` into `(H_A, H_B)` with `h = H_A ⊗ 1 + 1 ⊗ H_B`, if it is local.
pub fn local_parts(
    h: &ComplexMatrix,
    dims: &SubsystemDims,
) -> CliResult<Option<(ComplexMatrix, ComplexMatrix)>> {
    let alice: Vec<usize> = [Party::A, Party::APrime]
        .iter()
        .filter_map(|&p| dims.position(p))
        .collect();
    let bob: Vec<usize> = [Party::B, Party::BPrime]
        .iter()
        .filter_map(|&p| dims.position(p))
        .collect();
    if alice.is_empty() || bob.is_empty() {
        return Err(usage(format!("order {dims} has no A|B cut")));
    }
    let da: usize = alice.iter().map(|&p| dims.dims()[p]).product();
    let db: usize = bob.iter().map(|&p| dims.dims()[p]).product();
    let perm: Vec<usize> = alice.into_iter().chain(bob).collect();
    let (hp, _) = permute_subsystems(h, dims, &perm)?;
    let idx = |i: usize, j: usize| i * db + j;
    let ha = ComplexMatrix::from_fn(da, da, |i, k| {
        (0..db).map(|j| hp[(idx(i, j), idx(k, j))]).sum::<C64>() / db as f64
    });
    let hb = ComplexMatrix::from_fn(db, db, |j, l| {
        (0..da).map(|i| hp[(idx(i, j), idx(i, l))]).sum::<C64>() / da as f64
    });
    let c = hp.trace() / (da * db) as f64;
    let recon = ComplexMatrix::from_fn(da * db, da * db, |r, s| {
        let (i, j, k, l) = (r / db, r % db, s / db, s % db);
        let mut z = C64::new(0.0, 0.0);
        if j == l {
            z += ha[(i, k)];
        }
        if i == k {
            z += hb[(j, l)];
        }
        if r == s {
            z -= c;
        }
        z
    });
    if hp.distance(&recon) > LOCALITY_TOL * hp.frobenius_norm().max(1.0) {
        return Ok(None);
    }
    Ok(Some((ha, hb)))
}

pub fn qfi(a: &QfiArgs, out: &mut dyn Write) -> CliResult<()> {
    let state = load(&a.state)?;
    let dims = &state.dims;
    let (h, locals) = if a.ham == "auto" {
        (hamiltonian_for(dims)?, Some(local_terms_for(dims)?))
    } else {
        let ham = load(Path::new(&a.ham))?;
        if ham.dims != *dims {
            return Err(usage(format!(
                "Hamiltonian dims {:?} {} differ from state dims {:?} {}",
                ham.dims.dims(),
                ham.dims,
                dims.dims(),
                dims
            )));
        }
        let locals = local_parts(&ham.matrix, dims)?;
        (ham.matrix, locals)
    };
    let tr = state.matrix.trace().re;
    let lowest = min_eig(&state.matrix)?;
    if (tr - 1.0).abs() > DENSITY_TOL || lowest < -DENSITY_TOL {
        return Err(CliError::Check(format!(
            "{}: not a density matrix (trace {tr:.6e}, min eigenvalue {lowest:.6e})",
            a.state.display()
        )));
    }
    let tol = ToleranceConfig::default();
    let sep = match &locals {
        Some((ha, hb)) => Some(sep_bound(ha, hb)?),
        None => None,
    };
    let report = QfiReport::compute(&state.matrix, &h, sep.unwrap_or(f64::NAN), &tol)?;
    writeln!(out, "dims {:?} order {}", dims.dims(), dims)?;
    writeln!(out, "qfi {:.12}", report.qfi)?;
    writeln!(out, "4*variance {:.12}", 4.0 * report.variance)?;
    writeln!(out, "<H> {:.12}", report.mean_h)?;
    match sep {
        Some(sep) => {
            writeln!(out, "separable bound {sep:.12}")?;
            writeln!(out, "gain {:.12}", gain(report.qfi, sep))?;
            match robustness_numeric(&state.matrix, &h, sep, &tol) {
                Ok(r) => writeln!(out, "robustness {r:.12}")?,
                Err(Error::NotUseful { .. }) => writeln!(out, "robustness not useful")?,
                Err(e) => return Err(e.into()),
            }
        }
        None => {
            writeln!(out, "separable bound n/a (Hamiltonian is not local)")?;
            writeln!(out, "gain n/a")?;
            writeln!(out, "robustness n/a")?;
        }
    }
    Ok(())
}

fn f1_kernel(d: usize) -> CliResult<QfiKernel> {
    let b = build_rho_f1(F1Spec::fourier(d), SubsystemOrder::KeyShield)?;
    Ok(QfiKernel::new(&b.rho, &hamiltonian_h(d))?)
}

fn within_budget(d: usize) -> bool {
    4 * d * d <= NUMERIC_BUDGET
}

fn optional(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.15e}")).unwrap_or_default()
}

pub fn sweep(a: &SweepArgs, out: &mut dyn Write) -> CliResult<()> {
    let tol = ToleranceConfig::default();
    let mut w = csv::Writer::from_path(&a.out)?;
    let rows = match a.fig {
        FigArg::One => {
            if a.d.is_some() || a.steps.is_some() {
                return Err(usage("--fig 1 takes --dmax, not --d or --steps"));
            }
            let dmax = a.dmax.ok_or_else(|| usage("--fig 1 requires --dmax"))?;
            if dmax < 2 {
                return Err(usage("--dmax must be at least 2"));
            }
            w.write_record(["d", "qfi_analytic", "qfi_numeric", "sep_bound", "max"])?;
            for d in 2..=dmax {
                let numeric = if within_budget(d) {
                    Some(f1_kernel(d)?.qfi(&tol))
                } else {
                    None
                };
                w.write_record([
                    d.to_string(),
                    format!("{:.15e}", qfi_f1_analytic(d)?),
                    optional(numeric),
                    "8".to_string(),
                    format!("{QFI_MAX}"),
                ])?;
            }
            dmax - 1
        }
        FigArg::Three => {
            if a.dmax.is_some() {
                return Err(usage("--fig 3 takes --d and --steps, not --dmax"));
            }
            let d = a.d.ok_or_else(|| usage("--fig 3 requires --d"))?;
            let steps = a.steps.ok_or_else(|| usage("--fig 3 requires --steps"))?;
            if steps == 0 {
                return Err(usage("--steps must be positive"));
            }
            qfi_f1_analytic(d)?;
            let kernel = if within_budget(d) {
                Some(f1_kernel(d)?)
            } else {
                None
            };
            w.write_record(["p", "qfi_noisy_analytic", "qfi_noisy_numeric"])?;
            for k in 0..=steps {
                let p = k as f64 / steps as f64;
                w.write_record([
                    format!("{p:.15e}"),
                    format!("{:.15e}", qfi_noisy_analytic(d, p)?),
                    optional(kernel.as_ref().map(|k| k.qfi_mixed(p, &tol))),
                ])?;
            }
            steps + 1
        }
    };
    w.flush()?;
    writeln!(out, "wrote {rows} rows to {}", a.out.display())?;
    Ok(())
}

fn f1_families(d: usize) -> Vec<Family> {
    let mut v = vec![Family::F1(UnitaryKind::Fourier)];
    if d.is_power_of_two() {
        v.push(Family::F1(UnitaryKind::Hadamard));
    }
    v
}

pub fn verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let d = a.d;
    let cfg = VerifyConfig {
        seed: a.seed,
        ..Default::default()
    };
    let mut families = Vec::new();
    match a.family {
        VerifyFamilyArg::F1 => families.extend(f1_families(d)),
        VerifyFamilyArg::F2 => families.push(Family::F2),
        VerifyFamilyArg::All => {
            families.extend(f1_families(d));
            if ppt_metrology::states::f2_supported(d) {
                families.push(Family::F2);
            } else {
                writeln!(out, "skipping F2: unsupported d = {d}")?;
            }
            if d == 2 {
                families.push(Family::FourByFour);
            }
        }
    }
    let mut reports = Vec::new();
    for (k, &family) in families.iter().enumerate() {
        let mut bundle = build_family(d, family)?;
        if a.corrupt && k == 0 {
            bundle.rho = bundle.rho.scale(CORRUPTION);
        }
        let mut r = verify_bundle(&bundle, d, &cfg)?;
        for c in &mut r.checks {
            c.name = format!("{family}/{}", c.name);
        }
        reports.push(r);
    }
    if a.family == VerifyFamilyArg::All {
        if d == 2 {
            reports.push(verify_equivalences(&cfg)?);
        }
        reports.push(verify_observation6(&[d])?);
        reports.push(verify_qmatrix_theory(QMATRIX_N_MAX)?);
    }
    let report = VerificationReport::merge(reports);
    writeln!(out, "{report}")?;
    if let Some(path) = &a.out {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["name", "passed", "residual", "tolerance", "details"])?;
        for c in &report.checks {
            w.write_record([
                c.name.clone(),
                c.passed.to_string(),
                format!("{:.6e}", c.residual),
                format!("{:.6e}", c.tolerance),
                c.details.clone(),
            ])?;
        }
        w.flush()?;
    }
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    if !failed.is_empty() {
        return Err(CliError::Check(format!(
            "failed checks: {}",
            failed.join(", ")
        )));
    }
    Ok(())
}

pub fn optimize(a: &OptimizeArgs, out: &mut dyn Write) -> CliResult<()> {
    let d = a.d;
    let analytic = qfi_f1_analytic(d)?;
    let (dims, initial) = match a.init.as_str() {
        "f2" => {
            let b = rho_f2(d, SubsystemOrder::KeyShield)?;
            (b.dims, b.rho)
        }
        "mixed" => {
            let n = 4 * d * d;
            (
                SubsystemDims::key_shield(d),
                ComplexMatrix::identity(n).scale(1.0 / n as f64),
            )
        }
        path => {
            let f = load(Path::new(path))?;
            if f.dims.dim_of(Party::APrime) != Some(d) || f.dims.dim_of(Party::BPrime) != Some(d) {
                return Err(usage(format!(
                    "{path}: dims {:?} {} do not match --d {d}",
                    f.dims.dims(),
                    f.dims
                )));
            }
            (f.dims, f.matrix)
        }
    };
    let h = hamiltonian_for(&dims)?;
    let cfg = SeesawConfig {
        max_outer_iters: a.iters,
        seed: a.seed,
        ..Default::default()
    };
    let fixed = fixed_point_residual(&initial, &dims, &h, &cfg)?;
    let trace = seesaw_maximize_qfi(&dims, &h, &cfg, &initial)?;
    writeln!(
        out,
        "init {} d {d} order {dims} iters {} seed {}",
        a.init, a.iters, a.seed
    )?;
    writeln!(out, "fixed-point residual {fixed:.6e}")?;
    for (k, f) in trace.objective.iter().enumerate() {
        writeln!(out, "iter {k} qfi {f:.12}")?;
    }
    for n in &trace.notes {
        writeln!(out, "note {n}")?;
    }
    let last = trace.final_objective();
    let FeasibilityResiduals {
        trace: tr,
        min_eig,
        min_eig_pt,
    } = trace.residuals;
    writeln!(out, "final qfi {last:.12}")?;
    writeln!(out, "analytic qfi {analytic:.12}")?;
    writeln!(out, "gap {:.6e}", analytic - last)?;
    writeln!(
        out,
        "residuals trace {tr:.3e} min_eig {min_eig:.3e} min_eig_pt {min_eig_pt:.3e}"
    )?;
    if let Some(path) = &a.out {
        QmxFile::new(dims, trace.final_state)?.write_path(path)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}
