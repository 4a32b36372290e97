//! Browser bindings: the QFI-versus-d curve, the white-noise curve and the spectra of the states.
//!
//! Every export returns a flat `Float64Array`; rows are laid out consecutively.

use ppt_metrology::linalg::{hermitian_eig, partial_transpose, Party};
use ppt_metrology::metrology::{
    qfi_f1_analytic, qfi_noisy_analytic, robustness_analytic, robustness_from_kernel, QfiKernel,
    ToleranceConfig,
};
use ppt_metrology::states::{
    build_rho_f1, hamiltonian_h, F1Spec, Family, SubsystemOrder, UnitaryKind,
};
use ppt_metrology::verify::build_family;
use wasm_bindgen::prelude::*;

/// Largest Hilbert-space dimension diagonalised in the browser.
pub const BROWSER_BUDGET: usize = 256;
/// Largest `d` accepted by the curve exports.
pub const D_LIMIT: usize = 1000;
pub const SEP_BOUND: f64 = 8.0;

fn numeric_ok(d: usize) -> bool {
    4 * d * d <= BROWSER_BUDGET
}

fn kernel(d: usize) -> Result<QfiKernel, String> {
    let b =
        build_rho_f1(F1Spec::fourier(d), SubsystemOrder::KeyShield).map_err(|e| e.to_string())?;
    QfiKernel::new(&b.rho, &hamiltonian_h(d)).map_err(|e| e.to_string())
}

fn check_d(d: usize) -> Result<(), String> {
    if !(2..=D_LIMIT).contains(&d) {
        return Err(format!("d must lie in 2..={D_LIMIT}, got {d}"));
    }
    Ok(())
}

/// Rows `(d, analytic QFI, numeric QFI or NaN)` for `d = 2..=dmax`.
pub fn qfi_rows(dmax: usize) -> Result<Vec<f64>, String> {
    check_d(dmax)?;
    let tol = ToleranceConfig::default();
    let mut out = Vec::with_capacity(3 * (dmax - 1));
    for d in 2..=dmax {
        let analytic = qfi_f1_analytic(d).map_err(|e| e.to_string())?;
        let numeric = if numeric_ok(d) {
            kernel(d)?.qfi(&tol)
        } else {
            f64::NAN
        };
        out.extend([d as f64, analytic, numeric]);
    }
    Ok(out)
}

/// Rows `(p, analytic QFI, numeric QFI or NaN)` of `pρ + (1−p)I/n` for `p = k/steps`.
pub fn noise_rows(d: usize, steps: usize) -> Result<Vec<f64>, String> {
    check_d(d)?;
    if steps == 0 || steps > 10_000 {
        return Err(format!("steps must lie in 1..=10000, got {steps}"));
    }
    let tol = ToleranceConfig::default();
    let k = if numeric_ok(d) {
        Some(kernel(d)?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(3 * (steps + 1));
    for i in 0..=steps {
        let p = i as f64 / steps as f64;
        let analytic = qfi_noisy_analytic(d, p).map_err(|e| e.to_string())?;
        let numeric = k.as_ref().map_or(f64::NAN, |k| k.qfi_mixed(p, &tol));
        out.extend([p, analytic, numeric]);
    }
    Ok(out)
}

/// `(analytic, numeric or NaN)` white-noise robustness.
pub fn robustness_pair(d: usize) -> Result<Vec<f64>, String> {
    check_d(d)?;
    let analytic = robustness_analytic(d).map_err(|e| e.to_string())?;
    let numeric = if numeric_ok(d) {
        robustness_from_kernel(&kernel(d)?, SEP_BOUND, &ToleranceConfig::default())
            .map_err(|e| e.to_string())?
    } else {
        f64::NAN
    };
    Ok(vec![analytic, numeric])
}

fn parse_family(name: &str) -> Result<Family, String> {
    match name {
        "f1" | "f1-fourier" => Ok(Family::F1(UnitaryKind::Fourier)),
        "f1-hadamard" => Ok(Family::F1(UnitaryKind::Hadamard)),
        "f2" => Ok(Family::F2),
        "4x4" => Ok(Family::FourByFour),
        _ => Err(format!(
            "unknown family `{name}`; expected f1, f1-hadamard, f2 or 4x4"
        )),
    }
}

/// Eigenvalues of `ρ` followed by those of its partial transpose over Bob, both descending.
pub fn spectra(family: &str, d: usize) -> Result<Vec<f64>, String> {
    let family = parse_family(family)?;
    if !numeric_ok(d) {
        return Err(format!(
            "spectra are limited to 4d² <= {BROWSER_BUDGET}, got d = {d}"
        ));
    }
    let b = build_family(d, family).map_err(|e| e.to_string())?;
    let bob: Vec<Party> = [Party::B, Party::BPrime]
        .into_iter()
        .filter(|p| b.dims.position(*p).is_some())
        .collect();
    let pt = partial_transpose(&b.rho, &b.dims, &bob).map_err(|e| e.to_string())?;
    let mut out = hermitian_eig(&b.rho).map_err(|e| e.to_string())?.values;
    out.extend(hermitian_eig(&pt).map_err(|e| e.to_string())?.values);
    Ok(out)
}

#[wasm_bindgen]
pub fn qfi_curve(dmax: usize) -> Result<Vec<f64>, JsError> {
    qfi_rows(dmax).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn noise_curve(d: usize, steps: usize) -> Result<Vec<f64>, JsError> {
    noise_rows(d, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn robustness(d: usize) -> Result<Vec<f64>, JsError> {
    robustness_pair(d).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn spectrum(family: &str, d: usize) -> Result<Vec<f64>, JsError> {
    spectra(family, d).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qfi_rows_layout() {
        let rows = qfi_rows(9).unwrap();
        assert_eq!(rows.len(), 3 * 8);
        assert_eq!((rows[0], rows[3 * 7]), (2.0, 9.0));
        assert!((rows[1] - 9.372583002030481).abs() < 1e-12);
        assert!((rows[1] - rows[2]).abs() < 1e-9);
        assert!(rows[3 * 7 + 2].is_nan());
    }

    #[test]
    fn noise_rows_end_at_the_noiseless_value() {
        let rows = noise_rows(3, 4).unwrap();
        assert_eq!(rows.len(), 15);
        assert_eq!(&rows[..3], &[0.0, 0.0, 0.0]);
        assert!((rows[13] - qfi_f1_analytic(3).unwrap()).abs() < 1e-12);
        for r in rows.chunks(3) {
            assert!((r[1] - r[2]).abs() < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn robustness_agrees() {
        let r = robustness_pair(2).unwrap();
        assert!((r[0] - r[1]).abs() < 1e-6);
    }

    #[test]
    fn spectra_are_ppt_with_the_expected_rank() {
        let s = spectra("f1-hadamard", 2).unwrap();
        assert_eq!(s.len(), 32);
        assert_eq!(s[..16].iter().filter(|&&x| x > 1e-10).count(), 6);
        assert!(s.iter().all(|&x| x > -1e-12));
        assert!((s[..16].iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(spectra("4x4", 2).unwrap().len(), 32);
        assert_eq!(spectra("f2", 3).unwrap().len(), 72);
    }

    #[test]
    fn invalid_arguments_are_reported() {
        assert!(qfi_rows(1).is_err());
        assert!(noise_rows(2, 0).is_err());
        assert!(spectra("f3", 2).is_err());
        assert!(spectra("f2", 5).unwrap_err().contains("F2"));
        assert!(spectra("f1", 9).is_err());
        assert!(spectra("4x4", 3).is_err());
    }
}
