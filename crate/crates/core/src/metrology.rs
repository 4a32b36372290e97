//! Quantum Fisher information and the figures of merit derived from it.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, EigenSystem, C64, I};
use crate::states::p1;

/// Numerical cut-offs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Eigenvalues below `eig_zero_cut · λ_max` are treated as zero.
    pub eig_zero_cut: f64,
    /// Pairs with `λ_μ + λ_ν ≤ qfi_pair_cut · λ_max` are dropped from QFI sums.
    pub qfi_pair_cut: f64,
    pub bisection_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eig_zero_cut: 1e-12,
            qfi_pair_cut: 1e-12,
            bisection_tol: 1e-10,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eig_zero_cut", self.eig_zero_cut),
            ("qfi_pair_cut", self.qfi_pair_cut),
            ("bisection_tol", self.bisection_tol),
        ] {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    range: "(0, inf)",
                });
            }
        }
        Ok(())
    }
}

/// Spectrum of `ρ` with `|⟨μ|H|ν⟩|²` in its eigenbasis, reusable across noise levels.
#[derive(Debug, Clone)]
pub struct QfiKernel {
    pub eig: EigenSystem,
    /// `H` in the eigenbasis of `ρ`.
    pub h_eig: ComplexMatrix,
}

impl QfiKernel {
    pub fn new(rho: &ComplexMatrix, h: &ComplexMatrix) -> Result<Self> {
        rho.ensure_same_dim(h)?;
        let eig = hermitian_eig(rho)?;
        let v = &eig.vectors;
        let h_eig = v.adjoint().matmul(&h.matmul(v));
        Ok(Self { eig, h_eig })
    }

    /// Eigenvalues of `p ρ + (1−p) I/n`.
    fn mixed_values(&self, p: f64) -> Vec<f64> {
        let n = self.eig.len() as f64;
        self.eig
            .values
            .iter()
            .map(|&l| p * l + (1.0 - p) / n)
            .collect()
    }

    fn pair_sum(&self, values: &[f64], cut: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
        let lmax = values.iter().copied().fold(0.0, f64::max);
        let thresh = cut * lmax;
        let n = values.len();
        let mut acc = 0.0;
        for mu in 0..n {
            for nu in 0..n {
                let (a, b) = (values[mu], values[nu]);
                if a + b <= thresh {
                    continue;
                }
                let h2 = self.h_eig[(mu, nu)].norm_sqr();
                if h2 != 0.0 {
                    acc += f(a, b) * h2;
                }
            }
        }
        acc
    }

    /// QFI of `p ρ + (1−p) I/n`.
    pub fn qfi_mixed(&self, p: f64, tol: &ToleranceConfig) -> f64 {
        let values = self.mixed_values(p);
        2.0 * self.pair_sum(&values, tol.qfi_pair_cut, |a, b| (a - b).powi(2) / (a + b))
    }

    pub fn qfi(&self, tol: &ToleranceConfig) -> f64 {
        self.qfi_mixed(1.0, tol)
    }
}

/// `F_Q[ρ, H] = 2 Σ (λ_μ − λ_ν)²/(λ_μ + λ_ν) |⟨μ|H|ν⟩|²`.
pub fn qfi(rho: &ComplexMatrix, h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    Ok(QfiKernel::new(rho, h)?.qfi(tol))
}

/// `4⟨H²⟩ − 8 Σ λ_μλ_ν/(λ_μ + λ_ν) |⟨μ|H|ν⟩|²`.
pub fn qfi_alt(rho: &ComplexMatrix, h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    let k = QfiKernel::new(rho, h)?;
    let h2 = expectation(rho, &h.matmul(h))?;
    let s = k.pair_sum(&k.eig.values, tol.qfi_pair_cut, |a, b| a * b / (a + b));
    Ok(4.0 * h2 - 8.0 * s)
}

/// `Re tr(ρ A)`.
pub fn expectation(rho: &ComplexMatrix, a: &ComplexMatrix) -> Result<f64> {
    rho.ensure_same_dim(a)?;
    Ok(rho.trace_product(a).re)
}

/// `(ΔH)² = ⟨H²⟩ − ⟨H⟩²`.
pub fn variance(rho: &ComplexMatrix, h: &ComplexMatrix) -> Result<f64> {
    let m = expectation(rho, h)?;
    Ok(expectation(rho, &h.matmul(h))? - m * m)
}

/// `Σ_n (λ_max(H_n) − λ_min(H_n))²` for local terms `H_n`.
pub fn sep_bound(h1: &ComplexMatrix, h2: &ComplexMatrix) -> Result<f64> {
    let mut total = 0.0;
    for h in [h1, h2] {
        if h.rows() == 0 {
            continue;
        }
        let e = hermitian_eig(h)?;
        total += (e.max() - e.min()).powi(2);
    }
    Ok(total)
}

/// `F_Q / F_Q^(sep)`.
pub fn gain(qfi: f64, sep_bound: f64) -> f64 {
    qfi / sep_bound
}

#[derive(Debug, Clone, PartialEq)]
pub struct QfiReport {
    pub qfi: f64,
    pub variance: f64,
    pub mean_h: f64,
    pub sep_bound: f64,
    pub gain: f64,
    /// Hilbert space dimension of the state.
    pub dimension: usize,
}

impl QfiReport {
    pub fn compute(
        rho: &ComplexMatrix,
        h: &ComplexMatrix,
        sep_bound: f64,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        let q = qfi(rho, h, tol)?;
        Ok(Self {
            qfi: q,
            variance: variance(rho, h)?,
            mean_h: expectation(rho, h)?,
            sep_bound,
            gain: gain(q, sep_bound),
            dimension: rho.rows(),
        })
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::OutOfRange {
            name: "d",
            value: d as f64,
            range: "d >= 2",
        });
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// `16√d/(1+√d)`.
pub fn qfi_f1_analytic(d: usize) -> Result<f64> {
    check_d(d)?;
    let s = (d as f64).sqrt();
    Ok(16.0 * s / (1.0 + s))
}

/// `2√d/(1+√d)`.
pub fn gain_analytic(d: usize) -> Result<f64> {
    Ok(qfi_f1_analytic(d)? / 8.0)
}

/// `2p₁p²/((2p₁−1)p + 1) · 16√d/(1+√d)`.
pub fn qfi_noisy_analytic(d: usize, p: f64) -> Result<f64> {
    check_p(p)?;
    let f = qfi_f1_analytic(d)?;
    let p1 = p1(d);
    Ok(2.0 * p1 * p * p / ((2.0 * p1 - 1.0) * p + 1.0) * f)
}

/// `1 − (2p₁ − 1 + √((2p₁−1)² + 16p₁²))/(8p₁²)`.
pub fn robustness_analytic(d: usize) -> Result<f64> {
    check_d(d)?;
    let p1 = p1(d);
    let a = 2.0 * p1 - 1.0;
    Ok(1.0 - (a + (a * a + 16.0 * p1 * p1).sqrt()) / (8.0 * p1 * p1))
}

/// Largest white-noise fraction `r` with `F_Q[(1−r)ρ + r I/n, H] ≥ sep_bound`, by bisection.
pub fn robustness_numeric(
    rho: &ComplexMatrix,
    h: &ComplexMatrix,
    sep_bound: f64,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let k = QfiKernel::new(rho, h)?;
    robustness_from_kernel(&k, sep_bound, tol)
}

pub fn robustness_from_kernel(k: &QfiKernel, sep_bound: f64, tol: &ToleranceConfig) -> Result<f64> {
    let q = k.qfi(tol);
    if q <= sep_bound {
        return Err(Error::NotUseful {
            qfi: q,
            bound: sep_bound,
        });
    }
    let (mut lo, mut hi) = (0.0, 1.0 - 1e-9);
    while hi - lo > tol.bisection_tol {
        let mid = 0.5 * (lo + hi);
        if k.qfi_mixed(1.0 - mid, tol) >= sep_bound {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `M_opt = 2i Σ_kl (λ_k − λ_l)/(λ_k + λ_l) ⟨k|H|l⟩ |k⟩⟨l|`.
pub fn sld(rho: &ComplexMatrix, h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let k = QfiKernel::new(rho, h)?;
    let vals = &k.eig.values;
    let n = vals.len();
    let thresh = tol.qfi_pair_cut * vals.iter().copied().fold(0.0, f64::max);
    let m_eig = ComplexMatrix::from_fn(n, n, |a, b| {
        let s = vals[a] + vals[b];
        if s <= thresh {
            C64::new(0.0, 0.0)
        } else {
            I * k.h_eig[(a, b)] * (2.0 * (vals[a] - vals[b]) / s)
        }
    });
    let v = &k.eig.vectors;
    Ok(v.matmul(&m_eig).matmul(&v.adjoint()).hermitian_part())
}

/// `⟨i[M, H]⟩`.
pub fn commutator_signal(rho: &ComplexMatrix, m: &ComplexMatrix, h: &ComplexMatrix) -> Result<f64> {
    expectation(rho, &m.commutator(h).scale_complex(I))
}

const SIGNAL_CUT: f64 = 1e-12;

/// `(ΔM)² / ⟨i[M, H]⟩²`.
pub fn error_propagation(rho: &ComplexMatrix, m: &ComplexMatrix, h: &ComplexMatrix) -> Result<f64> {
    let signal = commutator_signal(rho, m, h)?;
    if signal.abs() <= SIGNAL_CUT {
        return Err(Error::VanishingSignal { value: signal });
    }
    Ok(variance(rho, m)? / (signal * signal))
}

/// `W = −M² + 2i[H, M]`, so that `tr(ρW)` is the see-saw objective.
pub fn seesaw_weight(m: &ComplexMatrix, h: &ComplexMatrix) -> ComplexMatrix {
    let mut w = m.matmul(m).scale(-1.0);
    w.add_scaled(&h.commutator(m), C64::new(0.0, 2.0));
    w.hermitian_part()
}

/// `−⟨M²⟩ + 2⟨i[H, M]⟩`, equal to `F_Q` when `M` is the SLD.
pub fn seesaw_objective(rho: &ComplexMatrix, m: &ComplexMatrix, h: &ComplexMatrix) -> Result<f64> {
    expectation(rho, &seesaw_weight(m, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, pauli_z, random_density, random_pure};
    use crate::states::{
        build_rho_f1, hamiltonian_h, maximally_entangled_state, F1Spec, SubsystemOrder, UnitaryKind,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn anchor_value_at_d2() {
        let b = build_rho_f1(
            F1Spec {
                d: 2,
                unitary: UnitaryKind::Hadamard,
            },
            SubsystemOrder::KeyShield,
        )
        .unwrap();
        let q = qfi(&b.rho, &hamiltonian_h(2), &tol()).unwrap();
        assert!((q - (32.0 - 16.0 * 2f64.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn maximally_mixed_has_no_information() {
        let rho = ComplexMatrix::identity(16).scale(1.0 / 16.0);
        assert_eq!(qfi(&rho, &hamiltonian_h(2), &tol()).unwrap(), 0.0);
        assert!(sld(&rho, &hamiltonian_h(2), &tol()).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn maximally_entangled_reaches_sixteen() {
        for d in [2, 3] {
            let q = qfi(&maximally_entangled_state(d), &hamiltonian_h(d), &tol()).unwrap();
            assert!((q - 16.0).abs() < 1e-10);
        }
    }

    #[test]
    fn two_formulas_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = hamiltonian_h(2);
        for _ in 0..5 {
            let rho = random_density(16, &mut rng);
            let a = qfi(&rho, &h, &tol()).unwrap();
            let b = qfi_alt(&rho, &h, &tol()).unwrap();
            assert!((a - b).abs() < 1e-9);
            assert!(a <= 4.0 * variance(&rho, &h).unwrap() + 1e-8);
        }
    }

    #[test]
    fn pure_state_qfi_is_four_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let psi = random_pure(16, &mut rng);
        let rho = ComplexMatrix::projector(&psi);
        let h = hamiltonian_h(2);
        let v = variance(&rho, &h).unwrap();
        assert!((qfi_alt(&rho, &h, &tol()).unwrap() - 4.0 * v).abs() < 1e-9);
        assert!((qfi(&rho, &h, &tol()).unwrap() - 4.0 * v).abs() < 1e-9);
    }

    #[test]
    fn separable_bound_cases() {
        let z = kron(&pauli_z(), &ComplexMatrix::identity(3));
        let zero = ComplexMatrix::zeros(6, 6);
        assert_eq!(sep_bound(&z, &z).unwrap(), 8.0);
        assert_eq!(sep_bound(&zero, &zero).unwrap(), 0.0);
        assert_eq!(sep_bound(&z, &zero).unwrap(), 4.0);
    }

    #[test]
    fn analytic_formulas() {
        assert!((qfi_f1_analytic(2).unwrap() - (32.0 - 16.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!((qfi_f1_analytic(4).unwrap() - 32.0 / 3.0).abs() < 1e-12);
        assert!((16.0 - qfi_f1_analytic(100_000_000).unwrap()) < 1e-2);
        assert!(qfi_f1_analytic(1).is_err());
        for d in 2..20 {
            assert!(
                (qfi_noisy_analytic(d, 1.0).unwrap() - qfi_f1_analytic(d).unwrap()).abs() < 1e-12
            );
            assert_eq!(qfi_noisy_analytic(d, 0.0).unwrap(), 0.0);
            let r = robustness_analytic(d).unwrap();
            assert!((qfi_noisy_analytic(d, 1.0 - r).unwrap() - 8.0).abs() < 1e-10);
        }
        assert!(qfi_noisy_analytic(2, -0.1).is_err());
        let limit = 1.0 - (1.0 + 17f64.sqrt()) / 8.0;
        // the approach to the limit is slow, about 0.485/√d
        let gap = |d: usize| limit - robustness_analytic(d).unwrap();
        assert!((gap(1_000_000) - 4.85e-4).abs() < 1e-6);
        assert!(gap(100_000_000) < 1e-4);
        assert!(
            (2..64).all(|d| robustness_analytic(d + 1).unwrap() > robustness_analytic(d).unwrap())
        );
    }

    #[test]
    fn robustness_bisection_matches_formula() {
        let b = build_rho_f1(F1Spec::fourier(2), SubsystemOrder::KeyShield).unwrap();
        let r = robustness_numeric(&b.rho, &hamiltonian_h(2), 8.0, &tol()).unwrap();
        assert!((r - robustness_analytic(2).unwrap()).abs() < 1e-8);
        let mixed = ComplexMatrix::identity(16).scale(1.0 / 16.0);
        assert!(matches!(
            robustness_numeric(&mixed, &hamiltonian_h(2), 8.0, &tol()),
            Err(Error::NotUseful { .. })
        ));
    }

    #[test]
    fn sld_saturates_error_propagation() {
        let b = build_rho_f1(
            F1Spec {
                d: 2,
                unitary: UnitaryKind::Hadamard,
            },
            SubsystemOrder::KeyShield,
        )
        .unwrap();
        let h = hamiltonian_h(2);
        let m = sld(&b.rho, &h, &tol()).unwrap();
        let q = qfi(&b.rho, &h, &tol()).unwrap();
        assert!((error_propagation(&b.rho, &m, &h).unwrap() - 1.0 / q).abs() < 1e-10);
        assert!((error_propagation(&b.rho, &m.scale(2.0), &h).unwrap() - 1.0 / q).abs() < 1e-10);
        assert!((seesaw_objective(&b.rho, &m, &h).unwrap() - q).abs() < 1e-8);
        // the commutator in the order i[M, H] gives −F_Q
        assert!((commutator_signal(&b.rho, &m, &h).unwrap() + q).abs() < 1e-8);
    }

    #[test]
    fn error_propagation_dominates_inverse_qfi() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let h = hamiltonian_h(2);
        let rho = random_density(16, &mut rng);
        let bound = 1.0 / qfi(&rho, &h, &tol()).unwrap();
        for _ in 0..20 {
            let m = crate::linalg::gaussian_hermitian(16, &mut rng);
            if let Ok(e) = error_propagation(&rho, &m, &h) {
                assert!(e >= bound - 1e-8);
            }
        }
        let id = ComplexMatrix::identity(16);
        assert!(matches!(
            error_propagation(&rho, &id, &h),
            Err(Error::VanishingSignal { .. })
        ));
    }

    #[test]
    fn report_invariants() {
        let b = build_rho_f1(F1Spec::fourier(3), SubsystemOrder::KeyShield).unwrap();
        let r = QfiReport::compute(&b.rho, &hamiltonian_h(3), 8.0, &tol()).unwrap();
        assert!(r.qfi <= 4.0 * r.variance + 1e-8);
        assert!((r.gain - r.qfi / 8.0).abs() < 1e-12);
        assert!(r.mean_h.abs() < 1e-12);
        assert_eq!(r.dimension, 36);
    }
}
