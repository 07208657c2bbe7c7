//! Quantum and photon-counting Fisher information at a bias phase, and the
//! counting-diagonal estimator that saturates the generator-estimator
//! uncertainty.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::spinspace::{Basis, CountingFrame, HermitianOp, PureSector, SpinSector};
use crate::symmetry::AMP_FLOOR;

/// Outcomes below this probability contribute their limiting value
/// `4 |d<m1|ψ>/dφ|^2` to the Fisher information.
pub const P_FLOOR: f64 = 1e-14;
/// Default bound on `max |Im(λ A_m)|` for an achievable estimator.
pub const ESTIMATOR_TOL: f64 = 1e-8;
/// An outcome below the amplitude floor blocks saturation only if its
/// limiting Fisher contribution `4 |<m1|J3|ψ>|^2` exceeds this fraction of
/// the QFI.
pub const DARK_FISHER_FLOOR: f64 = 1e-10;

/// QFI and counting Fisher information at one phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherResult {
    pub qfi: f64,
    pub cfi_at_phi: f64,
    pub phi: f64,
    /// `qfi - cfi_at_phi`, never below about `-1e-8`.
    pub gap: f64,
}

/// Eigenvalues `g_m = λ A_m` of the optimal counting estimator at one phase.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorTable {
    pub phi: f64,
    /// Real part of `-i <m1|J3|ψ> / <m1|ψ>` per outcome; zero for excluded
    /// outcomes.
    pub g: Vec<f64>,
    /// `2 Var(J3)`, which gives `A = g / λ` unit slope.
    pub lambda: f64,
    /// Largest `|Im|` of the ratio over included outcomes, each weighted by
    /// `|<m1|ψ>| / max_k |<m1_k|ψ>|`. The ratio of a weak outcome is
    /// ill-conditioned (roundoff divided by a small amplitude), and the
    /// weighting keeps that noise from deciding achievability.
    pub imag_residual: f64,
    /// Unweighted largest `|Im|` of the ratio over included outcomes.
    pub max_imag_ratio: f64,
    /// Outcomes whose amplitude is below the floor.
    pub excluded: Vec<usize>,
    /// Excluded outcomes that still carry Fisher information (see
    /// [`DARK_FISHER_FLOOR`]): no finite estimator value satisfies the
    /// saturation condition there.
    pub unachievable: Vec<usize>,
    /// Counting probabilities at `phi`.
    pub probabilities: Vec<f64>,
    pub tol: f64,
}

impl EstimatorTable {
    /// True when every eigenvalue is real within `tol` and no outcome blocks
    /// saturation.
    pub fn achievable(&self) -> bool {
        self.imag_residual <= self.tol && self.unachievable.is_empty()
    }

    /// Estimator eigenvalues `A_m = g_m / λ`.
    pub fn values(&self) -> Vec<f64> {
        self.g.iter().map(|g| g / self.lambda).collect()
    }

    pub fn mean(&self) -> f64 {
        self.values()
            .iter()
            .zip(&self.probabilities)
            .map(|(a, p)| a * p)
            .sum()
    }

    /// `Σ p_m A_m^2 - (Σ p_m A_m)^2`
    pub fn variance(&self) -> f64 {
        let second: f64 = self
            .values()
            .iter()
            .zip(&self.probabilities)
            .map(|(a, p)| a * a * p)
            .sum();
        let mean = self.mean();
        second - mean * mean
    }

    /// `A` as a Hermitian operator, diagonal in the counting basis.
    pub fn operator(&self, sector: SpinSector) -> Result<HermitianOp> {
        HermitianOp::diagonal(sector, Basis::CountingJ1, &self.values())
    }
}

/// Phase-dependent robustness `R = 1 / Σ_m g_m^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Robustness {
    pub value: f64,
    pub included: usize,
    pub excluded: usize,
}

/// A sector state with its counting frame, for repeated evaluation at many
/// phases.
#[derive(Debug, Clone)]
pub struct SectorProbe {
    frame: CountingFrame,
    internal: Vec<Complex64>,
}

impl SectorProbe {
    pub fn new(state: &PureSector) -> Self {
        Self::with_frame(state, CountingFrame::new(state.sector()))
    }

    pub fn with_frame(state: &PureSector, frame: CountingFrame) -> Self {
        let internal = frame.convert(state, Basis::InternalJ3).into_amps();
        Self { frame, internal }
    }

    pub fn sector(&self) -> SpinSector {
        self.frame.sector()
    }

    pub fn frame(&self) -> &CountingFrame {
        &self.frame
    }

    pub fn j3_mean(&self) -> f64 {
        let sector = self.sector();
        self.internal
            .iter()
            .enumerate()
            .map(|(k, a)| sector.m(k) * a.norm_sqr())
            .sum()
    }

    pub fn j3_variance(&self) -> f64 {
        let sector = self.sector();
        let second: f64 = self
            .internal
            .iter()
            .enumerate()
            .map(|(k, a)| sector.m(k) * sector.m(k) * a.norm_sqr())
            .sum();
        let mean = self.j3_mean();
        (second - mean * mean).max(0.0)
    }

    /// `4 Var(J3)`; independent of the bias phase.
    pub fn qfi(&self) -> f64 {
        4.0 * self.j3_variance()
    }

    fn shifted(&self, phi: f64) -> Vec<Complex64> {
        let sector = self.sector();
        self.internal
            .iter()
            .enumerate()
            .map(|(k, a)| a * Complex64::from_polar(1.0, -phi * sector.m(k)))
            .collect()
    }

    /// The state at bias `phi`, in the internal basis.
    pub fn state_at(&self, phi: f64) -> PureSector {
        PureSector::normalized(self.sector(), Basis::InternalJ3, self.shifted(phi))
            .expect("phase shift preserves the norm")
    }

    /// Counting amplitudes `<m1|ψ(φ)>` and their phase derivatives.
    pub fn counting_amplitudes(&self, phi: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        let sector = self.sector();
        let s = self.shifted(phi);
        let ds: Vec<Complex64> = s
            .iter()
            .enumerate()
            .map(|(k, a)| a * Complex64::new(0.0, -sector.m(k)))
            .collect();
        (self.frame.to_counting(&s), self.frame.to_counting(&ds))
    }

    pub fn probabilities(&self, phi: f64) -> Vec<f64> {
        let s = self.shifted(phi);
        self.frame
            .to_counting(&s)
            .iter()
            .map(|a| a.norm_sqr())
            .collect()
    }

    /// `Σ_m (dp_m/dφ)^2 / p_m` with `dp_m/dφ = 2 Re(conj(a_m) da_m/dφ)`.
    pub fn cfi(&self, phi: f64) -> f64 {
        let (a, da) = self.counting_amplitudes(phi);
        a.iter()
            .zip(&da)
            .map(|(a, da)| {
                let p = a.norm_sqr();
                if p < P_FLOOR {
                    4.0 * da.norm_sqr()
                } else {
                    let dp = 2.0 * (a.conj() * da).re;
                    dp * dp / p
                }
            })
            .sum()
    }

    pub fn fisher(&self, phi: f64) -> FisherResult {
        let qfi = self.qfi();
        let cfi = self.cfi(phi);
        FisherResult {
            qfi,
            cfi_at_phi: cfi,
            phi,
            gap: qfi - cfi,
        }
    }

    /// Estimator eigenvalues from `λ A_m = -i <m1|J3|ψ> / <m1|ψ>` at bias
    /// `phi`.
    pub fn optimal_estimator(&self, phi: f64, tol: f64) -> Result<EstimatorTable> {
        let variance = self.j3_variance();
        if !(variance > 1e-14) {
            return Err(Error::NoSensitivity { variance });
        }
        let sector = self.sector();
        let s = self.shifted(phi);
        let j3s: Vec<Complex64> = s
            .iter()
            .enumerate()
            .map(|(k, a)| a * sector.m(k))
            .collect();
        let a = self.frame.to_counting(&s);
        let b = self.frame.to_counting(&j3s);
        let floor = AMP_FLOOR * linalg::max_abs(&a);
        // a vanishing outcome contributes 4|b_m|^2 to the Fisher information
        let dark_floor = DARK_FISHER_FLOOR * variance;

        let mut g = Vec::with_capacity(a.len());
        let mut excluded = Vec::new();
        let mut unachievable = Vec::new();
        let a_max = linalg::max_abs(&a);
        let mut imag_residual = 0.0f64;
        let mut max_imag_ratio = 0.0f64;
        for (m, (am, bm)) in a.iter().zip(&b).enumerate() {
            if am.norm() <= floor {
                excluded.push(m);
                if bm.norm_sqr() > dark_floor {
                    unachievable.push(m);
                }
                g.push(0.0);
                continue;
            }
            let ratio = Complex64::new(0.0, -1.0) * bm / am;
            max_imag_ratio = max_imag_ratio.max(ratio.im.abs());
            imag_residual = imag_residual.max(ratio.im.abs() * am.norm() / a_max);
            g.push(ratio.re);
        }
        Ok(EstimatorTable {
            phi,
            g,
            lambda: 2.0 * variance,
            imag_residual,
            max_imag_ratio,
            excluded,
            unachievable,
            probabilities: a.iter().map(|z| z.norm_sqr()).collect(),
            tol,
        })
    }

    pub fn robustness(&self, phi: f64) -> Result<Robustness> {
        let table = self.optimal_estimator(phi, ESTIMATOR_TOL)?;
        if !table.unachievable.is_empty() {
            return Err(Error::EstimatorUnachievable {
                phi,
                outcomes: table.unachievable,
            });
        }
        let sum: f64 = table.g.iter().map(|g| g * g).sum();
        if !(sum > 0.0) {
            return Err(Error::NoSensitivity { variance: 0.0 });
        }
        Ok(Robustness {
            value: 1.0 / sum,
            included: table.g.len() - table.excluded.len(),
            excluded: table.excluded.len(),
        })
    }
}

/// `4 Var(J3)`.
pub fn qfi_sector(state: &PureSector) -> f64 {
    let (mean, second) = crate::spinspace::j3_moments(state);
    4.0 * (second - mean * mean).max(0.0)
}

/// `p_m(φ) = |<m1| e^{-iφJ3} |ψ>|^2`.
pub fn counting_probabilities(state: &PureSector, phi: f64) -> Vec<f64> {
    SectorProbe::new(state).probabilities(phi)
}

pub fn cfi_counting(state: &PureSector, phi: f64) -> f64 {
    SectorProbe::new(state).cfi(phi)
}

pub fn fisher(state: &PureSector, phi: f64) -> FisherResult {
    SectorProbe::new(state).fisher(phi)
}

pub fn optimal_estimator(state: &PureSector, phi: f64, tol: f64) -> Result<EstimatorTable> {
    SectorProbe::new(state).optimal_estimator(phi, tol)
}

pub fn robustness(state: &PureSector, phi: f64) -> Result<Robustness> {
    SectorProbe::new(state).robustness(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinspace::{estimator_slope, uncertainty_product_check};
    use crate::states::{self, noon};
    use core::f64::consts::{FRAC_PI_4, PI};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn noon_qfi_is_n_squared() {
        for n in 1..=10 {
            assert!((qfi_sector(&noon(n).unwrap()) - (n * n) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn twin_fock_and_eigenstate_qfi() {
        let twin = states::twin_fock(1);
        assert!((qfi_sector(&twin.sectors()[0].state) - 4.0).abs() < 1e-13);
        let top = PureSector::basis_state(SpinSector::new(5), Basis::InternalJ3, 0).unwrap();
        assert_eq!(qfi_sector(&top), 0.0);
    }

    #[test]
    fn probabilities_at_zero_are_counting_weights() {
        let s = PureSector::from_real(SpinSector::new(2), Basis::CountingJ1, &[0.3, -0.4, 0.5]).unwrap();
        let p = counting_probabilities(&s, 0.0);
        for (pm, a) in p.iter().zip(s.amps()) {
            assert!((pm - a.norm_sqr()).abs() < 1e-14);
        }
    }

    #[test]
    fn single_photon_fringe() {
        let s = PureSector::basis_state(SpinSector::new(1), Basis::CountingJ1, 0).unwrap();
        for i in 0..16 {
            let phi = i as f64 * 0.4;
            let p = counting_probabilities(&s, phi);
            assert!((p[0] + p[1] - 1.0).abs() < 1e-14);
            let c = libm::cos(phi / 2.0);
            assert!((p[0] - c * c).abs() < 1e-14);
        }
    }

    #[test]
    fn noon_two_fringe_has_period_pi() {
        let s = noon(2).unwrap();
        for i in 0..10 {
            let phi = 0.37 * i as f64;
            let p = counting_probabilities(&s, phi);
            let q = counting_probabilities(&s, phi + PI);
            for (a, b) in p.iter().zip(&q) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn unbalanced_state_loses_information() {
        let s = PureSector::from_real(
            SpinSector::new(2),
            Basis::InternalJ3,
            &[libm::sqrt(0.8), 0.0, libm::sqrt(0.2)],
        )
        .unwrap();
        let probe = SectorProbe::new(&s);
        assert!((probe.qfi() - 2.56).abs() < 1e-13);
        let worst = (0..64)
            .map(|i| probe.cfi(i as f64 * 2.0 * PI / 64.0))
            .fold(f64::INFINITY, f64::min);
        assert!(worst < 2.56 - 0.1, "min cfi {worst}");
    }

    #[test]
    fn spin_coherent_sectors_reach_shot_noise() {
        for n in 1..=8u32 {
            let s = PureSector::basis_state(SpinSector::new(n), Basis::CountingJ1, 0).unwrap();
            let probe = SectorProbe::new(&s);
            for i in 0..16 {
                let phi = i as f64 * PI / 8.0;
                assert!(rel(probe.cfi(phi), n as f64) < 1e-10, "N={n} phi={phi}");
            }
        }
    }

    #[test]
    fn eigenstate_estimator_is_imaginary() {
        let sector = SpinSector::new(4);
        let top = PureSector::basis_state(sector, Basis::InternalJ3, 0).unwrap();
        assert!(matches!(
            optimal_estimator(&top, 0.0, ESTIMATOR_TOL),
            Err(Error::NoSensitivity { .. })
        ));
        assert!(robustness(&top, 0.0).is_err());
    }

    #[test]
    fn noon_two_estimator_saturates() {
        let s = noon(2).unwrap();
        // φ = 0 is a dark point: all light leaves as |1,1>.
        let dark = optimal_estimator(&s, 0.0, ESTIMATOR_TOL).unwrap();
        assert!(!dark.achievable());
        assert_eq!(dark.unachievable, [1]);

        let s = crate::spinspace::apply_phase_shift(&s, 0.3);
        let table = optimal_estimator(&s, 0.0, ESTIMATOR_TOL).unwrap();
        assert!(table.imag_residual < 1e-10);
        assert!(table.achievable());
        let a = table.operator(s.sector()).unwrap();
        let slope = estimator_slope(&s, &a).unwrap();
        assert!((slope - 1.0).abs() < 1e-12);
        let check = uncertainty_product_check(&s, &a).unwrap();
        assert!(check.is_saturated(1e-10));
        assert!((table.variance() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn noon_robustness_depends_on_phase() {
        let s = noon(2).unwrap();
        assert!(matches!(
            robustness(&s, 0.0),
            Err(Error::EstimatorUnachievable { .. })
        ));
        let r0 = robustness(&s, 0.3).unwrap();
        let r1 = robustness(&s, 0.3 + FRAC_PI_4).unwrap();
        assert!(r0.value > 0.0 && r1.value > 0.0);
        assert!((r0.value - r1.value).abs() > 1e-3);
    }
}
