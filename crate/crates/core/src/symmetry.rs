//! Path symmetry: invariance under complex conjugation in the counting basis,
//! which exchanges the arm intensities (`J3 -> -J3`) while fixing `J1` and
//! `J2`.
//!
//! In the counting basis the condition is that all non-zero amplitudes share
//! one phase, `<m1|ψ> = <m1|ψ>* e^{-2iχ0}`. In the internal basis it pairs
//! `m` with `-m`: `<m|ψ> = <-m|ψ>* e^{-2iχ0}`. Both give the same `χ0`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::spinspace::{Basis, CountingFrame, PureSector};

/// Default decision tolerance on the residual.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Amplitudes below this fraction of the largest one carry no phase.
pub const AMP_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    pub symmetric: bool,
    /// Common phase, in `[0, π)`. `None` when the state is not symmetric.
    pub chi0: Option<f64>,
    /// Largest deviation from the defining condition.
    pub residual: f64,
    pub basis_used: Basis,
    /// The counting-basis support has gaps, so disjoint blocks of amplitudes
    /// only share `χ0` through the reported verdict.
    pub ambiguous: bool,
}

fn wrap_pi(x: f64) -> f64 {
    let r = x - PI * libm::floor(x / PI);
    if r >= PI - 1e-15 {
        0.0
    } else {
        r
    }
}

fn dominant(amps: &[Complex64]) -> Result<(usize, f64)> {
    let (idx, max) = amps
        .iter()
        .enumerate()
        .map(|(i, a)| (i, a.norm()))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    if !(max > 0.0) {
        return Err(Error::DegenerateState);
    }
    Ok((idx, max))
}

fn support_has_gaps(amps: &[Complex64], floor: f64) -> bool {
    let support: Vec<usize> = amps
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > floor)
        .map(|(i, _)| i)
        .collect();
    support.windows(2).any(|w| w[1] != w[0] + 1)
}

fn verdict(residual: f64, chi0: f64, tol: f64, basis_used: Basis, ambiguous: bool) -> SymmetryReport {
    let symmetric = residual < tol;
    SymmetryReport {
        symmetric,
        chi0: symmetric.then(|| wrap_pi(chi0)),
        residual,
        basis_used,
        ambiguous,
    }
}

fn check_counting_amps(amps: &[Complex64], tol: f64) -> Result<SymmetryReport> {
    let (idx, max) = dominant(amps)?;
    let floor = AMP_FLOOR * max;
    // a = |a| e^{-iχ0}
    let chi0 = -amps[idx].arg();
    let rot = Complex64::from_polar(1.0, chi0);
    let residual = amps
        .iter()
        .filter(|a| a.norm() > floor)
        .map(|a| (a * rot).im.abs())
        .fold(0.0, f64::max);
    Ok(verdict(
        residual,
        chi0,
        tol,
        Basis::CountingJ1,
        support_has_gaps(amps, floor),
    ))
}

/// Symmetry test on the counting-basis amplitudes: `χ0` is read off the
/// largest amplitude, the residual is `max |Im(<m1|ψ> e^{iχ0})|`.
pub fn check_symmetry_counting(state: &PureSector, tol: f64) -> Result<SymmetryReport> {
    match state.basis() {
        Basis::CountingJ1 => check_counting_amps(state.amps(), tol),
        Basis::InternalJ3 => {
            let frame = CountingFrame::new(state.sector());
            check_counting_amps(&frame.to_counting(state.amps()), tol)
        }
    }
}

fn check_internal_amps(amps: &[Complex64], tol: f64) -> Result<SymmetryReport> {
    let (idx, max) = dominant(amps)?;
    let d = amps.len();
    let partner = amps[d - 1 - idx];
    // ψ_k ψ_{k'} = |ψ_{k'}|^2 e^{-2iχ0}
    let product = amps[idx] * partner;
    let chi0 = if product.norm() > AMP_FLOOR * max * max {
        -0.5 * product.arg()
    } else {
        -amps[idx].arg()
    };
    let e = Complex64::from_polar(1.0, -2.0 * chi0);
    let residual = (0..d)
        .map(|k| 0.5 * (amps[k] - amps[d - 1 - k].conj() * e).norm())
        .fold(0.0, f64::max);
    // χ0 comes from one m/-m pair here, so there is no support ambiguity.
    Ok(verdict(residual, chi0, tol, Basis::InternalJ3, false))
}

/// Symmetry test in the internal basis via the `m <-> -m` pairing. The
/// residual is `max_m ½|<m|ψ> - <-m|ψ>* e^{-2iχ0}|`, on the same scale as the
/// counting-basis residual.
pub fn check_symmetry_internal(state: &PureSector, tol: f64) -> Result<SymmetryReport> {
    match state.basis() {
        Basis::InternalJ3 => check_internal_amps(state.amps(), tol),
        Basis::CountingJ1 => {
            let frame = CountingFrame::new(state.sector());
            check_internal_amps(&frame.to_internal(state.amps()), tol)
        }
    }
}

/// Complex conjugation in the counting basis. The result is returned in the
/// input's basis; in the internal basis this is `ψ(m) -> ψ(-m)*`.
pub fn path_exchange(state: &PureSector) -> PureSector {
    let sector = state.sector();
    let amps: Vec<Complex64> = match state.basis() {
        Basis::CountingJ1 => state.amps().iter().map(|a| a.conj()).collect(),
        Basis::InternalJ3 => {
            let frame = CountingFrame::new(sector);
            let conj: Vec<Complex64> = frame
                .to_counting(state.amps())
                .into_iter()
                .map(|a| a.conj())
                .collect();
            frame.to_internal(&conj)
        }
    };
    PureSector::from_parts(sector, state.basis(), amps)
}

/// `|<a|b>|`, equal to 1 when the states agree up to a global phase.
pub fn overlap_magnitude(a: &PureSector, b: &PureSector) -> f64 {
    linalg::vdot(a.amps(), b.amps()).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinspace::SpinSector;
    use crate::states::noon;

    #[test]
    fn real_counting_amplitudes_are_symmetric_with_zero_phase() {
        let s = PureSector::from_real(SpinSector::new(3), Basis::CountingJ1, &[0.2, -0.5, 0.7, 0.1])
            .unwrap();
        let r = check_symmetry_counting(&s, DEFAULT_TOL).unwrap();
        assert!(r.symmetric);
        assert!(r.chi0.unwrap().abs() < 1e-15);
        assert!(r.residual < 1e-15);
    }

    #[test]
    fn global_phase_sets_chi0() {
        let theta = 0.4;
        let s = PureSector::from_real(SpinSector::new(2), Basis::CountingJ1, &[0.6, 0.0, -0.8])
            .unwrap()
            .with_global_phase(theta);
        let r = check_symmetry_counting(&s, DEFAULT_TOL).unwrap();
        assert!(r.symmetric);
        // <m1|ψ> ∝ e^{-iχ0}
        assert!((r.chi0.unwrap() - (PI - theta)).abs() < 1e-12);
        assert!(r.ambiguous);
        let internal = check_symmetry_internal(&s, DEFAULT_TOL).unwrap();
        assert!(internal.symmetric);
        assert!((internal.chi0.unwrap() - r.chi0.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn unbalanced_arm_state_is_not_symmetric() {
        let s = PureSector::from_real(
            SpinSector::new(2),
            Basis::InternalJ3,
            &[libm::sqrt(0.8), 0.0, libm::sqrt(0.2)],
        )
        .unwrap();
        let c = check_symmetry_counting(&s, DEFAULT_TOL).unwrap();
        let i = check_symmetry_internal(&s, DEFAULT_TOL).unwrap();
        assert!(!c.symmetric && !i.symmetric);
        assert!(c.residual > 0.1);
        assert!(c.chi0.is_none());
    }

    #[test]
    fn noon_states_are_symmetric() {
        for n in 1..=8 {
            let s = noon(n).unwrap();
            assert!(check_symmetry_internal(&s, DEFAULT_TOL).unwrap().symmetric);
            assert!(check_symmetry_counting(&s, DEFAULT_TOL).unwrap().symmetric);
            let ex = path_exchange(&s);
            assert!((overlap_magnitude(&ex, &s) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn all_photons_in_one_arm() {
        let sector = SpinSector::new(4);
        let top = PureSector::basis_state(sector, Basis::InternalJ3, 0).unwrap();
        assert!(!check_symmetry_internal(&top, DEFAULT_TOL).unwrap().symmetric);
        assert!(!check_symmetry_counting(&top, DEFAULT_TOL).unwrap().symmetric);
        let ex = path_exchange(&top);
        let bottom = PureSector::basis_state(sector, Basis::InternalJ3, 4).unwrap();
        assert!((overlap_magnitude(&ex, &bottom) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn real_counting_state_is_exchange_fixed_point() {
        let s = PureSector::from_real(SpinSector::new(2), Basis::CountingJ1, &[0.3, 0.4, 0.5]).unwrap();
        assert_eq!(path_exchange(&s), s);
    }

    #[test]
    fn zero_state_is_degenerate() {
        assert!(matches!(
            check_counting_amps(&[Complex64::new(0.0, 0.0); 3], DEFAULT_TOL),
            Err(Error::DegenerateState)
        ));
    }
}
