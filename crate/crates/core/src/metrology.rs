//! Fluctuating photon numbers: sector-weighted Fisher information against the
//! `<N^2>` Heisenberg limit, and the squeezed-coherent / pair-state ratios.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimation::SectorProbe;
use crate::optimize;
use crate::spinspace::{self, CountingFrame, RotationLadder};
use crate::states::{self, MultiSectorState, Truncation, WeightedSector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorSensitivity {
    pub n_photons: u32,
    pub weight: f64,
    pub qfi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    /// `Σ_N w_N · 4 Var(J3)_N`
    pub total_qfi: f64,
    /// `<N^2> = Σ_N w_N N^2`
    pub heisenberg_limit: f64,
    /// `total_qfi / heisenberg_limit`, zero for the vacuum.
    pub ratio: f64,
    pub mean_n: f64,
    /// Probability mass excluded from both sums.
    pub remainder: f64,
    pub per_sector: Vec<SectorSensitivity>,
    /// `(phi, Σ_N w_N F_N(phi))` for each requested phase.
    pub cfi_scan: Vec<(f64, f64)>,
}

impl SensitivityReport {
    /// Relative spread `(max - min) / max` of the CFI scan.
    pub fn cfi_flatness(&self) -> f64 {
        let (lo, hi) = self
            .cfi_scan
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, f)| {
                (lo.min(f), hi.max(f))
            });
        if self.cfi_scan.is_empty() || hi <= 0.0 {
            0.0
        } else {
            (hi - lo) / hi
        }
    }
}

/// Calls `f` once per sector with a probe, building counting frames by one
/// pass up the rotation ladder. Only one frame is alive at a time.
pub fn for_each_probe(state: &MultiSectorState, mut f: impl FnMut(&WeightedSector, &SectorProbe)) {
    let mut ladder = RotationLadder::new();
    for ws in state.sectors() {
        let sector = ws.state.sector();
        let frame = CountingFrame::from_rotation(sector, ladder.advance_to(sector.n_photons()));
        f(ws, &SectorProbe::with_frame(&ws.state, frame));
    }
}

/// All probes at once, for callers that revisit sectors many times.
pub fn probes(state: &MultiSectorState) -> Vec<(f64, SectorProbe)> {
    let mut out = Vec::with_capacity(state.sectors().len());
    for_each_probe(state, |ws, probe| out.push((ws.weight, probe.clone())));
    out
}

/// Sector-weighted QFI, the `<N^2>` limit, and optionally the total counting
/// Fisher information over `phi_grid`.
pub fn report(state: &MultiSectorState, phi_grid: &[f64], max_remainder: f64) -> Result<SensitivityReport> {
    if state.remainder() > max_remainder {
        return Err(Error::Truncation {
            remainder: state.remainder(),
            n_max: state.max_photons() as usize,
            required_n_max: 2 * state.max_photons() as usize,
        });
    }
    let per_sector: Vec<SectorSensitivity> = state
        .sectors()
        .iter()
        .map(|ws| {
            let (mean, second) = spinspace::j3_moments(&ws.state);
            SectorSensitivity {
                n_photons: ws.n_photons(),
                weight: ws.weight,
                qfi: 4.0 * (second - mean * mean).max(0.0),
            }
        })
        .collect();
    let total_qfi = per_sector.iter().map(|s| s.weight * s.qfi).sum();
    let heisenberg_limit = state.mean_photons_sq();

    let mut totals = alloc::vec![0.0; phi_grid.len()];
    if !phi_grid.is_empty() {
        for_each_probe(state, |ws, probe| {
            for (t, &phi) in totals.iter_mut().zip(phi_grid) {
                *t += ws.weight * probe.cfi(phi);
            }
        });
    }

    Ok(SensitivityReport {
        total_qfi,
        heisenberg_limit,
        ratio: if heisenberg_limit > 0.0 {
            total_qfi / heisenberg_limit
        } else {
            0.0
        },
        mean_n: state.mean_photons(),
        remainder: state.remainder(),
        per_sector,
        cfi_scan: phi_grid.iter().copied().zip(totals).collect(),
    })
}

/// `n` equally spaced phases covering `[0, 2π)`.
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| i as f64 * 2.0 * core::f64::consts::PI / n as f64)
        .collect()
}

/// Relative orientation of the squeezed quadrature and the coherent
/// amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqueezeOrientation {
    /// Maximizes `<J3^2>`.
    Enhancing,
    Suppressing,
}

/// Closed-form moments of coherent light (`alpha`) in one port and squeezed
/// vacuum (`r`) in the other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedCoherentMoments {
    /// `4 <J3^2>`, which is the total QFI since `<J3> = 0`.
    pub j3sq4: f64,
    /// `<N^2>`
    pub n2: f64,
}

impl SqueezedCoherentMoments {
    pub fn ratio(&self) -> f64 {
        if self.n2 > 0.0 {
            self.j3sq4 / self.n2
        } else {
            0.0
        }
    }
}

/// With `s = sinh r`, `c = cosh r`:
/// `4<J3^2> = alpha^2 e^{±2r} + s^2` and
/// `<N^2> = (alpha^2 + s^2)^2 + alpha^2 + 2 s^2 c^2`.
pub fn squeezed_coherent_moments(
    alpha: f64,
    r: f64,
    orientation: SqueezeOrientation,
) -> SqueezedCoherentMoments {
    let a2 = alpha * alpha;
    let s2 = libm::sinh(r) * libm::sinh(r);
    let c2 = libm::cosh(r) * libm::cosh(r);
    let gain = match orientation {
        SqueezeOrientation::Enhancing => libm::exp(2.0 * r),
        SqueezeOrientation::Suppressing => libm::exp(-2.0 * r),
    };
    let mean = a2 + s2;
    SqueezedCoherentMoments {
        j3sq4: a2 * gain + s2,
        n2: mean * mean + a2 + 2.0 * s2 * c2,
    }
}

/// `(alpha, r)` with `alpha^2 + sinh^2 r = n_bar` and `4 alpha^2 / e^{2r} = q`.
///
/// Requires `0 <= q < 4 n_bar` (at `r = 0` all light is coherent and
/// `q = 4 n_bar`).
pub fn params_for_q(q: f64, n_bar: f64) -> Result<(f64, f64)> {
    if !(n_bar > 0.0) || !(q >= 0.0) || !(q <= 4.0 * n_bar) {
        return Err(Error::InvalidParameter(alloc::format!(
            "intensity ratio q = {q} is not reachable at mean photon number {n_bar}"
        )));
    }
    // x = e^{2r}: (q + 1) x^2 - (2 + 4 n_bar) x + 1 = 0, larger root.
    let b = 2.0 + 4.0 * n_bar;
    let disc = (b * b - 4.0 * (q + 1.0)).max(0.0);
    let x = ((b + libm::sqrt(disc)) / (2.0 * (q + 1.0))).max(1.0);
    let r = 0.5 * libm::log(x);
    let alpha = libm::sqrt(q * x / 4.0);
    Ok((alpha, r))
}

/// Sensitivity ratio at fixed total mean photon number as a function of `q`.
pub fn ratio_at_q(q: f64, n_bar: f64) -> Result<f64> {
    let (alpha, r) = params_for_q(q, n_bar)?;
    Ok(squeezed_coherent_moments(alpha, r, SqueezeOrientation::Enhancing).ratio())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QOptimum {
    pub q: f64,
    pub ratio: f64,
    pub alpha: f64,
    pub r: f64,
}

/// Maximizes `4<J3^2>/<N^2>` over `q` at fixed `alpha^2 + sinh^2 r = n_bar`:
/// 64 log-spaced points on `[0.05, 50]` (clipped to reachable `q`), then
/// golden-section refinement to `1e-7` in `q`.
pub fn optimize_q(n_bar: f64) -> Result<QOptimum> {
    if !(n_bar > 0.0) || !n_bar.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!(
            "mean photon number must be positive, got {n_bar}"
        )));
    }
    let lo = 0.05;
    let hi = 50.0f64.min(4.0 * n_bar);
    if hi <= lo {
        return Err(Error::InvalidParameter(alloc::format!(
            "mean photon number {n_bar} too small for the q range"
        )));
    }
    let best = optimize::log_grid_then_golden(
        |q| ratio_at_q(q, n_bar).unwrap_or(f64::NEG_INFINITY),
        lo,
        hi,
        64,
        1e-7,
    );
    let (alpha, r) = params_for_q(best.x, n_bar)?;
    Ok(QOptimum {
        q: best.x,
        ratio: best.value,
        alpha,
        r,
    })
}

/// Pair-state sensitivity ratio from truncated numerics.
pub fn pair_state_ratio(r: f64, trunc: &Truncation) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "pair state needs r > 0, got {r}"
        )));
    }
    let state = states::pair_state(r, trunc)?;
    Ok(report(&state, &[], trunc.eps)?.ratio)
}

/// Squeezing in dB equivalent to a Fock state `|n>` in the empty port,
/// `10 log10(2n + 1)`.
pub fn equivalent_squeezing_db(n: u32) -> f64 {
    10.0 * libm::log10(2.0 * n as f64 + 1.0)
}
