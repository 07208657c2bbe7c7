//! Rayon fan-out over the pure per-trial and per-phase computations. Results
//! are collected in index order, so they match the sequential versions
//! exactly.

use pathsym_core::metrology;
use pathsym_core::simulate::{TrialSuite, TrialSummary};
use pathsym_core::MultiSectorState;
use rayon::prelude::*;

pub fn run_trials(suite: &TrialSuite) -> pathsym_core::Result<TrialSummary> {
    let estimates = (0..suite.config().trials)
        .into_par_iter()
        .map(|t| suite.run_trial(t))
        .collect::<pathsym_core::Result<Vec<f64>>>()?;
    Ok(suite.summarize(estimates))
}

/// One point of a counting-Fisher-information scan.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ScanPoint {
    pub phi: f64,
    /// `Σ_N w_N F_N(phi)`
    pub cfi: f64,
    /// `Σ_N w_N QFI_N`
    pub qfi: f64,
    pub gap: f64,
    /// Largest per-sector `|F_N - QFI_N| / QFI_N`.
    pub worst_sector_gap: f64,
}

pub fn cfi_scan(state: &MultiSectorState, phis: &[f64]) -> Vec<ScanPoint> {
    let probes = metrology::probes(state);
    let qfi: f64 = probes.iter().map(|(w, p)| w * p.qfi()).sum();
    phis.par_iter()
        .map(|&phi| {
            let mut cfi = 0.0;
            let mut worst: f64 = 0.0;
            for (w, probe) in &probes {
                let f = probe.cfi(phi);
                let q = probe.qfi();
                cfi += w * f;
                if q > 0.0 {
                    worst = worst.max((f - q).abs() / q);
                }
            }
            ScanPoint {
                phi,
                cfi,
                qfi,
                gap: qfi - cfi,
                worst_sector_gap: worst,
            }
        })
        .collect()
}

/// `steps` equal intervals from `start` to `end`, both ends included.
pub fn linspace(start: f64, end: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![start];
    }
    let h = (end - start) / steps as f64;
    (0..=steps).map(|i| start + h * i as f64).collect()
}
