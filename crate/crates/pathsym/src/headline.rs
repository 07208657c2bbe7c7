//! The headline numbers, each checked against a target and tolerance.

use pathsym_core::estimation::qfi_sector;
use pathsym_core::metrology::{self, phase_grid};
use pathsym_core::{states, MultiSectorState};
use serde::Serialize;

use crate::config::Settings;
use crate::error::CliError;
use crate::parallel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub id: &'static str,
    pub claim: &'static str,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

struct Check {
    id: &'static str,
    claim: &'static str,
    target: f64,
    tolerance: f64,
    compute: fn(&Settings) -> Result<f64, CliError>,
}

fn noon_qfi_deviation(_: &Settings) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for n in 1..=10u32 {
        let qfi = qfi_sector(&states::noon(n)?);
        worst = worst.max((qfi - (n * n) as f64).abs());
    }
    Ok(worst)
}

fn q_star(_: &Settings) -> Result<f64, CliError> {
    Ok(metrology::optimize_q(1000.0)?.q)
}

fn ratio_star(_: &Settings) -> Result<f64, CliError> {
    Ok(metrology::optimize_q(1000.0)?.ratio)
}

fn pair_ratio(settings: &Settings) -> Result<f64, CliError> {
    Ok(metrology::pair_state_ratio(1.5, &settings.truncation())?)
}

fn db_equivalent(_: &Settings) -> Result<f64, CliError> {
    Ok(metrology::equivalent_squeezing_db(1))
}

/// The states whose counting information should not depend on the phase.
pub fn symmetric_family(settings: &Settings) -> Result<Vec<(&'static str, MultiSectorState)>, CliError> {
    let t = settings.truncation();
    Ok(vec![
        ("noon:N=2", MultiSectorState::single(states::noon(2)?)),
        ("noon:N=4", MultiSectorState::single(states::noon(4)?)),
        ("twin:n=2", states::twin_fock(2)),
        ("cs:alpha=2,r=0.8", states::squeezed_coherent(2.0, 0.8, &t)?),
        ("pairs:r=1", states::pair_state(1.0, &t)?),
        ("numcoh:n=1,alpha=1.5", states::number_coherent(1, 1.5, &t)?),
    ])
}

fn cfi_flatness(settings: &Settings) -> Result<f64, CliError> {
    let grid = phase_grid(64);
    let mut worst: f64 = 0.0;
    for (_, state) in symmetric_family(settings)? {
        for point in parallel::cfi_scan(&state, &grid) {
            worst = worst.max(point.worst_sector_gap);
        }
    }
    Ok(worst)
}

const CHECKS: [Check; 6] = [
    Check {
        id: "noon_qfi",
        claim: "NOON states reach QFI = N^2 (largest deviation, N = 1..10)",
        target: 0.0,
        tolerance: 1e-10,
        compute: noon_qfi_deviation,
    },
    Check {
        id: "q_star",
        claim: "optimal coherent/squeezed intensity ratio q* = sqrt(3) (n = 1000)",
        target: 1.732_050_807_568_877_2,
        tolerance: 0.02,
        compute: q_star,
    },
    Check {
        id: "ratio_star",
        claim: "best squeezed-coherent sensitivity 2/(sqrt(3)+1) = 0.73 of the <N^2> limit",
        target: 0.732,
        tolerance: 0.005,
        compute: ratio_star,
    },
    Check {
        id: "pair_ratio",
        claim: "pair state (r = 1.5) reaches 0.5 of the <N^2> limit",
        target: 0.5,
        tolerance: 0.05,
        compute: pair_ratio,
    },
    Check {
        id: "db_equivalent",
        claim: "one photon in the dark port equals 4.77 dB of squeezing",
        target: 4.77,
        tolerance: 0.01,
        compute: db_equivalent,
    },
    Check {
        id: "cfi_flatness",
        claim: "photon counting reaches the QFI at every phase for symmetric states (max relative gap)",
        target: 0.0,
        tolerance: 1e-8,
        compute: cfi_flatness,
    },
];

pub fn row_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.id).collect()
}

/// Evaluates every row, applying target and tolerance overrides from
/// `settings`. Overrides naming unknown rows are rejected.
pub fn rows(settings: &Settings) -> Result<Vec<Row>, CliError> {
    if let Some(unknown) = settings.report.keys().find(|k| !row_ids().contains(&k.as_str())) {
        return Err(CliError::Usage(format!(
            "unknown report row `{unknown}` (rows: {})",
            row_ids().join(", ")
        )));
    }
    CHECKS
        .iter()
        .map(|c| {
            let value = (c.compute)(settings)?;
            let o = settings.report.get(c.id).copied().unwrap_or_default();
            let target = o.target.unwrap_or(c.target);
            let tolerance = o.tolerance.unwrap_or(c.tolerance);
            Ok(Row {
                id: c.id,
                claim: c.claim,
                value,
                target,
                tolerance,
                pass: (value - target).abs() <= tolerance,
            })
        })
        .collect()
}
