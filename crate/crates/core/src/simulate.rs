//! Seeded photon-counting experiments with local maximum-likelihood phase
//! estimation, used to check that the estimator variance reaches
//! `1 / (M · QFI)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::metrology;
use crate::optimize;
use crate::states::MultiSectorState;

/// Sectors lighter than this do not constrain the estimation window.
const WINDOW_WEIGHT_FLOOR: f64 = 1e-6;
const LOG_P_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfig {
    pub phi_true: f64,
    /// Detection events per trial (`M`).
    pub samples: u64,
    pub trials: usize,
    pub seed: u64,
    /// Width of the likelihood search interval centred on `phi_true`.
    pub window: f64,
    pub grid_points: usize,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.samples < 1 {
            return bad("samples per trial must be at least 1");
        }
        if self.trials < 1 {
            return bad("at least one trial is required");
        }
        if !(self.window > 0.0) {
            return bad("estimation window must be positive");
        }
        if self.grid_points < 3 {
            return bad("likelihood grid needs at least 3 points");
        }
        if !self.phi_true.is_finite() {
            return bad("phase must be finite");
        }
        Ok(())
    }
}

/// Widest window that avoids fringe ambiguity: `π / N_top`, with `N_top`
/// the largest photon number carrying non-negligible weight.
pub fn max_window(state: &MultiSectorState) -> f64 {
    let top = state
        .sectors()
        .iter()
        .filter(|s| s.weight >= WINDOW_WEIGHT_FLOOR)
        .map(|s| s.n_photons())
        .max()
        .unwrap_or(0)
        .max(1);
    PI / top as f64
}

/// Window used when none is given: sixteen Cramér-Rao standard deviations,
/// `16 / sqrt(M · QFI)`, but never more than half of [`max_window`], so the
/// mirror image of the estimate about a fringe extremum stays outside.
pub fn default_window(state: &MultiSectorState, samples: u64) -> Result<f64> {
    let total: f64 = state.sectors().iter().map(|s| s.weight).sum();
    let qfi = metrology::report(state, &[], 1.0)?.total_qfi / total;
    if !(qfi > 1e-12) || samples == 0 {
        return Err(Error::NoSensitivity { variance: qfi / 4.0 });
    }
    let spread = 16.0 / libm::sqrt(samples as f64 * qfi);
    Ok(spread.min(0.5 * max_window(state)))
}

/// Counts per outcome, one vector per sector of the source state (same
/// order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub sectors: Vec<SectorCounts>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorCounts {
    pub n_photons: u32,
    pub counts: Vec<u64>,
}

impl OutcomeCounts {
    pub fn total(&self) -> u64 {
        self.sectors.iter().flat_map(|s| s.counts.iter()).sum()
    }
}

/// Outcome distribution at a fixed phase: sector by weight, then `m1`
/// within the sector.
#[derive(Debug, Clone)]
pub struct CountingModel {
    n_photons: Vec<u32>,
    sector_cdf: Vec<f64>,
    outcome_cdf: Vec<Vec<f64>>,
}

fn cdf(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    if acc > 0.0 {
        for c in &mut out {
            *c /= acc;
        }
    }
    out
}

fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Uniform on `[0, 1)` from the top 53 bits.
fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl CountingModel {
    pub fn new(state: &MultiSectorState, phi: f64) -> Self {
        let mut n_photons = Vec::new();
        let mut outcome_cdf = Vec::new();
        metrology::for_each_probe(state, |ws, probe| {
            n_photons.push(ws.n_photons());
            outcome_cdf.push(cdf(probe.probabilities(phi).into_iter()));
        });
        Self {
            n_photons,
            sector_cdf: cdf(state.sectors().iter().map(|s| s.weight)),
            outcome_cdf,
        }
    }

    pub fn sample<R: RngCore>(&self, samples: u64, rng: &mut R) -> OutcomeCounts {
        let mut sectors: Vec<SectorCounts> = self
            .n_photons
            .iter()
            .zip(&self.outcome_cdf)
            .map(|(&n, c)| SectorCounts {
                n_photons: n,
                counts: alloc::vec![0; c.len()],
            })
            .collect();
        for _ in 0..samples {
            let s = draw(&self.sector_cdf, uniform(rng));
            let m = draw(&self.outcome_cdf[s], uniform(rng));
            sectors[s].counts[m] += 1;
        }
        OutcomeCounts { sectors }
    }
}

/// Multinomial photon-counting record of `samples` events at `phi`.
pub fn sample_outcomes(state: &MultiSectorState, phi: f64, samples: u64, seed: u64) -> OutcomeCounts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CountingModel::new(state, phi).sample(samples, &mut rng)
}

/// `ln p_{N,m}(φ)` tabulated on the search grid.
#[derive(Debug, Clone)]
pub struct LikelihoodGrid {
    phis: Vec<f64>,
    /// `[grid point][sector][outcome]`
    log_p: Vec<Vec<Vec<f64>>>,
}

impl LikelihoodGrid {
    pub fn new(state: &MultiSectorState, center: f64, window: f64, grid_points: usize) -> Result<Self> {
        let max = max_window(state);
        if !(window < max) {
            return Err(Error::WindowTooWide { window, max });
        }
        if grid_points < 3 {
            return Err(Error::InvalidParameter(
                "likelihood grid needs at least 3 points".into(),
            ));
        }
        let h = window / (grid_points - 1) as f64;
        let phis: Vec<f64> = (0..grid_points)
            .map(|i| center - 0.5 * window + h * i as f64)
            .collect();
        let mut log_p: Vec<Vec<Vec<f64>>> = (0..grid_points).map(|_| Vec::new()).collect();
        metrology::for_each_probe(state, |_, probe| {
            for (row, &phi) in log_p.iter_mut().zip(&phis) {
                row.push(
                    probe
                        .probabilities(phi)
                        .into_iter()
                        .map(|p| libm::log(p.max(LOG_P_FLOOR)))
                        .collect(),
                );
            }
        });
        Ok(Self { phis, log_p })
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn log_likelihood(&self, counts: &OutcomeCounts) -> Vec<f64> {
        self.log_p
            .iter()
            .map(|sectors| {
                sectors
                    .iter()
                    .zip(&counts.sectors)
                    .map(|(lp, sc)| {
                        lp.iter()
                            .zip(&sc.counts)
                            .filter(|(_, &c)| c > 0)
                            .map(|(l, &c)| l * c as f64)
                            .sum::<f64>()
                    })
                    .sum()
            })
            .collect()
    }

    /// Grid maximum of the log-likelihood, refined by a three-point
    /// parabola.
    pub fn estimate(&self, counts: &OutcomeCounts) -> Result<f64> {
        let ll = self.log_likelihood(counts);
        let (best, hi) = ll
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
        let lo = ll.iter().copied().fold(f64::INFINITY, f64::min);
        if !(hi - lo > 1e-9 * hi.abs().max(1.0)) {
            return Err(Error::FlatLikelihood);
        }
        let h = self.phis[1] - self.phis[0];
        if best == 0 || best + 1 == ll.len() {
            return Ok(self.phis[best]);
        }
        let offset = optimize::parabolic_vertex(ll[best - 1], ll[best], ll[best + 1])
            .unwrap_or(0.0)
            .clamp(-1.0, 1.0);
        Ok(self.phis[best] + offset * h)
    }
}

/// Maximum-likelihood phase on `[phi_true - window/2, phi_true + window/2]`.
pub fn ml_estimate(
    counts: &OutcomeCounts,
    state: &MultiSectorState,
    phi_true: f64,
    window: f64,
    grid_points: usize,
) -> Result<f64> {
    LikelihoodGrid::new(state, phi_true, window, grid_points)?.estimate(counts)
}

/// SplitMix64 of `master + (trial + 1) · γ`, so trial streams are
/// independent of scheduling.
pub fn derive_seed(master: u64, trial: u64) -> u64 {
    let mut z = master.wrapping_add(trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub phi_true: f64,
    pub samples: u64,
    pub trials: usize,
    pub master_seed: u64,
    /// Per-sample Fisher information `Σ_N w_N QFI_N`.
    pub qfi: f64,
    /// `1 / (M · QFI)`
    pub crb: f64,
    /// Mean of `(phi_hat - phi_true)^2`.
    pub mse: f64,
    pub bias: f64,
    pub empirical_variance: f64,
    /// `mse / crb`
    pub ratio: f64,
    pub estimates: Vec<f64>,
    pub trial_seeds: Vec<u64>,
}

/// Everything a trial needs, prepared once: the sampling distribution at
/// `phi_true` and the likelihood table over the window.
#[derive(Debug, Clone)]
pub struct TrialSuite {
    config: TrialConfig,
    model: CountingModel,
    grid: LikelihoodGrid,
    qfi: f64,
}

impl TrialSuite {
    pub fn new(state: &MultiSectorState, config: TrialConfig) -> Result<Self> {
        config.validate()?;
        let total: f64 = state.sectors().iter().map(|s| s.weight).sum();
        let qfi = metrology::report(state, &[], 1.0)?.total_qfi / total;
        if !(qfi > 1e-12) {
            return Err(Error::NoSensitivity { variance: qfi / 4.0 });
        }
        Ok(Self {
            model: CountingModel::new(state, config.phi_true),
            grid: LikelihoodGrid::new(state, config.phi_true, config.window, config.grid_points)?,
            config,
            qfi,
        })
    }

    pub fn config(&self) -> &TrialConfig {
        &self.config
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        derive_seed(self.config.seed, trial as u64)
    }

    pub fn run_trial(&self, trial: usize) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.trial_seed(trial));
        let counts = self.model.sample(self.config.samples, &mut rng);
        self.grid.estimate(&counts)
    }

    /// Reduces per-trial estimates (in trial order) to the summary.
    pub fn summarize(&self, estimates: Vec<f64>) -> TrialSummary {
        let c = &self.config;
        let t = estimates.len() as f64;
        let errors = estimates.iter().map(|e| e - c.phi_true);
        let mse = errors.clone().map(|e| e * e).sum::<f64>() / t;
        let bias = errors.sum::<f64>() / t;
        let mean = bias + c.phi_true;
        let empirical_variance = if estimates.len() > 1 {
            estimates.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (t - 1.0)
        } else {
            0.0
        };
        let crb = 1.0 / (c.samples as f64 * self.qfi);
        TrialSummary {
            phi_true: c.phi_true,
            samples: c.samples,
            trials: c.trials,
            master_seed: c.seed,
            qfi: self.qfi,
            crb,
            mse,
            bias,
            empirical_variance,
            ratio: mse / crb,
            trial_seeds: (0..c.trials).map(|i| self.trial_seed(i)).collect(),
            estimates,
        }
    }

    pub fn run(&self) -> Result<TrialSummary> {
        let estimates = (0..self.config.trials)
            .map(|t| self.run_trial(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.summarize(estimates))
    }
}

/// Runs `config.trials` independent trials sequentially.
pub fn crb_trial_suite(state: &MultiSectorState, config: TrialConfig) -> Result<TrialSummary> {
    TrialSuite::new(state, config)?.run()
}
