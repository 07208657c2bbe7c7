//! State families: NOON states, and products of single-mode inputs mixed at
//! the entrance beam splitter.
//!
//! A product input `|σ1>|σ2>` is written directly in the counting basis: the
//! `N`-photon component has `<m1|ψ_N> ∝ c1[j + m1] · c2[j - m1]`, i.e. index
//! `k` carries `c1[N - k] · c2[k]`.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spinspace::{self, Basis, PureSector, SpinSector};

/// Truncation policy for infinite-dimensional single-mode inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    /// Largest probability mass that may be discarded.
    pub eps: f64,
    /// First `n_max` tried; doubled until the remainder fits.
    pub n_max_start: usize,
    pub n_max_cap: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            eps: 1e-10,
            n_max_start: 16,
            n_max_cap: 4096,
        }
    }
}

impl Truncation {
    fn grow<T>(&self, eps: f64, mut build: impl FnMut(usize, f64) -> Result<T>) -> Result<T> {
        let mut n_max = self.n_max_start.max(1).min(self.n_max_cap);
        loop {
            match build(n_max, eps) {
                Err(Error::Truncation { .. }) if n_max < self.n_max_cap => {
                    n_max = (2 * n_max).min(self.n_max_cap);
                }
                other => return other,
            }
        }
    }
}

/// Orientation of a squeezed vacuum with real amplitudes: the sign of
/// `<n=2|σ>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Photon-number amplitudes of one input port, truncated at `n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeAmps {
    amps: Vec<Complex64>,
    label: String,
    remainder: f64,
}

impl SingleModeAmps {
    pub fn new(amps: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        let mass: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if amps.is_empty() || mass > 1.0 + 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "single-mode amplitudes must be non-empty with total probability <= 1 (got {mass})"
            )));
        }
        Ok(Self {
            amps,
            label: label.into(),
            remainder: (1.0 - mass).max(0.0),
        })
    }

    fn from_real(amps: Vec<f64>, label: String) -> Self {
        let mass: f64 = amps.iter().map(|a| a * a).sum();
        Self {
            amps: amps.into_iter().map(|a| Complex64::new(a, 0.0)).collect(),
            label,
            remainder: (1.0 - mass).max(0.0),
        }
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    /// Probability mass beyond `n_max`.
    pub fn remainder(&self) -> f64 {
        self.remainder
    }

    pub fn mean_photons(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum()
    }

    pub fn photon_variance(&self) -> f64 {
        let mean = self.mean_photons();
        let second: f64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(n, a)| (n * n) as f64 * a.norm_sqr())
            .sum();
        second - mean * mean
    }

    fn all_real(&self) -> bool {
        self.amps.iter().all(|a| a.im == 0.0)
    }
}

fn check_remainder(
    amps: Vec<f64>,
    label: String,
    n_max: usize,
    eps: f64,
    required: impl FnOnce() -> usize,
) -> Result<SingleModeAmps> {
    let s = SingleModeAmps::from_real(amps, label);
    if s.remainder >= eps {
        return Err(Error::Truncation {
            remainder: s.remainder,
            n_max,
            required_n_max: required(),
        });
    }
    Ok(s)
}

/// Smallest `n` such that the first `n + 1` terms of `next_prob` hold at
/// least `1 - eps` (capped).
fn required_cutoff(eps: f64, mut prob: impl FnMut(usize) -> f64) -> usize {
    let mut mass = 0.0;
    for n in 0..1_000_000 {
        mass += prob(n);
        if 1.0 - mass < eps {
            return n;
        }
    }
    1_000_000
}

fn coherent_ln_amp(alpha: f64, n: usize) -> f64 {
    -0.5 * alpha * alpha + n as f64 * libm::log(alpha) - 0.5 * libm::lgamma(n as f64 + 1.0)
}

fn coherent_values(alpha: f64, n_max: usize) -> Vec<f64> {
    if alpha == 0.0 {
        let mut v = vec![0.0; n_max + 1];
        v[0] = 1.0;
        return v;
    }
    (0..=n_max)
        .map(|n| libm::exp(coherent_ln_amp(alpha, n)))
        .collect()
}

/// Coherent state with real `alpha >= 0`:
/// `c_n = exp(-alpha^2/2) alpha^n / sqrt(n!)`.
pub fn coherent_amps(alpha: f64, n_max: usize, eps: f64) -> Result<SingleModeAmps> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "coherent amplitude must be real and non-negative, got {alpha}"
        )));
    }
    check_remainder(
        coherent_values(alpha, n_max),
        format!("coherent(alpha={alpha})"),
        n_max,
        eps,
        || {
            required_cutoff(eps, |n| {
                if alpha == 0.0 {
                    if n == 0 { 1.0 } else { 0.0 }
                } else {
                    libm::exp(2.0 * coherent_ln_amp(alpha, n))
                }
            })
        },
    )
}

fn squeezed_values(r: f64, sign: Sign, n_max: usize) -> Vec<f64> {
    let t = sign.value() * libm::tanh(r);
    let mut v = vec![0.0; n_max + 1];
    let mut c = 1.0 / libm::sqrt(libm::cosh(r));
    v[0] = c;
    let mut k = 1;
    while 2 * k <= n_max {
        c *= t * libm::sqrt((2 * k - 1) as f64 / (2 * k) as f64);
        v[2 * k] = c;
        k += 1;
    }
    v
}

/// Squeezed vacuum with real amplitudes:
/// `c_2k = (sign tanh r)^k sqrt((2k)!) / (2^k k!) / sqrt(cosh r)`.
pub fn squeezed_vacuum_amps(r: f64, sign: Sign, n_max: usize, eps: f64) -> Result<SingleModeAmps> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "squeezing parameter must be non-negative, got {r}"
        )));
    }
    check_remainder(
        squeezed_values(r, sign, n_max),
        format!("squeezed_vacuum(r={r}, sign={:+})", sign.value()),
        n_max,
        eps,
        || {
            let t2 = libm::tanh(r) * libm::tanh(r);
            let mut p = 1.0 / libm::cosh(r);
            required_cutoff(eps, |n| {
                if n % 2 == 1 {
                    return 0.0;
                }
                let k = n / 2;
                if k > 0 {
                    p *= t2 * (2 * k - 1) as f64 / (2 * k) as f64;
                }
                p
            })
        },
    )
}

/// Fock state `|n>`.
pub fn number_amps(n: usize, n_max: usize) -> Result<SingleModeAmps> {
    if n > n_max {
        return Err(Error::Truncation {
            remainder: 1.0,
            n_max,
            required_n_max: n,
        });
    }
    let mut v = vec![0.0; n_max + 1];
    v[n] = 1.0;
    Ok(SingleModeAmps::from_real(v, format!("number(n={n})")))
}

/// One sector of a [`MultiSectorState`] with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSector {
    pub weight: f64,
    pub state: PureSector,
}

impl WeightedSector {
    pub fn n_photons(&self) -> u32 {
        self.state.sector().n_photons()
    }
}

/// Incoherent collection of fixed-`N` sectors (photon counting tells the
/// sectors apart), plus the probability lost to truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSectorState {
    sectors: Vec<WeightedSector>,
    remainder: f64,
}

impl MultiSectorState {
    /// Validates weights and sorts sectors by photon number.
    pub fn new(mut sectors: Vec<WeightedSector>, remainder: f64) -> Result<Self> {
        if sectors.is_empty() {
            return Err(Error::InvalidParameter("state has no sectors".into()));
        }
        sectors.sort_by_key(|s| s.n_photons());
        for pair in sectors.windows(2) {
            if pair[0].n_photons() == pair[1].n_photons() {
                return Err(Error::InvalidParameter(format!(
                    "photon number {} appears in more than one sector",
                    pair[0].n_photons()
                )));
            }
        }
        if let Some(bad) = sectors.iter().find(|s| !(s.weight > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "sector N={} has non-positive weight {}",
                bad.n_photons(),
                bad.weight
            )));
        }
        if !(remainder >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "remainder must be non-negative, got {remainder}"
            )));
        }
        let total: f64 = sectors.iter().map(|s| s.weight).sum::<f64>() + remainder;
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "sector weights plus remainder sum to {total}, expected 1"
            )));
        }
        Ok(Self { sectors, remainder })
    }

    pub fn single(state: PureSector) -> Self {
        Self {
            sectors: vec![WeightedSector { weight: 1.0, state }],
            remainder: 0.0,
        }
    }

    pub fn sectors(&self) -> &[WeightedSector] {
        &self.sectors
    }

    pub fn remainder(&self) -> f64 {
        self.remainder
    }

    pub fn max_photons(&self) -> u32 {
        self.sectors.last().map_or(0, |s| s.n_photons())
    }

    pub fn mean_photons(&self) -> f64 {
        self.sectors
            .iter()
            .map(|s| s.weight * s.n_photons() as f64)
            .sum()
    }

    pub fn mean_photons_sq(&self) -> f64 {
        self.sectors
            .iter()
            .map(|s| {
                let n = s.n_photons() as f64;
                s.weight * n * n
            })
            .sum()
    }

    /// `Σ_N w_N <J3^2>_N`.
    pub fn mean_j3_sq(&self) -> f64 {
        self.sectors
            .iter()
            .map(|s| s.weight * spinspace::j3_moments(&s.state).1)
            .sum()
    }

    /// Drops the highest-`N` sectors while the total remainder stays within
    /// `budget`.
    pub fn trim_tail(mut self, budget: f64) -> Self {
        while self.sectors.len() > 1 {
            let w = self.sectors.last().map_or(0.0, |s| s.weight);
            if self.remainder + w > budget {
                break;
            }
            self.sectors.pop();
            self.remainder += w;
        }
        self
    }
}

/// `(|N,0> + |0,N>)/√2` in the internal basis.
pub fn noon(n: u32) -> Result<PureSector> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "NOON state needs at least one photon".into(),
        ));
    }
    let sector = SpinSector::new(n);
    let mut amps = vec![Complex64::new(0.0, 0.0); sector.dim()];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[sector.dim() - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    PureSector::new(sector, Basis::InternalJ3, amps)
}

/// Mixes two independent single-mode states at the entrance beam splitter.
///
/// Every `N` with non-zero weight becomes a sector stored in the counting
/// basis. The remainder accounts for both ports' truncation.
pub fn product_input(port1: &SingleModeAmps, port2: &SingleModeAmps) -> MultiSectorState {
    let a = port1.amps();
    let b = port2.amps();
    let mut sectors = Vec::new();
    for n in 0..=(a.len() - 1 + b.len() - 1) {
        let sector = SpinSector::new(n as u32);
        // index k: port1 holds n - k photons, port2 holds k
        let amps: Vec<Complex64> = (0..=n)
            .map(|k| {
                let (i, j) = (n - k, k);
                if i < a.len() && j < b.len() {
                    a[i] * b[j]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let weight: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if weight > f64::MIN_POSITIVE {
            if let Ok(state) = PureSector::normalized(sector, Basis::CountingJ1, amps) {
                sectors.push(WeightedSector { weight, state });
            }
        }
    }
    let kept: f64 = sectors.iter().map(|s| s.weight).sum();
    MultiSectorState {
        sectors,
        remainder: (1.0 - kept).max(0.0),
    }
}

/// True when both ports have purely real amplitudes.
pub fn is_real_product(port1: &SingleModeAmps, port2: &SingleModeAmps) -> bool {
    port1.all_real() && port2.all_real()
}

fn finish(state: MultiSectorState, trunc: &Truncation) -> Result<MultiSectorState> {
    let state = state.trim_tail(trunc.eps / 2.0);
    if state.remainder >= trunc.eps {
        return Err(Error::Truncation {
            remainder: state.remainder,
            n_max: trunc.n_max_cap,
            required_n_max: 2 * trunc.n_max_cap,
        });
    }
    Ok(state)
}

/// Port budget: each port may lose a quarter of the total allowance.
fn port_eps(trunc: &Truncation) -> f64 {
    trunc.eps / 4.0
}

pub fn coherent(alpha: f64, trunc: &Truncation) -> Result<SingleModeAmps> {
    trunc.grow(port_eps(trunc), |n, eps| coherent_amps(alpha, n, eps))
}

pub fn squeezed_vacuum(r: f64, sign: Sign, trunc: &Truncation) -> Result<SingleModeAmps> {
    trunc.grow(port_eps(trunc), |n, eps| squeezed_vacuum_amps(r, sign, n, eps))
}

/// `|n, n>` at the two input ports.
pub fn twin_fock(n: usize) -> MultiSectorState {
    let port = SingleModeAmps::from_real(
        (0..=n).map(|i| if i == n { 1.0 } else { 0.0 }).collect(),
        format!("number(n={n})"),
    );
    product_input(&port, &port)
}

/// Keeps whichever of two candidate states has the larger `Σ w <J3^2>`.
fn better(first: MultiSectorState, second: MultiSectorState) -> MultiSectorState {
    if second.mean_j3_sq() > first.mean_j3_sq() {
        second
    } else {
        first
    }
}

/// Coherent light (real `alpha`) in port 1, squeezed vacuum in port 2.
pub fn squeezed_coherent_with_sign(
    alpha: f64,
    r: f64,
    sign: Sign,
    trunc: &Truncation,
) -> Result<MultiSectorState> {
    let p1 = coherent(alpha, trunc)?;
    let p2 = squeezed_vacuum(r, sign, trunc)?;
    finish(product_input(&p1, &p2), trunc)
}

/// [`squeezed_coherent_with_sign`] at the squeezing orientation that
/// maximizes `<J3^2>`.
pub fn squeezed_coherent(alpha: f64, r: f64, trunc: &Truncation) -> Result<MultiSectorState> {
    let plus = squeezed_coherent_with_sign(alpha, r, Sign::Plus, trunc)?;
    let minus = squeezed_coherent_with_sign(alpha, r, Sign::Minus, trunc)?;
    Ok(better(plus, minus))
}

/// Two squeezed vacua of equal strength, one per input port, at the relative
/// orientation that maximizes `<J3^2>`. Only even `N` carry weight.
pub fn pair_state(r: f64, trunc: &Truncation) -> Result<MultiSectorState> {
    let p1 = squeezed_vacuum(r, Sign::Plus, trunc)?;
    let same = squeezed_vacuum(r, Sign::Plus, trunc)?;
    let opposite = squeezed_vacuum(r, Sign::Minus, trunc)?;
    Ok(better(
        finish(product_input(&p1, &same), trunc)?,
        finish(product_input(&p1, &opposite), trunc)?,
    ))
}

/// Coherent light (real `alpha`) in port 1, Fock state `|n>` in port 2.
pub fn number_coherent(n: usize, alpha: f64, trunc: &Truncation) -> Result<MultiSectorState> {
    let p1 = coherent(alpha, trunc)?;
    let p2 = number_amps(n, n)?;
    finish(product_input(&p1, &p2), trunc)
}
