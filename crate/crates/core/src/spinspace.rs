//! Fixed photon-number sector algebra: the Schwinger operators, the rotation
//! between the internal (`J3`) and counting (`J1`) bases, phase shifts and
//! expectation values.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix};

/// Hermiticity and normalization tolerance.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Largest imaginary part tolerated in an expectation value.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;

/// The `N`-photon subspace of two modes, a spin `j = N/2`.
///
/// Only `N` is stored, so half-integer `j` stays exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinSector {
    n_photons: u32,
}

impl SpinSector {
    pub const fn new(n_photons: u32) -> Self {
        Self { n_photons }
    }

    pub const fn n_photons(self) -> u32 {
        self.n_photons
    }

    pub const fn dim(self) -> usize {
        self.n_photons as usize + 1
    }

    pub fn j(self) -> f64 {
        self.n_photons as f64 / 2.0
    }

    /// `2m` for basis index `k`.
    pub const fn twice_m(self, k: usize) -> i64 {
        self.n_photons as i64 - 2 * k as i64
    }

    /// `m = j - k` for basis index `k`.
    pub fn m(self, k: usize) -> f64 {
        self.twice_m(k) as f64 / 2.0
    }

    /// All `m` values in index order (descending).
    pub fn m_values(self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.m(k)).collect()
    }

    /// `<m+1| J+ |m>` for `m = j - k`, i.e. the `(k-1, k)` entry of the
    /// raising operator. Zero for `k = 0`.
    pub fn raising_element(self, k: usize) -> f64 {
        // j(j+1) - m(m+1) = (j - m)(j + m + 1) = k (N - k + 1)
        let n = self.n_photons as f64;
        let k = k as f64;
        libm::sqrt(k * (n - k + 1.0))
    }

    pub(crate) fn check(self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }
}

/// Which basis a vector or operator is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Eigenbasis of `J3`: photon numbers in the two interferometer arms.
    InternalJ3,
    /// Eigenbasis of `J1`: photon numbers at the detectors (and at the input
    /// ports).
    CountingJ1,
}

/// Normalized pure state of one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureSector {
    sector: SpinSector,
    basis: Basis,
    amps: Vec<Complex64>,
}

impl PureSector {
    /// Wraps amplitudes that are already normalized to `1e-12`.
    pub fn new(sector: SpinSector, basis: Basis, amps: Vec<Complex64>) -> Result<Self> {
        sector.check(amps.len())?;
        let norm_sqr = linalg::norm_sqr(&amps);
        if (norm_sqr - 1.0).abs() > STRUCTURE_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self {
            sector,
            basis,
            amps,
        })
    }

    /// Normalizes `amps` first. Fails only on the zero vector.
    pub fn normalized(sector: SpinSector, basis: Basis, mut amps: Vec<Complex64>) -> Result<Self> {
        sector.check(amps.len())?;
        let norm = libm::sqrt(linalg::norm_sqr(&amps));
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::DegenerateState);
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self {
            sector,
            basis,
            amps,
        })
    }

    pub fn from_real(sector: SpinSector, basis: Basis, amps: &[f64]) -> Result<Self> {
        Self::normalized(
            sector,
            basis,
            amps.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// The basis state with index `k` (`m = j - k`).
    pub fn basis_state(sector: SpinSector, basis: Basis, k: usize) -> Result<Self> {
        if k >= sector.dim() {
            return Err(Error::InvalidParameter(alloc::format!(
                "basis index {k} out of range for N = {}",
                sector.n_photons()
            )));
        }
        let mut amps = alloc::vec![Complex64::zero(); sector.dim()];
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(Self {
            sector,
            basis,
            amps,
        })
    }

    pub fn sector(&self) -> SpinSector {
        self.sector
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub(crate) fn from_parts(sector: SpinSector, basis: Basis, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), sector.dim());
        Self {
            sector,
            basis,
            amps,
        }
    }

    pub fn with_global_phase(&self, theta: f64) -> Self {
        let w = Complex64::from_polar(1.0, theta);
        Self::from_parts(
            self.sector,
            self.basis,
            self.amps.iter().map(|a| a * w).collect(),
        )
    }
}

/// Dense Hermitian operator on one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp {
    sector: SpinSector,
    basis: Basis,
    matrix: CMatrix,
}

impl HermitianOp {
    pub fn new(sector: SpinSector, basis: Basis, matrix: CMatrix) -> Result<Self> {
        sector.check(matrix.dim())?;
        let deviation = matrix.hermitian_deviation();
        if deviation > STRUCTURE_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            sector,
            basis,
            matrix,
        })
    }

    /// Diagonal operator in `basis`.
    pub fn diagonal(sector: SpinSector, basis: Basis, values: &[f64]) -> Result<Self> {
        sector.check(values.len())?;
        let entries: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Ok(Self {
            sector,
            basis,
            matrix: CMatrix::diagonal(&entries),
        })
    }

    pub fn identity(sector: SpinSector, basis: Basis) -> Self {
        Self {
            sector,
            basis,
            matrix: CMatrix::identity(sector.dim()),
        }
    }

    pub fn sector(&self) -> SpinSector {
        self.sector
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// The same operator expressed in `target`.
    pub fn in_basis(&self, target: Basis, frame: &CountingFrame) -> Self {
        let u = frame.unitary();
        let matrix = match (self.basis, target) {
            (a, b) if a == b => self.matrix.clone(),
            (Basis::InternalJ3, Basis::CountingJ1) => u.adjoint().matmul(&self.matrix).matmul(u),
            _ => u.matmul(&self.matrix).matmul(&u.adjoint()),
        };
        Self {
            sector: self.sector,
            basis: target,
            matrix,
        }
    }
}

/// `(J1, J2, J3)` in the internal basis.
///
/// `J3 = diag(j, ..., -j)`, `J1` is real tridiagonal and `J2` purely
/// imaginary, with the Schwinger definitions
/// `J1 = (a1† a2 + a2† a1)/2`, `J2 = -i(a1† a2 - a2† a1)/2`.
pub fn build_j_operators(sector: SpinSector) -> (HermitianOp, HermitianOp, HermitianOp) {
    let d = sector.dim();
    let mut j1 = CMatrix::zeros(d);
    let mut j2 = CMatrix::zeros(d);
    let mut j3 = CMatrix::zeros(d);
    for k in 0..d {
        j3[(k, k)] = Complex64::new(sector.m(k), 0.0);
        if k > 0 {
            // J+ sits at (k-1, k): it raises m, lowering the index.
            let half = 0.5 * sector.raising_element(k);
            j1[(k - 1, k)] = Complex64::new(half, 0.0);
            j1[(k, k - 1)] = Complex64::new(half, 0.0);
            j2[(k - 1, k)] = Complex64::new(0.0, -half);
            j2[(k, k - 1)] = Complex64::new(0.0, half);
        }
    }
    let wrap = |matrix| HermitianOp {
        sector,
        basis: Basis::InternalJ3,
        matrix,
    };
    (wrap(j1), wrap(j2), wrap(j3))
}

/// The real antisymmetric generator `K = -i J2`.
fn rotation_generator(sector: SpinSector) -> RMatrix {
    let d = sector.dim();
    let mut k_mat = RMatrix::zeros(d);
    for k in 1..d {
        let half = 0.5 * sector.raising_element(k);
        k_mat[(k - 1, k)] = -half;
        k_mat[(k, k - 1)] = half;
    }
    k_mat
}

/// `R = exp((π/2) K)` with `K = -i J2`, by scaling and squaring.
///
/// `R` is real orthogonal and `Rᵀ J1 R = diag(j, ..., -j)`. Use
/// [`RotationLadder`] when many sectors are needed: it produces the same
/// matrices in `O(N^2)` per step.
pub fn counting_basis_rotation(sector: SpinSector) -> RMatrix {
    rotation_generator(sector).scale(FRAC_PI_2).expm()
}

/// Iterates `R` for `N = 0, 1, 2, ...`.
///
/// Each step adds one boson. With `b1† = (a1† + a2†)/√2` and
/// `b2† = (a2† - a1†)/√2` the rotated images of the mode creators, the column
/// for `(n1, n2)` is `(√n1 b1† R|n1-1, n2⟩ + √n2 b2† R|n1, n2-1⟩) / (n1 + n2)`.
/// Mixing both paths keeps the update a contraction, so rounding errors do
/// not compound with `N`.
#[derive(Debug, Clone)]
pub struct RotationLadder {
    n: u32,
    rotation: RMatrix,
}

impl Default for RotationLadder {
    fn default() -> Self {
        Self::new()
    }
}

impl RotationLadder {
    pub fn new() -> Self {
        Self {
            n: 0,
            rotation: RMatrix::identity(1),
        }
    }

    pub fn n_photons(&self) -> u32 {
        self.n
    }

    pub fn rotation(&self) -> &RMatrix {
        &self.rotation
    }

    pub fn step(&mut self) {
        let n = self.n as usize;
        let prev = &self.rotation;
        let (c, s) = (FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let sqrt = |x: usize| libm::sqrt(x as f64);
        let at = |row: usize, col: usize| {
            if row <= n && col <= n {
                prev[(row, col)]
            } else {
                0.0
            }
        };
        let norm = 1.0 / (n + 1) as f64;
        let mut next = RMatrix::zeros(n + 2);
        for col in 0..=n + 1 {
            let (w1, w2) = (sqrt(n + 1 - col), sqrt(col));
            for row in 0..=n + 1 {
                let (down, up) = (sqrt(n + 1 - row), sqrt(row));
                let r_up = if row >= 1 { at(row - 1, col) } else { 0.0 };
                let mut v = w1 * (c * down * at(row, col) + s * up * r_up);
                if col >= 1 {
                    let r_up_left = if row >= 1 { at(row - 1, col - 1) } else { 0.0 };
                    v += w2 * (-s * down * at(row, col - 1) + c * up * r_up_left);
                }
                next[(row, col)] = v * norm;
            }
        }
        self.rotation = next;
        self.n += 1;
    }

    /// Steps forward until the ladder sits at `n` photons. Panics when asked
    /// to move backwards.
    pub fn advance_to(&mut self, n: u32) -> &RMatrix {
        assert!(n >= self.n, "rotation ladder cannot move backwards");
        while self.n < n {
            self.step();
        }
        &self.rotation
    }
}

/// Phase attached to counting basis vector `k`: `(-i)^k`.
pub fn counting_phase(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// The unitary `U = R · diag((-i)^k)` whose columns are the counting states
/// `|m1>` written in the internal basis.
///
/// With this phase choice `U† J1 U = diag(j, ..., -j)`, every matrix element
/// of `J3` between counting states is purely imaginary, and `U Uᵀ` is the
/// exact `m -> -m` flip. Complex conjugation in the counting basis therefore
/// maps `J3 -> -J3` and fixes `J1`, `J2`.
#[derive(Debug, Clone)]
pub struct CountingFrame {
    sector: SpinSector,
    unitary: CMatrix,
}

impl CountingFrame {
    pub fn new(sector: SpinSector) -> Self {
        let mut ladder = RotationLadder::new();
        Self::from_rotation(sector, ladder.advance_to(sector.n_photons()))
    }

    /// Builds the frame from `R` for the same sector.
    pub fn from_rotation(sector: SpinSector, rotation: &RMatrix) -> Self {
        assert_eq!(rotation.dim(), sector.dim(), "rotation has wrong dimension");
        let unitary =
            CMatrix::from_fn(sector.dim(), |i, k| counting_phase(k) * rotation[(i, k)]);
        Self { sector, unitary }
    }

    pub fn sector(&self) -> SpinSector {
        self.sector
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    /// Internal-basis amplitudes to counting-basis amplitudes (`U† v`).
    pub fn to_counting(&self, internal: &[Complex64]) -> Vec<Complex64> {
        self.unitary.adjoint_mul_vec(internal)
    }

    /// Counting-basis amplitudes to internal-basis amplitudes (`U v`).
    pub fn to_internal(&self, counting: &[Complex64]) -> Vec<Complex64> {
        self.unitary.mul_vec(counting)
    }

    pub fn convert(&self, state: &PureSector, target: Basis) -> PureSector {
        assert_eq!(state.sector, self.sector, "frame used with a foreign sector");
        let amps = match (state.basis, target) {
            (a, b) if a == b => state.amps.clone(),
            (Basis::InternalJ3, Basis::CountingJ1) => self.to_counting(&state.amps),
            _ => self.to_internal(&state.amps),
        };
        PureSector::from_parts(state.sector, target, amps)
    }

    pub fn phase_shift(&self, state: &PureSector, phi: f64) -> PureSector {
        let internal = self.convert(state, Basis::InternalJ3);
        let shifted = shift_internal(internal.sector, &internal.amps, phi);
        self.convert(
            &PureSector::from_parts(state.sector, Basis::InternalJ3, shifted),
            state.basis,
        )
    }
}

fn shift_internal(sector: SpinSector, amps: &[Complex64], phi: f64) -> Vec<Complex64> {
    amps.iter()
        .enumerate()
        .map(|(k, a)| a * Complex64::from_polar(1.0, -phi * sector.m(k)))
        .collect()
}

/// `J3 v` for amplitudes in the given basis, without forming a matrix.
///
/// In the counting basis `J3` is tridiagonal with `<k-1|J3|k> = i c_k`,
/// `c_k = <k-1|J1|k>`.
pub fn apply_j3(sector: SpinSector, basis: Basis, amps: &[Complex64]) -> Vec<Complex64> {
    match basis {
        Basis::InternalJ3 => amps
            .iter()
            .enumerate()
            .map(|(k, a)| a * sector.m(k))
            .collect(),
        Basis::CountingJ1 => {
            let mut out = alloc::vec![Complex64::zero(); amps.len()];
            for k in 1..amps.len() {
                let c = 0.5 * sector.raising_element(k);
                out[k - 1] += Complex64::new(0.0, c) * amps[k];
                out[k] += Complex64::new(0.0, -c) * amps[k - 1];
            }
            out
        }
    }
}

/// `(<J3>, <J3^2>)` for a normalized state, in `O(dim)`.
pub fn j3_moments(state: &PureSector) -> (f64, f64) {
    let v = apply_j3(state.sector, state.basis, &state.amps);
    (linalg::vdot(&state.amps, &v).re, linalg::norm_sqr(&v))
}

/// `J3` as a dense operator in the counting basis.
pub fn j3_counting(sector: SpinSector) -> HermitianOp {
    let d = sector.dim();
    let mut matrix = CMatrix::zeros(d);
    for k in 1..d {
        let c = 0.5 * sector.raising_element(k);
        matrix[(k - 1, k)] = Complex64::new(0.0, c);
        matrix[(k, k - 1)] = Complex64::new(0.0, -c);
    }
    HermitianOp {
        sector,
        basis: Basis::CountingJ1,
        matrix,
    }
}

pub fn to_basis(state: &PureSector, target: Basis) -> PureSector {
    if state.basis == target {
        return state.clone();
    }
    CountingFrame::new(state.sector).convert(state, target)
}

/// `exp(-i phi J3)` applied to `state`, returned in the state's own basis.
pub fn apply_phase_shift(state: &PureSector, phi: f64) -> PureSector {
    match state.basis {
        Basis::InternalJ3 => PureSector::from_parts(
            state.sector,
            Basis::InternalJ3,
            shift_internal(state.sector, &state.amps, phi),
        ),
        Basis::CountingJ1 => CountingFrame::new(state.sector).phase_shift(state, phi),
    }
}

fn align<'a>(state: &'a PureSector, op: &HermitianOp) -> Result<alloc::borrow::Cow<'a, PureSector>> {
    if state.sector != op.sector {
        return Err(Error::DimensionMismatch {
            expected: op.sector.dim(),
            found: state.sector.dim(),
        });
    }
    Ok(if state.basis == op.basis {
        alloc::borrow::Cow::Borrowed(state)
    } else {
        alloc::borrow::Cow::Owned(to_basis(state, op.basis))
    })
}

/// `<psi|Op|psi>`, converting the state to the operator's basis if needed.
pub fn expectation(state: &PureSector, op: &HermitianOp) -> Result<f64> {
    let psi = align(state, op)?;
    let value = linalg::vdot(&psi.amps, &op.matrix.mul_vec(&psi.amps));
    debug_assert!(
        value.im.abs() < EXPECTATION_IMAG_TOL * (1.0 + value.re.abs()),
        "expectation of a Hermitian operator has imaginary part {}",
        value.im
    );
    Ok(value.re)
}

fn variance_of(psi: &[Complex64], op_psi: &[Complex64]) -> f64 {
    let mean = linalg::vdot(psi, op_psi).re;
    (linalg::norm_sqr(op_psi) - mean * mean).max(0.0)
}

/// `d<A>/dphi = -i <[A, J3]> = 2 Im <psi| A J3 |psi>`.
pub fn estimator_slope(state: &PureSector, a: &HermitianOp) -> Result<f64> {
    let psi = align(state, a)?;
    let j3_psi = apply_j3(psi.sector, psi.basis, &psi.amps);
    let a_psi = a.matrix.mul_vec(&psi.amps);
    Ok(2.0 * linalg::vdot(&a_psi, &j3_psi).im)
}

/// Both sides of `ΔJ3 ΔA >= ½ d<A>/dphi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyCheck {
    /// `ΔJ3 · ΔA`
    pub lhs: f64,
    /// `½ d<A>/dphi`
    pub rhs: f64,
}

impl UncertaintyCheck {
    pub fn is_saturated(&self, tol: f64) -> bool {
        (self.lhs - self.rhs).abs() <= tol
    }
}

pub fn uncertainty_product_check(state: &PureSector, a: &HermitianOp) -> Result<UncertaintyCheck> {
    let psi = align(state, a)?;
    let j3_psi = apply_j3(psi.sector, psi.basis, &psi.amps);
    let a_psi = a.matrix.mul_vec(&psi.amps);
    let lhs = libm::sqrt(variance_of(&psi.amps, &j3_psi) * variance_of(&psi.amps, &a_psi));
    let rhs = linalg::vdot(&a_psi, &j3_psi).im;
    if lhs < rhs - 1e-10 {
        return Err(Error::UncertaintyViolated { lhs, rhs });
    }
    Ok(UncertaintyCheck { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn empty_interferometer_operators_are_zero() {
        let (j1, j2, j3) = build_j_operators(SpinSector::new(0));
        for op in [j1, j2, j3] {
            assert_eq!(op.matrix().dim(), 1);
            assert_eq!(op.matrix()[(0, 0)], Complex64::zero());
        }
        let r = counting_basis_rotation(SpinSector::new(0));
        assert_eq!(r[(0, 0)], 1.0);
    }

    #[test]
    fn spin_half_operators() {
        let (j1, _, j3) = build_j_operators(SpinSector::new(1));
        assert_eq!(j3.matrix()[(0, 0)], c(0.5, 0.0));
        assert_eq!(j3.matrix()[(1, 1)], c(-0.5, 0.0));
        assert!((j1.matrix()[(0, 1)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((j1.matrix()[(1, 0)] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn spin_half_rotation_is_45_degrees() {
        let r = counting_basis_rotation(SpinSector::new(1));
        let h = FRAC_1_SQRT_2;
        let expected = [[h, -h], [h, h]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((r[(i, j)] - expected[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn counting_to_internal_spin_half() {
        let sector = SpinSector::new(1);
        let up = PureSector::basis_state(sector, Basis::CountingJ1, 0).unwrap();
        let internal = to_basis(&up, Basis::InternalJ3);
        assert!((internal.amps()[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
        assert!((internal.amps()[1] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn to_basis_same_basis_is_copy() {
        let s = PureSector::from_real(SpinSector::new(3), Basis::CountingJ1, &[1.0, 2.0, 0.0, -1.0])
            .unwrap();
        assert_eq!(to_basis(&s, Basis::CountingJ1), s);
    }

    #[test]
    fn phase_shift_periodicity() {
        let even = PureSector::from_real(SpinSector::new(2), Basis::InternalJ3, &[1.0, 0.3, -0.7])
            .unwrap();
        let back = apply_phase_shift(&even, 2.0 * core::f64::consts::PI);
        for (a, b) in back.amps().iter().zip(even.amps()) {
            assert!((a - b).norm() < 1e-13);
        }
        let odd = PureSector::from_real(SpinSector::new(1), Basis::InternalJ3, &[0.6, 0.8]).unwrap();
        let back = apply_phase_shift(&odd, 2.0 * core::f64::consts::PI);
        for (a, b) in back.amps().iter().zip(odd.amps()) {
            assert!((a + b).norm() < 1e-13);
        }
    }

    #[test]
    fn noon_relative_phase_at_quarter_turn() {
        let h = FRAC_1_SQRT_2;
        let noon = PureSector::from_real(SpinSector::new(2), Basis::InternalJ3, &[h, 0.0, h]).unwrap();
        let shifted = apply_phase_shift(&noon, FRAC_PI_2);
        let rel = shifted.amps()[0] / shifted.amps()[2];
        assert!((rel - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn j3_expectations() {
        let sector = SpinSector::new(4);
        let (_, _, j3) = build_j_operators(sector);
        let top = PureSector::basis_state(sector, Basis::InternalJ3, 0).unwrap();
        assert!((expectation(&top, &j3).unwrap() - 2.0).abs() < 1e-15);

        let s2 = SpinSector::new(2);
        let (_, _, j3) = build_j_operators(s2);
        let j3sq = HermitianOp::new(s2, Basis::InternalJ3, j3.matrix().matmul(j3.matrix())).unwrap();
        let h = FRAC_1_SQRT_2;
        let noon = PureSector::from_real(s2, Basis::InternalJ3, &[h, 0.0, h]).unwrap();
        assert!((expectation(&noon, &j3sq).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn expectation_rejects_sector_mismatch() {
        let (_, _, j3) = build_j_operators(SpinSector::new(3));
        let s = PureSector::basis_state(SpinSector::new(2), Basis::InternalJ3, 0).unwrap();
        assert!(matches!(
            expectation(&s, &j3),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(estimator_slope(&s, &j3).is_err());
        assert!(uncertainty_product_check(&s, &j3).is_err());
    }

    #[test]
    fn slope_vanishes_for_operators_commuting_with_j3() {
        let sector = SpinSector::new(3);
        let s = PureSector::from_real(sector, Basis::CountingJ1, &[0.1, 0.5, -0.3, 0.8]).unwrap();
        let (_, _, j3) = build_j_operators(sector);
        let id = HermitianOp::identity(sector, Basis::InternalJ3);
        assert!(estimator_slope(&s, &id).unwrap().abs() < 1e-14);
        assert!(estimator_slope(&s, &j3).unwrap().abs() < 1e-14);
    }

    #[test]
    fn j1_on_top_state_gives_strict_inequality() {
        let sector = SpinSector::new(2);
        let (j1, _, _) = build_j_operators(sector);
        let top = PureSector::basis_state(sector, Basis::InternalJ3, 0).unwrap();
        let check = uncertainty_product_check(&top, &j1).unwrap();
        // ΔJ3 = 0 on a J3 eigenstate, and the slope vanishes with it.
        assert!(check.lhs.abs() < 1e-15);
        assert!(check.rhs.abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let sector = SpinSector::new(1);
        assert!(matches!(
            PureSector::new(sector, Basis::InternalJ3, vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            PureSector::normalized(sector, Basis::InternalJ3, vec![Complex64::zero(); 2]),
            Err(Error::DegenerateState)
        ));
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = c(0.0, 1.0);
        m[(1, 0)] = c(0.0, 1.0);
        assert!(matches!(
            HermitianOp::new(sector, Basis::InternalJ3, m),
            Err(Error::NotHermitian { .. })
        ));
    }
}
