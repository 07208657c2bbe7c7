//! Phase-estimation sensitivity of pure two-mode states in a Mach-Zehnder
//! interferometer.
//!
//! A fixed total photon number `N` is handled as a spin `j = N/2` sector of
//! the Schwinger representation. Phase shifts are generated by `J3` (the
//! photon-number difference between the arms); photon counting at the output
//! measures `J1`. The crate computes quantum and classical (photon-counting)
//! Fisher information at any bias phase, builds the counting-diagonal
//! estimator that saturates the generator-estimator uncertainty, decides path
//! symmetry, and aggregates fluctuating-photon-number states against the
//! `<N^2>` Heisenberg limit.
//!
//! Conventions used throughout:
//!
//! * basis index `k` runs `0..=N` and labels `m = j - k` (descending `m`);
//! * in the `J3` basis index `k` means `(n1, n2) = (N - k, k)` photons in the
//!   two arms, in the counting basis it means the same split over the two
//!   output (equivalently input) ports;
//! * a phase shift is `exp(-i phi J3)`.
//!
//! The crate is `no_std` (it needs `alloc`). IO, file formats and the command
//! line live in the `pathsym` crate.

#![no_std]
#![forbid(unsafe_code)]
// Negated comparisons are deliberate: they send NaN down the error path.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod estimation;
pub mod linalg;
pub mod metrology;
pub mod optimize;
pub mod simulate;
pub mod spinspace;
pub mod states;
pub mod symmetry;

pub use error::{Error, Result};
pub use estimation::{EstimatorTable, FisherResult, Robustness, SectorProbe};
pub use metrology::{SensitivityReport, SqueezeOrientation};
pub use spinspace::{Basis, CountingFrame, HermitianOp, PureSector, SpinSector};
pub use states::{MultiSectorState, SingleModeAmps, Truncation, WeightedSector};
pub use symmetry::SymmetryReport;
