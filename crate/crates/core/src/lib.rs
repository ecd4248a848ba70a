//! Numerical toolkit for analog continuous-variable quantum teleportation of
//! coherent microwave states.
//!
//! Everything is expressed in the Gaussian covariance-matrix formalism with
//! vacuum variance 1/4 per quadrature and mode ordering {p1, q1, p2, q2, ...}.
//! The crate covers four layers:
//!
//! * [`gaussian`]: displacement/covariance states, symplectic and lossy
//!   operations, Uhlmann fidelity, symplectic spectra and entropies.
//! * [`teleport`]: the three-mode teleporter built from two flux-pumped
//!   squeezers, hybrid couplers, a phase-insensitive amplifier stage and 21
//!   lossy line segments, plus closed-form output expressions and the
//!   wiretap decomposition of the feedforward link.
//! * [`codebook`] / [`nocloning`]: finite-energy coherent-state alphabets and
//!   the optimal-cloner fidelity threshold they must beat.
//! * [`security`]: mutual information of the effective Gaussian channel,
//!   Holevo bound of the feedforward eavesdropper, and the secure-fidelity
//!   crossing analysis.
//!
//! Numeric plumbing (fixed-order Gauss-Legendre panels, golden-section and
//! bisection searches, scaled Bessel and Humbert series) lives in [`quad`],
//! [`optim`] and [`special`].

#![forbid(unsafe_code)]

pub mod codebook;
pub mod config;
pub mod error;
pub mod gaussian;
pub mod nocloning;
pub mod optim;
pub mod quad;
pub mod security;
pub mod special;
pub mod teleport;
pub mod units;

pub use error::{Error, Result};
