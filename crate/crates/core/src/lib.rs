//! Quantum Orlicz-space machinery on finite-dimensional truncations.
//!
//! The crate builds exponential models `rho_0 = e^{-H0}` with `Tr e^{-H0} = 1`,
//! perturbs them by Hermitian potentials, and studies the resulting geometry:
//! the quantum Young function `Phi(X) = (Tr e^{-H0-X} + Tr e^{-H0+X})/2 - 1`,
//! its Luxemburg norms, the Bogoliubov-Kubo-Mori (BKM) inner product,
//! Legendre-Fenchel conjugation, and the trace-inequality battery that the
//! construction rests on (Golden-Thompson, Bogoliubov-Peierls, Young,
//! Hoelder-Orlicz). A scalar Young-function module provides the commutative
//! reference path and the oracles for all commuting cases.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so concurrent use from independent workers is safe.

pub mod bkm;
pub mod classical;
pub mod duality;
pub mod error;
pub mod linalg;
pub mod model;
pub mod verify;
pub mod young;

pub use error::{Error, Result};
pub use linalg::{HermitianMatrix, SpectralDecomposition};
pub use model::{GibbsModel, PerturbedState};
