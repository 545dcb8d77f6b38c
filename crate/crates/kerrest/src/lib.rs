//! Numerical toolkit for joint estimation of noise and nonlinearity in
//! bosonic Kerr channels probed by coherent states.
//!
//! Two channel families are covered: a lossy Kerr channel parametrized by
//! `(tau, delta)` and a dephasing Kerr channel parametrized by
//! `(sigma, delta)`. For either statistical model the crate evaluates the
//! quantum Fisher information matrix, symmetric logarithmic derivatives,
//! Uhlmann curvature and the two-parameter incompatibility measure, plus the
//! classical Fisher information of homodyne, double-homodyne and direct
//! detection with quadrature-phase optimization, scalar Cramér-Rao bounds,
//! and resource monotones (non-Gaussianity, Fock-basis coherence).

pub mod channels;
pub mod error;
pub mod estimation;
pub mod fock;
pub mod measurements;
pub mod resources;
pub mod sweep;
pub mod validate;

pub use error::{KerrError, Result};
pub use fock::{EigenSystem, FockMatrix};

/// Re-exported scalar types used throughout the public API.
pub use nalgebra::{Matrix2, Vector2};
pub use num_complex::Complex64;

/// Install a global thread pool with `n` workers; call before any sweep.
/// Returns quietly if a pool is already running.
pub fn set_threads(n: usize) {
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}
