//! Shared fixtures for the criterion benches.

use kerrest::channels::{DephasingKerrParams, LossyKerrParams, StatisticalModel};
use num_complex::Complex64 as C64;

pub fn lossy_model(tau: f64, delta: f64, nbar: f64) -> StatisticalModel {
    StatisticalModel::lossy(
        LossyKerrParams::new(tau, delta, C64::new(nbar.sqrt(), 0.0)).unwrap(),
        1e-5,
    )
    .unwrap()
}

pub fn dephasing_model(sigma: f64, delta: f64, nbar: f64) -> StatisticalModel {
    StatisticalModel::dephasing(
        DephasingKerrParams::new(sigma, delta, C64::new(nbar.sqrt(), 0.0)).unwrap(),
        1e-5,
    )
    .unwrap()
}
