//! Quantum-side figures of merit: QFIM, symmetric logarithmic derivatives,
//! Uhlmann curvature, the two-parameter quantumness and scalar bounds.
//!
//! Everything is evaluated in the eigenbasis of the statistical model, with
//! terms whose eigenvalue sums fall below the `eps_eig` cutoff skipped; the
//! cutoff guards against spurious contributions from eigenvalues at the level
//! of numerical noise.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64 as C64;

use crate::channels::{LossyKerrParams, ParamIndex, StatisticalModel};
use crate::error::{KerrError, Result};
use crate::fock::FockMatrix;

/// Default absolute cutoff on eigenvalue sums `rho_k + rho_j`.
pub const DEFAULT_EPS_EIG: f64 = 1e-12;

/// Allowed discrepancy between the two Uhlmann-curvature routes.
const UHLMANN_CROSS_CHECK_TOL: f64 = 1e-8;

/// Quantum information bundle for a two-parameter statistical model.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumInfoResult {
    /// 2x2 quantum Fisher information matrix.
    pub qfim: Matrix2<f64>,
    /// 2x2 antisymmetric Uhlmann curvature.
    pub uhlmann: Matrix2<f64>,
    /// Incompatibility measure `R = sqrt(det U / det H)` in `[0, 1]`.
    pub quantumness: f64,
    /// Scalar bound `C_H = 1/Tr[H^-1]`.
    pub scalar_bound: f64,
    /// Eigenvalue cutoff that produced the numbers above.
    pub eig_cutoff_used: f64,
}

fn derivative_in_eigenbasis(model: &StatisticalModel, which: ParamIndex) -> Result<DMatrix<C64>> {
    let eig = model.eigensystem()?;
    Ok(eig.to_eigenbasis(model.derivative(which)))
}

/// Quantum Fisher information matrix of the model via the spectral form
/// `H_uv = 2 sum_kj <k|d_u rho|j><j|d_v rho|k> / (rho_j + rho_k)`.
pub fn qfim(model: &StatisticalModel, eps_eig: f64) -> Result<Matrix2<f64>> {
    let eig = model.eigensystem()?;
    let b = [
        derivative_in_eigenbasis(model, ParamIndex::Noise)?,
        derivative_in_eigenbasis(model, ParamIndex::Nonlinearity)?,
    ];
    qfim_spectral(eig.values(), &b, eps_eig)
}

/// Spectral QFIM from eigenvalues and eigenbasis derivative blocks; the entry
/// point for oracle paths that build `rho` and its derivatives by hand.
pub(crate) fn qfim_spectral(
    lam: &DVector<f64>,
    b: &[DMatrix<C64>; 2],
    eps_eig: f64,
) -> Result<Matrix2<f64>> {
    let d = lam.len();
    let mut h = [[C64::new(0.0, 0.0); 2]; 2];
    for k in 0..d {
        for j in 0..d {
            let den = lam[k] + lam[j];
            if den < eps_eig {
                continue;
            }
            for mu in 0..2 {
                for nu in mu..2 {
                    h[mu][nu] += b[mu][(k, j)] * b[nu][(j, k)] / den;
                }
            }
        }
    }
    let mut out = Matrix2::zeros();
    for mu in 0..2 {
        for nu in mu..2 {
            let val = h[mu][nu] * 2.0;
            if val.im.abs() > 1e-10 * (1.0 + val.re.abs()) {
                return Err(KerrError::Numerical {
                    context: "QFIM entry acquired an imaginary part".into(),
                    residual: val.im.abs(),
                });
            }
            out[(mu, nu)] = val.re;
            out[(nu, mu)] = val.re;
        }
    }
    Ok(out)
}

/// Pure-state QFIM `H_uv = 4 Re[<d_u psi|d_v psi> - <d_u psi|psi><psi|d_v psi>]`.
pub fn qfi_pure(
    state: &DVector<C64>,
    d_state: (&DVector<C64>, &DVector<C64>),
) -> Result<Matrix2<f64>> {
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-3 {
        return Err(KerrError::invalid(format!(
            "state norm {norm:.6} deviates from 1 beyond the truncation allowance"
        )));
    }
    let ds = [d_state.0, d_state.1];
    let mut out = Matrix2::zeros();
    for mu in 0..2 {
        for nu in mu..2 {
            let grad = ds[mu].dotc(ds[nu]);
            let proj = ds[mu].dotc(state) * state.dotc(ds[nu]);
            let val = 4.0 * (grad - proj).re;
            out[(mu, nu)] = val;
            out[(nu, mu)] = val;
        }
    }
    Ok(out)
}

/// Small-parameter expansions of the scenario-I QFIM diagonal, valid for
/// `tau, delta << 1`: the nonlinearity enhances the loss information
/// quadratically while loss degrades the nonlinearity information linearly.
pub fn qfim_expansion_lossy(p: &LossyKerrParams) -> (f64, f64) {
    let nb = p.nbar();
    let h_tau0 = (-p.tau()).exp() * nb;
    let h_tau = h_tau0 * (1.0 + 4.0 * nb * nb * p.delta() * p.delta());
    let h_delta0 = 4.0 * nb * (1.0 + 6.0 * nb + 4.0 * nb * nb);
    let h_delta = h_delta0 - 4.0 * nb * (1.0 + 10.0 * nb + 8.0 * nb * nb * nb) * p.tau();
    (h_tau, h_delta)
}

fn sld_in_eigenbasis(
    lam: &DVector<f64>,
    b: &DMatrix<C64>,
    eps_eig: f64,
) -> DMatrix<C64> {
    let d = lam.len();
    DMatrix::from_fn(d, d, |k, j| {
        let den = lam[k] + lam[j];
        if den >= eps_eig {
            b[(k, j)] * (2.0 / den)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Symmetric logarithmic derivative for one parameter, the Hermitian solution
/// of `d_u rho = (L rho + rho L)/2` restricted to the retained eigenspace.
pub fn sld(model: &StatisticalModel, which: ParamIndex, eps_eig: f64) -> Result<FockMatrix> {
    let eig = model.eigensystem()?;
    let b = derivative_in_eigenbasis(model, which)?;
    let l_eig = sld_in_eigenbasis(eig.values(), &b, eps_eig);
    Ok(eig.from_eigenbasis(&l_eig).symmetrized())
}

/// Uhlmann curvature
/// `U_uv = 4 sum_kj rho_k/(rho_k+rho_j)^2 Im[<k|d_u rho|j><j|d_v rho|k>]`,
/// cross-checked against the SLD commutator route
/// `U_uv = -i/2 Tr[rho [L_u, L_v]]`; a discrepancy beyond `1e-8` fails closed.
pub fn uhlmann(model: &StatisticalModel, eps_eig: f64) -> Result<Matrix2<f64>> {
    let eig = model.eigensystem()?;
    let lam = eig.values();
    let b = [
        derivative_in_eigenbasis(model, ParamIndex::Noise)?,
        derivative_in_eigenbasis(model, ParamIndex::Nonlinearity)?,
    ];
    let d = lam.len();
    let mut u01 = 0.0;
    for k in 0..d {
        for j in 0..d {
            let den = lam[k] + lam[j];
            if den < eps_eig {
                continue;
            }
            u01 += 4.0 * lam[k] / (den * den) * (b[0][(k, j)] * b[1][(j, k)]).im;
        }
    }

    // second route through the SLD commutator, in the eigenbasis
    let l0 = sld_in_eigenbasis(lam, &b[0], eps_eig);
    let l1 = sld_in_eigenbasis(lam, &b[1], eps_eig);
    let comm = &l0 * &l1 - &l1 * &l0;
    let mut tr = C64::new(0.0, 0.0);
    for k in 0..d {
        tr += comm[(k, k)] * lam[k];
    }
    let u01_sld = (tr * C64::new(0.0, -0.5)).re;
    let gap = (u01 - u01_sld).abs();
    if gap > UHLMANN_CROSS_CHECK_TOL * (1.0 + u01.abs()) {
        return Err(KerrError::Numerical {
            context: "Uhlmann curvature routes disagree".into(),
            residual: gap,
        });
    }

    Ok(Matrix2::new(0.0, u01, -u01, 0.0))
}

/// Asymptotic incompatibility `R = sqrt(det U / det H)` for two parameters,
/// clipped to `[0, 1]`; values beyond `1 + 1e-6` before clipping are an error.
pub fn quantumness(h: &Matrix2<f64>, u: &Matrix2<f64>) -> Result<f64> {
    let det_h = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)];
    if det_h <= 0.0 {
        return Err(KerrError::DegenerateModel(format!(
            "QFIM determinant {det_h:.3e} is not positive"
        )));
    }
    let det_u = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let r = (det_u.max(0.0) / det_h).sqrt();
    if r > 1.0 + 1e-6 {
        return Err(KerrError::Numerical {
            context: "quantumness exceeded its upper bound".into(),
            residual: r - 1.0,
        });
    }
    Ok(r.clamp(0.0, 1.0))
}

/// Scalar Cramér-Rao figure `C = 1/Tr[M^-1]` for a 2x2 information matrix
/// (identity weight, single shot).
pub fn scalar_bound(m: &Matrix2<f64>) -> Result<f64> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let tr = m[(0, 0)] + m[(1, 1)];
    if det.abs() < 1e-300 || tr <= 0.0 {
        return Err(KerrError::DegenerateModel(
            "information matrix is singular; scalar bound undefined".into(),
        ));
    }
    Ok(det / tr)
}

/// Full quantum-side bundle sharing one eigendecomposition.
pub fn quantum_info(model: &StatisticalModel, eps_eig: f64) -> Result<QuantumInfoResult> {
    let h = qfim(model, eps_eig)?;
    let u = uhlmann(model, eps_eig)?;
    let r = quantumness(&h, &u)?;
    let c = scalar_bound(&h)?;
    Ok(QuantumInfoResult {
        qfim: h,
        uhlmann: u,
        quantumness: r,
        scalar_bound: c,
        eig_cutoff_used: eps_eig,
    })
}
