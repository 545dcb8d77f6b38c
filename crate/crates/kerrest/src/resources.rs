//! Resource monotones: von Neumann entropy, non-Gaussianity relative to the
//! moment-matched Gaussian state, and l1 coherence in the Fock basis.
//!
//! Quadratures are fixed as `q = (a + a^dag)/sqrt(2)`, `p = i(a^dag - a)/sqrt(2)`
//! so the vacuum covariance is `1/2` on both axes, matching the homodyne
//! convention used by the measurement module. One convention everywhere keeps
//! factor-of-two slips out of the symplectic eigenvalue.

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64 as C64;

use crate::error::{KerrError, Result};
use crate::fock::{density_eig, FockMatrix};

/// First and second moments of a state together with the symplectic
/// eigenvalue `nu = sqrt(det cov)` of its covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianReference {
    /// `(<q>, <p>)`.
    pub mean: Vector2<f64>,
    /// Symmetrized covariance matrix.
    pub cov: Matrix2<f64>,
    /// `nu >= 1/2` up to rounding; the uncertainty bound.
    pub symplectic_eigenvalue: f64,
}

/// `S[rho] = -sum rho_k ln rho_k` over eigenvalues at least `1e-15`.
pub fn von_neumann_entropy(rho: &FockMatrix) -> Result<f64> {
    let eig = density_eig(rho)?;
    let s = eig
        .values()
        .iter()
        .filter(|&&p| p >= 1e-15)
        .map(|&p| -p * p.ln())
        .sum::<f64>();
    Ok(s.max(0.0))
}

/// Truncated annihilation operator; the coupling out of the top level is cut.
fn annihilation(dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |n, m| {
        if m == n + 1 {
            C64::new((m as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Moment-matched Gaussian reference of a density operator.
pub fn gaussian_reference(rho: &FockMatrix) -> Result<GaussianReference> {
    let d = rho.dim();
    let a = annihilation(d);
    let sqrt2 = std::f64::consts::SQRT_2;
    let q = (&a + a.adjoint()).map(|z| z / sqrt2);
    let p = (a.adjoint() - &a).map(|z| z * C64::new(0.0, 1.0) / sqrt2);

    let expect = |op: &DMatrix<C64>| -> f64 { (rho.matrix() * op).diagonal().sum().re };
    let mq = expect(&q);
    let mp = expect(&p);
    let qq = expect(&(&q * &q)) - mq * mq;
    let pp = expect(&(&p * &p)) - mp * mp;
    let qp = expect(&((&q * &p + &p * &q).map(|z| z / 2.0))) - mq * mp;
    let cov = Matrix2::new(qq, qp, qp, pp);
    let det = qq * pp - qp * qp;
    if det < 0.0 || qq < 0.0 || pp < 0.0 {
        return Err(KerrError::Truncation(
            "covariance matrix is not positive semidefinite".into(),
        ));
    }
    let nu = det.sqrt();
    if nu < 0.5 - 1e-6 {
        return Err(KerrError::Truncation(format!(
            "symplectic eigenvalue {nu:.8} violates the uncertainty bound"
        )));
    }
    Ok(GaussianReference { mean: Vector2::new(mq, mp), cov, symplectic_eigenvalue: nu })
}

/// Entropy of a single-mode Gaussian state with symplectic eigenvalue `nu`
/// in the vacuum-variance-1/2 convention; zero in the pure limit.
fn gaussian_entropy(nu: f64) -> f64 {
    if nu <= 0.5 {
        return 0.0;
    }
    (nu + 0.5) * (nu + 0.5).ln() - (nu - 0.5) * (nu - 0.5).ln()
}

/// Non-Gaussianity `nG[rho] = S[rho_G] - S[rho]`, nonnegative since the
/// Gaussian state maximizes entropy at fixed moments.
pub fn non_gaussianity(rho: &FockMatrix) -> Result<f64> {
    let reference = gaussian_reference(rho)?;
    Ok(gaussian_entropy(reference.symplectic_eigenvalue) - von_neumann_entropy(rho)?)
}

/// l1 coherence `C[rho] = sum_{j != k} |rho_jk|` in the Fock basis.
pub fn coherence_l1(rho: &FockMatrix) -> f64 {
    let d = rho.dim();
    let mut acc = 0.0;
    for n in 0..d {
        for m in 0..d {
            if n != m {
                acc += rho[(n, m)].norm();
            }
        }
    }
    acc
}
