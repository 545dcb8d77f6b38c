//! Independent oracles for the validation suite: finite-difference state
//! derivatives, an Uhlmann-fidelity route to the QFI, and a Monte-Carlo
//! estimate of homodyne Fisher matrices. None of these share code with the
//! production paths they check.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channels::StatisticalModel;
use crate::error::Result;
use crate::fock::{density_eig, hermitian_eig, hermite_functions, FockMatrix};
use crate::measurements::{
    quadratic_forms3, rotated_real, symmetric_quadratic_form, QuadratureGrid,
};

/// Central finite difference of an operator-valued function.
pub fn finite_difference<F>(build: F, x: f64, h: f64) -> Result<FockMatrix>
where
    F: Fn(f64) -> Result<FockMatrix>,
{
    let up = build(x + h)?;
    let dn = build(x - h)?;
    Ok(FockMatrix::from_matrix((up.matrix() - dn.matrix()).scale(1.0 / (2.0 * h))))
}

/// Square root of a density operator with eigenvalues below
/// `1e-11 * max` dropped; the discarded weight is far below the fidelity
/// resolution needed here while its removal keeps rounding noise in the
/// near-null modes out of the square root.
fn sqrt_density(rho: &FockMatrix) -> Result<DMatrix<C64>> {
    let eig = density_eig(rho)?;
    let floor = 1e-11 * eig.values()[0].max(0.0);
    let d = eig.dim();
    let sq = DMatrix::from_fn(d, d, |k, j| {
        if k == j && eig.values()[k] > floor {
            C64::new(eig.values()[k].sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(eig.vectors() * sq * eig.vectors().adjoint())
}

/// Uhlmann fidelity `F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`,
/// evaluated as the nuclear norm of `sqrt(rho) sqrt(sigma)` through the
/// Hermitian dilation `[[0, A], [A^dag, 0]]`, whose positive spectrum is the
/// singular-value set of `A` with absolute accuracy at the machine level.
pub fn fidelity(rho: &FockMatrix, sigma: &FockMatrix) -> Result<f64> {
    let a = sqrt_density(rho)? * sqrt_density(sigma)?;
    let d = a.nrows();
    let mut dil = DMatrix::zeros(2 * d, 2 * d);
    for n in 0..d {
        for m in 0..d {
            dil[(n, d + m)] = a[(n, m)];
            dil[(d + n, m)] = a[(m, n)].conj();
        }
    }
    let eig = hermitian_eig(&FockMatrix::from_matrix(dil))?;
    let nuclear: f64 = eig.values().iter().filter(|&&v| v > 0.0).sum();
    Ok(nuclear * nuclear)
}

/// One-sided fidelity estimate of a diagonal QFIM entry:
/// `H ~ 8 (1 - sqrt(F(rho(x), rho(x+h)))) / h^2`.
pub fn qfi_from_fidelity<F>(build: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<FockMatrix>,
{
    let f = fidelity(&build(x)?, &build(x + h)?)?;
    Ok(8.0 * (1.0 - f.sqrt()) / (h * h))
}

/// Monte-Carlo estimate of the homodyne FIM at phase `theta`: inverse-CDF
/// sampling of the discretized outcome distribution on `grid`, averaging
/// score outer products. Returns the estimate and the standard error of
/// each entry.
pub fn mc_fim_homodyne(
    model: &StatisticalModel,
    theta: f64,
    grid: &QuadratureGrid,
    samples: u64,
    seed: u64,
) -> (Matrix2<f64>, Matrix2<f64>) {
    let (d0, d1) = model.derivatives();
    let mats = [
        rotated_real(model.rho(), theta),
        rotated_real(d0, theta),
        rotated_real(d1, theta),
    ];
    let dim = model.dim();

    // discretized distribution q_i = w_i p_i and per-node scores
    let n = grid.len();
    let mut cdf = Vec::with_capacity(n);
    let mut scores = Vec::with_capacity(n);
    let mut total = 0.0;
    let mut max_p = 0.0f64;
    for (&x, &w) in grid.nodes().iter().zip(grid.weights()) {
        let psi = hermite_functions(x, dim);
        max_p = max_p.max(symmetric_quadratic_form(&mats[0], &psi));
        let [p, g0, g1] = quadratic_forms3([&mats[0], &mats[1], &mats[2]], &psi);
        let q = (w * p).max(0.0);
        total += q;
        cdf.push(total);
        if p > 1e-14 * max_p.max(1e-300) {
            scores.push([g0 / p, g1 / p]);
        } else {
            scores.push([0.0, 0.0]);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mean = [0.0f64; 3];
    let mut m2 = [0.0f64; 3];
    for _ in 0..samples {
        let u: f64 = rng.random::<f64>() * total;
        let idx = cdf.partition_point(|&c| c < u).min(n - 1);
        let [s0, s1] = scores[idx];
        let obs = [s0 * s0, s1 * s1, s0 * s1];
        for k in 0..3 {
            mean[k] += obs[k];
            m2[k] += obs[k] * obs[k];
        }
    }
    let nf = samples as f64;
    let mut est = Matrix2::zeros();
    let mut se = Matrix2::zeros();
    let avg: Vec<f64> = mean.iter().map(|m| m / nf).collect();
    let sig: Vec<f64> =
        m2.iter().zip(&avg).map(|(m, a)| ((m / nf - a * a).max(0.0) / nf).sqrt()).collect();
    est[(0, 0)] = avg[0];
    est[(1, 1)] = avg[1];
    est[(0, 1)] = avg[2];
    est[(1, 0)] = avg[2];
    se[(0, 0)] = sig[0];
    se[(1, 1)] = sig[1];
    se[(0, 1)] = sig[2];
    se[(1, 0)] = sig[2];
    (est, se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_amplitudes;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fidelity_of_coherent_states() {
        // F(|a>, |b>) = exp(-|a-b|^2)
        let a = C64::new(0.6, 0.2);
        let b = C64::new(0.9, -0.1);
        let ra = FockMatrix::outer(&coherent_amplitudes(a, 30).unwrap());
        let rb = FockMatrix::outer(&coherent_amplitudes(b, 30).unwrap());
        let f = fidelity(&ra, &rb).unwrap();
        assert_abs_diff_eq!(f, (-(a - b).norm_sqr()).exp(), epsilon = 1e-10);
        assert_abs_diff_eq!(fidelity(&ra, &ra).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn fidelity_of_commuting_mixtures() {
        // diagonal states: F = (sum sqrt(p_n q_n))^2
        let mut p = DMatrix::zeros(3, 3);
        let mut q = DMatrix::zeros(3, 3);
        for (n, (pv, qv)) in [(0.7, 0.2), (0.2, 0.5), (0.1, 0.3)].iter().enumerate() {
            p[(n, n)] = C64::new(*pv, 0.0);
            q[(n, n)] = C64::new(*qv, 0.0);
        }
        let f = fidelity(&FockMatrix::from_matrix(p), &FockMatrix::from_matrix(q)).unwrap();
        let expect = (0.7f64 * 0.2).sqrt() + (0.2f64 * 0.5).sqrt() + (0.1f64 * 0.3).sqrt();
        assert_abs_diff_eq!(f, expect * expect, epsilon = 1e-12);
    }
}
