//! Truncated Fock-space numerics: dense complex operators, coherent-state
//! amplitudes, orthonormal Hermite functions and Hermitian diagonalization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{KerrError, Result};

/// Absolute floor for density-operator eigenvalues before clamping.
pub const EIG_NEGATIVE_FLOOR: f64 = -1e-10;

/// Maximum eigendecomposition residual relative to `max|A|`.
pub const EIG_RESIDUAL_TOL: f64 = 1e-10;

/// Dense complex operator on the truncated Fock space, indexed by photon
/// numbers `(n, m)` with `0 <= n, m < dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    mat: DMatrix<C64>,
}

impl FockMatrix {
    pub fn from_matrix(mat: DMatrix<C64>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "Fock operators are square");
        Self { mat }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: DMatrix::zeros(dim, dim) }
    }

    /// Rank-one projector `|v><v|`.
    pub fn outer(v: &DVector<C64>) -> Self {
        Self { mat: v * v.adjoint() }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.diagonal().sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A_nm - conj(A_mn)|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for n in 0..d {
            for m in n..d {
                let defect = (self.mat[(n, m)] - self.mat[(m, n)].conj()).norm();
                worst = worst.max(defect);
            }
        }
        worst
    }

    /// `(A + A^dag)/2`.
    pub fn symmetrized(&self) -> Self {
        Self { mat: (&self.mat + self.mat.adjoint()).scale(0.5) }
    }

    /// `Tr[A^2]` for Hermitian `A`.
    pub fn purity(&self) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for n in 0..d {
            for m in 0..d {
                acc += (self.mat[(n, m)] * self.mat[(m, n)]).re;
            }
        }
        acc
    }

    /// Verify the density-operator invariants: Hermiticity, unit trace up to
    /// the truncation budget `eps_trunc`, and a real trace.
    pub fn check_density(&self, eps_trunc: f64) -> Result<()> {
        let scale = self.max_abs();
        if self.hermiticity_defect() > 1e-12 * scale.max(1.0) {
            return Err(KerrError::Numerical {
                context: "density operator is not Hermitian".into(),
                residual: self.hermiticity_defect(),
            });
        }
        let tr = self.trace();
        if tr.im.abs() >= 1e-12 {
            return Err(KerrError::Numerical {
                context: "density operator trace is not real".into(),
                residual: tr.im.abs(),
            });
        }
        let deficit = 1.0 - tr.re;
        if deficit >= eps_trunc {
            return Err(KerrError::Truncation(format!(
                "trace deficit {deficit:.3e} exceeds budget {eps_trunc:.3e}"
            )));
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for FockMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.mat[idx]
    }
}

/// Spectral decomposition of a Hermitian operator, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    values: DVector<f64>,
    vectors: DMatrix<C64>,
}

impl EigenSystem {
    /// Eigenvalues in descending order.
    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    /// Unitary whose columns are the eigenvectors, ordered as `values`.
    pub fn vectors(&self) -> &DMatrix<C64> {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Transform `A` into the eigenbasis: `V^dag A V`.
    pub fn to_eigenbasis(&self, a: &FockMatrix) -> DMatrix<C64> {
        self.vectors.adjoint() * a.matrix() * &self.vectors
    }

    /// Transform an eigenbasis matrix back to the Fock basis: `V B V^dag`.
    pub fn from_eigenbasis(&self, b: &DMatrix<C64>) -> FockMatrix {
        FockMatrix::from_matrix(&self.vectors * b * self.vectors.adjoint())
    }
}

/// Diagonalize a Hermitian operator (symmetrizing first), eigenvalues sorted
/// descending. Fails with the residual norm if the decomposition does not
/// reproduce the input to `1e-10 * max|A|`.
pub fn hermitian_eig(a: &FockMatrix) -> Result<EigenSystem> {
    let sym = a.symmetrized();
    let scale = sym.max_abs();
    let eig = sym.matrix().clone().symmetric_eigen();

    let d = sym.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = DVector::from_iterator(d, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_columns(
        &order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>(),
    );

    let diag = DMatrix::from_diagonal(&values.map(|x| C64::new(x, 0.0)));
    let residual = (&vectors * diag * vectors.adjoint() - sym.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    if residual > EIG_RESIDUAL_TOL * scale.max(1.0) {
        return Err(KerrError::Numerical {
            context: "eigendecomposition residual above tolerance".into(),
            residual,
        });
    }
    let ortho = (vectors.adjoint() * &vectors - DMatrix::<C64>::identity(d, d))
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    if ortho > EIG_RESIDUAL_TOL {
        return Err(KerrError::Numerical {
            context: "eigenvectors are not orthonormal".into(),
            residual: ortho,
        });
    }

    Ok(EigenSystem { values, vectors })
}

/// Diagonalize a density operator: verifies the `-1e-10` eigenvalue floor and
/// clamps the spectrum to `[0, inf)`. A violated floor signals insufficient
/// truncation or broken Hermiticity rather than a clampable rounding artifact.
pub fn density_eig(rho: &FockMatrix) -> Result<EigenSystem> {
    let mut eig = hermitian_eig(rho)?;
    let smallest = eig.values[eig.values.len() - 1];
    if smallest < EIG_NEGATIVE_FLOOR {
        return Err(KerrError::Truncation(format!(
            "density eigenvalue {smallest:.3e} below the {EIG_NEGATIVE_FLOOR:.0e} floor"
        )));
    }
    eig.values.iter_mut().for_each(|v| *v = v.max(0.0));
    Ok(eig)
}

/// Fock amplitudes of the coherent state `|alpha>` truncated to `dim` levels:
/// `c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!)`, computed by the stable
/// recurrence `c_{n+1} = c_n alpha / sqrt(n+1)`.
pub fn coherent_amplitudes(alpha: C64, dim: usize) -> Result<DVector<C64>> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(KerrError::invalid("coherent amplitude must be finite"));
    }
    if dim == 0 {
        return Err(KerrError::invalid("truncation dimension must be at least 1"));
    }
    let mut c = DVector::zeros(dim);
    c[0] = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..dim - 1 {
        c[n + 1] = c[n] * alpha / ((n + 1) as f64).sqrt();
    }
    Ok(c)
}

/// Smallest dimension `d` with Poisson tail `sum_{n>=d} e^-nbar nbar^n/n!`
/// below `epsilon`; monotone in `nbar` and in `1/epsilon`.
pub fn choose_truncation(nbar: f64, epsilon: f64) -> Result<usize> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(KerrError::invalid("mean photon number must be finite and nonnegative"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(KerrError::invalid("tail budget must lie in (0, 1)"));
    }
    // log-space term recurrence keeps large nbar from underflowing the head
    let mut log_term = -nbar;
    let mut cumulative = log_term.exp();
    let mut d = 1usize;
    while 1.0 - cumulative >= epsilon {
        log_term += (nbar / d as f64).ln();
        cumulative += log_term.exp();
        d += 1;
        if d > 100_000 {
            return Err(KerrError::Numerical {
                context: "Poisson tail did not reach the requested budget".into(),
                residual: 1.0 - cumulative,
            });
        }
    }
    Ok(d)
}

/// Orthonormal Hermite functions `psi_n(x)` for `n = 0..dim-1`, via the
/// recurrence `psi_{n+1} = x sqrt(2/(n+1)) psi_n - sqrt(n/(n+1)) psi_{n-1}`.
/// Safe against overflow for any order since the factorials never appear.
pub fn hermite_functions(x: f64, dim: usize) -> Vec<f64> {
    debug_assert!(x.is_finite());
    let mut psi = vec![0.0; dim];
    if dim == 0 {
        return psi;
    }
    psi[0] = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
    if dim > 1 {
        psi[1] = std::f64::consts::SQRT_2 * x * psi[0];
    }
    for n in 1..dim.saturating_sub(1) {
        let nf = n as f64;
        psi[n + 1] = x * (2.0 / (nf + 1.0)).sqrt() * psi[n] - (nf / (nf + 1.0)).sqrt() * psi[n - 1];
    }
    psi
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Brute-force Poisson tail, independent of the production recurrence.
    fn poisson_tail(nbar: f64, d: usize) -> f64 {
        if nbar == 0.0 {
            return if d == 0 { 1.0 } else { 0.0 };
        }
        let mut log_term = -nbar + d as f64 * nbar.ln()
            - (1..=d).map(|k| (k as f64).ln()).sum::<f64>();
        let mut tail = log_term.exp();
        for n in d..d + 400 {
            log_term += (nbar / (n + 1) as f64).ln();
            tail += log_term.exp();
        }
        tail
    }

    #[test]
    fn vacuum_amplitudes() {
        let c = coherent_amplitudes(C64::new(0.0, 0.0), 3).unwrap();
        assert_eq!(c[0], C64::new(1.0, 0.0));
        assert_eq!(c[1], C64::new(0.0, 0.0));
        assert_eq!(c[2], C64::new(0.0, 0.0));
    }

    #[test]
    fn unit_amplitude_closed_form() {
        let c = coherent_amplitudes(C64::new(1.0, 0.0), 2).unwrap();
        let expect = (-0.5f64).exp(); // 0.6065306597126334
        assert_abs_diff_eq!(c[0].re, expect, epsilon = 1e-15);
        assert_abs_diff_eq!(c[1].re, expect, epsilon = 1e-15);
    }

    #[test]
    fn amplitudes_normalize_at_sufficient_truncation() {
        let c = coherent_amplitudes(C64::new(1.0, 0.0), 40).unwrap();
        let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        assert!(norm <= 1.0 + 1e-15);
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_non_finite_amplitude() {
        assert!(coherent_amplitudes(C64::new(f64::NAN, 0.0), 4).is_err());
        assert!(coherent_amplitudes(C64::new(0.0, f64::INFINITY), 4).is_err());
    }

    #[test]
    fn truncation_vacuum() {
        assert_eq!(choose_truncation(0.0, 1e-5).unwrap(), 1);
    }

    #[test]
    fn truncation_matches_tail_oracle() {
        // d is the smallest dimension with tail(d) < eps
        for (nbar, eps) in [(1.0, 1e-5), (4.0, 1e-5), (2.0, 1e-5), (0.5, 1e-8), (10.0, 1e-5)] {
            let d = choose_truncation(nbar, eps).unwrap();
            assert!(poisson_tail(nbar, d) < eps, "tail at d too large");
            assert!(poisson_tail(nbar, d - 1) >= eps, "d not minimal");
        }
        // frozen oracle values
        assert_eq!(choose_truncation(1.0, 1e-5).unwrap(), 9);
        assert_eq!(choose_truncation(4.0, 1e-5).unwrap(), 16);
    }

    #[test]
    fn truncation_monotone() {
        let mut prev = 0;
        for k in 0..20 {
            let d = choose_truncation(0.5 * k as f64, 1e-5).unwrap();
            assert!(d >= prev);
            prev = d;
        }
        assert!(choose_truncation(1.0, 1e-8).unwrap() >= choose_truncation(1.0, 1e-5).unwrap());
    }

    #[test]
    fn eig_identity() {
        let eye = FockMatrix::from_matrix(DMatrix::identity(6, 6));
        let eig = hermitian_eig(&eye).unwrap();
        for v in eig.values().iter() {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn eig_coherent_projector_is_rank_one() {
        let c = coherent_amplitudes(C64::new(1.0, 0.0), 20).unwrap();
        let proj = FockMatrix::outer(&c);
        let eig = density_eig(&proj).unwrap();
        assert_abs_diff_eq!(eig.values()[0], 1.0, epsilon = 1e-10);
        for k in 1..20 {
            assert!(eig.values()[k].abs() <= 1e-10);
        }
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        // deterministic xorshift fill
        let mut seed = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let d = 8;
        let raw = DMatrix::from_fn(d, d, |_, _| C64::new(next(), next()));
        let a = FockMatrix::from_matrix(raw).symmetrized();
        let eig = hermitian_eig(&a).unwrap();
        let diag = DMatrix::from_diagonal(&eig.values().map(|x| C64::new(x, 0.0)));
        let rec = eig.vectors() * diag * eig.vectors().adjoint();
        let resid = (rec - a.matrix()).iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        assert!(resid < 1e-10 * a.max_abs());
        // descending order
        for k in 1..d {
            assert!(eig.values()[k - 1] >= eig.values()[k]);
        }
    }

    #[test]
    fn density_eig_rejects_negative_spectrum() {
        let mut m = DMatrix::<C64>::identity(3, 3);
        m[(2, 2)] = C64::new(-1e-6, 0.0);
        let err = density_eig(&FockMatrix::from_matrix(m)).unwrap_err();
        assert!(matches!(err, KerrError::Truncation(_)));
    }

    #[test]
    fn hermite_odd_vanishes_at_origin() {
        let psi = hermite_functions(0.0, 4);
        assert_eq!(psi[1], 0.0);
        assert_abs_diff_eq!(psi[3], 0.0, epsilon = 1e-300);
    }

    #[test]
    fn hermite_ground_at_origin() {
        let psi = hermite_functions(0.0, 1);
        assert_abs_diff_eq!(psi[0], 0.7511255444649425, epsilon = 1e-15);
    }

    /// Naive oracle: physicists' Hermite polynomials by their plain
    /// recurrence plus direct factorial normalization, safe for n <= 15.
    fn hermite_naive(x: f64, n: usize) -> f64 {
        let mut h = vec![0.0; n + 2];
        h[0] = 1.0;
        h[1] = 2.0 * x;
        for k in 1..=n {
            h[k + 1] = 2.0 * x * h[k] - 2.0 * k as f64 * h[k - 1];
        }
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let norm = (2f64.powi(n as i32) * fact * std::f64::consts::PI.sqrt()).sqrt();
        (-x * x / 2.0).exp() * h[n] / norm
    }

    #[test]
    fn hermite_matches_naive_oracle() {
        for &x in &[-3.7, -1.0, 0.0, 0.4, 2.9] {
            let psi = hermite_functions(x, 30);
            for n in 0..=15 {
                assert_abs_diff_eq!(psi[n], hermite_naive(x, n), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn vacuum_density_integrates_to_one() {
        // dense trapezoid as an oracle independent of the quadrature module
        let (a, b, n) = (-12.0, 12.0, 40_000);
        let h = (b - a) / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let x = a + i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            let psi0 = hermite_functions(x, 1)[0];
            acc += w * psi0 * psi0 * h;
        }
        assert_abs_diff_eq!(acc, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn density_check_flags_trace_deficit() {
        let c = coherent_amplitudes(C64::new(2.0, 0.0), 4).unwrap(); // heavy tail cut
        let rho = FockMatrix::outer(&c);
        assert!(matches!(rho.check_density(1e-5), Err(KerrError::Truncation(_))));
    }
}
