//! Closed-form statistical models for the two noisy Kerr channels and their
//! analytic parameter derivatives.
//!
//! Scenario I is a lossy Kerr channel with parameters `tau = Gamma t`
//! (loss) and `delta = kappa t` (nonlinearity); scenario II is a dephasing
//! Kerr channel with `sigma = sqrt(gamma t)` (phase-noise amplitude) and the
//! same `delta`. Both act on a coherent probe `|alpha>` and are expressed
//! entrywise in the truncated Fock basis, so no integration of the master
//! equation is ever required.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{KerrError, Result};
use crate::fock::{self, density_eig, EigenSystem, FockMatrix};

/// Extra Fock levels kept beyond the Poisson-tail estimate of the probe.
pub const TRUNCATION_MARGIN: usize = 5;

/// Default trace-deficit budget for truncation choices.
pub const DEFAULT_EPS_TRUNC: f64 = 1e-5;

/// Asymmetry allowed in a derivative matrix before symmetrization.
const DERIVATIVE_ASYMMETRY_TOL: f64 = 1e-10;

/// Loss-plus-Kerr channel parameters (scenario I).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossyKerrParams {
    tau: f64,
    delta: f64,
    alpha: C64,
}

impl LossyKerrParams {
    pub fn new(tau: f64, delta: f64, alpha: C64) -> Result<Self> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(KerrError::invalid("loss parameter tau must be finite and >= 0"));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(KerrError::invalid("nonlinearity delta must be finite and >= 0"));
        }
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(KerrError::invalid("probe amplitude must be finite"));
        }
        Ok(Self { tau, delta, alpha })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn nbar(&self) -> f64 {
        self.alpha.norm_sqr()
    }
}

/// Dephasing-plus-Kerr channel parameters (scenario II).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingKerrParams {
    sigma: f64,
    delta: f64,
    alpha: C64,
}

impl DephasingKerrParams {
    pub fn new(sigma: f64, delta: f64, alpha: C64) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(KerrError::invalid("phase-noise amplitude sigma must be finite and >= 0"));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(KerrError::invalid("nonlinearity delta must be finite and >= 0"));
        }
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(KerrError::invalid("probe amplitude must be finite"));
        }
        Ok(Self { sigma, delta, alpha })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn nbar(&self) -> f64 {
        self.alpha.norm_sqr()
    }
}

/// `f(s) = (1 - exp(-s))/s` and its derivative, stable near `s = 0`.
/// Removes the removable singularity of the loss exponent at `tau -> 0`.
fn one_minus_exp_over(s: C64) -> (C64, C64) {
    if s.norm() < 0.25 {
        // f = sum (-s)^k/(k+1)!, f' = sum k (-1)^k s^{k-1}/(k+1)!
        let mut f = C64::new(0.0, 0.0);
        let mut fp = C64::new(0.0, 0.0);
        let mut pow_prev = C64::new(0.0, 0.0); // s^{k-1}
        let mut pow = C64::new(1.0, 0.0); // s^k
        let mut factorial = 1.0; // (k+1)!
        let mut sign = 1.0;
        for k in 0..14u32 {
            factorial *= (k + 1) as f64;
            f += pow * (sign / factorial);
            if k >= 1 {
                fp += pow_prev * (sign * k as f64 / factorial);
            }
            pow_prev = pow;
            pow *= s;
            sign = -sign;
        }
        (f, fp)
    } else {
        let em = (-s).exp();
        let f = (C64::new(1.0, 0.0) - em) / s;
        let fp = (em * (s + 1.0) - 1.0) / (s * s);
        (f, fp)
    }
}

/// `alpha^n / sqrt(n!)` for `n = 0..dim-1` by recurrence.
fn monomial_amplitudes(alpha: C64, dim: usize) -> DVector<C64> {
    let mut a = DVector::zeros(dim);
    a[0] = C64::new(1.0, 0.0);
    for n in 0..dim - 1 {
        a[n + 1] = a[n] * alpha / ((n + 1) as f64).sqrt();
    }
    a
}

fn symmetrize_checked(raw: DMatrix<C64>, what: &str) -> Result<FockMatrix> {
    let m = FockMatrix::from_matrix(raw);
    let defect = m.hermiticity_defect();
    if defect > DERIVATIVE_ASYMMETRY_TOL * m.max_abs().max(1.0) {
        return Err(KerrError::Numerical {
            context: format!("{what} lost Hermiticity before symmetrization"),
            residual: defect,
        });
    }
    Ok(m.symmetrized())
}

/// Lossy-Kerr channel output in the Fock basis. The exponent is evaluated
/// through `tau*Delta = tau + 2i delta (n-m)` so the `tau -> 0` limit reduces
/// analytically to the Kerr-evolved coherent state.
pub fn lossy_kerr_state(p: &LossyKerrParams, dim: usize) -> Result<FockMatrix> {
    if dim == 0 {
        return Err(KerrError::invalid("truncation dimension must be at least 1"));
    }
    let nbar = p.nbar();
    let a = monomial_amplitudes(p.alpha, dim);
    let mut rho = DMatrix::zeros(dim, dim);
    for n in 0..dim {
        for m in 0..dim {
            let w = n as f64 - m as f64;
            let s = C64::new(p.tau, 2.0 * p.delta * w);
            let (f, _) = one_minus_exp_over(s);
            let g = -s * (0.5 * (n + m) as f64) - (C64::new(1.0, 0.0) - f * p.tau) * nbar;
            rho[(n, m)] = a[n] * a[m].conj() * g.exp();
        }
    }
    Ok(FockMatrix::from_matrix(rho))
}

/// Entrywise analytic derivatives of the lossy-Kerr state with respect to
/// `(tau, delta)`, obtained by differentiating the exponent; both outputs are
/// Hermitian after symmetrization.
pub fn lossy_kerr_derivatives(p: &LossyKerrParams, dim: usize) -> Result<(FockMatrix, FockMatrix)> {
    if dim == 0 {
        return Err(KerrError::invalid("truncation dimension must be at least 1"));
    }
    let nbar = p.nbar();
    let a = monomial_amplitudes(p.alpha, dim);
    let mut d_tau = DMatrix::zeros(dim, dim);
    let mut d_delta = DMatrix::zeros(dim, dim);
    for n in 0..dim {
        for m in 0..dim {
            let w = n as f64 - m as f64;
            let s = C64::new(p.tau, 2.0 * p.delta * w);
            let (f, fp) = one_minus_exp_over(s);
            let g = -s * (0.5 * (n + m) as f64) - (C64::new(1.0, 0.0) - f * p.tau) * nbar;
            let rho_nm = a[n] * a[m].conj() * g.exp();
            // dg/dtau via ds/dtau = 1, dg/ddelta via ds/ddelta = 2i(n-m)
            let dg_ds = C64::new(-0.5 * (n + m) as f64, 0.0) + fp * (p.tau * nbar);
            let g_tau = dg_ds + f * nbar;
            let g_delta = dg_ds * C64::new(0.0, 2.0 * w);
            d_tau[(n, m)] = rho_nm * g_tau;
            d_delta[(n, m)] = rho_nm * g_delta;
        }
    }
    Ok((
        symmetrize_checked(d_tau, "d rho / d tau")?,
        symmetrize_checked(d_delta, "d rho / d delta")?,
    ))
}

/// Pure-state approximation of the lossy-Kerr output, valid for
/// `tau, delta << 1`:
/// `c_n = alpha^n/sqrt(n!) exp(-tau n/2 - i delta n^2 - nbar(e^-tau/2 + i tau delta n))`.
pub fn lossy_kerr_pure_approx(p: &LossyKerrParams, dim: usize) -> Result<DVector<C64>> {
    if dim == 0 {
        return Err(KerrError::invalid("truncation dimension must be at least 1"));
    }
    let nbar = p.nbar();
    let a = monomial_amplitudes(p.alpha, dim);
    let mut c = DVector::zeros(dim);
    for n in 0..dim {
        let nf = n as f64;
        let ex = C64::new(
            -p.tau * nf / 2.0 - nbar * (-p.tau).exp() / 2.0,
            -p.delta * nf * nf - nbar * p.tau * p.delta * nf,
        );
        c[n] = a[n] * ex.exp();
    }
    Ok(c)
}

/// Dephasing-Kerr channel output: the diagonal is the Poisson distribution
/// of `|alpha|^2` for every `(sigma, delta)`.
pub fn dephasing_kerr_state(p: &DephasingKerrParams, dim: usize) -> Result<FockMatrix> {
    if dim == 0 {
        return Err(KerrError::invalid("truncation dimension must be at least 1"));
    }
    let nbar = p.nbar();
    let a = monomial_amplitudes(p.alpha, dim);
    let mut rho = DMatrix::zeros(dim, dim);
    for n in 0..dim {
        for m in 0..dim {
            let w = n as f64 - m as f64;
            let n2m2 = (n * n) as f64 - (m * m) as f64;
            let ex = C64::new(-nbar - p.sigma * p.sigma / 2.0 * w * w, -p.delta * n2m2);
            rho[(n, m)] = a[n] * a[m].conj() * ex.exp();
        }
    }
    Ok(FockMatrix::from_matrix(rho))
}

/// Analytic `(d/dsigma, d/ddelta)` of the dephasing-Kerr state:
/// `d_sigma rho_nm = -sigma (n-m)^2 rho_nm`, `d_delta rho_nm = -i (n^2-m^2) rho_nm`.
pub fn dephasing_kerr_derivatives(
    p: &DephasingKerrParams,
    dim: usize,
) -> Result<(FockMatrix, FockMatrix)> {
    let rho = dephasing_kerr_state(p, dim)?;
    let mut d_sigma = DMatrix::zeros(dim, dim);
    let mut d_delta = DMatrix::zeros(dim, dim);
    for n in 0..dim {
        for m in 0..dim {
            let w = n as f64 - m as f64;
            let n2m2 = (n * n) as f64 - (m * m) as f64;
            d_sigma[(n, m)] = rho[(n, m)] * (-p.sigma * w * w);
            d_delta[(n, m)] = rho[(n, m)] * C64::new(0.0, -n2m2);
        }
    }
    Ok((
        symmetrize_checked(d_sigma, "d rho / d sigma")?,
        symmetrize_checked(d_delta, "d rho / d delta")?,
    ))
}

/// Which of the two encoded parameters an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamIndex {
    /// The noise parameter: `tau` (scenario I) or `sigma` (scenario II).
    Noise,
    /// The Kerr nonlinearity `delta`.
    Nonlinearity,
}

impl ParamIndex {
    pub fn as_usize(self) -> usize {
        match self {
            ParamIndex::Noise => 0,
            ParamIndex::Nonlinearity => 1,
        }
    }
}

/// Channel parameters for either scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelParams {
    Lossy(LossyKerrParams),
    Dephasing(DephasingKerrParams),
}

impl ChannelParams {
    pub fn nbar(&self) -> f64 {
        match self {
            ChannelParams::Lossy(p) => p.nbar(),
            ChannelParams::Dephasing(p) => p.nbar(),
        }
    }

    pub fn noise(&self) -> f64 {
        match self {
            ChannelParams::Lossy(p) => p.tau(),
            ChannelParams::Dephasing(p) => p.sigma(),
        }
    }

    pub fn delta(&self) -> f64 {
        match self {
            ChannelParams::Lossy(p) => p.delta(),
            ChannelParams::Dephasing(p) => p.delta(),
        }
    }
}

/// A channel output `rho(lambda)` bundled with its analytic derivatives,
/// ready for Fisher-information work. The spectral decomposition is computed
/// once on first use and shared by every estimation routine.
#[derive(Debug)]
pub struct StatisticalModel {
    params: ChannelParams,
    dim: usize,
    rho: FockMatrix,
    d_rho: [FockMatrix; 2],
    eig: OnceLock<Result<EigenSystem>>,
}

impl Clone for StatisticalModel {
    fn clone(&self) -> Self {
        Self {
            params: self.params,
            dim: self.dim,
            rho: self.rho.clone(),
            d_rho: self.d_rho.clone(),
            eig: self.eig.clone(),
        }
    }
}

impl StatisticalModel {
    /// Scenario I model, truncation chosen from the input probe energy with
    /// a safety margin of [`TRUNCATION_MARGIN`] levels.
    pub fn lossy(p: LossyKerrParams, eps_trunc: f64) -> Result<Self> {
        let dim = fock::choose_truncation(p.nbar(), eps_trunc)? + TRUNCATION_MARGIN;
        Self::lossy_with_dim(p, dim, eps_trunc)
    }

    pub fn lossy_with_dim(p: LossyKerrParams, dim: usize, eps_trunc: f64) -> Result<Self> {
        let rho = lossy_kerr_state(&p, dim)?;
        rho.check_density(eps_trunc)?;
        let (dt, dd) = lossy_kerr_derivatives(&p, dim)?;
        Ok(Self {
            params: ChannelParams::Lossy(p),
            dim,
            rho,
            d_rho: [dt, dd],
            eig: OnceLock::new(),
        })
    }

    /// Scenario II model; truncation rule identical to scenario I since the
    /// photon-number distribution never grows past the probe's.
    pub fn dephasing(p: DephasingKerrParams, eps_trunc: f64) -> Result<Self> {
        let dim = fock::choose_truncation(p.nbar(), eps_trunc)? + TRUNCATION_MARGIN;
        Self::dephasing_with_dim(p, dim, eps_trunc)
    }

    pub fn dephasing_with_dim(p: DephasingKerrParams, dim: usize, eps_trunc: f64) -> Result<Self> {
        let rho = dephasing_kerr_state(&p, dim)?;
        rho.check_density(eps_trunc)?;
        let (ds, dd) = dephasing_kerr_derivatives(&p, dim)?;
        Ok(Self {
            params: ChannelParams::Dephasing(p),
            dim,
            rho,
            d_rho: [ds, dd],
            eig: OnceLock::new(),
        })
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nbar(&self) -> f64 {
        self.params.nbar()
    }

    pub fn rho(&self) -> &FockMatrix {
        &self.rho
    }

    pub fn derivative(&self, which: ParamIndex) -> &FockMatrix {
        &self.d_rho[which.as_usize()]
    }

    pub fn derivatives(&self) -> (&FockMatrix, &FockMatrix) {
        (&self.d_rho[0], &self.d_rho[1])
    }

    /// Spectral decomposition of `rho`, computed once and cached.
    pub fn eigensystem(&self) -> Result<&EigenSystem> {
        self.eig
            .get_or_init(|| density_eig(&self.rho))
            .as_ref()
            .map_err(|e| e.clone())
    }
}
