//! Property tests over randomized inputs.

use kerrest::channels::{DephasingKerrParams, LossyKerrParams};
use kerrest::fock::{self, FockMatrix};
use kerrest::Complex64 as C64;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn random_hermitian(entries: &[(f64, f64)], dim: usize) -> FockMatrix {
    let raw = DMatrix::from_fn(dim, dim, |n, m| {
        let (re, im) = entries[n * dim + m];
        C64::new(re, im)
    });
    FockMatrix::from_matrix(raw).symmetrized()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigendecomposition_round_trip(
        dim in 2usize..32,
        seed in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 32 * 32),
    ) {
        let a = random_hermitian(&seed, dim);
        let eig = fock::hermitian_eig(&a).unwrap();
        let diag = DMatrix::from_diagonal(&eig.values().map(|x| C64::new(x, 0.0)));
        let rec = eig.vectors() * diag * eig.vectors().adjoint();
        let resid = (rec - a.matrix()).iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        prop_assert!(resid <= 1e-10 * a.max_abs().max(1.0));
        let d = eig.dim();
        let ortho = (eig.vectors().adjoint() * eig.vectors() - DMatrix::<C64>::identity(d, d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        prop_assert!(ortho <= 1e-10);
    }

    #[test]
    fn coherent_amplitudes_subnormalized(re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let c = fock::coherent_amplitudes(C64::new(re, im), 48).unwrap();
        let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!(norm <= 1.0 + 1e-12);
    }

    #[test]
    fn hermite_recurrence_matches_naive(x in -4.0f64..4.0) {
        let psi = fock::hermite_functions(x, 16);
        // naive: plain polynomial recurrence with direct factorials
        let mut h = vec![0.0f64; 17];
        h[0] = 1.0;
        h[1] = 2.0 * x;
        for k in 1..16 {
            h[k + 1] = 2.0 * x * h[k] - 2.0 * k as f64 * h[k - 1];
        }
        for (n, psi_n) in psi.iter().enumerate() {
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            let norm = (2f64.powi(n as i32) * fact * std::f64::consts::PI.sqrt()).sqrt();
            let naive = (-x * x / 2.0).exp() * h[n] / norm;
            prop_assert!((psi_n - naive).abs() <= 1e-10 * naive.abs().max(1.0));
        }
    }

    #[test]
    fn lossy_state_is_valid_density(
        tau in 0.0f64..3.0,
        delta in 0.0f64..2.0,
        nbar in 0.05f64..4.0,
    ) {
        let p = LossyKerrParams::new(tau, delta, C64::new(nbar.sqrt(), 0.0)).unwrap();
        let dim = fock::choose_truncation(nbar, 1e-5).unwrap() + 5;
        let rho = kerrest::channels::lossy_kerr_state(&p, dim).unwrap();
        rho.check_density(1e-5).unwrap();
        let eig = fock::density_eig(&rho).unwrap();
        prop_assert!(eig.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn dephasing_diagonal_is_poisson(
        sigma in 0.0f64..3.0,
        delta in 0.0f64..2.0,
        nbar in 0.05f64..4.0,
    ) {
        let p = DephasingKerrParams::new(sigma, delta, C64::new(nbar.sqrt(), 0.0)).unwrap();
        let dim = fock::choose_truncation(nbar, 1e-5).unwrap() + 5;
        let rho = kerrest::channels::dephasing_kerr_state(&p, dim).unwrap();
        rho.check_density(1e-5).unwrap();
        let mut expect = (-nbar).exp();
        for n in 0..dim {
            prop_assert!((rho[(n, n)].re - expect).abs() <= 1e-13);
            expect *= nbar / (n + 1) as f64;
        }
    }

    #[test]
    fn coherence_invariant_under_diagonal_phases(
        phases in proptest::collection::vec(0.0f64..std::f64::consts::TAU, 12),
        sigma in 0.05f64..1.5,
    ) {
        let p = DephasingKerrParams::new(sigma, 0.3, C64::new(1.0, 0.0)).unwrap();
        let rho = kerrest::channels::dephasing_kerr_state(&p, 12).unwrap();
        let base = kerrest::resources::coherence_l1(&rho);
        let conjugated = DMatrix::from_fn(12, 12, |n, m| {
            rho[(n, m)] * C64::new(0.0, phases[n] - phases[m]).exp()
        });
        let rotated = kerrest::resources::coherence_l1(&FockMatrix::from_matrix(conjugated));
        prop_assert!((base - rotated).abs() <= 1e-12 * base.max(1.0));
    }

    #[test]
    fn truncation_tail_shrinks_with_dimension(nbar in 0.0f64..20.0) {
        let d1 = fock::choose_truncation(nbar, 1e-4).unwrap();
        let d2 = fock::choose_truncation(nbar, 1e-7).unwrap();
        prop_assert!(d2 >= d1);
    }
}
