//! Gauss-Legendre quadrature over a symmetric interval `[-L, L]`.

/// Nodes and weights of a Gauss-Legendre rule over `[-L, L]`. Refinement
/// doubles the node count, so successive rules never share nodes and the
/// difference between them is a usable convergence estimate.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    half_width: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Node count of the first refinement level.
pub const DEFAULT_INITIAL_NODES: usize = 257;

impl QuadratureGrid {
    /// `n`-point Gauss-Legendre rule scaled to `[-half_width, half_width]`.
    /// Roots of the Legendre polynomial are found by Newton iteration from
    /// the Chebyshev-like initial guess.
    pub fn gauss_legendre(half_width: f64, n: usize) -> Self {
        assert!(n >= 2 && half_width > 0.0);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() <= 1e-15 * (1.0 + x.abs()) {
                    let (p, d) = legendre_with_derivative(n, x);
                    dp = d;
                    x -= p / d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // roots come out descending in x; store ascending
            nodes[n - 1 - i] = x * half_width;
            nodes[i] = -x * half_width;
            weights[i] = w * half_width;
            weights[n - 1 - i] = w * half_width;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { half_width, nodes, weights }
    }

    /// Grid sized for a homodyne marginal of a probe with mean photon number
    /// `nbar`: the marginal mean is at most `sqrt(2 nbar)` with unit-order
    /// variance, so `L = 5 + 3 sqrt(2 nbar + 1)` covers the support.
    pub fn for_probe_energy(nbar: f64) -> Self {
        let half_width = 5.0 + 3.0 * (2.0 * nbar + 1.0).sqrt();
        Self::gauss_legendre(half_width, DEFAULT_INITIAL_NODES)
    }

    /// Same interval, twice the nodes.
    pub fn refined(&self) -> Self {
        Self::gauss_legendre(self.half_width, self.nodes.len() * 2)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Compensated sum of the weights; equals `2 L` for an exact rule.
    pub fn weight_sum(&self) -> f64 {
        let mut sum = 0.0;
        let mut c = 0.0;
        for &w in &self.weights {
            let y = w - c;
            let t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
        sum
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_integrate_constants() {
        for n in [3, 64, 257, 514] {
            let g = QuadratureGrid::gauss_legendre(7.5, n);
            assert_abs_diff_eq!(g.weight_sum(), 15.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn refinement_doubles_nodes() {
        let g = QuadratureGrid::for_probe_energy(1.0);
        assert_eq!(g.len(), DEFAULT_INITIAL_NODES);
        assert_eq!(g.refined().len(), 2 * DEFAULT_INITIAL_NODES);
        assert_eq!(g.refined().half_width(), g.half_width());
    }

    #[test]
    fn integrates_gaussian_exactly_enough() {
        let g = QuadratureGrid::gauss_legendre(10.0, 257);
        let integral: f64 = g
            .nodes()
            .iter()
            .zip(g.weights())
            .map(|(&x, &w)| w * (-x * x).exp())
            .sum();
        assert_abs_diff_eq!(integral, std::f64::consts::PI.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn polynomial_exactness() {
        // a rule with n nodes is exact for degree 2n-1
        let g = QuadratureGrid::gauss_legendre(2.0, 8);
        let integral: f64 = g
            .nodes()
            .iter()
            .zip(g.weights())
            .map(|(&x, &w)| w * x.powi(14))
            .sum();
        let exact = 2.0 * 2.0f64.powi(15) / 15.0;
        assert_abs_diff_eq!(integral, exact, epsilon = 1e-12 * exact);
    }

    #[test]
    fn nodes_ascending_and_symmetric() {
        let g = QuadratureGrid::gauss_legendre(3.0, 33);
        for k in 1..g.len() {
            assert!(g.nodes()[k] > g.nodes()[k - 1]);
        }
        for k in 0..g.len() {
            assert_abs_diff_eq!(g.nodes()[k], -g.nodes()[g.len() - 1 - k], epsilon = 1e-14);
        }
    }
}
