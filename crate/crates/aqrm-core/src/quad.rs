//! Gaussian quadrature rules via Golub–Welsch on the Jacobi matrices, plus
//! composite panel helpers for Mellin-type integrals.

use crate::linalg::tridiag_eigen;

/// Nodes and weights of an n-point rule.
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn golub_welsch(diag: Vec<f64>, off: Vec<f64>, moment0: f64) -> Rule {
    let (vals, z) = tridiag_eigen(&diag, &off).expect("jacobi matrix eigensolve");
    let weights = (0..vals.len())
        .map(|k| {
            let v0 = z.get(0, k);
            moment0 * v0 * v0
        })
        .collect();
    Rule { nodes: vals, weights }
}

/// Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    golub_welsch(diag, off, 2.0)
}

/// Gauss–Hermite rule for ∫ e^{−x²} f(x) dx over the real line.
pub fn gauss_hermite(n: usize) -> Rule {
    assert!(n >= 1);
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    golub_welsch(diag, off, std::f64::consts::PI.sqrt())
}

impl Rule {
    /// Integrate over [a, b] by affine transformation of the rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Mapped nodes and scaled weights on [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, w * half))
    }
}

/// Log-spaced panel edges from a to b (a > 0), n panels.
pub fn log_panels(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a && n >= 1);
    let la = a.ln();
    let lb = b.ln();
    (0..=n)
        .map(|i| (la + (lb - la) * i as f64 / n as f64).exp())
        .collect()
}

/// Composite Gauss–Legendre over log-spaced panels.
pub fn integrate_log_panels<F: FnMut(f64) -> f64>(
    rule: &Rule,
    a: f64,
    b: f64,
    panels: usize,
    mut f: F,
) -> f64 {
    let edges = log_panels(a, b, panels);
    let mut acc = 0.0;
    for w in edges.windows(2) {
        acc += rule.integrate(w[0], w[1], &mut f);
    }
    acc
}
