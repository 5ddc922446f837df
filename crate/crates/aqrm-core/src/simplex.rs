//! Integration over the ordered simplex 0 ≤ μ_1 ≤ … ≤ μ_d ≤ 1.
//!
//! Two routes: a sort-transform Monte Carlo estimate driven by a
//! counter-based deterministic generator (unbiased in any dimension,
//! reproducible under any thread schedule), and nested Gauss–Legendre
//! quadrature for dimensions up to 4, used as the high-accuracy reference
//! and for the Taylor-coefficient extraction at complex time.

use crate::error::{CoreError, Result};
use crate::parallel::par_map;
use crate::quad::gauss_legendre;
use num_complex::Complex64;

/// A point of the ordered simplex; μ_0 = 0 is implicit.
#[derive(Clone, Debug)]
pub struct SimplexPoint {
    pub mu: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(mu: Vec<f64>) -> Result<SimplexPoint> {
        let mut prev = 0.0;
        for &m in &mu {
            if !(m >= prev && m <= 1.0) {
                return Err(CoreError::Domain(format!(
                    "simplex coordinates must be ordered in [0,1], got {mu:?}"
                )));
            }
            prev = m;
        }
        Ok(SimplexPoint { mu })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }
}

/// Sampler backing the partition-function series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sampler {
    /// Sort-transform Monte Carlo with a counter-based generator.
    Qmc { points_per_lambda: usize, seed: u64 },
    /// Nested Gauss–Legendre, only valid through `max_dim`.
    NestedQuadrature { order: usize, max_dim: usize },
}

/// Truncation and sampling policy for the partition series.
#[derive(Clone, Copy, Debug)]
pub struct SeriesConfig {
    /// Series truncation index λ; dimension 2λ stays ≤ 24.
    pub lambda_max: usize,
    pub sampler: Sampler,
    pub target_rel_err: f64,
}

impl SeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_max > 12 {
            return Err(CoreError::InvalidParameter(format!(
                "lambda_max capped at 12, got {}",
                self.lambda_max
            )));
        }
        if let Sampler::Qmc { points_per_lambda, .. } = self.sampler {
            if points_per_lambda < 1000 {
                return Err(CoreError::InvalidParameter(format!(
                    "qmc sampler needs >= 1000 points per lambda, got {points_per_lambda}"
                )));
            }
        }
        if !(self.target_rel_err > 0.0) {
            return Err(CoreError::InvalidParameter(
                "target_rel_err must be > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn qmc(points_per_lambda: usize, seed: u64) -> SeriesConfig {
        SeriesConfig {
            lambda_max: 8,
            sampler: Sampler::Qmc { points_per_lambda, seed },
            target_rel_err: 1e-3,
        }
    }
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key for an independent deterministic stream.
pub fn stream_key(seed: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ tag)
}

/// The `counter`-th uniform variate of the keyed stream, in [0, 1).
pub fn unit_uniform(key: u64, counter: u64) -> f64 {
    let z = splitmix64(key.wrapping_add(counter.wrapping_mul(GOLDEN)));
    (z >> 11) as f64 / (1u64 << 53) as f64
}

/// Sort-transform Monte Carlo over the ordered simplex:
/// draw uniform cube points, sort each ascending, average f, divide by d!.
/// Returns (estimate, standard error of the estimate).
pub fn simplex_integrate<F>(f: F, dim: usize, points: usize, key: u64) -> (f64, f64)
where
    F: Fn(&SimplexPoint) -> f64 + Sync,
{
    assert!(dim >= 1 && points >= 2);
    let chunk = 4096usize;
    let chunks = points.div_ceil(chunk);
    let partials: Vec<(f64, f64, usize)> = par_map(chunks, |ci| {
        let lo = ci * chunk;
        let hi = ((ci + 1) * chunk).min(points);
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let mut pt = SimplexPoint { mu: vec![0.0; dim] };
        for i in lo..hi {
            for (j, slot) in pt.mu.iter_mut().enumerate() {
                *slot = unit_uniform(key, (i * dim + j) as u64);
            }
            pt.mu.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let v = f(&pt);
            sum += v;
            sumsq += v * v;
        }
        (sum, sumsq, hi - lo)
    });
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut n = 0usize;
    for (s, s2, c) in partials {
        sum += s;
        sumsq += s2;
        n += c;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sumsq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    let stderr = (var / nf).sqrt();
    let dfact = factorial_f64(dim);
    (mean / dfact, stderr / dfact)
}

fn factorial_f64(d: usize) -> f64 {
    (1..=d as u64).map(|k| k as f64).product::<f64>().max(1.0)
}

/// Nested Gauss–Legendre over the ordered simplex at complex scalar values.
/// Exact-ish (spectral accuracy) but cost order^dim, so capped at dim 4.
pub fn nested_simplex_complex<F>(f: F, dim: usize, order: usize) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Complex64,
{
    if dim > 4 {
        return Err(CoreError::InvalidParameter(format!(
            "nested quadrature capped at dim 4, got {dim}"
        )));
    }
    let rule = gauss_legendre(order);
    let mut buf = vec![0.0; dim];
    fn rec<F: Fn(&[f64]) -> Complex64>(
        rule: &crate::quad::Rule,
        f: &F,
        buf: &mut [f64],
        level: usize,
        upper: f64,
    ) -> Complex64 {
        if level == 0 {
            return f(buf);
        }
        let half = 0.5 * upper;
        let mut acc = Complex64::new(0.0, 0.0);
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let t = half + half * x;
            buf[level - 1] = t;
            acc += w * half * rec(rule, f, buf, level - 1, t);
        }
        acc
    }
    Ok(rec(&rule, &f, &mut buf, dim, 1.0))
}

/// Real-valued nested quadrature wrapper.
pub fn nested_simplex<F>(f: F, dim: usize, order: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    nested_simplex_complex(|mu| Complex64::new(f(mu), 0.0), dim, order).map(|v| v.re)
}
