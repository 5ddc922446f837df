//! Classical special functions: Gamma, Hurwitz and Riemann zeta, the
//! Dirichlet L-series for the character χ(n) = (−1)^n, Bernoulli numbers and
//! polynomials.
//!
//! Complex arguments are supported on the real axis plus the strip
//! |Im s| ≤ 10, which covers every consumer in this crate. Hurwitz zeta uses
//! Euler–Maclaurin with shift m = max(10, ⌈|s|⌉ + 10) and correction terms
//! through B_24; for non-positive integer s the correction sum terminates and
//! the special values come out exact to rounding.

use crate::error::{CoreError, Result};
use crate::rational::{binomial, Rat};
use num_complex::Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(s: Complex64) -> Option<f64> {
    if s.im.abs() < 1e-12 && s.re <= 0.5 {
        let r = s.re.round();
        if (s.re - r).abs() < 1e-12 && r <= 0.0 {
            return Some(r);
        }
    }
    None
}

/// Γ(s) for complex s away from the poles at 0, −1, −2, …
pub fn gamma(s: Complex64) -> Result<Complex64> {
    if let Some(r) = is_nonpositive_integer(s) {
        return Err(CoreError::GammaPole(r));
    }
    Ok(gamma_unchecked(s))
}

fn gamma_unchecked(s: Complex64) -> Complex64 {
    if s.re < 0.5 {
        // reflection: Γ(s) Γ(1−s) = π / sin(πs)
        let pi = std::f64::consts::PI;
        return pi / ((pi * s).sin() * gamma_unchecked(Complex64::new(1.0, 0.0) - s));
    }
    let z = s - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    let sqrt_2pi = (2.0 * std::f64::consts::PI).sqrt();
    sqrt_2pi * t.powc(z + 0.5) * (-t).exp() * acc
}

/// Real Γ for x > 0 (fast path used by quadrature weights).
pub fn gamma_real(x: f64) -> f64 {
    gamma_unchecked(Complex64::new(x, 0.0)).re
}

/// Digamma ψ(x) for real x > 0.
pub fn digamma(mut x: f64) -> f64 {
    assert!(x > 0.0, "digamma needs x > 0");
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    // asymptotic series with B_2..B_14
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
        1.0 / 12.0,
    ];
    let mut corr = 0.0;
    let mut p = inv2;
    for c in series {
        corr += c * p;
        p *= inv2;
    }
    acc + x.ln() - 0.5 * inv - corr
}

/// Rising factorial (s)_m = s (s+1) ⋯ (s+m−1).
pub fn pochhammer(s: Complex64, m: u32) -> Complex64 {
    let mut out = Complex64::new(1.0, 0.0);
    for j in 0..m {
        out *= s + j as f64;
    }
    out
}

/// Hurwitz zeta ζ(s, a) = Σ_{n≥0} (n+a)^{−s}, continued in s by
/// Euler–Maclaurin. Requires a > 0 and s ≠ 1.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    if !(a > 0.0) {
        return Err(CoreError::Domain(format!("hurwitz zeta needs a > 0, got {a}")));
    }
    if (s - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
        return Err(CoreError::ZetaPole);
    }
    // For Re s ≥ 0 a generous shift is free. For Re s < 0 the partial sum
    // grows like (m+a)^{1−Re s} and cancels against the integral term, so
    // the shift is kept small; at non-positive integer s the correction
    // series terminates and shift 0 makes the special values exact to
    // rounding.
    let integer_s = s.im.abs() < 1e-12
        && (s.re - s.re.round()).abs() < 1e-12
        && s.re <= 0.0
        && s.re >= -23.0;
    let m = if integer_s {
        0
    } else if s.re >= 0.0 {
        10usize.max(s.norm().ceil() as usize + 10)
    } else {
        let want = 4.0 + s.im.abs() / 2.0;
        (want - a).ceil().max(0.0) as usize
    };
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..m {
        sum += (-s * (n as f64 + a).ln()).exp();
    }
    let x = m as f64 + a;
    let lx = x.ln();
    // integral term x^{1-s}/(s-1), then the boundary and B_{2k} corrections
    sum += ((1.0 - s) * lx).exp() / (s - 1.0);
    sum += 0.5 * (-s * lx).exp();
    let bern = bernoulli_f64_table(24);
    for k in 1..=12u32 {
        let b2k = bern[(2 * k) as usize];
        let fact = factorial_f64(2 * k);
        let term = (b2k / fact)
            * pochhammer(s, 2 * k - 1)
            * ((-s - (2 * k - 1) as f64) * lx).exp();
        sum += term;
    }
    Ok(sum)
}

/// Riemann zeta ζ(s) = ζ(s, 1).
pub fn riemann_zeta(s: Complex64) -> Result<Complex64> {
    hurwitz_zeta(s, 1.0)
}

/// Real-argument convenience wrappers.
pub fn hurwitz_zeta_real(s: f64, a: f64) -> Result<f64> {
    Ok(hurwitz_zeta(Complex64::new(s, 0.0), a)?.re)
}

pub fn riemann_zeta_real(s: f64) -> Result<f64> {
    Ok(riemann_zeta(Complex64::new(s, 0.0))?.re)
}

/// L_χ(s, τ) = Σ_{n≥0} (−1)^n (n+τ)^{−s} for the character mod 2 with
/// χ(0) = +1, computed as 2^{−s} [ζ(s, τ/2) − ζ(s, (τ+1)/2)].
///
/// The Hurwitz poles at s = 1 cancel: L_χ is entire, and at s = 1 the value
/// is (ψ((τ+1)/2) − ψ(τ/2)) / 2.
pub fn dirichlet_l_mod2(s: Complex64, tau: f64) -> Result<Complex64> {
    if !(tau > 0.0) {
        return Err(CoreError::Domain(format!("L_chi needs tau > 0, got {tau}")));
    }
    if (s - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
        let v = 0.5 * (digamma((tau + 1.0) / 2.0) - digamma(tau / 2.0));
        return Ok(Complex64::new(v, 0.0));
    }
    let za = hurwitz_zeta(s, tau / 2.0)?;
    let zb = hurwitz_zeta(s, (tau + 1.0) / 2.0)?;
    Ok((-s * std::f64::consts::LN_2).exp() * (za - zb))
}

pub fn dirichlet_l_mod2_real(s: f64, tau: f64) -> Result<f64> {
    Ok(dirichlet_l_mod2(Complex64::new(s, 0.0), tau)?.re)
}

fn factorial_f64(k: u32) -> f64 {
    let mut out = 1.0;
    for i in 1..=k as u64 {
        out *= i as f64;
    }
    out
}

/// Exact Bernoulli numbers B_0..B_max (convention B_1 = −1/2) with the
/// defining recurrence Σ_{j≤k} C(k+1, j) B_j = 0 for k ≥ 1.
#[derive(Clone, Debug)]
pub struct BernoulliTable {
    pub max_index: usize,
    pub numbers: Vec<Rat>,
}

impl BernoulliTable {
    /// Exact rationals are kept through index 32; larger tables overflow
    /// i128 and are not needed anywhere in this crate.
    pub fn new(max_index: usize) -> BernoulliTable {
        assert!(max_index <= 32, "exact Bernoulli table capped at index 32");
        let mut numbers = vec![Rat::ONE];
        for k in 1..=max_index {
            let mut acc = Rat::ZERO;
            for (j, b) in numbers.iter().enumerate() {
                acc = acc + binomial(k as u32 + 1, j as u32) * *b;
            }
            numbers.push(-acc / Rat::int(k as i128 + 1));
        }
        BernoulliTable { max_index, numbers }
    }

    pub fn get(&self, k: usize) -> Rat {
        self.numbers[k]
    }
}

/// B_k as f64, exact for k ≤ 32, asymptotic fallback via ζ(2m) beyond.
pub fn bernoulli_f64(k: usize) -> f64 {
    if k <= 32 {
        return bernoulli_f64_table(32)[k];
    }
    if k % 2 == 1 {
        return 0.0;
    }
    // |B_2m| = 2 (2m)! ζ(2m) / (2π)^{2m}, in log space
    let m = k as f64;
    let mut lg = 0.0;
    for i in 2..=k as u64 {
        lg += (i as f64).ln();
    }
    let zeta = 1.0 + 2f64.powf(-m) + 3f64.powf(-m);
    let ln_mag = lg + zeta.ln() + std::f64::consts::LN_2
        - m * (2.0 * std::f64::consts::PI).ln();
    let sign = if (k / 2) % 2 == 1 { 1.0 } else { -1.0 };
    sign * ln_mag.exp()
}

fn bernoulli_f64_table(max: usize) -> Vec<f64> {
    BernoulliTable::new(max)
        .numbers
        .iter()
        .map(|r| r.to_f64())
        .collect()
}

/// Bernoulli polynomial B_k(x) = Σ_j C(k, j) B_j x^{k−j}.
///
/// Matches the generating function w e^{−xw} / (1 − e^{−w})
/// = Σ_k (−1)^k B_k(x) w^k / k!, so B_1(0) = −1/2.
pub fn bernoulli_poly(k: usize, x: f64) -> f64 {
    let bern = bernoulli_f64_table(k.min(32));
    let mut out = 0.0;
    let mut binc = 1.0; // C(k, j)
    for j in 0..=k {
        let pow = x.powi((k - j) as i32);
        out += binc * bern[j] * pow;
        binc *= (k - j) as f64 / (j + 1) as f64;
    }
    out
}

/// Exact-rational Bernoulli polynomial for rational x.
pub fn bernoulli_poly_rat(k: usize, x: Rat) -> Rat {
    let table = BernoulliTable::new(k);
    let mut out = Rat::ZERO;
    for j in 0..=k {
        out = out + binomial(k as u32, j as u32) * table.get(j) * x.pow((k - j) as u32);
    }
    out
}
