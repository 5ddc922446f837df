//! The explicit partition-function series of the AQRM and its parity
//! decomposition, plus the λ = 0 heat-kernel term.
//!
//! For β > 0 the partition function is
//!
//! ```text
//! Z^ε(β) = 2e^{g²β}/(1−e^{−β}) [ ch(εβ)
//!        + Σ_{λ≥1} (βΔ)^{2λ} ∫_{0≤μ1≤…≤μ2λ≤1} Θ_2λ(g,β,μ)
//!            ch(εβ(1 − 2Σ_γ (−1)^γ μ_γ)) dμ ]
//! ```
//!
//! with Θ_2λ = exp(−2g² coth(β/2) + 4g² ch(β(1−μ_2λ))/sh(β) + ξ_2λ + ψ⁻_2λ).
//! The four exponent pieces individually blow up like g²/β for small β and
//! cancel; they are accumulated under the common factor g²/sh(β) before the
//! single exponential call. Θ stays in (0, 1] on the whole simplex, which is
//! also what drives the g → ∞ limits.
//!
//! The parity series (ε = 0) splits into the even bracket above (without the
//! ch factor) and an odd bracket with Ξ_2λ+1 = exp(−2g² tanh(β/2) + ξ_2λ+1 +
//! ψ⁺_2λ+1), entering Z^± with sign ∓ and prefactor e^{g²β}/(1+e^{−β}).

use crate::error::{CoreError, Result};
use crate::fock::{ModelParams, Parity};
use crate::quad::gauss_hermite;
use crate::simplex::{
    nested_simplex, simplex_integrate, stream_key, Sampler, SeriesConfig, SimplexPoint,
};
use num_complex::Complex64;

const MAX_MU: usize = 32;

/// ξ_λ(μ, t), ψ⁻_λ(μ, t) and ψ⁺_λ(μ, t) divided by g²/sh(t); exact finite
/// sums over the simplex coordinates with μ_0 = 0 implicit.
///
/// The double sum of ξ runs over 0 ≤ α < b ≤ λ−1 with b − α odd; grouping α
/// by parity turns it into a single pass with two prefix accumulators.
fn xi_over(mu: &[f64], t: f64) -> f64 {
    let lambda = mu.len();
    let mut chm = [0.0f64; MAX_MU + 1];
    let mut chr = [0.0f64; MAX_MU + 1];
    chm[0] = 1.0;
    chr[0] = t.cosh();
    for (g, &m) in mu.iter().enumerate() {
        chm[g + 1] = (t * m).cosh();
        chr[g + 1] = (t * (1.0 - m)).cosh();
    }
    let mut alt = 0.0;
    for g in 0..=lambda {
        alt += if g % 2 == 0 { chm[g] } else { -chm[g] };
    }
    let parity_sign = if lambda % 2 == 0 { 1.0 } else { -1.0 };
    let sh_half = (0.5 * t * (1.0 - mu[lambda - 1])).sinh();
    let first = -8.0 * sh_half * sh_half * parity_sign * alt;
    // Σ_{α<b, b−α odd} (ch(t(1−μ_{b+1})) − ch(t(1−μ_b))) (ch(tμ_α) − ch(tμ_{α+1}))
    let mut pref = [0.0f64; 2];
    let mut double = 0.0;
    for b in 1..lambda {
        let alpha = b - 1;
        pref[alpha % 2] += chm[alpha] - chm[alpha + 1];
        double += (chr[b + 1] - chr[b]) * pref[1 - b % 2];
    }
    first - 4.0 * double
}

fn psi_minus_over(mu: &[f64], t: f64) -> f64 {
    let mut acc = (0.5 * t).sinh();
    let mut sign = -1.0;
    for &m in mu {
        acc += sign * (t * (0.5 - m)).sinh();
        sign = -sign;
    }
    4.0 * acc * acc
}

fn psi_plus_over(mu: &[f64], t: f64) -> f64 {
    let mut acc = (0.5 * t).cosh();
    let mut sign = -1.0;
    for &m in mu {
        acc += sign * (t * (0.5 - m)).cosh();
        sign = -sign;
    }
    4.0 * acc * acc
}

fn check_point(lambda: usize, mu: &SimplexPoint) -> Result<()> {
    if mu.dim() != lambda {
        return Err(CoreError::DimensionMismatch {
            expected: lambda,
            got: mu.dim(),
        });
    }
    if lambda == 0 || lambda > MAX_MU {
        return Err(CoreError::InvalidParameter(format!(
            "lambda must be in 1..={MAX_MU}, got {lambda}"
        )));
    }
    Ok(())
}

/// ξ_λ(μ, t) exactly as displayed, λ ≥ 1.
pub fn xi(lambda: usize, mu: &SimplexPoint, t: f64, g: f64) -> Result<f64> {
    check_point(lambda, mu)?;
    if !(t > 0.0) {
        return Err(CoreError::Domain("xi needs t > 0".into()));
    }
    Ok(g * g / t.sinh() * xi_over(&mu.mu, t))
}

/// ψ⁻_λ(μ, t).
pub fn psi_minus(lambda: usize, mu: &SimplexPoint, t: f64, g: f64) -> Result<f64> {
    check_point(lambda, mu)?;
    if !(t > 0.0) {
        return Err(CoreError::Domain("psi_minus needs t > 0".into()));
    }
    Ok(g * g / t.sinh() * psi_minus_over(&mu.mu, t))
}

/// ψ⁺_λ(μ, t) (parity series).
pub fn psi_plus(lambda: usize, mu: &SimplexPoint, t: f64, g: f64) -> Result<f64> {
    check_point(lambda, mu)?;
    if !(t > 0.0) {
        return Err(CoreError::Domain("psi_plus needs t > 0".into()));
    }
    Ok(g * g / t.sinh() * psi_plus_over(&mu.mu, t))
}

/// Fast Θ evaluation on a raw coordinate slice (hot path of the Mellin
/// route).
pub(crate) fn theta_point(g: f64, beta: f64, mu: &[f64]) -> f64 {
    (g * g / beta.sinh() * theta_exponent_over(beta, mu)).exp()
}

/// exp(ξ_λ + ψ⁺_λ) on a raw slice: the Ξ integrand with its tanh damping
/// stripped (modified Mellin measure).
pub(crate) fn xi_psi_plus_point(g: f64, beta: f64, mu: &[f64]) -> f64 {
    (g * g / beta.sinh() * (xi_over(mu, beta) + psi_plus_over(mu, beta))).exp()
}

/// Ξ evaluation on a raw slice.
pub(crate) fn xi_big_point(g: f64, beta: f64, mu: &[f64]) -> f64 {
    (g * g / beta.sinh() * xi_big_exponent_over(beta, mu)).exp()
}

/// Θ exponent divided by g²/sh(β): every contribution, including
/// −2g²coth(β/2) = −(g²/sh)·2(ch+1), lands in one accumulation.
fn theta_exponent_over(beta: f64, mu: &[f64]) -> f64 {
    let ch = beta.cosh();
    let tail = mu.last().copied().unwrap_or(0.0);
    -2.0 * (ch + 1.0) + 4.0 * (beta * (1.0 - tail)).cosh() + xi_over(mu, beta)
        + psi_minus_over(mu, beta)
}

/// Θ_2λ(g, β, μ) ∈ (0, 1]; μ must have even dimension 2λ ≥ 2.
pub fn theta_even(g: f64, beta: f64, mu: &SimplexPoint) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(CoreError::Domain("theta needs beta > 0".into()));
    }
    if mu.dim() % 2 != 0 || mu.dim() == 0 {
        return Err(CoreError::DimensionMismatch {
            expected: 2,
            got: mu.dim(),
        });
    }
    Ok((g * g / beta.sinh() * theta_exponent_over(beta, &mu.mu)).exp())
}

/// Ξ exponent divided by g²/sh(β); −2g² tanh(β/2) = −(g²/sh)·2(ch−1).
fn xi_big_exponent_over(beta: f64, mu: &[f64]) -> f64 {
    let ch = beta.cosh();
    -2.0 * (ch - 1.0) + xi_over(mu, beta) + psi_plus_over(mu, beta)
}

/// Ξ_2λ+1(g, β, μ) of the parity series; μ has odd dimension.
pub fn xi_big(g: f64, beta: f64, mu: &SimplexPoint) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(CoreError::Domain("xi_big needs beta > 0".into()));
    }
    if mu.dim() % 2 != 1 {
        return Err(CoreError::DimensionMismatch {
            expected: 1,
            got: mu.dim(),
        });
    }
    Ok((g * g / beta.sinh() * xi_big_exponent_over(beta, &mu.mu)).exp())
}

/// Does Ξ_2λ+1 ≤ exp(−2g² tanh(β/2)) hold at this point? Equivalent to
/// ξ_2λ+1 + ψ⁺_2λ+1 ≤ 0; used by property tests.
pub fn xi_psi_plus_bound_check(lambda: usize, mu: &SimplexPoint, t: f64, g: f64) -> bool {
    let combined = xi(2 * lambda + 1, mu, t, g)
        .and_then(|x| psi_plus(2 * lambda + 1, mu, t, g).map(|p| x + p));
    match combined {
        Ok(v) => v <= 1e-10 * (g * g / t.sinh()).abs().max(1.0),
        Err(_) => false,
    }
}

/// Θ at complex β (needed for Taylor-coefficient extraction on a circle).
pub fn theta_even_complex(g: f64, beta: Complex64, mu: &[f64]) -> Complex64 {
    let ch = beta.cosh();
    let tail = mu.last().copied().unwrap_or(0.0);
    let lambda = mu.len();
    let mut chm = vec![Complex64::new(1.0, 0.0); lambda + 1];
    let mut chr = vec![ch; lambda + 1];
    for (gi, &m) in mu.iter().enumerate() {
        chm[gi + 1] = (beta * m).cosh();
        chr[gi + 1] = (beta * (1.0 - m)).cosh();
    }
    let mut alt = Complex64::new(0.0, 0.0);
    for gi in 0..=lambda {
        alt += if gi % 2 == 0 { chm[gi] } else { -chm[gi] };
    }
    let parity_sign = if lambda % 2 == 0 { 1.0 } else { -1.0 };
    let sh_half = (0.5 * beta * (1.0 - tail)).sinh();
    let first = -8.0 * sh_half * sh_half * parity_sign * alt;
    let mut pref = [Complex64::new(0.0, 0.0); 2];
    let mut double = Complex64::new(0.0, 0.0);
    for b in 1..lambda {
        let alpha = b - 1;
        pref[alpha % 2] += chm[alpha] - chm[alpha + 1];
        double += (chr[b + 1] - chr[b]) * pref[1 - b % 2];
    }
    let mut psi = (0.5 * beta).sinh();
    let mut sign = -1.0;
    for &m in mu {
        psi += sign * (beta * (0.5 - m)).sinh();
        sign = -sign;
    }
    let over = -2.0 * (ch + 1.0) + 4.0 * (beta * (1.0 - tail)).cosh() + first - 4.0 * double
        + 4.0 * psi * psi;
    (g * g / beta.sinh() * over).exp()
}

/// Result of a truncated series evaluation.
#[derive(Clone, Debug)]
pub struct SeriesResult {
    /// The assembled value, prefactors included.
    pub value: f64,
    /// Series terms before the outer prefactor; index k is the (βΔ)^k term
    /// (the full series has only even k, the parity series has both).
    pub per_lambda_terms: Vec<f64>,
    /// Sampler standard error propagated to `value`.
    pub stat_err: f64,
    /// Estimated truncation tail beyond lambda_max, in units of `value`.
    pub trunc_err: f64,
    /// Set when trunc_err exceeds target_rel_err · |value|.
    pub truncation_warning: bool,
}

fn factorial_f64(n: usize) -> f64 {
    (1..=n as u64).map(|k| k as f64).product::<f64>().max(1.0)
}

/// Rigorous envelope for the even-series tail: Θ ≤ 1 and the ch factor is
/// bounded by ch(εβ), so Σ_{λ>L}(βΔ)^{2λ} I_λ ≤ ch(εβ)[ch(βΔ) − Σ_{λ≤L}].
fn even_tail_envelope(beta_delta: f64, eps_beta: f64, lambda_max: usize) -> f64 {
    let mut partial = 0.0;
    for l in 0..=lambda_max {
        partial += beta_delta.powi(2 * l as i32) / factorial_f64(2 * l);
    }
    eps_beta.cosh() * (beta_delta.cosh() - partial).max(0.0)
}

fn odd_tail_envelope(beta_delta: f64, damping: f64, lambda_max: usize) -> f64 {
    let mut partial = 0.0;
    for l in 0..=lambda_max {
        partial += beta_delta.powi(2 * l as i32 + 1) / factorial_f64(2 * l + 1);
    }
    damping * (beta_delta.sinh() - partial).max(0.0)
}

/// Geometric tail estimate from the last two terms, ratio capped by the
/// g = 0 envelope ratio (βΔ)²/((2λ+1)(2λ+2)).
fn geometric_tail(terms: &[f64], beta_delta: f64, lambda_max: usize) -> f64 {
    let last = terms.last().copied().unwrap_or(0.0).abs();
    if last == 0.0 || terms.len() < 2 {
        return 0.0;
    }
    let prev = terms[terms.len() - 2].abs();
    let cap = beta_delta * beta_delta
        / ((2 * lambda_max + 1) as f64 * (2 * lambda_max + 2) as f64);
    let mut r = if prev > 0.0 { last / prev } else { cap };
    r = r.min(cap);
    if r >= 1.0 {
        return f64::INFINITY;
    }
    last * r / (1.0 - r)
}

enum Integrand {
    /// Θ_2λ · ch(εβ(1 − 2Σ(−1)^γ μ_γ)), dimension 2λ.
    ThetaCh { eps: f64 },
    /// Ξ_2λ+1, dimension 2λ + 1.
    XiBig,
}

fn series_integral(
    kind: &Integrand,
    g: f64,
    beta: f64,
    dim: usize,
    sampler: &Sampler,
    tag: u64,
) -> Result<(f64, f64)> {
    let eval = |mu: &[f64]| -> f64 {
        match kind {
            Integrand::ThetaCh { eps } => {
                let theta = (g * g / beta.sinh() * theta_exponent_over(beta, mu)).exp();
                let mut alt = 0.0;
                let mut sign = -1.0;
                for &m in mu {
                    alt += sign * m;
                    sign = -sign;
                }
                theta * (eps * beta * (1.0 - 2.0 * alt)).cosh()
            }
            Integrand::XiBig => (g * g / beta.sinh() * xi_big_exponent_over(beta, mu)).exp(),
        }
    };
    match sampler {
        Sampler::Qmc { points_per_lambda, seed } => Ok(simplex_integrate(
            |p: &SimplexPoint| eval(&p.mu),
            dim,
            *points_per_lambda,
            stream_key(*seed, tag),
        )),
        Sampler::NestedQuadrature { order, max_dim } => {
            if dim > *max_dim || dim > 4 {
                return Err(CoreError::InvalidParameter(format!(
                    "nested quadrature sampler capped at dim {}, series needs dim {dim}",
                    (*max_dim).min(4)
                )));
            }
            Ok((nested_simplex(eval, dim, *order)?, 1e-12))
        }
    }
}

fn effective_lambda_max(cfg: &SeriesConfig, beta_delta: f64, eps_beta: f64) -> usize {
    let mut l = cfg.lambda_max;
    while l < 12 {
        let tail = even_tail_envelope(beta_delta, eps_beta, l);
        if tail <= cfg.target_rel_err * eps_beta.cosh().max(1.0) {
            break;
        }
        l += 1;
    }
    if let Sampler::NestedQuadrature { max_dim, .. } = cfg.sampler {
        l = l.min(max_dim / 2);
    }
    l
}

const TAG_FULL: u64 = 1 << 20;
const TAG_EVEN: u64 = 2 << 20;
const TAG_ODD: u64 = 3 << 20;

/// Z^ε(β) by the explicit series. `per_lambda_terms[2λ]` holds the
/// bracketed λ-contribution before the prefactor 2e^{g²β}/(1−e^{−β}).
pub fn partition_full(params: &ModelParams, beta: f64, cfg: &SeriesConfig) -> Result<SeriesResult> {
    if !(beta > 0.0) {
        return Err(CoreError::Domain("partition function needs beta > 0".into()));
    }
    cfg.validate()?;
    let bd = beta * params.delta.abs();
    let eb = params.eps * beta;
    let lambda_max = effective_lambda_max(cfg, bd, eb);
    let mut terms = vec![0.0; 2 * lambda_max + 1];
    terms[0] = eb.cosh();
    let mut even_terms = vec![terms[0]];
    let mut var = 0.0;
    for l in 1..=lambda_max {
        let (ival, ierr) = series_integral(
            &Integrand::ThetaCh { eps: params.eps },
            params.g,
            beta,
            2 * l,
            &cfg.sampler,
            TAG_FULL + l as u64,
        )?;
        let w = bd.powi(2 * l as i32);
        terms[2 * l] = w * ival;
        even_terms.push(terms[2 * l]);
        var += (w * ierr) * (w * ierr);
    }
    let prefactor = 2.0 * (params.g * params.g * beta).exp() / (1.0 - (-beta).exp());
    let bracket: f64 = terms.iter().sum();
    let tail = geometric_tail(&even_terms, bd, lambda_max)
        .min(even_tail_envelope(bd, eb, lambda_max));
    let value = prefactor * bracket;
    let trunc_err = prefactor * tail;
    Ok(SeriesResult {
        value,
        per_lambda_terms: terms,
        stat_err: prefactor * var.sqrt(),
        trunc_err,
        truncation_warning: trunc_err > cfg.target_rel_err * value.abs(),
    })
}

/// Z^±(β) for the parity Hamiltonians (needs ε = 0). The odd bracket enters
/// with sign ∓ and prefactor e^{g²β}/(1+e^{−β}).
pub fn partition_parity(
    params: &ModelParams,
    sector: Parity,
    beta: f64,
    cfg: &SeriesConfig,
) -> Result<SeriesResult> {
    if params.eps != 0.0 {
        return Err(CoreError::InvalidParameter(
            "parity partition function needs eps = 0".into(),
        ));
    }
    if !(beta > 0.0) {
        return Err(CoreError::Domain("partition function needs beta > 0".into()));
    }
    cfg.validate()?;
    let bd = beta * params.delta.abs();
    let lambda_max = effective_lambda_max(cfg, bd, 0.0);
    let mut terms = vec![0.0; 2 * lambda_max + 2];
    terms[0] = 1.0;
    let mut var_even = 0.0;
    let mut var_odd = 0.0;
    let mut even_sum = 1.0;
    let mut odd_sum = 0.0;
    let mut even_list = vec![1.0];
    for l in 1..=lambda_max {
        let (ival, ierr) = series_integral(
            &Integrand::ThetaCh { eps: 0.0 },
            params.g,
            beta,
            2 * l,
            &cfg.sampler,
            TAG_EVEN + l as u64,
        )?;
        let w = bd.powi(2 * l as i32);
        terms[2 * l] = w * ival;
        even_sum += terms[2 * l];
        even_list.push(terms[2 * l]);
        var_even += (w * ierr) * (w * ierr);
    }
    for l in 0..=lambda_max {
        let (ival, ierr) = series_integral(
            &Integrand::XiBig,
            params.g,
            beta,
            2 * l + 1,
            &cfg.sampler,
            TAG_ODD + l as u64,
        )?;
        let w = (beta * params.delta).powi(2 * l as i32 + 1);
        terms[2 * l + 1] = w * ival;
        odd_sum += terms[2 * l + 1];
        var_odd += (w * ierr) * (w * ierr);
    }
    let pf_even = (params.g * params.g * beta).exp() / (1.0 - (-beta).exp());
    let pf_odd = (params.g * params.g * beta).exp() / (1.0 + (-beta).exp());
    let sign = match sector {
        Parity::Plus => -1.0,
        Parity::Minus => 1.0,
    };
    let value = pf_even * even_sum + sign * pf_odd * odd_sum;
    let damping = (-2.0 * params.g * params.g * (0.5 * beta).tanh()).exp();
    let tail = pf_even
        * geometric_tail(&even_list, bd, lambda_max).min(even_tail_envelope(bd, 0.0, lambda_max))
        + pf_odd * odd_tail_envelope(bd, damping, lambda_max);
    Ok(SeriesResult {
        value,
        per_lambda_terms: terms,
        stat_err: (pf_even * pf_even * var_even + pf_odd * pf_odd * var_odd).sqrt(),
        trunc_err: tail,
        truncation_warning: tail > cfg.target_rel_err * value.abs(),
    })
}

/// Mehler kernel of a†a: e^{−t a†a} position kernel.
pub fn mehler_kernel(x: f64, y: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(CoreError::Domain("mehler kernel needs t > 0".into()));
    }
    let em2 = (-2.0 * t).exp();
    let em1 = (-t).exp();
    let denom = 1.0 - em2;
    let quad = -(1.0 + em2) / (2.0 * denom) * (x * x + y * y) + 2.0 * em1 * x * y / denom;
    Ok(quad.exp() / (std::f64::consts::PI * denom).sqrt())
}

/// λ = 0 term of the shifted heat kernel of H^ε + g² + N: Gaussian factor
/// times the 2×2 matrix [ch, −sh; −sh, ch] of argument
/// √2 g (x+y)(1−e^{−t})/(1+e^{−t}) + εt, times e^{−Nt}.
pub fn heat_kernel_lambda0(
    x: f64,
    y: f64,
    t: f64,
    params: &ModelParams,
    n_shift: i64,
) -> Result<[[f64; 2]; 2]> {
    let scalar = mehler_kernel(x, y, t)?
        * (-2.0 * params.g * params.g * (0.5 * t).tanh()).exp()
        * (-(n_shift as f64) * t).exp();
    let em1 = (-t).exp();
    let arg = std::f64::consts::SQRT_2 * params.g * (x + y) * (1.0 - em1) / (1.0 + em1)
        + params.eps * t;
    let ch = arg.cosh();
    let sh = arg.sinh();
    Ok([[scalar * ch, -scalar * sh], [-scalar * sh, scalar * ch]])
}

/// Gauss–Hermite evaluation of e^{Nt} ∫ tr K_λ0(x, x, t) dx; completing the
/// square gives exactly 2 ch(εt)/(1 − e^{−t}) for every g.
pub fn heat_trace_quadrature(params: &ModelParams, t: f64, order: usize) -> Result<f64> {
    if !(t > 0.0) {
        return Err(CoreError::Domain("heat trace needs t > 0".into()));
    }
    let a = (0.5 * t).tanh();
    let rule = gauss_hermite(order);
    let em2 = (-2.0 * t).exp();
    let norm = 1.0 / (std::f64::consts::PI * (1.0 - em2)).sqrt();
    let damp = (-2.0 * params.g * params.g * a).exp();
    let slope = 2.0 * std::f64::consts::SQRT_2 * params.g * a;
    let mut acc = 0.0;
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let x = z / a.sqrt();
        acc += w * 2.0 * (slope * x + params.eps * t).cosh();
    }
    Ok(acc * norm * damp / a.sqrt())
}

/// Closed form of the λ = 0 trace integral.
pub fn heat_trace_closed_form(eps: f64, t: f64) -> f64 {
    2.0 * (eps * t).cosh() / (1.0 - (-t).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::unit_uniform;

    fn params(g: f64, delta: f64, eps: f64) -> ModelParams {
        ModelParams::new(g, delta, eps).unwrap()
    }

    fn random_point(dim: usize, key: u64, idx: usize) -> SimplexPoint {
        let mut mu: Vec<f64> = (0..dim)
            .map(|j| unit_uniform(key, (idx * dim + j) as u64))
            .collect();
        mu.sort_by(|a, b| a.partial_cmp(b).unwrap());
        SimplexPoint::new(mu).unwrap()
    }

    /// Term-by-term re-derivation of ξ and ψ from the displayed sums, naive
    /// double loops, no factorization. Oracle for the production kernels.
    fn xi_naive(mu: &[f64], t: f64, g: f64) -> f64 {
        let lambda = mu.len();
        let muext: Vec<f64> = std::iter::once(0.0).chain(mu.iter().copied()).collect();
        let sign_l = if lambda % 2 == 0 { 1.0 } else { -1.0 };
        let mut alt = 0.0;
        for (gi, &m) in muext.iter().enumerate() {
            alt += if gi % 2 == 0 { 1.0 } else { -1.0 } * (t * m).cosh();
        }
        let mut out = -8.0 * g * g / t.sinh()
            * (0.5 * t * (1.0 - mu[lambda - 1])).sinh().powi(2)
            * sign_l
            * alt;
        let mut double = 0.0;
        for b in 1..lambda {
            for alpha in 0..b {
                if (b - alpha) % 2 == 1 {
                    double += ((t * (1.0 - muext[b + 1])).cosh() - (t * (1.0 - muext[b])).cosh())
                        * ((t * muext[alpha]).cosh() - (t * muext[alpha + 1]).cosh());
                }
            }
        }
        out -= 4.0 * g * g / t.sinh() * double;
        out
    }

    fn psi_naive(mu: &[f64], t: f64, g: f64, plus: bool) -> f64 {
        let muext: Vec<f64> = std::iter::once(0.0).chain(mu.iter().copied()).collect();
        let mut acc = 0.0;
        for (gi, &m) in muext.iter().enumerate() {
            let f = if plus {
                (t * (0.5 - m)).cosh()
            } else {
                (t * (0.5 - m)).sinh()
            };
            acc += if gi % 2 == 0 { 1.0 } else { -1.0 } * f;
        }
        4.0 * g * g / t.sinh() * acc * acc
    }

    #[test]
    fn kernels_match_naive_oracle() {
        for dim in 1..=9usize {
            for idx in 0..40 {
                let p = random_point(dim, 999, idx);
                let (t, g) = (1.3, 0.8);
                let xi_fast = xi(dim, &p, t, g).unwrap();
                let xi_slow = xi_naive(&p.mu, t, g);
                assert!(
                    (xi_fast - xi_slow).abs() < 1e-12 * xi_slow.abs().max(1.0),
                    "dim={dim} idx={idx}: {xi_fast} vs {xi_slow}"
                );
                let pm = psi_minus(dim, &p, t, g).unwrap();
                assert!((pm - psi_naive(&p.mu, t, g, false)).abs() < 1e-12);
                let pp = psi_plus(dim, &p, t, g).unwrap();
                assert!((pp - psi_naive(&p.mu, t, g, true)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn theta_at_zero_point_is_one() {
        // the exponent telescopes to 0 when every μ vanishes
        for lambda in 1..=4usize {
            let p = SimplexPoint::new(vec![0.0; 2 * lambda]).unwrap();
            for (g, beta) in [(0.7, 0.9), (2.0, 0.3), (0.3, 4.0)] {
                let th = theta_even(g, beta, &p).unwrap();
                assert!((th - 1.0).abs() < 1e-12, "Θ(0)={th}");
            }
        }
    }

    #[test]
    fn theta_is_one_at_zero_coupling() {
        for idx in 0..20 {
            let p = random_point(4, 123, idx);
            assert!((theta_even(0.0, 1.1, &p).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn theta_bounded_by_one() {
        for lambda in 1..=4usize {
            for idx in 0..200 {
                let p = random_point(2 * lambda, 77, idx);
                for (g, beta) in [(0.8, 1.3), (2.5, 0.4), (1.0, 6.0)] {
                    let th = theta_even(g, beta, &p).unwrap();
                    assert!(th > 0.0 && th <= 1.0 + 1e-12, "Θ={th} out of range");
                }
            }
        }
    }

    #[test]
    fn xi_zero_point_closed_forms() {
        // μ = 0: ξ = −(8g²/sh t)·sh²(t/2), ψ⁻ = 4g² sh²(t/2)/sh t
        let (t, g) = (1.7f64, 0.6f64);
        for lambda in [2usize, 4] {
            let p = SimplexPoint::new(vec![0.0; lambda]).unwrap();
            let want_xi = -8.0 * g * g / t.sinh() * (0.5 * t).sinh().powi(2);
            assert!((xi(lambda, &p, t, g).unwrap() - want_xi).abs() < 1e-13);
            let want_psi = 4.0 * g * g * (0.5 * t).sinh().powi(2) / t.sinh();
            assert!((psi_minus(lambda, &p, t, g).unwrap() - want_psi).abs() < 1e-13);
        }
    }

    #[test]
    fn xi_and_psi_minus_bounds() {
        // ψ⁻ ≤ 4g² sh²(t/2)/sh t and ξ_2λ ≤ −(4g²/sh t)(ch(t(1−μ_2λ)) − 1)
        for idx in 0..300 {
            let p = random_point(6, 31, idx);
            for (t, g) in [(0.7f64, 0.9f64), (2.2, 1.5)] {
                let bound_psi = 4.0 * g * g * (0.5 * t).sinh().powi(2) / t.sinh();
                assert!(psi_minus(6, &p, t, g).unwrap() <= bound_psi + 1e-12);
                let bound_xi =
                    -4.0 * g * g / t.sinh() * ((t * (1.0 - p.mu[5])).cosh() - 1.0);
                assert!(xi(6, &p, t, g).unwrap() <= bound_xi + 1e-12);
            }
        }
    }

    #[test]
    fn xi_big_bound_and_equality_cases() {
        for lambda in 0..=3usize {
            for idx in 0..150 {
                let p = random_point(2 * lambda + 1, 55, idx);
                for (g, beta) in [(0.5, 0.7), (2.0, 3.0)] {
                    assert!(xi_psi_plus_bound_check(lambda, &p, beta, g));
                    let bound = (-2.0 * g * g * (0.5 * beta).tanh()).exp();
                    let v = xi_big(g, beta, &p).unwrap();
                    assert!(v <= bound * (1.0 + 1e-12));
                }
            }
            // equality at μ = 0
            let p0 = SimplexPoint::new(vec![0.0; 2 * lambda + 1]).unwrap();
            let (g, beta) = (0.9, 1.4);
            let v = xi_big(g, beta, &p0).unwrap();
            let bound = (-2.0 * g * g * (0.5 * beta).tanh()).exp();
            assert!((v - bound).abs() < 1e-12 * bound);
        }
        // g = 0 makes Ξ equal its bound, both 1
        let p = random_point(3, 8, 0);
        assert!((xi_big(0.0, 1.0, &p).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn xi_big_integral_over_single_coordinate_is_exact() {
        // ξ_1 + ψ⁺_1 ≡ 0, so Ξ_1 is constant in μ_1
        let (g, beta) = (0.8f64, 1.1f64);
        let want = (-2.0 * g * g * (0.5 * beta).tanh()).exp();
        for idx in 0..20 {
            let p = random_point(1, 4, idx);
            assert!((xi_big(g, beta, &p).unwrap() - want).abs() < 1e-13);
        }
    }

    #[test]
    fn complex_theta_matches_real_on_axis() {
        for idx in 0..30 {
            let p = random_point(4, 17, idx);
            let (g, beta) = (0.7, 1.4);
            let re = theta_even(g, beta, &p).unwrap();
            let cx = theta_even_complex(g, Complex64::new(beta, 0.0), &p.mu);
            assert!((cx.re - re).abs() < 1e-13 && cx.im.abs() < 1e-13);
        }
    }

    #[test]
    fn partition_zero_delta_closed_form() {
        let p = params(0.6, 0.0, 0.35);
        let cfg = SeriesConfig::qmc(2000, 3);
        for &beta in &[0.4, 1.0, 3.0] {
            let z = partition_full(&p, beta, &cfg).unwrap();
            let want = 2.0 * (p.g * p.g * beta).exp() * (p.eps * beta).cosh()
                / (1.0 - (-beta).exp());
            assert!((z.value - want).abs() < 1e-12 * want, "beta={beta}");
            assert!(z.stat_err < 1e-12 * want);
        }
    }

    #[test]
    fn partition_zero_coupling_matches_two_level_formula() {
        // g = 0: Z = 2 ch(β√(Δ²+ε²)) / (1−e^{−β})
        let p = params(0.0, 0.7, 0.4);
        let cfg = SeriesConfig {
            lambda_max: 8,
            sampler: Sampler::Qmc { points_per_lambda: 60_000, seed: 5 },
            target_rel_err: 1e-4,
        };
        let beta = 1.0;
        let z = partition_full(&p, beta, &cfg).unwrap();
        let r = (p.delta * p.delta + p.eps * p.eps).sqrt();
        let want = 2.0 * (beta * r).cosh() / (1.0 - (-beta).exp());
        assert!(
            (z.value - want).abs() <= 3.0 * z.stat_err + z.trunc_err + 1e-9 * want,
            "{} vs {want}",
            z.value
        );
    }

    #[test]
    fn partition_matches_eigenvalue_sum() {
        // six coupling triples with |parameters| <= 1 against the
        // diagonalization oracle (the heavier sampled triples live in the
        // acceptance suite)
        let triples = [
            (0.3, 0.7, 0.25),
            (0.6, 0.4, 0.1),
            (1.0, 0.2, 0.5),
            (0.2, 1.0, 0.0),
            (0.5, 0.5, -0.5),
            (0.9, 0.6, 1.0),
        ];
        let cfg = SeriesConfig {
            lambda_max: 8,
            sampler: Sampler::Qmc { points_per_lambda: 40_000, seed: 11 },
            target_rel_err: 1e-3,
        };
        for (g, delta, eps) in triples {
            let p = params(g, delta, eps);
            let beta = 1.0;
            let z = partition_full(&p, beta, &cfg).unwrap();
            let spec = crate::fock::spectrum(&p, 90, 1e-9).unwrap();
            let oracle: f64 = spec.eigenvalues.iter().map(|l| (-beta * l).exp()).sum();
            let tail = (-beta * spec.eigenvalues.last().unwrap()).exp() * 3.0;
            assert!(
                (z.value - oracle).abs() <= 1e-3 * oracle + 3.0 * z.stat_err + z.trunc_err + tail,
                "({g},{delta},{eps}): {} vs {oracle}",
                z.value
            );
        }
    }

    #[test]
    fn parity_sum_recovers_full_partition() {
        let p = params(0.4, 0.8, 0.0);
        let cfg = SeriesConfig {
            lambda_max: 8,
            sampler: Sampler::Qmc { points_per_lambda: 30_000, seed: 21 },
            target_rel_err: 1e-3,
        };
        let beta = 1.5;
        let zp = partition_parity(&p, Parity::Plus, beta, &cfg).unwrap();
        let zm = partition_parity(&p, Parity::Minus, beta, &cfg).unwrap();
        let zf = partition_full(&p, beta, &cfg).unwrap();
        let combined_err =
            3.0 * (zp.stat_err + zm.stat_err + zf.stat_err) + zp.trunc_err + zm.trunc_err + zf.trunc_err;
        assert!(
            ((zp.value + zm.value) - zf.value).abs() <= combined_err + 1e-9 * zf.value,
            "{} + {} vs {}",
            zp.value,
            zm.value,
            zf.value
        );
    }

    #[test]
    fn parity_zero_delta_closed_form() {
        let p = params(0.7, 0.0, 0.0);
        let cfg = SeriesConfig::qmc(2000, 9);
        let beta = 1.2;
        for sector in [Parity::Plus, Parity::Minus] {
            let z = partition_parity(&p, sector, beta, &cfg).unwrap();
            let want = (p.g * p.g * beta).exp() / (1.0 - (-beta).exp());
            assert!((z.value - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn parity_zero_coupling_matches_diagonal_sum() {
        // g = 0: Z^± = Σ_n exp(−β(n ± Δ(−1)^n))
        let p = params(0.0, 0.8, 0.0);
        let cfg = SeriesConfig {
            lambda_max: 9,
            sampler: Sampler::Qmc { points_per_lambda: 20_000, seed: 31 },
            target_rel_err: 1e-5,
        };
        let beta = 1.3;
        for (sector, sgn) in [(Parity::Plus, 1.0), (Parity::Minus, -1.0)] {
            let z = partition_parity(&p, sector, beta, &cfg).unwrap();
            let oracle: f64 = (0..10_000)
                .map(|n| {
                    let flip = if n % 2 == 0 { 1.0 } else { -1.0 };
                    (-beta * (n as f64 + sgn * p.delta * flip)).exp()
                })
                .sum();
            assert!(
                (z.value - oracle).abs() <= 3.0 * z.stat_err + z.trunc_err + 1e-8 * oracle,
                "{:?}: {} vs {oracle}",
                sector,
                z.value
            );
        }
    }

    #[test]
    fn large_g_shrinks_lambda_one_term() {
        let cfg = SeriesConfig {
            lambda_max: 2,
            sampler: Sampler::Qmc { points_per_lambda: 20_000, seed: 41 },
            target_rel_err: 1.0,
        };
        let beta = 1.0;
        let mut prev = f64::INFINITY;
        for &g in &[1.0, 2.0, 4.0, 8.0] {
            let p = params(g, 0.5, 0.0);
            let z = partition_full(&p, beta, &cfg).unwrap();
            let term1 = z.per_lambda_terms[2];
            assert!(term1 < prev, "g={g}: term {term1} did not shrink");
            prev = term1;
        }
    }

    #[test]
    fn heat_kernel_symmetry_and_mehler_reduction() {
        let p = params(0.6, 0.4, 0.3);
        for (x, y) in [(0.3, -0.8), (1.2, 0.5), (0.0, 0.0)] {
            let k_xy = heat_kernel_lambda0(x, y, 1.1, &p, 2).unwrap();
            let k_yx = heat_kernel_lambda0(y, x, 1.1, &p, 2).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert!((k_xy[i][j] - k_yx[j][i]).abs() < 1e-14);
                }
            }
        }
        // g = ε = 0 reduces to Mehler times the identity
        let free = params(0.0, 0.4, 0.0);
        let k = heat_kernel_lambda0(0.7, -0.2, 0.9, &free, 0).unwrap();
        let m = mehler_kernel(0.7, -0.2, 0.9).unwrap();
        assert!((k[0][0] - m).abs() < 1e-14 && k[0][1].abs() < 1e-18);
    }

    #[test]
    fn heat_trace_matches_closed_form() {
        let p = params(0.6, 0.0, 0.3);
        let t = 1.2;
        let got = heat_trace_quadrature(&p, t, 64).unwrap();
        let want = heat_trace_closed_form(p.eps, t);
        assert!(
            (got - want).abs() <= 1e-8 * want,
            "{got} vs {want} (rel {:.2e})",
            (got - want).abs() / want
        );
    }

    #[test]
    fn domain_errors() {
        let p = SimplexPoint::new(vec![0.2, 0.5]).unwrap();
        assert!(theta_even(1.0, -1.0, &p).is_err());
        assert!(theta_even(1.0, 0.0, &p).is_err());
        assert!(xi(3, &p, 1.0, 1.0).is_err()); // dimension mismatch
        assert!(mehler_kernel(0.0, 0.0, 0.0).is_err());
        let odd = SimplexPoint::new(vec![0.4]).unwrap();
        assert!(theta_even(1.0, 1.0, &odd).is_err());
        assert!(xi_big(1.0, 1.0, &p).is_err());
    }
}
