//! The simplex exponential integrals
//! J_λ(t) = ∫_{0≤μ1≤…≤μλ≤1} exp[t(1 − 2(−1)^λ Σ_γ (−1)^γ μ_γ)] dμ,
//! with J_0(t) = e^t.
//!
//! Writing the exponent as t − 2t(μ_λ − μ_{λ−1} + …), one integration by
//! parts per level gives the recursion K_λ(x, t) = ∫_0^x e^{−2tu}
//! K_{λ−1}(u, −t) du with K_0 = 1 and J_λ(t) = e^t K_λ(1, t). Each K is
//! exactly a polynomial plus a polynomial times e^{−2tx}; the recursion
//! carries those coefficient tables, either numerically for a given t or as
//! exact rationals in w = 1/(2t).
//!
//! The closed form cancels catastrophically for small |t| at fixed λ, so a
//! bivariate Taylor expansion takes over below |t| ≈ 1 + 3λ/4; at t = 0 it
//! reduces to the simplex volume J_λ(0) = 1/λ!.

use crate::rational::Rat;
use crate::simplex::{simplex_integrate, SimplexPoint};

/// J_λ(t), route chosen automatically.
pub fn j_lambda(lambda: usize, t: f64) -> f64 {
    if lambda == 0 {
        return t.exp();
    }
    if t.abs() < taylor_threshold(lambda) {
        j_lambda_taylor(lambda, t)
    } else {
        j_lambda_closed(lambda, t)
    }
}

pub(crate) fn taylor_threshold(lambda: usize) -> f64 {
    // Taylor loses digits as (3t)^m/m! peaks; the closed form loses them as
    // (2t)^{-λ} cancellations sharpen. Both are comfortably accurate near
    // t ≈ 0.4 λ.
    1.0 + 0.4 * lambda as f64
}

/// Closed form by the integration-by-parts recursion at a fixed t ≠ 0.
pub fn j_lambda_closed(lambda: usize, t: f64) -> f64 {
    assert!(t != 0.0, "closed form needs t != 0");
    if lambda == 0 {
        return t.exp();
    }
    // plain polynomial part and e^{−2 s_ℓ x} part, coefficients in x
    let mut p: Vec<f64> = vec![1.0];
    let mut q: Vec<f64> = vec![];
    for level in 1..=lambda {
        let sign = if (lambda - level) % 2 == 0 { 1.0 } else { -1.0 };
        let c = -2.0 * sign * t;
        let (p_prev, q_prev) = (p, q);
        // ∫ of the plain part coming from the previous exponential mode
        let mut p_new = vec![0.0; q_prev.len() + 1];
        for (a, &qa) in q_prev.iter().enumerate() {
            p_new[a + 1] = qa / (a as f64 + 1.0);
        }
        if p_new.is_empty() {
            p_new.push(0.0);
        }
        let mut q_new = vec![0.0; p_prev.len()];
        let mut d = vec![0.0; p_prev.len()];
        for (a, &pa) in p_prev.iter().enumerate() {
            if pa == 0.0 {
                continue;
            }
            // antiderivative of u^a e^{cu}: e^{cu} Σ d_i u^i
            d[a] = 1.0 / c;
            for i in (1..=a).rev() {
                d[i - 1] = -(i as f64) * d[i] / c;
            }
            for i in 0..=a {
                q_new[i] += pa * d[i];
            }
            p_new[0] -= pa * d[0];
        }
        p = p_new;
        q = q_new;
    }
    let sum_p: f64 = p.iter().sum();
    let sum_q: f64 = q.iter().sum();
    t.exp() * sum_p + (-t).exp() * sum_q
}

/// Taylor expansion of J_λ around t = 0 from the bivariate coefficient
/// recursion; exact limit J_λ(0) = 1/λ!.
pub fn j_lambda_taylor(lambda: usize, t: f64) -> f64 {
    if lambda == 0 {
        return t.exp();
    }
    let imax = (3.0 * t.abs() * std::f64::consts::E).ceil() as usize + 40;
    let imax = imax.min(160);
    // a[i][j]: coefficient of t^i x^j in K_level
    let mut a: Vec<Vec<f64>> = vec![vec![1.0]];
    for level in 1..=lambda {
        let sigma = if (lambda - level) % 2 == 0 { 1.0 } else { -1.0 };
        let jmax_prev = a.iter().map(|row| row.len()).max().unwrap_or(1);
        let mut next: Vec<Vec<f64>> =
            vec![vec![0.0; jmax_prev + imax + 2]; imax + 1];
        for (i, row) in a.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                // e^{−2σt u} = Σ_p (−2σ)^p t^p u^p / p!
                let mut pref = 1.0;
                for pexp in 0..=(imax.saturating_sub(i)) {
                    let ti = i + pexp;
                    let xj = pexp + j + 1;
                    next[ti][xj] += pref * b / xj as f64;
                    pref *= -2.0 * sigma / (pexp as f64 + 1.0);
                }
            }
        }
        a = next;
    }
    // evaluate at x = 1, then multiply by e^t
    let mut acc = 0.0;
    let mut tp = 1.0;
    for row in &a {
        let ci: f64 = row.iter().sum();
        acc += ci * tp;
        tp *= t;
    }
    t.exp() * acc
}

/// Direct sort-transform quadrature of the defining integral.
/// Returns (estimate, standard error).
pub fn j_lambda_quadrature(lambda: usize, t: f64, points: usize, key: u64) -> (f64, f64) {
    assert!(lambda >= 1);
    let parity = if lambda % 2 == 0 { 1.0 } else { -1.0 };
    simplex_integrate(
        |pt: &SimplexPoint| {
            let mut alt = 0.0;
            let mut sign = -1.0; // γ = 1 term carries (−1)^1
            for &m in &pt.mu {
                alt += sign * m;
                sign = -sign;
            }
            (t * (1.0 - 2.0 * parity * alt)).exp()
        },
        lambda,
        points,
        key,
    )
}

/// Exact coefficient tables: J_λ(t) = e^t A(w) + e^{−t} B(w), w = 1/(2t).
#[derive(Clone, Debug, PartialEq)]
pub struct JSymbolic {
    pub a: Vec<Rat>,
    pub b: Vec<Rat>,
}

/// Polynomials in w with rational coefficients.
type PolyW = Vec<Rat>;

fn poly_add_scaled(dst: &mut PolyW, src: &PolyW, scale: Rat) {
    if dst.len() < src.len() {
        dst.resize(src.len(), Rat::ZERO);
    }
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        *d = *d + *s * scale;
    }
}

fn poly_mul_w(src: &PolyW, scale: Rat) -> PolyW {
    // multiply by scale·w
    let mut out = vec![Rat::ZERO];
    out.extend(src.iter().map(|c| *c * scale));
    out
}

/// Run the recursion symbolically; coefficients of A and B are exact
/// rationals in w = 1/(2t).
pub fn j_symbolic(lambda: usize) -> JSymbolic {
    // p[j], q[j]: PolyW coefficients of x^j
    let mut p: Vec<PolyW> = vec![vec![Rat::ONE]];
    let mut q: Vec<PolyW> = vec![];
    for level in 1..=lambda {
        let sigma = if (lambda - level) % 2 == 0 { 1 } else { -1 };
        // 1/c = −σ w
        let inv_c_sign = Rat::int(-sigma);
        let (p_prev, q_prev) = (p, q);
        let mut p_new: Vec<PolyW> = vec![PolyW::new(); q_prev.len() + 1];
        for (a, qa) in q_prev.iter().enumerate() {
            let mut integrated = qa.clone();
            let inv = Rat::new(1, a as i128 + 1);
            for c in integrated.iter_mut() {
                *c = *c * inv;
            }
            p_new[a + 1] = integrated;
        }
        if p_new.is_empty() {
            p_new.push(PolyW::new());
        }
        let mut q_new: Vec<PolyW> = vec![PolyW::new(); p_prev.len()];
        for (a, pa) in p_prev.iter().enumerate() {
            if pa.is_empty() {
                continue;
            }
            // d_a = 1/c = −σ w; d_{i−1} = −i d_i / c = i σ w d_i
            let mut d: Vec<PolyW> = vec![PolyW::new(); a + 1];
            d[a] = poly_mul_w(&vec![Rat::ONE], inv_c_sign);
            for i in (1..=a).rev() {
                d[i - 1] = poly_mul_w(&d[i], Rat::int(i as i128) * Rat::int(sigma));
            }
            for i in 0..=a {
                let mut prod = PolyW::new();
                // pa(w) * d_i(w)
                for (k1, c1) in pa.iter().enumerate() {
                    for (k2, c2) in d[i].iter().enumerate() {
                        let idx = k1 + k2;
                        if prod.len() <= idx {
                            prod.resize(idx + 1, Rat::ZERO);
                        }
                        prod[idx] = prod[idx] + *c1 * *c2;
                    }
                }
                poly_add_scaled(&mut q_new[i], &prod, Rat::ONE);
                if i == 0 {
                    poly_add_scaled(&mut p_new[0], &prod, Rat::int(-1));
                }
            }
        }
        p = p_new;
        q = q_new;
    }
    let mut a_total = PolyW::new();
    for pj in &p {
        poly_add_scaled(&mut a_total, pj, Rat::ONE);
    }
    let mut b_total = PolyW::new();
    for qj in &q {
        poly_add_scaled(&mut b_total, qj, Rat::ONE);
    }
    JSymbolic { a: a_total, b: b_total }
}

/// Even/odd split of the symmetrized even-index integral: with w = 1/(2t),
/// (J_{2λ}(t) + J_{2λ}(−t))/2 = φ1(w) sh(t) + φ2(w) ch(t).
///
/// φ2 comes out with zero coefficient at w^{2λ} (its degree drops to
/// 2λ − 2), which is the coefficient identity behind the vanishing trailing
/// term of the recursion.
pub fn phi_pair(lambda: usize) -> (Vec<Rat>, Vec<Rat>) {
    assert!(lambda >= 1);
    let js = j_symbolic(2 * lambda);
    let deg = js.a.len().max(js.b.len());
    let coeff = |p: &PolyW, k: usize| p.get(k).copied().unwrap_or(Rat::ZERO);
    let mut phi1 = vec![Rat::ZERO; deg];
    let mut phi2 = vec![Rat::ZERO; deg];
    for k in 0..deg {
        if k % 2 == 0 {
            phi2[k] = coeff(&js.a, k) + coeff(&js.b, k);
        } else {
            phi1[k] = coeff(&js.a, k) - coeff(&js.b, k);
        }
    }
    while phi1.last().is_some_and(|c| c.is_zero()) {
        phi1.pop();
    }
    while phi2.last().is_some_and(|c| c.is_zero()) {
        phi2.pop();
    }
    (phi1, phi2)
}

/// Evaluate a w-polynomial at w = 1/(2t).
pub fn eval_poly_w(poly: &[Rat], t: f64) -> f64 {
    let w = 1.0 / (2.0 * t);
    let mut acc = 0.0;
    for c in poly.iter().rev() {
        acc = acc * w + c.to_f64();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::stream_key;

    fn factorial(n: usize) -> f64 {
        (1..=n as u64).map(|k| k as f64).product::<f64>().max(1.0)
    }

    #[test]
    fn j0_and_j1_closed_forms() {
        for &t in &[-2.0, -0.5, 0.7, 1.0, 3.0] {
            assert!((j_lambda(0, t) - t.exp()).abs() < 1e-14);
            let want = t.sinh() / t;
            assert!(
                (j_lambda(1, t) - want).abs() < 1e-13 * want.abs(),
                "J1({t})"
            );
        }
    }

    #[test]
    fn j2_display() {
        // J_2(t) = e^t/(2t) − sh(t)/(2t²) = −J_1(−t)/(2t) + J_0(t)/(2t)
        for &t in &[0.5f64, 1.0, 2.5, -1.3] {
            let want = t.exp() / (2.0 * t) - t.sinh() / (2.0 * t * t);
            let also = -j_lambda(1, -t) / (2.0 * t) + j_lambda(0, t) / (2.0 * t);
            assert!((want - also).abs() < 1e-12 * want.abs().max(1.0));
            assert!((j_lambda(2, t) - want).abs() < 1e-12 * want.abs().max(1e-3));
        }
    }

    #[test]
    fn value_at_zero_is_simplex_volume() {
        for lambda in 1..=8 {
            let got = j_lambda(lambda, 0.0);
            assert!(
                (got - 1.0 / factorial(lambda)).abs() < 1e-15,
                "lambda={lambda}"
            );
        }
    }

    #[test]
    fn taylor_and_closed_agree_in_overlap() {
        for lambda in 1..=10usize {
            let th = taylor_threshold(lambda);
            for &t in &[th - 0.5, th, th + 0.5, -th] {
                if t == 0.0 {
                    continue;
                }
                let a = j_lambda_taylor(lambda, t);
                let b = j_lambda_closed(lambda, t);
                assert!(
                    (a - b).abs() < 2e-8 * a.abs().max(1e-12),
                    "lambda={lambda} t={t}: taylor {a:e} vs closed {b:e}"
                );
            }
        }
    }

    #[test]
    fn recursion_matches_quadrature() {
        // acceptance-grade cross check, λ ≤ 5, |t| ≤ 3, three sigma
        for lambda in 1..=5usize {
            for &t in &[-3.0, -1.0, 0.4, 1.7, 3.0] {
                let (q, err) = j_lambda_quadrature(
                    lambda,
                    t,
                    200_000,
                    stream_key(11, (lambda * 100) as u64),
                );
                let v = j_lambda(lambda, t);
                assert!(
                    (v - q).abs() <= 3.0 * err + 1e-12,
                    "lambda={lambda} t={t}: {v} vs {q} ± {err:.2e}"
                );
            }
        }
    }

    #[test]
    fn symbolic_tables_match_numeric() {
        for lambda in 1..=8usize {
            let js = j_symbolic(lambda);
            for &t in &[0.8f64, 1.9, 4.0] {
                let sym = t.exp() * eval_poly_w(&js.a, t) + (-t).exp() * eval_poly_w(&js.b, t);
                let num = j_lambda(lambda, t);
                assert!(
                    (sym - num).abs() < 1e-9 * num.abs().max(1e-12),
                    "lambda={lambda} t={t}"
                );
            }
        }
    }

    #[test]
    fn phi_polynomials_match_closed_displays() {
        // λ=1: φ1 = w (i.e. x/2 in x = 1/t), φ2 = 0
        let (phi1, phi2) = phi_pair(1);
        assert_eq!(phi1, vec![Rat::ZERO, Rat::ONE]);
        assert!(phi2.is_empty());
        // λ=2: φ1 = −w³ (−x³/8), φ2 = w²/2 (x²/8)
        let (phi1, phi2) = phi_pair(2);
        assert_eq!(phi1, vec![Rat::ZERO, Rat::ZERO, Rat::ZERO, Rat::int(-1)]);
        assert_eq!(phi2, vec![Rat::ZERO, Rat::ZERO, Rat::new(1, 2)]);
    }

    #[test]
    fn symmetrized_coefficient_displays() {
        // (J_2(t)+J_2(−t))/2 = sh(t)/(2t) and
        // (J_4(t)+J_4(−t))/2 = ch(t)/(8t²) − sh(t)/(8t³), to 1e−10
        for &t in &[0.5, 1.0, 2.0] {
            let s2 = 0.5 * (j_lambda_closed(2, t) + j_lambda_closed(2, -t));
            let w2 = t.sinh() / (2.0 * t);
            assert!((s2 - w2).abs() < 1e-10 * w2.abs());
            let s4 = 0.5 * (j_lambda_closed(4, t) + j_lambda_closed(4, -t));
            let w4 = t.cosh() / (8.0 * t * t) - t.sinh() / (8.0 * t * t * t);
            assert!((s4 - w4).abs() < 1e-10 * w4.abs(), "t={t}: {s4} vs {w4}");
        }
    }

    #[test]
    fn ch_component_top_coefficient_vanishes() {
        // degree of φ2 drops to 2λ−2 for λ ≤ 3
        for lambda in 1..=3usize {
            let (_, phi2) = phi_pair(lambda);
            assert!(
                phi2.len() <= 2 * lambda - 1,
                "lambda={lambda}: φ2 degree {} too high",
                phi2.len().saturating_sub(1)
            );
        }
    }

    #[test]
    fn quadrature_matches_symmetrized_display() {
        // ∫ ch[t(1−2Σ(−1)^γ μ_γ)] over the 2-simplex = (J_2(t)+J_2(−t))/2
        let t = 1.0;
        let (v, err) = crate::simplex::simplex_integrate(
            |p: &SimplexPoint| {
                let alt = -p.mu[0] + p.mu[1];
                (t * (1.0 - 2.0 * alt)).cosh()
            },
            2,
            200_000,
            stream_key(5, 77),
        );
        let want = t.sinh() / (2.0 * t);
        assert!((v - want).abs() < 4.0 * err, "{v} vs {want}");
    }
}
