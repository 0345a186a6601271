//! Exact partial-fraction expansion of `ρ^{2p−1} Q(ρ)^p` in `s = ρ²` and its
//! closed-form integral.
//!
//! Every quantity lives in ℚ(√m) with `m` the square-free part of `2d − 4`,
//! so the only transcendental step is one logarithm at the very end.

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::ext::ExtContext;
use super::field::{QuadExt, QuadExtRecord};
use super::{IntegralResult, QuadMethod};
use crate::error::{Error, Result};
use crate::model::Dimension;

/// `ρ · ( Σ_k poly[k] s^k + Σ_i c_i / (a s + b)^i )` with `s = ρ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalEvenFunction {
    pub m: u64,
    pub a: QuadExt,
    pub b: QuadExt,
    pub poly: Vec<QuadExt>,
    /// `(order, coefficient)`, orders strictly increasing from 1.
    pub poles: Vec<(u32, QuadExt)>,
}

type Poly = Vec<QuadExt>;

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(QuadExt::is_zero) {
        p.pop();
    }
    p
}

fn poly_add(p: &[QuadExt], q: &[QuadExt], m: u64) -> Poly {
    let len = p.len().max(q.len());
    let zero = QuadExt::zero(m);
    let out = (0..len)
        .map(|k| p.get(k).unwrap_or(&zero) + q.get(k).unwrap_or(&zero))
        .collect();
    trim(out)
}

fn poly_mul(p: &[QuadExt], q: &[QuadExt], m: u64) -> Poly {
    let mut out = vec![QuadExt::zero(m); p.len() + q.len() - 1];
    for (i, pi) in p.iter().enumerate() {
        if pi.is_zero() {
            continue;
        }
        for (j, qj) in q.iter().enumerate() {
            out[i + j] = &out[i + j] + &(pi * qj);
        }
    }
    trim(out)
}

fn poly_pow(p: &[QuadExt], k: u32, m: u64) -> Poly {
    let mut acc = vec![QuadExt::one(m)];
    for _ in 0..k {
        acc = poly_mul(&acc, p, m);
    }
    acc
}

/// Compose `p(c0 + c1 x)` by Horner's rule.
fn poly_compose_linear(p: &[QuadExt], c0: &QuadExt, c1: &QuadExt, m: u64) -> Poly {
    let lin = vec![c0.clone(), c1.clone()];
    let mut acc = vec![QuadExt::zero(m)];
    for c in p.iter().rev() {
        acc = poly_mul(&acc, &lin, m);
        acc = poly_add(&acc, std::slice::from_ref(c), m);
    }
    acc
}

/// Numerator of `Q` in `s`: `Q(ρ) = N(s) / (a s + b)²`, coefficients low to high.
pub fn susy_numerator(dim: &Dimension) -> Vec<QuadExt> {
    let m = dim.field_m;
    let a = dim.a_exact();
    let b = dim.b_exact();
    let n = dim.n;
    let c0 = QuadExt::frac(6 - n, 4, m);
    let two = QuadExt::int(2, m);
    // α = a(2a(n−4) + b), β = b(2a(n−2) + b)
    let alpha = &a * &(&(&(&two * &a) * &QuadExt::int(n - 4, m)) + &b);
    let beta = &b * &(&(&(&two * &a) * &QuadExt::int(n - 2, m)) + &b);
    let lin = vec![b.clone(), a.clone()];
    let sq = poly_mul(&lin, &lin, m);
    let head = poly_mul(&[c0, QuadExt::frac(1, 16, m)], &sq, m);
    let tail = vec![-(&two * &beta), -(&two * &alpha)];
    poly_add(&head, &tail, m)
}

/// Decompose `ρ^{2p−1} Q(ρ)^p` for even `p`.
pub fn expand_integrand(dim: &Dimension, p: u32) -> Result<RationalEvenFunction> {
    if p == 0 || p % 2 == 1 {
        return Err(Error::invalid(format!(
            "exact expansion needs an even positive power, got p = {p}"
        )));
    }
    if !dim.b_positive() {
        return Err(Error::invalid(format!(
            "exact expansion needs b > 0 (d = {})",
            dim.d
        )));
    }
    let m = dim.field_m;
    let a = dim.a_exact();
    let b = dim.b_exact();
    let nq = susy_numerator(dim);
    let mut num = poly_pow(&nq, p, m);
    // multiply by s^{p−1}
    let mut shifted = vec![QuadExt::zero(m); (p - 1) as usize];
    shifted.append(&mut num);
    let num = shifted;

    // t = a s + b, s = (t − b)/a
    let inv_a = &QuadExt::one(m) / &a;
    let in_t = poly_compose_linear(&num, &(-(&b * &inv_a)), &inv_a, m);
    let two_p = 2 * p as usize;
    let mut poles = Vec::new();
    for (k, c) in in_t.iter().enumerate().take(two_p) {
        poles.push(((two_p - k) as u32, c.clone()));
    }
    poles.sort_by_key(|(order, _)| *order);
    let high: Poly = if in_t.len() > two_p {
        in_t[two_p..].to_vec()
    } else {
        vec![QuadExt::zero(m)]
    };
    let poly = poly_compose_linear(&high, &b, &a, m);
    Ok(RationalEvenFunction {
        m,
        a,
        b,
        poly,
        poles,
    })
}

impl RationalEvenFunction {
    /// Degrees of `s` with a nonzero polynomial coefficient.
    pub fn poly_degrees(&self) -> Vec<usize> {
        (0..self.poly.len())
            .filter(|&k| !self.poly[k].is_zero())
            .collect()
    }

    /// Pole orders with a nonzero coefficient.
    pub fn pole_orders(&self) -> Vec<u32> {
        self.poles
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| *i)
            .collect()
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let s = rho * rho;
        let poly = self
            .poly
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * s + c.to_f64());
        let t = self.a.to_f64() * s + self.b.to_f64();
        let poles: f64 = self
            .poles
            .iter()
            .map(|(i, c)| c.to_f64() / t.powi(*i as i32))
            .sum();
        rho * (poly + poles)
    }

    pub fn eval_ext(&self, ctx: &mut ExtContext, rho: &BigFloat) -> BigFloat {
        let s = ctx.mul(rho, rho);
        let mut poly = ctx.small(0);
        for c in self.poly.iter().rev() {
            let cv = c.to_ext(ctx);
            poly = ctx.add(&ctx.mul(&poly, &s), &cv);
        }
        let a = self.a.to_ext(ctx);
        let b = self.b.to_ext(ctx);
        let t = ctx.add(&ctx.mul(&a, &s), &b);
        let mut acc = poly;
        for (i, c) in &self.poles {
            let cv = c.to_ext(ctx);
            let den = ctx.powi(&t, *i);
            acc = ctx.add(&acc, &ctx.div(&cv, &den));
        }
        ctx.mul(rho, &acc)
    }
}

/// `ρ^{2p−1} Q(ρ)^p` evaluated directly from the closed form of `Q`.
pub fn direct_integrand_ext(
    dim: &Dimension,
    p: u32,
    ctx: &mut ExtContext,
    rho: &BigFloat,
) -> BigFloat {
    let nq = susy_numerator(dim);
    let s = ctx.mul(rho, rho);
    let mut num = ctx.small(0);
    for c in nq.iter().rev() {
        let cv = c.to_ext(ctx);
        num = ctx.add(&ctx.mul(&num, &s), &cv);
    }
    let a = dim.a_exact().to_ext(ctx);
    let b = dim.b_exact().to_ext(ctx);
    let t = ctx.add(&ctx.mul(&a, &s), &b);
    let q = ctx.div(&num, &ctx.mul(&t, &t));
    let qp = ctx.powi(&q, p);
    ctx.mul(&ctx.powi(rho, 2 * p - 1), &qp)
}

/// Serializable record of a closed-form integral
/// `algebraic + log_coeff · ln(log_argument)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExactCertificate {
    pub m: u64,
    pub a: QuadExtRecord,
    pub b: QuadExtRecord,
    pub poly_coeffs: Vec<QuadExtRecord>,
    pub pole_coeffs: Vec<(u32, QuadExtRecord)>,
    pub lo: String,
    pub hi: String,
    pub algebraic_part: QuadExtRecord,
    pub log_coeff: QuadExtRecord,
    pub log_argument: QuadExtRecord,
    /// Value to 40 significant digits.
    pub value_decimal: String,
    /// Relative bound on the decimal string (final rounding only).
    pub decimal_rel_error: f64,
}

const CERT_DIGITS: usize = 40;

/// Integrate `f` over `ρ ∈ [lo, hi]` in closed form.
pub fn exact_pf_integrate(
    f: &RationalEvenFunction,
    lo: &BigRational,
    hi: &BigRational,
) -> Result<IntegralResult> {
    let m = f.m;
    let zero_q = BigRational::from_integer(BigInt::from(0));
    if *lo < zero_q || lo > hi {
        return Err(Error::invalid(format!("bad interval [{lo}, {hi}]")));
    }
    if f.a.is_zero() {
        return Err(Error::invalid("pole base a·s + b needs a ≠ 0"));
    }
    let s_lo = QuadExt::rational(lo * lo, m);
    let s_hi = QuadExt::rational(hi * hi, m);
    let t_lo = &(&f.a * &s_lo) + &f.b;
    let t_hi = &(&f.a * &s_hi) + &f.b;
    if t_lo.signum() <= 0 || t_hi.signum() <= 0 {
        return Err(Error::invalid("a·s + b must stay positive on the interval"));
    }

    let two_a = &QuadExt::int(2, m) * &f.a;
    let mut algebraic = QuadExt::zero(m);
    for (k, c) in f.poly.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = (k + 1) as u32;
        let diff = &s_hi.pow(e) - &s_lo.pow(e);
        let scale = QuadExt::frac(1, 2 * e as i64, m);
        algebraic = &algebraic + &(&(c * &diff) * &scale);
    }
    let mut log_coeff = QuadExt::zero(m);
    for (i, c) in &f.poles {
        if c.is_zero() {
            continue;
        }
        if *i == 1 {
            log_coeff = &log_coeff + &(c / &two_a);
            continue;
        }
        // ∫ ρ (a s + b)^{−i} dρ = (a s + b)^{1−i} / (2a(1−i))
        let e = i - 1;
        let one = QuadExt::one(m);
        let diff = &(&one / &t_hi.pow(e)) - &(&one / &t_lo.pow(e));
        let den = &two_a * &QuadExt::int(-(e as i64), m);
        algebraic = &algebraic + &(&(c * &diff) / &den);
    }
    let log_argument = &t_hi / &t_lo;

    let mut ctx = ExtContext::default();
    let alg = algebraic.to_ext(&mut ctx);
    let value_ext = if log_coeff.is_zero() {
        alg
    } else {
        let arg = log_argument.to_ext(&mut ctx);
        let ln = ctx.ln(&arg);
        let lc = log_coeff.to_ext(&mut ctx);
        ctx.add(&alg, &ctx.mul(&lc, &ln))
    };
    let value = ctx.to_f64(&value_ext);
    let value_decimal = ctx.to_decimal(&value_ext, CERT_DIGITS);

    let cert = ExactCertificate {
        m,
        a: (&f.a).into(),
        b: (&f.b).into(),
        poly_coeffs: f.poly.iter().map(QuadExtRecord::from).collect(),
        pole_coeffs: f.poles.iter().map(|(i, c)| (*i, c.into())).collect(),
        lo: lo.to_string(),
        hi: hi.to_string(),
        algebraic_part: (&algebraic).into(),
        log_coeff: (&log_coeff).into(),
        log_argument: (&log_argument).into(),
        value_decimal,
        decimal_rel_error: 10f64.powi(1 - CERT_DIGITS as i32),
    };
    Ok(IntegralResult {
        value,
        // the double is the correctly rounded image of the extended value
        error_bound: value.abs() * f64::EPSILON * 0.5,
        method: QuadMethod::ExactPf,
        exact_form: Some(cert),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_dimension;
    use crate::quad::adaptive_integrate;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn dim_for_n(n: i64) -> Dimension {
        make_dimension(n - 2).unwrap()
    }

    #[test]
    fn polynomial_only_input() {
        let f = RationalEvenFunction {
            m: 2,
            a: QuadExt::int(1, 2),
            b: QuadExt::int(1, 2),
            poly: vec![QuadExt::int(1, 2)],
            poles: vec![],
        };
        let r = exact_pf_integrate(&f, &rat(0, 1), &rat(1, 1)).unwrap();
        assert_eq!(r.value, 0.5);
    }

    #[test]
    fn single_simple_pole() {
        let f = RationalEvenFunction {
            m: 2,
            a: QuadExt::int(1, 2),
            b: QuadExt::int(1, 2),
            poly: vec![QuadExt::zero(2)],
            poles: vec![(1, QuadExt::int(1, 2))],
        };
        let r = exact_pf_integrate(&f, &rat(0, 1), &rat(1, 1)).unwrap();
        assert!((r.value - 0.5 * std::f64::consts::LN_2).abs() < 1e-16);
    }

    #[test]
    fn double_pole_matches_hand_antiderivative() {
        // ∫₀¹ ρ/(ρ²+1)² dρ = 1/4
        let f = RationalEvenFunction {
            m: 3,
            a: QuadExt::int(1, 3),
            b: QuadExt::int(1, 3),
            poly: vec![QuadExt::zero(3)],
            poles: vec![(2, QuadExt::int(1, 3))],
        };
        let r = exact_pf_integrate(&f, &rat(0, 1), &rat(1, 1)).unwrap();
        assert!((r.value - 0.25).abs() < 1e-16);
    }

    #[test]
    fn structure_for_n8_p4() {
        let f = expand_integrand(&dim_for_n(8), 4).unwrap();
        assert_eq!(f.pole_orders(), (1..=8).collect::<Vec<_>>());
        assert_eq!(f.poly_degrees(), (0..=7).collect::<Vec<_>>());
        assert_eq!(f.m, 2);
    }

    #[test]
    fn rejects_odd_power_and_nonpositive_b() {
        assert!(expand_integrand(&dim_for_n(8), 3).is_err());
        assert!(expand_integrand(&make_dimension(10).unwrap(), 4).is_err());
    }

    #[test]
    fn reconstruction_at_two() {
        let dim = dim_for_n(8);
        let f = expand_integrand(&dim, 4).unwrap();
        let mut ctx = ExtContext::default();
        let rho = ctx.small(2);
        let lhs = f.eval_ext(&mut ctx, &rho);
        let rhs = direct_integrand_ext(&dim, 4, &mut ctx, &rho);
        let l = ctx.to_f64(&lhs);
        let r = ctx.to_f64(&rhs);
        assert!((l - r).abs() <= 1e-10 * r.abs(), "{l} vs {r}");
    }

    #[test]
    fn reconstruction_on_random_points_for_all_pairs() {
        let mut ctx = ExtContext::default();
        for (n, p) in [(8, 4), (9, 4), (10, 6), (11, 6)] {
            let dim = dim_for_n(n);
            let f = expand_integrand(&dim, p).unwrap();
            // deterministic pseudo-random points in [0.1, 10]
            let mut x: u64 = 0x9e37_79b9_7f4a_7c15 ^ n as u64;
            for _ in 0..50 {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                let u = (x >> 11) as f64 / (1u64 << 53) as f64;
                let rho = ctx.f64(0.1 + 9.9 * u);
                let l = f.eval_ext(&mut ctx, &rho);
                let r = direct_integrand_ext(&dim, p, &mut ctx, &rho);
                let diff = ctx.sub(&l, &r);
                let (dv, rv) = (ctx.to_f64(&diff), ctx.to_f64(&r));
                assert!(dv.abs() <= 1e-10 * rv.abs(), "n={n} p={p}");
            }
        }
    }

    #[test]
    fn exact_and_adaptive_agree_on_bound_integral() {
        let dim = dim_for_n(8);
        let f = expand_integrand(&dim, 4).unwrap();
        let exact = exact_pf_integrate(&f, &rat(0, 1), &rat(47, 10)).unwrap();
        let direct = adaptive_integrate(
            |r| {
                let q = crate::model::susy_q(&dim, r);
                r.powi(7) * q.powi(4)
            },
            0.0,
            4.7,
            1e-12,
        )
        .unwrap();
        assert!((exact.value - direct.value).abs() <= direct.error_bound.max(1e-10 * exact.value));
        assert!((exact.value - direct.value).abs() <= 1e-10 * exact.value);
    }

    #[test]
    fn certificate_round_trips_through_json() {
        let f = expand_integrand(&dim_for_n(9), 4).unwrap();
        let r = exact_pf_integrate(&f, &rat(0, 1), &rat(5, 1)).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: IntegralResult = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let cert = r.exact_form.unwrap();
        let alg = cert.algebraic_part.parse(cert.m).unwrap();
        assert!(alg.to_f64().is_finite());
    }
}
