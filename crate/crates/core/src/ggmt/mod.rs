//! Integral criterion for the absence of non-positive spectrum of the
//! partner operator: the negative part of `Q`, its last zero, the bound
//! `B(n, p)` and the general `(α, V, p)` form of the criterion.

mod variational;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{make_dimension, susy_q, Dimension};
use crate::quad::{
    adaptive_integrate_pieces, exact_pf_integrate, expand_integrand, gamma, IntegralResult,
};

pub use variational::{
    mu, rayleigh_quotient, sech_trial, theorem_verdict, variational_mu_oracle, TheoremVerdict,
};

/// Relative tolerance for the adaptive pathways.
pub const GGMT_REL_TOL: f64 = 1e-12;

/// Radius beyond which `Q` is never searched for a zero.
pub const SCAN_LIMIT: f64 = 100.0;

/// `min{Q(ρ), 0}`.
pub fn q_minus(dim: &Dimension, rho: f64) -> f64 {
    susy_q(dim, rho).min(0.0)
}

/// All zeros of `Q` in `(0, SCAN_LIMIT)`, ascending, by scan plus bisection.
pub fn q_zeros(dim: &Dimension) -> Vec<f64> {
    let steps = 20_000;
    let h = SCAN_LIMIT / steps as f64;
    let f = |r: f64| susy_q(dim, r);
    let mut zeros = Vec::new();
    let mut lo = h * 1e-3;
    let mut flo = f(lo);
    for i in 1..=steps {
        let hi = i as f64 * h;
        let fhi = f(hi);
        if flo == 0.0 {
            zeros.push(lo);
        } else if flo.signum() != fhi.signum() && fhi != 0.0 {
            zeros.push(bisect(&f, lo, hi));
        }
        lo = hi;
        flo = fhi;
    }
    zeros
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let slo = f(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() < f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Largest zero `ρ*` of `Q`; `Q > 0` on `(ρ*, ∞)`.
pub fn positivity_threshold(dim: &Dimension) -> Result<f64> {
    if !dim.b_positive() {
        return Err(Error::invalid(format!(
            "threshold needs b > 0 (d = {})",
            dim.d
        )));
    }
    let zeros = q_zeros(dim);
    let Some(&rho) = zeros.last() else {
        return Err(Error::NoSignChange(SCAN_LIMIT));
    };
    // the numerator of Q in s has positive leading coefficient a²/16, so
    // nothing changes sign past the last zero
    if susy_q(dim, SCAN_LIMIT) <= 0.0 || dim.a <= 0.0 {
        return Err(Error::NoSignChange(SCAN_LIMIT));
    }
    if susy_q(dim, rho).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "bisection stalled: Q({rho}) = {:e}",
            susy_q(dim, rho)
        )));
    }
    Ok(rho)
}

/// `(p−1)^{p−1} Γ(2p) / (n^{2p−1} p^p Γ(p)²)`, with the `p → 1` limit `1/n`.
pub fn ggmt_constant(n: i64, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::invalid(format!("constant needs p >= 1, got {p}")));
    }
    if n < 1 {
        return Err(Error::invalid(format!("constant needs n >= 1, got {n}")));
    }
    let n = n as f64;
    let head = if p == 1.0 {
        1.0
    } else {
        (p - 1.0).powf(p - 1.0)
    };
    let g = gamma(p)?;
    Ok(head * gamma(2.0 * p)? / (n.powf(2.0 * p - 1.0) * p.powf(p) * g * g))
}

/// Exact rational value of the constant for integer `p ≥ 1`.
pub fn ggmt_constant_exact(n: i64, p: u32) -> BigRational {
    let big = |k: i64| BigInt::from(k);
    let fact = |k: u32| (1..=k).fold(BigInt::one(), |acc, j| acc * big(j as i64));
    let pm1 = if p == 1 {
        BigInt::one()
    } else {
        num_traits::pow(big(p as i64 - 1), (p - 1) as usize)
    };
    let num = pm1 * fact(2 * p - 1);
    let gp = fact(p - 1);
    let den = num_traits::pow(big(n), (2 * p - 1) as usize)
        * num_traits::pow(big(p as i64), p as usize)
        * &gp
        * &gp;
    BigRational::new(num, den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Pathway {
    /// `ρ^{2p−1}|Q|^p` up to the threshold rounded up to one decimal.
    PaperOverestimate,
    /// `ρ^{2p−1}|Q_−|^p` up to the exact threshold.
    TightQminus,
    /// Same integral as the overestimate, in closed form.
    ExactCertificate,
}

impl Pathway {
    pub const ALL: [Pathway; 3] = [
        Pathway::PaperOverestimate,
        Pathway::TightQminus,
        Pathway::ExactCertificate,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GgmtReport {
    pub n: i64,
    pub p: f64,
    pub alpha: f64,
    pub rho_star: f64,
    /// Upper integration limit actually used.
    pub cutoff: f64,
    /// The cutoff as an exact fraction when it is rational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_exact: Option<String>,
    pub integral: IntegralResult,
    pub constant: f64,
    #[serde(rename = "B")]
    pub b_value: f64,
    #[serde(rename = "BErrorBound")]
    pub b_error_bound: f64,
    pub passes: bool,
    pub pathway: Pathway,
}

/// Threshold rounded up to the next tenth, as an exact fraction.
pub fn decimal_cutoff(rho_star: f64) -> BigRational {
    let tenths = (rho_star * 10.0).ceil() as i64;
    BigRational::new(BigInt::from(tenths), BigInt::from(10))
}

/// Evaluate the bound for `dim` with exponent `p` along one pathway.
pub fn compute_b(dim: &Dimension, p: f64, pathway: Pathway) -> Result<GgmtReport> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::invalid(format!("need p >= 1, got {p}")));
    }
    let rho_star = positivity_threshold(dim)?;
    let zeros = q_zeros(dim);
    let n = dim.n;
    let constant = ggmt_constant(n, p)?;
    let pow = |q: f64| q.abs().powf(p);
    let odd = 2.0 * p - 1.0;

    let (integral, cutoff, cutoff_exact) = match pathway {
        Pathway::PaperOverestimate | Pathway::ExactCertificate => {
            let cut = decimal_cutoff(rho_star);
            let cut_f = cut.to_f64().unwrap_or(f64::NAN);
            let integral = if pathway == Pathway::ExactCertificate {
                if p.fract() != 0.0 {
                    return Err(Error::invalid(format!(
                        "closed-form pathway needs an even integer p, got {p}"
                    )));
                }
                let f = expand_integrand(dim, p as u32)?;
                exact_pf_integrate(&f, &BigRational::from_integer(BigInt::from(0)), &cut)?
            } else {
                let mut pts = vec![0.0];
                pts.extend(zeros.iter().copied().filter(|&z| z < cut_f));
                pts.push(cut_f);
                adaptive_integrate_pieces(
                    |r| r.powf(odd) * pow(susy_q(dim, r)),
                    &pts,
                    GGMT_REL_TOL,
                )?
            };
            (integral, cut_f, Some(cut.to_string()))
        }
        Pathway::TightQminus => {
            let mut pts = vec![0.0];
            pts.extend(zeros.iter().copied());
            let integral = adaptive_integrate_pieces(
                |r| r.powf(odd) * pow(q_minus(dim, r)),
                &pts,
                GGMT_REL_TOL,
            )?;
            (integral, rho_star, None)
        }
    };
    let b_value = constant * integral.value;
    Ok(GgmtReport {
        n,
        p,
        alpha: ((n * n - 1) as f64) / 4.0,
        rho_star,
        cutoff,
        cutoff_exact,
        b_error_bound: constant * integral.error_bound,
        integral,
        constant,
        b_value,
        passes: b_value < 1.0,
        pathway,
    })
}

/// The four `(n, p)` pairs for which the bound is claimed.
pub const CLAIMED_PAIRS: [(i64, u32); 4] = [(8, 4), (9, 4), (10, 6), (11, 6)];

/// All pathways for all claimed pairs, in a fixed order.
pub fn claimed_reports() -> Result<Vec<GgmtReport>> {
    let jobs: Vec<(i64, u32, Pathway)> = CLAIMED_PAIRS
        .iter()
        .flat_map(|&(n, p)| Pathway::ALL.iter().map(move |&w| (n, p, w)))
        .collect();
    jobs.par_iter()
        .map(|&(n, p, w)| compute_b(&make_dimension(n - 2)?, p as f64, w))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PScan {
    pub n: i64,
    pub reports: Vec<GgmtReport>,
    /// Exponent with the smallest bound.
    pub best_p: f64,
    #[serde(rename = "bestB")]
    pub best_b: f64,
}

/// Sweep integer `p ∈ [lo, hi]` with the sharp pathway.
pub fn scan_p(dim: &Dimension, lo: u32, hi: u32) -> Result<PScan> {
    if lo < 1 || hi < lo {
        return Err(Error::invalid(format!("bad p range {lo}..{hi}")));
    }
    let reports: Vec<GgmtReport> = (lo..=hi)
        .into_par_iter()
        .map(|p| compute_b(dim, p as f64, Pathway::TightQminus))
        .collect::<Result<_>>()?;
    let best = reports
        .iter()
        .min_by(|x, y| x.b_value.total_cmp(&y.b_value))
        .expect("non-empty range");
    Ok(PScan {
        n: dim.n,
        best_p: best.p,
        best_b: best.b_value,
        reports,
    })
}
