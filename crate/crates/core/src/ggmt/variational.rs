use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{adaptive_integrate, adaptive_integrate_pieces, gamma};

/// `μ(p) = (4α+1)^{(2p−1)/(2p)} · p/(p−1) · ((p−1)Γ(p)²/Γ(2p))^{1/p}`.
pub fn mu(p: f64, alpha: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::invalid(format!("mu needs p > 1, got {p}")));
    }
    if !(alpha > -0.25) || !alpha.is_finite() {
        return Err(Error::invalid(format!(
            "mu needs alpha > -1/4, got {alpha}"
        )));
    }
    let g = gamma(p)?;
    let inner = (p - 1.0) * g * g / gamma(2.0 * p)?;
    Ok((4.0 * alpha + 1.0).powf((2.0 * p - 1.0) / (2.0 * p)) * p / (p - 1.0) * inner.powf(1.0 / p))
}

/// `∫(φ'² + ¼φ²) / (∫|φ|^{2p/(p−1)})^{(p−1)/p}` over the real line.
pub fn rayleigh_quotient(
    p: f64,
    phi: impl Fn(f64) -> f64,
    dphi: impl Fn(f64) -> f64,
) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::invalid(format!("quotient needs p > 1, got {p}")));
    }
    let q = 2.0 * p / (p - 1.0);
    let both = |g: &dyn Fn(f64) -> f64| -> Result<f64> {
        let right = adaptive_integrate(g, 0.0, f64::INFINITY, 1e-11)?.value;
        let left = adaptive_integrate(|x| g(-x), 0.0, f64::INFINITY, 1e-11)?.value;
        Ok(left + right)
    };
    let energy = both(&|x| {
        let (f, df) = (phi(x), dphi(x));
        df * df + 0.25 * f * f
    })?;
    let mass = both(&|x| phi(x).abs().powf(q))?;
    Ok(energy / mass.powf((p - 1.0) / p))
}

/// `sech^{p−1}(x/(2(p−1)))` and its derivative.
pub fn sech_trial(p: f64) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let k = 2.0 * (p - 1.0);
    let phi = move |x: f64| (1.0 / (x / k).cosh()).powf(p - 1.0);
    let dphi = move |x: f64| {
        let y = x / k;
        -0.5 * (1.0 / y.cosh()).powf(p - 1.0) * y.tanh()
    };
    (phi, dphi)
}

/// Rayleigh quotient at the sech trial function; equals `μ(p, 0)`.
pub fn variational_mu_oracle(p: f64) -> Result<f64> {
    let (phi, dphi) = sech_trial(p);
    rayleigh_quotient(p, phi, dphi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TheoremVerdict {
    pub lhs: f64,
    pub lhs_error_bound: f64,
    pub rhs: f64,
    pub passes: bool,
    /// Conclusions that hold when the criterion passes.
    pub conclusions: Vec<String>,
}

/// Check `∫ρ^{2p−1} V_−^p < (4α+1)^{(2p−1)/2} p^p Γ(p)² / ((p−1)^{p−1} Γ(2p))`
/// for the operator `−u'' + α/ρ² u − V_− u`. `breaks` lists kinks of
/// `v_minus` and must start at 0; the last entry is the upper limit, which
/// may be infinite.
pub fn theorem_verdict(
    alpha: f64,
    v_minus: impl Fn(f64) -> f64,
    p: f64,
    breaks: &[f64],
) -> Result<TheoremVerdict> {
    if !(p > 1.0) || !(alpha > -0.25) {
        return Err(Error::invalid(format!(
            "need p > 1 and alpha > -1/4 (p={p}, alpha={alpha})"
        )));
    }
    if breaks.len() < 2 || breaks[0] != 0.0 {
        return Err(Error::invalid(
            "break points must start at 0 and end at the upper limit",
        ));
    }
    let odd = 2.0 * p - 1.0;
    let integrand = |r: f64| {
        let v = v_minus(r);
        if v == 0.0 {
            0.0
        } else {
            r.powf(odd) * v.abs().powf(p)
        }
    };
    let last = *breaks.last().unwrap();
    let lhs = if last.is_infinite() {
        let finite = &breaks[..breaks.len() - 1];
        let head = if finite.len() >= 2 {
            let r = adaptive_integrate_pieces(&integrand, finite, 1e-12)?;
            (r.value, r.error_bound)
        } else {
            (0.0, 0.0)
        };
        let tail = adaptive_integrate(&integrand, finite[finite.len() - 1], f64::INFINITY, 1e-12)?;
        (head.0 + tail.value, head.1 + tail.error_bound)
    } else {
        let r = adaptive_integrate_pieces(&integrand, breaks, 1e-12)?;
        (r.value, r.error_bound)
    };
    let g = gamma(p)?;
    let rhs = (4.0 * alpha + 1.0).powf(odd / 2.0) * p.powf(p) * g * g
        / ((p - 1.0).powf(p - 1.0) * gamma(2.0 * p)?);
    let passes = lhs.0 < rhs;
    let conclusions = if passes {
        vec![
            "spectrum contained in [0, +inf)".to_string(),
            "zero is not an eigenvalue".to_string(),
        ]
    } else {
        Vec::new()
    };
    Ok(TheoremVerdict {
        lhs: lhs.0,
        lhs_error_bound: lhs.1,
        rhs,
        passes,
        conclusions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ggmt::{ggmt_constant, positivity_threshold, q_minus};
    use crate::model::make_dimension;

    #[test]
    fn mu_closed_form_at_four() {
        let m = mu(4.0, 0.0).unwrap();
        let expect = 4.0 / 3.0 * (108.0f64 / 5040.0).powf(0.25);
        assert!((m - expect).abs() < 1e-14);
        assert!((m - 0.51012).abs() < 5e-5);
    }

    #[test]
    fn sech_trial_attains_mu() {
        for p in [2.0, 3.0, 4.0, 6.0] {
            let v = variational_mu_oracle(p).unwrap();
            assert!((v - mu(p, 0.0).unwrap()).abs() < 1e-6, "p={p}: {v}");
        }
    }

    #[test]
    fn perturbed_trial_is_worse() {
        for p in [2.0, 4.0] {
            let (phi, dphi) = sech_trial(p);
            let bump = |x: f64| 1.0 + 0.1 * x * (-x * x).exp();
            let dbump = |x: f64| 0.1 * (1.0 - 2.0 * x * x) * (-x * x).exp();
            let q = rayleigh_quotient(
                p,
                |x| phi(x) * bump(x),
                |x| dphi(x) * bump(x) + phi(x) * dbump(x),
            )
            .unwrap();
            assert!(q > mu(p, 0.0).unwrap());
        }
    }

    #[test]
    fn constant_is_reciprocal_of_mu_power() {
        for n in 3..=12i64 {
            for p in [2.0, 3.0, 4.0, 5.5, 6.0] {
                let alpha = ((n * n - 1) as f64) / 4.0;
                let prod = ggmt_constant(n, p).unwrap() * mu(p, alpha).unwrap().powf(p);
                assert!((prod - 1.0).abs() < 1e-12, "n={n} p={p}: {prod}");
            }
        }
        let m4 = mu(4.0, 63.0 / 4.0).unwrap().powi(4);
        assert!((m4 - 8f64.powi(9) / 945.0).abs() < 1e-12 * m4);
    }

    #[test]
    fn verdict_cases() {
        let zero = theorem_verdict(2.0, |_| 0.0, 4.0, &[0.0, f64::INFINITY]).unwrap();
        assert!(zero.passes && zero.lhs == 0.0);
        assert!(zero
            .conclusions
            .iter()
            .any(|c| c.contains("zero is not an eigenvalue")));

        let dim = make_dimension(6).unwrap();
        let r = positivity_threshold(&dim).unwrap();
        let alpha = 63.0 / 4.0;
        let ok = theorem_verdict(alpha, |x| q_minus(&dim, x), 4.0, &[0.0, r]).unwrap();
        assert!(ok.passes);
        let big = theorem_verdict(alpha, |x| 50.0 * q_minus(&dim, x), 4.0, &[0.0, r]).unwrap();
        assert!(!big.passes);
        // shrinking the potential never flips a pass
        for c in [0.9, 0.5, 0.1] {
            assert!(
                theorem_verdict(alpha, |x| c * q_minus(&dim, x), 4.0, &[0.0, r])
                    .unwrap()
                    .passes
            );
        }
    }
}
