use serde::{Deserialize, Serialize};

use super::Dimension;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProfileKind {
    W,
    V,
    #[serde(rename = "qFree")]
    QFree,
    #[serde(rename = "QSusy")]
    QSusy,
    #[serde(rename = "gTilde")]
    GTilde,
    #[serde(rename = "gMode")]
    GMode,
    #[serde(rename = "sigmaWeight")]
    SigmaWeight,
}

impl ProfileKind {
    pub const ALL: [ProfileKind; 7] = [
        ProfileKind::W,
        ProfileKind::V,
        ProfileKind::QFree,
        ProfileKind::QSusy,
        ProfileKind::GTilde,
        ProfileKind::GMode,
        ProfileKind::SigmaWeight,
    ];

    /// Kinds with a centrifugal singularity at the origin.
    pub fn singular_at_origin(self) -> bool {
        matches!(self, ProfileKind::QFree | ProfileKind::QSusy)
    }
}

/// `W(ρ) = 1/(aρ² + b)`.
#[inline]
pub fn weinkove(dim: &Dimension, rho: f64) -> f64 {
    1.0 / (dim.a * rho * rho + dim.b)
}

/// `(W, W', W'')`.
pub fn w_derivatives(dim: &Dimension, rho: f64) -> (f64, f64, f64) {
    let a = dim.a;
    let t = a * rho * rho + dim.b;
    let w = 1.0 / t;
    let w1 = -2.0 * a * rho * w * w;
    let w2 = -2.0 * a * w * w + 8.0 * a * a * rho * rho * w * w * w;
    (w, w1, w2)
}

/// Potential of the linearization around `W`.
#[inline]
pub fn potential_v(dim: &Dimension, rho: f64) -> f64 {
    let s = rho * rho;
    let t = dim.b + dim.a * s;
    3.0 * (dim.n - 4) as f64 * (2.0 * dim.b + (2.0 * dim.a - 1.0) * s) / (t * t)
}

/// Half-line potential of the free operator.
#[inline]
pub fn free_q(dim: &Dimension, rho: f64) -> f64 {
    let n = dim.n as f64;
    let s = rho * rho;
    s / 16.0 + (n - 3.0) * (n - 1.0) / (4.0 * s) - (n - 4.0) / 4.0
}

/// Regular part `Q` of the partner potential.
#[inline]
pub fn susy_q(dim: &Dimension, rho: f64) -> f64 {
    let (a, b) = (dim.a, dim.b);
    let n = dim.n as f64;
    let s = rho * rho;
    let t = a * s + b;
    let num = a * (2.0 * a * (n - 4.0) + b) * s + b * (2.0 * a * (n - 2.0) + b);
    s / 16.0 - n / 4.0 + 1.5 - 2.0 * num / (t * t)
}

/// Full partner potential `(n²−1)/(4ρ²) + Q`.
#[inline]
pub fn susy_total(dim: &Dimension, rho: f64) -> f64 {
    let n = dim.n as f64;
    (n * n - 1.0) / (4.0 * rho * rho) + susy_q(dim, rho)
}

/// `ρ^{(n−1)/2} e^{−ρ²/8} (aρ²+b)^{−2}`.
pub fn g_tilde(dim: &Dimension, rho: f64) -> f64 {
    let t = dim.a * rho * rho + dim.b;
    let e = 0.5 * (dim.n - 1) as f64;
    (e * rho.ln() - rho * rho / 8.0).exp() / (t * t)
}

/// `(log g̃)''`.
pub fn log_g_tilde_dd(dim: &Dimension, rho: f64) -> f64 {
    let (a, b) = (dim.a, dim.b);
    let n = dim.n as f64;
    let s = rho * rho;
    let t = a * s + b;
    -(n - 1.0) / (2.0 * s) - 0.25 - 4.0 * a * (b - a * s) / (t * t)
}

/// `(g̃, g̃', g̃'')` from the logarithmic derivatives.
pub fn g_tilde_derivatives(dim: &Dimension, rho: f64) -> (f64, f64, f64) {
    let (a, b) = (dim.a, dim.b);
    let n = dim.n as f64;
    let t = a * rho * rho + b;
    let l1 = (n - 1.0) / (2.0 * rho) - rho / 4.0 - 4.0 * a * rho / t;
    let l2 = log_g_tilde_dd(dim, rho);
    let g = g_tilde(dim, rho);
    (g, g * l1, g * (l2 + l1 * l1))
}

pub fn eval_profile(kind: ProfileKind, dim: &Dimension, rho: f64) -> Result<f64> {
    if !rho.is_finite() {
        return Err(Error::invalid(format!("non-finite radius {rho}")));
    }
    if rho < 0.0 || (rho == 0.0 && kind.singular_at_origin()) {
        return Err(Error::invalid(format!("{kind:?} needs ρ > 0, got {rho}")));
    }
    Ok(match kind {
        ProfileKind::W => weinkove(dim, rho),
        ProfileKind::V => potential_v(dim, rho),
        ProfileKind::QFree => free_q(dim, rho),
        ProfileKind::QSusy => susy_q(dim, rho),
        ProfileKind::GTilde => {
            if rho == 0.0 {
                0.0
            } else {
                g_tilde(dim, rho)
            }
        }
        ProfileKind::GMode => {
            let t = dim.a * rho * rho + dim.b;
            1.0 / (t * t * dim.g_norm_checked()?)
        }
        ProfileKind::SigmaWeight => (-rho * rho / 4.0).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_dimension;

    fn log_space(lo: f64, hi: f64, k: usize) -> Vec<f64> {
        (0..k)
            .map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64))
            .collect()
    }

    #[test]
    fn w_at_origin() {
        let dim = make_dimension(5).unwrap();
        let w0 = eval_profile(ProfileKind::W, &dim, 0.0).unwrap();
        assert_eq!(w0, 1.0 / dim.b);
        assert!((w0 - 2.343).abs() < 1e-3);
    }

    #[test]
    fn v_identity() {
        for d in 5..=9 {
            let dim = make_dimension(d).unwrap();
            for rho in log_space(1e-3, 1e3, 100) {
                let w = weinkove(&dim, rho);
                let alt = 3.0 * (dim.n - 4) as f64 * w * (2.0 - rho * rho * w);
                let v = potential_v(&dim, rho);
                // relative to the size of the two summands, since V changes sign
                let scale = 3.0 * (dim.n - 4) as f64 * w * (2.0 + rho * rho * w);
                assert!((v - alt).abs() <= 1e-12 * scale, "d={d} ρ={rho}");
            }
        }
    }

    #[test]
    fn q_at_bound_radius() {
        let dim = make_dimension(6).unwrap();
        let q = eval_profile(ProfileKind::QSusy, &dim, 4.7).unwrap();
        assert!(q > 0.0 && (q - 0.09).abs() < 0.03, "{q}");
        let q2 = susy_q(&dim, 2.0);
        assert!((q2 + 4.17).abs() < 0.01, "{q2}");
    }

    #[test]
    fn singular_kinds_reject_origin() {
        let dim = make_dimension(6).unwrap();
        assert!(eval_profile(ProfileKind::QFree, &dim, 0.0).is_err());
        assert!(eval_profile(ProfileKind::QSusy, &dim, -1.0).is_err());
        assert!(eval_profile(ProfileKind::W, &dim, f64::NAN).is_err());
        assert!(eval_profile(ProfileKind::GMode, &make_dimension(10).unwrap(), 1.0).is_err());
    }

    #[test]
    fn g_tilde_derivatives_match_differences() {
        let dim = make_dimension(7).unwrap();
        let h = 1e-4;
        for &r in &[0.3, 1.0, 2.5, 6.0] {
            let (_, g1, g2) = g_tilde_derivatives(&dim, r);
            let fd1 = (g_tilde(&dim, r + h) - g_tilde(&dim, r - h)) / (2.0 * h);
            let fd2 =
                (g_tilde(&dim, r + h) - 2.0 * g_tilde(&dim, r) + g_tilde(&dim, r - h)) / (h * h);
            assert!((g1 - fd1).abs() < 1e-6 * (1.0 + g1.abs()));
            assert!((g2 - fd2).abs() < 1e-5 * (1.0 + g2.abs()));
        }
    }

    #[test]
    fn partner_potential_identity() {
        // q − V − 2 (log g̃)'' = (n²−1)/(4ρ²) + Q
        for d in 5..=9 {
            let dim = make_dimension(d).unwrap();
            for i in 0..400 {
                let rho = 0.1 + 19.9 * i as f64 / 399.0;
                let lhs =
                    free_q(&dim, rho) - potential_v(&dim, rho) - 2.0 * log_g_tilde_dd(&dim, rho);
                let rhs = susy_total(&dim, rho);
                assert!(
                    (lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()),
                    "d={d} ρ={rho}"
                );
            }
        }
    }
}
