//! Closed-form constants, profiles, potentials, the half-line transform, the
//! nonlinearity and grid norms.

mod grid;
mod norms;
mod profile;
mod residual;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, squarefree_decompose, ExtContext, QuadExt};

pub use grid::{GridFunction, RadialGrid};
pub use norms::{norms, sigma_inner, sigma_norm, x_proxy, Norms, X_PROXY_MIN_NODES};
pub use profile::{
    eval_profile, free_q, g_tilde, g_tilde_derivatives, log_g_tilde_dd, potential_v, susy_q,
    susy_total, w_derivatives, weinkove, ProfileKind,
};
pub use residual::{
    halfline_factor, halfline_transform, nonlinearity, stationary_residual,
    stationary_residual_exact, stationary_residual_pointwise, stationary_residual_sampled,
    Direction, NonlinearForm,
};

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Model constants for one spatial dimension `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Dimension {
    pub d: i64,
    pub n: i64,
    pub a: f64,
    pub b: f64,
    /// `b` from the `n`-form `n(3 − ½√(2n−8)) − 12`.
    pub b_nform: f64,
    /// Relative gap between the two forms of `b`, in extended precision.
    pub b_forms_rel_diff: f64,
    pub kappa0: u32,
    pub kappa1: u32,
    /// `√(2d−4) = sqrt_coeff · √field_m`, `field_m` square-free.
    pub sqrt_coeff: u64,
    pub field_m: u64,
    /// `‖(a|x|²+b)^{−2}‖` in the Gaussian-weighted space; absent when b ≤ 0.
    pub g_norm: Option<f64>,
}

impl Dimension {
    /// `a = √(2d−4)/4` in ℚ(√m).
    pub fn a_exact(&self) -> QuadExt {
        let m = self.field_m;
        QuadExt::new(BigRational::zero(), ratio(self.sqrt_coeff as i64, 4), m)
    }

    /// `b = 3(d−2) − (d+2)√(2d−4)/2` in ℚ(√m).
    pub fn b_exact(&self) -> QuadExt {
        let m = self.field_m;
        QuadExt::new(
            ratio(3 * (self.d - 2), 1),
            ratio(-(self.d + 2) * self.sqrt_coeff as i64, 2),
            m,
        )
    }

    /// Exact sign test; `false` flags the degenerate `d ≥ 10` range.
    pub fn b_positive(&self) -> bool {
        self.b_exact().signum() > 0
    }

    /// Whether the dimension lies in the range covered by the dynamics.
    pub fn in_dynamic_range(&self) -> bool {
        (5..=9).contains(&self.d)
    }

    pub fn sphere_area(&self) -> f64 {
        quad::unit_sphere_area(self.n as u32)
    }

    pub fn g_norm_checked(&self) -> Result<f64> {
        self.g_norm.ok_or_else(|| {
            Error::invalid(format!(
                "unstable mode undefined for d = {} (b ≤ 0)",
                self.d
            ))
        })
    }
}

/// Build all constants for dimension `d ≥ 3`.
pub fn make_dimension(d: i64) -> Result<Dimension> {
    if d < 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    let n = d + 2;
    let (c, m) = squarefree_decompose((2 * d - 4) as u64);
    let kappa0 = if n % 2 == 1 { (n - 3) / 2 } else { (n - 2) / 2 } as u32;

    let mut dim = Dimension {
        d,
        n,
        a: 0.0,
        b: 0.0,
        b_nform: 0.0,
        b_forms_rel_diff: 0.0,
        kappa0,
        kappa1: kappa0 + 2,
        sqrt_coeff: c,
        field_m: m,
        g_norm: None,
    };

    let mut ctx = ExtContext::new(256);
    let a = dim.a_exact().to_ext(&mut ctx);
    let b = dim.b_exact().to_ext(&mut ctx);
    // n(3 − ½√(2n−8)) − 12, evaluated independently of the field representation
    let root = ctx.sqrt(&ctx.small(2 * n - 8));
    let half_root = ctx.div(&root, &ctx.small(2));
    let inner = ctx.sub(&ctx.small(3), &half_root);
    let bn = ctx.sub(&ctx.mul(&ctx.small(n), &inner), &ctx.small(12));
    dim.a = ctx.to_f64(&a);
    dim.b = if dim.b_exact().is_zero() {
        0.0
    } else {
        ctx.to_f64(&b)
    };
    dim.b_nform = ctx.to_f64(&bn);
    let gap = ctx.sub(&b, &bn);
    dim.b_forms_rel_diff = if b.is_zero() {
        ctx.to_f64(&gap).abs()
    } else {
        (ctx.to_f64(&gap) / dim.b).abs()
    };

    if dim.b_positive() {
        let (a, b) = (dim.a, dim.b);
        let area = dim.sphere_area();
        let r = quad::adaptive_integrate(
            |rho: f64| {
                let t = a * rho * rho + b;
                rho.powi(n as i32 - 1) * (-rho * rho / 4.0).exp() / t.powi(4)
            },
            0.0,
            f64::INFINITY,
            1e-13,
        )?;
        dim.g_norm = Some((area * r.value).sqrt());
    }
    Ok(dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d5_constants() {
        let dim = make_dimension(5).unwrap();
        assert_eq!(dim.n, 7);
        // a = √6/4, b = 9 − 7√6/2, evaluated independently
        let a = 6f64.sqrt() / 4.0;
        let b = 9.0 - 3.5 * 6f64.sqrt();
        assert!((dim.a - a).abs() < 1e-15);
        assert!((dim.b - b).abs() < 1e-14);
        assert!((dim.a - 0.612_372_4).abs() < 1e-7);
        assert!((dim.b - 0.426_785_9).abs() < 1e-7);
    }

    #[test]
    fn d10_degenerates_exactly() {
        let dim = make_dimension(10).unwrap();
        assert_eq!(dim.b, 0.0);
        assert!(dim.b_exact().is_zero());
        assert!(!dim.b_positive());
        assert!(dim.g_norm.is_none());
        assert_eq!(dim.field_m, 1);
    }

    #[test]
    fn kappas() {
        let dim = make_dimension(6).unwrap();
        assert_eq!((dim.n, dim.kappa0, dim.kappa1), (8, 3, 5));
        for d in 3..=20 {
            let dim = make_dimension(d).unwrap();
            let half = dim.n as f64 / 2.0;
            assert!((dim.kappa0 as f64) < half && half < dim.kappa1 as f64);
        }
    }

    #[test]
    fn b_forms_agree() {
        for d in 5..=9 {
            let dim = make_dimension(d).unwrap();
            assert!(dim.b > 0.0);
            assert!(dim.b_forms_rel_diff < 1e-12, "d={d}");
            assert!(((dim.b - dim.b_nform) / dim.b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_low_dimension() {
        assert!(make_dimension(2).is_err());
    }
}
