use serde::{Deserialize, Serialize};

use super::{Dimension, GridFunction};

/// Below this node count the derivative proxy is reported as low-accuracy.
pub const X_PROXY_MIN_NODES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Norms {
    pub sup: f64,
    #[serde(rename = "sigmaL2")]
    pub sigma_l2: f64,
    pub x_proxy: f64,
    pub x_proxy_low_accuracy: bool,
}

/// Trapezoid rule for `∫₀^{ρ_N} g(ρ) ρ^{n−1} dρ` over the nodes; the origin
/// contributes nothing.
fn radial_trapezoid(n: i64, h: f64, g: impl Fn(usize) -> f64, len: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..len {
        let rho = (i + 1) as f64 * h;
        let w = if i + 1 == len { 0.5 } else { 1.0 };
        acc += w * g(i) * rho.powi(n as i32 - 1);
    }
    acc * h
}

/// `(f | g)` in the Gaussian-weighted radial space.
pub fn sigma_inner(dim: &Dimension, f: &GridFunction, g: &GridFunction) -> f64 {
    let h = f.grid.h();
    let area = dim.sphere_area();
    area * radial_trapezoid(
        dim.n,
        h,
        |i| {
            let rho = (i + 1) as f64 * h;
            f.values[i] * g.values[i] * (-rho * rho / 4.0).exp()
        },
        f.values.len().min(g.values.len()),
    )
}

pub fn sigma_norm(dim: &Dimension, f: &GridFunction) -> f64 {
    sigma_inner(dim, f, f).max(0.0).sqrt()
}

fn plain_norm(dim: &Dimension, h: f64, g: &[f64]) -> f64 {
    (dim.sphere_area() * radial_trapezoid(dim.n, h, |i| g[i] * g[i], g.len())).sqrt()
}

fn radial_derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let origin = (4.0 * v[0] - v[1]) / 3.0;
    (0..n)
        .map(|i| {
            if i + 1 < n {
                let left = if i == 0 { origin } else { v[i - 1] };
                (v[i + 1] - left) / (2.0 * h)
            } else {
                (3.0 * v[i] - 4.0 * v[i - 1] + v[i - 2]) / (2.0 * h)
            }
        })
        .collect()
}

fn radial_laplacian(v: &[f64], h: f64, n_dim: i64) -> Vec<f64> {
    let n = v.len();
    let c = (n_dim - 1) as f64;
    let origin = (4.0 * v[0] - v[1]) / 3.0;
    (0..n)
        .map(|i| {
            let rho = (i + 1) as f64 * h;
            let (d1, d2) = if i + 1 < n {
                let left = if i == 0 { origin } else { v[i - 1] };
                (
                    (v[i + 1] - left) / (2.0 * h),
                    (v[i + 1] - 2.0 * v[i] + left) / (h * h),
                )
            } else {
                (
                    (3.0 * v[i] - 4.0 * v[i - 1] + v[i - 2]) / (2.0 * h),
                    (2.0 * v[i] - 5.0 * v[i - 1] + 4.0 * v[i - 2] - v[i - 3]) / (h * h),
                )
            };
            d2 + c / rho * d1
        })
        .collect()
}

/// `D^k f`: `Δ^{k/2}` for even `k`, `∂_ρ Δ^{(k−1)/2}` for odd `k`.
fn radial_power(dim: &Dimension, f: &GridFunction, k: u32) -> Vec<f64> {
    let h = f.grid.h();
    let mut v = f.values.clone();
    for _ in 0..k / 2 {
        v = radial_laplacian(&v, h, dim.n);
    }
    if k % 2 == 1 {
        v = radial_derivative(&v, h);
    }
    v
}

/// Finite-difference stand-in for the `X`-norm built from `D^{κ0}`, `D^{κ1}`.
pub fn x_proxy(dim: &Dimension, f: &GridFunction) -> f64 {
    if f.values.len() < 4 {
        return f64::NAN;
    }
    let h = f.grid.h();
    let a = plain_norm(dim, h, &radial_power(dim, f, dim.kappa0));
    let b = plain_norm(dim, h, &radial_power(dim, f, dim.kappa1));
    (a * a + b * b).sqrt()
}

pub fn norms(dim: &Dimension, f: &GridFunction) -> Norms {
    Norms {
        sup: f.sup(),
        sigma_l2: sigma_norm(dim, f),
        x_proxy: x_proxy(dim, f),
        x_proxy_low_accuracy: f.values.len() < X_PROXY_MIN_NODES,
    }
}
