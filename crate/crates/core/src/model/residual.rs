use serde::{Deserialize, Serialize};

use super::profile::{w_derivatives, weinkove};
use super::{Dimension, GridFunction, RadialGrid};
use crate::error::{Error, Result};

/// Right-hand side of the stationary similarity equation at one point.
pub fn stationary_residual_pointwise(dim: &Dimension, rho: f64, f: f64, f1: f64, f2: f64) -> f64 {
    let d = dim.d as f64;
    f2 + ((d + 1.0) / rho) * f1 - 0.5 * rho * f1 - f + 3.0 * (d - 2.0) * f * f
        - (d - 2.0) * rho * rho * f * f * f
}

/// Residual of `W` with analytic derivatives at the grid nodes.
pub fn stationary_residual_exact(dim: &Dimension, grid: RadialGrid) -> GridFunction {
    GridFunction::sample(grid, |rho| {
        let (w, w1, w2) = w_derivatives(dim, rho);
        stationary_residual_pointwise(dim, rho, w, w1, w2)
    })
}

/// Residual of a closed-form `f` with centred differences of step `h`.
pub fn stationary_residual_sampled(
    dim: &Dimension,
    grid: RadialGrid,
    h: f64,
    f: impl Fn(f64) -> f64,
) -> GridFunction {
    GridFunction::sample(grid, |rho| {
        let (fm, f0, fp) = (f(rho - h), f(rho), f(rho + h));
        let f1 = (fp - fm) / (2.0 * h);
        let f2 = (fp - 2.0 * f0 + fm) / (h * h);
        stationary_residual_pointwise(dim, rho, f0, f1, f2)
    })
}

/// First and second derivatives of grid data: centred inside, the even
/// closure at the origin and one-sided second-order stencils at the last node.
pub(crate) fn grid_derivatives(f: &GridFunction) -> (Vec<f64>, Vec<f64>) {
    let v = &f.values;
    let n = v.len();
    let h = f.grid.h();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 0..n {
        let left = if i == 0 { f.origin_value() } else { v[i - 1] };
        if i + 1 < n {
            d1[i] = (v[i + 1] - left) / (2.0 * h);
            d2[i] = (v[i + 1] - 2.0 * v[i] + left) / (h * h);
        } else {
            d1[i] = (3.0 * v[i] - 4.0 * v[i - 1] + v[i - 2]) / (2.0 * h);
            d2[i] = (2.0 * v[i] - 5.0 * v[i - 1] + 4.0 * v[i - 2] - v[i - 3]) / (h * h);
        }
    }
    (d1, d2)
}

/// Residual of grid data with finite differences.
pub fn stationary_residual(dim: &Dimension, f: &GridFunction) -> Result<GridFunction> {
    if f.values.len() < 4 {
        return Err(Error::invalid(
            "finite-difference residual needs at least 4 nodes",
        ));
    }
    let (d1, d2) = grid_derivatives(f);
    let h = f.grid.h();
    let values = (0..f.values.len())
        .map(|i| stationary_residual_pointwise(dim, (i + 1) as f64 * h, f.values[i], d1[i], d2[i]))
        .collect();
    GridFunction::new(f.grid, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ToHalfline,
    FromHalfline,
}

/// `|S^{n−1}|^{1/2} ρ^{(n−1)/2} e^{−ρ²/8}`.
pub fn halfline_factor(dim: &Dimension, rho: f64) -> f64 {
    let e = 0.5 * (dim.n - 1) as f64;
    dim.sphere_area().sqrt() * (e * rho.ln() - rho * rho / 8.0).exp()
}

pub fn halfline_transform(
    dim: &Dimension,
    f: &GridFunction,
    direction: Direction,
) -> Result<GridFunction> {
    let grid = f.grid;
    match direction {
        Direction::ToHalfline => GridFunction::new(
            grid,
            f.values
                .iter()
                .enumerate()
                .map(|(i, v)| v * halfline_factor(dim, grid.rho(i + 1)))
                .collect(),
        ),
        Direction::FromHalfline => {
            if grid.h() < 1e-8 {
                return Err(Error::invalid(format!(
                    "first node {} too close to the origin for the inverse transform",
                    grid.h()
                )));
            }
            let last = halfline_factor(dim, grid.rho(grid.nodes));
            if !last.is_normal() {
                return Err(Error::invalid(format!(
                    "weight underflows at ρ = {}; shrink the grid",
                    grid.r_max
                )));
            }
            GridFunction::new(
                grid,
                f.values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v / halfline_factor(dim, grid.rho(i + 1)))
                    .collect(),
            )
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearForm {
    /// `N(φ)` for `ψ = W + φ`.
    Perturbation,
    /// `3(d−2)ψ² − (d−2)ρ²ψ³`.
    Absolute,
}

#[inline]
pub(crate) fn nonlinear_absolute(d: f64, rho: f64, f: f64) -> f64 {
    (d - 2.0) * f * f * (3.0 - rho * rho * f)
}

#[inline]
pub(crate) fn nonlinear_perturbation(d: f64, rho: f64, w: f64, f: f64) -> f64 {
    let s = rho * rho;
    (d - 2.0) * f * f * (3.0 - 3.0 * s * w - s * f)
}

pub fn nonlinearity(dim: &Dimension, f: &GridFunction, form: NonlinearForm) -> GridFunction {
    let d = dim.d as f64;
    match form {
        NonlinearForm::Absolute => f.map(|rho, v| nonlinear_absolute(d, rho, v)),
        NonlinearForm::Perturbation => {
            f.map(|rho, v| nonlinear_perturbation(d, rho, weinkove(dim, rho), v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_dimension, potential_v, ProfileKind};

    #[test]
    fn weinkove_profile_is_stationary() {
        let grid = RadialGrid::new(30.0, 3000).unwrap();
        for d in 5..=9 {
            let dim = make_dimension(d).unwrap();
            let r = stationary_residual_exact(&dim, grid);
            assert!(r.sup() <= 1e-10, "d={d}: {}", r.sup());
        }
    }

    #[test]
    fn zero_is_stationary() {
        let dim = make_dimension(6).unwrap();
        let grid = RadialGrid::new(10.0, 100).unwrap();
        let r = stationary_residual(&dim, &GridFunction::zeros(grid)).unwrap();
        assert_eq!(r.sup(), 0.0);
    }

    #[test]
    fn centred_differences_converge_at_second_order() {
        let dim = make_dimension(5).unwrap();
        let grid = RadialGrid::new(10.0, 99).unwrap();
        let w = |r: f64| weinkove(&dim, r);
        let e1 = stationary_residual_sampled(&dim, grid, 1e-2, w).sup();
        let e2 = stationary_residual_sampled(&dim, grid, 1e-3, w).sup();
        let order = (e1 / e2).log10();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
        // the grid-data variant with the even closure behaves the same way
        let c1 = stationary_residual(
            &dim,
            &GridFunction::sample(RadialGrid::new(10.0, 999).unwrap(), w),
        )
        .unwrap();
        let c2 = stationary_residual(
            &dim,
            &GridFunction::sample(RadialGrid::new(10.0, 1999).unwrap(), w),
        )
        .unwrap();
        let interior = |g: &GridFunction| {
            g.values[..g.values.len() - 5]
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()))
        };
        let ratio = interior(&c1) / interior(&c2);
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
    }

    #[test]
    fn halfline_round_trip() {
        let dim = make_dimension(6).unwrap();
        let grid = RadialGrid::new(20.0, 2000).unwrap();
        let f = GridFunction::sample(grid, |r| (1.0 + r).recip() + (0.3 * r).sin());
        let u = halfline_transform(&dim, &f, Direction::ToHalfline).unwrap();
        let back = halfline_transform(&dim, &u, Direction::FromHalfline).unwrap();
        for (x, y) in f.values.iter().zip(&back.values) {
            assert!((x - y).abs() <= 1e-13 * x.abs().max(1.0));
        }
    }

    #[test]
    fn mode_maps_to_ground_state_shape() {
        let dim = make_dimension(6).unwrap();
        let grid = RadialGrid::new(20.0, 500).unwrap();
        let g = GridFunction::try_sample(grid, |r| {
            crate::model::eval_profile(ProfileKind::GMode, &dim, r)
        })
        .unwrap();
        let u = halfline_transform(&dim, &g, Direction::ToHalfline).unwrap();
        let ratios: Vec<f64> = u
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v / crate::model::g_tilde(&dim, grid.rho(i + 1)))
            .collect();
        let r0 = ratios[0];
        assert!(ratios.iter().all(|r| ((r - r0) / r0).abs() < 1e-12));
    }

    #[test]
    fn halfline_norm_matches_weighted_norm() {
        let dim = make_dimension(6).unwrap();
        let grid = RadialGrid::new(20.0, 4000).unwrap();
        let fc = |r: f64| (-0.3 * r * r).exp() * (1.0 + r);
        let f = GridFunction::sample(grid, fc);
        let u = halfline_transform(&dim, &f, Direction::ToHalfline).unwrap();
        let plain: f64 = u.values.iter().map(|v| v * v).sum::<f64>() * grid.h();
        let weighted = crate::quad::adaptive_integrate(
            |r| r.powi(7) * (-r * r / 4.0).exp() * fc(r).powi(2),
            0.0,
            f64::INFINITY,
            1e-12,
        )
        .unwrap()
        .value
            * dim.sphere_area();
        assert!((plain - weighted).abs() < 1e-10 * weighted);
    }

    #[test]
    fn inverse_rejects_tiny_first_node() {
        let dim = make_dimension(6).unwrap();
        let grid = RadialGrid::new(1e-6, 1000).unwrap();
        let f = GridFunction::zeros(grid);
        assert!(halfline_transform(&dim, &f, Direction::FromHalfline).is_err());
    }

    #[test]
    fn nonlinearity_consistency() {
        let dim = make_dimension(7).unwrap();
        let d = dim.d as f64;
        let rhs = |rho: f64, psi: f64| nonlinear_absolute(d, rho, psi);
        let mut x: u64 = 12345;
        for _ in 0..200 {
            x = x
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let rho = (x >> 40) as f64 / (1u64 << 24) as f64 * 10.0;
            let phi = ((x & 0xffff) as f64 / 65536.0 - 0.5) * 1e-2;
            let w = weinkove(&dim, rho);
            let lhs = rhs(rho, w + phi) - rhs(rho, w) - potential_v(&dim, rho) * phi;
            let n = nonlinear_perturbation(d, rho, w, phi);
            assert!((lhs - n).abs() < 1e-11, "{lhs} vs {n}");
        }
        let grid = RadialGrid::new(10.0, 50).unwrap();
        let zero = GridFunction::zeros(grid);
        assert_eq!(
            nonlinearity(&dim, &zero, NonlinearForm::Perturbation).sup(),
            0.0
        );
        // ψ = 0: N(−W) cancels the remaining terms of W's equation
        let minus_w = GridFunction::sample(grid, |r| -weinkove(&dim, r));
        let nw = nonlinearity(&dim, &minus_w, NonlinearForm::Perturbation);
        for (i, v) in nw.values.iter().enumerate() {
            let r = grid.rho(i + 1);
            let w = weinkove(&dim, r);
            let expect = -rhs(r, w) + potential_v(&dim, r) * w;
            assert!((v - expect).abs() < 1e-12 * (1.0 + expect.abs()));
        }
    }
}
