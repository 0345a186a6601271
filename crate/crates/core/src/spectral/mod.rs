//! Finite-difference half-line Schrödinger operators `−u'' + U(ρ)u` with
//! Dirichlet truncation, and their lowest eigenvalues by Sturm bisection.

mod sturm;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Tridiagonal;
use crate::model::{
    free_q, g_tilde, g_tilde_derivatives, halfline_transform, potential_v, sigma_inner, susy_total,
    Dimension, Direction, GridFunction, ProfileKind, RadialGrid,
};

pub use sturm::{bisect_eigenvalue, inverse_iteration, sturm_count};

/// Which half-line potential the operator carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PotentialSpec {
    /// `q(ρ)`, the image of the free operator.
    Free,
    /// `q(ρ) − V(ρ)`, the linearization around `W` with the sign making the
    /// unstable mode the eigenvalue −1.
    Linearized,
    /// `(n²−1)/(4ρ²) + Q(ρ)`.
    Susy,
    /// No potential; a plain Dirichlet Laplacian for calibration.
    Zero,
}

pub fn potential(spec: PotentialSpec, dim: &Dimension, rho: f64) -> f64 {
    match spec {
        PotentialSpec::Free => free_q(dim, rho),
        PotentialSpec::Linearized => free_q(dim, rho) - potential_v(dim, rho),
        PotentialSpec::Susy => susy_total(dim, rho),
        PotentialSpec::Zero => 0.0,
    }
}

/// Symmetric tridiagonal matrix with a uniform off-diagonal `−1/h²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalOperator {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    pub grid: RadialGrid,
}

impl TridiagonalOperator {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn to_tridiagonal(&self) -> Tridiagonal {
        let n = self.len();
        let mut t = Tridiagonal::zeros(n);
        t.diag.copy_from_slice(&self.diag);
        for i in 0..n.saturating_sub(1) {
            t.upper[i] = self.offdiag[i];
            t.lower[i + 1] = self.offdiag[i];
        }
        t
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.offdiag[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }
}

pub fn discretize(
    dim: &Dimension,
    spec: PotentialSpec,
    grid: RadialGrid,
) -> Result<TridiagonalOperator> {
    let h = grid.h();
    let inv_h2 = 1.0 / (h * h);
    let diag: Vec<f64> = grid
        .points()
        .into_iter()
        .map(|r| 2.0 * inv_h2 + potential(spec, dim, r))
        .collect();
    if let Some(i) = diag.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!(
            "potential not finite at ρ = {}",
            grid.rho(i + 1)
        )));
    }
    Ok(TridiagonalOperator {
        diag,
        offdiag: vec![-inv_h2; grid.nodes - 1],
        grid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub grid_params: RadialGrid,
    /// Richardson combination of this grid with a refined one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extrapolated: Option<Vec<f64>>,
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
}

pub const MAX_EIGEN_COUNT: usize = 10;
pub const MIN_EIGEN_NODES: usize = 500;

/// The `k` lowest eigenpairs.
pub fn eigen_lowest(op: &TridiagonalOperator, k: usize) -> Result<EigenResult> {
    if k == 0 || k > MAX_EIGEN_COUNT {
        return Err(Error::invalid(format!(
            "k must lie in 1..={MAX_EIGEN_COUNT}, got {k}"
        )));
    }
    if op.len() < MIN_EIGEN_NODES {
        return Err(Error::invalid(format!(
            "eigensolver needs at least {MIN_EIGEN_NODES} nodes, got {}",
            op.len()
        )));
    }
    let pairs: Vec<(f64, Vec<f64>, f64)> = (0..k)
        .into_par_iter()
        .map(|j| {
            let lambda = bisect_eigenvalue(op, j)?;
            let (v, res) = inverse_iteration(op, lambda)?;
            Ok((lambda, v, res))
        })
        .collect::<Result<_>>()?;
    let mut eigenvalues = Vec::with_capacity(k);
    let mut residual_norms = Vec::with_capacity(k);
    let mut eigenvectors = Vec::with_capacity(k);
    for (l, v, r) in pairs {
        eigenvalues.push(l);
        eigenvectors.push(v);
        residual_norms.push(r);
    }
    Ok(EigenResult {
        eigenvalues,
        residual_norms,
        grid_params: op.grid,
        extrapolated: None,
        eigenvectors,
    })
}

/// `λ(0)` from values at two step sizes under `λ(h) = λ(0) + c h²`.
pub fn richardson(h1: f64, l1: f64, h2: f64, l2: f64) -> f64 {
    let (a, b) = (h1 * h1, h2 * h2);
    (a * l2 - b * l1) / (a - b)
}

/// Solve on `(R, N)` and `(R, 2N)` and attach the extrapolated values to the
/// coarse result.
pub fn eigen_extrapolated(
    dim: &Dimension,
    spec: PotentialSpec,
    grid: RadialGrid,
    k: usize,
) -> Result<EigenResult> {
    let fine_grid = RadialGrid::new(grid.r_max, 2 * grid.nodes)?;
    let (coarse, fine) = rayon::join(
        || eigen_lowest(&discretize(dim, spec, grid)?, k),
        || eigen_lowest(&discretize(dim, spec, fine_grid)?, k),
    );
    let mut coarse = coarse?;
    let fine = fine?;
    let (h1, h2) = (grid.h(), fine_grid.h());
    coarse.extrapolated = Some(
        coarse
            .eigenvalues
            .iter()
            .zip(&fine.eigenvalues)
            .map(|(&l1, &l2)| richardson(h1, l1, h2, l2))
            .collect(),
    );
    Ok(coarse)
}

/// `sup |−g̃'' + (q − V)g̃ + g̃| / max(1, g̃)` over `[h, r_max]`.
pub fn eigenfunction_residual(dim: &Dimension, h: f64, r_max: f64) -> f64 {
    let steps = (r_max / h).floor() as usize;
    (1..=steps)
        .map(|i| {
            let r = i as f64 * h;
            let (g, _, g2) = g_tilde_derivatives(dim, r);
            let u = free_q(dim, r) - potential_v(dim, r);
            (-g2 + u * g + g).abs() / g.max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Same statement with a centred second difference of step `h`, sampled at
/// 1001 fixed points of `[r_min, r_max]` so that refinement compares like
/// with like.
pub fn eigenfunction_residual_fd(dim: &Dimension, h: f64, r_min: f64, r_max: f64) -> f64 {
    (0..=1000)
        .map(|i| {
            let r = r_min + (r_max - r_min) * i as f64 / 1000.0;
            let g = g_tilde(dim, r);
            let g2 = (g_tilde(dim, r + h) - 2.0 * g + g_tilde(dim, r - h)) / (h * h);
            let u = free_q(dim, r) - potential_v(dim, r);
            (-g2 + u * g + g).abs() / g.max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Match `a[i]` with `b[i]`; returns the pairs and the largest mismatch.
pub fn pair_spectra(a: &[f64], b: &[f64]) -> (Vec<(f64, f64)>, f64) {
    let pairs: Vec<(f64, f64)> = a.iter().copied().zip(b.iter().copied()).collect();
    let worst = pairs.iter().map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    (pairs, worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SusyReport {
    pub n: i64,
    pub linearized: Vec<f64>,
    pub susy: Vec<f64>,
    pub matched_pairs: Vec<(f64, f64)>,
    pub max_mismatch: f64,
    /// Smallest partner eigenvalue.
    pub susy_min: f64,
}

/// Compare the linearized spectrum without its ground state against the
/// partner spectrum, both extrapolated from `(N, 2N)`.
pub fn susy_isospectrality(dim: &Dimension, grid: RadialGrid) -> Result<SusyReport> {
    let (lin, susy) = rayon::join(
        || eigen_extrapolated(dim, PotentialSpec::Linearized, grid, 5),
        || eigen_extrapolated(dim, PotentialSpec::Susy, grid, 4),
    );
    let lin = lin?.extrapolated.expect("extrapolated");
    let susy = susy?.extrapolated.expect("extrapolated");
    let (matched_pairs, max_mismatch) = pair_spectra(&lin[1..], &susy);
    Ok(SusyReport {
        n: dim.n,
        susy_min: susy.iter().copied().fold(f64::INFINITY, f64::min),
        linearized: lin,
        susy,
        matched_pairs,
        max_mismatch,
    })
}

/// Smallest positive eigenvalue of the linearized operator, extrapolated.
pub fn spectral_gap(dim: &Dimension, grid: RadialGrid) -> Result<f64> {
    let r = eigen_extrapolated(dim, PotentialSpec::Linearized, grid, 2)?;
    Ok(r.extrapolated.expect("extrapolated")[1])
}

/// Relative weighted-L² distance between the discrete linearized ground
/// state, pulled back to ℝⁿ, and its best multiple of the unstable mode.
pub fn ground_state_mode_deviation(dim: &Dimension, grid: RadialGrid) -> Result<f64> {
    let op = discretize(dim, PotentialSpec::Linearized, grid)?;
    let res = eigen_lowest(&op, 1)?;
    let u = GridFunction::new(grid, res.eigenvectors[0].clone())?;
    let f = halfline_transform(dim, &u, Direction::FromHalfline)?;
    let g = GridFunction::try_sample(grid, |r| {
        crate::model::eval_profile(ProfileKind::GMode, dim, r)
    })?;
    let gg = sigma_inner(dim, &g, &g);
    let c = sigma_inner(dim, &f, &g) / gg;
    let diff = f.zip(&g, |x, y| x - c * y)?;
    Ok((sigma_inner(dim, &diff, &diff) / (c * c * gg)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_dimension;

    fn dim_n(n: i64) -> Dimension {
        make_dimension(n - 2).unwrap()
    }

    #[test]
    fn dirichlet_laplacian_calibration() {
        let dim = dim_n(8);
        let grid = RadialGrid::new(std::f64::consts::PI, 999).unwrap();
        let op = discretize(&dim, PotentialSpec::Zero, grid).unwrap();
        let r = eigen_lowest(&op, 2).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-5);
        assert!((r.eigenvalues[1] - 4.0).abs() < 1e-4);
        assert!(r.residual_norms.iter().all(|&x| x < 1e-8));
    }

    #[test]
    fn linearized_minus_free_is_v() {
        let dim = dim_n(8);
        let grid = RadialGrid::new(20.0, 600).unwrap();
        let a = discretize(&dim, PotentialSpec::Linearized, grid).unwrap();
        let b = discretize(&dim, PotentialSpec::Free, grid).unwrap();
        for (i, (x, y)) in a.diag.iter().zip(&b.diag).enumerate() {
            let v = potential_v(&dim, grid.rho(i + 1));
            assert!((y - x - v).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn free_spectrum_is_shifted_integers() {
        let dim = dim_n(8);
        let grid = RadialGrid::new(20.0, 2000).unwrap();
        let r = eigen_extrapolated(&dim, PotentialSpec::Free, grid, 3).unwrap();
        for (k, l) in r.extrapolated.unwrap().iter().enumerate() {
            assert!((l - (k as f64 + 1.0)).abs() < 1e-3, "{k}: {l}");
        }
    }

    #[test]
    fn linearized_ground_state_and_gap() {
        let dim = dim_n(8);
        let grid = RadialGrid::new(20.0, 4000).unwrap();
        let op = discretize(&dim, PotentialSpec::Linearized, grid).unwrap();
        let r = eigen_lowest(&op, 3).unwrap();
        assert!((r.eigenvalues[0] + 1.0).abs() < 5e-3);
        assert!(r.eigenvalues[1] > 0.0);
        assert!(
            r.residual_norms.iter().all(|&x| x < 1e-8),
            "{:?}",
            r.residual_norms
        );
        assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eigenfunction_identity() {
        for n in 7..=11 {
            let dim = dim_n(n);
            assert!(eigenfunction_residual(&dim, 1e-3, 20.0) <= 1e-9, "n={n}");
        }
        let dim = dim_n(8);
        let e1 = eigenfunction_residual_fd(&dim, 1e-2, 0.1, 20.0);
        let e2 = eigenfunction_residual_fd(&dim, 5e-3, 0.1, 20.0);
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.2, "order {order}");
    }

    #[test]
    fn free_spectrum_fails_self_pairing() {
        let dim = dim_n(8);
        let grid = RadialGrid::new(20.0, 1000).unwrap();
        let r = eigen_lowest(&discretize(&dim, PotentialSpec::Free, grid).unwrap(), 5).unwrap();
        let (_, worst) = pair_spectra(&r.eigenvalues[1..], &r.eigenvalues[..4]);
        assert!(worst > 0.5);
    }

    #[test]
    fn ground_state_is_the_unstable_mode() {
        let dim = dim_n(8);
        let grid = RadialGrid::new(20.0, 4000).unwrap();
        assert!(ground_state_mode_deviation(&dim, grid).unwrap() <= 1e-2);
    }

    #[test]
    fn eigenvalues_decrease_with_radius() {
        let dim = dim_n(8);
        let h = 0.01;
        let mut prev: Option<Vec<f64>> = None;
        for r in [15.0, 20.0, 25.0] {
            let grid = RadialGrid::new(r, (r / h).round() as usize - 1).unwrap();
            let e = eigen_lowest(
                &discretize(&dim, PotentialSpec::Linearized, grid).unwrap(),
                4,
            )
            .unwrap()
            .eigenvalues;
            if let Some(p) = &prev {
                for (a, b) in e.iter().zip(p) {
                    assert!(*a <= *b + 1e-10);
                    assert!((a - b).abs() < 1e-6);
                }
            }
            prev = Some(e);
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let dim = dim_n(8);
        let small = RadialGrid::new(20.0, 100).unwrap();
        let op = discretize(&dim, PotentialSpec::Free, small).unwrap();
        assert!(eigen_lowest(&op, 1).is_err());
        let grid = RadialGrid::new(20.0, 600).unwrap();
        let op = discretize(&dim, PotentialSpec::Free, grid).unwrap();
        assert!(eigen_lowest(&op, 11).is_err());
        assert!(eigen_lowest(&op, 0).is_err());
    }
}
