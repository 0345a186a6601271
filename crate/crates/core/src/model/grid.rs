use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform interior grid `ρ_i = i·h`, `i = 1..=N`, `h = R/(N+1)`.
/// Neither endpoint is a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    #[serde(rename = "R")]
    pub r_max: f64,
    #[serde(rename = "N")]
    pub nodes: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, nodes: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::invalid(format!(
                "grid radius must be positive, got {r_max}"
            )));
        }
        if nodes < 3 {
            return Err(Error::invalid(format!(
                "grid needs at least 3 nodes, got {nodes}"
            )));
        }
        Ok(Self { r_max, nodes })
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.r_max / (self.nodes + 1) as f64
    }

    /// `ρ_i` for 1-based `i`.
    #[inline]
    pub fn rho(&self, i: usize) -> f64 {
        i as f64 * self.h()
    }

    pub fn len(&self) -> usize {
        self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }

    /// All node positions, index 0 holding `ρ_1`.
    pub fn points(&self) -> Vec<f64> {
        let h = self.h();
        (1..=self.nodes).map(|i| i as f64 * h).collect()
    }
}

/// Samples of a radial function at the nodes of a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nodes {
            return Err(Error::invalid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.nodes
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at node {}",
                i + 1
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.nodes],
        }
    }

    pub fn sample(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn try_sample(grid: RadialGrid, f: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        let values = grid
            .points()
            .into_iter()
            .map(f)
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, values)
    }

    pub fn points(&self) -> Vec<f64> {
        self.grid.points()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Value at the origin from the even quadratic through nodes 1 and 2.
    pub fn origin_value(&self) -> f64 {
        (4.0 * self.values[0] - self.values[1]) / 3.0
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let h = self.grid.h();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f((i + 1) as f64 * h, v))
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::invalid("grid functions live on different grids"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| f(x, y))
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    /// Cubic Lagrange interpolation at arbitrary `ρ ∈ [0, R]`, using the even
    /// reflection at the origin and zero beyond the last node.
    pub fn interpolate(&self, rho: f64) -> f64 {
        let h = self.grid.h();
        let n = self.grid.nodes as isize;
        let x = rho.abs() / h;
        if x > (n + 1) as f64 {
            return 0.0;
        }
        let at = |j: isize| -> f64 {
            // node j sits at ρ = j·h; mirror negative indices, j = 0 is the origin
            let j = j.abs();
            if j == 0 {
                self.origin_value()
            } else if j <= n {
                self.values[(j - 1) as usize]
            } else {
                // linear extrapolation past the last node
                let k = j - n;
                let last = self.values[(n - 1) as usize];
                let prev = self.values[(n - 2) as usize];
                last + k as f64 * (last - prev)
            }
        };
        let base = (x.floor() as isize).clamp(0, n.max(1));
        let i0 = base - 1;
        let t = x - base as f64;
        let (p0, p1, p2, p3) = (at(i0), at(i0 + 1), at(i0 + 2), at(i0 + 3));
        // Lagrange weights on nodes −1, 0, 1, 2 at offset t
        let w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        w0 * p0 + w1 * p1 + w2 * p2 + w3 * p3
    }

    /// Resample onto another grid by cubic interpolation.
    pub fn resample(&self, grid: RadialGrid) -> Self {
        Self::sample(grid, |r| self.interpolate(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_excludes_endpoints() {
        let g = RadialGrid::new(10.0, 9).unwrap();
        assert_eq!(g.h(), 1.0);
        let p = g.points();
        assert_eq!(p.first(), Some(&1.0));
        assert_eq!(p.last(), Some(&9.0));
        assert!(p.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(RadialGrid::new(0.0, 10).is_err());
        assert!(RadialGrid::new(1.0, 1).is_err());
        let g = RadialGrid::new(1.0, 4).unwrap();
        assert!(GridFunction::new(g, vec![0.0; 3]).is_err());
        assert!(GridFunction::new(g, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn interpolation_is_exact_for_even_cubics_inside() {
        let g = RadialGrid::new(4.0, 399).unwrap();
        let f = GridFunction::sample(g, |r| 1.0 + 0.5 * r * r);
        for &r in &[0.0, 0.0031, 0.5, 1.234, 3.9] {
            assert!(
                (f.interpolate(r) - (1.0 + 0.5 * r * r)).abs() < 1e-12,
                "{r}"
            );
        }
    }
}
