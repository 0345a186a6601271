//! Banded helpers shared by the eigensolver and the time steppers.

/// A general (not necessarily symmetric) tridiagonal matrix stored by bands.
///
/// Row `i` reads `lower[i] * x[i-1] + diag[i] * x[i] + upper[i] * x[i+1]`;
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(out.len(), n);
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.lower[i] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.upper[i] * x[i + 1];
            }
            out[i] = acc;
        }
    }

    /// `alpha * I + beta * self`.
    pub fn shifted_scaled(&self, alpha: f64, beta: f64) -> Tridiagonal {
        Tridiagonal {
            lower: self.lower.iter().map(|v| beta * v).collect(),
            diag: self.diag.iter().map(|v| alpha + beta * v).collect(),
            upper: self.upper.iter().map(|v| beta * v).collect(),
        }
    }

    /// Thomas algorithm. Returns `None` on a vanishing pivot.
    pub fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let mut factor = ThomasFactor::new(self)?;
        let mut x = rhs.to_vec();
        factor.solve_in_place(&mut x);
        Some(x)
    }
}

impl Tridiagonal {
    /// Gaussian elimination with partial pivoting. Exactly singular pivots
    /// are replaced by `tiny`; pass 0 to report them as `None` instead.
    pub fn solve_pivoted(&self, rhs: &[f64], tiny: f64) -> Option<Vec<f64>> {
        let n = self.len();
        let mut b = rhs.to_vec();
        if n == 0 {
            return Some(b);
        }
        let mut d = self.diag.clone();
        let mut du: Vec<f64> = self.upper.clone();
        // dl[i] is the entry below d[i]; after elimination it holds the
        // second superdiagonal produced by row swaps
        let mut dl: Vec<f64> = (0..n)
            .map(|i| if i + 1 < n { self.lower[i + 1] } else { 0.0 })
            .collect();
        let fix = |v: f64| -> Option<f64> {
            if v != 0.0 {
                Some(v)
            } else if tiny > 0.0 {
                Some(tiny)
            } else {
                None
            }
        };
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                d[i] = fix(d[i])?;
                let fact = dl[i] / d[i];
                d[i + 1] -= fact * du[i];
                b[i + 1] -= fact * b[i];
                dl[i] = 0.0;
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                if i + 2 < n {
                    dl[i] = du[i + 1];
                    du[i + 1] = -fact * dl[i];
                } else {
                    dl[i] = 0.0;
                }
                du[i] = temp;
                let bi = b[i];
                b[i] = b[i + 1];
                b[i + 1] = bi - fact * b[i + 1];
            }
        }
        d[n - 1] = fix(d[n - 1])?;
        b[n - 1] /= d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
        }
        if b.iter().all(|v| v.is_finite()) {
            Some(b)
        } else {
            None
        }
    }
}

/// Pre-factored tridiagonal system, reused across time steps with a fixed
/// step size.
#[derive(Debug, Clone)]
pub struct ThomasFactor {
    lower: Vec<f64>,
    inv_pivot: Vec<f64>,
    upper_scaled: Vec<f64>,
}

impl ThomasFactor {
    pub fn new(m: &Tridiagonal) -> Option<Self> {
        let n = m.len();
        let mut inv_pivot = vec![0.0; n];
        let mut upper_scaled = vec![0.0; n];
        let mut prev_c = 0.0;
        for i in 0..n {
            let pivot = if i == 0 {
                m.diag[0]
            } else {
                m.diag[i] - m.lower[i] * prev_c
            };
            if pivot == 0.0 || !pivot.is_finite() {
                return None;
            }
            inv_pivot[i] = 1.0 / pivot;
            prev_c = if i + 1 < n { m.upper[i] / pivot } else { 0.0 };
            upper_scaled[i] = prev_c;
        }
        Some(Self {
            lower: m.lower.clone(),
            inv_pivot,
            upper_scaled,
        })
    }

    pub fn solve_in_place(&mut self, x: &mut [f64]) {
        let n = x.len();
        if n == 0 {
            return;
        }
        x[0] *= self.inv_pivot[0];
        for i in 1..n {
            x[i] = (x[i] - self.lower[i] * x[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.upper_scaled[i] * x[i + 1];
        }
    }
}
