//! Radial finite-difference operators and the IMEX θ-stepper shared by the
//! similarity and physical runs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ThomasFactor, Tridiagonal};
use crate::model::RadialGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OuterBc {
    /// Ghost value fixed (zero for the evolved unknown).
    DirichletZero,
    /// Linear extrapolation `f_{N+1} = 2f_N − f_{N−1}`: the diffusion term
    /// drops and the drift becomes a one-sided difference.
    Extrapolated,
}

/// `∂² + ((n−1)/ρ)∂ [− ½ρ∂ − 1]` on the interior nodes, with the even
/// closure `f(0) = (4f_1 − f_2)/3` at the origin. Returns the matrix and the
/// coefficient multiplying a Dirichlet ghost value in the last row.
pub fn radial_operator(
    n: i64,
    grid: RadialGrid,
    similarity: bool,
    bc: OuterBc,
) -> (Tridiagonal, f64) {
    let len = grid.nodes;
    let h = grid.h();
    let inv_h2 = 1.0 / (h * h);
    let nf = n as f64;
    let shift = if similarity { -1.0 } else { 0.0 };
    let drift = |rho: f64| (nf - 1.0) / rho - if similarity { 0.5 * rho } else { 0.0 };
    let mut m = Tridiagonal::zeros(len);
    for i in 0..len {
        let rho = (i + 1) as f64 * h;
        let c = drift(rho);
        m.lower[i] = inv_h2 - c / (2.0 * h);
        m.diag[i] = -2.0 * inv_h2 + shift;
        m.upper[i] = inv_h2 + c / (2.0 * h);
    }
    // origin: (2n/3)(f_2 − f_1)/h² [− (f_2 − f_1)/3]
    let k = 2.0 * nf / 3.0 * inv_h2;
    let third = if similarity { 1.0 / 3.0 } else { 0.0 };
    m.lower[0] = 0.0;
    m.diag[0] = -k + third + shift;
    m.upper[0] = k - third;
    let last = len - 1;
    let ghost = m.upper[last];
    m.upper[last] = 0.0;
    match bc {
        OuterBc::DirichletZero => (m, ghost),
        OuterBc::Extrapolated => {
            let c = drift(grid.rho(len));
            m.lower[last] = -c / h;
            m.diag[last] = c / h + shift;
            (m, 0.0)
        }
    }
}

/// Pointwise explicit term.
#[derive(Debug, Clone, PartialEq)]
pub enum Explicit {
    None,
    /// `(d−2) f² (3 − 3ρ²W − ρ² f)`.
    Perturbation {
        d: f64,
        rho2: Vec<f64>,
        w: Vec<f64>,
    },
    /// `(d−2) f² (3 − ρ² f)`.
    Absolute {
        d: f64,
        rho2: Vec<f64>,
    },
}

impl Explicit {
    pub fn eval(&self, f: &[f64], out: &mut [f64]) {
        match self {
            Explicit::None => out.iter_mut().for_each(|v| *v = 0.0),
            Explicit::Perturbation { d, rho2, w } => {
                for i in 0..f.len() {
                    let x = f[i];
                    out[i] = (d - 2.0) * x * x * (3.0 - 3.0 * rho2[i] * w[i] - rho2[i] * x);
                }
            }
            Explicit::Absolute { d, rho2 } => {
                for i in 0..f.len() {
                    let x = f[i];
                    out[i] = (d - 2.0) * x * x * (3.0 - rho2[i] * x);
                }
            }
        }
    }

    fn is_none(&self) -> bool {
        matches!(self, Explicit::None)
    }
}

/// θ-weighted implicit linear part `A f + forcing` with an Adams–Bashforth
/// explicit term (Euler on the first step, variable-step AB2 afterwards).
#[derive(Debug, Clone)]
pub struct ImexStepper {
    a: Tridiagonal,
    forcing: Vec<f64>,
    explicit: Explicit,
    theta: f64,
    dt: f64,
    factor: Option<ThomasFactor>,
    prev_e: Option<(Vec<f64>, f64)>,
    e: Vec<f64>,
    af: Vec<f64>,
}

impl ImexStepper {
    pub fn new(a: Tridiagonal, forcing: Vec<f64>, explicit: Explicit, theta: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&theta) {
            return Err(Error::invalid(format!(
                "theta must lie in [1/2, 1], got {theta}"
            )));
        }
        let n = a.len();
        if forcing.len() != n {
            return Err(Error::invalid("forcing length does not match the operator"));
        }
        Ok(Self {
            a,
            forcing,
            explicit,
            theta,
            dt: 0.0,
            factor: None,
            prev_e: None,
            e: vec![0.0; n],
            af: vec![0.0; n],
        })
    }

    pub fn operator(&self) -> &Tridiagonal {
        &self.a
    }

    fn refactor(&mut self, dt: f64) -> Result<()> {
        if self.factor.is_some() && dt == self.dt {
            return Ok(());
        }
        let lhs = self.a.shifted_scaled(1.0, -self.theta * dt);
        self.factor = Some(
            ThomasFactor::new(&lhs)
                .ok_or_else(|| Error::invalid(format!("implicit matrix singular at dt = {dt}")))?,
        );
        self.dt = dt;
        Ok(())
    }

    /// Advance `f` by `dt` in place.
    pub fn step(&mut self, f: &mut [f64], dt: f64) -> Result<()> {
        self.refactor(dt)?;
        self.a.apply(f, &mut self.af);
        let explicit = !self.explicit.is_none();
        if explicit {
            self.explicit.eval(f, &mut self.e);
        }
        let beta = 1.0 - self.theta;
        match (&self.prev_e, explicit) {
            (Some((prev, dt_prev)), true) => {
                let r = dt / dt_prev;
                let (c0, c1) = (1.0 + 0.5 * r, -0.5 * r);
                for i in 0..f.len() {
                    f[i] +=
                        dt * (beta * self.af[i] + self.forcing[i] + c0 * self.e[i] + c1 * prev[i]);
                }
            }
            _ => {
                for i in 0..f.len() {
                    f[i] += dt * (beta * self.af[i] + self.forcing[i] + self.e[i]);
                }
            }
        }
        self.factor.as_mut().expect("factored").solve_in_place(f);
        if explicit {
            match &mut self.prev_e {
                Some((prev, dp)) => {
                    prev.copy_from_slice(&self.e);
                    *dp = dt;
                }
                None => self.prev_e = Some((self.e.clone(), dt)),
            }
        }
        Ok(())
    }
}
