use super::operator::{radial_operator, Explicit, ImexStepper, OuterBc};
use super::{Dynamics, EvolutionTrace, SolverConfig, Termination, BLOWUP_SUP};
use crate::error::{Error, Result};
use crate::model::{
    eval_profile, norms, potential_v, sigma_inner, weinkove, Dimension, GridFunction, ProfileKind,
    RadialGrid,
};

/// Free similarity evolution of `e^{−β|x|²}`:
/// `e^{−τ} (1+4αβ)^{−n/2} exp(−β e^{−τ} ρ² / (1+4αβ))`, `α = 1 − e^{−τ}`.
pub fn ou_oracle(dim: &Dimension, beta: f64, tau: f64, rho: f64) -> f64 {
    let e = (-tau).exp();
    let alpha = 1.0 - e;
    let s = 1.0 + 4.0 * alpha * beta;
    e * s.powf(-0.5 * dim.n as f64) * (-beta * e * rho * rho / s).exp()
}

/// `g = (aρ²+b)^{−2}/‖·‖` on the grid.
pub fn unstable_mode(dim: &Dimension, grid: RadialGrid) -> Result<GridFunction> {
    GridFunction::try_sample(grid, |r| eval_profile(ProfileKind::GMode, dim, r))
}

/// `c₁ = (φ | g) / (g | g)` in the weighted space, by the same quadrature
/// for both inner products.
pub fn project_unstable(dim: &Dimension, phi: &GridFunction) -> Result<f64> {
    let g = unstable_mode(dim, phi.grid)?;
    Ok(sigma_inner(dim, phi, &g) / sigma_inner(dim, &g, &g))
}

/// `T v(√T ρ) + T W(√T ρ) − W(ρ)` with `v` interpolated on its own grid.
pub fn initial_perturbation(
    dim: &Dimension,
    v: &GridFunction,
    t: f64,
    grid: RadialGrid,
) -> Result<GridFunction> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!(
            "blowup time must be positive, got {t}"
        )));
    }
    let st = t.sqrt();
    GridFunction::new(
        grid,
        grid.points()
            .into_iter()
            .map(|r| t * v.interpolate(st * r) + t * weinkove(dim, st * r) - weinkove(dim, r))
            .collect(),
    )
}

struct Setup {
    stepper: ImexStepper,
    w: Vec<f64>,
    mode: GridFunction,
    mode_norm2: f64,
}

fn setup(dim: &Dimension, cfg: &SolverConfig) -> Result<Setup> {
    cfg.validate()?;
    if cfg.d != dim.d {
        return Err(Error::invalid(format!(
            "config is for d = {}, dimension is d = {}",
            cfg.d, dim.d
        )));
    }
    let grid = cfg.grid;
    let pts = grid.points();
    let (mut a, ghost) = radial_operator(dim.n, grid, true, cfg.bc_outer);
    let w: Vec<f64> = pts.iter().map(|&r| weinkove(dim, r)).collect();
    let rho2: Vec<f64> = pts.iter().map(|r| r * r).collect();
    let explicit = match cfg.dynamics {
        Dynamics::Free => Explicit::None,
        Dynamics::Linearized => {
            for (i, &r) in pts.iter().enumerate() {
                a.diag[i] += potential_v(dim, r);
            }
            Explicit::None
        }
        Dynamics::Full => {
            // discrete residual of W, so that both W and 0 stay exact
            // equilibria of the scheme
            let mut s = vec![0.0; w.len()];
            a.apply(&w, &mut s);
            let last = w.len() - 1;
            if cfg.bc_outer == OuterBc::DirichletZero {
                s[last] += ghost * weinkove(dim, grid.r_max);
            }
            let d = dim.d as f64;
            for i in 0..w.len() {
                s[i] += (d - 2.0) * w[i] * w[i] * (3.0 - rho2[i] * w[i]);
                a.diag[i] += potential_v(dim, pts[i]) - s[i] / w[i];
            }
            Explicit::Perturbation {
                d,
                rho2,
                w: w.clone(),
            }
        }
    };
    let stepper = ImexStepper::new(a, vec![0.0; grid.nodes], explicit, cfg.theta)?;
    let mode = unstable_mode(dim, grid)?;
    let mode_norm2 = sigma_inner(dim, &mode, &mode);
    Ok(Setup {
        stepper,
        w,
        mode,
        mode_norm2,
    })
}

fn sup_total(dynamics: Dynamics, w: &[f64], f: &[f64]) -> f64 {
    match dynamics {
        Dynamics::Full => f.iter().zip(w).fold(0.0f64, |m, (x, y)| {
            if (x + y).is_finite() {
                m.max((x + y).abs())
            } else {
                f64::INFINITY
            }
        }),
        _ => f.iter().fold(0.0f64, |m, x| {
            if x.is_finite() {
                m.max(x.abs())
            } else {
                f64::INFINITY
            }
        }),
    }
}

/// Evolve a perturbation `Φ` (of `W` for full dynamics, of 0 otherwise).
pub fn evolve_perturbation(
    dim: &Dimension,
    phi0: &GridFunction,
    cfg: &SolverConfig,
) -> Result<EvolutionTrace> {
    let mut st = setup(dim, cfg)?;
    if phi0.grid != cfg.grid {
        return Err(Error::invalid("initial data must live on the solver grid"));
    }
    let grid = cfg.grid;
    let steps = (cfg.tau_max / cfg.dt).round() as usize;
    let every = ((cfg.sample_every / cfg.dt).round() as usize).max(1);
    let mut phi = phi0.values.clone();
    let mut trace = EvolutionTrace {
        tau_samples: Vec::new(),
        sup_norm: Vec::new(),
        sigma_norm: Vec::new(),
        x_proxy_norm: Vec::new(),
        c1: Vec::new(),
        config_hash: cfg.hash(),
        termination: Termination::Horizon,
        final_state: Vec::new(),
    };
    let record = |trace: &mut EvolutionTrace, phi: &[f64], tau: f64| -> bool {
        let f = GridFunction {
            grid,
            values: phi.to_vec(),
        };
        let nm = norms(dim, &f);
        let c1 = sigma_inner(dim, &f, &st.mode) / st.mode_norm2;
        trace.tau_samples.push(tau);
        trace.sup_norm.push(nm.sup);
        trace.sigma_norm.push(nm.sigma_l2);
        trace.x_proxy_norm.push(nm.x_proxy);
        trace.c1.push(c1);
        cfg.escape_c1.is_some_and(|e| c1.abs() > e)
    };
    if record(&mut trace, &phi, 0.0) {
        trace.termination = Termination::Escaped;
        trace.final_state = phi;
        return Ok(trace);
    }
    for k in 1..=steps {
        st.stepper.step(&mut phi, cfg.dt)?;
        if sup_total(cfg.dynamics, &st.w, &phi) > BLOWUP_SUP {
            trace.termination = Termination::Blowup;
            break;
        }
        if (k % every == 0 || k == steps) && record(&mut trace, &phi, k as f64 * cfg.dt) {
            trace.termination = Termination::Escaped;
            break;
        }
    }
    trace.final_state = phi;
    Ok(trace)
}

/// Evolve `ψ` from the data `T W(√T ρ) + T v(√T ρ)`; norms are of `ψ − W`.
pub fn run_similarity(
    dim: &Dimension,
    v: &GridFunction,
    t: f64,
    cfg: &SolverConfig,
) -> Result<EvolutionTrace> {
    if cfg.dynamics != Dynamics::Full {
        return Err(Error::invalid(
            "similarity runs from data need full dynamics",
        ));
    }
    let phi0 = initial_perturbation(dim, v, t, cfg.grid)?;
    evolve_perturbation(dim, &phi0, cfg)
}

/// One step of the full equation for `ψ` (explicit part by forward Euler).
pub fn step_similarity(
    dim: &Dimension,
    psi: &GridFunction,
    cfg: &SolverConfig,
) -> Result<GridFunction> {
    let mut cfg = cfg.clone();
    cfg.dynamics = Dynamics::Full;
    cfg.grid = psi.grid;
    let mut st = setup(dim, &cfg)?;
    let mut phi: Vec<f64> = psi.values.iter().zip(&st.w).map(|(p, w)| p - w).collect();
    st.stepper.step(&mut phi, cfg.dt)?;
    let values: Vec<f64> = phi.iter().zip(&st.w).map(|(f, w)| f + w).collect();
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(sup <= BLOWUP_SUP) {
        return Err(Error::Divergence { tau: cfg.dt, sup });
    }
    GridFunction::new(psi.grid, values)
}
