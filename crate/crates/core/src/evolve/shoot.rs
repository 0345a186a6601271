use serde::{Deserialize, Serialize};

use super::similarity::run_similarity;
use super::{Dynamics, EvolutionTrace, SolverConfig, Termination};
use crate::error::{Error, Result};
use crate::model::{Dimension, GridFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShootOptions {
    /// Half-width of the initial bracket around `T = 1`.
    pub delta: f64,
    /// Accept `T` once `|c₁(τ_max)|` drops below this.
    pub tol: f64,
    pub max_iter: usize,
    pub width_tol: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            delta: 0.1,
            tol: 1e-6,
            max_iter: 60,
            width_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ShootVerdict {
    Converged,
    MaxIter,
    LostBracket,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShootResult {
    #[serde(rename = "T")]
    pub t: f64,
    pub bracket_history: Vec<(f64, f64)>,
    pub iterations: usize,
    pub final_trace: EvolutionTrace,
    pub verdict: ShootVerdict,
}

/// Long-time sign of `c₁`; a blowup counts as positive.
fn side(trace: &EvolutionTrace) -> f64 {
    if trace.termination == Termination::Blowup {
        return 1.0;
    }
    match trace.c1.last() {
        Some(c) if *c < 0.0 => -1.0,
        _ => 1.0,
    }
}

fn settled(trace: &EvolutionTrace, tol: f64) -> bool {
    trace.termination == Termination::Horizon && trace.c1.last().is_some_and(|c| c.abs() <= tol)
}

/// Bisection on the blowup time of the data `T(W + v)(√T ·)` until the
/// unstable coefficient stays bounded up to `τ_max`.
pub fn shoot_t(
    dim: &Dimension,
    v: &GridFunction,
    opts: &ShootOptions,
    cfg: &SolverConfig,
) -> Result<ShootResult> {
    if !(opts.delta > 0.0 && opts.delta < 1.0) {
        return Err(Error::invalid(format!(
            "delta must lie in (0, 1), got {}",
            opts.delta
        )));
    }
    if !(opts.tol > 0.0 && opts.width_tol > 0.0) {
        return Err(Error::invalid("shooting tolerances must be positive"));
    }
    if cfg.dynamics != Dynamics::Full {
        return Err(Error::invalid("shooting needs full dynamics"));
    }
    let mut probe = cfg.clone();
    if probe.escape_c1.is_none() {
        // c₁ ≈ (T − 1)·b·‖W²‖_σ for mistimed data
        probe.escape_c1 = Some(0.1 * dim.b * dim.g_norm_checked()?);
    }
    let full = |t: f64| -> Result<EvolutionTrace> {
        let mut c = cfg.clone();
        c.escape_c1 = None;
        run_similarity(dim, v, t, &c)
    };
    let finish = |t: f64, history, iterations, verdict| -> Result<ShootResult> {
        Ok(ShootResult {
            t,
            bracket_history: history,
            iterations,
            final_trace: full(t)?,
            verdict,
        })
    };

    let centre = run_similarity(dim, v, 1.0, &probe)?;
    if settled(&centre, opts.tol) {
        return finish(1.0, Vec::new(), 0, ShootVerdict::Converged);
    }
    let (mut lo, mut hi) = (1.0 - opts.delta, 1.0 + opts.delta);
    let (tr_lo, tr_hi) = rayon::join(
        || run_similarity(dim, v, lo, &probe),
        || run_similarity(dim, v, hi, &probe),
    );
    let s_lo = side(&tr_lo?);
    let s_hi = side(&tr_hi?);
    let mut history = vec![(lo, hi)];
    if s_lo == s_hi {
        return finish(1.0, history, 0, ShootVerdict::LostBracket);
    }
    // the centre run already splits the bracket
    let s_mid = side(&centre);
    if s_mid == s_lo {
        lo = 1.0;
    } else {
        hi = 1.0;
    }
    history.push((lo, hi));
    let mut iterations = 1;
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= opts.width_tol {
            return finish(mid, history, iterations, ShootVerdict::Converged);
        }
        if iterations >= opts.max_iter {
            return finish(mid, history, iterations, ShootVerdict::MaxIter);
        }
        let tr = run_similarity(dim, v, mid, &probe)?;
        iterations += 1;
        if settled(&tr, opts.tol) {
            return finish(mid, history, iterations, ShootVerdict::Converged);
        }
        if side(&tr) == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        history.push((lo, hi));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_dimension;

    #[test]
    fn zero_perturbation_is_immediate() {
        let dim = make_dimension(6).unwrap();
        let cfg = SolverConfig::similarity(6);
        let v = GridFunction::zeros(cfg.grid);
        let r = shoot_t(&dim, &v, &ShootOptions::default(), &cfg).unwrap();
        assert_eq!(r.verdict, ShootVerdict::Converged);
        assert_eq!(r.t, 1.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn large_data_is_flagged() {
        let dim = make_dimension(6).unwrap();
        let mut cfg = SolverConfig::similarity(6);
        cfg.tau_max = 5.0;
        let v = GridFunction::sample(cfg.grid, |r| (-r * r).exp());
        let r = shoot_t(&dim, &v, &ShootOptions::default(), &cfg).unwrap();
        assert_ne!(
            r.verdict,
            ShootVerdict::Converged,
            "{:?}",
            r.bracket_history
        );
    }
}
