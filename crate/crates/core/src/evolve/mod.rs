//! Time integration in similarity and physical coordinates, projection on
//! the unstable mode, blowup-time shooting and rate fits.

mod fit;
mod operator;
mod physical;
mod shoot;
mod similarity;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::RadialGrid;

pub use fit::{fit_decay_rate, fit_growth_rate, linear_fit, LinearFit, RateFit};
pub use operator::{radial_operator, Explicit, ImexStepper, OuterBc};
pub use physical::{
    run_physical, scaling_blowup_times, scaling_check, PhysicalConfig, PhysicalResult,
    ScalingReport,
};
pub use shoot::{shoot_t, ShootOptions, ShootResult, ShootVerdict};
pub use similarity::{
    evolve_perturbation, initial_perturbation, ou_oracle, project_unstable, run_similarity,
    step_similarity, unstable_mode,
};

/// Which equation a similarity-coordinate run integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Dynamics {
    /// Full nonlinear equation for `Φ = ψ − W`.
    Full,
    /// Linearization around `W`.
    Linearized,
    /// Free operator only.
    Free,
}

pub const BLOWUP_SUP: f64 = 1e6;
pub const MAX_DT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolverConfig {
    pub d: i64,
    pub grid: RadialGrid,
    pub dt: f64,
    pub theta: f64,
    pub tau_max: f64,
    pub bc_outer: OuterBc,
    pub dynamics: Dynamics,
    /// Spacing of recorded samples in τ.
    pub sample_every: f64,
    /// Stop as soon as `|c₁|` exceeds this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub escape_c1: Option<f64>,
}

impl SolverConfig {
    /// Reference similarity setup: `R = 20`, `N = 2000`, `dt = 10⁻³`,
    /// Crank–Nicolson, `τ ≤ 10`.
    pub fn similarity(d: i64) -> Self {
        Self {
            d,
            grid: RadialGrid {
                r_max: 20.0,
                nodes: 2000,
            },
            dt: 1e-3,
            theta: 0.5,
            tau_max: 10.0,
            bc_outer: OuterBc::Extrapolated,
            dynamics: Dynamics::Full,
            sample_every: 0.1,
            escape_c1: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(Error::invalid(format!(
                "dt must lie in (0, {MAX_DT}], got {}",
                self.dt
            )));
        }
        if !(0.5..=1.0).contains(&self.theta) {
            return Err(Error::invalid(format!(
                "theta must lie in [1/2, 1], got {}",
                self.theta
            )));
        }
        if !(self.tau_max > 0.0 && self.tau_max.is_finite()) {
            return Err(Error::invalid(format!("bad horizon {}", self.tau_max)));
        }
        if !(self.sample_every >= self.dt) {
            return Err(Error::invalid("sample spacing must be at least one step"));
        }
        RadialGrid::new(self.grid.r_max, self.grid.nodes)?;
        Ok(())
    }

    /// Short hex digest of the canonical JSON form.
    pub fn hash(&self) -> String {
        config_hash(self)
    }
}

pub(crate) fn config_hash<T: Serialize>(cfg: &T) -> String {
    let json = serde_json::to_vec(cfg).expect("config serializes");
    let digest = Sha256::digest(&json);
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Termination {
    Horizon,
    Blowup,
    Escaped,
}

/// Time series of the perturbation norms and the unstable coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvolutionTrace {
    pub tau_samples: Vec<f64>,
    pub sup_norm: Vec<f64>,
    pub sigma_norm: Vec<f64>,
    pub x_proxy_norm: Vec<f64>,
    pub c1: Vec<f64>,
    pub config_hash: String,
    pub termination: Termination,
    /// Evolved unknown at the last step.
    #[serde(skip)]
    pub final_state: Vec<f64>,
}

impl EvolutionTrace {
    pub fn len(&self) -> usize {
        self.tau_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau_samples.is_empty()
    }

    pub fn blowup(&self) -> bool {
        self.termination == Termination::Blowup
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("tau,sup,sigma,xproxy,c1\n");
        for i in 0..self.len() {
            s.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.tau_samples[i],
                self.sup_norm[i],
                self.sigma_norm[i],
                self.x_proxy_norm[i],
                self.c1[i]
            ));
        }
        s
    }
}
