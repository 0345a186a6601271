use serde::{Deserialize, Serialize};

use super::config_hash;
use super::fit::linear_fit;
use super::operator::{radial_operator, Explicit, ImexStepper, OuterBc};
use crate::error::{Error, Result};
use crate::model::{weinkove, Dimension, GridFunction, RadialGrid};

/// Physical-time run of `u_t = Δu + (d−2)u²(3 − r²u)` in `n = d+2`
/// dimensions, with step `min(dt_max, dt_sim / sup u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PhysicalConfig {
    pub d: i64,
    pub grid: RadialGrid,
    pub dt_max: f64,
    /// Step as a fraction of the current blowup time scale `1/sup u`.
    pub dt_sim: f64,
    pub theta: f64,
    pub t_max: f64,
    /// Stop once the core `1/√(a·sup u)` spans fewer nodes than this.
    pub core_points: f64,
    pub sup_max: f64,
    /// The blowup-time fit uses the samples with `sup u ≥ sup_last / fit_ratio`.
    pub fit_ratio: f64,
}

impl PhysicalConfig {
    pub fn physical(d: i64) -> Self {
        Self {
            d,
            grid: RadialGrid {
                r_max: 8.0,
                nodes: 16000,
            },
            dt_max: 1e-3,
            dt_sim: 1e-3,
            theta: 0.5,
            t_max: 10.0,
            core_points: 20.0,
            sup_max: 1e8,
            fit_ratio: 4.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt_max > 0.0 && self.dt_max <= super::MAX_DT) {
            return Err(Error::invalid(format!(
                "dt_max must lie in (0, {}], got {}",
                super::MAX_DT,
                self.dt_max
            )));
        }
        if !(self.dt_sim > 0.0 && self.dt_sim <= 0.1) {
            return Err(Error::invalid(format!(
                "dt_sim must lie in (0, 0.1], got {}",
                self.dt_sim
            )));
        }
        if !(0.5..=1.0).contains(&self.theta) {
            return Err(Error::invalid(format!(
                "theta must lie in [1/2, 1], got {}",
                self.theta
            )));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::invalid(format!("bad horizon {}", self.t_max)));
        }
        if !(self.core_points >= 2.0 && self.sup_max > 0.0 && self.fit_ratio > 1.0) {
            return Err(Error::invalid(
                "need core_points ≥ 2, sup_max > 0 and fit_ratio > 1",
            ));
        }
        RadialGrid::new(self.grid.r_max, self.grid.nodes)?;
        Ok(())
    }

    pub fn hash(&self) -> String {
        config_hash(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PhysicalResult {
    pub times: Vec<f64>,
    pub sups: Vec<f64>,
    /// Blowup time from the line `1/sup u ≈ b(T − t)` near the end of the run.
    #[serde(rename = "Tfit")]
    pub tfit: Option<f64>,
    pub fit_r2: Option<f64>,
    /// `sup_{ρ ≤ 10} |s·u(√s ρ) − W(ρ)|` at the last time, `s = Tfit − t`.
    pub profile_distance: Option<f64>,
    pub blowup: bool,
    pub global_looking: bool,
    pub config_hash: String,
    #[serde(skip)]
    pub final_state: Option<GridFunction>,
}

impl PhysicalResult {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,sup,inv_sup\n");
        for (t, u) in self.times.iter().zip(&self.sups) {
            s.push_str(&format!("{t:.16e},{u:.16e},{:.16e}\n", 1.0 / u));
        }
        s
    }
}

fn sup_of(f: &GridFunction) -> f64 {
    f.sup().max(f.origin_value().abs())
}

struct RawRun {
    times: Vec<f64>,
    sups: Vec<f64>,
    state: GridFunction,
    stopped: bool,
    snapshots: Vec<GridFunction>,
}

/// Integrate up to `t_max` or a resolution/size stop; states are captured at
/// each checkpoint (steps are shortened to land on them).
fn integrate(
    dim: &Dimension,
    u0: &GridFunction,
    cfg: &PhysicalConfig,
    checkpoints: &[f64],
) -> Result<RawRun> {
    cfg.validate()?;
    if cfg.d != dim.d {
        return Err(Error::invalid(format!(
            "config is for d = {}, dimension is d = {}",
            cfg.d, dim.d
        )));
    }
    if u0.grid != cfg.grid {
        return Err(Error::invalid("initial data must live on the solver grid"));
    }
    if u0.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("initial data must be finite"));
    }
    let grid = cfg.grid;
    let h = grid.h();
    let (a, ghost) = radial_operator(dim.n, grid, false, OuterBc::DirichletZero);
    let mut forcing = vec![0.0; grid.nodes];
    forcing[grid.nodes - 1] = ghost * u0.interpolate(grid.r_max);
    let rho2 = grid.points().iter().map(|r| r * r).collect();
    let explicit = Explicit::Absolute {
        d: dim.d as f64,
        rho2,
    };
    let mut stepper = ImexStepper::new(a, forcing, explicit, cfg.theta)?;

    let mut u = u0.clone();
    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut sups = vec![sup_of(&u)];
    let mut snapshots = Vec::new();
    let mut next_cp = 0;
    let mut stopped = false;
    while next_cp < checkpoints.len() && checkpoints[next_cp] <= 0.0 {
        snapshots.push(u.clone());
        next_cp += 1;
    }
    loop {
        let sup = *sups.last().expect("nonempty");
        let core = 1.0 / (dim.a * sup).sqrt();
        if sup > cfg.sup_max || core < cfg.core_points * h {
            stopped = true;
            break;
        }
        if t >= cfg.t_max {
            break;
        }
        let mut dt = cfg.dt_max.min(cfg.dt_sim / sup).min(cfg.t_max - t);
        let mut hit = false;
        if next_cp < checkpoints.len() && t + dt >= checkpoints[next_cp] * (1.0 - 1e-14) {
            dt = checkpoints[next_cp] - t;
            hit = true;
        }
        if !(dt > 1e-14 * t.max(1.0)) {
            // dt underflow: report the last resolved state
            stopped = true;
            break;
        }
        stepper.step(&mut u.values, dt)?;
        t = if hit { checkpoints[next_cp] } else { t + dt };
        let s = sup_of(&u);
        if !s.is_finite() {
            return Err(Error::Divergence { tau: t, sup: s });
        }
        times.push(t);
        sups.push(s);
        if hit {
            snapshots.push(u.clone());
            next_cp += 1;
        }
    }
    Ok(RawRun {
        times,
        sups,
        state: u,
        stopped,
        snapshots,
    })
}

fn blowup_fit(times: &[f64], sups: &[f64], ratio: f64) -> Result<(f64, f64)> {
    let last = *sups.last().expect("nonempty");
    let start = sups
        .iter()
        .rposition(|&s| s < last / ratio)
        .map_or(0, |i| i + 1);
    let x = &times[start..];
    let y: Vec<f64> = sups[start..].iter().map(|s| 1.0 / s).collect();
    if x.len() < 10 {
        return Err(Error::invalid(
            "too few samples in the last decade to fit the blowup time",
        ));
    }
    let f = linear_fit(x, &y)?;
    if !(f.slope < 0.0) {
        return Err(Error::invalid(
            "1/sup u is not decreasing near the end of the run",
        ));
    }
    Ok((-f.intercept / f.slope, f.r2))
}

fn profile_distance(dim: &Dimension, u: &GridFunction, s: f64) -> f64 {
    let rs = s.sqrt();
    (0..=1000)
        .map(|i| {
            let rho = i as f64 * 0.01;
            (s * u.interpolate(rs * rho) - weinkove(dim, rho)).abs()
        })
        .fold(0.0, f64::max)
}

pub fn run_physical(
    dim: &Dimension,
    u0: &GridFunction,
    cfg: &PhysicalConfig,
) -> Result<PhysicalResult> {
    let raw = integrate(dim, u0, cfg, &[])?;
    let mut res = PhysicalResult {
        times: raw.times,
        sups: raw.sups,
        tfit: None,
        fit_r2: None,
        profile_distance: None,
        blowup: raw.stopped,
        global_looking: !raw.stopped,
        config_hash: cfg.hash(),
        final_state: None,
    };
    if raw.stopped {
        let (tfit, r2) = blowup_fit(&res.times, &res.sups, cfg.fit_ratio)?;
        res.tfit = Some(tfit);
        res.fit_r2 = Some(r2);
        let s = tfit - res.times.last().expect("nonempty");
        if s > 0.0 {
            res.profile_distance = Some(profile_distance(dim, &raw.state, s));
        }
    }
    res.final_state = Some(raw.state);
    Ok(res)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScalingReport {
    pub lambda: f64,
    pub checkpoints: Vec<f64>,
    /// `max_k sup_r |u_λ(r, t_k) − λ²u(λr, λ²t_k)| / sup u`.
    pub max_rel_error: f64,
    /// Estimated share of cubic interpolation in `max_rel_error`.
    pub interpolation_error: f64,
}

/// Every other node of `f`; used to estimate the interpolation error.
fn coarsen(f: &GridFunction) -> Option<GridFunction> {
    let n = f.grid.nodes / 2;
    let h2 = 2.0 * f.grid.h();
    let grid = RadialGrid::new((n + 1) as f64 * h2, n).ok()?;
    GridFunction::new(grid, (1..=n).map(|i| f.values[2 * i - 1]).collect()).ok()
}

/// Compare the run from `λ²u0(λ·)` against the rescaled run from `u0` on the
/// same grid, at the given checkpoints of the rescaled clock.
pub fn scaling_check(
    dim: &Dimension,
    u0: &GridFunction,
    lambda: f64,
    cfg: &PhysicalConfig,
    checkpoints: &[f64],
) -> Result<ScalingReport> {
    if !(0.5..=2.0).contains(&lambda) {
        return Err(Error::invalid(format!(
            "lambda must lie in [1/2, 2], got {lambda}"
        )));
    }
    if checkpoints.is_empty()
        || checkpoints.windows(2).any(|w| w[1] <= w[0])
        || checkpoints[0] <= 0.0
    {
        return Err(Error::invalid(
            "checkpoints must be positive and increasing",
        ));
    }
    let l2 = lambda * lambda;
    let mut base_cfg = cfg.clone();
    base_cfg.t_max = l2 * checkpoints[checkpoints.len() - 1];
    let mut scaled_cfg = cfg.clone();
    scaled_cfg.dt_max = cfg.dt_max / l2;
    scaled_cfg.t_max = checkpoints[checkpoints.len() - 1];
    let ul = u0.map(|r, _| l2 * u0.interpolate(lambda * r));
    let base_cp: Vec<f64> = checkpoints.iter().map(|t| l2 * t).collect();
    let (base, scaled) = rayon::join(
        || integrate(dim, u0, &base_cfg, &base_cp),
        || integrate(dim, &ul, &scaled_cfg, checkpoints),
    );
    let (base, scaled) = (base?, scaled?);
    if base.snapshots.len() != checkpoints.len() || scaled.snapshots.len() != checkpoints.len() {
        return Err(Error::invalid("run stopped before the last checkpoint"));
    }
    let r_top = cfg.grid.r_max.min(cfg.grid.r_max / lambda);
    let norm = base.sups.iter().fold(0.0f64, |m, s| m.max(*s));
    let mut err = 0.0f64;
    let mut interp = 0.0f64;
    for (u, v) in base.snapshots.iter().zip(&scaled.snapshots) {
        let coarse = coarsen(u);
        for (r, vr) in v.points().into_iter().zip(&v.values) {
            if r > r_top {
                break;
            }
            let fine = u.interpolate(lambda * r);
            err = err.max((vr - l2 * fine).abs());
            if let Some(c) = &coarse {
                // fourth-order interpolation: e_h ≈ (I_2h − I_h)/15
                interp = interp.max(l2 * (c.interpolate(lambda * r) - fine).abs() / 15.0);
            }
        }
    }
    Ok(ScalingReport {
        lambda,
        checkpoints: checkpoints.to_vec(),
        max_rel_error: err / (l2 * norm),
        interpolation_error: interp / (l2 * norm),
    })
}

/// Fitted blowup times `(T(u0), λ²·T(u_λ))`; equal under exact scaling.
pub fn scaling_blowup_times(
    dim: &Dimension,
    u0: &GridFunction,
    lambda: f64,
    cfg: &PhysicalConfig,
) -> Result<(f64, f64)> {
    let l2 = lambda * lambda;
    let ul = u0.map(|r, _| l2 * u0.interpolate(lambda * r));
    let mut scaled_cfg = cfg.clone();
    scaled_cfg.dt_max = cfg.dt_max / l2;
    scaled_cfg.t_max = cfg.t_max / l2;
    let (a, b) = rayon::join(
        || run_physical(dim, u0, cfg),
        || run_physical(dim, &ul, &scaled_cfg),
    );
    let (a, b) = (a?, b?);
    match (a.tfit, b.tfit) {
        (Some(t), Some(tl)) => Ok((t, l2 * tl)),
        _ => Err(Error::invalid("no blowup detected in one of the runs")),
    }
}
