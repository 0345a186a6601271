use serde::{Deserialize, Serialize};

use super::EvolutionTrace;
use crate::error::{Error, Result};

pub const MIN_FIT_SAMPLES: usize = 10;

/// Ordinary least squares `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid(
            "linear fit needs at least two paired samples",
        ));
    }
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    if !(sxx > 0.0) {
        return Err(Error::invalid("degenerate abscissae in linear fit"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| (yi - slope * xi - intercept).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(LinearFit {
        slope,
        intercept,
        r2,
    })
}

/// Exponential rate from a log-linear fit; `omega > 0` means decay for
/// [`fit_decay_rate`] and growth for [`fit_growth_rate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RateFit {
    pub omega: f64,
    pub r2: f64,
    pub samples: usize,
}

fn log_fit(tau: &[f64], y: &[f64], window: (f64, f64)) -> Result<(LinearFit, usize)> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::invalid(format!("empty window [{lo}, {hi}]")));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (&t, &v) in tau.iter().zip(y) {
        if t >= lo - 1e-12 && t <= hi + 1e-12 {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!(
                    "non-positive norm {v} at tau = {t}"
                )));
            }
            xs.push(t);
            ys.push(v.ln());
        }
    }
    if xs.len() < MIN_FIT_SAMPLES {
        return Err(Error::invalid(format!(
            "window [{lo}, {hi}] holds {} samples, need {MIN_FIT_SAMPLES}",
            xs.len()
        )));
    }
    Ok((linear_fit(&xs, &ys)?, xs.len()))
}

/// Slope of `−log ‖ψ − W‖_σ` against τ on the window.
pub fn fit_decay_rate(trace: &EvolutionTrace, window: (f64, f64)) -> Result<RateFit> {
    let (f, samples) = log_fit(&trace.tau_samples, &trace.sigma_norm, window)?;
    Ok(RateFit {
        omega: -f.slope,
        r2: f.r2,
        samples,
    })
}

/// Slope of `log |c₁|` against τ on the window.
pub fn fit_growth_rate(trace: &EvolutionTrace, window: (f64, f64)) -> Result<RateFit> {
    let c: Vec<f64> = trace.c1.iter().map(|c| c.abs()).collect();
    let (f, samples) = log_fit(&trace.tau_samples, &c, window)?;
    Ok(RateFit {
        omega: f.slope,
        r2: f.r2,
        samples,
    })
}
