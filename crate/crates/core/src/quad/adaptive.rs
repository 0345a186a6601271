//! Globally adaptive 7/15-point Gauss–Kronrod quadrature.

use serde::{Deserialize, Serialize};

use super::{IntegralResult, QuadMethod};
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const MAX_SUBDIVISIONS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl AdaptiveOptions {
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol: 0.0,
            max_subdivisions: MAX_SUBDIVISIONS,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment {
        lo,
        hi,
        value,
        error: err,
    }
}

fn adaptive_finite<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    opts: &AdaptiveOptions,
) -> Result<(f64, f64)> {
    let mut segments = vec![kronrod15(f, lo, hi)];
    loop {
        let total: f64 = sum_ordered(&segments, |s| s.value);
        let err: f64 = sum_ordered(&segments, |s| s.error);
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                lo,
                hi,
                value: total,
                error: err,
                subdivisions: segments.len(),
            });
        }
        if err <= target {
            return Ok((total, err));
        }
        if segments.len() >= opts.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                lo,
                hi,
                value: total,
                error: err,
                subdivisions: segments.len(),
            });
        }
        // split the worst segment; ties resolve to the leftmost
        let (worst, _) =
            segments
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |(bi, be), (i, s)| {
                    if s.error > be {
                        (i, s.error)
                    } else {
                        (bi, be)
                    }
                });
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.lo + s.hi);
        if mid <= s.lo || mid >= s.hi {
            // interval exhausted at double precision
            return Err(Error::QuadratureNonConvergence {
                lo,
                hi,
                value: total,
                error: err,
                subdivisions: segments.len() + 1,
            });
        }
        segments.push(kronrod15(f, s.lo, mid));
        segments.push(kronrod15(f, mid, s.hi));
    }
}

/// Sum in increasing order of the left endpoint so the result does not
/// depend on the refinement history.
fn sum_ordered(segments: &[Segment], key: impl Fn(&Segment) -> f64) -> f64 {
    let mut idx: Vec<usize> = (0..segments.len()).collect();
    idx.sort_by(|&i, &j| segments[i].lo.total_cmp(&segments[j].lo));
    idx.into_iter().map(|i| key(&segments[i])).sum()
}

/// Integrate `f` over `[lo, hi]`; `hi` may be `f64::INFINITY`.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<IntegralResult> {
    adaptive_integrate_with(f, lo, hi, &AdaptiveOptions::relative(rel_tol))
}

pub fn adaptive_integrate_with<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    opts: &AdaptiveOptions,
) -> Result<IntegralResult> {
    if !(1e-14..=1e-2).contains(&opts.rel_tol) {
        return Err(Error::invalid(format!(
            "relative tolerance {} outside [1e-14, 1e-2]",
            opts.rel_tol
        )));
    }
    if lo.is_nan() || hi.is_nan() || !lo.is_finite() || lo >= hi {
        return Err(Error::invalid(format!("bad interval [{lo}, {hi}]")));
    }
    let (value, error) = if hi.is_infinite() {
        // x = lo + t / (1 - t), t in [0, 1)
        let g = |t: f64| {
            let one_m = 1.0 - t;
            let x = lo + t / one_m;
            let v = f(x) / (one_m * one_m);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        adaptive_finite(&g, 0.0, 1.0, opts)?
    } else {
        adaptive_finite(&f, lo, hi, opts)?
    };
    Ok(IntegralResult {
        value,
        error_bound: error,
        method: QuadMethod::Adaptive,
        exact_form: None,
    })
}

/// Integrate over consecutive pieces `[p0, p1], [p1, p2], ...`, useful when
/// the integrand has known kinks.
pub fn adaptive_integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    rel_tol: f64,
) -> Result<IntegralResult> {
    if points.len() < 2 {
        return Err(Error::invalid("need at least two break points"));
    }
    let mut value = 0.0;
    let mut error = 0.0;
    for w in points.windows(2) {
        let r = adaptive_integrate(&f, w[0], w[1], rel_tol)?;
        value += r.value;
        error += r.error_bound;
    }
    Ok(IntegralResult {
        value,
        error_bound: error,
        method: QuadMethod::Adaptive,
        exact_form: None,
    })
}
