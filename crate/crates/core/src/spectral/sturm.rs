use super::TridiagonalOperator;
use crate::error::{Error, Result};

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(op: &TridiagonalOperator, x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    let tiny = f64::MIN_POSITIVE.sqrt();
    for i in 0..op.len() {
        let e2 = if i == 0 {
            0.0
        } else {
            op.offdiag[i - 1] * op.offdiag[i - 1]
        };
        q = op.diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin_lower(op: &TridiagonalOperator) -> f64 {
    let n = op.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { op.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { op.offdiag[i].abs() } else { 0.0 };
            op.diag[i] - left - right
        })
        .fold(f64::INFINITY, f64::min)
}

/// The `j`-th eigenvalue (0-based, ascending) by bisection on the Sturm count.
pub fn bisect_eigenvalue(op: &TridiagonalOperator, j: usize) -> Result<f64> {
    if j >= op.len() {
        return Err(Error::Eigen(format!(
            "index {j} beyond matrix size {}",
            op.len()
        )));
    }
    let mut lo = gershgorin_lower(op);
    if sturm_count(op, lo) > j {
        return Err(Error::Eigen("lower bound does not bracket".into()));
    }
    let mut step = 1.0f64.max(lo.abs() * 1e-3);
    let mut hi = lo + step;
    while sturm_count(op, hi) <= j {
        lo = hi;
        step *= 2.0;
        hi += step;
        if !hi.is_finite() {
            return Err(Error::Eigen("upper bound search overflowed".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(op, mid) > j {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Eigenvector for a converged eigenvalue and its residual
/// `‖(M − λ)v‖ / ‖v‖`.
pub fn inverse_iteration(op: &TridiagonalOperator, lambda: f64) -> Result<(Vec<f64>, f64)> {
    let n = op.len();
    let m = op.to_tridiagonal().shifted_scaled(-lambda, 1.0);
    let scale = op.diag.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tiny = f64::EPSILON * scale.max(1.0);
    // deterministic, non-symmetric start so no eigenvector is missed
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_7).sin())
        .collect();
    for _ in 0..4 {
        let w = m
            .solve_pivoted(&v, tiny)
            .ok_or_else(|| Error::Eigen(format!("inverse iteration failed at λ = {lambda}")))?;
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Eigen(format!("degenerate iterate at λ = {lambda}")));
        }
        v = w.into_iter().map(|x| x / norm).collect();
    }
    // fix the sign so the largest component is positive
    let big = v
        .iter()
        .copied()
        .fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
    if big < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let mv = op.apply(&v);
    let res = mv
        .iter()
        .zip(&v)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok((v, res))
}
