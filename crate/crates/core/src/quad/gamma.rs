use crate::error::{Error, Result};

/// Gamma function for positive real arguments.
///
/// Integers up to 20 use the exact factorial, half-integers up to 20.5 use
/// the closed product with √π; everything else goes through `libm::tgamma`.
pub fn gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::invalid(format!("gamma needs z > 0, got {z}")));
    }
    if z.fract() == 0.0 && z <= 20.0 {
        let k = z as u64;
        return Ok((1..k).product::<u64>() as f64);
    }
    if (z - 0.5).fract() == 0.0 && z <= 20.5 {
        // Γ(k + 1/2) = (2k)! / (4^k k!) √π = √π ∏_{j=1}^{k} (j - 1/2)
        let k = (z - 0.5) as u64;
        let prod: f64 = (1..=k).map(|j| j as f64 - 0.5).product();
        return Ok(prod * std::f64::consts::PI.sqrt());
    }
    Ok(libm::tgamma(z))
}

/// Surface area of the unit sphere in ℝⁿ, `2 π^{n/2} / Γ(n/2)`.
pub fn unit_sphere_area(n: u32) -> f64 {
    let half = n as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma(half).expect("n >= 1")
}
