use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::PointConfiguration;
use crate::radial_laws::{g_beta, r_beta, RadialLaw, TailBranch};
use crate::special_functions::{ln_gamma, log_beta, reg_inc_beta};

/// Large-c equivalent of D_k(θ, c), branch chosen from the law's tail class.
///
/// Thresholds are mapped to the unscaled family first (c ↦ c·scale^{-1/2}).
pub fn d_k_asymptotic(k: usize, n: usize, theta: f64, c: f64, law: &RadialLaw) -> Result<f64> {
    if k < 1 || k >= n {
        return Err(Error::domain(format!("k must lie in [1, n-1], got k={k}, n={n}")));
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::domain(format!("theta must lie in [0, pi/2], got {theta}")));
    }
    if !(c > 0.0) {
        return Err(Error::domain(format!("threshold must be positive, got {c}")));
    }
    let (p, q) = (k as f64 / 2.0, (n - k) as f64 / 2.0);
    let class = law.class_descriptor();
    let ln_b = log_beta(p, q)?;

    if class.branch() == TailBranch::RegularlyVarying {
        let gamma = class.gamma;
        let a = (log_beta(gamma + p, q)? - ln_b).exp();
        let cos2 = theta.cos().powi(2);
        return Ok(a * reg_inc_beta(cos2.clamp(0.0, 1.0), gamma + p, q)?);
    }

    let c_base = c * law.threshold_factor();
    let b = class.exponent_scale(c_base);
    if !(b > 0.0) {
        return Err(Error::Undefined(format!(
            "exponent scale b = {b} is not positive at c = {c}; the asymptotic regime is not reached"
        )));
    }
    if theta == 0.0 {
        return Ok((ln_gamma(q) - ln_b - q * b.ln()).exp());
    }
    let beta = class.beta;
    let (s, co) = theta.sin_cos();
    let cos2 = co * co;
    let ln_val = (k as f64 - 2.0 * beta + 2.0) * co.ln() + (n as f64 - k as f64 - 2.0) * s.ln()
        - b * g_beta(beta, cos2)?
        - r_beta(law, (c_base * c_base).max(1.0), cos2)?
        - ln_b
        - b.ln();
    Ok(ln_val.exp())
}

/// Predicted log Δ(c) for tail-valid laws (β < 1, or β = 1 with γ = ∞):
///
/// −b·g_β(cos²θ*) − ½ log b − r_β(c², cos²θ*) + log(cos^{n(1−β)}θ* / (2√π tan θ*)) + log(D/N),
/// with b = c^{2(1−β)} ℓ₀(c²), all evaluated at the scale-adjusted threshold.
pub fn log_delta_asymptotic(config: &PointConfiguration, law: &RadialLaw, c: f64) -> Result<f64> {
    let class = law.class_descriptor();
    if class.branch() == TailBranch::RegularlyVarying {
        return Err(Error::unsupported(format!(
            "{} is regularly varying: the relative error tends to delta_rv_limit, not zero",
            law.describe()
        )));
    }
    if config.len() < 2 {
        return Err(Error::domain("log_delta_asymptotic needs at least two points"));
    }
    if !(c > 0.0) {
        return Err(Error::domain(format!("threshold must be positive, got {c}")));
    }
    let cr = config.critical_radius();
    let c_base = c * law.threshold_factor();
    let h = c_base * c_base;
    let b = class.exponent_scale(c_base);
    if !(b > 0.0) || h < 1.0 {
        return Err(Error::Undefined(format!(
            "asymptotic formula undefined at c = {c} (adjusted threshold {c_base}, b = {b})"
        )));
    }
    let beta = class.beta;
    let n = config.dim() as f64;
    let cos_t = cr.cos2_theta.sqrt();
    let geometric = n * (1.0 - beta) * cos_t.ln() - (2.0 * PI.sqrt() * cr.tan_theta).ln();
    let multiplicity = (config.multiplicity() as f64 / config.len() as f64).ln();
    Ok(-b * g_beta(beta, cr.cos2_theta)? - 0.5 * b.ln() - r_beta(law, h, cr.cos2_theta)?
        + geometric
        + multiplicity)
}
