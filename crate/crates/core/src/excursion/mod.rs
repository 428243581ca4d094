//! Tube (Bonferroni) approximation, exact excursion probability and the
//! relative error between them, for finite index sets.
//!
//! For T_i = ⟨u_i, ξ⟩:
//!
//! * `P_tube(c) = N·Pr(T₁ ≥ c)`
//! * `P(c) = Pr(max_i T_i ≥ c)`
//! * `Δ(c) = (P_tube(c) − P(c)) / P_tube(c)`
//!
//! The difference P_tube − P is evaluated directly as an integral over the
//! normal spheres (never by subtracting two nearly equal numbers), so Δ(c)
//! keeps full relative accuracy even when it is many orders of magnitude
//! below one.

mod asymptotic;
mod integrals;
mod report;
mod threshold;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DirectionRule, PointConfiguration};
use crate::radial_laws::RadialLaw;
use crate::special_functions::reg_inc_beta;

pub use asymptotic::{d_k_asymptotic, log_delta_asymptotic};
pub use report::{fmt_f64, report, report_grid, write_csv, ExcursionReport, Prediction, CSV_HEADER};
pub use threshold::{solve_threshold, Method};

use integrals::{weighted_cumulative, TailRatioIntegrand};

/// Pr(⟨u, ξ⟩ ≥ c) for a unit vector u, when ‖ξ‖² follows `law` in ℝⁿ.
pub fn marginal_tail(law: &RadialLaw, n: usize, c: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("dimension must be >= 2, got {n}")));
    }
    if c.is_nan() {
        return Err(Error::domain("threshold is NaN"));
    }
    if c == 0.0 {
        return Ok(0.5);
    }
    if c < 0.0 {
        return Ok(1.0 - marginal_tail(law, n, -c)?);
    }
    if c.is_infinite() {
        return Ok(0.0);
    }
    let f = TailRatioIntegrand::new(law, n, 1, c)?;
    Ok(0.5 * f.total()? * f.ln_tail_c2().exp())
}

/// Everything needed for P_tube, P and Δ at one threshold, kept in units of F̄(c²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactParts {
    pub c: f64,
    /// log F̄(c²).
    pub ln_scale: f64,
    /// P_tube / F̄(c²).
    pub tube: f64,
    /// (P_tube − P) / F̄(c²).
    pub overlap: f64,
    /// Standard error of `overlap` when the normal-sphere average is sampled (n > 3).
    pub overlap_se: Option<f64>,
}

impl ExactParts {
    pub fn p_tube_raw(&self) -> f64 {
        self.tube * self.ln_scale.exp()
    }

    pub fn p_exact(&self) -> f64 {
        ((self.tube - self.overlap) * self.ln_scale.exp()).max(0.0)
    }

    pub fn p_exact_se(&self) -> Option<f64> {
        self.overlap_se.map(|s| s * self.ln_scale.exp())
    }

    pub fn delta(&self) -> Result<f64> {
        if !(self.tube > 0.0) {
            return Err(Error::Undefined(format!("tube probability vanishes at c = {}", self.c)));
        }
        Ok(self.overlap / self.tube)
    }
}

/// Evaluates the tube and overlap integrals at threshold `c`.
pub fn exact_parts(config: &PointConfiguration, law: &RadialLaw, c: f64, rule: &DirectionRule) -> Result<ExactParts> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain(format!("threshold must be positive and finite, got {c}")));
    }
    let n = config.dim();
    let big_n = config.len();
    let integrand = TailRatioIntegrand::new(law, n, 1, c)?;
    let tube = big_n as f64 * 0.5 * integrand.total()?;

    let mut limits = Vec::new();
    let mut per_point = Vec::with_capacity(big_n);
    for i in 0..big_n {
        let profile = config.local_cos2_profile(i, rule)?;
        let w = 0.5 / profile.len() as f64;
        limits.extend(profile.iter().map(|&t| (t, w)));
        per_point.push(profile);
    }
    let overlap = weighted_cumulative(&integrand, &limits)?;

    let overlap_se = if rule.is_sampled(n) {
        // Per-node values of H(t) are needed for the spread; recompute them
        // by the same piecewise route, one point at a time.
        let mut var = 0.0;
        for profile in &per_point {
            let m = profile.len() as f64;
            let mut vals = Vec::with_capacity(profile.len());
            for &t in profile {
                vals.push(0.5 * integrand.up_to(t)?);
            }
            let mean = vals.iter().sum::<f64>() / m;
            let s2 = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
            var += s2 / m;
        }
        Some(var.sqrt())
    } else {
        None
    };

    Ok(ExactParts { c, ln_scale: integrand.ln_tail_c2(), tube, overlap, overlap_se })
}

/// Raw Bonferroni sum N·Pr(T₁ ≥ c); may exceed one at small c.
pub fn p_tube_raw(config: &PointConfiguration, law: &RadialLaw, c: f64) -> Result<f64> {
    Ok(config.len() as f64 * marginal_tail(law, config.dim(), c)?)
}

/// Bonferroni approximation, capped at one for reporting.
pub fn p_tube(config: &PointConfiguration, law: &RadialLaw, c: f64) -> Result<f64> {
    Ok(p_tube_raw(config, law, c)?.min(1.0))
}

/// Exact Pr(max_i T_i ≥ c) with the default normal-sphere rule.
pub fn p_exact(config: &PointConfiguration, law: &RadialLaw, c: f64) -> Result<f64> {
    Ok(exact_parts(config, law, c, &DirectionRule::default())?.p_exact())
}

/// Relative error Δ(c) of the Bonferroni approximation.
pub fn delta_exact(config: &PointConfiguration, law: &RadialLaw, c: f64) -> Result<f64> {
    exact_parts(config, law, c, &DirectionRule::default())?.delta()
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("tail index must lie in (0, inf), got {gamma}")));
    }
    Ok(())
}

fn rv_gamma(law: &RadialLaw) -> Result<f64> {
    let class = law.class_descriptor();
    if !class.is_regularly_varying() {
        return Err(Error::unsupported(format!(
            "{} is not regularly varying; use log_delta_asymptotic",
            law.describe()
        )));
    }
    Ok(class.gamma)
}

/// lim Δ(c) for a regularly varying radial law with index −γ:
/// (1/N) Σ_i E[I_{cos²θ(u_i,V_i)}(γ + 1/2, (n − 1)/2)].
pub fn delta_rv_limit(config: &PointConfiguration, gamma: f64) -> Result<f64> {
    delta_rv_limit_with(config, gamma, &DirectionRule::default())
}

pub fn delta_rv_limit_with(config: &PointConfiguration, gamma: f64, rule: &DirectionRule) -> Result<f64> {
    check_gamma(gamma)?;
    let p = gamma + 0.5;
    let q = (config.dim() - 1) as f64 / 2.0;
    let mut total = 0.0;
    for i in 0..config.len() {
        let profile = config.local_cos2_profile(i, rule)?;
        let mut s = 0.0;
        for &t in &profile {
            s += reg_inc_beta(t.clamp(0.0, 1.0), p, q)?;
        }
        total += s / profile.len() as f64;
    }
    Ok(total / config.len() as f64)
}

/// [`delta_rv_limit`] with γ read from the law's tail class.
pub fn delta_rv_limit_for_law(config: &PointConfiguration, law: &RadialLaw) -> Result<f64> {
    delta_rv_limit(config, rv_gamma(law)?)
}

/// Upper bound Δ̄ = I_{cos²θ*}(γ + 1/2, (n − 1)/2) on the limiting relative error.
pub fn delta_bar(config: &PointConfiguration, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let cr = config.critical_radius();
    reg_inc_beta(cr.cos2_theta, gamma + 0.5, (config.dim() - 1) as f64 / 2.0)
}

/// Asymptotic two-sided bound on P(c) for regularly varying laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
    /// The lower bound holds only for large c.
    pub asymptotic: bool,
}

/// ((1 − Δ̄)·P_tube, P_tube).
pub fn p_bounds(config: &PointConfiguration, law: &RadialLaw, c: f64) -> Result<Bounds> {
    let gamma = rv_gamma(law)?;
    let bar = delta_bar(config, gamma)?;
    let upper = p_tube_raw(config, law, c)?;
    Ok(Bounds { lower: (1.0 - bar) * upper, upper, asymptotic: true })
}

/// D_k(θ, c) = ∫_0^{cos²θ} F̄(c²/y)/F̄(c²) dP_{B_k}(y), B_k ~ Beta(k/2, (n−k)/2).
pub fn d_k_quadrature(k: usize, n: usize, theta: f64, c: f64, law: &RadialLaw) -> Result<f64> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::domain(format!("theta must lie in [0, pi/2], got {theta}")));
    }
    let f = TailRatioIntegrand::new(law, n, k, c)?;
    f.integrate(0.0, std::f64::consts::FRAC_PI_2 - theta)
}

/// Upper tail dependence coefficient λ_U of (T₁, T₂) for a two-point configuration.
pub fn tail_dependence(config: &PointConfiguration, law: &RadialLaw) -> Result<f64> {
    if config.len() != 2 {
        return Err(Error::domain(format!("tail dependence needs N = 2, got {}", config.len())));
    }
    if law.class_descriptor().is_regularly_varying() {
        Ok(2.0 * delta_rv_limit_for_law(config, law)?)
    } else {
        Ok(0.0)
    }
}
