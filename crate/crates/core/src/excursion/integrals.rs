//! Integrals of the radial tail against Beta laws.
//!
//! With (R_k, R̄_{n−k}) =ᵈ (R_n B_k, R_n(1 − B_k)), B_k ~ Beta(k/2, (n−k)/2)
//! independent of R_n, every probability here reduces to
//! ∫ F̄(c²/y) dP_{B_k}(y) over a sub-interval of [0, 1]. The substitution
//! y = sin²ψ turns the Beta density into 2 sin^{k−1}ψ cos^{n−k−1}ψ / B,
//! which is bounded for all k ≥ 1, n − k ≥ 1.
//!
//! Integrands are normalized by F̄(c²) and evaluated in log space, so the
//! results stay representable far into the tail.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::radial_laws::RadialLaw;
use crate::special_functions::{integrate, log_beta, ChebyshevTable, QuadratureSpec};

/// Relative accuracy of the normalized tail integrals.
pub(crate) const TAIL_REL_TOL: f64 = 1e-10;

/// Accuracy of tabulated log tails, well inside TAIL_REL_TOL.
const TABLE_TOL: f64 = 1e-13;

/// Log-ratio below which F̄(x)/F̄(c²) is treated as zero.
const NEGLIGIBLE_LN_RATIO: f64 = -760.0;

/// Merge window for nearly coincident profile values.
const MERGE_TOL: f64 = 1e-13;

/// F̄(c²/y)/F̄(c²) weighted by the Beta(k/2, (n−k)/2) law, in ψ coordinates.
pub(crate) struct TailRatioIntegrand<'a> {
    law: &'a RadialLaw,
    c2: f64,
    ln_tail_c2: f64,
    sin_pow: f64,
    cos_pow: f64,
    ln_norm: f64,
    // F̄ is nonincreasing, so beyond x_cut every ratio is below NEGLIGIBLE_LN_RATIO.
    x_cut: f64,
    // log F̄ as a function of log x on [log c², log x_cut], for costly tails
    table: Option<ChebyshevTable>,
}

impl<'a> TailRatioIntegrand<'a> {
    pub(crate) fn new(law: &'a RadialLaw, n: usize, k: usize, c: f64) -> Result<Self> {
        if k < 1 || k >= n {
            return Err(Error::domain(format!("k must lie in [1, n-1], got k={k}, n={n}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain(format!("threshold must be positive and finite, got {c}")));
        }
        let (p, q) = (k as f64 / 2.0, (n - k) as f64 / 2.0);
        let c2 = c * c;
        let ln_tail_c2 = law.ln_tail(c2)?;
        let ln_norm = 2f64.ln() - log_beta(p, q)?;
        let floor = ln_tail_c2 + NEGLIGIBLE_LN_RATIO - ln_norm.max(0.0);
        let mut x_cut = c2.max(1.0);
        while x_cut.is_finite() && law.ln_tail(x_cut)? > floor {
            x_cut *= 2.0;
        }
        let table = if law.has_costly_tail() && x_cut.is_finite() && x_cut > c2 {
            Some(ChebyshevTable::build(|s| law.ln_tail(s.exp()), c2.ln(), x_cut.ln(), TABLE_TOL)?)
        } else {
            None
        };
        Ok(Self {
            law,
            c2,
            ln_tail_c2,
            sin_pow: (k - 1) as f64,
            cos_pow: (n - k - 1) as f64,
            ln_norm,
            x_cut,
            table,
        })
    }

    /// log F̄(c²).
    pub(crate) fn ln_tail_c2(&self) -> f64 {
        self.ln_tail_c2
    }

    fn eval(&self, psi: f64) -> f64 {
        let (s, co) = psi.sin_cos();
        if s <= 0.0 {
            return 0.0;
        }
        let x = self.c2 / (s * s);
        if x >= self.x_cut {
            return 0.0;
        }
        let lt = match &self.table {
            Some(t) => t.eval(x.ln()),
            None => match self.law.ln_tail(x) {
                Ok(v) => v,
                Err(_) => return f64::NAN,
            },
        };
        let mut ln = lt - self.ln_tail_c2 + self.ln_norm;
        if self.sin_pow != 0.0 {
            ln += self.sin_pow * s.ln();
        }
        if self.cos_pow != 0.0 {
            if co <= 0.0 {
                return 0.0;
            }
            ln += self.cos_pow * co.ln();
        }
        ln.exp()
    }

    /// ∫_{ψ_lo}^{ψ_hi} of the normalized integrand.
    pub(crate) fn integrate(&self, psi_lo: f64, psi_hi: f64) -> Result<f64> {
        if psi_hi <= psi_lo {
            return Ok(0.0);
        }
        integrate(|p| self.eval(p), psi_lo, psi_hi, &QuadratureSpec::relative(TAIL_REL_TOL))
    }

    /// ∫_0^{t} F̄(c²/y)/F̄(c²) dP_{B_k}(y).
    pub(crate) fn up_to(&self, t: f64) -> Result<f64> {
        self.integrate(0.0, psi_of(t))
    }

    /// The whole-range value ∫_0^1 F̄(c²/y)/F̄(c²) dP_{B_k}(y) = Pr(R_k ≥ c²)/F̄(c²).
    pub(crate) fn total(&self) -> Result<f64> {
        self.integrate(0.0, FRAC_PI_2)
    }
}

pub(crate) fn psi_of(t: f64) -> f64 {
    t.clamp(0.0, 1.0).sqrt().asin()
}

/// Σ_i w_i ∫_0^{t_i} (normalized integrand), for arbitrary weighted upper limits.
///
/// Limits are sorted and the integral accumulated piecewise, so each node
/// costs one short integral instead of one from zero.
pub(crate) fn weighted_cumulative(integrand: &TailRatioIntegrand<'_>, limits: &[(f64, f64)]) -> Result<f64> {
    let mut sorted: Vec<(f64, f64)> = limits.iter().copied().filter(|&(t, w)| t > 0.0 && w != 0.0).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut knots: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for (t, w) in sorted {
        match knots.last_mut() {
            Some(last) if t - last.0 <= MERGE_TOL => last.1 += w,
            _ => knots.push((t, w)),
        }
    }
    let pieces: Vec<Result<f64>> = (0..knots.len())
        .into_par_iter()
        .map(|k| {
            let lo = if k == 0 { 0.0 } else { psi_of(knots[k - 1].0) };
            integrand.integrate(lo, psi_of(knots[k].0))
        })
        .collect();
    // Weight still "open" at piece k is the total weight of knots k.. .
    let mut remaining: f64 = knots.iter().map(|k| k.1).sum();
    let mut acc = 0.0;
    for (piece, knot) in pieces.into_iter().zip(&knots) {
        acc += remaining * piece?;
        remaining -= knot.1;
    }
    Ok(acc)
}
