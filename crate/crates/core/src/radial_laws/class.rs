use crate::error::{Error, Result};

use super::{Family, RadialLaw};

/// Leading term ℓ₀ of the slowly varying part of the hazard q(t) = ℓ(t)/t^β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlowlyVarying {
    Constant(f64),
    Log,
}

impl SlowlyVarying {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            SlowlyVarying::Constant(v) => v,
            SlowlyVarying::Log => t.ln(),
        }
    }
}

/// Which asymptotic regime governs the relative error of the tube approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailBranch {
    /// β = 1 with finite γ: regularly varying, relative error tends to a positive constant.
    RegularlyVarying,
    /// β ∈ (0, 1], γ = ∞ when β = 1: subexponential but not regularly varying.
    Subexponential,
    /// β ≤ 0: not heavy-tailed.
    LightTailed,
}

impl TailBranch {
    pub fn tag(&self) -> &'static str {
        match self {
            TailBranch::RegularlyVarying => "RV",
            TailBranch::Subexponential | TailBranch::LightTailed => "SUBEXP",
        }
    }
}

/// Membership of a law in the class 𝓛_{β,γ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailClass {
    pub beta: f64,
    /// `f64::INFINITY` when unbounded.
    pub gamma: f64,
    pub leading: SlowlyVarying,
    /// Limit constant C of the tail representation. Never needed numerically
    /// (it cancels in every tail ratio), so it is not evaluated.
    pub limit_constant: Option<f64>,
    /// Scale of the law; asymptotic formulas are evaluated at c·scale^{-1/2}.
    pub scale: f64,
}

impl TailClass {
    pub(super) fn of(law: &RadialLaw) -> Self {
        let (beta, gamma, leading) = match law.family {
            Family::ChiSquare { .. } => (0.0, 0.5, SlowlyVarying::Constant(0.5)),
            Family::Chi { .. } => (-1.0, 1.0, SlowlyVarying::Constant(1.0)),
            Family::FDist { nu2, .. } => (1.0, nu2 / 2.0, SlowlyVarying::Constant(nu2 / 2.0)),
            Family::LogNormal => (1.0, f64::INFINITY, SlowlyVarying::Log),
            Family::Bessel { .. } => (0.5, 0.5, SlowlyVarying::Constant(0.5)),
        };
        TailClass { beta, gamma, leading, limit_constant: None, scale: law.scale }
    }

    pub fn ell0(&self, t: f64) -> f64 {
        self.leading.eval(t)
    }

    pub fn branch(&self) -> TailBranch {
        if self.beta == 1.0 && self.gamma.is_finite() {
            TailBranch::RegularlyVarying
        } else if self.beta > 0.0 {
            TailBranch::Subexponential
        } else {
            TailBranch::LightTailed
        }
    }

    pub fn is_regularly_varying(&self) -> bool {
        self.branch() == TailBranch::RegularlyVarying
    }

    /// b = h^{1−β} ℓ₀(h) at h = c², the exponent scale of the asymptotic formulas.
    pub fn exponent_scale(&self, c: f64) -> f64 {
        let h = c * c;
        h.powf(1.0 - self.beta) * self.ell0(h)
    }
}

/// g_β(y) = (y^{β−1} − 1)/(1 − β) for β < 1 and −log y for β = 1.
pub fn g_beta(beta: f64, y: f64) -> Result<f64> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::domain(format!("g_beta requires y in (0, 1], got {y}")));
    }
    if beta > 1.0 {
        return Err(Error::domain(format!("g_beta requires beta <= 1, got {beta}")));
    }
    if beta == 1.0 {
        Ok(-y.ln())
    } else {
        Ok(((beta - 1.0) * y.ln()).exp_m1() / (1.0 - beta))
    }
}

/// Limit of r_β(h, y) as h → ∞ for the leading terms ℓ₀ used by [`TailClass`].
///
/// The law's own scale is irrelevant here: callers evaluate at the
/// substituted threshold.
pub fn r_beta(law: &RadialLaw, h: f64, y: f64) -> Result<f64> {
    if !(h >= 1.0) {
        return Err(Error::domain(format!("r_beta requires h >= 1, got {h}")));
    }
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::domain(format!("r_beta requires y in (0, 1], got {y}")));
    }
    let ly = y.ln();
    match law.family {
        Family::ChiSquare { nu } => Ok((nu - 2.0) / 2.0 * ly),
        // ℓ(x) = 1 − (ν−2)/x², ℓ₀ = 1
        Family::Chi { nu } => Ok((nu - 2.0) * ly),
        Family::Bessel { nu1, nu2 } => Ok((nu1 + nu2 - 3.0) / 4.0 * ly),
        Family::LogNormal => Ok(0.5 * ly * ly),
        Family::FDist { .. } => Err(Error::unsupported(
            "r_beta is not defined for regularly varying laws; use the limiting relative error",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_of_classes() {
        let f = RadialLaw::f_dist(3.0, 3.0).unwrap().class_descriptor();
        assert_eq!((f.beta, f.gamma), (1.0, 1.5));
        assert!(f.is_regularly_varying());
        let b = RadialLaw::bessel(3.0, 4.0).unwrap().class_descriptor();
        assert_eq!((b.beta, b.gamma), (0.5, 0.5));
        assert_eq!(b.branch(), TailBranch::Subexponential);
        let c = RadialLaw::chi(5.0).unwrap().class_descriptor();
        assert_eq!((c.beta, c.gamma), (-1.0, 1.0));
        assert_eq!(c.branch(), TailBranch::LightTailed);
        let ln = RadialLaw::log_normal().class_descriptor();
        assert_eq!(ln.beta, 1.0);
        assert!(ln.gamma.is_infinite());
        assert_eq!(ln.branch(), TailBranch::Subexponential);
        assert!((ln.ell0(std::f64::consts::E) - 1.0).abs() < 1e-15);
        let g = RadialLaw::chi_square(3.0).unwrap().class_descriptor();
        assert_eq!((g.beta, g.gamma, g.ell0(10.0)), (0.0, 0.5, 0.5));
    }

    #[test]
    fn g_beta_examples() {
        for beta in [-1.0, 0.0, 0.5, 1.0] {
            assert_eq!(g_beta(beta, 1.0).unwrap(), 0.0);
        }
        assert!((g_beta(0.0, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((g_beta(0.5, 0.25).unwrap() - 2.0).abs() < 1e-15);
        assert!(g_beta(0.5, 0.0).is_err());
        assert!(g_beta(0.5, 1.5).is_err());
    }

    #[test]
    fn g_beta_continuous_at_one() {
        for &y in &[1e-6, 0.01, 0.3, 0.625, 0.99] {
            let near = g_beta(1.0 - 1e-8, y).unwrap();
            assert!((near + f64::ln(y)).abs() < 1e-6, "y={y}");
        }
    }

    #[test]
    fn r_beta_closed_forms() {
        let y: f64 = 0.4;
        let chi2 = RadialLaw::chi_square(3.0).unwrap();
        assert!((r_beta(&chi2, 50.0, y).unwrap() - 0.5 * y.ln()).abs() < 1e-15);
        let bessel = RadialLaw::bessel(3.0, 4.0).unwrap();
        assert!((r_beta(&bessel, 7.0, y).unwrap() - y.ln()).abs() < 1e-15);
        let ln = RadialLaw::log_normal();
        assert_eq!(r_beta(&ln, 10.0, 1.0).unwrap(), 0.0);
        assert!((r_beta(&ln, 10.0, y).unwrap() - 0.5 * y.ln().powi(2)).abs() < 1e-15);
        let f = RadialLaw::f_dist(3.0, 3.0).unwrap();
        assert!(matches!(r_beta(&f, 10.0, y), Err(Error::Unsupported(_))));
        assert!(r_beta(&chi2, 0.5, y).is_err());
    }
}
