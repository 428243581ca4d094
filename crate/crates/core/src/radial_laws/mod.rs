//! Laws of the squared radius R_n = ‖ξ‖² of a spherically contoured vector.
//!
//! A [`RadialLaw`] is a base family together with a positive scale `a`,
//! meaning the law of `a·X` for `X` drawn from the family.

mod class;
mod tail;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use class::{g_beta, r_beta, SlowlyVarying, TailBranch, TailClass};

/// Base family of the squared radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    ChiSquare { nu: f64 },
    Chi { nu: f64 },
    FDist { nu1: f64, nu2: f64 },
    LogNormal,
    /// Product of independent χ²_{ν₁} and χ²_{ν₂} variables.
    Bessel { nu1: f64, nu2: f64 },
}

impl Family {
    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        let valid = match *self {
            Family::ChiSquare { nu } | Family::Chi { nu } => ok(nu),
            Family::FDist { nu1, nu2 } | Family::Bessel { nu1, nu2 } => ok(nu1) && ok(nu2),
            Family::LogNormal => true,
        };
        if valid {
            Ok(())
        } else {
            Err(Error::domain(format!("degrees of freedom must be positive and finite: {self:?}")))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::ChiSquare { .. } => "chi_square",
            Family::Chi { .. } => "chi",
            Family::FDist { .. } => "f",
            Family::LogNormal => "log_normal",
            Family::Bessel { .. } => "bessel",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LawSpec", into = "LawSpec")]
pub struct RadialLaw {
    family: Family,
    scale: f64,
}

impl RadialLaw {
    pub fn new(family: Family, scale: f64) -> Result<Self> {
        family.validate()?;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::domain(format!("scale must be positive and finite, got {scale}")));
        }
        Ok(Self { family, scale })
    }

    pub fn chi_square(nu: f64) -> Result<Self> {
        Self::new(Family::ChiSquare { nu }, 1.0)
    }

    pub fn chi(nu: f64) -> Result<Self> {
        Self::new(Family::Chi { nu }, 1.0)
    }

    pub fn f_dist(nu1: f64, nu2: f64) -> Result<Self> {
        Self::new(Family::FDist { nu1, nu2 }, 1.0)
    }

    pub fn log_normal() -> Self {
        Self { family: Family::LogNormal, scale: 1.0 }
    }

    pub fn bessel(nu1: f64, nu2: f64) -> Result<Self> {
        Self::new(Family::Bessel { nu1, nu2 }, 1.0)
    }

    pub fn with_scale(self, scale: f64) -> Result<Self> {
        Self::new(self.family, scale)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Factor κ = scale^{-1/2} mapping a threshold on the scaled law to the
    /// equivalent threshold on the base family: F̄_a(c²) = F̄(κ²c²).
    pub fn threshold_factor(&self) -> f64 {
        self.scale.powf(-0.5)
    }

    /// Pr(R > x).
    pub fn tail(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("tail requires x >= 0, got {x}")));
        }
        tail::base_tail(&self.family, x / self.scale)
    }

    /// log Pr(R > x); stays finite where the tail itself underflows.
    pub fn ln_tail(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("tail requires x >= 0, got {x}")));
        }
        tail::base_ln_tail(&self.family, x / self.scale)
    }

    /// True when each tail evaluation is itself a numerical integral.
    pub fn has_costly_tail(&self) -> bool {
        matches!(self.family, Family::Bessel { .. })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let chi2 = |nu: f64, rng: &mut R| -> f64 {
            ChiSquared::new(nu).expect("validated degrees of freedom").sample(rng)
        };
        let x = match self.family {
            Family::ChiSquare { nu } => chi2(nu, rng),
            Family::Chi { nu } => chi2(nu, rng).sqrt(),
            Family::FDist { nu1, nu2 } => (chi2(nu1, rng) / nu1) / (chi2(nu2, rng) / nu2),
            Family::LogNormal => {
                let z: f64 = StandardNormal.sample(rng);
                z.exp()
            }
            Family::Bessel { nu1, nu2 } => chi2(nu1, rng) * chi2(nu2, rng),
        };
        self.scale * x
    }

    pub fn class_descriptor(&self) -> TailClass {
        TailClass::of(self)
    }

    /// Short human-readable identifier, e.g. `f(3,3)*1`.
    pub fn describe(&self) -> String {
        let params = match self.family {
            Family::ChiSquare { nu } | Family::Chi { nu } => format!("({nu})"),
            Family::FDist { nu1, nu2 } | Family::Bessel { nu1, nu2 } => format!("({nu1},{nu2})"),
            Family::LogNormal => String::new(),
        };
        format!("{}{}*{}", self.family.name(), params, self.scale)
    }
}

/// Serialized form: `{"family": "chi_square"|"chi"|"f"|"log_normal"|"bessel", "nu", "nu1", "nu2", "scale"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSpec {
    pub family: FamilyTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    ChiSquare,
    Chi,
    F,
    LogNormal,
    Bessel,
}

impl TryFrom<LawSpec> for RadialLaw {
    type Error = Error;

    fn try_from(spec: LawSpec) -> Result<Self> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::domain(format!("family {:?} requires field `{name}`", spec.family)))
        };
        let family = match spec.family {
            FamilyTag::ChiSquare => Family::ChiSquare { nu: need(spec.nu, "nu")? },
            FamilyTag::Chi => Family::Chi { nu: need(spec.nu, "nu")? },
            FamilyTag::F => Family::FDist { nu1: need(spec.nu1, "nu1")?, nu2: need(spec.nu2, "nu2")? },
            FamilyTag::LogNormal => Family::LogNormal,
            FamilyTag::Bessel => Family::Bessel { nu1: need(spec.nu1, "nu1")?, nu2: need(spec.nu2, "nu2")? },
        };
        RadialLaw::new(family, spec.scale.unwrap_or(1.0))
    }
}

impl From<RadialLaw> for LawSpec {
    fn from(law: RadialLaw) -> Self {
        let mut spec = LawSpec { family: FamilyTag::LogNormal, nu: None, nu1: None, nu2: None, scale: Some(law.scale) };
        match law.family {
            Family::ChiSquare { nu } => {
                spec.family = FamilyTag::ChiSquare;
                spec.nu = Some(nu);
            }
            Family::Chi { nu } => {
                spec.family = FamilyTag::Chi;
                spec.nu = Some(nu);
            }
            Family::FDist { nu1, nu2 } => {
                spec.family = FamilyTag::F;
                spec.nu1 = Some(nu1);
                spec.nu2 = Some(nu2);
            }
            Family::LogNormal => {}
            Family::Bessel { nu1, nu2 } => {
                spec.family = FamilyTag::Bessel;
                spec.nu1 = Some(nu1);
                spec.nu2 = Some(nu2);
            }
        }
        spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn construction_validates() {
        assert!(RadialLaw::chi_square(0.0).is_err());
        assert!(RadialLaw::f_dist(3.0, -1.0).is_err());
        assert!(RadialLaw::log_normal().with_scale(0.0).is_err());
        assert!(RadialLaw::bessel(3.0, 4.0).unwrap().with_scale(0.25).is_ok());
    }

    #[test]
    fn negative_argument_rejected() {
        let law = RadialLaw::chi_square(3.0).unwrap();
        assert!(matches!(law.tail(-1.0), Err(Error::Domain(_))));
        assert!(law.ln_tail(f64::NAN).is_err());
    }

    #[test]
    fn json_roundtrip_and_missing_fields() {
        let law: RadialLaw = serde_json::from_str(r#"{"family":"bessel","nu1":3,"nu2":4,"scale":0.25}"#).unwrap();
        assert_eq!(law, RadialLaw::bessel(3.0, 4.0).unwrap().with_scale(0.25).unwrap());
        let text = serde_json::to_string(&law).unwrap();
        assert_eq!(serde_json::from_str::<RadialLaw>(&text).unwrap(), law);
        assert!(serde_json::from_str::<RadialLaw>(r#"{"family":"f","nu1":3}"#).is_err());
        assert!(serde_json::from_str::<RadialLaw>(r#"{"family":"chi_square","nu":-2}"#).is_err());
        let ln: RadialLaw = serde_json::from_str(r#"{"family":"log_normal"}"#).unwrap();
        assert_eq!(ln.scale(), 1.0);
    }

    fn sample_mean(law: &RadialLaw, n: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| law.sample(&mut rng)).sum::<f64>() / n as f64
    }

    #[test]
    fn chi_square_sample_mean() {
        let law = RadialLaw::chi_square(3.0).unwrap();
        assert!((sample_mean(&law, 1_000_000, 1) - 3.0).abs() < 0.01);
    }

    #[test]
    fn scaled_lognormal_sample_mean() {
        let law = RadialLaw::log_normal().with_scale(3.0 * (-0.5f64).exp()).unwrap();
        assert!((sample_mean(&law, 1_000_000, 2) - 3.0).abs() < 0.03);
    }

    #[test]
    fn scaled_bessel_sample_mean() {
        let law = RadialLaw::bessel(3.0, 4.0).unwrap().with_scale(0.25).unwrap();
        assert!((sample_mean(&law, 1_000_000, 3) - 3.0).abs() < 0.03);
    }
}
