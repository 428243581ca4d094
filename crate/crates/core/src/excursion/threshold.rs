use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DirectionRule, PointConfiguration};
use crate::radial_laws::RadialLaw;
use crate::special_functions::find_root;

use super::{exact_parts, p_tube_raw};

/// Which probability the threshold is calibrated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Tube,
    Exact,
}

const C_MIN: f64 = 1e-6;
const MAX_DOUBLINGS: usize = 64;

/// Threshold c with P(c) = `target`, where P is the tube or exact probability.
pub fn solve_threshold(config: &PointConfiguration, law: &RadialLaw, target: f64, method: Method) -> Result<f64> {
    let rule = DirectionRule::default();
    let prob = |c: f64| -> Result<f64> {
        match method {
            Method::Tube => p_tube_raw(config, law, c),
            Method::Exact => Ok(exact_parts(config, law, c, &rule)?.p_exact()),
        }
    };
    let at_min = prob(C_MIN)?;
    if !(target > 0.0 && target < at_min.min(1.0)) {
        return Err(Error::domain(format!(
            "target probability {target} is not attainable (must lie in (0, {}))",
            at_min.min(1.0)
        )));
    }
    let mut hi = 1.0;
    let mut doublings = 0;
    while prob(hi)? >= target {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::domain(format!("no threshold found below {hi} for target {target}")));
        }
    }
    find_root(|c| Ok(prob(c)? - target), C_MIN, hi, 1e-10, 1e-12 * target)
}
