use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DirectionRule, PointConfiguration};
use crate::radial_laws::{RadialLaw, TailBranch};

use super::{delta_bar, delta_rv_limit_with, exact_parts, log_delta_asymptotic, marginal_tail};

/// Asymptotic prediction of Δ(c), tagged by branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Prediction {
    /// Limit of Δ(c) for regularly varying laws (constant in c).
    Rv { limit: f64, bar: f64 },
    /// Predicted log Δ(c) for tail-valid laws; `None` before the formula is defined.
    Subexp { log_delta: Option<f64> },
}

impl Prediction {
    pub fn branch_tag(&self) -> &'static str {
        match self {
            Prediction::Rv { .. } => "RV",
            Prediction::Subexp { .. } => "SUBEXP",
        }
    }

    pub fn delta(&self) -> Option<f64> {
        match *self {
            Prediction::Rv { limit, .. } => Some(limit),
            Prediction::Subexp { log_delta } => log_delta.map(f64::exp),
        }
    }

    pub fn log_delta(&self) -> Option<f64> {
        match *self {
            Prediction::Rv { limit, .. } => Some(limit.ln()),
            Prediction::Subexp { log_delta } => log_delta,
        }
    }

    pub fn delta_bar(&self) -> Option<f64> {
        match *self {
            Prediction::Rv { bar, .. } => Some(bar),
            Prediction::Subexp { .. } => None,
        }
    }
}

/// One threshold's worth of tube/exact probabilities, relative error and bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionReport {
    pub c: f64,
    pub p_tube_raw: f64,
    pub p_tube: f64,
    pub p_exact: f64,
    /// (1 − Δ̄)·P_tube for regularly varying laws, the single-point bound
    /// Pr(T₁ ≥ c) otherwise.
    pub p_lower: f64,
    pub delta_exact: f64,
    pub log_delta_exact: f64,
    pub prediction: Prediction,
    pub flags: Vec<String>,
}

impl ExcursionReport {
    pub fn branch(&self) -> &'static str {
        self.prediction.branch_tag()
    }
}

/// Builds the report row at threshold `c`.
pub fn report(config: &PointConfiguration, law: &RadialLaw, c: f64) -> Result<ExcursionReport> {
    let rule = DirectionRule::default();
    let rv = law.class_descriptor().branch() == TailBranch::RegularlyVarying;
    let prediction = if rv {
        let gamma = law.class_descriptor().gamma;
        Prediction::Rv { limit: delta_rv_limit_with(config, gamma, &rule)?, bar: delta_bar(config, gamma)? }
    } else if config.len() >= 2 {
        match log_delta_asymptotic(config, law, c) {
            Ok(v) => Prediction::Subexp { log_delta: Some(v) },
            Err(Error::Undefined(_)) => Prediction::Subexp { log_delta: None },
            Err(e) => return Err(e),
        }
    } else {
        Prediction::Subexp { log_delta: None }
    };
    row(config, law, c, &rule, prediction)
}

fn row(
    config: &PointConfiguration,
    law: &RadialLaw,
    c: f64,
    rule: &DirectionRule,
    prediction: Prediction,
) -> Result<ExcursionReport> {
    let parts = exact_parts(config, law, c, rule)?;
    let p_tube_raw = parts.p_tube_raw();
    let p_exact = parts.p_exact();
    let delta = parts.delta()?;
    let mut flags = Vec::new();
    if p_tube_raw > 1.0 {
        flags.push("tube_capped".to_string());
    }
    let p_lower = match prediction {
        Prediction::Rv { bar, .. } => {
            let lower = (1.0 - bar) * p_tube_raw;
            if lower > p_exact {
                flags.push("pre_asymptotic".to_string());
            }
            lower
        }
        Prediction::Subexp { log_delta } => {
            if log_delta.is_none() && config.len() >= 2 {
                flags.push("no_prediction".to_string());
            }
            flags.push("single_point_lower".to_string());
            marginal_tail(law, config.dim(), c)?
        }
    };
    if parts.overlap_se.is_some() {
        flags.push("sampled_normals".to_string());
    }
    Ok(ExcursionReport {
        c,
        p_tube_raw,
        p_tube: p_tube_raw.min(1.0),
        p_exact,
        p_lower,
        delta_exact: delta,
        log_delta_exact: delta.ln(),
        prediction,
        flags,
    })
}

/// Reports over a grid of thresholds; rows are independent and evaluated in parallel.
pub fn report_grid(config: &PointConfiguration, law: &RadialLaw, grid: &[f64]) -> Result<Vec<ExcursionReport>> {
    grid.par_iter().map(|&c| report(config, law, c)).collect()
}

pub const CSV_HEADER: &str = "c,p_tube,p_tube_capped,p_exact,p_lower,delta_exact,delta_pred,branch,flags";

/// 17 significant digits, the round-trip precision of f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes report rows as CSV (`CSV_HEADER` columns). Missing predictions are empty fields.
pub fn write_csv<W: Write>(out: &mut W, rows: &[ExcursionReport]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let pred = r.prediction.delta().map(fmt_f64).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.c),
            fmt_f64(r.p_tube_raw),
            fmt_f64(r.p_tube),
            fmt_f64(r.p_exact),
            fmt_f64(r.p_lower),
            fmt_f64(r.delta_exact),
            pred,
            r.branch(),
            r.flags.join(";")
        )?;
    }
    Ok(())
}
