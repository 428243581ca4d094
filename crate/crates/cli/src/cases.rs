//! The four reference experiments: three equicorrelated points (ρ = ¼) on 𝕊²
//! under different radial laws.

use std::io::Write;

use rayon::prelude::*;
use tubetail_core::excursion::fmt_f64;
use tubetail_core::{report, simulate_pmax, PointConfiguration, RadialLaw};

use crate::config::GridSpec;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Case {
    T,
    Lognormal,
    Bessel,
    Gauss,
}

pub const ALL_CASES: [Case; 4] = [Case::T, Case::Lognormal, Case::Bessel, Case::Gauss];

pub const DEFAULT_SEED: u64 = 1;

impl Case {
    pub fn name(self) -> &'static str {
        match self {
            Case::T => "t",
            Case::Lognormal => "lognormal",
            Case::Bessel => "bessel",
            Case::Gauss => "gauss",
        }
    }

    pub fn configuration(self) -> PointConfiguration {
        PointConfiguration::equicorrelated(3, 0.25).expect("valid preset configuration")
    }

    pub fn law(self) -> RadialLaw {
        let law = match self {
            Case::T => RadialLaw::f_dist(3.0, 3.0),
            Case::Lognormal => RadialLaw::log_normal().with_scale(3.0 * (-0.5f64).exp()),
            Case::Bessel => RadialLaw::bessel(3.0, 4.0).and_then(|l| l.with_scale(0.25)),
            Case::Gauss => RadialLaw::chi_square(3.0),
        };
        law.expect("valid preset law")
    }

    pub fn default_grid(self) -> GridSpec {
        let (start, stop, step) = match self {
            Case::T => (1.0, 10.0, 0.5),
            Case::Lognormal => (1.0, 50.0, 1.0),
            Case::Bessel => (1.0, 10.0, 0.5),
            Case::Gauss => (1.0, 8.0, 0.25),
        };
        GridSpec { start, stop, step }
    }
}

pub const REPRODUCE_HEADER: &str = "c,log_p_sim,p_sim,p_sim_se,log_p_tube,log_p_exact,log_p_lower,\
delta_exact,log_delta_exact,delta_pred,log_delta_pred,delta_bar";

fn opt(x: Option<f64>) -> String {
    x.filter(|v| v.is_finite()).map(fmt_f64).unwrap_or_default()
}

/// Writes the data behind the log-probability and relative-error curves of one case.
pub fn reproduce<W: Write>(case: Case, grid: &[f64], trials: u64, seed: u64, out: &mut W) -> Result<(), CliError> {
    let config = case.configuration();
    let law = case.law();
    let sim = simulate_pmax(&config, &law, grid, trials, seed)?;
    let rows = grid
        .par_iter()
        .map(|&c| report(&config, &law, c))
        .collect::<tubetail_core::Result<Vec<_>>>()?;
    writeln!(out, "{REPRODUCE_HEADER}")?;
    for (i, r) in rows.iter().enumerate() {
        let p_sim = sim.estimates[i];
        let log_sim = if p_sim > 0.0 { Some(p_sim.ln()) } else { None };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.c),
            opt(log_sim),
            fmt_f64(p_sim),
            fmt_f64(sim.std_errors[i]),
            fmt_f64(r.p_tube_raw.ln()),
            fmt_f64(r.p_exact.ln()),
            fmt_f64(r.p_lower.ln()),
            fmt_f64(r.delta_exact),
            opt(Some(r.log_delta_exact)),
            opt(r.prediction.delta()),
            opt(r.prediction.log_delta()),
            opt(r.prediction.delta_bar()),
        )?;
    }
    Ok(())
}
