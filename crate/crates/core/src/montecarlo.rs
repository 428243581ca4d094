//! Seeded simulation of the field T_i = ⟨u_i, ξ⟩, ξ = rη, and empirical
//! estimates of excursion probabilities.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::excursion::{marginal_tail, p_tube_raw};
use crate::geometry::{dot, PointConfiguration};
use crate::radial_laws::RadialLaw;
use crate::rng::{block_stream, blocks};
use crate::special_functions::find_root_default;

pub const DEFAULT_TRIALS: u64 = 10_000;

/// Monte Carlo estimate of Pr(max_i T_i ≥ c) over a grid of thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub grid: Vec<f64>,
    pub estimates: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub law_digest: String,
    pub config_digest: String,
}

/// Draws ξ and writes T_i = ⟨u_i, ξ⟩ into `out`.
fn draw_field<R: Rng + ?Sized>(config: &PointConfiguration, law: &RadialLaw, rng: &mut R, eta: &mut [f64], out: &mut [f64]) {
    let r = law.sample(rng).sqrt();
    let norm = loop {
        for e in eta.iter_mut() {
            *e = rng.sample(StandardNormal);
        }
        let s = dot(eta, eta).sqrt();
        if s > 0.0 {
            break s;
        }
    };
    let scale = r / norm;
    for (o, u) in out.iter_mut().zip(config.points()) {
        *o = scale * dot(u, eta);
    }
}

/// Runs `trials` draws of the field in parallel blocks, folding each block
/// with `fold` into an accumulator, then merging accumulators in block order.
fn run_blocks<A, F, M>(config: &PointConfiguration, law: &RadialLaw, trials: u64, seed: u64, init: A, fold: F, merge: M) -> A
where
    A: Clone + Send + Sync,
    F: Fn(&mut A, &[f64]) + Sync,
    M: Fn(A, A) -> A,
{
    let parts: Vec<A> = blocks(trials)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(b, start, end)| {
            let mut rng = block_stream(seed, b);
            let mut acc = init.clone();
            let mut eta = vec![0.0; config.dim()];
            let mut t = vec![0.0; config.len()];
            for _ in start..end {
                draw_field(config, law, &mut rng, &mut eta, &mut t);
                fold(&mut acc, &t);
            }
            acc
        })
        .collect();
    parts.into_iter().fold(init, merge)
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain("threshold grid is empty"));
    }
    if grid.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(Error::domain("threshold grid must contain positive finite values"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("threshold grid must be strictly increasing"));
    }
    Ok(())
}

/// Estimates Pr(T_max ≥ c) for every c in the sorted grid from one shared set of draws.
pub fn simulate_pmax(config: &PointConfiguration, law: &RadialLaw, grid: &[f64], trials: u64, seed: u64) -> Result<SimulationResult> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    validate_grid(grid)?;
    // hist[k] counts trials whose maximum exceeds exactly the first k grid points.
    let hist = run_blocks(
        config,
        law,
        trials,
        seed,
        vec![0u64; grid.len() + 1],
        |h, t| {
            let tmax = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            h[grid.partition_point(|&c| c <= tmax)] += 1;
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    let mut estimates = vec![0.0; grid.len()];
    let mut exceed = 0u64;
    for k in (0..grid.len()).rev() {
        exceed += hist[k + 1];
        estimates[k] = exceed as f64 / trials as f64;
    }
    let std_errors = estimates.iter().map(|p| (p * (1.0 - p) / trials as f64).sqrt()).collect();
    Ok(SimulationResult {
        grid: grid.to_vec(),
        estimates,
        std_errors,
        trials,
        seed,
        law_digest: law.describe(),
        config_digest: config.digest(),
    })
}

/// Raw draws of T_max, in trial order.
pub fn sample_tmax(config: &PointConfiguration, law: &RadialLaw, trials: u64, seed: u64) -> Vec<f64> {
    run_blocks(
        config,
        law,
        trials,
        seed,
        Vec::new(),
        |v, t| v.push(t.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
        |mut a, b| {
            a.extend(b);
            a
        },
    )
}

/// Empirical relative error of the Bonferroni approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub delta: f64,
    pub std_error: f64,
    /// Set when P_tube·trials < 100 and the estimate is unreliable.
    pub low_count: bool,
}

pub fn estimate_delta(config: &PointConfiguration, law: &RadialLaw, c: f64, trials: u64, seed: u64) -> Result<DeltaEstimate> {
    let tube = p_tube_raw(config, law, c)?;
    if !(tube > 0.0) {
        return Err(Error::Undefined(format!("tube probability vanishes at c = {c}")));
    }
    let sim = simulate_pmax(config, law, &[c], trials, seed)?;
    Ok(DeltaEstimate {
        delta: (tube - sim.estimates[0]) / tube,
        std_error: sim.std_errors[0] / tube,
        low_count: tube * (trials as f64) < 100.0,
    })
}

/// Conditional exceedance Pr(T₁ ≥ q | T₂ ≥ q) at the level-`u` marginal quantile q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalExceedance {
    pub level: f64,
    pub quantile: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub conditioning_count: u64,
}

pub fn estimate_conditional_exceedance(config: &PointConfiguration, law: &RadialLaw, level: f64, trials: u64, seed: u64) -> Result<ConditionalExceedance> {
    if config.len() != 2 {
        return Err(Error::domain("conditional exceedance needs exactly two points"));
    }
    if !(level > 0.5 && level < 1.0) {
        return Err(Error::domain(format!("level must lie in (1/2, 1), got {level}")));
    }
    let n = config.dim();
    let target = 1.0 - level;
    let mut hi = 1.0;
    while marginal_tail(law, n, hi)? > target {
        hi *= 2.0;
    }
    let q = find_root_default(|c| Ok(marginal_tail(law, n, c)? - target), 0.0, hi, 1e-12)?;
    let (joint, cond) = run_blocks(
        config,
        law,
        trials,
        seed,
        (0u64, 0u64),
        |acc, t| {
            if t[1] >= q {
                acc.1 += 1;
                if t[0] >= q {
                    acc.0 += 1;
                }
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    if cond == 0 {
        return Err(Error::Undefined("no draw exceeded the conditioning quantile".into()));
    }
    let est = joint as f64 / cond as f64;
    Ok(ConditionalExceedance {
        level,
        quantile: q,
        estimate: est,
        std_error: (est * (1.0 - est) / cond as f64).sqrt(),
        conditioning_count: cond,
    })
}

pub const CSV_HEADER: &str = "c,p_hat,se,trials,seed";

pub fn write_csv<W: Write>(out: &mut W, sim: &SimulationResult) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for ((c, p), se) in sim.grid.iter().zip(&sim.estimates).zip(&sim.std_errors) {
        writeln!(out, "{c:.16e},{p:.16e},{se:.16e},{},{}", sim.trials, sim.seed)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn section6() -> PointConfiguration {
        PointConfiguration::equicorrelated(3, 0.25).unwrap()
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let law = RadialLaw::f_dist(3.0, 3.0).unwrap();
        let grid = [1.0, 2.0, 3.0];
        let a = simulate_pmax(&section6(), &law, &grid, 20_000, 11).unwrap();
        let b = simulate_pmax(&section6(), &law, &grid, 20_000, 11).unwrap();
        assert_eq!(a, b);
        let c = simulate_pmax(&section6(), &law, &grid, 20_000, 12).unwrap();
        assert_ne!(a.estimates, c.estimates);
    }

    #[test]
    fn estimates_nonincreasing_with_binomial_se() {
        let law = RadialLaw::chi_square(3.0).unwrap();
        let grid: Vec<f64> = (1..=8).map(f64::from).collect();
        let sim = simulate_pmax(&section6(), &law, &grid, 10_000, 5).unwrap();
        assert!(sim.estimates.windows(2).all(|w| w[0] >= w[1]));
        for (p, se) in sim.estimates.iter().zip(&sim.std_errors) {
            assert!((se - (p * (1.0 - p) / 10_000.0).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_inputs() {
        let law = RadialLaw::chi_square(3.0).unwrap();
        assert!(simulate_pmax(&section6(), &law, &[1.0], 0, 1).is_err());
        assert!(simulate_pmax(&section6(), &law, &[2.0, 1.0], 10, 1).is_err());
        assert!(simulate_pmax(&section6(), &law, &[-1.0], 10, 1).is_err());
        assert!(estimate_conditional_exceedance(&section6(), &law, 0.99, 10, 1).is_err());
    }

    #[test]
    fn single_point_delta_is_zero_up_to_noise() {
        let config = PointConfiguration::from_points(vec![vec![1.0, 0.0, 0.0]]).unwrap();
        let law = RadialLaw::chi_square(3.0).unwrap();
        let d = estimate_delta(&config, &law, 1.0, 100_000, 3).unwrap();
        assert!(d.delta.abs() < 4.0 * d.std_error);
        assert!(!d.low_count);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let law = RadialLaw::chi_square(3.0).unwrap();
        let sim = simulate_pmax(&section6(), &law, &[1.0, 2.0], 1000, 9).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &sim).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        assert_eq!(text.lines().count(), 3);
    }
}
