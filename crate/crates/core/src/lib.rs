//! Excursion probabilities of spherically contoured random fields on finite
//! subsets of the unit sphere.
//!
//! The field is T_i = ⟨u_i, ξ⟩ for points u₁,…,u_N ∈ 𝕊^{n−1} and a
//! spherically symmetric ξ ∈ ℝⁿ whose squared norm follows a [`RadialLaw`].
//! The crate evaluates the Bonferroni (tube) approximation to
//! Pr(max_i T_i ≥ c), the exact probability, their relative error and its
//! large-threshold asymptotics, and provides a seeded Monte Carlo harness.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod excursion;
pub mod geometry;
pub mod montecarlo;
pub mod radial_laws;
pub mod rng;
pub mod special_functions;

pub use error::{Error, Result};
pub use excursion::{
    d_k_asymptotic, d_k_quadrature, delta_bar, delta_exact, delta_rv_limit, delta_rv_limit_for_law,
    exact_parts, log_delta_asymptotic, marginal_tail, p_bounds, p_exact, p_tube, p_tube_raw, report,
    report_grid, solve_threshold, tail_dependence, Bounds, ExactParts, ExcursionReport, Method, Prediction,
};
pub use geometry::{ConfigurationSpec, CriticalRadius, DirectionRule, PointConfiguration};
pub use montecarlo::{estimate_delta, simulate_pmax, SimulationResult};
pub use radial_laws::{Family, RadialLaw, TailBranch, TailClass};
