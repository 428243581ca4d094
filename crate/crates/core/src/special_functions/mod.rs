//! Numerical kernel: gamma and beta functions, their regularized incomplete
//! forms, adaptive quadrature, bracketed root finding and sphere areas.
//!
//! Everything here is a pure function of its arguments.

mod chebyshev;
mod gamma;
mod quadrature;
mod roots;

pub use chebyshev::ChebyshevTable;
pub use gamma::{
    ln_gamma, ln_normal_tail, ln_reg_inc_gamma_upper, log_beta, normal_tail, reg_inc_beta,
    reg_inc_gamma_lower, reg_inc_gamma_upper, sphere_area,
};
pub use quadrature::{integrate, integrate_with_error, Estimate, QuadratureSpec};
pub use roots::{find_root, find_root_default};
