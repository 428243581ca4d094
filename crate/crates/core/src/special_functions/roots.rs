use crate::error::{Error, Result};

const MAX_BISECTIONS: usize = 400;

/// Bisection root of `f` on `[lo, hi]`.
///
/// Stops when |f(x)| ≤ `f_tol` or the bracket is narrower than
/// `x_tol·(1 + |hi|)`. `f(lo)` and `f(hi)` must differ in sign.
pub fn find_root<F>(f: F, lo: f64, hi: f64, x_tol: f64, f_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::domain(format!(
            "no sign change on [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}"
        )));
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid.abs() <= f_tol || hi - lo <= x_tol * (1.0 + hi.abs()) {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// [`find_root`] with bracket tolerance `tol` and no early exit on |f|.
pub fn find_root_default<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    find_root(f, lo, hi, tol, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_quadratic() {
        let r = find_root_default(|x| Ok(x - 1.0), 0.0, 2.0, 1e-10).unwrap();
        assert!((r - 1.0).abs() < 1e-9);
        let r = find_root_default(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-10).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn no_sign_change_is_domain_error() {
        let err = find_root_default(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn flat_decreasing_function() {
        // extremely flat tail, still bracketed
        let r = find_root_default(|x| Ok((-x).exp() - 1e-12), 0.0, 100.0, 1e-12).unwrap();
        assert!((r - 1e12f64.ln()).abs() < 1e-8);
    }
}
