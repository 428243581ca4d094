//! Adaptive piecewise Chebyshev interpolation of smooth functions.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const DEGREE: usize = 32;
const MAX_PIECES: usize = 4096;

#[derive(Debug, Clone)]
struct Piece {
    lo: f64,
    hi: f64,
    coeffs: [f64; DEGREE + 1],
}

impl Piece {
    fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &a in self.coeffs[1..].iter().rev() {
            let b0 = a + 2.0 * t * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + t * b1 - b2
    }
}

/// Piecewise interpolant on `[lo, hi]`, refined by bisection until the
/// trailing Chebyshev coefficients of every piece fall below
/// `tol · max(1, |f|)`.
#[derive(Debug, Clone)]
pub struct ChebyshevTable {
    pieces: Vec<Piece>,
}

fn fit<F: Fn(f64) -> Result<f64>>(f: &F, lo: f64, hi: f64) -> Result<(Piece, f64, f64)> {
    let m = DEGREE;
    let mut vals = [0.0; DEGREE + 1];
    for (j, v) in vals.iter_mut().enumerate() {
        let t = (PI * j as f64 / m as f64).cos();
        *v = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * t)?;
        if !v.is_finite() {
            return Err(Error::NumericalFailure {
                message: format!("non-finite value while tabulating on [{lo}, {hi}]"),
                estimate: *v,
                error_bound: f64::INFINITY,
            });
        }
    }
    let mut coeffs = [0.0; DEGREE + 1];
    for (k, ck) in coeffs.iter_mut().enumerate() {
        let mut s = 0.0;
        for (j, v) in vals.iter().enumerate() {
            let w = if j == 0 || j == m { 0.5 } else { 1.0 };
            s += w * v * (PI * (j * k) as f64 / m as f64).cos();
        }
        *ck = 2.0 * s / m as f64;
    }
    coeffs[0] *= 0.5;
    coeffs[m] *= 0.5;
    let tail = coeffs[m - 2..].iter().map(|c| c.abs()).sum::<f64>();
    let scale = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    Ok((Piece { lo, hi, coeffs }, tail, scale))
}

impl ChebyshevTable {
    pub fn build<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64, tol: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::domain(format!("invalid interpolation interval [{lo}, {hi}]")));
        }
        let mut pieces = Vec::new();
        let mut stack = vec![(lo, hi)];
        while let Some((a, b)) = stack.pop() {
            let (piece, tail, scale) = fit(&f, a, b)?;
            if tail <= tol * scale {
                pieces.push(piece);
            } else {
                if pieces.len() + stack.len() >= MAX_PIECES {
                    return Err(Error::NumericalFailure {
                        message: format!("interpolation did not converge on [{a}, {b}]"),
                        estimate: f64::NAN,
                        error_bound: tail,
                    });
                }
                let mid = 0.5 * (a + b);
                // right half first so the left half is fitted next
                stack.push((mid, b));
                stack.push((a, mid));
            }
        }
        pieces.sort_by(|p, q| p.lo.total_cmp(&q.lo));
        Ok(Self { pieces })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Value at `x`, clamped to the table's domain.
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        let x = x.clamp(lo, hi);
        let k = self.pieces.partition_point(|p| p.hi < x).min(self.pieces.len() - 1);
        self.pieces[k].eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_smooth_functions() {
        let t = ChebyshevTable::build(|x| Ok(x.sin() * x.exp()), 0.0, 10.0, 1e-14).unwrap();
        for k in 0..=1000 {
            let x = k as f64 / 100.0;
            let want = x.sin() * x.exp();
            assert!((t.eval(x) - want).abs() < 1e-11 * want.abs().max(1.0), "x={x}");
        }
        let p = ChebyshevTable::build(|x| Ok(3.0 * x * x - 1.0), -1.0, 1.0, 1e-14).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn refines_steep_functions() {
        let runge = |x: f64| 1.0 / (1.0 + 400.0 * x * x);
        let r = ChebyshevTable::build(|x| Ok(runge(x)), -1.0, 1.0, 1e-14).unwrap();
        assert!(r.len() > 1);
        for k in -100..=100 {
            let x = k as f64 / 100.0;
            assert!((r.eval(x) - runge(x)).abs() < 1e-12);
        }
        let t = ChebyshevTable::build(|x: f64| Ok(-2.0 * x.exp().sqrt()), 0.0, 14.0, 1e-13).unwrap();
        for k in 0..=140 {
            let x = k as f64 / 10.0;
            let want = -2.0 * x.exp().sqrt();
            assert!((t.eval(x) - want).abs() < 1e-10 * want.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(ChebyshevTable::build(Ok, 1.0, 1.0, 1e-12).is_err());
    }
}
