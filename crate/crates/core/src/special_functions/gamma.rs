use std::f64::consts::PI;

use crate::error::{Error, Result};

const MAX_ITER: usize = 10_000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

// Lanczos coefficients, g = 607/128, 15 terms (Godfrey).
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

/// Natural logarithm of Γ(x) for x > 0.
///
/// Returns `+∞` for non-positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::INFINITY;
    }
    if x < 0.5 {
        // Γ(x)Γ(1-x) = π / sin(πx); keeps the series in its accurate range.
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let tmp = x + 5.242_187_5;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut y = x;
    let mut ser = 0.999_999_999_999_997_092;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}

/// log B(p, q) = log Γ(p) + log Γ(q) − log Γ(p + q).
pub fn log_beta(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && q > 0.0) {
        return Err(Error::domain(format!("log_beta requires p, q > 0, got ({p}, {q})")));
    }
    Ok(ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q))
}

/// Regularized incomplete beta function I_x(p, q).
///
/// Continued fraction (modified Lentz) with the symmetry switch at
/// x = p / (p + q).
pub fn reg_inc_beta(x: f64, p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && q > 0.0) {
        return Err(Error::domain(format!("reg_inc_beta requires p, q > 0, got ({p}, {q})")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("reg_inc_beta requires x in [0, 1], got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    if q == 1.0 {
        return Ok(x.powf(p));
    }
    if p == 1.0 {
        return Ok(-(q * (-x).ln_1p()).exp_m1());
    }
    let ln_front = p * x.ln() + q * (-x).ln_1p() - log_beta(p, q)?;
    if x <= p / (p + q) {
        let cf = beta_cf(x, p, q)?;
        Ok((ln_front.exp() * cf / p).clamp(0.0, 1.0))
    } else {
        let cf = beta_cf(1.0 - x, q, p)?;
        Ok((1.0 - ln_front.exp() * cf / q).clamp(0.0, 1.0))
    }
}

fn beta_cf(x: f64, a: f64, b: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= EPS {
            return Ok(h);
        }
    }
    Err(Error::NumericalFailure {
        message: format!("incomplete beta continued fraction did not converge (x={x}, a={a}, b={b})"),
        estimate: h,
        error_bound: f64::NAN,
    })
}

/// Regularized lower incomplete gamma P(s, x).
pub fn reg_inc_gamma_lower(s: f64, x: f64) -> Result<f64> {
    Ok(1.0 - reg_inc_gamma_upper(s, x)?)
}

/// Regularized upper incomplete gamma Q(s, x) = Γ(s, x) / Γ(s).
pub fn reg_inc_gamma_upper(s: f64, x: f64) -> Result<f64> {
    check_gamma_args(s, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < s + 1.0 {
        Ok((1.0 - gamma_series(s, x)?).clamp(0.0, 1.0))
    } else {
        Ok(ln_gamma_cf(s, x)?.exp())
    }
}

/// log Q(s, x), accurate deep into the upper tail where Q itself underflows.
pub fn ln_reg_inc_gamma_upper(s: f64, x: f64) -> Result<f64> {
    check_gamma_args(s, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < s + 1.0 {
        Ok((-gamma_series(s, x)?).ln_1p())
    } else {
        ln_gamma_cf(s, x)
    }
}

fn check_gamma_args(s: f64, x: f64) -> Result<()> {
    if !(s > 0.0) {
        return Err(Error::domain(format!("incomplete gamma requires s > 0, got {s}")));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(format!("incomplete gamma requires x >= 0, got {x}")));
    }
    Ok(())
}

// P(s, x) by its power series; used for x < s + 1.
fn gamma_series(s: f64, x: f64) -> Result<f64> {
    let mut ap = s;
    let mut del = 1.0 / s;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            return Ok(sum * (-x + s * x.ln() - ln_gamma(s)).exp());
        }
    }
    Err(Error::NumericalFailure {
        message: format!("incomplete gamma series did not converge (s={s}, x={x})"),
        estimate: sum,
        error_bound: f64::NAN,
    })
}

// log Q(s, x) by Legendre's continued fraction; used for x >= s + 1.
fn ln_gamma_cf(s: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= EPS {
            return Ok(-x + s * x.ln() - ln_gamma(s) + h.ln());
        }
    }
    Err(Error::NumericalFailure {
        message: format!("incomplete gamma continued fraction did not converge (s={s}, x={x})"),
        estimate: h,
        error_bound: f64::NAN,
    })
}

/// Upper tail of the standard normal, 1 − Φ(z).
pub fn normal_tail(z: f64) -> f64 {
    let q = 0.5 * reg_inc_gamma_upper(0.5, 0.5 * z * z).unwrap_or(0.0);
    if z >= 0.0 {
        q
    } else {
        1.0 - q
    }
}

/// log(1 − Φ(z)), finite for every finite z.
pub fn ln_normal_tail(z: f64) -> f64 {
    if z >= 0.0 {
        ln_reg_inc_gamma_upper(0.5, 0.5 * z * z).unwrap_or(f64::NEG_INFINITY) - 2f64.ln()
    } else {
        (-0.5 * reg_inc_gamma_upper(0.5, 0.5 * z * z).unwrap_or(0.0)).ln_1p()
    }
}

/// Surface area Ω_k = 2π^{k/2} / Γ(k/2) of the unit sphere in ℝ^k.
pub fn sphere_area(k: u32) -> Result<f64> {
    if k < 1 {
        return Err(Error::domain("sphere_area requires k >= 1"));
    }
    if k <= 64 {
        // Ω_k = 2π Ω_{k−2} / (k − 2), exact at the base cases
        let mut area = if k % 2 == 1 { 2.0 } else { 2.0 * PI };
        let mut j = 2 - k % 2;
        while j < k {
            j += 2;
            area *= 2.0 * PI / f64::from(j - 2);
        }
        return Ok(area);
    }
    let half = f64::from(k) / 2.0;
    Ok(2.0 * (half * PI.ln() - ln_gamma(half)).exp())
}
