#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tubetail_core::{PointConfiguration, RadialLaw};

/// N = 3 points in ℝ³ with pairwise correlation ¼.
pub fn sec6() -> PointConfiguration {
    PointConfiguration::equicorrelated(3, 0.25).unwrap()
}

pub fn t_law() -> RadialLaw {
    RadialLaw::f_dist(3.0, 3.0).unwrap()
}

pub fn gauss_law() -> RadialLaw {
    RadialLaw::chi_square(3.0).unwrap()
}

pub fn lognormal_law() -> RadialLaw {
    RadialLaw::log_normal().with_scale(3.0 * (-0.5f64).exp()).unwrap()
}

pub fn bessel_law() -> RadialLaw {
    RadialLaw::bessel(3.0, 4.0).unwrap().with_scale(0.25).unwrap()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let s = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Haar-ish random orthogonal matrix by Gram–Schmidt on Gaussian rows.
pub fn random_orthogonal(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    while rows.len() < n {
        let mut g = gaussian_vec(&mut rng, n);
        for _ in 0..2 {
            for r in &rows {
                let d = dot(&g, r);
                g.iter_mut().zip(r).for_each(|(a, b)| *a -= d * b);
            }
        }
        if dot(&g, &g) > 1e-6 {
            rows.push(unit(g));
        }
    }
    rows
}

pub fn apply(q: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    q.iter().map(|row| dot(row, v)).collect()
}

/// N random unit vectors in ℝⁿ with pairwise correlation below `max_rho`.
pub fn random_points(n_points: usize, dim: usize, seed: u64, max_rho: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<Vec<f64>> = Vec::new();
    while pts.len() < n_points {
        let p = unit(gaussian_vec(&mut rng, dim));
        if pts.iter().all(|q| dot(q, &p) < max_rho) {
            pts.push(p);
        }
    }
    pts
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    })
}

/// Two-sample KS statistic.
pub fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}
