//! Finite index sets on the unit sphere and the geometry of their normal spheres.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for ties ρ_ij = ρ* (shared by multiplicity and nearest-neighbor choice).
pub const TIE_TOL: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-12;
const NORMAL_TOL: f64 = 1e-10;
const EIGEN_CLIP: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Points u₁,…,u_N on 𝕊^{n−1} with their correlation matrix ρ_ij = ⟨u_i,u_j⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    dim: usize,
    points: Vec<Vec<f64>>,
    corr: Vec<Vec<f64>>,
}

/// Critical radius θ* together with the quantities derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalRadius {
    pub theta: f64,
    pub tan_theta: f64,
    pub cos2_theta: f64,
    pub max_correlation: Option<f64>,
    /// Set for a single point, where θ* = π/2 by convention.
    pub degenerate: bool,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(mut a: Vec<f64>) -> Vec<f64> {
    let s = norm(&a);
    a.iter_mut().for_each(|x| *x /= s);
    a
}

// a − ⟨a,b⟩b for unit b
fn remove_component(a: &mut [f64], b: &[f64]) {
    let p = dot(a, b);
    a.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
}

impl PointConfiguration {
    /// Validates unit norms and distinctness; the ambient dimension is the vector length.
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points.first().ok_or_else(|| Error::domain("configuration needs at least one point"))?;
        let dim = first.len();
        if dim < 2 {
            return Err(Error::domain(format!("ambient dimension must be >= 2, got {dim}")));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::domain(format!("point {i} has length {} (expected {dim})", p.len())));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::domain(format!("point {i} has non-finite coordinates")));
            }
            if (norm(p) - 1.0).abs() > UNIT_TOL {
                return Err(Error::domain(format!("point {i} is not a unit vector (norm {})", norm(p))));
            }
        }
        let n = points.len();
        let mut corr = vec![vec![0.0; n]; n];
        for i in 0..n {
            corr[i][i] = 1.0;
            for j in 0..i {
                let r = dot(&points[i], &points[j]).clamp(-1.0, 1.0);
                if r >= 1.0 - UNIT_TOL {
                    return Err(Error::DuplicatePoint(j, i));
                }
                corr[i][j] = r;
                corr[j][i] = r;
            }
        }
        Ok(Self { dim, points, corr })
    }

    /// Realizes a correlation matrix by unit vectors via its eigendecomposition.
    ///
    /// Directions with eigenvalue at most 1e-12 are dropped, so the ambient
    /// dimension equals the numerical rank (padded to at least 2).
    pub fn from_correlation(rho: &[Vec<f64>]) -> Result<Self> {
        let n = rho.len();
        if n == 0 {
            return Err(Error::domain("correlation matrix is empty"));
        }
        for (i, row) in rho.iter().enumerate() {
            if row.len() != n {
                return Err(Error::domain("correlation matrix must be square"));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::domain("correlation matrix has non-finite entries"));
            }
            if (row[i] - 1.0).abs() > UNIT_TOL {
                return Err(Error::domain(format!("diagonal entry {i} is {} (expected 1)", row[i])));
            }
        }
        for i in 0..n {
            for j in 0..i {
                if (rho[i][j] - rho[j][i]).abs() > UNIT_TOL {
                    return Err(Error::domain(format!("correlation matrix is not symmetric at ({i}, {j})")));
                }
                if rho[i][j] > 1.0 + UNIT_TOL {
                    return Err(Error::domain(format!("correlation ({i}, {j}) exceeds 1")));
                }
                if rho[i][j] >= 1.0 - UNIT_TOL {
                    return Err(Error::DuplicatePoint(j, i));
                }
                if rho[i][j] < -1.0 - UNIT_TOL {
                    return Err(Error::domain(format!("correlation ({i}, {j}) is below -1")));
                }
            }
        }
        let m = DMatrix::from_fn(n, n, |i, j| rho[i][j]);
        let eig = SymmetricEigen::new(m);
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::domain(format!(
                "correlation matrix is not positive semidefinite (smallest eigenvalue {min:e})"
            )));
        }
        let keep: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > EIGEN_CLIP).collect();
        let dim = keep.len().max(2);
        let points = (0..n)
            .map(|i| {
                let mut p: Vec<f64> = keep
                    .iter()
                    .map(|&k| eig.eigenvectors[(i, k)] * eig.eigenvalues[k].sqrt())
                    .collect();
                p.resize(dim, 0.0);
                normalize(p)
            })
            .collect();
        let mut config = Self::from_points(points)?;
        // Keep the caller's entries when the factorization reproduces them, so
        // quantities like ρ* are exact rather than rounded through the eigenvectors.
        let agrees = (0..n).all(|i| (0..n).all(|j| (config.corr[i][j] - rho[i][j]).abs() <= 1e-12));
        if agrees {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        config.corr[i][j] = 0.5 * (rho[i][j] + rho[j][i]);
                    }
                }
            }
        }
        Ok(config)
    }

    /// `ρ_ii = 1`, `ρ_ij = rho` for i ≠ j.
    pub fn equicorrelated(n_points: usize, rho: f64) -> Result<Self> {
        let m: Vec<Vec<f64>> = (0..n_points)
            .map(|i| (0..n_points).map(|j| if i == j { 1.0 } else { rho }).collect())
            .collect();
        Self::from_correlation(&m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn correlation(&self) -> &[Vec<f64>] {
        &self.corr
    }

    /// ρ* = max_{i≠j} ρ_ij, or `None` for a single point.
    pub fn max_correlation(&self) -> Option<f64> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.corr[i][j])
            .reduce(f64::max)
    }

    /// θ* with cos θ* = √((1+ρ*)/2).
    pub fn critical_radius(&self) -> CriticalRadius {
        match self.max_correlation() {
            None => CriticalRadius {
                theta: FRAC_PI_2,
                tan_theta: f64::INFINITY,
                cos2_theta: 0.0,
                max_correlation: None,
                degenerate: true,
            },
            Some(rho) => {
                let cos2 = (1.0 + rho) / 2.0;
                CriticalRadius {
                    theta: cos2.sqrt().acos(),
                    tan_theta: ((1.0 - rho) / (1.0 + rho)).sqrt(),
                    cos2_theta: cos2,
                    max_correlation: Some(rho),
                    degenerate: false,
                }
            }
        }
    }

    /// Number D of ordered pairs (i, j), i ≠ j, attaining ρ*.
    pub fn multiplicity(&self) -> usize {
        let Some(star) = self.max_correlation() else {
            return 0;
        };
        let n = self.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && (self.corr[i][j] - star).abs() <= TIE_TOL)
            .count()
    }

    /// Lowest-index j ≠ i maximizing ρ_ij.
    pub fn nearest_neighbor(&self, i: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in (0..self.len()).filter(|&j| j != i) {
            let r = self.corr[i][j];
            match best {
                Some((_, b)) if r <= b + TIE_TOL => {}
                _ => best = Some((j, r)),
            }
        }
        best.map(|(j, _)| j)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::domain(format!("point index {i} out of range (N = {})", self.len())));
        }
        Ok(())
    }

    /// cos²θ(u_i, v) for a unit normal v, without validating v.
    ///
    /// Zero when max_j ⟨u_j,v⟩/(1−ρ_ij) ≤ 0, i.e. θ = π/2.
    pub fn local_cos2(&self, i: usize, v: &[f64]) -> f64 {
        let m = (0..self.len())
            .filter(|&j| j != i)
            .map(|j| dot(&self.points[j], v) / (1.0 - self.corr[i][j]))
            .fold(f64::NEG_INFINITY, f64::max);
        if m > 0.0 {
            let m2 = m * m;
            m2 / (1.0 + m2)
        } else {
            0.0
        }
    }

    /// θ(u_i, v) = arccot max_{j≠i} ⟨u_j,v⟩/(1−ρ_ij), clamped to π/2.
    pub fn local_angle(&self, i: usize, v: &[f64]) -> Result<f64> {
        self.check_index(i)?;
        if v.len() != self.dim {
            return Err(Error::domain("normal vector has the wrong dimension"));
        }
        if (norm(v) - 1.0).abs() > NORMAL_TOL {
            return Err(Error::domain(format!("normal vector is not unit (norm {})", norm(v))));
        }
        if dot(v, &self.points[i]).abs() > NORMAL_TOL {
            return Err(Error::domain("vector is not orthogonal to the point"));
        }
        Ok(self.local_cos2(i, v).sqrt().acos())
    }

    /// Orthonormal frame of the normal space at u_i: v₀ toward the nearest
    /// neighbor, followed by n − 2 completing vectors.
    pub fn normal_frame(&self, i: usize) -> Result<Vec<Vec<f64>>> {
        self.check_index(i)?;
        let u = &self.points[i];
        let mut frame: Vec<Vec<f64>> = Vec::with_capacity(self.dim - 1);
        if let Some(j) = self.nearest_neighbor(i) {
            let mut v0 = self.points[j].clone();
            remove_component(&mut v0, u);
            if norm(&v0) > 1e-9 {
                frame.push(normalize(v0));
            }
        }
        for k in 0..self.dim {
            if frame.len() == self.dim - 1 {
                break;
            }
            let mut e = vec![0.0; self.dim];
            e[k] = 1.0;
            for _ in 0..2 {
                remove_component(&mut e, u);
                for f in &frame {
                    remove_component(&mut e, f);
                }
            }
            if norm(&e) > 1e-6 {
                frame.push(normalize(e));
            }
        }
        debug_assert_eq!(frame.len(), self.dim - 1);
        Ok(frame)
    }

    /// v = cos φ·v₀ + sin φ·Σ h_k v_k for h on 𝕊^{n−3}.
    pub fn normal_direction(&self, i: usize, phi: f64, h: &[f64]) -> Result<Vec<f64>> {
        if self.dim < 3 {
            return Err(Error::unsupported("normal sphere is a point pair for n = 2; enumerate ±v0 instead"));
        }
        if h.len() != self.dim - 2 || (norm(h) - 1.0).abs() > NORMAL_TOL {
            return Err(Error::domain(format!("h must be a unit vector of length {}", self.dim - 2)));
        }
        let frame = self.normal_frame(i)?;
        let (s, c) = phi.sin_cos();
        let mut v: Vec<f64> = frame[0].iter().map(|x| c * x).collect();
        for (hk, vk) in h.iter().zip(&frame[1..]) {
            v.iter_mut().zip(vk).for_each(|(a, b)| *a += s * hk * b);
        }
        Ok(normalize(v))
    }

    /// Uniform draw on the unit sphere of the normal space at u_i.
    pub fn sample_normal_direction<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> Result<Vec<f64>> {
        self.check_index(i)?;
        let u = &self.points[i];
        loop {
            let mut g: Vec<f64> = (0..self.dim).map(|_| rng.sample(StandardNormal)).collect();
            remove_component(&mut g, u);
            if norm(&g) > 1e-12 {
                let mut v = normalize(g);
                remove_component(&mut v, u);
                return Ok(normalize(v));
            }
        }
    }

    /// Values of cos²θ(u_i, V) at the nodes of an equal-weight rule for
    /// V uniform on the normal sphere at u_i.
    pub fn local_cos2_profile(&self, i: usize, rule: &DirectionRule) -> Result<Vec<f64>> {
        self.check_index(i)?;
        let frame = self.normal_frame(i)?;
        let profile = match (*rule, self.dim) {
            (_, 2) => {
                let v0 = &frame[0];
                let minus: Vec<f64> = v0.iter().map(|x| -x).collect();
                vec![self.local_cos2(i, v0), self.local_cos2(i, &minus)]
            }
            (DirectionRule::Standard { circle_nodes, .. }, 3) => (0..circle_nodes)
                .map(|k| {
                    let phi = 2.0 * PI * k as f64 / circle_nodes as f64;
                    let (s, c) = phi.sin_cos();
                    let v: Vec<f64> = frame[0].iter().zip(&frame[1]).map(|(a, b)| c * a + s * b).collect();
                    self.local_cos2(i, &v)
                })
                .collect(),
            (DirectionRule::Standard { sphere_points, seed, .. }, _) => {
                quasi_random_sphere(self.dim - 1, sphere_points, seed)
                    .map(|w| {
                        let mut v = vec![0.0; self.dim];
                        for (wk, fk) in w.iter().zip(&frame) {
                            v.iter_mut().zip(fk).for_each(|(a, b)| *a += wk * b);
                        }
                        self.local_cos2(i, &v)
                    })
                    .collect()
            }
        };
        Ok(profile)
    }

    /// Same configuration with points reordered by `perm` (new i ← old perm[i]).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Self::from_points(perm.iter().map(|&k| self.points[k].clone()).collect())
    }

    /// Same configuration with every point multiplied by the orthogonal matrix `q`.
    pub fn rotated(&self, q: &[Vec<f64>]) -> Result<Self> {
        let pts = self
            .points
            .iter()
            .map(|p| normalize(q.iter().map(|row| dot(row, p)).collect()))
            .collect();
        Self::from_points(pts)
    }

    /// Stable textual digest used in simulation metadata.
    pub fn digest(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for p in &self.points {
            for x in p {
                for b in x.to_bits().to_le_bytes() {
                    h ^= u64::from(b);
                    h = h.wrapping_mul(0x0100_0000_01b3);
                }
            }
        }
        format!("N{}n{}-{h:016x}", self.len(), self.dim)
    }
}

/// Node set for averaging over the normal sphere S(N_u M) ≅ 𝕊^{n−2}.
///
/// n = 2 always enumerates the two normal directions; n = 3 uses the
/// periodic trapezoidal rule on the normal circle; n > 3 uses a shifted
/// Kronecker sequence mapped to the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionRule {
    Standard { circle_nodes: usize, sphere_points: usize, seed: u64 },
}

impl Default for DirectionRule {
    fn default() -> Self {
        DirectionRule::Standard { circle_nodes: 4096, sphere_points: 1 << 14, seed: 0x7ab1_e5ee_d000_0001 }
    }
}

impl DirectionRule {
    /// True when the rule's nodes are random-like and a standard error is meaningful.
    pub fn is_sampled(&self, dim: usize) -> bool {
        dim > 3
    }
}

/// Low-discrepancy points on 𝕊^{d−1}: a Kronecker sequence in [0,1)^{2⌈d/2⌉}
/// with a seeded shift, Box–Muller to Gaussians, then normalization.
fn quasi_random_sphere(d: usize, count: usize, seed: u64) -> impl Iterator<Item = Vec<f64>> {
    let m = 2 * d.div_ceil(2);
    // φ_m: unique positive root of x^{m+1} = x + 1
    let mut phi: f64 = 2.0;
    for _ in 0..100 {
        phi = (1.0 + phi).powf(1.0 / (m as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=m).map(|k| phi.powi(-(k as i32))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
    (0..count).map(move |idx| {
        let u: Vec<f64> = (0..m)
            .map(|k| (shift[k] + alpha[k] * (idx as f64 + 1.0)).fract())
            .collect();
        let mut g = Vec::with_capacity(m);
        for pair in u.chunks(2) {
            let r = (-2.0 * (1.0 - pair[0]).ln()).sqrt();
            let (s, c) = (2.0 * PI * pair[1]).sin_cos();
            g.push(r * c);
            g.push(r * s);
        }
        g.truncate(d);
        let s = norm(&g);
        if s > 0.0 {
            g.iter_mut().for_each(|x| *x /= s);
        } else {
            g[0] = 1.0;
        }
        g
    })
}

/// Serialized configuration source: exactly one of `points` or `correlation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation: Option<Vec<Vec<f64>>>,
}

impl ConfigurationSpec {
    pub fn build(&self) -> Result<PointConfiguration> {
        match (&self.points, &self.correlation) {
            (Some(p), None) => PointConfiguration::from_points(p.clone()),
            (None, Some(r)) => PointConfiguration::from_correlation(r),
            _ => Err(Error::domain("exactly one of `points` or `correlation` must be given")),
        }
    }
}
