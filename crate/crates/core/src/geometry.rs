//! Checks on `S^n x S^n` with the metric `g_0 + delta g_0`: random pairs,
//! finite-difference Laplace–Beltrami and gradient along geodesics, and the
//! PDE residual of lifted profiles `u = phi(f) + 1`, `f(p, q) = <p, q>`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::discretize::SpectralGrid;
use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, PartialEq)]
pub struct SpherePair {
    pub p: DVector<f64>,
    pub q_vec: DVector<f64>,
}

impl SpherePair {
    /// Normalizes both vectors, which must be nonzero and of equal length.
    pub fn new(p: DVector<f64>, q_vec: DVector<f64>) -> Result<Self> {
        if p.len() != q_vec.len() || p.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "need two vectors of equal length >= 3, got {} and {}",
                p.len(),
                q_vec.len()
            )));
        }
        let (np, nq) = (p.norm(), q_vec.norm());
        if !(np > 0.0 && nq > 0.0) {
            return Err(Error::InvalidParameter("zero vector".into()));
        }
        Ok(Self { p: p / np, q_vec: q_vec / nq })
    }

    /// Sphere dimension `n`.
    pub fn dim(&self) -> usize {
        self.p.len() - 1
    }

    /// `<p, q>`, clamped to `[-1, 1]`.
    pub fn f(&self) -> f64 {
        self.p.dot(&self.q_vec).clamp(-1.0, 1.0)
    }

    /// The pair `(A p, A q)`.
    pub fn rotated(&self, a: &DMatrix<f64>) -> Self {
        Self { p: a * &self.p, q_vec: a * &self.q_vec }
    }
}

/// Second-order central differences with geodesic step `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FDScheme {
    h: f64,
}

impl FDScheme {
    pub const ORDER: u32 = 2;

    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0 && h < 0.1) {
            return Err(Error::InvalidParameter(format!("FD step must lie in (0, 0.1), got {h}")));
        }
        Ok(Self { h })
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

impl Default for FDScheme {
    fn default() -> Self {
        Self { h: 1e-3 }
    }
}

fn unit_normal(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n + 1, |_, _| rng.sample::<f64, _>(StandardNormal));
        let nrm = v.norm();
        if nrm > 1e-8 {
            return v / nrm;
        }
    }
}

/// Independent uniform points on the two factors.
pub fn sample_pair(n: usize, seed: u64) -> Result<SpherePair> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = unit_normal(n, &mut rng);
    let q_vec = unit_normal(n, &mut rng);
    Ok(SpherePair { p, q_vec })
}

/// `count` pairs; pair `i` uses stream `i` of the generator seeded by `seed`.
pub fn sample_pairs(n: usize, count: usize, seed: u64) -> Result<Vec<SpherePair>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    Ok((0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let p = unit_normal(n, &mut rng);
            let q_vec = unit_normal(n, &mut rng);
            SpherePair { p, q_vec }
        })
        .collect())
}

/// Uniformly random orthogonal matrix of size `dim`.
pub fn random_orthogonal(dim: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Orthonormal basis of the tangent space at unit `x`: the ambient basis
/// projected and orthonormalized in order, skipping near-dependent vectors.
pub fn tangent_frame(x: &DVector<f64>) -> Vec<DVector<f64>> {
    let dim = x.len();
    let mut frame: Vec<DVector<f64>> = Vec::with_capacity(dim - 1);
    for j in 0..dim {
        if frame.len() == dim - 1 {
            break;
        }
        let mut v = DVector::zeros(dim);
        v[j] = 1.0;
        // Two passes of Gram–Schmidt for stability.
        for _ in 0..2 {
            v -= x * x.dot(&v);
            for e in &frame {
                v -= e * e.dot(&v);
            }
        }
        let nrm = v.norm();
        if nrm > 1e-6 {
            frame.push(v / nrm);
        }
    }
    frame
}

fn geodesic(x: &DVector<f64>, v: &DVector<f64>, angle: f64) -> DVector<f64> {
    x * angle.cos() + v * angle.sin()
}

/// Points reached by `+-h` along each `G_delta`-orthonormal direction at `x`:
/// unit-speed great circles in the first factor, ambient angle `h / sqrt(delta)`
/// in the second.
fn stencil(x: &SpherePair, h: f64, delta: f64) -> Vec<(SpherePair, SpherePair)> {
    let mut out = Vec::with_capacity(2 * x.dim());
    for v in tangent_frame(&x.p) {
        let fwd = SpherePair { p: geodesic(&x.p, &v, h), q_vec: x.q_vec.clone() };
        let back = SpherePair { p: geodesic(&x.p, &v, -h), q_vec: x.q_vec.clone() };
        out.push((fwd, back));
    }
    let angle = h / delta.sqrt();
    for v in tangent_frame(&x.q_vec) {
        let fwd = SpherePair { p: x.p.clone(), q_vec: geodesic(&x.q_vec, &v, angle) };
        let back = SpherePair { p: x.p.clone(), q_vec: geodesic(&x.q_vec, &v, -angle) };
        out.push((fwd, back));
    }
    out
}

/// `Delta_{G_delta} u` at `x` by central second differences.
pub fn laplace_beltrami_fd<F>(u: F, x: &SpherePair, scheme: &FDScheme, delta: f64) -> f64
where
    F: Fn(&SpherePair) -> f64,
{
    let h = scheme.h;
    let centre = u(x);
    stencil(x, h, delta)
        .iter()
        .map(|(a, b)| (u(a) - 2.0 * centre + u(b)) / (h * h))
        .sum()
}

/// `|grad f|^2_{G_delta}` at `x` by central first differences.
pub fn gradient_sq_fd(x: &SpherePair, scheme: &FDScheme, delta: f64) -> f64 {
    let h = scheme.h;
    stencil(x, h, delta)
        .iter()
        .map(|(a, b)| {
            let d = (a.f() - b.f()) / (2.0 * h);
            d * d
        })
        .sum()
}

/// Largest deviations from `Delta f = -n (1 + 1/delta) f` and
/// `|grad f|^2 = (1 + 1/delta)(1 - f^2)` over a sample.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct IdentityErrors {
    pub laplacian: f64,
    pub gradient: f64,
}

pub fn identity_errors(pairs: &[SpherePair], scheme: &FDScheme, delta: f64) -> IdentityErrors {
    let mut out = IdentityErrors { laplacian: 0.0, gradient: 0.0 };
    let factor = 1.0 + 1.0 / delta;
    for x in pairs {
        let f = x.f();
        let n = x.dim() as f64;
        let lap = laplace_beltrami_fd(|y| y.f(), x, scheme, delta);
        out.laplacian = out.laplacian.max((lap + n * factor * f).abs());
        let grad = gradient_sq_fd(x, scheme, delta);
        out.gradient = out.gradient.max((grad - factor * (1.0 - f * f)).abs());
    }
    out
}

/// `log2(e(h) / e(h/2))` for two error levels.
pub fn observed_order(err_h: f64, err_half: f64) -> f64 {
    (err_h / err_half).log2()
}

/// `max |-Delta u + lambda u - lambda u^{q-1}|` over `sample_count` random
/// pairs, with `u = phi(f) + 1` interpolated from node values.
pub fn lifted_residual(
    phi: &[f64],
    lambda: f64,
    grid: &SpectralGrid,
    params: &ModelParams,
    sample_count: usize,
    scheme: &FDScheme,
    seed: u64,
) -> Result<f64> {
    params.validate()?;
    if phi.len() != grid.len() {
        return Err(Error::InvalidParameter(format!(
            "profile has {} values, grid has {} nodes",
            phi.len(),
            grid.len()
        )));
    }
    let u = |x: &SpherePair| grid.interpolate(phi, x.f()).map(|v| v + 1.0);
    let mut worst = 0.0f64;
    for (i, x) in sample_pairs(params.n, sample_count, seed)?.iter().enumerate() {
        let centre = u(x)?;
        if !(centre > 0.0) {
            return Err(Error::Domain(format!("u = {centre:e} is not positive at sample {i}")));
        }
        let lap = laplace_beltrami_fd(|y| u(y).unwrap_or(f64::NAN), x, scheme, params.delta);
        let r = -lap + lambda * centre - lambda * centre.powf(params.q - 1.0);
        if r.is_nan() {
            return Err(Error::Domain(format!("lifted profile undefined near sample {i}")));
        }
        worst = worst.max(r.abs());
    }
    Ok(worst)
}
