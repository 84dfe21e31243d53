//! Chebyshev–Lobatto collocation of the reduced equation on `[-1, 1]`.
//!
//! Every node carries the equation itself; at `t = +-1` the factor
//! `(1 - t^2)` vanishes exactly and the row reduces to the regular endpoint
//! condition, so no separate boundary closure is needed.

use nalgebra::{Complex, DMatrix, DVector, Schur};
use serde::{Deserialize, Serialize};

type Complex64 = Complex<f64>;

use crate::error::{Error, Result};
use crate::model::{endpoint_residual, ode_residual, ModelParams, ProfilePoint, Side};
use crate::polyspec::{self, QuadratureRule};

/// Absolute part of the nodal dead-band.
pub const NODAL_FLOOR: f64 = 1e-12;

/// Chebyshev–Lobatto grid `t_j = cos(j pi / N)`, ordered from `+1` down to `-1`,
/// with dense first and second differentiation matrices.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    degree: usize,
    nodes: Vec<f64>,
    bary: Vec<f64>,
    d1: DMatrix<f64>,
    d2: DMatrix<f64>,
}

pub fn build_grid(degree: usize) -> Result<SpectralGrid> {
    if degree < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid degree must be at least 2, got {degree}"
        )));
    }
    let size = degree + 1;
    let nf = degree as f64;
    let half_pi_over_n = std::f64::consts::PI / (2.0 * nf);
    // sin form keeps the nodes exactly antisymmetric and the endpoints at +-1.
    let nodes: Vec<f64> = (0..size)
        .map(|j| ((degree as f64 - 2.0 * j as f64) * half_pi_over_n).sin())
        .collect();
    let c = |j: usize| if j == 0 || j == degree { 2.0 } else { 1.0 };
    let sign = |j: usize| if j.is_multiple_of(2) { 1.0 } else { -1.0 };

    let mut d1 = DMatrix::<f64>::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            if i == j {
                continue;
            }
            // t_i - t_j = 2 sin((i + j) pi / 2N) sin((j - i) pi / 2N)
            let diff = 2.0
                * ((i + j) as f64 * half_pi_over_n).sin()
                * ((j as f64 - i as f64) * half_pi_over_n).sin();
            d1[(i, j)] = c(i) / c(j) * sign(i + j) / diff;
        }
    }
    fix_diagonal(&mut d1);
    let mut d2 = &d1 * &d1;
    fix_diagonal(&mut d2);

    let bary = (0..size)
        .map(|j| sign(j) * if j == 0 || j == degree { 0.5 } else { 1.0 })
        .collect();
    Ok(SpectralGrid { degree, nodes, bary, d1, d2 })
}

/// Negative-sum trick: rows annihilate constants.
fn fix_diagonal(m: &mut DMatrix<f64>) {
    for i in 0..m.nrows() {
        m[(i, i)] = 0.0;
        let off: f64 = m.row(i).iter().sum();
        m[(i, i)] = -off;
    }
}

impl SpectralGrid {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn d1(&self) -> &DMatrix<f64> {
        &self.d1
    }

    pub fn d2(&self) -> &DMatrix<f64> {
        &self.d2
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.nodes.iter().map(|&t| f(t)))
    }

    /// Node values of `P_{k,n}`.
    pub fn sample_mode(&self, k: usize, n: usize) -> Result<DVector<f64>> {
        let vals: Result<Vec<f64>> = self
            .nodes
            .iter()
            .map(|&t| polyspec::gegenbauer_eval(k, n, t))
            .collect();
        Ok(DVector::from_vec(vals?))
    }

    /// Barycentric weights of `t` against the nodes, or the node index when
    /// `t` coincides with one.
    fn bary_row(&self, t: f64) -> std::result::Result<Vec<f64>, usize> {
        let mut row = Vec::with_capacity(self.len());
        for (j, (&x, &w)) in self.nodes.iter().zip(&self.bary).enumerate() {
            let d = t - x;
            if d == 0.0 {
                return Err(j);
            }
            row.push(w / d);
        }
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|r| *r /= total);
        Ok(row)
    }

    /// Barycentric interpolant of node values at `t`.
    pub fn interpolate(&self, phi: &[f64], t: f64) -> Result<f64> {
        if !(t.abs() <= 1.0) {
            return Err(Error::Domain(format!("t = {t} lies outside [-1, 1]")));
        }
        check_len(phi.len(), self.len())?;
        Ok(self.interpolate_unchecked(phi, t))
    }

    fn interpolate_unchecked(&self, phi: &[f64], t: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&x, &w), &f) in self.nodes.iter().zip(&self.bary).zip(phi) {
            let d = t - x;
            if d == 0.0 {
                return f;
            }
            let r = w / d;
            num += r * f;
            den += r;
        }
        num / den
    }

    /// Interpolation matrix from the nodes to the points `ts`.
    pub fn resample_matrix(&self, ts: &[f64]) -> DMatrix<f64> {
        let mut e = DMatrix::<f64>::zeros(ts.len(), self.len());
        for (i, &t) in ts.iter().enumerate() {
            match self.bary_row(t) {
                Ok(row) => {
                    for (j, r) in row.into_iter().enumerate() {
                        e[(i, j)] = r;
                    }
                }
                Err(j) => e[(i, j)] = 1.0,
            }
        }
        e
    }

    /// Sign-change zeros of the interpolant, in increasing order.
    ///
    /// The interpolant is sampled at `t = cos(i pi / 8N)`; samples with
    /// magnitude at most `max(1e-9 ||phi||_inf, 1e-12)` carry no sign, so
    /// tangencies and rounding-level profiles are not counted. Each bracket
    /// is refined by bisection.
    pub fn nodal_zeros(&self, phi: &[f64]) -> Vec<f64> {
        let scale = phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let dead_band = (1e-9 * scale).max(NODAL_FLOOR);
        let signed = |v: f64| {
            if v > dead_band {
                1
            } else if v < -dead_band {
                -1
            } else {
                0
            }
        };
        let refinement = 8 * self.degree;
        let mut zeros = Vec::new();
        let mut last: Option<(f64, i32)> = None;
        for i in 0..=refinement {
            let t = (std::f64::consts::PI * i as f64 / refinement as f64).cos();
            let s = signed(self.interpolate_unchecked(phi, t));
            if s == 0 {
                continue;
            }
            if let Some((t_last, s_last)) = last {
                if s != s_last {
                    zeros.push(self.bisect_zero(phi, t_last, t, s_last));
                }
            }
            last = Some((t, s));
        }
        zeros.sort_by(|a, b| a.total_cmp(b));
        zeros
    }

    fn bisect_zero(&self, phi: &[f64], mut a: f64, mut b: f64, sign_a: i32) -> f64 {
        for _ in 0..80 {
            let mid = 0.5 * (a + b);
            let v = self.interpolate_unchecked(phi, mid);
            if (v > 0.0) == (sign_a > 0) && v != 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }

    pub fn nodal_count(&self, phi: &[f64]) -> usize {
        self.nodal_zeros(phi).len()
    }

    /// Node values of `phi(-t)`; the grid is antisymmetric so this is a reversal.
    pub fn reflect(&self, phi: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(phi.len(), phi.iter().rev().copied())
    }
}

fn check_len(got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::InvalidParameter(format!(
            "profile has {got} values, grid has {want} nodes"
        )));
    }
    Ok(())
}

/// The collocated equation for one parameter set, with the weighted Gram
/// matrix used for inner products of node vectors.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    grid: SpectralGrid,
    params: ModelParams,
    linear_op: DMatrix<f64>,
    quadrature: QuadratureRule,
    gram: DMatrix<f64>,
}

impl DiscreteSystem {
    /// `quad_points` Gauss points are used for inner products; `N + 1` or
    /// more makes them exact for node vectors.
    pub fn new(grid: SpectralGrid, params: ModelParams, quad_points: usize) -> Result<Self> {
        params.validate()?;
        let n = params.n as f64;
        let size = grid.len();
        let mut linear_op = DMatrix::<f64>::zeros(size, size);
        for i in 0..size {
            let t = grid.nodes[i];
            let damp = 1.0 - t * t;
            for j in 0..size {
                linear_op[(i, j)] = damp * grid.d2[(i, j)] - n * t * grid.d1[(i, j)];
            }
        }
        let quadrature = polyspec::gauss_jacobi_rule(quad_points, params.n)?;
        let e = grid.resample_matrix(quadrature.nodes());
        let w = DMatrix::from_diagonal(&DVector::from_column_slice(quadrature.weights()));
        let mut gram = e.transpose() * w * &e;
        gram = 0.5 * (&gram + gram.transpose());
        Ok(Self { grid, params, linear_op, quadrature, gram })
    }

    pub fn with_degree(degree: usize, params: ModelParams) -> Result<Self> {
        Self::new(build_grid(degree)?, params, degree + 2)
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn size(&self) -> usize {
        self.grid.len()
    }

    /// `L = diag(1 - t^2) D2 - n diag(t) D1`.
    pub fn linear_op(&self) -> &DMatrix<f64> {
        &self.linear_op
    }

    pub fn quadrature(&self) -> &QuadratureRule {
        &self.quadrature
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// `int a b (1 - t^2)^{(n-2)/2} dt` for node vectors.
    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(&(&self.gram * b))
    }

    pub fn norm(&self, a: &DVector<f64>) -> f64 {
        self.inner(a, a).max(0.0).sqrt()
    }

    pub fn sample_mode(&self, k: usize) -> Result<DVector<f64>> {
        self.grid.sample_mode(k, self.params.n)
    }

    /// `max(1, max_i |c(lambda)/(q-2) N'(phi_i)|)`: the size of the zero-order
    /// term, the reference scale for "numerically zero" eigenvalues.
    pub fn operator_scale(&self, phi: &DVector<f64>, lambda: f64) -> Result<f64> {
        let factor = self.params.nonlinear_factor(lambda);
        let mut scale = 1.0f64;
        for (i, &p) in phi.iter().enumerate() {
            let d = self.params.nonlinearity_deriv(p).map_err(|_| nonpositive(i, p))?;
            scale = scale.max((factor * d).abs());
        }
        Ok(scale)
    }

    /// `(phi'(-1), phi'(1))` from the spectral derivative.
    pub fn endpoint_slopes(&self, phi: &DVector<f64>) -> (f64, f64) {
        let last = self.size() - 1;
        let row = |i: usize| self.grid.d1.row(i).dot(&phi.transpose());
        (row(last), row(0))
    }

    fn check_profile(&self, phi: &DVector<f64>) -> Result<()> {
        check_len(phi.len(), self.size())?;
        for (i, &p) in phi.iter().enumerate() {
            if !(p + 1.0 > 0.0) {
                return Err(nonpositive(i, p));
            }
        }
        Ok(())
    }
}

fn nonpositive(node: usize, phi: f64) -> Error {
    Error::NonPositive { node, u: phi + 1.0 }
}

/// A profile with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPoint {
    /// Values of `w = u - 1` at the nodes.
    pub phi: Vec<f64>,
    pub lambda: f64,
    pub s_coord: f64,
    pub nodal_count: usize,
    /// Smallest-magnitude eigenvalue of the Jacobian, with sign.
    pub sigma_min: f64,
    /// `min_i (phi_i + 1)`.
    pub u_min: f64,
}

impl SolutionPoint {
    pub fn diagnose(sys: &DiscreteSystem, phi: &DVector<f64>, lambda: f64, s_coord: f64) -> Result<Self> {
        let jac = assemble_jacobian(phi, lambda, sys)?;
        let values: Vec<f64> = phi.iter().copied().collect();
        Ok(Self {
            nodal_count: sys.grid.nodal_count(&values),
            sigma_min: sigma_min(&jac)?,
            u_min: phi.min() + 1.0,
            phi: values,
            lambda,
            s_coord,
        })
    }

    pub fn phi_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.phi)
    }
}

/// Collocated residual: the reduced ODE at interior nodes and its regular
/// limit at `t = +-1`.
pub fn assemble_residual(phi: &DVector<f64>, lambda: f64, sys: &DiscreteSystem) -> Result<DVector<f64>> {
    sys.check_profile(phi)?;
    let dphi = &sys.grid.d1 * phi;
    let d2phi = &sys.grid.d2 * phi;
    let last = sys.size() - 1;
    let mut out = DVector::zeros(sys.size());
    for i in 0..=last {
        out[i] = if i == 0 {
            endpoint_residual(Side::Plus, phi[i], dphi[i], lambda, &sys.params)?
        } else if i == last {
            endpoint_residual(Side::Minus, phi[i], dphi[i], lambda, &sys.params)?
        } else {
            let pt = ProfilePoint { t: sys.grid.nodes[i], phi: phi[i], dphi: dphi[i], d2phi: d2phi[i] };
            ode_residual(&pt, lambda, &sys.params)?
        };
    }
    Ok(out)
}

/// Derivative of [`assemble_residual`] in `phi`: `L + diag(c/(q-2) N'(phi))`.
pub fn assemble_jacobian(phi: &DVector<f64>, lambda: f64, sys: &DiscreteSystem) -> Result<DMatrix<f64>> {
    sys.check_profile(phi)?;
    let factor = sys.params.nonlinear_factor(lambda);
    let mut jac = sys.linear_op.clone();
    for (i, &p) in phi.iter().enumerate() {
        jac[(i, i)] += factor * sys.params.nonlinearity_deriv(p)?;
    }
    Ok(jac)
}

/// Derivative of [`assemble_residual`] in `lambda`.
pub fn assemble_lambda_derivative(phi: &DVector<f64>, sys: &DiscreteSystem) -> Result<DVector<f64>> {
    sys.check_profile(phi)?;
    let scale = 1.0 / sys.params.metric_factor();
    let vals: Result<Vec<f64>> = phi.iter().map(|&p| Ok(scale * sys.params.nonlinearity(p)?)).collect();
    Ok(DVector::from_vec(vals?))
}

/// Eigenvalues of a dense matrix ordered by increasing modulus.
pub fn eigenvalues_by_magnitude(mat: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if !mat.is_square() {
        return Err(Error::InvalidParameter("matrix must be square".into()));
    }
    let schur = Schur::try_new(mat.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric("Schur iteration did not converge".into()))?;
    let mut eig: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    Ok(eig)
}

/// Smallest-magnitude eigenvalue of `mat`, with sign.
///
/// The collocated linearization is similar to an operator that is symmetric
/// in the weighted product, so its eigenvalues are real; their real part is
/// returned.
pub fn sigma_min(mat: &DMatrix<f64>) -> Result<f64> {
    eigenvalues_by_magnitude(mat)?
        .first()
        .map(|z| z.re)
        .ok_or_else(|| Error::Numeric("empty matrix".into()))
}

/// The `count` smallest eigenvalues of `-L` (ascending).
pub fn linear_spectrum(sys: &DiscreteSystem, count: usize) -> Result<Vec<f64>> {
    if count > sys.grid.degree - 1 {
        return Err(Error::InvalidParameter(format!(
            "at most N - 1 = {} eigenvalues are resolved, asked for {count}",
            sys.grid.degree - 1
        )));
    }
    let neg = -sys.linear_op.clone();
    let schur = Schur::try_new(neg, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric("Schur iteration did not converge".into()))?;
    let mut eig: Vec<f64> = schur.complex_eigenvalues().iter().map(|z| z.re).collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    eig.truncate(count);
    Ok(eig)
}

/// Eigenvector of `-L` for an (approximate) eigenvalue, by inverse
/// iteration; normalized to unit weighted norm with positive value at `t = 1`.
pub fn linear_eigenvector(sys: &DiscreteSystem, eigenvalue: f64) -> Result<DVector<f64>> {
    let size = sys.size();
    let shift = eigenvalue + 1e-9 * eigenvalue.abs().max(1.0);
    let shifted = -sys.linear_op.clone() - DMatrix::<f64>::identity(size, size) * shift;
    let lu = shifted.lu();
    let mut v = DVector::from_element(size, 1.0);
    for _ in 0..4 {
        v = lu
            .solve(&v)
            .ok_or_else(|| Error::Numeric("shifted operator is singular".into()))?;
        let nrm = sys.norm(&v);
        v /= nrm;
    }
    if v[0] < 0.0 {
        v = -v;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::lambda_k;

    fn params(n: usize) -> ModelParams {
        ModelParams::new(n, 1.0, if n < 4 { 3.0 } else { 2.5 }).unwrap()
    }

    #[test]
    fn small_grid_nodes() {
        let g = build_grid(2).unwrap();
        assert_eq!(g.nodes(), &[1.0, 0.0, -1.0]);
        assert!(build_grid(1).is_err());
    }

    #[test]
    fn operators_annihilate_constants() {
        for degree in [4, 17, 64, 96] {
            let g = build_grid(degree).unwrap();
            let ones = DVector::from_element(g.len(), 1.0);
            assert!((g.d1() * &ones).amax() < 1e-12);
            assert!((g.d2() * &ones).amax() < 1e-12 * g.d2().amax().max(1.0));
        }
    }

    #[test]
    fn derivative_of_square() {
        let g = build_grid(24).unwrap();
        let sq = g.sample(|t| t * t);
        let d = g.d1() * sq;
        for (i, &t) in g.nodes().iter().enumerate() {
            assert!((d[i] - 2.0 * t).abs() < 1e-13);
        }
    }

    #[test]
    fn interpolation() {
        let g = build_grid(20).unwrap();
        let poly = |t: f64| 1.0 - 3.0 * t + t.powi(7) - 0.5 * t.powi(20);
        let phi: Vec<f64> = g.nodes().iter().map(|&t| poly(t)).collect();
        for (j, &t) in g.nodes().iter().enumerate() {
            assert_eq!(g.interpolate(&phi, t).unwrap(), phi[j]);
        }
        for i in 0..50 {
            let t = -0.99 + 0.0397 * i as f64;
            assert!((g.interpolate(&phi, t).unwrap() - poly(t)).abs() < 1e-12);
        }
        assert!(g.interpolate(&phi, 1.2).is_err());
    }

    #[test]
    fn interpolation_matches_gegenbauer() {
        let g = build_grid(64).unwrap();
        let phi: Vec<f64> = g.sample_mode(5, 3).unwrap().iter().copied().collect();
        let want = polyspec::gegenbauer_eval(5, 3, 0.37).unwrap();
        assert!((g.interpolate(&phi, 0.37).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn nodal_counts() {
        let g = build_grid(64).unwrap();
        let p2: Vec<f64> = g.sample_mode(2, 3).unwrap().iter().copied().collect();
        assert_eq!(g.nodal_count(&p2), 2);
        assert_eq!(g.nodal_count(&vec![0.3; g.len()]), 0);
        let p7: Vec<f64> = g.sample_mode(7, 2).unwrap().iter().copied().collect();
        let zeros = g.nodal_zeros(&p7);
        assert_eq!(zeros.len(), 7);
        let exact = polyspec::gegenbauer_zeros(7, 2).unwrap();
        for (a, b) in zeros.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-12);
        }
        // Tangency without sign change: t^2 has a double zero.
        let sq: Vec<f64> = g.nodes().iter().map(|t| t * t).collect();
        assert_eq!(g.nodal_count(&sq), 0);
        assert_eq!(g.nodal_count(&vec![0.0; g.len()]), 0);
    }

    #[test]
    fn residual_of_zero_vanishes() {
        let sys = DiscreteSystem::with_degree(16, params(3)).unwrap();
        let zero = DVector::zeros(sys.size());
        for lam in [0.5, 3.0, 40.0] {
            assert_eq!(assemble_residual(&zero, lam, &sys).unwrap().amax(), 0.0);
        }
    }

    #[test]
    fn residual_rejects_nonpositive() {
        let sys = DiscreteSystem::with_degree(8, params(2)).unwrap();
        let mut phi = DVector::zeros(sys.size());
        phi[3] = -1.5;
        match assemble_residual(&phi, 1.0, &sys) {
            Err(Error::NonPositive { node, .. }) => assert_eq!(node, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(assemble_jacobian(&phi, 1.0, &sys).is_err());
    }

    #[test]
    fn linearized_residual_of_eigenfunction() {
        for n in [2, 3] {
            let sys = DiscreteSystem::with_degree(64, params(n)).unwrap();
            for k in 1..6 {
                let lam = lambda_k(k, sys.params()).unwrap();
                let p = sys.sample_mode(k).unwrap();
                let jac0 = assemble_jacobian(&DVector::zeros(sys.size()), lam, &sys).unwrap();
                assert!((jac0 * p).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn residual_matches_pointwise_model() {
        let prm = ModelParams::new(3, 0.7, 3.4).unwrap();
        let sys = DiscreteSystem::with_degree(30, prm).unwrap();
        let phi = sys.grid().sample(|t| 0.3 * (2.0 * t).sin() + 0.1 * t * t);
        let lam = 5.5;
        let res = assemble_residual(&phi, lam, &sys).unwrap();
        let d1 = sys.grid().d1() * &phi;
        let d2 = sys.grid().d2() * &phi;
        for (i, &t) in sys.grid().nodes().iter().enumerate() {
            let pt = ProfilePoint { t, phi: phi[i], dphi: d1[i], d2phi: d2[i] };
            let want = ode_residual(&pt, lam, &prm).unwrap();
            assert!((res[i] - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
        // The matrix form agrees with the pointwise form.
        let nonlin = DVector::from_iterator(
            sys.size(),
            phi.iter().map(|&p| prm.nonlinear_factor(lam) * prm.nonlinearity(p).unwrap()),
        );
        let via_matrix = sys.linear_op() * &phi + nonlin;
        assert!((via_matrix - &res).amax() < 1e-9);
    }

    #[test]
    fn jacobian_at_zero_has_c_on_diagonal() {
        let prm = ModelParams::new(2, 2.0, 3.7).unwrap();
        let sys = DiscreteSystem::with_degree(12, prm).unwrap();
        let lam = 4.2;
        let jac = assemble_jacobian(&DVector::zeros(sys.size()), lam, &sys).unwrap();
        let diff = jac - sys.linear_op();
        for i in 0..sys.size() {
            assert!((diff[(i, i)] - prm.c_factor(lam)).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_sigma() {
        let eye = DMatrix::<f64>::identity(5, 5);
        assert_eq!(sigma_min(&eye).unwrap(), 1.0);
    }

    #[test]
    fn spectrum_examples() {
        let sys = DiscreteSystem::with_degree(48, params(2)).unwrap();
        let spec = linear_spectrum(&sys, 5).unwrap();
        for (j, v) in spec.iter().enumerate() {
            assert!((v - (j * (j + 1)) as f64).abs() < 1e-8);
        }
        let sys = DiscreteSystem::with_degree(48, params(3)).unwrap();
        let spec = linear_spectrum(&sys, 4).unwrap();
        for (j, v) in spec.iter().enumerate() {
            assert!((v - (j * (j + 2)) as f64).abs() < 1e-8);
        }
        assert!(linear_spectrum(&sys, 48).is_err());
    }

    #[test]
    fn eigenvectors_are_gegenbauer() {
        let sys = DiscreteSystem::with_degree(96, params(3)).unwrap();
        for k in [1, 2, 5] {
            let v = linear_eigenvector(&sys, (k * (k + 2)) as f64).unwrap();
            let mut p = sys.sample_mode(k).unwrap();
            p /= sys.norm(&p);
            assert!(sys.norm(&(v - p)) < 1e-8);
        }
    }

    #[test]
    fn gram_reproduces_weighted_integrals() {
        let sys = DiscreteSystem::with_degree(20, params(4)).unwrap();
        let one = DVector::from_element(sys.size(), 1.0);
        assert!((sys.inner(&one, &one) - 4.0 / 3.0).abs() < 1e-14);
        let p3 = sys.sample_mode(3).unwrap();
        let p4 = sys.sample_mode(4).unwrap();
        assert!(sys.inner(&p3, &p4).abs() < 1e-14);
        assert!((sys.inner(&p3, &p3) - polyspec::square_integral(3, 4).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn reflection_is_node_reversal() {
        let g = build_grid(15).unwrap();
        let phi = g.sample(|t| t.powi(3) + 0.2 * t);
        let refl = g.reflect(&phi);
        for (i, &t) in g.nodes().iter().enumerate() {
            assert!((refl[i] - (-(t.powi(3)) - 0.2 * t)).abs() < 1e-15);
        }
    }
}
