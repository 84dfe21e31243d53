//! Gegenbauer polynomials `P_{k,n}` normalized so that `P_{k,n}(1) = 1`,
//! together with the `(1 - t^2)^{(n-2)/2}`-weighted integrals used by the
//! bifurcation analysis.
//!
//! Everything here is a pure function of its arguments.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponents of the Jacobi weight `(1 - t)^alpha (1 + t)^beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "Jacobi exponents must exceed -1 (alpha = {alpha}, beta = {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// `alpha = beta = (n - 2) / 2`, the zonal case on `S^n`.
    pub fn ultraspherical(n: usize) -> Result<Self> {
        check_dimension(n)?;
        let a = weight_exponent(n);
        Self::new(a, a)
    }

    /// Eigenvalue `k (k + alpha + beta + 1)` of the Jacobi equation.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let k = k as f64;
        k * (k + self.alpha + self.beta + 1.0)
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "sphere dimension must be at least 2, got {n}"
        )));
    }
    Ok(())
}

fn check_unit_interval(t: f64) -> Result<()> {
    if !(t.abs() <= 1.0) {
        return Err(Error::Domain(format!("t = {t} lies outside [-1, 1]")));
    }
    Ok(())
}

/// Exponent `(n - 2) / 2` of the weight `(1 - t^2)^{(n-2)/2}`.
pub fn weight_exponent(n: usize) -> f64 {
    (n as f64 - 2.0) / 2.0
}

/// `int_{-1}^{1} (1 - t^2)^{(n-2)/2} dt`.
pub fn weight_mass(n: usize) -> f64 {
    // Step a -> a + 1 multiplies the integral by 2(a + 1) / (2a + 3).
    let (mut a, mut mass) = if n.is_multiple_of(2) {
        (0.0, 2.0)
    } else {
        (0.5, std::f64::consts::FRAC_PI_2)
    };
    let target = weight_exponent(n);
    while a < target - 0.25 {
        a += 1.0;
        mass *= 2.0 * a / (2.0 * a + 1.0);
    }
    mass
}

/// `int_{-1}^{1} t^{2j} (1 - t^2)^{(n-2)/2} dt`, by the Beta-function recurrence.
pub fn even_moment(j: usize, n: usize) -> f64 {
    let a = weight_exponent(n);
    (1..=j).fold(weight_mass(n), |acc, i| {
        let i = i as f64;
        acc * (2.0 * i - 1.0) / (2.0 * i + 2.0 * a + 1.0)
    })
}

/// Gauss quadrature for the weight `(1 - t^2)^{(n-2)/2}` on `(-1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// Recurrence coefficient `b_j` of the monic ultraspherical family,
/// `p_{j+1} = t p_j - b_j p_{j-1}`.
fn monic_recurrence_coeff(j: usize, a: f64) -> f64 {
    let j = j as f64;
    j * (j + 2.0 * a) / ((2.0 * j + 2.0 * a + 1.0) * (2.0 * j + 2.0 * a - 1.0))
}

/// Orthonormal polynomials `p_0..p_{m-1}` at `t` and `p_m`, `p_m'`.
fn orthonormal_sweep(m: usize, a: f64, mass: f64, t: f64) -> (f64, f64, f64) {
    let mut sum_sq = 0.0;
    let (mut p_prev, mut p) = (0.0, 1.0 / mass.sqrt());
    let (mut d_prev, mut d) = (0.0, 0.0);
    let mut beta_prev = 0.0;
    for j in 0..m {
        sum_sq += p * p;
        let beta = monic_recurrence_coeff(j + 1, a).sqrt();
        let p_next = (t * p - beta_prev * p_prev) / beta;
        let d_next = (p + t * d - beta_prev * d_prev) / beta;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        beta_prev = beta;
    }
    (sum_sq, p, d)
}

/// `m`-point Gauss rule for `(1 - t^2)^{(n-2)/2}`.
///
/// Nodes come from the eigenvalues of the symmetric Jacobi matrix and are
/// polished by Newton steps on the orthonormal `p_m`; weights use the
/// Christoffel form `1 / sum_j p_j(t_i)^2`. The rule is symmetrized so that
/// `nodes[i] == -nodes[m-1-i]` bitwise.
pub fn gauss_jacobi_rule(m: usize, n: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "quadrature needs at least one point".into(),
        ));
    }
    check_dimension(n)?;
    let a = weight_exponent(n);
    let mass = weight_mass(n);

    let mut jacobi = DMatrix::<f64>::zeros(m, m);
    for j in 1..m {
        let off = monic_recurrence_coeff(j, a).sqrt();
        jacobi[(j, j - 1)] = off;
        jacobi[(j - 1, j)] = off;
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(|x, y| x.total_cmp(y));

    for t in nodes.iter_mut() {
        for _ in 0..3 {
            let (_, p, d) = orthonormal_sweep(m, a, mass, *t);
            if d == 0.0 {
                break;
            }
            let step = p / d;
            *t -= step;
            if step.abs() < 1e-17 {
                break;
            }
        }
    }
    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&t| 1.0 / orthonormal_sweep(m, a, mass, t).0)
        .collect();

    for i in 0..m / 2 {
        let j = m - 1 - i;
        let t = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -t;
        nodes[j] = t;
        weights[i] = w;
        weights[j] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

fn eval_with_deriv(k: usize, n: usize, t: f64) -> (f64, f64) {
    if k == 0 {
        return (1.0, 0.0);
    }
    let nf = n as f64;
    let (mut p_prev, mut p) = (1.0, t);
    let (mut d_prev, mut d) = (0.0, 1.0);
    for j in 1..k {
        let jf = j as f64;
        let a = 2.0 * jf + nf - 1.0;
        let c = jf + nf - 1.0;
        let p_next = (a * t * p - jf * p_prev) / c;
        let d_next = (a * (p + t * d) - jf * d_prev) / c;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// `P_{k,n}(t)` via the normalized recurrence
/// `(j + n - 1) P_{j+1} = (2j + n - 1) t P_j - j P_{j-1}`.
pub fn gegenbauer_eval(k: usize, n: usize, t: f64) -> Result<f64> {
    check_dimension(n)?;
    check_unit_interval(t)?;
    Ok(eval_with_deriv(k, n, t).0)
}

pub fn gegenbauer_deriv(k: usize, n: usize, t: f64) -> Result<f64> {
    check_dimension(n)?;
    check_unit_interval(t)?;
    Ok(eval_with_deriv(k, n, t).1)
}

/// Second derivative of `P_{k,n}` from the twice-differentiated recurrence.
pub fn gegenbauer_deriv2(k: usize, n: usize, t: f64) -> Result<f64> {
    check_dimension(n)?;
    check_unit_interval(t)?;
    if k < 2 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let (mut p_prev, mut p) = (1.0, t);
    let (mut d_prev, mut d) = (0.0, 1.0);
    let (mut dd_prev, mut dd) = (0.0, 0.0);
    for j in 1..k {
        let jf = j as f64;
        let a = 2.0 * jf + nf - 1.0;
        let c = jf + nf - 1.0;
        let p_next = (a * t * p - jf * p_prev) / c;
        let d_next = (a * (p + t * d) - jf * d_prev) / c;
        let dd_next = (a * (2.0 * d + t * dd) - jf * dd_prev) / c;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        dd_prev = dd;
        dd = dd_next;
    }
    Ok(dd)
}

/// `P_{0,n}(t), ..., P_{kmax,n}(t)`.
pub fn gegenbauer_all(kmax: usize, n: usize, t: f64) -> Result<Vec<f64>> {
    check_dimension(n)?;
    check_unit_interval(t)?;
    let nf = n as f64;
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(1.0);
    if kmax >= 1 {
        out.push(t);
    }
    for j in 1..kmax {
        let jf = j as f64;
        let next = ((2.0 * jf + nf - 1.0) * t * out[j] - jf * out[j - 1]) / (jf + nf - 1.0);
        out.push(next);
    }
    Ok(out)
}

/// Root of `P_{k,n}` in a bracket with a sign change: Newton steps that stay
/// inside the bracket, bisection otherwise.
fn refine_root(k: usize, n: usize, mut lo: f64, mut hi: f64) -> f64 {
    let lo_negative = eval_with_deriv(k, n, lo).0 < 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (f, d) = eval_with_deriv(k, n, x);
        if f == 0.0 {
            return x;
        }
        if (f < 0.0) == lo_negative {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - f / d;
        let next = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(1e-300) || hi - lo <= f64::EPSILON {
            return next;
        }
        x = next;
    }
    x
}

/// The `k` simple zeros of `P_{k,n}` in increasing order.
///
/// Brackets for mode `j` are the intervals cut out by the zeros of mode
/// `j - 1` together with the endpoints `-1`, `1`; each holds exactly one zero.
pub fn gegenbauer_zeros(k: usize, n: usize) -> Result<Vec<f64>> {
    check_dimension(n)?;
    if k == 0 {
        return Err(Error::InvalidParameter(
            "P_{0,n} is constant and has no zeros".into(),
        ));
    }
    let mut zeros = vec![0.0];
    for j in 2..=k {
        let mut edges = Vec::with_capacity(j + 1);
        edges.push(-1.0);
        edges.extend_from_slice(&zeros);
        edges.push(1.0);
        let mut next: Vec<f64> = edges
            .windows(2)
            .map(|w| refine_root(j, n, w[0], w[1]))
            .collect();
        for i in 0..j / 2 {
            let r = 0.5 * (next[j - 1 - i] - next[i]);
            next[i] = -r;
            next[j - 1 - i] = r;
        }
        if j % 2 == 1 {
            next[j / 2] = 0.0;
        }
        zeros = next;
    }
    Ok(zeros)
}

/// `int_{-1}^{1} f g (1 - t^2)^{(n-2)/2} dt` with an `m`-point Gauss rule.
pub fn weighted_inner<F, G>(f: F, g: G, n: usize, m: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let rule = gauss_jacobi_rule(m, n)?;
    Ok(rule.integrate(|t| f(t) * g(t)))
}

fn check_mode(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("mode index must be at least 1".into()));
    }
    Ok(())
}

/// `int P_{k,n}^2 w dt`.
pub fn square_integral(k: usize, n: usize) -> Result<f64> {
    let rule = gauss_jacobi_rule(k + 1, n)?;
    Ok(rule.integrate(|t| eval_with_deriv(k, n, t).0.powi(2)))
}

/// `int P_{k,n}^3 w dt`: zero for odd `k`, positive for even `k`.
pub fn cube_integral(k: usize, n: usize) -> Result<f64> {
    check_mode(k)?;
    let rule = gauss_jacobi_rule(3 * k / 2 + 2, n)?;
    Ok(rule.integrate(|t| eval_with_deriv(k, n, t).0.powi(3)))
}

/// Expansion `P_{k,n}^2 = sum_j G_j P_{j,n}` in the normalized basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffExpansion {
    pub k: usize,
    pub n: usize,
    /// `G_0, ..., G_{2k}`.
    pub coeffs: Vec<f64>,
}

impl CoeffExpansion {
    pub fn eval(&self, t: f64) -> Result<f64> {
        let basis = gegenbauer_all(self.coeffs.len() - 1, self.n, t)?;
        Ok(self.coeffs.iter().zip(&basis).map(|(g, p)| g * p).sum())
    }

    /// Equals the expansion evaluated at `t = 1`.
    pub fn sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// Weighted `L^2` distance between `P_{k,n}^2` and the expansion.
    pub fn reconstruction_error(&self) -> Result<f64> {
        let rule = gauss_jacobi_rule(2 * self.k + 2, self.n)?;
        let err = rule.integrate(|t| {
            let sq = eval_with_deriv(self.k, self.n, t).0.powi(2);
            let approx = self.eval(t).unwrap_or(f64::NAN);
            (sq - approx).powi(2)
        });
        Ok(err.sqrt())
    }
}

/// Linearization coefficients by weighted projection,
/// `G_j = <P_k^2, P_j>_w / <P_j, P_j>_w`.
pub fn linearization_coeffs(k: usize, n: usize) -> Result<CoeffExpansion> {
    check_mode(k)?;
    let rule = gauss_jacobi_rule(2 * k + 1, n)?;
    let mut num = vec![0.0; 2 * k + 1];
    let mut den = vec![0.0; 2 * k + 1];
    for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
        let basis = gegenbauer_all(2 * k, n, t)?;
        let sq = basis[k] * basis[k];
        for j in 0..=2 * k {
            num[j] += w * sq * basis[j];
            den[j] += w * basis[j] * basis[j];
        }
    }
    let coeffs = num.iter().zip(&den).map(|(a, b)| a / b).collect();
    Ok(CoeffExpansion { k, n, coeffs })
}

/// Ascending-coefficient polynomial helpers.
fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

fn poly_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0))
        .collect()
}

fn poly_product(factors: &[[f64; 2]]) -> Vec<f64> {
    factors.iter().fold(vec![1.0], |acc, f| poly_mul(&acc, f))
}

/// Diagnostic run of the Gasper-type positivity recurrence
/// `A_j d_{j+1} = B_j d_j - C_j d_{j-1}` and the auxiliary quartic `Q_J`,
/// compared against the projection coefficients. Never feeds back into
/// [`linearization_coeffs`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasperReport {
    pub k: usize,
    pub n: usize,
    pub a_coeffs: Vec<f64>,
    pub b_coeffs: Vec<f64>,
    pub c_coeffs: Vec<f64>,
    /// `d_0, ..., d_{2k}` from the seeds `d_0 = d_1 = 1`.
    pub d: Vec<f64>,
    pub d_signs: Vec<i8>,
    pub all_d_positive: bool,
    /// Ascending coefficients of `Q_J`.
    pub q_poly: Vec<f64>,
    /// Sign changes of `Q_J` on `(0, inf)`.
    pub q_sign_changes: usize,
    pub q_roots: Vec<f64>,
    /// Whether `Q_J = A_{J+1} - A_J` holds identically.
    pub q_equals_a_difference: bool,
    /// All even-index projection coefficients are positive.
    pub projection_positive: bool,
    /// `all_d_positive == projection_positive`.
    pub consistent_with_projection: bool,
}

fn signum_i8(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

pub fn gasper_recurrence_report(k: usize, n: usize) -> Result<GasperReport> {
    check_mode(k)?;
    check_dimension(n)?;
    let kf = k as f64;
    let nf = n as f64;
    let big_a = |j: f64| (j + 1.0) * (2.0 * j + nf) * (2.0 * kf + j + 2.0 * (nf - 1.0)) * (2.0 * kf - j);
    let big_b = |j: f64| j * (2.0 * kf + j - 1.0 + 2.0 * (nf - 1.0)) * (2.0 * kf - j + 1.0) * (2.0 * j);
    let big_c = |j: f64| {
        (j + nf - 2.0)
            * (2.0 * j + nf - 2.0)
            * (2.0 * j + nf - 1.0)
            * (2.0 * kf + j - 1.0 + 2.0 * (nf - 1.0))
            * (2.0 * kf - j + 1.0)
    };
    let top = 2 * k;
    let a_coeffs: Vec<f64> = (0..=top).map(|j| big_a(j as f64)).collect();
    let b_coeffs: Vec<f64> = (0..=top).map(|j| big_b(j as f64)).collect();
    let c_coeffs: Vec<f64> = (0..=top).map(|j| big_c(j as f64)).collect();

    let mut d = vec![1.0, 1.0];
    for j in 1..top {
        let next = (b_coeffs[j] * d[j] - c_coeffs[j] * d[j - 1]) / a_coeffs[j];
        d.push(next);
    }
    d.truncate(top + 1);
    let d_signs: Vec<i8> = d.iter().map(|&x| signum_i8(x)).collect();
    let all_d_positive = d.iter().all(|&x| x > 0.0);

    let first = poly_product(&[
        [2.0, 1.0],
        [2.0, 1.0],
        [2.0 * kf + 2.0 * nf - 1.0, 1.0],
        [2.0 * kf - 1.0, -1.0],
        [nf, 2.0],
    ]);
    let second = poly_product(&[
        [1.0, 1.0],
        [1.0, 1.0],
        [2.0 * kf + 2.0 * nf - 2.0, 1.0],
        [2.0 * kf, -1.0],
        [nf + 2.0, 2.0],
    ]);
    let mut q_poly = poly_sub(&first, &second);
    while q_poly.len() > 1 && q_poly.last() == Some(&0.0) {
        q_poly.pop();
    }
    let q_roots = positive_sign_changes(&q_poly);
    let q_equals_a_difference = (0..8).all(|j| {
        let jf = j as f64;
        (poly_eval(&q_poly, jf) - (big_a(jf + 1.0) - big_a(jf))).abs() < 1e-9
    });

    let expansion = linearization_coeffs(k, n)?;
    let projection_positive = expansion.coeffs.iter().step_by(2).all(|&g| g > 0.0);

    Ok(GasperReport {
        k,
        n,
        a_coeffs,
        b_coeffs,
        c_coeffs,
        d,
        d_signs,
        all_d_positive,
        q_sign_changes: q_roots.len(),
        q_poly,
        q_roots,
        q_equals_a_difference,
        projection_positive,
        consistent_with_projection: all_d_positive == projection_positive,
    })
}

/// Points where the polynomial changes sign on `(0, inf)`, located by
/// sampling up to the Cauchy root bound and bisecting each bracket.
fn positive_sign_changes(c: &[f64]) -> Vec<f64> {
    let deg = c.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let bound = 1.0 + c[..deg].iter().map(|x| (x / lead).abs()).fold(0.0, f64::max);
    let samples = 20_000;
    let mut roots = Vec::new();
    let mut prev_x = 0.0;
    let mut prev_f = poly_eval(c, 0.0);
    for i in 1..=samples {
        let x = bound * i as f64 / samples as f64;
        let f = poly_eval(c, x);
        if f == 0.0 {
            continue;
        }
        if prev_f != 0.0 && (f < 0.0) != (prev_f < 0.0) {
            let (mut lo, mut hi) = (prev_x, x);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (poly_eval(c, mid) < 0.0) == (prev_f < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = f;
    }
    roots
}

/// Literal Rodrigues-type formula
/// `(1-t^2)^{-a} (-1)^k / (2^k k!) d^k/dt^k (1-t^2)^{k+a}`, `a = (n-2)/2`.
///
/// Equals `P_{k,n}` only up to a `k`-dependent constant; kept as a cross-check
/// of the recurrence, not used for evaluation.
pub fn rodrigues_eval(k: usize, n: usize, t: f64) -> Result<f64> {
    check_dimension(n)?;
    check_unit_interval(t)?;
    let a = weight_exponent(n);
    // After m derivatives: (1 - t^2)^{k + a - m} p_m(t), with
    // p_{m+1} = -2 (k + a - m) t p_m + (1 - t^2) p_m'.
    let mut p = vec![1.0];
    for m in 0..k {
        let e = k as f64 + a - m as f64;
        let shifted = poly_mul(&p, &[0.0, -2.0 * e]);
        let deriv: Vec<f64> = if p.len() > 1 {
            p.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect()
        } else {
            vec![0.0]
        };
        let damped = poly_mul(&deriv, &[1.0, 0.0, -1.0]);
        p = poly_sub(&shifted, &damped.iter().map(|x| -x).collect::<Vec<_>>());
    }
    let scale = (1..=k).fold(1.0, |acc, i| acc / (2.0 * i as f64));
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * scale * poly_eval(&p, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn one_point_legendre_rule() {
        let r = gauss_jacobi_rule(1, 2).unwrap();
        assert_eq!(r.nodes(), &[0.0]);
        assert!(close(r.weights()[0], 2.0, 1e-15));
    }

    #[test]
    fn two_point_legendre_rule() {
        let r = gauss_jacobi_rule(2, 2).unwrap();
        let x = 1.0 / 3f64.sqrt();
        assert!(close(r.nodes()[0], -x, 1e-15) && close(r.nodes()[1], x, 1e-15));
        assert!(close(r.weights()[0], 1.0, 1e-14) && close(r.weights()[1], 1.0, 1e-14));
    }

    #[test]
    fn one_point_rule_mass_n4() {
        let r = gauss_jacobi_rule(1, 4).unwrap();
        assert!(close(r.weights()[0], 4.0 / 3.0, 1e-15));
    }

    #[test]
    fn rule_rejects_bad_parameters() {
        assert!(matches!(gauss_jacobi_rule(0, 3), Err(Error::InvalidParameter(_))));
        assert!(matches!(gauss_jacobi_rule(3, 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn explicit_low_modes() {
        assert!(close(gegenbauer_eval(1, 5, 0.3).unwrap(), 0.3, 1e-16));
        assert!(close(gegenbauer_eval(2, 2, 0.0).unwrap(), -0.5, 1e-16));
        assert!(close(gegenbauer_eval(7, 3, 1.0).unwrap(), 1.0, 1e-14));
        assert!(close(gegenbauer_eval(3, 4, -1.0).unwrap(), -1.0, 1e-14));
        for n in 2..7 {
            let nf = n as f64;
            for &t in &[-0.9, -0.2, 0.4, 0.77] {
                let want = ((nf + 1.0) * t * t - 1.0) / nf;
                assert!(close(gegenbauer_eval(2, n, t).unwrap(), want, 1e-15));
            }
        }
    }

    #[test]
    fn eval_outside_interval_is_domain_error() {
        assert!(matches!(gegenbauer_eval(2, 3, 1.5), Err(Error::Domain(_))));
        assert!(matches!(gegenbauer_deriv(2, 3, -1.01), Err(Error::Domain(_))));
        assert!(gegenbauer_eval(2, 3, f64::NAN).is_err());
    }

    #[test]
    fn derivative_examples() {
        for n in 2..6 {
            assert_eq!(gegenbauer_deriv(1, n, 0.37).unwrap(), 1.0);
        }
        assert_eq!(gegenbauer_deriv(2, 3, 0.0).unwrap(), 0.0);
        let d = gegenbauer_deriv(2, 2, -1.0).unwrap();
        assert!(close(d, -3.0, 1e-14));
        assert!(close(d / gegenbauer_eval(2, 2, -1.0).unwrap(), -3.0, 1e-14));
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-6;
        for k in 0..10 {
            for &t in &[-0.8, -0.1, 0.3, 0.65] {
                let fd = (gegenbauer_eval(k, 3, t + h).unwrap() - gegenbauer_eval(k, 3, t - h).unwrap())
                    / (2.0 * h);
                assert!(close(gegenbauer_deriv(k, 3, t).unwrap(), fd, 1e-6));
            }
        }
    }

    #[test]
    fn endpoint_ratio() {
        for n in 2..7 {
            for k in 1..12 {
                let ratio = gegenbauer_deriv(k, n, -1.0).unwrap() / gegenbauer_eval(k, n, -1.0).unwrap();
                let kf = k as f64;
                let want = -kf * (kf + n as f64 - 1.0) / n as f64;
                assert!(close(ratio, want, 1e-10 * want.abs()), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn zero_examples() {
        assert_eq!(gegenbauer_zeros(1, 4).unwrap(), vec![0.0]);
        let z = gegenbauer_zeros(2, 3).unwrap();
        assert!(close(z[0], -0.5, 1e-15) && close(z[1], 0.5, 1e-15));
        let z6 = gegenbauer_zeros(6, 2).unwrap();
        let z5 = gegenbauer_zeros(5, 2).unwrap();
        assert_eq!(z6.len(), 6);
        for i in 0..5 {
            assert!(z6[i] < z5[i] && z5[i] < z6[i + 1]);
        }
        assert!(gegenbauer_zeros(0, 2).is_err());
    }

    #[test]
    fn weighted_inner_examples() {
        let p1 = |t: f64| gegenbauer_eval(1, 2, t).unwrap();
        let p2 = |t: f64| gegenbauer_eval(2, 2, t).unwrap();
        assert!(weighted_inner(p1, p2, 2, 3).unwrap().abs() < 1e-15);
        assert!(close(weighted_inner(p1, p1, 2, 2).unwrap(), 2.0 / 3.0, 1e-15));
        assert!(close(weighted_inner(|_| 1.0, |_| 1.0, 4, 1).unwrap(), 4.0 / 3.0, 1e-15));
    }

    /// Exact monomial integration of a polynomial given by ascending coefficients.
    fn exact_weighted_integral(coeffs: &[f64], n: usize) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 2 == 0)
            .map(|(i, c)| c * even_moment(i / 2, n))
            .sum()
    }

    #[test]
    fn cube_integral_examples() {
        assert!(cube_integral(3, 5).unwrap().abs() < 1e-12);
        // ((3t^2 - 1)/2)^3 = (27 t^6 - 27 t^4 + 9 t^2 - 1) / 8
        let leg = [-1.0 / 8.0, 0.0, 9.0 / 8.0, 0.0, -27.0 / 8.0, 0.0, 27.0 / 8.0];
        let exact = exact_weighted_integral(&leg, 2);
        assert!(close(exact, 4.0 / 35.0, 1e-15));
        assert!(close(cube_integral(2, 2).unwrap(), 4.0 / 35.0, 1e-12));
        // ((5t^2 - 1)/4)^3 with weight (1 - t^2)
        let n4 = [-1.0 / 64.0, 0.0, 15.0 / 64.0, 0.0, -75.0 / 64.0, 0.0, 125.0 / 64.0];
        let exact = exact_weighted_integral(&n4, 4);
        assert!(close(exact, 2.0 / 63.0, 1e-15));
        assert!(close(cube_integral(2, 4).unwrap(), 2.0 / 63.0, 1e-12));
    }

    #[test]
    fn linearization_k1() {
        let e = linearization_coeffs(1, 2).unwrap();
        assert!(close(e.coeffs[0], 1.0 / 3.0, 1e-14));
        assert!(e.coeffs[1].abs() < 1e-14);
        assert!(close(e.coeffs[2], 2.0 / 3.0, 1e-14));
        // Hand expansion t^2 = (n R_2 + 1) / (n + 1).
        for n in 2..7 {
            let e = linearization_coeffs(1, n).unwrap();
            let nf = n as f64;
            assert!(close(e.coeffs[0], 1.0 / (nf + 1.0), 1e-14));
            assert!(close(e.coeffs[2], nf / (nf + 1.0), 1e-14));
        }
    }

    #[test]
    fn linearization_sum_and_reconstruction() {
        for n in [2, 3, 5] {
            for k in 1..9 {
                let e = linearization_coeffs(k, n).unwrap();
                assert!(close(e.sum(), 1.0, 1e-12));
                assert!(e.reconstruction_error().unwrap() < 1e-10);
                for j in (1..=2 * k).step_by(2) {
                    assert!(e.coeffs[j].abs() < 1e-12);
                }
            }
        }
        assert!(linearization_coeffs(2, 3).unwrap().coeffs[0] > 0.0);
    }

    #[test]
    fn gasper_report_runs_recurrence_as_stated() {
        let r = gasper_recurrence_report(2, 2).unwrap();
        assert_eq!(r.d.len(), 5);
        assert_eq!(r.d[0], 1.0);
        // B_0 = 0 so the recurrence gives d_2 = -C_1 / A_1 + B_1 / A_1.
        let d2 = (r.b_coeffs[1] - r.c_coeffs[1]) / r.a_coeffs[1];
        assert!(close(r.d[2], d2, 1e-15));
        assert_eq!(r.all_d_positive, r.d.iter().all(|&x| x > 0.0));
        assert!(r.projection_positive);

        let r = gasper_recurrence_report(3, 3).unwrap();
        assert_eq!(r.q_sign_changes, 1);
        assert_eq!(r.q_poly.len() - 1, 4);

        let r = gasper_recurrence_report(1, 2).unwrap();
        assert_eq!(r.consistent_with_projection, r.all_d_positive == r.projection_positive);
    }

    #[test]
    fn rodrigues_differs_by_constant() {
        // k = 1: (n/2) t
        for n in 2..6 {
            let v = rodrigues_eval(1, n, 0.4).unwrap();
            assert!(close(v, n as f64 / 2.0 * 0.4, 1e-14));
        }
        for n in [2, 3, 4, 6] {
            for k in 0..7 {
                let ratio0 = rodrigues_eval(k, n, 1.0).unwrap() / gegenbauer_eval(k, n, 1.0).unwrap();
                for i in 0..21 {
                    let t = -1.0 + 0.1 * i as f64;
                    let p = gegenbauer_eval(k, n, t).unwrap();
                    if p.abs() < 1e-3 {
                        continue;
                    }
                    let ratio = rodrigues_eval(k, n, t).unwrap() / p;
                    assert!(close(ratio, ratio0, 1e-12 * ratio0.abs()), "k={k} n={n} t={t}");
                }
            }
        }
    }

    #[test]
    fn jacobi_eigenvalue_matches_ladder() {
        for n in 2..8 {
            let jp = JacobiParams::ultraspherical(n).unwrap();
            for k in 0..10 {
                assert_eq!(jp.eigenvalue(k), (k * (k + n - 1)) as f64);
            }
        }
        assert!(JacobiParams::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn moments() {
        assert!(close(weight_mass(3), std::f64::consts::FRAC_PI_2, 1e-15));
        assert!(close(weight_mass(6), 16.0 / 15.0, 1e-15));
        assert!(close(even_moment(1, 2), 2.0 / 3.0, 1e-15));
        assert!(close(even_moment(1, 4), 4.0 / 15.0, 1e-15));
    }
}
