//! Parameters of `-Delta u + lambda u = lambda u^{q-1}` on `(S^n x S^n, G_delta)`
//! and the ODE obtained from the ansatz `u = 1 + phi(<p, q>)`.
//!
//! With `L phi = (1 - t^2) phi'' - n t phi'` the reduced equation reads
//!
//! ```text
//! L phi + c(lambda) / (q - 2) * [(phi + 1)^{q-1} - phi - 1] = 0,
//! c(lambda) = lambda (q - 2) / (1 + 1/delta),
//! ```
//!
//! so the linearization at `phi = 0` is `L v + c(lambda) v` and bifurcation
//! happens where `c(lambda) = k (k + n - 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyspec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub delta: f64,
    pub q: f64,
}

impl ModelParams {
    pub fn new(n: usize, delta: f64, q: f64) -> Result<Self> {
        let params = Self { n, delta, q };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        let q_f = critical_exponent(self.n);
        if !(self.q > 2.0 && self.q < q_f) {
            return Err(Error::InvalidParameter(format!(
                "q must satisfy 2 < q < q_f = {q_f}, got {}",
                self.q
            )));
        }
        Ok(())
    }

    /// `1 + 1/delta`.
    pub fn metric_factor(&self) -> f64 {
        1.0 + 1.0 / self.delta
    }

    /// `c(lambda) = lambda (q - 2) / (1 + 1/delta)`, the zero-order
    /// coefficient of the linearization at `phi = 0`.
    pub fn c_factor(&self, lambda: f64) -> f64 {
        lambda * (self.q - 2.0) / self.metric_factor()
    }

    /// `lambda / (1 + 1/delta)`, the factor in front of the nonlinearity.
    pub fn nonlinear_factor(&self, lambda: f64) -> f64 {
        lambda / self.metric_factor()
    }

    /// `(phi + 1)^{q-1} - phi - 1`.
    pub fn nonlinearity(&self, phi: f64) -> Result<f64> {
        let u = positive_u(phi)?;
        Ok(u.powf(self.q - 1.0) - u)
    }

    /// Derivative `(q - 1)(phi + 1)^{q-2} - 1` of [`Self::nonlinearity`].
    pub fn nonlinearity_deriv(&self, phi: f64) -> Result<f64> {
        let u = positive_u(phi)?;
        Ok((self.q - 1.0) * u.powf(self.q - 2.0) - 1.0)
    }
}

fn positive_u(phi: f64) -> Result<f64> {
    let u = phi + 1.0;
    if !(u > 0.0) {
        return Err(Error::Domain(format!(
            "u = phi + 1 = {u} is not positive"
        )));
    }
    Ok(u)
}

/// `q_f = (n + 2)/(n - 2)` for `n >= 3`, `+inf` for `n = 2`.
pub fn critical_exponent(n: usize) -> f64 {
    if n <= 2 {
        f64::INFINITY
    } else {
        (n as f64 + 2.0) / (n as f64 - 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// `+inf` for `n = 2`. Serialized as `null` in that case.
    pub q_f: f64,
    /// `(2n + 2)/(2n - 2)`.
    pub p_2n: f64,
    /// `4(2n - 1)/(2n - 2)`.
    pub a_2n: f64,
    q_minus_2: f64,
    metric_factor: f64,
}

impl DerivedConstants {
    pub fn c_factor(&self, lambda: f64) -> f64 {
        lambda * self.q_minus_2 / self.metric_factor
    }
}

pub fn derived_constants(params: &ModelParams) -> Result<DerivedConstants> {
    params.validate()?;
    let two_n = 2.0 * params.n as f64;
    Ok(DerivedConstants {
        q_f: critical_exponent(params.n),
        p_2n: (two_n + 2.0) / (two_n - 2.0),
        a_2n: 4.0 * (two_n - 1.0) / (two_n - 2.0),
        q_minus_2: params.q - 2.0,
        metric_factor: params.metric_factor(),
    })
}

/// `lambda_k = k (k + n - 1) (1 + 1/delta) / (q - 2)`.
pub fn lambda_k(k: usize, params: &ModelParams) -> Result<f64> {
    if !(params.q > 2.0) {
        return Err(Error::InvalidParameter(format!(
            "q must exceed 2, got {}",
            params.q
        )));
    }
    let kf = k as f64;
    Ok(kf * (kf + params.n as f64 - 1.0) * params.metric_factor() / (params.q - 2.0))
}

/// The `lambda` for which the equation is the Yamabe equation on
/// `(S^n x S^n, G_delta)`: `n (n - 1)(1 + 1/delta) / a_{2n}`.
pub fn yamabe_lambda(n: usize, delta: f64) -> Result<f64> {
    if n < 2 || !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need n >= 2 and delta > 0, got n = {n}, delta = {delta}"
        )));
    }
    let nf = n as f64;
    let a_2n = 4.0 * (2.0 * nf - 1.0) / (2.0 * nf - 2.0);
    Ok(nf * (nf - 1.0) * (1.0 + 1.0 / delta) / a_2n)
}

/// Point of a profile `phi` with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub t: f64,
    pub phi: f64,
    pub dphi: f64,
    pub d2phi: f64,
}

/// `(1 - t^2) phi'' - n t phi' + c(lambda)/(q - 2) [(phi + 1)^{q-1} - phi - 1]`.
pub fn ode_residual(pt: &ProfilePoint, lambda: f64, params: &ModelParams) -> Result<f64> {
    if !(pt.t.abs() <= 1.0) {
        return Err(Error::Domain(format!("t = {} lies outside [-1, 1]", pt.t)));
    }
    let n = params.n as f64;
    let linear = (1.0 - pt.t * pt.t) * pt.d2phi - n * pt.t * pt.dphi;
    Ok(linear + params.nonlinear_factor(lambda) * params.nonlinearity(pt.phi)?)
}

/// Focal boundary sides `t = -1` and `t = +1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn t(self) -> f64 {
        match self {
            Side::Minus => -1.0,
            Side::Plus => 1.0,
        }
    }
}

/// Regular limit of the reduced equation at `t = -1` (`n phi' + ...`) and
/// `t = +1` (`-n phi' + ...`).
pub fn endpoint_residual(
    side: Side,
    phi_end: f64,
    dphi_end: f64,
    lambda: f64,
    params: &ModelParams,
) -> Result<f64> {
    let n = params.n as f64;
    let flux = match side {
        Side::Minus => n * dphi_end,
        Side::Plus => -n * dphi_end,
    };
    Ok(flux + params.nonlinear_factor(lambda) * params.nonlinearity(phi_end)?)
}

/// Zero-order coefficient `lambda (1 - (q - 1) u^{q-2})` of the
/// linearization of `-Delta u + lambda u - lambda u^{q-1}` at `u`.
pub fn linearized_potential(u_val: f64, lambda: f64, params: &ModelParams) -> Result<f64> {
    if !(u_val > 0.0) {
        return Err(Error::Domain(format!("u = {u_val} is not positive")));
    }
    Ok(lambda * (1.0 - (params.q - 1.0) * u_val.powf(params.q - 2.0)))
}

/// `dlambda/ds (0) = -lambda_k (q - 1) int P^3 w / (2 int P^2 w)`.
pub fn dlambda_ds0(k: usize, params: &ModelParams) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("mode index must be at least 1".into()));
    }
    let cube = polyspec::cube_integral(k, params.n)?;
    let square = polyspec::square_integral(k, params.n)?;
    Ok(-lambda_k(k, params)? * (params.q - 1.0) * cube / (2.0 * square))
}
