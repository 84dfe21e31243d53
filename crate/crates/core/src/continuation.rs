//! Newton solves, branch seeding at `(0, lambda_k)`, pseudo-arclength
//! continuation and location of degenerate solutions.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::discretize::{
    assemble_jacobian, assemble_lambda_derivative, assemble_residual, eigenvalues_by_magnitude,
    DiscreteSystem, SolutionPoint,
};
use crate::error::{Error, Result};
use crate::model::{dlambda_ds0, lambda_k};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuationConfig {
    /// Residual max-norm accepted by every Newton solve.
    pub newton_tol: f64,
    pub max_iter: usize,
    pub ds_init: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    /// Relative to [`DiscreteSystem::operator_scale`].
    pub sigma_tol: f64,
    pub s0: f64,
    /// `None` means `1e-3 lambda_1`.
    pub lambda_floor: Option<f64>,
    pub max_points: usize,
    /// Stop once `|s_coord|` exceeds this.
    pub s_max: f64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-10,
            max_iter: 30,
            ds_init: 1e-2,
            ds_min: 1e-6,
            ds_max: 0.1,
            sigma_tol: 1e-6,
            s0: 1e-2,
            lambda_floor: None,
            max_points: 400,
            s_max: 50.0,
        }
    }
}

impl ContinuationConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("newton_tol", self.newton_tol),
            ("ds_init", self.ds_init),
            ("ds_min", self.ds_min),
            ("ds_max", self.ds_max),
            ("sigma_tol", self.sigma_tol),
            ("s0", self.s0),
            ("s_max", self.s_max),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.ds_min <= self.ds_init && self.ds_init <= self.ds_max) {
            return Err(Error::InvalidParameter(format!(
                "need ds_min <= ds_init <= ds_max, got {} / {} / {}",
                self.ds_min, self.ds_init, self.ds_max
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        if let Some(f) = self.lambda_floor {
            if !(f >= 0.0) {
                return Err(Error::InvalidParameter(format!("lambda_floor must be >= 0, got {f}")));
            }
        }
        Ok(())
    }

    pub fn resolved_lambda_floor(&self, sys: &DiscreteSystem) -> f64 {
        self.lambda_floor
            .unwrap_or_else(|| 1e-3 * lambda_k(1, sys.params()).unwrap_or(0.0))
    }
}

/// Sign of the seed parameter `s`: the components `D_k^+` and `D_k^-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Plus => 1.0,
            Direction::Minus => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Plus => "plus",
            Direction::Minus => "minus",
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Direction::Plus),
            "minus" | "-" => Ok(Direction::Minus),
            _ => Err(Error::InvalidParameter(format!("unknown direction {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    Fold,
    SigmaZero,
    PositivityLoss,
    LambdaFloor,
    StepFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchEvent {
    /// Index of the point at (or just before) which the event occurs.
    pub index: usize,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    LambdaFloor,
    MaxPoints,
    SMax,
    PositivityLoss,
    StepFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub k: usize,
    pub direction: Direction,
    pub points: Vec<SolutionPoint>,
    pub events: Vec<BranchEvent>,
    pub termination: Termination,
}

impl Branch {
    pub fn events_at(&self, index: usize) -> impl Iterator<Item = EventKind> + '_ {
        self.events.iter().filter(move |e| e.index == index).map(|e| e.kind)
    }

    /// Index and value of the smallest `lambda` along the branch.
    pub fn lambda_min(&self) -> Option<(usize, f64)> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.lambda))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn nodal_constant(&self) -> bool {
        self.points.windows(2).all(|w| w[0].nodal_count == w[1].nodal_count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub k: usize,
    pub direction: Direction,
    pub lambda_star: f64,
    pub phi_star: Vec<f64>,
    pub s_star: f64,
    pub sigma_at_star: f64,
    /// Reference scale for `sigma_at_star`.
    pub operator_scale: f64,
    pub nodal_count: usize,
    pub u_min: f64,
    /// `s_coord` of the two branch points enclosing the crossing.
    pub s_bracket: [f64; 2],
    pub residual_norm: f64,
    /// Smallest `lambda` seen on the traced branch and its index.
    pub branch_lambda_min: f64,
    pub branch_lambda_min_index: usize,
    /// First fold along the branch, if any.
    pub fold_index: Option<usize>,
    /// `phi'(-1)` and `phi'(1)`.
    pub dphi_endpoints: [f64; 2],
}

/// Node values of `P_{k,n}` with the dual row giving the `s` coordinate.
#[derive(Debug, Clone)]
pub struct Mode {
    pub k: usize,
    pub values: DVector<f64>,
    dual: DVector<f64>,
}

impl Mode {
    pub fn new(k: usize, sys: &DiscreteSystem) -> Result<Self> {
        let values = sys.sample_mode(k)?;
        let dual = sys.gram() * &values / sys.inner(&values, &values);
        Ok(Self { k, values, dual })
    }

    /// `<phi, P>_w / <P, P>_w`.
    pub fn s_coord(&self, phi: &DVector<f64>) -> f64 {
        self.dual.dot(phi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub phi: DVector<f64>,
    pub lambda: f64,
}

impl Tangent {
    fn normalize(mut self, sys: &DiscreteSystem) -> Self {
        let nrm = (sys.inner(&self.phi, &self.phi) + self.lambda * self.lambda).sqrt();
        self.phi /= nrm;
        self.lambda /= nrm;
        self
    }
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

/// Try `phi + alpha dphi` for `alpha = 1, 1/2, ...` until every node stays
/// positive; 20 halvings at most.
fn positive_step(phi: &DVector<f64>, dphi: &DVector<f64>) -> Result<f64> {
    let mut alpha = 1.0;
    for _ in 0..=20 {
        if phi.iter().zip(dphi.iter()).all(|(p, d)| p + alpha * d + 1.0 > 0.0) {
            return Ok(alpha);
        }
        alpha *= 0.5;
    }
    let (node, u) = phi
        .iter()
        .zip(dphi.iter())
        .map(|(p, d)| p + alpha * d + 1.0)
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, 0.0));
    Err(Error::NonPositive { node, u })
}

/// Newton's method for `F(phi, lambda) = 0` at fixed `lambda`.
///
/// The returned point has `s_coord = 0`; callers that know the mode set it.
pub fn newton_solve(
    phi0: &DVector<f64>,
    lambda: f64,
    sys: &DiscreteSystem,
    tol: f64,
    max_iter: usize,
) -> Result<SolutionPoint> {
    let mut phi = phi0.clone();
    let mut res = assemble_residual(&phi, lambda, sys)?;
    for iter in 0..=max_iter {
        let rn = max_abs(&res);
        if rn < tol {
            return SolutionPoint::diagnose(sys, &phi, lambda, 0.0);
        }
        if iter == max_iter || rn.is_nan() {
            return Err(Error::NoConvergence { iterations: iter, residual: rn });
        }
        let jac = assemble_jacobian(&phi, lambda, sys)?;
        let step = jac
            .lu()
            .solve(&(-&res))
            .ok_or_else(|| Error::Numeric("singular Jacobian in Newton step".into()))?;
        let alpha = positive_step(&phi, &step)?;
        phi += alpha * step;
        res = assemble_residual(&phi, lambda, sys)?;
    }
    unreachable!()
}

/// Linear side condition `row_phi . phi + row_lambda lambda = rhs`.
struct Constraint<'a> {
    row_phi: &'a DVector<f64>,
    row_lambda: f64,
    rhs: f64,
}

impl Constraint<'_> {
    fn value(&self, phi: &DVector<f64>, lambda: f64) -> f64 {
        self.row_phi.dot(phi) + self.row_lambda * lambda - self.rhs
    }
}

/// Jacobian of `(F, g)` in `(phi, lambda)`.
fn extended_jacobian(
    phi: &DVector<f64>,
    lambda: f64,
    row_phi: &DVector<f64>,
    row_lambda: f64,
    sys: &DiscreteSystem,
) -> Result<DMatrix<f64>> {
    let m = sys.size();
    let jac = assemble_jacobian(phi, lambda, sys)?;
    let f_lambda = assemble_lambda_derivative(phi, sys)?;
    let mut ext = DMatrix::<f64>::zeros(m + 1, m + 1);
    ext.view_mut((0, 0), (m, m)).copy_from(&jac);
    ext.view_mut((0, m), (m, 1)).copy_from(&f_lambda);
    ext.view_mut((m, 0), (1, m)).copy_from(&row_phi.transpose());
    ext[(m, m)] = row_lambda;
    Ok(ext)
}

/// Newton on the extended system; returns the converged pair.
fn constrained_newton(
    phi0: &DVector<f64>,
    lambda0: f64,
    con: &Constraint<'_>,
    sys: &DiscreteSystem,
    tol: f64,
    max_iter: usize,
) -> Result<(DVector<f64>, f64, usize)> {
    let m = sys.size();
    let mut phi = phi0.clone();
    let mut lambda = lambda0;
    for iter in 0..=max_iter {
        let res = assemble_residual(&phi, lambda, sys)?;
        let g = con.value(&phi, lambda);
        let rn = max_abs(&res).max(g.abs());
        if rn < tol {
            return Ok((phi, lambda, iter));
        }
        if iter == max_iter || rn.is_nan() {
            return Err(Error::NoConvergence { iterations: iter, residual: rn });
        }
        let ext = extended_jacobian(&phi, lambda, con.row_phi, con.row_lambda, sys)?;
        let mut rhs = DVector::<f64>::zeros(m + 1);
        rhs.rows_mut(0, m).copy_from(&(-res));
        rhs[m] = -g;
        let step = ext
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numeric("singular extended Jacobian".into()))?;
        let dphi = step.rows(0, m).into_owned();
        let alpha = positive_step(&phi, &dphi)?;
        phi += alpha * dphi;
        lambda += alpha * step[m];
    }
    unreachable!()
}

/// Predictor `phi = s0 P_{k,n}`, `lambda = lambda_k + s0 dlambda/ds(0)`.
pub fn branch_seed(k: usize, s0: f64, sys: &DiscreteSystem) -> Result<SolutionPoint> {
    if k == 0 {
        return Err(Error::InvalidParameter("mode index k must be at least 1".into()));
    }
    if s0 == 0.0 || !s0.is_finite() {
        return Err(Error::InvalidParameter(format!("seed parameter must be nonzero, got {s0}")));
    }
    let p = sys.sample_mode(k)?;
    let lambda = lambda_k(k, sys.params())? + s0 * dlambda_ds0(k, sys.params())?;
    SolutionPoint::diagnose(sys, &(s0 * p), lambda, s0)
}

/// The branch point with `<phi, P_k>_w / <P_k, P_k>_w = s`, corrected from
/// the seed predictor (or from `guess` when given).
pub fn solve_at_s(
    k: usize,
    s: f64,
    guess: Option<(&DVector<f64>, f64)>,
    sys: &DiscreteSystem,
    cfg: &ContinuationConfig,
) -> Result<SolutionPoint> {
    let mode = Mode::new(k, sys)?;
    let (phi0, lambda0) = match guess {
        Some((phi, lambda)) => (phi.clone(), lambda),
        None => {
            let seed = branch_seed(k, s, sys)?;
            (seed.phi_vector(), seed.lambda)
        }
    };
    let con = Constraint { row_phi: &mode.dual, row_lambda: 0.0, rhs: s };
    let (phi, lambda, _) = constrained_newton(&phi0, lambda0, &con, sys, cfg.newton_tol, cfg.max_iter)?;
    SolutionPoint::diagnose(sys, &phi, lambda, mode.s_coord(&phi))
}

/// Unit tangent of the solution curve at `point`, oriented to have positive
/// product with `prev`.
pub fn tangent(point: &SolutionPoint, prev: &Tangent, sys: &DiscreteSystem) -> Result<Tangent> {
    let m = sys.size();
    let phi = point.phi_vector();
    let row = sys.gram() * &prev.phi;
    let ext = extended_jacobian(&phi, point.lambda, &row, prev.lambda, sys)?;
    let mut rhs = DVector::<f64>::zeros(m + 1);
    rhs[m] = 1.0;
    let t = ext
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numeric("singular tangent system".into()))?;
    Ok(Tangent { phi: t.rows(0, m).into_owned(), lambda: t[m] }.normalize(sys))
}

/// Tangent at a point of the `k` branch oriented so that `s` moves in
/// `direction`.
pub fn seed_tangent(point: &SolutionPoint, mode: &Mode, direction: Direction, sys: &DiscreteSystem) -> Result<Tangent> {
    let m = sys.size();
    let phi = point.phi_vector();
    let ext = extended_jacobian(&phi, point.lambda, &mode.dual, 0.0, sys)?;
    let mut rhs = DVector::<f64>::zeros(m + 1);
    rhs[m] = direction.sign();
    let t = ext
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numeric("singular tangent system".into()))?;
    Ok(Tangent { phi: t.rows(0, m).into_owned(), lambda: t[m] }.normalize(sys))
}

fn arclength_correct(
    base_phi: &DVector<f64>,
    base_lambda: f64,
    tan: &Tangent,
    ds: f64,
    sys: &DiscreteSystem,
    cfg: &ContinuationConfig,
) -> Result<(DVector<f64>, f64, usize)> {
    let row = sys.gram() * &tan.phi;
    let rhs = row.dot(base_phi) + tan.lambda * base_lambda + ds;
    let con = Constraint { row_phi: &row, row_lambda: tan.lambda, rhs };
    let phi0 = base_phi + ds * &tan.phi;
    let lambda0 = base_lambda + ds * tan.lambda;
    constrained_newton(&phi0, lambda0, &con, sys, cfg.newton_tol, cfg.max_iter)
}

/// One predictor-corrector step of length `ds` along `tan`. The new point
/// keeps the nodal count of `current`.
pub fn arclength_step(
    current: &SolutionPoint,
    tan: &Tangent,
    ds: f64,
    mode: &Mode,
    sys: &DiscreteSystem,
    cfg: &ContinuationConfig,
) -> Result<SolutionPoint> {
    step_with_iterations(current, tan, ds, mode, sys, cfg).map(|(p, _)| p)
}

fn step_with_iterations(
    current: &SolutionPoint,
    tan: &Tangent,
    ds: f64,
    mode: &Mode,
    sys: &DiscreteSystem,
    cfg: &ContinuationConfig,
) -> Result<(SolutionPoint, usize)> {
    let base = current.phi_vector();
    let (phi, lambda, iters) = arclength_correct(&base, current.lambda, tan, ds, sys, cfg)?;
    let next = SolutionPoint::diagnose(sys, &phi, lambda, mode.s_coord(&phi))?;
    if next.nodal_count != current.nodal_count {
        return Err(Error::NodalChange { from: current.nodal_count, to: next.nodal_count });
    }
    Ok((next, iters))
}

/// Follow `D_k^{+-}` from the seed at `s = +-s0` until a stop condition.
pub fn trace_branch(
    k: usize,
    direction: Direction,
    cfg: &ContinuationConfig,
    sys: &DiscreteSystem,
) -> Result<Branch> {
    cfg.validate()?;
    let mode = Mode::new(k, sys)?;
    let floor = cfg.resolved_lambda_floor(sys);
    let first = solve_at_s(k, direction.sign() * cfg.s0, None, sys, cfg)?;
    let mut tan = seed_tangent(&first, &mode, direction, sys)?;
    let mut points = vec![first];
    let mut events = Vec::new();
    let mut ds = cfg.ds_init;
    let termination = loop {
        if points.len() >= cfg.max_points {
            break Termination::MaxPoints;
        }
        let current = points.last().expect("branch has a seed point");
        match step_with_iterations(current, &tan, ds, &mode, sys, cfg) {
            Ok((next, iters)) => {
                if next.lambda < floor {
                    events.push(BranchEvent { index: points.len() - 1, kind: EventKind::LambdaFloor });
                    break Termination::LambdaFloor;
                }
                let new_tan = tangent(&next, &tan, sys)?;
                let i = points.len();
                if i >= 2 {
                    let before = points[i - 1].lambda - points[i - 2].lambda;
                    let after = next.lambda - points[i - 1].lambda;
                    if before * after < 0.0 {
                        events.push(BranchEvent { index: i - 1, kind: EventKind::Fold });
                    }
                }
                if points[i - 1].sigma_min * next.sigma_min <= 0.0 {
                    events.push(BranchEvent { index: i - 1, kind: EventKind::SigmaZero });
                }
                let beyond = next.s_coord.abs() > cfg.s_max;
                points.push(next);
                tan = new_tan;
                if beyond {
                    break Termination::SMax;
                }
                if iters <= 3 {
                    ds = (ds * 1.5).min(cfg.ds_max);
                } else if iters > 6 {
                    ds = (ds * 0.5).max(cfg.ds_min);
                }
            }
            Err(err) => {
                let fatal = !matches!(
                    err,
                    Error::NoConvergence { .. } | Error::NonPositive { .. } | Error::NodalChange { .. } | Error::Numeric(_)
                );
                if fatal {
                    return Err(err);
                }
                ds *= 0.5;
                if ds < cfg.ds_min {
                    let index = points.len() - 1;
                    if matches!(err, Error::NonPositive { .. }) {
                        events.push(BranchEvent { index, kind: EventKind::PositivityLoss });
                        break Termination::PositivityLoss;
                    }
                    events.push(BranchEvent { index, kind: EventKind::StepFailure });
                    break Termination::StepFailure;
                }
            }
        }
    };
    Ok(Branch { k, direction, points, events, termination })
}

/// Bisect on the secant between two branch points for a sign change of
/// `sigma_min`. Returns `None` when the change is a jump between
/// eigenvalues rather than a zero.
fn refine_crossing(
    a: &SolutionPoint,
    b: &SolutionPoint,
    mode: &Mode,
    sys: &DiscreteSystem,
    cfg: &ContinuationConfig,
) -> Result<Option<(SolutionPoint, f64, f64)>> {
    let base = a.phi_vector();
    let dphi = b.phi_vector() - &base;
    let dlambda = b.lambda - a.lambda;
    let len = (sys.inner(&dphi, &dphi) + dlambda * dlambda).sqrt();
    let tan = Tangent { phi: dphi / len, lambda: dlambda / len };
    let sign_a = a.sigma_min.signum();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut best: Option<(SolutionPoint, f64, f64)> = None;
    for _ in 0..60 {
        let theta = 0.5 * (lo + hi);
        let (phi, lambda, _) = arclength_correct(&base, a.lambda, &tan, theta * len, sys, cfg)?;
        let pt = SolutionPoint::diagnose(sys, &phi, lambda, mode.s_coord(&phi))?;
        let scale = sys.operator_scale(&phi, lambda)?;
        let done = pt.sigma_min.abs() < 1e-3 * cfg.sigma_tol * scale;
        if pt.sigma_min.signum() == sign_a {
            lo = theta;
        } else {
            hi = theta;
        }
        best = Some((pt, scale, theta));
        if done || hi - lo < 1e-15 {
            break;
        }
    }
    Ok(best.filter(|(pt, scale, _)| pt.sigma_min.abs() < cfg.sigma_tol * scale))
}

/// First genuine zero of `sigma_min` along the branch, refined by bisection.
pub fn locate_degenerate(
    branch: &Branch,
    cfg: &ContinuationConfig,
    sys: &DiscreteSystem,
) -> Result<Option<DegeneracyReport>> {
    if branch.points.len() < 3 {
        return Ok(None);
    }
    let mode = Mode::new(branch.k, sys)?;
    let (min_index, min_lambda) = branch.lambda_min().expect("nonempty branch");
    let fold_index = branch
        .events
        .iter()
        .find(|e| e.kind == EventKind::Fold)
        .map(|e| e.index);
    for (i, pair) in branch.points.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        if a.sigma_min * b.sigma_min > 0.0 {
            continue;
        }
        let Some((pt, scale, _)) = refine_crossing(a, b, &mode, sys, cfg)? else {
            log::debug!("sigma sign change between points {i} and {} is a jump", i + 1);
            continue;
        };
        if pt.nodal_count != branch.k || pt.u_min <= 0.0 {
            continue;
        }
        let phi = pt.phi_vector();
        let residual_norm = max_abs(&assemble_residual(&phi, pt.lambda, sys)?);
        let (dm, dp) = sys.endpoint_slopes(&phi);
        return Ok(Some(DegeneracyReport {
            k: branch.k,
            direction: branch.direction,
            lambda_star: pt.lambda,
            s_star: pt.s_coord,
            sigma_at_star: pt.sigma_min,
            operator_scale: scale,
            nodal_count: pt.nodal_count,
            u_min: pt.u_min,
            s_bracket: [a.s_coord, b.s_coord],
            residual_norm,
            branch_lambda_min: min_lambda,
            branch_lambda_min_index: min_index,
            fold_index,
            dphi_endpoints: [dm, dp],
            phi_star: pt.phi,
        }));
    }
    Ok(None)
}

/// A zero of `sigma_min` along the trivial branch `(0, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrivialCrossing {
    pub lambda: f64,
    pub sigma: f64,
    /// Eigenvalues of magnitude below `1e-6` times the operator scale.
    pub kernel_dim: usize,
}

/// Number of eigenvalues of `J(0, lambda)` below `1e-6` times the
/// operator scale in magnitude.
pub fn trivial_kernel_dim(lambda: f64, sys: &DiscreteSystem) -> Result<usize> {
    let zero = DVector::zeros(sys.size());
    let jac = assemble_jacobian(&zero, lambda, sys)?;
    let scale = sys.operator_scale(&zero, lambda)?;
    Ok(eigenvalues_by_magnitude(&jac)?
        .iter()
        .take_while(|z| z.norm() < 1e-6 * scale)
        .count())
}

fn trivial_sigma(lambda: f64, sys: &DiscreteSystem) -> Result<f64> {
    let zero = DVector::zeros(sys.size());
    crate::discretize::sigma_min(&assemble_jacobian(&zero, lambda, sys)?)
}

/// Scan `sigma_min` on the trivial branch over `[lambda_lo, lambda_hi]`
/// with `samples` points, bisecting every sign change. Jumps between
/// eigenvalues are discarded.
pub fn scan_trivial_branch(
    lambda_lo: f64,
    lambda_hi: f64,
    samples: usize,
    sys: &DiscreteSystem,
) -> Result<Vec<TrivialCrossing>> {
    if !(0.0 < lambda_lo && lambda_lo < lambda_hi) || samples < 2 {
        return Err(Error::InvalidParameter(format!(
            "need 0 < lambda_lo < lambda_hi and samples >= 2, got [{lambda_lo}, {lambda_hi}], {samples}"
        )));
    }
    let grid: Vec<f64> = (0..samples)
        .map(|i| lambda_lo + (lambda_hi - lambda_lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let sigmas: Result<Vec<f64>> = grid.iter().map(|&l| trivial_sigma(l, sys)).collect();
    let sigmas = sigmas?;
    let zero = DVector::zeros(sys.size());
    let mut out = Vec::new();
    for i in 0..samples - 1 {
        if sigmas[i] * sigmas[i + 1] > 0.0 {
            continue;
        }
        let (mut lo, mut hi) = (grid[i], grid[i + 1]);
        let sign_lo = sigmas[i].signum();
        let mut sigma = sigmas[i];
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            sigma = trivial_sigma(mid, sys)?;
            if sigma.signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);
        let scale = sys.operator_scale(&zero, lambda)?;
        if sigma.abs() < 1e-6 * scale {
            out.push(TrivialCrossing { lambda, sigma, kernel_dim: trivial_kernel_dim(lambda, sys)? });
        }
    }
    Ok(out)
}

/// `||w(s) - s P_{k,n}||_w / |s|` for each `s`.
pub fn psi_smallness_check(
    k: usize,
    s_list: &[f64],
    sys: &DiscreteSystem,
    cfg: &ContinuationConfig,
) -> Result<Vec<f64>> {
    let p = sys.sample_mode(k)?;
    s_list
        .iter()
        .map(|&s| {
            let pt = solve_at_s(k, s, None, sys, cfg)?;
            Ok(sys.norm(&(pt.phi_vector() - s * &p)) / s.abs())
        })
        .collect()
}

/// `(lambda(s_b) - lambda(s_a)) / (s_b - s_a)` from two branch solves.
pub fn secant_slope(
    k: usize,
    s_a: f64,
    s_b: f64,
    sys: &DiscreteSystem,
    cfg: &ContinuationConfig,
) -> Result<f64> {
    let a = solve_at_s(k, s_a, None, sys, cfg)?;
    let b = solve_at_s(k, s_b, None, sys, cfg)?;
    Ok((b.lambda - a.lambda) / (b.s_coord - a.s_coord))
}

/// Estimate of `dlambda/ds` at the bifurcation point: the one-sided secant
/// from `lambda_k` for even `k`, the central secant over `D_k^+` and
/// `D_k^-` for odd `k`.
pub fn seed_slope(k: usize, s0: f64, sys: &DiscreteSystem, cfg: &ContinuationConfig) -> Result<f64> {
    if k % 2 == 1 {
        secant_slope(k, -s0, s0, sys, cfg)
    } else {
        let pt = solve_at_s(k, s0, None, sys, cfg)?;
        Ok((pt.lambda - lambda_k(k, sys.params())?) / pt.s_coord)
    }
}
