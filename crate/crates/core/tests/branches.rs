use nalgebra::DVector;
use yamabe_core::continuation::*;
use yamabe_core::discretize::*;
use yamabe_core::model::{dlambda_ds0, lambda_k, ModelParams};

fn system(degree: usize) -> DiscreteSystem {
    DiscreteSystem::with_degree(degree, ModelParams::new(2, 1.0, 3.0).unwrap()).unwrap()
}

fn short(max_points: usize) -> ContinuationConfig {
    ContinuationConfig { max_points, ..Default::default() }
}

/// Smallest-magnitude eigenvalue by inverse iteration with zero shift.
fn inverse_iteration_eigenvalue(jac: &nalgebra::DMatrix<f64>) -> f64 {
    let lu = jac.clone().lu();
    let mut v = DVector::from_element(jac.nrows(), 1.0);
    for _ in 0..50 {
        v = lu.solve(&v).unwrap();
        v /= v.norm();
    }
    v.dot(&(jac * &v))
}

#[test]
fn trivial_solution_is_exact() {
    let sys = system(48);
    for i in 0..20 {
        let lam = 0.5 + 3.0 * i as f64;
        let zero = DVector::zeros(sys.size());
        let pt = newton_solve(&zero, lam, &sys, 1e-10, 30).unwrap();
        let res = assemble_residual(&pt.phi_vector(), lam, &sys).unwrap();
        assert_eq!(res.amax(), 0.0);
    }
}

#[test]
fn slope_law_even_k() {
    let sys = system(64);
    let cfg = ContinuationConfig::default();
    let exact = dlambda_ds0(2, sys.params()).unwrap();
    assert!((exact + 24.0 / 7.0).abs() < 1e-12);
    let coarse = seed_slope(2, 1e-2, &sys, &cfg).unwrap();
    assert!(((coarse - exact) / exact).abs() < 0.10);
    let fine = seed_slope(2, 2e-3, &sys, &cfg).unwrap();
    assert!(((fine - exact) / exact).abs() < 0.03);
    assert!((fine - exact).abs() < (coarse - exact).abs());
    let secant = secant_slope(2, 2e-3, 4e-3, &sys, &cfg).unwrap();
    assert!(((secant - exact) / exact).abs() < 0.03);
}

#[test]
fn slope_vanishes_for_odd_k() {
    let sys = system(64);
    let cfg = ContinuationConfig::default();
    for k in [1, 3] {
        assert_eq!(dlambda_ds0(k, sys.params()).unwrap(), 0.0);
        assert!(seed_slope(k, 1e-2, &sys, &cfg).unwrap().abs() < 1e-3);
    }
}

#[test]
fn even_branch_starts_downward() {
    let sys = system(64);
    let br = trace_branch(2, Direction::Plus, &short(8), &sys).unwrap();
    assert_eq!(br.termination, Termination::MaxPoints);
    let (a, b) = (&br.points[0], &br.points[1]);
    let slope = (b.lambda - a.lambda) / (b.s_coord - a.s_coord);
    assert!(((slope + 24.0 / 7.0) / (24.0 / 7.0)).abs() < 0.10);
    assert!(br.points.windows(2).take(4).all(|w| w[1].lambda < w[0].lambda));
    assert!(br.points.iter().all(|p| p.nodal_count == 2 && p.u_min > 0.0));
}

#[test]
fn even_branch_is_reflection_invariant() {
    let sys = system(48);
    for k in [2, 4] {
        let br = trace_branch(k, Direction::Plus, &short(30), &sys).unwrap();
        for p in &br.points {
            let v = p.phi_vector();
            assert!((sys.grid().reflect(&v) - &v).amax() < 1e-8);
        }
    }
}

#[test]
fn odd_branches_are_mirror_images() {
    let sys = system(48);
    for k in [1, 3] {
        let plus = trace_branch(k, Direction::Plus, &short(30), &sys).unwrap();
        let minus = trace_branch(k, Direction::Minus, &short(30), &sys).unwrap();
        assert_eq!(plus.points.len(), minus.points.len());
        for (p, m) in plus.points.iter().zip(&minus.points) {
            let refl = sys.grid().reflect(&p.phi_vector());
            assert!((refl - m.phi_vector()).amax() < 1e-8);
            assert!((p.lambda - m.lambda).abs() < 1e-8);
            assert!((p.s_coord + m.s_coord).abs() < 1e-8);
        }
    }
}

#[test]
fn nodal_count_constant_on_branches() {
    let sys = system(48);
    for k in 1..=4 {
        for dir in [Direction::Plus, Direction::Minus] {
            let br = trace_branch(k, dir, &short(60), &sys).unwrap();
            assert!(br.nodal_constant());
            assert_eq!(br.points[0].nodal_count, k);
        }
    }
}

#[test]
fn degenerate_point_on_k2_branch() {
    let sys = system(64);
    let cfg = short(40);
    let br = trace_branch(2, Direction::Plus, &cfg, &sys).unwrap();
    let rep = locate_degenerate(&br, &cfg, &sys).unwrap().expect("k = 2 branch folds");
    assert!(rep.lambda_star < 12.0);
    assert_eq!(rep.nodal_count, 2);
    assert!(rep.u_min > 0.0);
    assert!(rep.residual_norm < cfg.newton_tol);
    assert!(rep.sigma_at_star.abs() < cfg.sigma_tol * rep.operator_scale);
    assert!(rep.lambda_star <= rep.branch_lambda_min + 1e-9);
    assert!(rep.fold_index.is_some());
    // Independent check of the kernel at the reported point.
    let phi = DVector::from_column_slice(&rep.phi_star);
    let jac = assemble_jacobian(&phi, rep.lambda_star, &sys).unwrap();
    let mu = inverse_iteration_eigenvalue(&jac);
    assert!(mu.abs() < cfg.sigma_tol * rep.operator_scale, "mu = {mu:e}");
    // The fold and the kernel coincide: lambda is stationary along the branch.
    let lo = br.points.iter().map(|p| p.lambda).fold(f64::INFINITY, f64::min);
    assert!((lo - rep.lambda_star).abs() < 1e-2);
}

#[test]
fn no_degenerate_point_before_fold() {
    let sys = system(48);
    let cfg = short(6);
    let br = trace_branch(2, Direction::Plus, &cfg, &sys).unwrap();
    assert!(locate_degenerate(&br, &cfg, &sys).unwrap().is_none());
    let tiny = Branch { points: br.points[..2].to_vec(), ..br };
    assert!(locate_degenerate(&tiny, &cfg, &sys).unwrap().is_none());
}

#[test]
fn trivial_scan_hits_next_eigenvalue() {
    let sys = system(64);
    let prm = *sys.params();
    for k in 1..=4 {
        let lk = lambda_k(k, &prm).unwrap();
        let lk1 = lambda_k(k + 1, &prm).unwrap();
        let found = scan_trivial_branch(lk + 0.5, lk1 + 0.5, 40, &sys).unwrap();
        assert_eq!(found.len(), 1);
        assert!(((found[0].lambda - lk1) / lk1).abs() < 1e-10);
        assert_eq!(found[0].kernel_dim, 1);
    }
}

#[test]
fn psi_is_second_order() {
    let sys = system(64);
    let cfg = ContinuationConfig::default();
    for k in [2, 3] {
        let r = psi_smallness_check(k, &[1e-2, 5e-3, 2.5e-3], &sys, &cfg).unwrap();
        let ratio = r[0] / r[1];
        assert!((1.5..=2.5).contains(&ratio), "k={k} ratio={ratio}");
        assert!(r[2] < r[1] && r[1] < r[0]);
    }
}

#[test]
fn s_normalized_solve_hits_requested_s() {
    let sys = system(48);
    let cfg = ContinuationConfig::default();
    for s in [-0.05, 0.003, 0.2] {
        let pt = solve_at_s(2, s, None, &sys, &cfg).unwrap();
        assert!((pt.s_coord - s).abs() < 1e-10);
        let res = assemble_residual(&pt.phi_vector(), pt.lambda, &sys).unwrap();
        assert!(res.amax() < cfg.newton_tol);
    }
}
